//! Base-rate frame construction: short training field, long training field and
//! payload OFDM symbols.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::constellation::modulate_bits;
use crate::phy::conv::conv_encode;
use crate::phy::crc::{bytes_to_bits, crc32};
use crate::phy::fft::ifft64;
use crate::phy::{Coding, FrameConfig, Mcs};
use crate::stream::SampleStream;

pub const STF_LEN: usize = 160;
pub const LTF_LEN: usize = 160;
pub const LTF_GUARD: usize = 32;
pub const PREAMBLE_LEN: usize = STF_LEN + LTF_LEN;
pub const STF_PERIOD: usize = 16;

/// Out-of-band frame description; there is no SIGNAL field on air.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameMeta {
    pub mcs: Mcs,
    pub payload_len: usize,
    pub crc: u32,
    pub n_symbols: usize,
}

/// A contiguous piece of the frame whose samples are one period-64 waveform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub stf: SampleStream,
    pub ltf: SampleStream,
    pub payload_symbols: Vec<SampleStream>,
    /// Transmitted constellation points per payload symbol, in data-subcarrier order.
    pub data_points: Vec<Vec<Complex64>>,
    /// Information bits (payload followed by CRC), LSB-first per byte.
    pub info_bits: Vec<u8>,
    pub meta: FrameMeta,
}

impl Frame {
    pub fn len(&self) -> usize {
        PREAMBLE_LEN + self.payload_symbols.iter().map(SampleStream::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Concatenated base-rate samples.
    pub fn samples(&self) -> SampleStream {
        let mut s = Vec::with_capacity(self.len());
        s.extend_from_slice(&self.stf.samples);
        s.extend_from_slice(&self.ltf.samples);
        for sym in &self.payload_symbols {
            s.extend_from_slice(&sym.samples);
        }
        SampleStream::new(s, self.stf.rate)
    }

    /// STF, LTF and each payload symbol as separate periodic segments.
    pub fn segments(&self) -> Vec<Segment> {
        let mut segs = vec![Segment { start: 0, len: STF_LEN }, Segment { start: STF_LEN, len: LTF_LEN }];
        let mut start = PREAMBLE_LEN;
        for sym in &self.payload_symbols {
            segs.push(Segment { start, len: sym.len() });
            start += sym.len();
        }
        segs
    }
}

fn synthesize(bins: &[Complex64], cfg: &FrameConfig) -> Vec<Complex64> {
    let scale = cfg.tx_scale();
    ifft64(bins).expect("64 bins").into_iter().map(|v| v * scale).collect()
}

/// Ten repetitions of the 16-sample short training period.
pub fn build_stf(cfg: &FrameConfig) -> SampleStream {
    let block = synthesize(&cfg.stf_bins(), cfg);
    let samples = (0..STF_LEN).map(|n| block[n % 64]).collect();
    SampleStream::new(samples, cfg.base_rate)
}

/// 32-sample cyclic guard followed by two identical 64-sample training blocks.
pub fn build_ltf(cfg: &FrameConfig) -> SampleStream {
    let block = synthesize(&cfg.ltf_bins(), cfg);
    let mut samples = Vec::with_capacity(LTF_LEN);
    samples.extend_from_slice(&block[64 - LTF_GUARD..]);
    samples.extend_from_slice(&block);
    samples.extend_from_slice(&block);
    SampleStream::new(samples, cfg.base_rate)
}

/// One payload OFDM symbol from its data points: pilots inserted, inverse
/// transform, cyclic prefix prepended.
pub fn build_symbol(data: &[Complex64], cfg: &FrameConfig) -> SampleStream {
    let mut bins = vec![Complex64::new(0.0, 0.0); cfg.nfft];
    for (k, v) in cfg.data_subcarriers.iter().zip(data) {
        bins[cfg.bin(*k)] = *v;
    }
    for (k, p) in cfg.pilot_subcarriers.iter().zip(&cfg.pilot_values) {
        bins[cfg.bin(*k)] = Complex64::new(*p, 0.0);
    }
    let body = synthesize(&bins, cfg);
    let mut samples = Vec::with_capacity(cfg.symbol_len());
    samples.extend_from_slice(&body[cfg.nfft - cfg.cp_len..]);
    samples.extend_from_slice(&body);
    SampleStream::new(samples, cfg.base_rate)
}

/// Payload bytes plus CRC-32 (little-endian), as information bits.
pub fn payload_info_bits(payload: &[u8]) -> Vec<u8> {
    let mut bytes = payload.to_vec();
    bytes.extend_from_slice(&crc32(payload).to_le_bytes());
    bytes_to_bits(&bytes)
}

pub fn assemble_frame(payload: &[u8], mcs: Mcs, cfg: &FrameConfig) -> Result<Frame> {
    if payload.is_empty() {
        return Err(Error::EmptyPayload);
    }
    let info_bits = payload_info_bits(payload);
    let mut coded = match mcs.coding {
        Coding::Uncoded => info_bits.clone(),
        Coding::HalfRateConv => conv_encode(&info_bits),
    };
    let n_symbols = mcs.symbols_for(payload.len(), cfg);
    let per_symbol = cfg.data_subcarriers.len() * mcs.scheme.bits_per_symbol();
    coded.resize(n_symbols * per_symbol, 0);

    let mut data_points = Vec::with_capacity(n_symbols);
    let mut payload_symbols = Vec::with_capacity(n_symbols);
    for chunk in coded.chunks(per_symbol) {
        let points = modulate_bits(chunk, mcs.scheme)?;
        payload_symbols.push(build_symbol(&points, cfg));
        data_points.push(points);
    }
    Ok(Frame {
        stf: build_stf(cfg),
        ltf: build_ltf(cfg),
        payload_symbols,
        data_points,
        info_bits,
        meta: FrameMeta { mcs, payload_len: payload.len(), crc: crc32(payload), n_symbols },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::fft::fft64;
    use crate::phy::Scheme;
    use rand::{Rng, SeedableRng};

    #[test]
    fn stf_is_sixteen_periodic() {
        let cfg = FrameConfig::default();
        let stf = build_stf(&cfg);
        assert_eq!(stf.len(), 160);
        for n in 0..144 {
            assert!((stf[n] - stf[n + 16]).norm() < 1e-12);
        }
        // Lag-16 autocorrelation over the field is exactly one.
        let num: Complex64 = (0..144).map(|n| stf[n] * stf[n + 16].conj()).sum();
        let den: f64 = (0..144).map(|n| stf[n + 16].norm_sqr()).sum();
        assert!((num.norm() / den - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stf_period_spectrum_on_tone_set() {
        let cfg = FrameConfig::default();
        let stf = build_stf(&cfg);
        // A 16-sample period sees subcarrier k at bin k/4.
        let mut period = stf.samples[..16].to_vec();
        period.resize(16, Complex64::new(0.0, 0.0));
        let spec = crate::phy::fft::fft(&period);
        for (b, v) in spec.iter().enumerate() {
            let k = if b >= 8 { b as i32 - 16 } else { b as i32 } * 4;
            let on_tone = cfg.stf_tones.iter().any(|(t, _)| *t == k);
            if !on_tone {
                assert!(v.norm() < 1e-10, "bin {b} leaked {}", v.norm());
            } else {
                assert!(v.norm() > 0.1);
            }
        }
    }

    #[test]
    fn ltf_structure_and_spectrum() {
        let cfg = FrameConfig::default();
        let ltf = build_ltf(&cfg);
        for n in 32..96 {
            assert!((ltf[n] - ltf[n + 64]).norm() < 1e-12);
        }
        for n in 0..32 {
            assert!((ltf[n] - ltf[n + 128]).norm() < 1e-12);
        }
        let spec = fft64(&ltf.samples[32..96]).unwrap();
        let scale = cfg.tx_scale();
        for (b, s) in spec.iter().enumerate() {
            let want = cfg.ltf_value(cfg.signed(b)).unwrap_or_default();
            assert!((s / scale - want).norm() < 1e-10);
        }
    }

    #[test]
    fn frame_layout() {
        let cfg = FrameConfig::default();
        let payload: Vec<u8> = (0..100).collect();
        let f = assemble_frame(&payload, Mcs::new(Scheme::Qam16, Coding::HalfRateConv), &cfg).unwrap();
        assert_eq!(f.meta.n_symbols, 8);
        assert_eq!(f.len(), 320 + 80 * 8);
        assert_eq!(f.samples().len(), f.len());
        for sym in &f.payload_symbols {
            for n in 0..16 {
                assert!((sym[n] - sym[n + 64]).norm() < 1e-12);
            }
        }
        let one = assemble_frame(&[0xa5], Mcs::new(Scheme::Bpsk, Coding::Uncoded), &cfg).unwrap();
        assert_eq!(one.meta.n_symbols, 1);
        assert!(matches!(
            assemble_frame(&[], Mcs::new(Scheme::Bpsk, Coding::Uncoded), &cfg),
            Err(Error::EmptyPayload)
        ));
    }

    #[test]
    fn payload_symbol_power_near_unity() {
        let cfg = FrameConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for scheme in Scheme::ALL {
            let payload: Vec<u8> = (0..600).map(|_| rng.random()).collect();
            let f = assemble_frame(&payload, Mcs::new(scheme, Coding::Uncoded), &cfg).unwrap();
            // The last symbol carries zero padding, which maps to corner points.
            let full = &f.payload_symbols[..f.payload_symbols.len() - 1];
            let powers: Vec<f64> = full
                .iter()
                .map(|s| s.samples[16..].iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0)
                .collect();
            let mean = powers.iter().sum::<f64>() / powers.len() as f64;
            assert!((10.0 * mean.log10()).abs() < 0.5, "{scheme:?} {mean}");
            // Constant-modulus symbols hold it exactly per symbol.
            if matches!(scheme, Scheme::Bpsk | Scheme::Qpsk) {
                for p in powers {
                    assert!((p - 1.0).abs() < 1e-9, "{scheme:?} {p}");
                }
            }
        }
    }
}
