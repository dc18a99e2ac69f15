//! Oversampled receive channel: interpolation to G times the base rate,
//! multipath, carrier frequency offset and additive noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::fft::{fft, fft_in_place, ifft_in_place};
use crate::phy::FrameConfig;
use crate::stream::SampleStream;
use crate::tx::{Frame, Segment, LTF_GUARD, STF_LEN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Independent complex Gaussian noise on every oversample.
    WhitePerSample,
    /// White noise at the oversampled rate, filtered to the base-rate band.
    BandLimited,
}

impl NoiseModel {
    pub fn label(self) -> &'static str {
        match self {
            NoiseModel::WhitePerSample => "white",
            NoiseModel::BandLimited => "bandlimited",
        }
    }
}

/// How the base-rate frame becomes an oversampled waveform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Each OFDM symbol (and training field) is interpolated as its own
    /// period-64 band-limited waveform; the last G-1 oversamples of every
    /// symbol blend linearly into the following one.
    #[default]
    Segmented,
    /// FFT zero-padding over the whole burst with a zero edge guard.
    WholeStream,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    /// Delay in oversamples.
    pub delay: usize,
    pub gain: Complex64,
}

impl Tap {
    pub fn new(delay: usize, gain: Complex64) -> Self {
        Self { delay, gain }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelConfig {
    /// Oversampling factor G.
    pub oversampling: usize,
    /// Es/N0 per occupied subcarrier in dB; `None` disables noise.
    pub snr_db: Option<f64>,
    pub cfo_hz: f64,
    pub multipath_taps: Vec<Tap>,
    /// Leading noise-only oversamples.
    pub timing_pad: usize,
    pub noise_model: NoiseModel,
    pub interpolation: Interpolation,
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            oversampling: 1,
            snr_db: None,
            cfo_hz: 0.0,
            multipath_taps: vec![Tap::new(0, Complex64::new(1.0, 0.0))],
            timing_pad: 0,
            noise_model: NoiseModel::WhitePerSample,
            interpolation: Interpolation::Segmented,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self, frame_cfg: &FrameConfig) -> Result<()> {
        check_oversampling(self.oversampling)?;
        check_taps(&self.multipath_taps, cp_budget(frame_cfg, self.oversampling))?;
        if let Some(s) = self.snr_db {
            if !s.is_finite() {
                return Err(Error::Config("snr_db must be finite (omit it for a noiseless channel)".into()));
            }
        }
        Ok(())
    }

    /// Per-oversample complex noise variance for unit-power transmit samples.
    ///
    /// The signal occupies only part of the base-rate band, so the total noise
    /// is scaled up by the inverse occupied fraction; this makes the SNR seen
    /// on every data subcarrier equal `snr_db`.
    pub fn noise_variance(&self, frame_cfg: &FrameConfig) -> f64 {
        match self.snr_db {
            None => 0.0,
            Some(db) => 1.0 / (frame_cfg.occupied_fraction() * 10f64.powf(db / 10.0)),
        }
    }
}

pub fn check_oversampling(g: usize) -> Result<()> {
    if g == 0 || !g.is_power_of_two() || g > 64 {
        return Err(Error::BadOversampling(g));
    }
    Ok(())
}

/// Largest exclusive tap delay that keeps dispersion inside the cyclic prefix
/// after the receiver moves its window G-1 oversamples into it.
pub fn cp_budget(frame_cfg: &FrameConfig, g: usize) -> usize {
    frame_cfg.cp_len * g - (g - 1)
}

fn check_taps(taps: &[Tap], budget: usize) -> Result<()> {
    if taps.is_empty() || taps[0].delay != 0 {
        return Err(Error::BadTapProfile);
    }
    if let Some(t) = taps.iter().find(|t| t.delay >= budget) {
        return Err(Error::TapDelayExceedsCp { delay: t.delay, budget });
    }
    Ok(())
}

/// Places a length-`n` spectrum into a length-`n * g` spectrum, splitting the
/// Nyquist bin of even `n` between the two band edges.
pub(crate) fn zero_pad_spectrum(spec: &[Complex64], g: usize) -> Vec<Complex64> {
    let n = spec.len();
    let m = n * g;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    if g == 1 {
        out.copy_from_slice(spec);
        return out;
    }
    let half = n / 2;
    for (b, v) in spec.iter().enumerate() {
        if n.is_multiple_of(2) && b == half {
            out[half] += v * 0.5;
            out[m - half] += v * 0.5;
        } else if b < n.div_ceil(2) {
            out[b] = *v;
        } else {
            out[m - (n - b)] = *v;
        }
    }
    out
}

/// Band-limited periodic interpolation of `x` by `g`: the output hits the
/// input exactly at every `g`-th sample.
fn periodic_interpolate(x: &[Complex64], g: usize) -> Vec<Complex64> {
    let spec = fft(x);
    let mut up = zero_pad_spectrum(&spec, g);
    ifft_in_place(&mut up);
    for v in up.iter_mut() {
        *v *= g as f64;
    }
    up
}

/// Whole-stream FFT zero-padding interpolation to `g` times the rate.
///
/// The stream is treated as one period, so continuous-time energy
/// (`energy / rate`) is preserved for content below the Nyquist bin.
pub fn resample_to_g(stream: &SampleStream, g: usize) -> SampleStream {
    if g == 1 || stream.is_empty() {
        return stream.clone();
    }
    SampleStream::new(periodic_interpolate(&stream.samples, g), stream.rate * g as f64)
}

/// Like [`resample_to_g`] but surrounds the burst with `guard` zeros before
/// transforming so its tail does not wrap onto its head.
pub fn resample_to_g_guarded(stream: &SampleStream, g: usize, guard: usize) -> SampleStream {
    if g == 1 || stream.is_empty() {
        return stream.clone();
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut padded = vec![zero; guard];
    padded.extend_from_slice(&stream.samples);
    padded.resize(stream.len() + 2 * guard, zero);
    let up = periodic_interpolate(&padded, g);
    let samples = up[guard * g..(guard + stream.len()) * g].to_vec();
    SampleStream::new(samples, stream.rate * g as f64)
}

/// Period-64 band-limited waveform of one segment sampled on the `g` grid,
/// indexed from the start of its last 64-sample block.
fn segment_waveform(base: &[Complex64], seg: Segment, g: usize) -> (usize, Vec<Complex64>) {
    let block_start = seg.start + seg.len - 64;
    (block_start, periodic_interpolate(&base[block_start..block_start + 64], g))
}

/// Segment-wise oversampling of a frame (see [`Interpolation::Segmented`]).
pub fn oversample_frame(frame: &Frame, g: usize) -> SampleStream {
    let base = frame.samples();
    if g == 1 {
        return base;
    }
    let segs = frame.segments();
    let waves: Vec<(usize, Vec<Complex64>)> = segs.iter().map(|s| segment_waveform(&base.samples, *s, g)).collect();
    let period = 64 * g;
    let eval = |w: &(usize, Vec<Complex64>), i: usize| -> Complex64 {
        let rel = i as i64 - (w.0 * g) as i64;
        w.1[rel.rem_euclid(period as i64) as usize]
    };
    let mut out = vec![Complex64::new(0.0, 0.0); base.len() * g];
    for (si, seg) in segs.iter().enumerate() {
        let start = seg.start * g;
        let end = (seg.start + seg.len) * g;
        let last_base = end - g;
        for (i, o) in out.iter_mut().enumerate().take(end).skip(start) {
            let own = eval(&waves[si], i);
            *o = if i > last_base {
                let w = (i - last_base) as f64 / g as f64;
                let next = waves.get(si + 1).map_or(Complex64::new(0.0, 0.0), |nw| eval(nw, i));
                own * (1.0 - w) + next * w
            } else {
                own
            };
        }
    }
    SampleStream::new(out, base.rate * g as f64)
}

pub fn apply_cfo(stream: &SampleStream, cfo_hz: f64) -> SampleStream {
    if cfo_hz == 0.0 {
        return stream.clone();
    }
    let w = 2.0 * PI * cfo_hz / stream.rate;
    let samples = stream
        .samples
        .iter()
        .enumerate()
        .map(|(n, s)| s * Complex64::from_polar(1.0, w * n as f64))
        .collect();
    SampleStream::new(samples, stream.rate)
}

/// FIR convolution at oversample resolution; output has the input's length.
pub fn apply_multipath(stream: &SampleStream, taps: &[Tap], budget: usize) -> Result<SampleStream> {
    check_taps(taps, budget)?;
    let x = &stream.samples;
    let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
    for t in taps {
        for n in t.delay..x.len() {
            y[n] += t.gain * x[n - t.delay];
        }
    }
    Ok(SampleStream::new(y, stream.rate))
}

/// Adds noise with per-sample variance `variance` at oversampling `g`.
pub fn add_noise<R: Rng>(stream: &SampleStream, variance: f64, model: NoiseModel, g: usize, rng: &mut R) -> SampleStream {
    if variance == 0.0 {
        return stream.clone();
    }
    let noise = generate_noise(stream.len(), variance, model, g, rng);
    let samples = stream.samples.iter().zip(&noise).map(|(s, n)| s + n).collect();
    SampleStream::new(samples, stream.rate)
}

pub fn generate_noise<R: Rng>(len: usize, variance: f64, model: NoiseModel, g: usize, rng: &mut R) -> Vec<Complex64> {
    let sd = (variance / 2.0).sqrt();
    let mut w: Vec<Complex64> = (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * sd, im * sd)
        })
        .collect();
    if model == NoiseModel::BandLimited && g > 1 && len > 0 {
        fft_in_place(&mut w);
        // Keep |f| < base_rate / 2, i.e. signed bins strictly inside len / (2g).
        let edge = len as f64 / (2.0 * g as f64);
        let mut kept = 0usize;
        for (b, v) in w.iter_mut().enumerate() {
            let f = if b > len / 2 { b as f64 - len as f64 } else { b as f64 };
            if f.abs() < edge {
                kept += 1;
            } else {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        ifft_in_place(&mut w);
        let gain = (len as f64 / kept.max(1) as f64).sqrt();
        for v in w.iter_mut() {
            *v *= gain;
        }
    }
    w
}

/// Ground truth of one channel realisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelTruth {
    /// Oversample index where the frame starts.
    pub frame_start: usize,
    /// Oversample index of the first 64-sample long training block.
    pub ltf_start: usize,
    pub cfo_hz: f64,
}

pub struct ChannelOutput {
    pub stream: SampleStream,
    pub truth: ChannelTruth,
}

/// pad -> oversample -> multipath -> CFO -> noise. Deterministic given the seed.
pub fn run_channel(frame: &Frame, cfg: &ChannelConfig, frame_cfg: &FrameConfig) -> Result<ChannelOutput> {
    cfg.validate(frame_cfg)?;
    let g = cfg.oversampling;
    let body = match cfg.interpolation {
        Interpolation::Segmented => oversample_frame(frame, g),
        Interpolation::WholeStream => resample_to_g_guarded(&frame.samples(), g, 64),
    };
    let zero = Complex64::new(0.0, 0.0);
    let tail = frame_cfg.cp_len * g;
    let mut samples = vec![zero; cfg.timing_pad];
    samples.extend_from_slice(&body.samples);
    samples.resize(samples.len() + tail, zero);
    let stream = SampleStream::new(samples, body.rate);
    let stream = apply_multipath(&stream, &cfg.multipath_taps, cp_budget(frame_cfg, g))?;
    let stream = apply_cfo(&stream, cfg.cfo_hz);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let stream = add_noise(&stream, cfg.noise_variance(frame_cfg), cfg.noise_model, g, &mut rng);
    Ok(ChannelOutput {
        stream,
        truth: ChannelTruth {
            frame_start: cfg.timing_pad,
            ltf_start: cfg.timing_pad + (STF_LEN + LTF_GUARD) * g,
            cfo_hz: cfg.cfo_hz,
        },
    })
}
