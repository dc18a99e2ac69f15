//! OFDM numerology, subcarrier map and modulation/coding selection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::constellation::Scheme;

/// Legacy short training tones (subcarrier, value / sqrt(13/6)).
const STF_TONES: [(i32, f64); 12] = [
    (-24, 1.0),
    (-20, -1.0),
    (-16, 1.0),
    (-12, -1.0),
    (-8, -1.0),
    (-4, 1.0),
    (4, -1.0),
    (8, -1.0),
    (12, 1.0),
    (16, 1.0),
    (20, 1.0),
    (24, 1.0),
];

/// Legacy long training sequence on subcarriers -26..=26 (DC = 0).
const LTF_LEGACY: [i8; 53] = [
    1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 0, 1, -1,
    -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1,
];

/// Frame numerology. All subcarrier indices are signed, in `[-nfft/2, nfft/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameConfig {
    pub nfft: usize,
    pub cp_len: usize,
    pub data_subcarriers: Vec<i32>,
    pub pilot_subcarriers: Vec<i32>,
    pub pilot_values: Vec<f64>,
    /// Base (transmitter) sample rate in samples/s.
    pub base_rate: f64,
    /// Frequency-domain short training values.
    pub stf_tones: Vec<(i32, Complex64)>,
    /// Frequency-domain long training values.
    pub ltf_tones: Vec<(i32, Complex64)>,
    /// PLL settling time after switching to the oversampled clock, seconds.
    pub clock_switch_latency: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        let pilot_subcarriers = vec![-21, -7, 7, 21];
        let data_subcarriers = (-28..=28)
            .filter(|k| *k != 0 && !pilot_subcarriers.contains(k))
            .collect();
        let stf_amp = (13.0f64 / 6.0).sqrt();
        let stf_tones = STF_TONES
            .iter()
            .map(|&(k, s)| (k, Complex64::new(s * stf_amp, s * stf_amp)))
            .collect();
        // The legacy sequence covers +-26; the 56-tone layout extends it with
        // the high-throughput edge values (+1, +1 below, -1, -1 above).
        let mut ltf_tones: Vec<(i32, Complex64)> = vec![
            (-28, Complex64::new(1.0, 0.0)),
            (-27, Complex64::new(1.0, 0.0)),
        ];
        for (i, v) in LTF_LEGACY.iter().enumerate() {
            if *v != 0 {
                ltf_tones.push((i as i32 - 26, Complex64::new(*v as f64, 0.0)));
            }
        }
        ltf_tones.push((27, Complex64::new(-1.0, 0.0)));
        ltf_tones.push((28, Complex64::new(-1.0, 0.0)));
        Self {
            nfft: 64,
            cp_len: 16,
            data_subcarriers,
            pilot_subcarriers,
            pilot_values: vec![1.0; 4],
            base_rate: 2.0e6,
            stf_tones,
            ltf_tones,
            clock_switch_latency: 8.0e-6,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        let half = (self.nfft / 2) as i32;
        let in_range = |k: &i32| (-half..half).contains(k) && *k != 0;
        if self.nfft != 64 {
            return Err(Error::Config(format!("nfft must be 64, got {}", self.nfft)));
        }
        if !self.data_subcarriers.iter().all(in_range) || !self.pilot_subcarriers.iter().all(in_range) {
            return Err(Error::Config("subcarrier index out of range or on DC".into()));
        }
        if self.data_subcarriers.iter().any(|k| self.pilot_subcarriers.contains(k)) {
            return Err(Error::Config("data and pilot subcarriers overlap".into()));
        }
        if self.pilot_values.len() != self.pilot_subcarriers.len() {
            return Err(Error::Config("one pilot value per pilot subcarrier required".into()));
        }
        if self.cp_len == 0 || self.cp_len >= self.nfft {
            return Err(Error::Config("cyclic prefix must be in 1..nfft".into()));
        }
        if self.base_rate.is_nan() || self.base_rate <= 0.0 {
            return Err(Error::Config("base_rate must be positive".into()));
        }
        for k in self.occupied() {
            if self.ltf_value(k).is_none() {
                return Err(Error::Config(format!("long training field has no tone on subcarrier {k}")));
            }
        }
        Ok(())
    }

    /// FFT bin holding signed subcarrier `k`.
    pub fn bin(&self, k: i32) -> usize {
        k.rem_euclid(self.nfft as i32) as usize
    }

    /// Signed subcarrier index of FFT bin `bin`.
    pub fn signed(&self, bin: usize) -> i32 {
        let n = self.nfft as i32;
        let b = bin as i32;
        if b >= n / 2 {
            b - n
        } else {
            b
        }
    }

    pub fn symbol_len(&self) -> usize {
        self.nfft + self.cp_len
    }

    /// Data and pilot subcarriers in ascending order.
    pub fn occupied(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self
            .data_subcarriers
            .iter()
            .chain(self.pilot_subcarriers.iter())
            .copied()
            .collect();
        v.sort_unstable();
        v
    }

    pub fn subcarrier_spacing(&self) -> f64 {
        self.base_rate / self.nfft as f64
    }

    pub fn symbol_duration(&self) -> f64 {
        self.symbol_len() as f64 / self.base_rate
    }

    /// Time-domain gain applied after the unit-scaled inverse transform so
    /// that a payload symbol has unit mean sample power.
    pub fn tx_scale(&self) -> f64 {
        self.nfft as f64 / (self.occupied().len() as f64).sqrt()
    }

    /// Fraction of the base-rate band occupied by data and pilots.
    pub fn occupied_fraction(&self) -> f64 {
        self.occupied().len() as f64 / self.nfft as f64
    }

    pub fn ltf_value(&self, k: i32) -> Option<Complex64> {
        self.ltf_tones.iter().find(|(t, _)| *t == k).map(|(_, v)| *v)
    }

    /// Long training sequence laid out in FFT bin order.
    pub fn ltf_bins(&self) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.nfft];
        for &(k, v) in &self.ltf_tones {
            x[self.bin(k)] = v;
        }
        x
    }

    pub fn stf_bins(&self) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.nfft];
        for &(k, v) in &self.stf_tones {
            x[self.bin(k)] = v;
        }
        x
    }

    pub fn clock_switch_samples(&self) -> usize {
        (self.clock_switch_latency * self.base_rate).round() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coding {
    Uncoded,
    HalfRateConv,
}

impl Coding {
    pub fn label(self) -> &'static str {
        match self {
            Coding::Uncoded => "uncoded",
            Coding::HalfRateConv => "1/2",
        }
    }

    pub fn coded_len(self, info_bits: usize) -> usize {
        match self {
            Coding::Uncoded => info_bits,
            Coding::HalfRateConv => 2 * info_bits,
        }
    }
}

/// Modulation and coding scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mcs {
    pub scheme: Scheme,
    pub coding: Coding,
}

impl Mcs {
    pub fn new(scheme: Scheme, coding: Coding) -> Self {
        Self { scheme, coding }
    }

    /// OFDM symbols needed to carry `payload_len` bytes plus the 4-byte CRC.
    pub fn symbols_for(&self, payload_len: usize, cfg: &FrameConfig) -> usize {
        let coded = self.coding.coded_len((payload_len + 4) * 8);
        let per_symbol = cfg.data_subcarriers.len() * self.scheme.bits_per_symbol();
        coded.div_ceil(per_symbol)
    }
}
