//! Gray-mapped constellations with the 802.11 per-axis bit layout.
//!
//! Point index equals the bit group read MSB-first, so `points()[i]` is the
//! symbol transmitted for bits `i`. Every scheme is scaled to unit mean power.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "BPSK")]
    Bpsk,
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "QAM16")]
    Qam16,
    #[serde(rename = "QAM64")]
    Qam64,
}

/// Per-axis Gray levels indexed by the axis bit value (MSB first).
const LEVELS_2: [f64; 2] = [-1.0, 1.0];
const LEVELS_4: [f64; 4] = [-3.0, -1.0, 3.0, 1.0];
const LEVELS_8: [f64; 8] = [-7.0, -5.0, -1.0, -3.0, 7.0, 5.0, 1.0, 3.0];

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Bpsk, Scheme::Qpsk, Scheme::Qam16, Scheme::Qam64];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Scheme::Bpsk => 1,
            Scheme::Qpsk => 2,
            Scheme::Qam16 => 4,
            Scheme::Qam64 => 6,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Bpsk => "BPSK",
            Scheme::Qpsk => "QPSK",
            Scheme::Qam16 => "QAM16",
            Scheme::Qam64 => "QAM64",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|m| m.label().eq_ignore_ascii_case(s))
    }

    fn norm(self) -> f64 {
        match self {
            Scheme::Bpsk => 1.0,
            Scheme::Qpsk => 2f64.sqrt(),
            Scheme::Qam16 => 10f64.sqrt(),
            Scheme::Qam64 => 42f64.sqrt(),
        }
    }

    /// Constellation point for the bit group `index`.
    pub fn point(self, index: usize) -> Complex64 {
        let n = self.norm();
        match self {
            Scheme::Bpsk => Complex64::new(LEVELS_2[index & 1], 0.0),
            Scheme::Qpsk => Complex64::new(LEVELS_2[index >> 1 & 1], LEVELS_2[index & 1]) / n,
            Scheme::Qam16 => Complex64::new(LEVELS_4[index >> 2 & 3], LEVELS_4[index & 3]) / n,
            Scheme::Qam64 => Complex64::new(LEVELS_8[index >> 3 & 7], LEVELS_8[index & 7]) / n,
        }
    }

    pub fn points(self) -> Vec<Complex64> {
        (0..1usize << self.bits_per_symbol()).map(|i| self.point(i)).collect()
    }
}

/// A scheme together with its materialised point table.
#[derive(Clone, Debug)]
pub struct Constellation {
    pub scheme: Scheme,
    pub points: Vec<Complex64>,
    pub bits_per_symbol: usize,
}

impl Constellation {
    pub fn new(scheme: Scheme) -> Self {
        Self { scheme, points: scheme.points(), bits_per_symbol: scheme.bits_per_symbol() }
    }
}

/// Maps bits (one `u8` per bit, 0 or 1) onto normalised constellation points.
pub fn modulate_bits(bits: &[u8], scheme: Scheme) -> Result<Vec<Complex64>> {
    let bps = scheme.bits_per_symbol();
    if !bits.len().is_multiple_of(bps) {
        return Err(Error::BitLength { len: bits.len(), bits_per_symbol: bps });
    }
    Ok(bits
        .chunks(bps)
        .map(|group| scheme.point(bits_to_index(group)))
        .collect())
}

pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize)
}

pub fn index_to_bits(index: usize, bits_per_symbol: usize, out: &mut Vec<u8>) {
    for i in (0..bits_per_symbol).rev() {
        out.push(((index >> i) & 1) as u8);
    }
}

/// Minimum-distance point index and its bits; ties go to the lower index.
pub fn nearest_point(sample: Complex64, scheme: Scheme) -> (usize, Vec<u8>) {
    let idx = nearest_index(sample, scheme);
    let mut bits = Vec::with_capacity(scheme.bits_per_symbol());
    index_to_bits(idx, scheme.bits_per_symbol(), &mut bits);
    (idx, bits)
}

/// Per-axis slicer. Equivalent to an exhaustive scan on these square grids.
pub fn nearest_index(sample: Complex64, scheme: Scheme) -> usize {
    match scheme {
        Scheme::Bpsk => usize::from(sample.re > 0.0),
        Scheme::Qpsk => (usize::from(sample.re > 0.0) << 1) | usize::from(sample.im > 0.0),
        Scheme::Qam16 => {
            let n = scheme.norm();
            (axis_index(sample.re * n, &LEVELS_4) << 2) | axis_index(sample.im * n, &LEVELS_4)
        }
        Scheme::Qam64 => {
            let n = scheme.norm();
            (axis_index(sample.re * n, &LEVELS_8) << 3) | axis_index(sample.im * n, &LEVELS_8)
        }
    }
}

/// Nearest level on one axis; on an exact midpoint, the lower bit value wins.
fn axis_index(v: f64, levels: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &l) in levels.iter().enumerate() {
        let d = (v - l).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}
