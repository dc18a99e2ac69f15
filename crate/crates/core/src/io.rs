//! Sample files, sidecar metadata and diagnostic CSV dumps.
//!
//! Sample files hold interleaved little-endian `f32` pairs `(re, im)` with no
//! header. The sidecar is a JSON record stored next to the samples.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decode::SymbolCopies;
use crate::error::{Error, Result};
use crate::phy::{FrameConfig, Mcs};
use crate::stream::SampleStream;
use crate::tx::FrameMeta;

const BYTES_PER_SAMPLE: usize = 8;

pub fn encode_samples(stream: &SampleStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(stream.len() * BYTES_PER_SAMPLE);
    for s in &stream.samples {
        out.extend_from_slice(&(s.re as f32).to_le_bytes());
        out.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    out
}

pub fn decode_samples(bytes: &[u8], rate: f64) -> Result<SampleStream> {
    if !bytes.len().is_multiple_of(BYTES_PER_SAMPLE) {
        return Err(Error::MalformedFile(format!("length {} is not a multiple of {BYTES_PER_SAMPLE} bytes", bytes.len())));
    }
    let samples = bytes
        .chunks_exact(BYTES_PER_SAMPLE)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect::<Vec<_>>();
    if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
        return Err(Error::MalformedFile("non-finite sample".into()));
    }
    Ok(SampleStream::new(samples, rate))
}

pub fn write_samples(path: &Path, stream: &SampleStream) -> Result<()> {
    std::fs::write(path, encode_samples(stream))?;
    Ok(())
}

pub fn read_samples(path: &Path, rate: f64) -> Result<SampleStream> {
    decode_samples(&std::fs::read(path)?, rate)
}

/// Everything a receiver needs to decode a recorded stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub mcs: Mcs,
    pub payload_len: usize,
    pub crc: u32,
    pub n_symbols: usize,
    pub seed: u64,
    pub oversampling: usize,
    /// Sample rate of the recorded stream.
    pub rate: f64,
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub cfo_hz: f64,
}

impl Sidecar {
    pub fn new(meta: &FrameMeta, seed: u64, oversampling: usize, cfg: &FrameConfig) -> Self {
        Self {
            mcs: meta.mcs,
            payload_len: meta.payload_len,
            crc: meta.crc,
            n_symbols: meta.n_symbols,
            seed,
            oversampling,
            rate: cfg.base_rate * oversampling as f64,
            snr_db: None,
            cfo_hz: 0.0,
        }
    }

    pub fn meta(&self) -> FrameMeta {
        FrameMeta { mcs: self.mcs, payload_len: self.payload_len, crc: self.crc, n_symbols: self.n_symbols }
    }

    /// `capture.f32` pairs with `capture.f32.json`.
    pub fn path_for(samples: &Path) -> PathBuf {
        let mut name = samples.as_os_str().to_owned();
        name.push(".json");
        PathBuf::from(name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::MalformedFile(format!("{}: {e}", path.display())))
    }
}

pub const CORRELATION_HEADER: &str = "lag,metric";
pub const COPIES_HEADER: &str = "symbol,subcarrier,copy,re,im,decision";
pub const CONSTELLATION_HEADER: &str = "symbol,subcarrier,re,im,decision";

/// Detection metric against base-rate start index.
pub fn write_correlation_csv(mut w: impl Write, trace: &[f64]) -> Result<()> {
    writeln!(w, "{CORRELATION_HEADER}")?;
    for (lag, m) in trace.iter().enumerate() {
        writeln!(w, "{lag},{m:.6}")?;
    }
    Ok(())
}

/// One row per payload symbol, data subcarrier and copy.
pub fn write_copies_csv(mut w: impl Write, copies: &[SymbolCopies], decisions: &[Vec<usize>], cfg: &FrameConfig) -> Result<()> {
    writeln!(w, "{COPIES_HEADER}")?;
    for (sym, dec) in copies.iter().zip(decisions) {
        for (i, &k) in cfg.data_subcarriers.iter().enumerate() {
            let bin = cfg.bin(k);
            for (c, copy) in sym.copies.iter().enumerate() {
                let y = copy[bin];
                writeln!(w, "{},{k},{c},{:.6},{:.6},{}", sym.symbol_index, y.re, y.im, dec[i])?;
            }
        }
    }
    Ok(())
}

/// Copy-averaged points per payload symbol and data subcarrier.
pub fn write_constellation_csv(mut w: impl Write, copies: &[SymbolCopies], decisions: &[Vec<usize>], cfg: &FrameConfig) -> Result<()> {
    writeln!(w, "{CONSTELLATION_HEADER}")?;
    for (sym, dec) in copies.iter().zip(decisions) {
        for (i, &k) in cfg.data_subcarriers.iter().enumerate() {
            let bin = cfg.bin(k);
            let y = sym.copies.iter().map(|c| c[bin]).sum::<Complex64>() / sym.g() as f64;
            writeln!(w, "{},{k},{:.6},{:.6},{}", sym.symbol_index, y.re, y.im, dec[i])?;
        }
    }
    Ok(())
}
