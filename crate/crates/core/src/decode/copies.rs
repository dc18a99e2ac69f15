use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::fft::fft64;
use crate::phy::FrameConfig;
use crate::stream::SampleStream;

/// Frequency-domain copies of one OFDM window, `copies[g][bin]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolCopies {
    pub copies: Vec<Vec<Complex64>>,
    /// Payload symbol index; the two training blocks are -2 and -1.
    pub symbol_index: i64,
}

impl SymbolCopies {
    pub fn g(&self) -> usize {
        self.copies.len()
    }
}

/// Oversamples the FFT windows move into the cyclic prefix.
pub fn window_shift(g: usize, isi_shift: bool) -> usize {
    if isi_shift {
        g - 1
    } else {
        0
    }
}

/// Copies of the window whose nominal start is `nominal` and which is moved
/// `shift` oversamples early. Copy `c` is scaled back to transmit units and
/// rotated so that, for a noiseless channel, every copy equals X H.
pub fn extract_window(stream: &SampleStream, nominal: usize, shift: usize, g: usize, cfg: &FrameConfig) -> Result<Vec<Vec<Complex64>>> {
    let n = cfg.nfft;
    let start = nominal.checked_sub(shift).ok_or(Error::StreamTooShort { needed: shift, available: nominal })?;
    let needed = start + n * g;
    if stream.len() < needed {
        return Err(Error::StreamTooShort { needed, available: stream.len() });
    }
    let inv_scale = 1.0 / cfg.tx_scale();
    let step = -2.0 * std::f64::consts::PI / (n * g) as f64;
    (0..g)
        .map(|c| {
            let block: Vec<Complex64> = (0..n).map(|i| stream.samples[start + c + g * i]).collect();
            let mut spec = fft64(&block)?;
            let lead = c as f64 - shift as f64;
            for (b, v) in spec.iter_mut().enumerate() {
                let k = cfg.signed(b) as f64;
                *v *= Complex64::from_polar(inv_scale, step * k * lead);
            }
            Ok(spec)
        })
        .collect()
}

/// Payload symbol `symbol_index` of a frame whose first training block starts
/// at oversample `symbol_start`.
pub fn extract_copies(
    stream: &SampleStream,
    symbol_start: usize,
    symbol_index: usize,
    cfg: &FrameConfig,
    g: usize,
    isi_shift: bool,
) -> Result<SymbolCopies> {
    let nominal = symbol_start + (2 * cfg.nfft + symbol_index * cfg.symbol_len() + cfg.cp_len) * g;
    let copies = extract_window(stream, nominal, window_shift(g, isi_shift), g, cfg)?;
    Ok(SymbolCopies { copies, symbol_index: symbol_index as i64 })
}

/// Both long training blocks.
pub fn extract_ltf_copies(stream: &SampleStream, symbol_start: usize, cfg: &FrameConfig, g: usize, isi_shift: bool) -> Result<Vec<SymbolCopies>> {
    let shift = window_shift(g, isi_shift);
    (0..2)
        .map(|b| {
            let copies = extract_window(stream, symbol_start + b * cfg.nfft * g, shift, g, cfg)?;
            Ok(SymbolCopies { copies, symbol_index: b as i64 - 2 })
        })
        .collect()
}
