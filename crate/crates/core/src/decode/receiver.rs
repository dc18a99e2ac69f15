//! Frame decoding pipelines. The baseline and the oversampled receivers share
//! one code path, so at G = 1 they produce identical decisions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::copies::{extract_copies, extract_ltf_copies, window_shift, SymbolCopies};
use super::kde::{build_noise_map, decode_average_nn, decode_joint_ml, estimate_channel, KdeBoundary, NoiseMapMode};
use crate::error::{Error, Result};
use crate::frontend::{
    build_reference_ltf, compensate_cfo, detect_packet, estimate_cfo_coarse, estimate_cfo_fine, mask_before, model_clock_switch,
    sync_timing, track_phase_pilots, CfoEstimate, DetectionResult, FineCfoInput, FineObjective, SyncResult, DEFAULT_THRESHOLD,
};
use crate::phy::constellation::index_to_bits;
use crate::phy::crc::{bits_to_bytes, crc32};
use crate::phy::{viterbi_decode, Coding, FrameConfig};
use crate::stream::SampleStream;
use crate::tx::FrameMeta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    /// Standard receiver at the base rate.
    Baseline,
    /// Oversampled receiver with KDE joint ML decoding.
    TfiJoint,
    /// Oversampled receiver that averages equalised copies.
    TfiAvg,
}

impl ReceiverKind {
    pub const ALL: [ReceiverKind; 3] = [ReceiverKind::Baseline, ReceiverKind::TfiJoint, ReceiverKind::TfiAvg];

    pub fn label(self) -> &'static str {
        match self {
            ReceiverKind::Baseline => "baseline",
            ReceiverKind::TfiJoint => "tfi_joint",
            ReceiverKind::TfiAvg => "tfi_avg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.label() == s)
    }
}

/// Side information that bypasses estimation stages.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Genie {
    /// Receiver-rate oversample index of the first training block.
    pub ltf_start: Option<usize>,
    pub cfo_hz: Option<f64>,
    /// Assume a unit channel instead of estimating it.
    pub unit_channel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RxConfig {
    pub kind: ReceiverKind,
    pub oversampling: usize,
    pub detect_threshold: f64,
    pub isi_shift: bool,
    pub fine_cfo: bool,
    pub fine_objective: FineObjective,
    pub pilot_tracking: bool,
    pub noise_map_mode: NoiseMapMode,
    pub kde_boundary: KdeBoundary,
    pub genie: Genie,
    /// Keep per-symbol copies in the result for diagnostics.
    pub keep_copies: bool,
}

impl Default for RxConfig {
    fn default() -> Self {
        Self {
            kind: ReceiverKind::TfiJoint,
            oversampling: 1,
            detect_threshold: DEFAULT_THRESHOLD,
            isi_shift: true,
            fine_cfo: true,
            fine_objective: FineObjective::default(),
            pilot_tracking: true,
            noise_map_mode: NoiseMapMode::EqualizedResidual,
            kde_boundary: KdeBoundary::ReflectWrap,
            genie: Genie::default(),
            keep_copies: false,
        }
    }
}

impl RxConfig {
    pub fn baseline() -> Self {
        Self { kind: ReceiverKind::Baseline, ..Self::default() }
    }

    pub fn tfi(kind: ReceiverKind, g: usize) -> Self {
        Self { kind, oversampling: g, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Decoded information bits (payload then CRC), LSB first per byte.
    pub info_bits: Vec<u8>,
    pub payload: Vec<u8>,
    /// Constellation indices per payload symbol, in data-subcarrier order.
    pub decisions: Vec<Vec<usize>>,
    pub crc_ok: bool,
    /// Filled in by callers that know the transmitted bits.
    pub bit_errors: Option<usize>,
    pub detection: Option<DetectionResult>,
    pub sync: SyncResult,
    pub cfo: CfoEstimate,
    /// Pilot-derotated payload copies when `keep_copies` is set.
    pub copies: Vec<SymbolCopies>,
}

impl DecodeResult {
    pub fn count_bit_errors(&mut self, truth: &[u8]) -> usize {
        let n = truth.iter().zip(&self.info_bits).filter(|(a, b)| a != b).count() + truth.len().abs_diff(self.info_bits.len());
        self.bit_errors = Some(n);
        n
    }
}

/// Standard receiver on a base-rate stream.
pub fn decode_baseline(stream: &SampleStream, meta: &FrameMeta, cfg: &FrameConfig, rx: &RxConfig) -> Result<DecodeResult> {
    let rx = RxConfig { kind: ReceiverKind::Baseline, oversampling: 1, ..rx.clone() };
    run_pipeline(stream, meta, cfg, &rx)
}

/// Dispatches on `rx.kind`.
pub fn decode_frame(stream: &SampleStream, meta: &FrameMeta, cfg: &FrameConfig, rx: &RxConfig) -> Result<DecodeResult> {
    match rx.kind {
        ReceiverKind::Baseline => decode_baseline(stream, meta, cfg, rx),
        _ => decode_frame_tfi(stream, meta, cfg, rx),
    }
}

/// Oversampled receiver on a stream at `rx.oversampling` times the base rate.
pub fn decode_frame_tfi(stream: &SampleStream, meta: &FrameMeta, cfg: &FrameConfig, rx: &RxConfig) -> Result<DecodeResult> {
    if rx.kind == ReceiverKind::Baseline {
        return Err(Error::Config("decode_frame_tfi needs an oversampled receiver kind".into()));
    }
    run_pipeline(stream, meta, cfg, rx)
}

fn run_pipeline(stream: &SampleStream, meta: &FrameMeta, cfg: &FrameConfig, rx: &RxConfig) -> Result<DecodeResult> {
    let g = rx.oversampling;
    crate::channel::check_oversampling(g)?;
    let oversampled = g > 1;

    // Acquisition: base-rate detection, clock switch, oversampled LTF sync.
    let (ltf_start, detection, sync, stream) = match rx.genie.ltf_start {
        Some(start) => (start, None, SyncResult { symbol_start: start, timing_error: None, peak_value: 1.0 }, stream.clone()),
        None => {
            let det = detect_packet(&stream.decimate(g, 0), rx.detect_threshold);
            if !det.detected {
                return Err(Error::SyncFailure);
            }
            let (valid_from, stream) = if oversampled {
                let v = model_clock_switch(&det, cfg, g)?;
                (v, mask_before(stream, v))
            } else {
                (0, stream.clone())
            };
            let sync = sync_timing(&stream, &build_reference_ltf(cfg, g), det.coarse_start, valid_from)?;
            (sync.symbol_start, Some(det), sync, stream)
        }
    };

    let shift = window_shift(g, rx.isi_shift);
    if ltf_start < shift {
        return Err(Error::SyncFailure);
    }
    let cfo = match rx.genie.cfo_hz {
        Some(f) => CfoEstimate { coarse_hz: f, fine_hz: f, residual_cost: 0.0 },
        None => {
            let coarse = estimate_cfo_coarse(&stream, ltf_start - shift, g, cfg)?;
            if oversampled && rx.fine_cfo {
                let input = FineCfoInput::from_stream(&stream, ltf_start, shift, g, cfg)?.with_objective(rx.fine_objective);
                estimate_cfo_fine(&input, coarse, cfg)?
            } else {
                CfoEstimate { coarse_hz: coarse, fine_hz: coarse, residual_cost: 0.0 }
            }
        }
    };
    let stream = compensate_cfo(&stream, cfo.fine_hz);

    let ltf = extract_ltf_copies(&stream, ltf_start, cfg, g, rx.isi_shift)?;
    let channel = if rx.genie.unit_channel { vec![Complex64::new(1.0, 0.0); cfg.nfft] } else { estimate_channel(&ltf, cfg) };
    let joint = oversampled && rx.kind == ReceiverKind::TfiJoint;
    let map = if joint {
        let mut m = build_noise_map(&ltf, cfg, rx.noise_map_mode, rx.kde_boundary)?;
        if rx.genie.unit_channel && rx.noise_map_mode == NoiseMapMode::EqualizedResidual {
            m.channel = vec![Complex64::new(1.0, 0.0); m.channel.len()];
        }
        Some(m)
    } else {
        None
    };

    let scheme = meta.mcs.scheme;
    let mut decisions = Vec::with_capacity(meta.n_symbols);
    let mut kept = Vec::new();
    for i in 0..meta.n_symbols {
        let mut sym = extract_copies(&stream, ltf_start, i, cfg, g, rx.isi_shift)?;
        if rx.pilot_tracking {
            let obs: Vec<Complex64> = cfg
                .pilot_subcarriers
                .iter()
                .map(|&k| {
                    let b = cfg.bin(k);
                    sym.copies.iter().map(|c| c[b] / channel[b]).sum::<Complex64>()
                })
                .collect();
            let rot = Complex64::from_polar(1.0, -track_phase_pilots(&obs, &cfg.pilot_values));
            for c in sym.copies.iter_mut() {
                for v in c.iter_mut() {
                    *v *= rot;
                }
            }
        }
        let d = match &map {
            Some(m) => decode_joint_ml(&sym, m, scheme, cfg),
            None => decode_average_nn(&sym, &channel, scheme, cfg),
        };
        decisions.push(d);
        if rx.keep_copies {
            kept.push(sym);
        }
    }

    let bps = scheme.bits_per_symbol();
    let mut coded = Vec::with_capacity(decisions.len() * decisions.first().map_or(0, Vec::len) * bps);
    for d in &decisions {
        for &idx in d {
            index_to_bits(idx, bps, &mut coded);
        }
    }
    let n_info = (meta.payload_len + 4) * 8;
    coded.truncate(meta.mcs.coding.coded_len(n_info));
    let info_bits = match meta.mcs.coding {
        Coding::Uncoded => coded,
        Coding::HalfRateConv => viterbi_decode(&coded)?,
    };
    let bytes = bits_to_bytes(&info_bits);
    let (payload, crc_bytes) = bytes.split_at(meta.payload_len.min(bytes.len()));
    let crc_ok = crc_bytes.len() == 4 && crc32(payload).to_le_bytes() == crc_bytes;
    Ok(DecodeResult {
        info_bits,
        payload: payload.to_vec(),
        decisions,
        crc_ok,
        bit_errors: None,
        detection,
        sync,
        cfo,
        copies: kept,
    })
}
