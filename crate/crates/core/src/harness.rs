//! Monte-Carlo sweeps: TX -> channel -> RX over SNR x G x MCS x noise model,
//! BER/PRR/sync/CFO aggregation, and transmit-power savings.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{run_channel, ChannelConfig, Interpolation, NoiseModel, Tap};
use crate::decode::{decode_baseline, decode_frame_tfi, DecodeResult, Genie, KdeBoundary, NoiseMapMode, ReceiverKind, RxConfig};
use crate::error::{Error, Result};
use crate::frontend::{FineObjective, DEFAULT_THRESHOLD};
use crate::phy::{Coding, FrameConfig, Mcs, Scheme};
use crate::tx::assemble_frame;

pub const SWEEP_HEADER: &str =
    "receiver,mcs,coding,G,noise_model,snr_db,trials,bits,bit_errors,ber,packets,packets_ok,prr,sync_err_mean,sync_err_median,cfo_err_hz_rms,wall_time_s";
pub const POWER_HEADER: &str = "mcs,G,target_prr,min_snr_db,delta_db,savings_pct";

/// How much of acquisition the receivers are told instead of estimating.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyncMode {
    /// Detection, timing and CFO are estimated from the stream.
    #[default]
    Estimated,
    /// Timing and CFO are known; the channel is still estimated.
    Genie,
    /// Timing, CFO and a unit channel are known (flat channels only).
    GenieChannel,
}

fn default_g() -> Vec<usize> {
    vec![1, 2, 4, 8]
}
fn default_mcs() -> Vec<Mcs> {
    vec![Mcs::new(Scheme::Qam16, Coding::HalfRateConv)]
}
fn default_noise() -> Vec<NoiseModel> {
    vec![NoiseModel::WhitePerSample]
}
fn default_taps() -> Vec<Tap> {
    ChannelConfig::default().multipath_taps
}
fn default_trials() -> usize {
    3000
}
fn default_packet_len() -> usize {
    100
}
fn default_receivers() -> Vec<ReceiverKind> {
    vec![ReceiverKind::Baseline, ReceiverKind::TfiJoint]
}
fn default_pad() -> usize {
    200
}
fn default_true() -> bool {
    true
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub snr_db: Vec<f64>,
    #[serde(default = "default_g")]
    pub g: Vec<usize>,
    #[serde(default = "default_mcs")]
    pub mcs: Vec<Mcs>,
    #[serde(default = "default_noise")]
    pub noise_model: Vec<NoiseModel>,
    #[serde(default = "default_taps")]
    pub taps: Vec<Tap>,
    #[serde(default)]
    pub cfo_hz: f64,
    /// Per-trial CFO is drawn uniformly from `cfo_hz +- cfo_spread_hz`.
    #[serde(default)]
    pub cfo_spread_hz: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_packet_len")]
    pub packet_len: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_receivers")]
    pub receivers: Vec<ReceiverKind>,
    #[serde(default)]
    pub sync: SyncMode,
    /// Noise-only lead-in in base samples; with estimated sync a random
    /// fraction of a base sample is added.
    #[serde(default = "default_pad")]
    pub timing_pad: usize,
    #[serde(default = "default_true")]
    pub isi_shift: bool,
    #[serde(default = "default_true")]
    pub fine_cfo: bool,
    #[serde(default)]
    pub fine_objective: FineObjective,
    #[serde(default = "default_true")]
    pub pilot_tracking: bool,
    #[serde(default)]
    pub noise_map_mode: NoiseMapMode,
    #[serde(default)]
    pub kde_boundary: KdeBoundary,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default = "default_threshold")]
    pub detect_threshold: f64,
    /// Write measured wall time; off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl SweepSpec {
    pub fn new(snr_db: Vec<f64>) -> Self {
        serde_json::from_value(serde_json::json!({ "snr_db": snr_db })).expect("defaults")
    }

    pub fn validate(&self, cfg: &FrameConfig) -> Result<()> {
        let empty = |name: &str, n: usize| if n == 0 { Err(Error::Config(format!("axis `{name}` is empty"))) } else { Ok(()) };
        empty("snr_db", self.snr_db.len())?;
        empty("g", self.g.len())?;
        empty("mcs", self.mcs.len())?;
        empty("noise_model", self.noise_model.len())?;
        empty("receivers", self.receivers.len())?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.packet_len == 0 {
            return Err(Error::Config("packet_len must be at least 1".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("snr_db values must be finite".into()));
        }
        for g in &self.g {
            crate::channel::check_oversampling(*g)?;
        }
        let gc = self.channel_g();
        ChannelConfig { oversampling: gc, multipath_taps: self.taps.clone(), ..Default::default() }.validate(cfg)
    }

    /// Rate of the simulated channel: every receiver decimates from it, so all
    /// G values see the same noise realisation.
    pub fn channel_g(&self) -> usize {
        self.g.iter().copied().max().unwrap_or(1)
    }

    /// (receiver, G) pairs decoded for every trial, in spec order.
    pub fn receiver_points(&self) -> Vec<(ReceiverKind, usize)> {
        let mut v = Vec::new();
        for &r in &self.receivers {
            if r == ReceiverKind::Baseline {
                v.push((r, 1));
            } else {
                v.extend(self.g.iter().map(|&g| (r, g)));
            }
        }
        v
    }

    /// Receiver settings of one (receiver, G) point.
    pub fn rx_config(&self, kind: ReceiverKind, g: usize) -> RxConfig {
        RxConfig {
            kind,
            oversampling: g,
            detect_threshold: self.detect_threshold,
            isi_shift: self.isi_shift,
            fine_cfo: self.fine_cfo,
            fine_objective: self.fine_objective,
            pilot_tracking: self.pilot_tracking,
            noise_map_mode: self.noise_map_mode,
            kde_boundary: self.kde_boundary,
            genie: Genie::default(),
            keep_copies: false,
        }
    }
}

/// One point of the sweep grid shared by all receivers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelPoint {
    pub mcs: Mcs,
    pub noise_model: NoiseModel,
    pub snr_db: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub bits: usize,
    pub bit_errors: usize,
    pub packet_ok: bool,
    pub acquired: bool,
    /// |timing error| in base samples (estimated sync only).
    pub sync_err: Option<f64>,
    /// Estimated minus injected CFO (estimated sync only).
    pub cfo_err_hz: Option<f64>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one trial, independent of execution order.
pub fn trial_seed(seed: u64, point: &ChannelPoint, trial: usize) -> u64 {
    let mut h = splitmix(seed);
    for v in [
        point.mcs.scheme.bits_per_symbol() as u64,
        point.mcs.coding as u64,
        point.noise_model as u64,
        point.snr_db.to_bits(),
        trial as u64,
    ] {
        h = splitmix(h ^ v);
    }
    h
}


/// Runs one packet through the channel and decodes it with every receiver
/// point of the spec. Deterministic in (spec.seed, point, trial).
pub fn run_trial_group(spec: &SweepSpec, cfg: &FrameConfig, point: &ChannelPoint, trial: usize) -> Result<Vec<TrialMetrics>> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.seed, point, trial));
    let payload: Vec<u8> = (0..spec.packet_len).map(|_| rng.random()).collect();
    let frame = assemble_frame(&payload, point.mcs, cfg)?;
    let gc = spec.channel_g();
    let jitter = if spec.sync == SyncMode::Estimated { rng.random_range(0..gc) } else { 0 };
    let cfo = spec.cfo_hz + if spec.cfo_spread_hz > 0.0 { rng.random_range(-spec.cfo_spread_hz..=spec.cfo_spread_hz) } else { 0.0 };
    let ch = ChannelConfig {
        oversampling: gc,
        snr_db: Some(point.snr_db),
        cfo_hz: cfo,
        multipath_taps: spec.taps.clone(),
        timing_pad: spec.timing_pad * gc + jitter,
        noise_model: point.noise_model,
        interpolation: spec.interpolation,
        seed: rng.next_u64(),
    };
    let out = run_channel(&frame, &ch, cfg)?;
    let bits = frame.info_bits.len();

    Ok(spec
        .receiver_points()
        .into_iter()
        .map(|(kind, g)| {
            let ratio = gc / g;
            let stream = out.stream.decimate(ratio, 0);
            let mut rx = spec.rx_config(kind, g);
            if spec.sync != SyncMode::Estimated {
                rx.genie = Genie {
                    ltf_start: Some(out.truth.ltf_start / ratio),
                    cfo_hz: Some(cfo),
                    unit_channel: spec.sync == SyncMode::GenieChannel,
                };
            }
            let res: Result<DecodeResult> = if kind == ReceiverKind::Baseline {
                decode_baseline(&stream, &frame.meta, cfg, &rx)
            } else {
                decode_frame_tfi(&stream, &frame.meta, cfg, &rx)
            };
            match res {
                Ok(mut r) => {
                    let bit_errors = r.count_bit_errors(&frame.info_bits);
                    let estimated = spec.sync == SyncMode::Estimated;
                    TrialMetrics {
                        bits,
                        bit_errors,
                        packet_ok: r.crc_ok,
                        acquired: true,
                        sync_err: estimated
                            .then_some(((r.sync.symbol_start * ratio) as f64 - out.truth.ltf_start as f64).abs() / gc as f64),
                        cfo_err_hz: estimated.then_some(r.cfo.fine_hz - cfo),
                    }
                }
                // A packet that cannot be acquired is as good as a coin toss per bit.
                Err(_) => TrialMetrics { bits, bit_errors: bits / 2, packet_ok: false, acquired: false, sync_err: None, cfo_err_hz: None },
            }
        })
        .collect())
}

/// Metrics of a single receiver point for one trial.
pub fn run_trial(spec: &SweepSpec, cfg: &FrameConfig, point: &ChannelPoint, kind: ReceiverKind, g: usize, trial: usize) -> Result<TrialMetrics> {
    let idx = spec
        .receiver_points()
        .iter()
        .position(|p| *p == (kind, g))
        .ok_or_else(|| Error::Config(format!("receiver {} at G={g} is not part of the spec", kind.label())))?;
    Ok(run_trial_group(spec, cfg, point, trial)?[idx])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub receiver: ReceiverKind,
    pub mcs: Mcs,
    pub g: usize,
    pub noise_model: NoiseModel,
    pub snr_db: f64,
    pub trials: usize,
    pub bits: usize,
    pub bit_errors: usize,
    pub ber: f64,
    pub packets: usize,
    pub packets_ok: usize,
    pub prr: f64,
    pub sync_err_mean: f64,
    pub sync_err_median: f64,
    pub cfo_err_hz_rms: f64,
    pub wall_time_s: f64,
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn aggregate(receiver: ReceiverKind, g: usize, point: &ChannelPoint, metrics: &[TrialMetrics], wall_time_s: f64) -> SweepRow {
    let bits: usize = metrics.iter().map(|m| m.bits).sum();
    let bit_errors: usize = metrics.iter().map(|m| m.bit_errors).sum();
    let packets = metrics.len();
    let packets_ok = metrics.iter().filter(|m| m.packet_ok).count();
    let mut sync: Vec<f64> = metrics.iter().filter_map(|m| m.sync_err).collect();
    let sync_mean = if sync.is_empty() { f64::NAN } else { sync.iter().sum::<f64>() / sync.len() as f64 };
    let cfo: Vec<f64> = metrics.iter().filter_map(|m| m.cfo_err_hz).collect();
    let cfo_rms = if cfo.is_empty() { f64::NAN } else { (cfo.iter().map(|e| e * e).sum::<f64>() / cfo.len() as f64).sqrt() };
    SweepRow {
        receiver,
        mcs: point.mcs,
        g,
        noise_model: point.noise_model,
        snr_db: point.snr_db,
        trials: packets,
        bits,
        bit_errors,
        ber: if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 },
        packets,
        packets_ok,
        prr: if packets == 0 { 0.0 } else { packets_ok as f64 / packets as f64 },
        sync_err_mean: sync_mean,
        sync_err_median: median(&mut sync),
        cfo_err_hz_rms: cfo_rms,
        wall_time_s,
    }
}

fn sort_key(r: &SweepRow) -> (&'static str, &'static str, &'static str, usize, &'static str) {
    (r.receiver.label(), r.mcs.scheme.label(), r.mcs.coding.label(), r.g, r.noise_model.label())
}

pub fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)).then(a.snr_db.total_cmp(&b.snr_db)));
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

/// Runs every grid point; `on_point` sees the rows of each finished point so
/// callers can flush partial results.
pub fn run_sweep_with(spec: &SweepSpec, cfg: &FrameConfig, mut on_point: impl FnMut(&[SweepRow])) -> Result<SweepReport> {
    spec.validate(cfg)?;
    let receivers = spec.receiver_points();
    let mut rows = Vec::new();
    for &mcs in &spec.mcs {
        for &noise_model in &spec.noise_model {
            for &snr_db in &spec.snr_db {
                let point = ChannelPoint { mcs, noise_model, snr_db };
                let start = Instant::now();
                let per_trial: Vec<Vec<TrialMetrics>> =
                    (0..spec.trials).into_par_iter().map(|t| run_trial_group(spec, cfg, &point, t)).collect::<Result<_>>()?;
                let wall = if spec.record_wall_time { start.elapsed().as_secs_f64() } else { 0.0 };
                let point_rows: Vec<SweepRow> = receivers
                    .iter()
                    .enumerate()
                    .map(|(i, &(kind, g))| {
                        let m: Vec<TrialMetrics> = per_trial.iter().map(|t| t[i]).collect();
                        aggregate(kind, g, &point, &m, wall)
                    })
                    .collect();
                on_point(&point_rows);
                rows.extend(point_rows);
            }
        }
    }
    sort_rows(&mut rows);
    Ok(SweepReport { rows })
}

pub fn run_sweep(spec: &SweepSpec, cfg: &FrameConfig) -> Result<SweepReport> {
    run_sweep_with(spec, cfg, |_| {})
}

fn fmt_f(v: f64, prec: usize) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.prec$}")
    }
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.6e},{},{},{},{},{},{},{}",
            self.receiver.label(),
            self.mcs.scheme.label(),
            self.mcs.coding.label(),
            self.g,
            self.noise_model.label(),
            fmt_f(self.snr_db, 2),
            self.trials,
            self.bits,
            self.bit_errors,
            self.ber,
            self.packets,
            self.packets_ok,
            fmt_f(self.prr, 6),
            fmt_f(self.sync_err_mean, 4),
            fmt_f(self.sync_err_median, 4),
            fmt_f(self.cfo_err_hz_rms, 3),
            fmt_f(self.wall_time_s, 3),
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 17 {
            return Err(Error::Schema(format!("expected 17 fields, got {}", f.len())));
        }
        let bad = |name: &str| Error::Schema(format!("bad value for `{name}`"));
        let num = |i: usize, name: &str| f[i].parse::<f64>().map_err(|_| bad(name));
        let int = |i: usize, name: &str| f[i].parse::<usize>().map_err(|_| bad(name));
        let coding = match f[2] {
            "uncoded" => Coding::Uncoded,
            "1/2" => Coding::HalfRateConv,
            _ => return Err(bad("coding")),
        };
        let noise_model = match f[4] {
            "white" => NoiseModel::WhitePerSample,
            "bandlimited" => NoiseModel::BandLimited,
            _ => return Err(bad("noise_model")),
        };
        Ok(SweepRow {
            receiver: ReceiverKind::parse(f[0]).ok_or_else(|| bad("receiver"))?,
            mcs: Mcs::new(Scheme::parse(f[1]).ok_or_else(|| bad("mcs"))?, coding),
            g: int(3, "G")?,
            noise_model,
            snr_db: num(5, "snr_db")?,
            trials: int(6, "trials")?,
            bits: int(7, "bits")?,
            bit_errors: int(8, "bit_errors")?,
            ber: num(9, "ber")?,
            packets: int(10, "packets")?,
            packets_ok: int(11, "packets_ok")?,
            prr: num(12, "prr")?,
            sync_err_mean: num(13, "sync_err_mean")?,
            sync_err_median: num(14, "sync_err_median")?,
            cfo_err_hz_rms: num(15, "cfo_err_hz_rms")?,
            wall_time_s: num(16, "wall_time_s")?,
        })
    }
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(SWEEP_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }

    /// Parses a report, requiring the exact header and at least one row.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim_end() == SWEEP_HEADER => {}
            Some(h) => return Err(Error::Schema(format!("unexpected header `{h}`"))),
            None => return Err(Error::Schema("empty file".into())),
        }
        let rows = lines.map(SweepRow::from_csv).collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Err(Error::Schema("no data rows".into()));
        }
        Ok(Self { rows })
    }
}

/// Ideal SNR gain of coherently combining G independent-noise copies.
pub fn theoretical_gain(g: usize) -> f64 {
    10.0 * (g as f64).log10()
}

/// Fraction of transmit power saved by needing `delta_db` less SNR.
pub fn savings_from_delta(delta_db: f64) -> f64 {
    (1.0 - 10f64.powf(-delta_db / 10.0)).max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSavingsRow {
    pub mcs: Mcs,
    pub g: usize,
    pub target_prr: f64,
    /// `None` when the target is never reached on the grid.
    pub min_snr_db: Option<f64>,
    pub delta_db: Option<f64>,
    /// Fraction in [0, 1).
    pub savings: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerSavingsReport {
    pub rows: Vec<PowerSavingsRow>,
}

/// Lowest SNR reaching `target` PRR, linearly interpolated in (dB, PRR)
/// between the bracketing grid points. `points` must be sorted by SNR.
pub fn min_snr_for_prr(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let i = points.iter().position(|&(_, p)| p >= target)?;
    if i == 0 {
        return Some(points[0].0);
    }
    let (s0, p0) = points[i - 1];
    let (s1, p1) = points[i];
    Some(s0 + (target - p0) / (p1 - p0) * (s1 - s0))
}

/// Compares the oversampled receiver `receiver` at every G against the
/// baseline (or, without baseline rows, the same receiver at G = 1).
pub fn power_savings(report: &SweepReport, target_prr: f64, receiver: ReceiverKind) -> PowerSavingsReport {
    let curve = |kind: ReceiverKind, mcs: Mcs, g: usize| -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = report.rows.iter().filter(|r| r.receiver == kind && r.mcs == mcs && r.g == g).map(|r| (r.snr_db, r.prr)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let mut mcs_list: Vec<Mcs> = report.rows.iter().map(|r| r.mcs).collect();
    mcs_list.sort();
    mcs_list.dedup();
    let mut rows = Vec::new();
    for mcs in mcs_list {
        let base_curve = {
            let b = curve(ReceiverKind::Baseline, mcs, 1);
            if b.is_empty() {
                curve(receiver, mcs, 1)
            } else {
                b
            }
        };
        let base = min_snr_for_prr(&base_curve, target_prr);
        let mut gs: Vec<usize> = report.rows.iter().filter(|r| r.receiver == receiver && r.mcs == mcs).map(|r| r.g).collect();
        gs.sort_unstable();
        gs.dedup();
        for g in gs {
            let min = min_snr_for_prr(&curve(receiver, mcs, g), target_prr);
            let delta = match (base, min) {
                (Some(b), Some(m)) => Some(b - m),
                _ => None,
            };
            rows.push(PowerSavingsRow { mcs, g, target_prr, min_snr_db: min, delta_db: delta, savings: delta.map(savings_from_delta) });
        }
    }
    PowerSavingsReport { rows }
}

impl PowerSavingsReport {
    /// The mcs column reads e.g. `QAM16 1/2`. Unreachable entries are written
    /// as `unreachable`; savings are in percent.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>, scale: f64| v.map_or_else(|| "unreachable".to_string(), |x| format!("{:.3}", x * scale));
        let mut s = String::new();
        s.push_str(POWER_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{} {},{},{:.3},{},{},{}",
                r.mcs.scheme.label(),
                r.mcs.coding.label(),
                r.g,
                r.target_prr,
                opt(r.min_snr_db, 1.0),
                opt(r.delta_db, 1.0),
                opt(r.savings, 100.0)
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            g: vec![1, 2],
            mcs: vec![Mcs::new(Scheme::Qpsk, Coding::Uncoded)],
            trials: 6,
            packet_len: 30,
            receivers: vec![ReceiverKind::Baseline, ReceiverKind::TfiJoint, ReceiverKind::TfiAvg],
            ..SweepSpec::new(vec![4.0, 12.0])
        }
    }

    #[test]
    fn theoretical_gain_values() {
        assert_eq!(theoretical_gain(1), 0.0);
        assert!((theoretical_gain(2) - 3.0103).abs() < 1e-4);
        assert!((theoretical_gain(4) - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn savings_values() {
        assert_eq!(savings_from_delta(0.0), 0.0);
        assert!((savings_from_delta(theoretical_gain(8)) - 0.875).abs() < 1e-12);
        assert!((savings_from_delta(3.0) - 0.5).abs() < 2e-3);
    }

    #[test]
    fn interpolated_min_snr() {
        let pts = [(0.0, 0.1), (2.0, 0.5), (4.0, 0.9)];
        assert_eq!(min_snr_for_prr(&pts, 0.05), Some(0.0));
        assert!((min_snr_for_prr(&pts, 0.7).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(min_snr_for_prr(&pts, 0.95), None);
    }

    #[test]
    fn identical_receivers_save_nothing() {
        let point = ChannelPoint { mcs: Mcs::new(Scheme::Qpsk, Coding::Uncoded), noise_model: NoiseModel::WhitePerSample, snr_db: 0.0 };
        let mut rows = Vec::new();
        for (i, prr) in [0.2, 0.6, 0.95].iter().enumerate() {
            for (kind, g) in [(ReceiverKind::Baseline, 1), (ReceiverKind::TfiJoint, 4)] {
                let m: Vec<TrialMetrics> = (0..100)
                    .map(|t| TrialMetrics { bits: 8, bit_errors: 0, packet_ok: (t as f64) < prr * 100.0, acquired: true, sync_err: None, cfo_err_hz: None })
                    .collect();
                rows.push(aggregate(kind, g, &ChannelPoint { snr_db: i as f64, ..point }, &m, 0.0));
            }
        }
        let rep = power_savings(&SweepReport { rows }, 0.9, ReceiverKind::TfiJoint);
        assert_eq!(rep.rows.len(), 1);
        assert!(rep.rows[0].delta_db.unwrap().abs() < 1e-12);
        assert_eq!(rep.rows[0].savings, Some(0.0));
        let unreachable = power_savings(&SweepReport { rows: vec![] }, 0.9, ReceiverKind::TfiJoint);
        assert!(unreachable.rows.is_empty());
    }

    #[test]
    fn noiseless_point_is_perfect() {
        let spec = SweepSpec { cfo_hz: 900.0, ..small_spec() };
        let cfg = FrameConfig::default();
        let point = ChannelPoint { mcs: spec.mcs[0], noise_model: NoiseModel::WhitePerSample, snr_db: 60.0 };
        for m in run_trial_group(&spec, &cfg, &point, 0).unwrap() {
            assert_eq!(m.bit_errors, 0);
            assert!(m.packet_ok);
        }
    }

    #[test]
    fn trials_are_deterministic_and_sweeps_byte_identical() {
        let spec = small_spec();
        let cfg = FrameConfig::default();
        let point = ChannelPoint { mcs: spec.mcs[0], noise_model: NoiseModel::BandLimited, snr_db: 3.0 };
        assert_eq!(run_trial_group(&spec, &cfg, &point, 3).unwrap(), run_trial_group(&spec, &cfg, &point, 3).unwrap());
        let a = run_sweep(&spec, &cfg).unwrap().to_csv();
        let b = run_sweep(&spec, &cfg).unwrap().to_csv();
        assert_eq!(a, b);
        let c = run_sweep(&SweepSpec { seed: 1, ..spec }, &cfg).unwrap().to_csv();
        assert_ne!(a, c);
        assert_eq!(a.lines().next(), c.lines().next());
    }

    #[test]
    fn sweep_rows_sorted_and_consistent() {
        let spec = small_spec();
        let cfg = FrameConfig::default();
        let rep = run_sweep(&spec, &cfg).unwrap();
        assert_eq!(rep.rows.len(), 2 * (1 + 2 + 2));
        let mut sorted = rep.rows.clone();
        sort_rows(&mut sorted);
        assert_eq!(SweepReport { rows: sorted }.to_csv(), rep.to_csv());
        // Aggregation matches the per-trial metrics.
        let point = ChannelPoint { mcs: spec.mcs[0], noise_model: NoiseModel::WhitePerSample, snr_db: 4.0 };
        let row = rep.rows.iter().find(|r| r.receiver == ReceiverKind::TfiAvg && r.g == 2 && r.snr_db == 4.0).unwrap();
        let errs: usize = (0..spec.trials).map(|t| run_trial(&spec, &cfg, &point, ReceiverKind::TfiAvg, 2, t).unwrap().bit_errors).sum();
        assert_eq!(row.bit_errors, errs);
        for r in &rep.rows {
            assert_eq!(r.ber, r.bit_errors as f64 / r.bits as f64);
            assert_eq!(r.prr, r.packets_ok as f64 / r.packets as f64);
        }
        let back = SweepReport::from_csv(&rep.to_csv()).unwrap();
        assert_eq!(back.to_csv(), rep.to_csv());
    }

    #[test]
    fn forced_sync_failure_counts_as_lost_packet() {
        let spec = SweepSpec { detect_threshold: 1.5, ..small_spec() };
        let cfg = FrameConfig::default();
        let point = ChannelPoint { mcs: spec.mcs[0], noise_model: NoiseModel::WhitePerSample, snr_db: 30.0 };
        for m in run_trial_group(&spec, &cfg, &point, 0).unwrap() {
            assert!(!m.packet_ok && !m.acquired);
            assert_eq!(m.bit_errors, m.bits / 2);
        }
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(SweepReport::from_csv(""), Err(Error::Schema(_))));
        assert!(matches!(SweepReport::from_csv(&format!("{SWEEP_HEADER}\n")), Err(Error::Schema(_))));
        assert!(matches!(SweepReport::from_csv("a,b\n1,2\n"), Err(Error::Schema(_))));
        let missing: std::result::Result<SweepSpec, _> = serde_json::from_str("{\"trials\": 3}");
        assert!(missing.unwrap_err().to_string().contains("snr_db"));
    }
}
