//! Receiver front end: base-rate packet detection, clock switch, timing
//! synchronisation against the oversampled long training block, and two-stage
//! carrier frequency offset estimation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_cfo, zero_pad_spectrum};
use crate::error::{Error, Result};
use crate::phy::fft::{fft64, ifft};
use crate::phy::FrameConfig;
use crate::stream::SampleStream;
use crate::tx::{LTF_GUARD, STF_LEN, STF_PERIOD};

/// Lags summed by the detection metric (eight STF periods).
pub const DETECT_WINDOW: usize = 128;
/// Consecutive super-threshold lags that make a plateau (one STF period).
pub const PLATEAU_LEN: usize = 16;
pub const DEFAULT_THRESHOLD: f64 = 0.8;
/// STF repetitions available to the detector; the tenth covers the clock switch.
pub const DETECT_REPETITIONS: usize = 9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub detected: bool,
    /// Base-rate index where the plateau begins (0 when not detected).
    pub coarse_start: usize,
    pub metric_trace: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyncResult {
    /// Oversample index of the first 64-sample long training block.
    pub symbol_start: usize,
    /// Signed error against ground truth in base samples, filled in by callers that know it.
    pub timing_error: Option<f64>,
    pub peak_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfoEstimate {
    pub coarse_hz: f64,
    pub fine_hz: f64,
    pub residual_cost: f64,
}

/// Normalised lag-16 autocorrelation over every admissible start index.
pub fn detection_metric(base: &[Complex64]) -> Vec<f64> {
    let span = DETECT_WINDOW + STF_PERIOD;
    if base.len() < span {
        return Vec::new();
    }
    let n = base.len() - span + 1;
    let mut out = Vec::with_capacity(n);
    // Running sums over n in [k, k + 128).
    let mut num: Complex64 = (0..DETECT_WINDOW).map(|i| base[i] * base[i + STF_PERIOD].conj()).sum();
    let mut den: f64 = (0..DETECT_WINDOW).map(|i| base[i + STF_PERIOD].norm_sqr()).sum();
    for k in 0..n {
        out.push(if den > 0.0 { num.norm() / den } else { 0.0 });
        if k + 1 < n {
            num += base[k + DETECT_WINDOW] * base[k + DETECT_WINDOW + STF_PERIOD].conj() - base[k] * base[k + STF_PERIOD].conj();
            den += base[k + DETECT_WINDOW + STF_PERIOD].norm_sqr() - base[k + STF_PERIOD].norm_sqr();
        }
    }
    out
}

pub fn detect_packet(stream: &SampleStream, threshold: f64) -> DetectionResult {
    let trace = detection_metric(&stream.samples);
    let mut run = 0usize;
    for (k, m) in trace.iter().enumerate() {
        if *m >= threshold {
            run += 1;
            if run == PLATEAU_LEN {
                return DetectionResult { detected: true, coarse_start: k + 1 - PLATEAU_LEN, metric_trace: trace };
            }
        } else {
            run = 0;
        }
    }
    DetectionResult { detected: false, coarse_start: 0, metric_trace: trace }
}

/// First oversample index that is valid after the switch to the `g`-fold clock.
///
/// The switch starts at the end of the ninth STF repetition (relative to the
/// detected start) and must finish within the tenth.
pub fn model_clock_switch(detection: &DetectionResult, cfg: &FrameConfig, g: usize) -> Result<usize> {
    if !detection.detected {
        return Err(Error::NotDetected);
    }
    let latency = cfg.clock_switch_samples();
    let available = STF_LEN - DETECT_REPETITIONS * STF_PERIOD;
    if latency > available {
        return Err(Error::SwitchLatency { latency, available });
    }
    Ok((detection.coarse_start + DETECT_REPETITIONS * STF_PERIOD + latency) * g)
}

/// Zeroes every sample before `valid_from`.
pub fn mask_before(stream: &SampleStream, valid_from: usize) -> SampleStream {
    let mut s = stream.clone();
    let end = valid_from.min(s.len());
    for v in &mut s.samples[..end] {
        *v = Complex64::new(0.0, 0.0);
    }
    s
}

/// One long training block interpolated to `g` samples per base sample.
pub fn build_reference_ltf(cfg: &FrameConfig, g: usize) -> SampleStream {
    let scale = cfg.tx_scale() * g as f64;
    let spec = zero_pad_spectrum(&cfg.ltf_bins(), g);
    let samples = ifft(&spec).into_iter().map(|v| v * scale).collect();
    SampleStream::new(samples, cfg.base_rate * g as f64)
}

/// Search half-width of the timing window in base samples (two symbols).
pub const SYNC_HALF_WINDOW: usize = 160;

/// Locates the first long training block.
///
/// The score at lag `k` combines the correlations of both training blocks,
/// each normalised by the reference norm and the windowed received norm, so
/// it lies in `[0, 1]` and does not depend on the received scale. Lags before
/// `valid_from` are skipped.
pub fn sync_timing(stream: &SampleStream, reference: &SampleStream, coarse_start: usize, valid_from: usize) -> Result<SyncResult> {
    let m = reference.len();
    let g = m / 64;
    let center = (coarse_start + STF_LEN + LTF_GUARD) * g;
    let lo = center.saturating_sub(SYNC_HALF_WINDOW * g).max(valid_from);
    let last = stream.len().checked_sub(2 * m).ok_or(Error::EmptySearchWindow)?;
    let hi = (center + SYNC_HALF_WINDOW * g).min(last);
    if lo > hi {
        return Err(Error::EmptySearchWindow);
    }
    let r = &reference.samples;
    let r_norm = reference.energy().sqrt();
    let y = &stream.samples;
    let corr = |k: usize| -> (f64, f64) {
        let mut c = Complex64::new(0.0, 0.0);
        let mut e = 0.0;
        for (a, b) in y[k..k + m].iter().zip(r) {
            c += a * b.conj();
            e += a.norm_sqr();
        }
        (c.norm(), e.sqrt())
    };
    let mut best = (lo, -1.0);
    for k in lo..=hi {
        let (c0, e0) = corr(k);
        let (c1, e1) = corr(k + m);
        let den = r_norm * (e0 + e1);
        let score = if den > 0.0 { (c0 + c1) / den } else { 0.0 };
        if score > best.1 {
            best = (k, score);
        }
    }
    Ok(SyncResult { symbol_start: best.0, timing_error: None, peak_value: best.1.max(0.0) })
}

/// Frequency offset from the phase advance between the two training blocks
/// whose windows begin at `window_start`. Unambiguous for
/// |offset| < base_rate / 128.
pub fn estimate_cfo_coarse(stream: &SampleStream, window_start: usize, g: usize, cfg: &FrameConfig) -> Result<f64> {
    let m = cfg.nfft * g;
    let needed = window_start + 2 * m;
    if stream.len() < needed {
        return Err(Error::StreamTooShort { needed, available: stream.len() });
    }
    let y = &stream.samples;
    let acc: Complex64 = (window_start..window_start + m).map(|n| y[n].conj() * y[n + m]).sum();
    Ok(acc.arg() * cfg.base_rate / (2.0 * PI * cfg.nfft as f64))
}

/// Time-domain copies of one 64-sample window: copy `g` holds samples
/// `start + g + G n`.
fn window_copies(stream: &SampleStream, start: usize, g: usize) -> Vec<Vec<Complex64>> {
    (0..g).map(|c| (0..64).map(|n| stream.samples[start + c + g * n]).collect()).collect()
}

/// Terms of the fine frequency objective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FineObjective {
    /// Only the relation between phase-shifted copies within each block.
    CopyRelation,
    /// Copy relation plus the block-to-block repetition residual.
    #[default]
    CopyAndRepetition,
}

/// Oversampled training blocks prepared for the fine frequency objective.
pub struct FineCfoInput {
    /// Per block, per copy, 64 time-domain samples.
    pub blocks: Vec<Vec<Vec<Complex64>>>,
    /// Contiguous oversampled windows one block apart, covering the tail of
    /// the guard and the first block.
    pub raw: [Vec<Complex64>; 2],
    pub g: usize,
    pub base_rate: f64,
    /// Signed subcarrier index of each FFT bin.
    pub subcarriers: Vec<i32>,
    pub objective: FineObjective,
}

impl FineCfoInput {
    /// Copies of both training blocks, with each window moved `shift` oversamples early.
    pub fn from_stream(stream: &SampleStream, symbol_start: usize, shift: usize, g: usize, cfg: &FrameConfig) -> Result<Self> {
        let m = cfg.nfft * g;
        let needed = symbol_start + 2 * m;
        if stream.len() < needed || symbol_start < shift {
            return Err(Error::StreamTooShort { needed, available: stream.len() });
        }
        let blocks = (0..2).map(|b| window_copies(stream, symbol_start + b * m - shift, g)).collect();
        // The cyclic guard repeats the block tail, so the repetition term may
        // start inside it; keep a margin against timing error.
        let lead = (FINE_GUARD_LEAD * g).min(symbol_start);
        let first = symbol_start - lead..symbol_start + m - shift;
        let raw = [0, 1].map(|b| stream.samples[first.start + b * m..first.end + b * m].to_vec());
        Ok(Self {
            blocks,
            raw,
            g,
            base_rate: cfg.base_rate,
            subcarriers: (0..64).map(|b| cfg.signed(b)).collect(),
            objective: FineObjective::default(),
        })
    }

    pub fn with_objective(mut self, objective: FineObjective) -> Self {
        self.objective = objective;
        self
    }

    pub fn cost(&self, cfo_hz: f64) -> f64 {
        match self.objective {
            FineObjective::CopyRelation => self.copy_relation(cfo_hz),
            // The copy term lives in the unnormalised frequency domain; divide
            // by 64 (Parseval) so both terms are time-domain squared errors.
            FineObjective::CopyAndRepetition => self.copy_relation(cfo_hz) / 64.0 + self.repetition(cfo_hz),
        }
    }

    /// Squared distance between the second block and the first advanced by
    /// one block of frequency offset.
    pub fn repetition(&self, cfo_hz: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, -2.0 * PI * cfo_hz * 64.0 / self.base_rate);
        self.raw[0].iter().zip(&self.raw[1]).map(|(a, b)| (b * rot - a).norm_sqr()).sum()
    }

    /// Sum over blocks and copies g >= 1 of the squared distance between the
    /// de-rotated spectrum of copy g and the model predicted from copy 0.
    pub fn copy_relation(&self, cfo_hz: f64) -> f64 {
        let g = self.g as f64;
        let step = -2.0 * PI * cfo_hz / self.base_rate;
        let derotate = |x: &[Complex64]| -> Vec<Complex64> {
            let v: Vec<Complex64> = x.iter().enumerate().map(|(n, s)| s * Complex64::from_polar(1.0, step * n as f64)).collect();
            fft64(&v).expect("64 samples")
        };
        let mut cost = 0.0;
        for block in &self.blocks {
            let z0 = derotate(&block[0]);
            for (c, copy) in block.iter().enumerate().skip(1) {
                let zg = derotate(copy);
                let common = 2.0 * PI * cfo_hz * c as f64 / (g * self.base_rate);
                for (b, (a, r)) in zg.iter().zip(&z0).enumerate() {
                    let k = self.subcarriers[b] as f64;
                    let model = r * Complex64::from_polar(1.0, common + 2.0 * PI * k * c as f64 / (64.0 * g));
                    cost += (a - model).norm_sqr();
                }
            }
        }
        cost
    }
}

pub const FINE_GRID_POINTS: usize = 64;
/// Fine search half-range as a fraction of the subcarrier spacing.
pub const FINE_HALF_RANGE: f64 = 0.02;
/// Base samples of the training guard included in the repetition term.
pub const FINE_GUARD_LEAD: usize = 24;
/// Golden-section stopping width as a fraction of the subcarrier spacing.
pub const FINE_TOLERANCE: f64 = 1e-3;

/// Grid search around `coarse_hz` followed by golden-section refinement.
pub fn estimate_cfo_fine(input: &FineCfoInput, coarse_hz: f64, cfg: &FrameConfig) -> Result<CfoEstimate> {
    if input.g < 2 {
        return Err(Error::FineCfoNotApplicable);
    }
    let half = FINE_HALF_RANGE * cfg.subcarrier_spacing();
    let step = 2.0 * half / (FINE_GRID_POINTS - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..FINE_GRID_POINTS)
        .map(|i| {
            let f = coarse_hz - half + step * i as f64;
            (f, input.cost(f))
        })
        .collect();
    let best = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut a = grid[best.saturating_sub(1)].0;
    let mut b = grid[(best + 1).min(FINE_GRID_POINTS - 1)].0;
    let tol = FINE_TOLERANCE * cfg.subcarrier_spacing();
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (input.cost(x1), input.cost(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = input.cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = input.cost(x2);
        }
    }
    let (mut fine, mut cost) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    // Parabolic step through the final bracket.
    let (fa, fb) = (input.cost(a), input.cost(b));
    if let Some(v) = parabola_vertex((a, fa), (fine, cost), (b, fb)).filter(|v| *v > a && *v < b) {
        let c = input.cost(v);
        if c < cost {
            (fine, cost) = (v, c);
        }
    }
    if grid[best].1 < cost {
        (fine, cost) = grid[best];
    }
    Ok(CfoEstimate { coarse_hz, fine_hz: fine, residual_cost: cost })
}

fn parabola_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> Option<f64> {
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    (den.abs() > f64::EPSILON * num.abs().max(1e-300)).then(|| x1 - 0.5 * num / den)
}

pub fn compensate_cfo(stream: &SampleStream, cfo_hz: f64) -> SampleStream {
    apply_cfo(stream, -cfo_hz)
}

/// Common phase of a symbol from its (equalised) pilot observations.
pub fn track_phase_pilots(observed: &[Complex64], expected: &[f64]) -> f64 {
    observed.iter().zip(expected).map(|(o, e)| o * *e).sum::<Complex64>().arg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_noise, run_channel, ChannelConfig, NoiseModel};
    use crate::phy::{Coding, Mcs, Scheme};
    use crate::tx::{assemble_frame, build_ltf, Frame};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frame() -> (Frame, FrameConfig) {
        let cfg = FrameConfig::default();
        let payload: Vec<u8> = (0..80u8).collect();
        (assemble_frame(&payload, Mcs::new(Scheme::Qpsk, Coding::Uncoded), &cfg).unwrap(), cfg)
    }

    fn received(g: usize, pad: usize, snr: Option<f64>, cfo: f64, seed: u64) -> (SampleStream, usize, FrameConfig) {
        let (f, cfg) = frame();
        let ch = ChannelConfig { oversampling: g, snr_db: snr, cfo_hz: cfo, timing_pad: pad, seed, ..Default::default() };
        let out = run_channel(&f, &ch, &cfg).unwrap();
        (out.stream, out.truth.ltf_start, cfg)
    }

    #[test]
    fn clean_frame_has_unit_plateau() {
        let (s, _, _) = received(1, 200, None, 0.0, 0);
        let det = detect_packet(&s, DEFAULT_THRESHOLD);
        assert!(det.detected);
        for k in 200..=216 {
            assert!((det.metric_trace[k] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_noise_rarely_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alarms = (0..1000)
            .filter(|_| {
                let n = generate_noise(600, 1.0, NoiseModel::WhitePerSample, 1, &mut rng);
                detect_packet(&SampleStream::new(n, 2e6), DEFAULT_THRESHOLD).detected
            })
            .count();
        assert!(alarms < 10, "{alarms} false alarms");
    }

    #[test]
    fn detects_at_ten_db() {
        let hits = (0..1000)
            .filter(|&t| {
                let (s, _, _) = received(1, 300, Some(10.0), 0.0, t);
                detect_packet(&s, DEFAULT_THRESHOLD).detected
            })
            .count();
        assert!(hits > 990, "{hits}");
    }

    #[test]
    fn clock_switch_budget() {
        let mut cfg = FrameConfig::default();
        let det = DetectionResult { detected: true, coarse_start: 10, metric_trace: vec![] };
        assert_eq!(model_clock_switch(&det, &cfg, 4).unwrap(), (10 + 160) * 4);
        cfg.clock_switch_latency = 0.0;
        assert_eq!(model_clock_switch(&det, &cfg, 1).unwrap(), 10 + 144);
        cfg.clock_switch_latency = 20e-6;
        assert!(matches!(model_clock_switch(&det, &cfg, 1), Err(Error::SwitchLatency { .. })));
        let none = DetectionResult { detected: false, ..det };
        assert!(model_clock_switch(&none, &FrameConfig::default(), 1).is_err());
    }

    #[test]
    fn reference_ltf() {
        let cfg = FrameConfig::default();
        let r1 = build_reference_ltf(&cfg, 1);
        let ltf = build_ltf(&cfg);
        for n in 0..64 {
            assert!((r1[n] - ltf[32 + n]).norm() < 1e-12);
        }
        let r8 = build_reference_ltf(&cfg, 8);
        let d = r8.decimate(8, 0);
        for n in 0..64 {
            assert!((d[n] - r1[n]).norm() < 1e-10);
        }
        let e1 = r1.energy() / r1.rate;
        let e8 = r8.energy() / r8.rate;
        assert!((e1 / e8 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sync_is_exact_and_shift_equivariant() {
        let cfg = FrameConfig::default();
        for g in [1, 4] {
            let reference = build_reference_ltf(&cfg, g);
            let (s, truth, _) = received(g, 100 * g, None, 0.0, 0);
            let det = detect_packet(&s.decimate(g, 0), DEFAULT_THRESHOLD);
            let r = sync_timing(&s, &reference, det.coarse_start, 0).unwrap();
            assert_eq!(r.symbol_start, truth);
            assert!(r.peak_value <= 1.0 + 1e-9 && r.peak_value > 0.99);
            let (s5, truth5, _) = received(g, 100 * g + 5, None, 0.0, 0);
            let r5 = sync_timing(&s5, &reference, det.coarse_start, 0).unwrap();
            assert_eq!(truth5, truth + 5);
            assert_eq!(r5.symbol_start, r.symbol_start + 5);
        }
    }

    #[test]
    fn sync_empty_window() {
        let cfg = FrameConfig::default();
        let reference = build_reference_ltf(&cfg, 1);
        let s = SampleStream::zeros(100, 2e6);
        assert!(matches!(sync_timing(&s, &reference, 0, 0), Err(Error::EmptySearchWindow)));
    }

    #[test]
    fn sync_window_stops_at_stream_end() {
        let cfg = FrameConfig::default();
        let g = 2;
        let reference = build_reference_ltf(&cfg, g);
        let (s, truth, _) = received(g, 100 * g, None, 0.0, 0);
        let det = detect_packet(&s.decimate(g, 0), DEFAULT_THRESHOLD);
        for extra in 0..3 {
            let cut = SampleStream::new(s.samples[..truth + 2 * reference.len() + extra].to_vec(), s.rate);
            assert_eq!(sync_timing(&cut, &reference, det.coarse_start, 0).unwrap().symbol_start, truth);
        }
    }

    #[test]
    fn coarse_cfo_examples() {
        let cfg = FrameConfig::default();
        // Windows start one oversample early so the second block stays clear of
        // the transition into the payload.
        let (s, start, _) = received(2, 64, None, 0.0, 0);
        assert!(estimate_cfo_coarse(&s, start - 1, 2, &cfg).unwrap().abs() < 1e-9);
        let f = cfg.base_rate / 256.0;
        let (s, start, _) = received(2, 64, None, f, 0);
        assert!((estimate_cfo_coarse(&s, start - 1, 2, &cfg).unwrap() - f).abs() < 1e-6);
        // Beyond base_rate / 128 the block-to-block phase wraps.
        let f = cfg.base_rate / 128.0 * 1.25;
        let (s, start, _) = received(1, 64, None, f, 0);
        let est = estimate_cfo_coarse(&s, start, 1, &cfg).unwrap();
        assert!((est - (f - cfg.base_rate / 64.0)).abs() < 1e-6);
    }

    #[test]
    fn fine_objective_zero_at_truth() {
        let cfg = FrameConfig::default();
        let (s, start, _) = received(4, 64, None, 0.0, 0);
        let input = FineCfoInput::from_stream(&s, start, 3, 4, &cfg).unwrap();
        assert!(input.cost(0.0) < 1e-9);
        assert!(input.copy_relation(0.0) < 1e-9);
        assert!(input.repetition(0.0) < 1e-9);
        assert!(input.repetition(0.01 * cfg.subcarrier_spacing()) > 1e-3);
        let est = estimate_cfo_fine(&input, 0.0, &cfg).unwrap();
        assert!(est.fine_hz.abs() <= FINE_HALF_RANGE * cfg.subcarrier_spacing());
        let one = FineCfoInput::from_stream(&s, start, 0, 1, &cfg).unwrap();
        assert!(matches!(estimate_cfo_fine(&one, 0.0, &cfg), Err(Error::FineCfoNotApplicable)));
    }

    #[test]
    fn fine_matches_dense_grid_minimum() {
        let cfg = FrameConfig::default();
        let spacing = cfg.subcarrier_spacing();
        let truth = 0.013 * spacing;
        let (s, start, _) = received(4, 64, None, truth, 0);
        let input = FineCfoInput::from_stream(&s, start, 3, 4, &cfg).unwrap();
        assert!(input.cost(truth) < 1e-9);
        let coarse = truth - 0.005 * spacing;
        let est = estimate_cfo_fine(&input, coarse, &cfg).unwrap();
        let half = FINE_HALF_RANGE * spacing;
        let oracle = (0..=20_000)
            .map(|i| coarse - half + 2.0 * half * i as f64 / 20_000.0)
            .min_by(|a, b| input.cost(*a).total_cmp(&input.cost(*b)))
            .unwrap();
        assert!((est.fine_hz - oracle).abs() < 1e-3 * spacing);
        assert!((est.fine_hz - truth).abs() < 1e-3 * spacing);
        assert!((est.fine_hz - coarse).abs() <= half + 1e-9);
    }

    #[test]
    fn compensation_inverts_channel_rotation() {
        let x = SampleStream::new((0..100).map(|i| Complex64::new(i as f64, 1.0)).collect(), 8e6);
        assert_eq!(compensate_cfo(&x, 0.0), x);
        let back = compensate_cfo(&apply_cfo(&x, 1234.5), 1234.5);
        for i in 0..100 {
            assert!((back[i] - x[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn pilot_tracking() {
        let exp = [1.0, 1.0, -1.0, 1.0];
        let obs: Vec<Complex64> = exp.iter().map(|e| Complex64::new(*e, 0.0)).collect();
        assert!(track_phase_pilots(&obs, &exp).abs() < 1e-15);
        let rot: Vec<Complex64> = obs.iter().map(|o| o * Complex64::from_polar(1.0, PI / 8.0)).collect();
        assert!((track_phase_pilots(&rot, &exp) - PI / 8.0).abs() < 1e-12);
    }
}
