//! Per-subcarrier kernel density noise maps learned from the long training
//! field, and the joint maximum-likelihood decision rule built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::copies::SymbolCopies;
use crate::error::{Error, Result};
use crate::phy::constellation::nearest_index;
use crate::phy::{FrameConfig, Scheme};

pub const DENSITY_FLOOR: f64 = 1e-300;
pub const BANDWIDTH_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMapMode {
    /// Deviation of the compensated copy from the known symbol; the channel
    /// stays inside the map.
    RawDeviation,
    /// Least-squares equalise first and model the residual.
    #[default]
    EqualizedResidual,
}

/// Treatment of the edges of the (amplitude, phase) domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KdeBoundary {
    /// Plain Gaussian kernels; mass leaks below a = 0 and past +-pi.
    None,
    /// Kernels reflected at a = 0 and wrapped in phase, so the density
    /// integrates to one over a >= 0, phase in (-pi, pi].
    #[default]
    ReflectWrap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    Kernel,
    /// Phase ignored (uniform); the density depends on amplitude only.
    Uniform,
}

/// Two-dimensional Gaussian KDE over (amplitude, phase) of a deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubcarrierKde {
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
    pub h_a: f64,
    pub h_phi: f64,
    pub boundary: KdeBoundary,
    pub phase_model: PhaseModel,
}

fn std_dev(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt()
}

/// Rule-of-thumb bandwidth 1.06 sigma n^(-1/5), floored.
pub fn silverman_bandwidth(x: &[f64]) -> f64 {
    (1.06 * std_dev(x) * (x.len() as f64).powf(-0.2)).max(BANDWIDTH_FLOOR)
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_phase(p: f64) -> f64 {
    let w = (p + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

#[inline]
fn gauss(x: f64, h: f64) -> f64 {
    (-0.5 * (x / h) * (x / h)).exp()
}

impl SubcarrierKde {
    pub fn from_deviations(dev: &[Complex64], boundary: KdeBoundary) -> Self {
        let amplitudes: Vec<f64> = dev.iter().map(|d| d.norm()).collect();
        let phases: Vec<f64> = dev.iter().map(|d| wrap_phase(d.arg())).collect();
        Self::from_samples(amplitudes, phases, boundary)
    }

    pub fn from_samples(amplitudes: Vec<f64>, phases: Vec<f64>, boundary: KdeBoundary) -> Self {
        let h_a = silverman_bandwidth(&amplitudes);
        let h_phi = silverman_bandwidth(&phases);
        Self { amplitudes, phases, h_a, h_phi, boundary, phase_model: PhaseModel::Kernel }
    }

    /// Amplitude-only map with a single kernel at zero deviation: likelihood
    /// falls monotonically with distance.
    pub fn isotropic(h: f64) -> Self {
        Self {
            amplitudes: vec![0.0],
            phases: vec![0.0],
            h_a: h,
            h_phi: 1.0,
            boundary: KdeBoundary::ReflectWrap,
            phase_model: PhaseModel::Uniform,
        }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn density(&self, a: f64, phi: f64) -> f64 {
        let norm_a = 1.0 / ((2.0 * PI).sqrt() * self.h_a);
        let norm_p = 1.0 / ((2.0 * PI).sqrt() * self.h_phi);
        let reflect = self.boundary == KdeBoundary::ReflectWrap;
        let mut sum = 0.0;
        for (ai, pi_) in self.amplitudes.iter().zip(&self.phases) {
            let mut ka = gauss(a - ai, self.h_a);
            if reflect {
                ka += gauss(a + ai, self.h_a);
            }
            let kp = match self.phase_model {
                PhaseModel::Uniform => 1.0 / (2.0 * PI * norm_p),
                PhaseModel::Kernel => {
                    let d = phi - pi_;
                    let mut k = gauss(d, self.h_phi);
                    if reflect {
                        k += gauss(d - 2.0 * PI, self.h_phi) + gauss(d + 2.0 * PI, self.h_phi);
                    }
                    k
                }
            };
            sum += ka * kp;
        }
        sum * norm_a * norm_p / self.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseMap {
    pub mode: NoiseMapMode,
    /// Data subcarriers in the order of `kdes`.
    pub subcarriers: Vec<i32>,
    pub kdes: Vec<SubcarrierKde>,
    /// Channel estimate per data subcarrier (ones in raw mode).
    pub channel: Vec<Complex64>,
}

/// Least-squares channel estimate on every FFT bin: mean of Y / X over all
/// training copies (zero where the training field is empty).
pub fn estimate_channel(ltf: &[SymbolCopies], cfg: &FrameConfig) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); cfg.nfft];
    let count = ltf.iter().map(SymbolCopies::g).sum::<usize>() as f64;
    for &(k, x) in &cfg.ltf_tones {
        let b = cfg.bin(k);
        let s: Complex64 = ltf.iter().flat_map(|s| s.copies.iter()).map(|c| c[b] / x).sum();
        h[b] = s / count;
    }
    h
}

pub fn build_noise_map(ltf: &[SymbolCopies], cfg: &FrameConfig, mode: NoiseMapMode, boundary: KdeBoundary) -> Result<NoiseMap> {
    let per_sub = ltf.iter().map(SymbolCopies::g).sum::<usize>();
    let needed = 2 * ltf.first().map_or(1, SymbolCopies::g);
    if ltf.len() < 2 || per_sub < needed.max(2) {
        return Err(Error::InsufficientSamples { needed: needed.max(2), available: per_sub });
    }
    let h = estimate_channel(ltf, cfg);
    let mut kdes = Vec::with_capacity(cfg.data_subcarriers.len());
    let mut channel = Vec::with_capacity(cfg.data_subcarriers.len());
    for &k in &cfg.data_subcarriers {
        let b = cfg.bin(k);
        let x = cfg.ltf_value(k).ok_or_else(|| Error::Config(format!("no training tone on subcarrier {k}")))?;
        let hk = match mode {
            NoiseMapMode::RawDeviation => Complex64::new(1.0, 0.0),
            NoiseMapMode::EqualizedResidual => h[b],
        };
        let dev: Vec<Complex64> = ltf.iter().flat_map(|s| s.copies.iter()).map(|c| c[b] / hk - x).collect();
        kdes.push(SubcarrierKde::from_deviations(&dev, boundary));
        channel.push(hk);
    }
    Ok(NoiseMap { mode, subcarriers: cfg.data_subcarriers.clone(), kdes, channel })
}

impl NoiseMap {
    /// Amplitude-only map with bandwidth `h` on every subcarrier.
    pub fn isotropic(cfg: &FrameConfig, h: f64, channel: Vec<Complex64>) -> Self {
        Self {
            mode: NoiseMapMode::EqualizedResidual,
            subcarriers: cfg.data_subcarriers.clone(),
            kdes: vec![SubcarrierKde::isotropic(h); cfg.data_subcarriers.len()],
            channel,
        }
    }

    /// Deviation of observation `y` on data subcarrier `idx` from candidate `p`.
    pub fn deviation(&self, idx: usize, y: Complex64, p: Complex64) -> Complex64 {
        y / self.channel[idx] - p
    }

    pub fn likelihood(&self, idx: usize, y: Complex64, p: Complex64) -> f64 {
        let d = self.deviation(idx, y, p);
        self.kdes[idx].density(d.norm(), wrap_phase(d.arg())).max(DENSITY_FLOOR)
    }
}

/// Per data subcarrier, the constellation index maximising the sum of log
/// likelihoods over all copies; ties go to the lowest index.
pub fn decode_joint_ml(copies: &SymbolCopies, map: &NoiseMap, scheme: Scheme, cfg: &FrameConfig) -> Vec<usize> {
    let points = scheme.points();
    map.subcarriers
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            let b = cfg.bin(k);
            let mut best = (0, f64::NEG_INFINITY);
            for (pi_, p) in points.iter().enumerate() {
                let score: f64 = copies.copies.iter().map(|c| map.likelihood(idx, c[b], *p).ln()).sum();
                if score > best.1 {
                    best = (pi_, score);
                }
            }
            best.0
        })
        .collect()
}

/// Equalise each copy, average, and slice.
pub fn decode_average_nn(copies: &SymbolCopies, channel: &[Complex64], scheme: Scheme, cfg: &FrameConfig) -> Vec<usize> {
    let g = copies.g() as f64;
    cfg.data_subcarriers
        .iter()
        .map(|&k| {
            let b = cfg.bin(k);
            let avg: Complex64 = copies.copies.iter().map(|c| c[b] / channel[b]).sum::<Complex64>() / g;
            nearest_index(avg, scheme)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::nearest_point;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn cn<R: Rng>(rng: &mut R, sd: f64) -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * (sd / 2f64.sqrt())
    }

    /// Literal unbounded product-kernel sum, evaluated term by term.
    fn eq7(samples: &[(f64, f64)], h_a: f64, h_p: f64, a: f64, phi: f64) -> f64 {
        let mut s = 0.0;
        for (ai, pi_) in samples {
            let ka = (1.0 / (2.0 * PI).sqrt()) * (-((a - ai) / (2f64.sqrt() * h_a)).powi(2)).exp() / h_a;
            let kp = (1.0 / (2.0 * PI).sqrt()) * (-((phi - pi_) / (2f64.sqrt() * h_p)).powi(2)).exp() / h_p;
            s += ka * kp;
        }
        s / samples.len() as f64
    }

    fn integrate(kde: &SubcarrierKde, a_max: f64) -> f64 {
        let (na, np) = (800, 800);
        let da = a_max / na as f64;
        let dp = 2.0 * PI / np as f64;
        let mut s = 0.0;
        for i in 0..na {
            for j in 0..np {
                s += kde.density((i as f64 + 0.5) * da, -PI + (j as f64 + 0.5) * dp);
            }
        }
        s * da * dp
    }

    #[test]
    fn single_sample_unit_bandwidth_peak() {
        let kde = SubcarrierKde { amplitudes: vec![5.0], phases: vec![0.0], h_a: 1.0, h_phi: 1.0, boundary: KdeBoundary::None, phase_model: PhaseModel::Kernel };
        assert!((kde.density(5.0, 0.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn two_sample_map_matches_direct_sum() {
        let samples = [(0.3, 0.4), (0.1, -2.0)];
        let kde = SubcarrierKde {
            amplitudes: samples.iter().map(|s| s.0).collect(),
            phases: samples.iter().map(|s| s.1).collect(),
            h_a: 0.2,
            h_phi: 0.7,
            boundary: KdeBoundary::None,
            phase_model: PhaseModel::Kernel,
        };
        for &(a, p) in &[(0.0, 0.0), (0.25, 0.5), (1.0, -3.0), (0.12, -1.9)] {
            assert!((kde.density(a, p) - eq7(&samples, 0.2, 0.7, a, p)).abs() < 1e-14);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dev: Vec<Complex64> = (0..16).map(|_| cn(&mut rng, 0.3)).collect();
        let kde = SubcarrierKde::from_deviations(&dev, KdeBoundary::ReflectWrap);
        let a_max = kde.amplitudes.iter().cloned().fold(0.0, f64::max) + 8.0 * kde.h_a;
        assert!((integrate(&kde, a_max) - 1.0).abs() < 1e-2);
        let iso = SubcarrierKde::isotropic(0.2);
        assert!((integrate(&iso, 2.0) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn kde_marginal_std_tracks_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sigma = 0.2;
        let a: Vec<f64> = (0..1000).map(|_| 3.0 + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
        let p: Vec<f64> = (0..1000).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect();
        let kde = SubcarrierKde::from_samples(a, p, KdeBoundary::None);
        // Marginal over amplitude by numerical integration.
        let (lo, hi, n) = (1.5, 4.5, 600);
        let da = (hi - lo) / n as f64;
        let marg: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * da;
                let m: f64 = (0..400).map(|j| kde.density(x, -1.5 + (j as f64 + 0.5) * 3.0 / 400.0)).sum::<f64>() * 3.0 / 400.0;
                (x, m)
            })
            .collect();
        let mass: f64 = marg.iter().map(|(_, m)| m * da).sum();
        let mean: f64 = marg.iter().map(|(x, m)| x * m * da).sum::<f64>() / mass;
        let var: f64 = marg.iter().map(|(x, m)| (x - mean).powi(2) * m * da).sum::<f64>() / mass;
        assert!((var.sqrt() / sigma - 1.0).abs() < 0.1, "{}", var.sqrt());
    }

    #[test]
    fn noiseless_map_peaks_at_origin() {
        let cfg = FrameConfig::default();
        let ltf_bins = cfg.ltf_bins();
        let ltf: Vec<SymbolCopies> = (0..2).map(|i| SymbolCopies { copies: vec![ltf_bins.clone(); 4], symbol_index: i - 2 }).collect();
        let map = build_noise_map(&ltf, &cfg, NoiseMapMode::RawDeviation, KdeBoundary::ReflectWrap).unwrap();
        for kde in &map.kdes {
            assert!(kde.amplitudes.iter().all(|a| *a == 0.0));
            assert!(kde.phases.iter().all(|p| *p == 0.0));
            assert_eq!(kde.h_a, BANDWIDTH_FLOOR);
            assert!(kde.density(0.0, 0.0) > kde.density(0.01, 0.0));
            assert!(kde.density(0.0, 0.0) > kde.density(0.0, 0.01));
        }
        let one = vec![ltf[0].clone()];
        assert!(matches!(build_noise_map(&one, &cfg, NoiseMapMode::RawDeviation, KdeBoundary::None), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn joint_ml_pairs_and_identity() {
        let cfg = FrameConfig::default();
        let map = NoiseMap::isotropic(&cfg, 0.3, vec![Complex64::new(1.0, 0.0); 52]);
        let pts = Scheme::Qam16.points();
        let delta = Complex64::new(0.2, -0.1);
        let mut bins = [vec![Complex64::new(0.0, 0.0); 64], vec![Complex64::new(0.0, 0.0); 64]];
        for (j, k) in cfg.data_subcarriers.iter().enumerate() {
            let p = pts[j % 16];
            bins[0][cfg.bin(*k)] = p + delta;
            bins[1][cfg.bin(*k)] = p - delta;
        }
        let copies = SymbolCopies { copies: bins.to_vec(), symbol_index: 0 };
        let d = decode_joint_ml(&copies, &map, Scheme::Qam16, &cfg);
        for (j, idx) in d.iter().enumerate() {
            assert_eq!(*idx, j % 16);
        }
    }

    #[test]
    fn joint_ml_matches_brute_force_product() {
        // QPSK, G = 4, fully specified KDE maps with literal unbounded kernels.
        let cfg = FrameConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = 4;
        let ltf_bins = cfg.ltf_bins();
        let ltf: Vec<SymbolCopies> = (0..2)
            .map(|i| SymbolCopies { copies: (0..g).map(|_| ltf_bins.iter().map(|x| x + cn(&mut rng, 0.4)).collect()).collect(), symbol_index: i - 2 })
            .collect();
        let map = build_noise_map(&ltf, &cfg, NoiseMapMode::RawDeviation, KdeBoundary::None).unwrap();
        let pts = Scheme::Qpsk.points();
        for _ in 0..1000 {
            let copies = SymbolCopies {
                copies: (0..g)
                    .map(|_| {
                        let mut v = vec![Complex64::new(0.0, 0.0); 64];
                        for k in &cfg.data_subcarriers {
                            v[cfg.bin(*k)] = pts[rng.random_range(0..4)] + cn(&mut rng, 0.5);
                        }
                        v
                    })
                    .collect(),
                symbol_index: 0,
            };
            let got = decode_joint_ml(&copies, &map, Scheme::Qpsk, &cfg);
            for (idx, k) in cfg.data_subcarriers.iter().enumerate() {
                let kde = &map.kdes[idx];
                let samples: Vec<(f64, f64)> = kde.amplitudes.iter().cloned().zip(kde.phases.iter().cloned()).collect();
                let mut best = (0, f64::NEG_INFINITY);
                for (pi_, p) in pts.iter().enumerate() {
                    let mut s = 0.0;
                    for c in &copies.copies {
                        let d = c[cfg.bin(*k)] - p;
                        s += eq7(&samples, kde.h_a, kde.h_phi, d.norm(), d.arg()).max(DENSITY_FLOOR).ln();
                    }
                    if s > best.1 {
                        best = (pi_, s);
                    }
                }
                assert_eq!(got[idx], best.0);
            }
        }
    }

    #[test]
    fn g1_symmetric_map_equals_nearest_neighbour() {
        let cfg = FrameConfig::default();
        let map = NoiseMap::isotropic(&cfg, 0.25, vec![Complex64::new(1.0, 0.0); 52]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for scheme in Scheme::ALL {
            for _ in 0..200 {
                let mut v = vec![Complex64::new(0.0, 0.0); 64];
                for k in &cfg.data_subcarriers {
                    v[cfg.bin(*k)] = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
                }
                let copies = SymbolCopies { copies: vec![v.clone()], symbol_index: 0 };
                let d = decode_joint_ml(&copies, &map, scheme, &cfg);
                let avg = decode_average_nn(&copies, &vec![Complex64::new(1.0, 0.0); 64], scheme, &cfg);
                for (j, k) in cfg.data_subcarriers.iter().enumerate() {
                    let nn = nearest_point(v[cfg.bin(*k)], scheme).0;
                    assert_eq!(d[j], nn);
                    assert_eq!(avg[j], nn);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn wrap_phase_in_range(p in -100.0f64..100.0) {
            let w = wrap_phase(p);
            prop_assert!(w > -PI && w <= PI);
            prop_assert!(((p - w) / (2.0 * PI) - ((p - w) / (2.0 * PI)).round()).abs() < 1e-9);
        }

        #[test]
        fn isotropic_likelihood_orders_by_distance(y_re in -2.0f64..2.0, y_im in -2.0f64..2.0) {
            let cfg = FrameConfig::default();
            let map = NoiseMap::isotropic(&cfg, 0.4, vec![Complex64::new(1.0, 0.0); 52]);
            let y = Complex64::new(y_re, y_im);
            let pts = Scheme::Qam16.points();
            for p in &pts {
                for q in &pts {
                    if (y - p).norm() + 1e-9 < (y - q).norm() {
                        prop_assert!(map.likelihood(0, y, *p) >= map.likelihood(0, y, *q));
                    }
                }
            }
        }
    }
}
