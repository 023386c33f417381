//! ROC models for the three standard sensing schemes and their overlap
//! with the weak-admissibility region.
//!
//! Each detector defines a monotone nonincreasing trade-off
//! `p_md = f(p_fa)` at a given sensing-channel SNR. Intersecting the curve
//! with the weak-admissibility boundary tells which of its operating points
//! actually help the system.

use crate::admissibility::{verdict, LossFactor};
use crate::channel::CapacityConstants;
use crate::error::{Error, Result};
use crate::ratemodel::DetectionErrorPair;
use crate::specfun;
use serde::{Deserialize, Serialize};

/// Energy detector: compares the accumulated energy of `segments * samples`
/// observations against a threshold calibrated for the target false-alarm
/// probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyDetector {
    /// Number of disjoint averaging segments (L).
    pub segments: u32,
    /// Samples per segment (M = N / L).
    pub samples_per_segment: u32,
    /// Received PU signal power at the sensor, watts.
    pub power_pu: f64,
    /// Sensor noise variance, watts.
    pub noise_var: f64,
    /// Scale on the noncentrality `M L P_p / sigma^2`. The default 1.0 uses
    /// that product directly; 0.5 reproduces the halved convention some
    /// treatments adopt. Kept explicit so both readings stay testable.
    #[serde(default = "default_delta_scale")]
    pub delta_scale: f64,
}

fn default_delta_scale() -> f64 {
    1.0
}

impl EnergyDetector {
    pub fn new(segments: u32, samples_per_segment: u32, power_pu: f64, noise_var: f64) -> Self {
        EnergyDetector { segments, samples_per_segment, power_pu, noise_var, delta_scale: 1.0 }
    }
}

/// Matched filter: correlates against the known transmitted waveform of
/// energy `signal_energy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedFilterDetector {
    /// Energy of the transmitted signal (E).
    pub signal_energy: f64,
    /// Sensor noise variance, watts.
    pub noise_var: f64,
}

/// Magnitude-squared coherence detector on `segments` disjoint segment
/// pairs, with the true coherence between sensor and reference given by
/// `true_msc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MscDetector {
    /// Number of disjoint segments (L), at least 2.
    pub segments: u32,
    /// True magnitude-squared coherence under the signal hypothesis.
    pub true_msc: f64,
}

/// Detector kind tag, for labeling outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Energy,
    MatchedFilter,
    Msc,
}

impl DetectorKind {
    pub fn label(&self) -> &'static str {
        match self {
            DetectorKind::Energy => "energy",
            DetectorKind::MatchedFilter => "matched_filter",
            DetectorKind::Msc => "msc",
        }
    }
}

/// Any of the three supported detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detector {
    Energy(EnergyDetector),
    MatchedFilter(MatchedFilterDetector),
    Msc(MscDetector),
}

impl Detector {
    pub fn kind(&self) -> DetectorKind {
        match self {
            Detector::Energy(_) => DetectorKind::Energy,
            Detector::MatchedFilter(_) => DetectorKind::MatchedFilter,
            Detector::Msc(_) => DetectorKind::Msc,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Detector::Energy(d) => {
                if d.segments < 1 {
                    return Err(Error::domain("energy detector requires segments >= 1"));
                }
                if d.samples_per_segment < 1 {
                    return Err(Error::domain(
                        "energy detector requires samples_per_segment >= 1",
                    ));
                }
                if !(d.power_pu >= 0.0) {
                    return Err(Error::domain(format!(
                        "energy detector power_pu must be >= 0, got {}",
                        d.power_pu
                    )));
                }
                if !(d.noise_var > 0.0) {
                    return Err(Error::domain(format!(
                        "energy detector noise_var must be > 0, got {}",
                        d.noise_var
                    )));
                }
                if !(d.delta_scale > 0.0) {
                    return Err(Error::domain(format!(
                        "energy detector delta_scale must be > 0, got {}",
                        d.delta_scale
                    )));
                }
            }
            Detector::MatchedFilter(d) => {
                if !(d.signal_energy >= 0.0) {
                    return Err(Error::domain(format!(
                        "matched filter signal_energy must be >= 0, got {}",
                        d.signal_energy
                    )));
                }
                if !(d.noise_var > 0.0) {
                    return Err(Error::domain(format!(
                        "matched filter noise_var must be > 0, got {}",
                        d.noise_var
                    )));
                }
            }
            Detector::Msc(d) => {
                if d.segments < 2 {
                    return Err(Error::domain("MSC detector requires segments >= 2"));
                }
                if !(0.0..1.0).contains(&d.true_msc) {
                    return Err(Error::domain(format!(
                        "MSC detector true_msc must be in [0, 1), got {}",
                        d.true_msc
                    )));
                }
            }
        }
        Ok(())
    }

    /// Missed-detection probability at false-alarm probability `p_fa` in
    /// `(0, 1)`. Nonincreasing in `p_fa` for every detector.
    pub fn missed_detection(&self, p_fa: f64) -> Result<f64> {
        if !(p_fa > 0.0 && p_fa < 1.0) {
            return Err(Error::domain(format!("p_fa must be in (0, 1), got {p_fa}")));
        }
        self.validate()?;
        match self {
            Detector::Energy(d) => {
                // Threshold from the central chi-squared null distribution
                // (2L degrees of freedom), miss probability from the
                // noncentral one.
                let l = f64::from(d.segments);
                let m = f64::from(d.samples_per_segment);
                let threshold = 2.0 * specfun::gamma_p_inverse(l, 1.0 - p_fa)?;
                let delta = d.delta_scale * m * l * d.power_pu / d.noise_var;
                specfun::noncentral_chi2_cdf(threshold, 2.0 * l, delta)
            }
            Detector::MatchedFilter(d) => {
                let deflection = (d.signal_energy / d.noise_var).sqrt();
                Ok(1.0 - specfun::q_function(specfun::q_inverse(p_fa)? - deflection))
            }
            Detector::Msc(d) => {
                let l = f64::from(d.segments);
                let threshold = 1.0 - p_fa.powf(1.0 / (l - 1.0));
                specfun::msc_cdf(threshold, d.segments, d.true_msc)
            }
        }
    }
}

/// A sampled ROC curve, optionally annotated with per-point admissibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub kind: DetectorKind,
    /// `(p_fa, p_md)` pairs with `p_fa` strictly increasing.
    pub points: Vec<(f64, f64)>,
    /// Per-point weak-admissibility mask, parallel to `points`; `None`
    /// until [`admissible_arc`] fills it.
    pub admissible: Option<Vec<bool>>,
}

impl RocCurve {
    /// Fraction of sampled points that are admissible, if the mask is set.
    pub fn admissible_fraction(&self) -> Option<f64> {
        self.admissible.as_ref().map(|mask| {
            mask.iter().filter(|&&a| a).count() as f64 / mask.len().max(1) as f64
        })
    }
}

/// Default number of ROC sample points.
pub const DEFAULT_ROC_POINTS: usize = 200;

/// Default open-interval clip for the false-alarm axis.
pub const DEFAULT_PFA_MIN: f64 = 1e-4;
pub const DEFAULT_PFA_MAX: f64 = 1.0 - 1e-4;

/// A logit-spaced grid on `(lo, hi)` (dense near 0 and 1), strictly
/// increasing, with `n >= 2` points.
pub fn logit_grid(n: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain(format!("logit grid needs at least 2 points, got {n}")));
    }
    if !(lo > 0.0 && hi < 1.0 && lo < hi) {
        return Err(Error::domain(format!(
            "logit grid needs 0 < lo < hi < 1, got lo={lo}, hi={hi}"
        )));
    }
    let logit = |p: f64| (p / (1.0 - p)).ln();
    let (a, b) = (logit(lo), logit(hi));
    Ok((0..n)
        .map(|i| {
            let t = a + (b - a) * i as f64 / (n - 1) as f64;
            1.0 / (1.0 + (-t).exp())
        })
        .collect())
}

/// Sample a detector's ROC on the given false-alarm grid.
pub fn sample_roc(detector: &Detector, p_fa_grid: &[f64]) -> Result<RocCurve> {
    let mut points = Vec::with_capacity(p_fa_grid.len());
    let mut prev = f64::NEG_INFINITY;
    for &p_fa in p_fa_grid {
        if p_fa <= prev {
            return Err(Error::domain("p_fa grid must be strictly increasing"));
        }
        prev = p_fa;
        points.push((p_fa, detector.missed_detection(p_fa)?));
    }
    Ok(RocCurve { kind: detector.kind(), points, admissible: None })
}

/// Fill the curve's admissibility mask against a scenario: point `i` is
/// marked admissible when `(p_fa_i, p_md_i)` is weakly admissible at
/// occupancy `p`. Admissible stretches need not be contiguous.
pub fn admissible_arc(
    mut curve: RocCurve,
    consts: &CapacityConstants,
    p: f64,
) -> Result<RocCurve> {
    let gamma = LossFactor::new(1.0).expect("1.0 is a valid loss factor");
    let mut mask = Vec::with_capacity(curve.points.len());
    for &(p_fa, p_md) in &curve.points {
        let err = DetectionErrorPair::new(p_fa, p_md)?;
        mask.push(verdict(consts, p, err, gamma)?.weakly_admissible);
    }
    curve.admissible = Some(mask);
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{capacity_constants, FadingModel, SystemParams};
    use approx::assert_relative_eq;

    fn sensing_minus_24db() -> EnergyDetector {
        EnergyDetector::new(4, 64, 10_f64.powf(-2.4), 1.0)
    }

    #[test]
    fn logit_grid_shape() {
        let g = logit_grid(200, DEFAULT_PFA_MIN, DEFAULT_PFA_MAX).unwrap();
        assert_eq!(g.len(), 200);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_relative_eq!(g[0], 1e-4, max_relative = 1e-9);
        assert_relative_eq!(g[199], 1.0 - 1e-4, max_relative = 1e-9);
        // Denser near the ends than in the middle.
        assert!(g[1] - g[0] < g[100] - g[99]);
        assert!(logit_grid(1, 0.1, 0.9).is_err());
        assert!(logit_grid(10, 0.0, 0.9).is_err());
    }

    #[test]
    fn energy_detector_null_case_is_chance_diagonal() {
        // Zero received power: the threshold calibration is exact, so
        // p_md = 1 - p_fa through the central chi-squared round trip.
        let d = Detector::Energy(EnergyDetector::new(4, 64, 0.0, 1.0));
        for &p_fa in &[0.01, 0.1, 0.5, 0.9] {
            assert!((d.missed_detection(p_fa).unwrap() - (1.0 - p_fa)).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_detector_limits_and_monotonicity() {
        let d = Detector::Energy(sensing_minus_24db());
        // Always-alarm limit: threshold collapses, nothing is missed.
        assert!(d.missed_detection(1.0 - 1e-12).unwrap() < 1e-9);
        let grid = logit_grid(100, 1e-4, 1.0 - 1e-4).unwrap();
        let curve = sample_roc(&d, &grid).unwrap();
        assert!(curve.points.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
        // Proper detector: never worse than chance.
        assert!(curve.points.iter().all(|&(fa, md)| md <= 1.0 - fa + 1e-9));
    }

    #[test]
    fn energy_detector_delta_scale_readings_differ() {
        let mut half = sensing_minus_24db();
        half.delta_scale = 0.5;
        let full = Detector::Energy(sensing_minus_24db());
        let half = Detector::Energy(half);
        // The halved noncentrality reading is strictly weaker.
        let (f, h) = (
            full.missed_detection(0.1).unwrap(),
            half.missed_detection(0.1).unwrap(),
        );
        assert!(h > f);
    }

    #[test]
    fn matched_filter_zero_energy_is_chance_diagonal() {
        let d = Detector::MatchedFilter(MatchedFilterDetector { signal_energy: 0.0, noise_var: 1.0 });
        for i in 1..40 {
            let p_fa = i as f64 / 40.0;
            assert!((d.missed_detection(p_fa).unwrap() - (1.0 - p_fa)).abs() < 1e-9);
        }
    }

    #[test]
    fn matched_filter_known_point_and_energy_limit() {
        // p_fa = 0.5, E/sigma^2 = 1: p_md = 1 - Q(-1).
        let d = Detector::MatchedFilter(MatchedFilterDetector { signal_energy: 1.0, noise_var: 1.0 });
        assert_relative_eq!(
            d.missed_detection(0.5).unwrap(),
            0.158_655_253_931_457_05,
            max_relative = 1e-9
        );
        // Large energy: misses vanish.
        let strong =
            Detector::MatchedFilter(MatchedFilterDetector { signal_energy: 400.0, noise_var: 1.0 });
        assert!(strong.missed_detection(0.1).unwrap() < 1e-12);
    }

    #[test]
    fn matched_filter_dominates_energy_detector() {
        // Coherent detection beats noncoherent at the same received SNR.
        let snr = 10_f64.powf(-2.4);
        let ed = Detector::Energy(EnergyDetector::new(4, 64, snr, 1.0));
        // Matched filter over the same N = L*M samples: E = N * P_p.
        let mf = Detector::MatchedFilter(MatchedFilterDetector {
            signal_energy: 256.0 * snr,
            noise_var: 1.0,
        });
        for &p_fa in &[0.01, 0.05, 0.1, 0.3, 0.6, 0.9] {
            assert!(
                mf.missed_detection(p_fa).unwrap() <= ed.missed_detection(p_fa).unwrap() + 1e-12
            );
        }
    }

    #[test]
    fn msc_null_coherence_is_chance_diagonal() {
        for &l in &[2u32, 8] {
            let d = Detector::Msc(MscDetector { segments: l, true_msc: 0.0 });
            for i in 1..20 {
                let p_fa = i as f64 / 20.0;
                assert!(
                    (d.missed_detection(p_fa).unwrap() - (1.0 - p_fa)).abs() < 1e-9,
                    "L={l}, p_fa={p_fa}"
                );
            }
        }
    }

    #[test]
    fn msc_nonincreasing_and_p_fa_one_limit() {
        let d = Detector::Msc(MscDetector { segments: 32, true_msc: 0.3 });
        let grid = logit_grid(100, 1e-4, 1.0 - 1e-4).unwrap();
        let curve = sample_roc(&d, &grid).unwrap();
        assert!(curve.points.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
        assert!(d.missed_detection(1.0 - 1e-9).unwrap() < 1e-6);
    }

    #[test]
    fn detector_parameter_validation() {
        let bad = Detector::Msc(MscDetector { segments: 1, true_msc: 0.0 });
        assert!(bad.missed_detection(0.5).is_err());
        let bad = Detector::Energy(EnergyDetector::new(4, 64, -1.0, 1.0));
        assert!(bad.missed_detection(0.5).is_err());
        let good = Detector::MatchedFilter(MatchedFilterDetector { signal_energy: 1.0, noise_var: 1.0 });
        assert!(good.missed_detection(0.0).is_err());
        assert!(good.missed_detection(1.0).is_err());
    }

    #[test]
    fn admissible_arc_interference_regime_admits_all() {
        // Symmetric 0 dB scenario: the whole unit square is weakly
        // admissible, so every ROC point qualifies.
        let params = SystemParams::new(0.2, 1.0, 1.0, 1.0).unwrap();
        let consts = capacity_constants(&params, FadingModel::RayleighUnit).unwrap();
        let d = Detector::Energy(sensing_minus_24db());
        let grid = logit_grid(50, 1e-4, 1.0 - 1e-4).unwrap();
        let curve = admissible_arc(sample_roc(&d, &grid).unwrap(), &consts, 0.2).unwrap();
        assert_eq!(curve.admissible_fraction(), Some(1.0));
    }

    #[test]
    fn admissible_arc_ordering_in_steep_boundary_scenario() {
        // High PU SNR and high RS make the weak boundary cut through the
        // ROC plane; stronger detectors keep a larger admissible fraction.
        let params = SystemParams::new(0.2, 10_000.0, 100.0, 1.0).unwrap();
        let consts = capacity_constants(&params, FadingModel::RayleighUnit).unwrap();
        let grid = logit_grid(200, 1e-4, 1.0 - 1e-4).unwrap();
        let snr = 10_f64.powf(-2.4);

        let mf = Detector::MatchedFilter(MatchedFilterDetector {
            signal_energy: 36.0,
            noise_var: 1.0,
        });
        let msc = Detector::Msc(MscDetector { segments: 32, true_msc: 0.5 });
        let ed = Detector::Energy(EnergyDetector::new(4, 64, snr, 1.0));

        let frac = |d: &Detector| {
            admissible_arc(sample_roc(d, &grid).unwrap(), &consts, 0.2)
                .unwrap()
                .admissible_fraction()
                .unwrap()
        };
        let (f_mf, f_msc, f_ed) = (frac(&mf), frac(&msc), frac(&ed));
        assert!(f_mf >= f_msc && f_msc >= f_ed, "mf={f_mf} msc={f_msc} ed={f_ed}");
        assert!(f_mf > f_ed, "ordering must be strict end to end");
        // In this geometry no detector can keep its whole curve admissible:
        // past the boundary's zero crossing every point is excluded.
        assert!(f_mf < 1.0);
    }
}
