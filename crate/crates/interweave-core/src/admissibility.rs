//! Admissible detector operating regions.
//!
//! A `(p_fa, p_md)` pair is *weakly admissible* when the CR's presence does
//! not reduce total throughput (spectral efficiency factor at least one),
//! and *strongly admissible with loss factor gamma* when the PU keeps at
//! least a fraction `gamma` of its standalone rate. Zero false alarms is
//! the only operating line that is strongly admissible with no loss at all.

use crate::channel::CapacityConstants;
use crate::error::{Error, Result};
use crate::ratemodel::{nonideal_capacities, DetectionErrorPair};
use serde::{Deserialize, Serialize};

/// Fraction of its standalone rate the PU must retain, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossFactor(f64);

impl LossFactor {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::domain(format!("loss factor must be in (0, 1], got {gamma}")));
        }
        Ok(LossFactor(gamma))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Admissibility classification of one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityVerdict {
    /// Spectral efficiency factor at least one.
    pub weakly_admissible: bool,
    /// No PU loss at all (holds exactly on the `p_fa = 0` line).
    pub strongly_admissible: bool,
    /// PU keeps at least the supplied fraction of its standalone rate.
    pub strong_with_gamma: bool,
    /// Largest weakly admissible `p_md` at this `p_fa`, clamped to `[0, 1]`;
    /// `None` when no missed-detection probability is admissible.
    pub boundary_pmd: Option<f64>,
    /// The spectral efficiency factor itself (`+inf` at `p = 1`).
    pub efficiency: f64,
}

/// Unclamped weak-admissibility boundary
/// `1 - ((1-p)/p) ((A_p - B_p - B_c)/A_c) p_fa`.
///
/// May exceed one (every `p_md` admissible) or fall below zero (none).
pub fn weak_boundary_raw(consts: &CapacityConstants, p: f64, p_fa: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!(
            "weak boundary requires occupancy in (0, 1], got {p}"
        )));
    }
    if !(0.0..=1.0).contains(&p_fa) {
        return Err(Error::domain(format!("p_fa must be in [0, 1], got {p_fa}")));
    }
    if !(consts.cr_clear > 0.0) {
        return Err(Error::domain("weak boundary requires A_c > 0"));
    }
    let c = consts;
    let slope = ((1.0 - p) / p) * ((c.pu_clear - c.pu_interfered - c.cr_interfered) / c.cr_clear);
    Ok(1.0 - slope * p_fa)
}

/// Weak-admissibility boundary clamped to `[0, 1]`: the pair
/// `(p_fa, p_md)` is weakly admissible iff `p_md` is at most the raw
/// (unclamped) value.
pub fn weak_boundary(consts: &CapacityConstants, p: f64, p_fa: f64) -> Result<f64> {
    Ok(weak_boundary_raw(consts, p, p_fa)?.clamp(0.0, 1.0))
}

/// Result of the strong-admissibility false-alarm bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongFalseAlarmBound {
    /// Largest `p_fa` keeping the PU's loss within the factor.
    pub p_fa_max: f64,
    /// Set when `A_p <= B_p` (possible only with zero CR power): the PU
    /// cannot lose anything and every `p_fa` is admissible.
    pub degenerate: bool,
}

/// Largest strongly admissible `p_fa` for a loss factor:
/// `min(1, A_p (1 - gamma) / (A_p - B_p))`.
///
/// Independent of the occupancy; reaches the whole interval `[0, 1]` once
/// `gamma` drops to the full admissible point `B_p / A_p`.
pub fn strong_false_alarm_bound(
    consts: &CapacityConstants,
    gamma: LossFactor,
) -> StrongFalseAlarmBound {
    let c = consts;
    if c.pu_clear <= c.pu_interfered {
        return StrongFalseAlarmBound { p_fa_max: 1.0, degenerate: true };
    }
    let bound = (c.pu_clear - c.pu_clear * gamma.value()) / (c.pu_clear - c.pu_interfered);
    StrongFalseAlarmBound { p_fa_max: bound.min(1.0), degenerate: false }
}

/// The loss factor below which every `p_fa` in `[0, 1]` is strongly
/// admissible: `B_p / A_p`.
pub fn full_admissible_point(consts: &CapacityConstants) -> f64 {
    consts.pu_interfered / consts.pu_clear
}

/// Classify one operating point at occupancy `p`.
pub fn verdict(
    consts: &CapacityConstants,
    p: f64,
    err: DetectionErrorPair,
    gamma: LossFactor,
) -> Result<AdmissibilityVerdict> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("occupancy must be in [0, 1], got {p}")));
    }
    let breakdown = nonideal_capacities(consts, p, err)?;
    let efficiency = breakdown.efficiency.unwrap_or(f64::INFINITY);
    let weakly_admissible = if p >= 1.0 { true } else { efficiency >= 1.0 };
    // Strong admissibility with a loss factor reads only the PU's rate.
    let pu_reference = (1.0 - p) * consts.pu_ideal;
    let strong_with_gamma = breakdown.pu_rate >= gamma.value() * pu_reference;
    let strongly_admissible = err.p_fa == 0.0;
    let boundary_pmd = if p == 0.0 {
        if err.p_fa == 0.0 {
            Some(1.0)
        } else {
            None
        }
    } else {
        let raw = weak_boundary_raw(consts, p, err.p_fa)?;
        if raw < 0.0 {
            None
        } else {
            Some(raw.min(1.0))
        }
    };
    Ok(AdmissibilityVerdict {
        weakly_admissible,
        strongly_admissible,
        strong_with_gamma,
        boundary_pmd,
        efficiency,
    })
}

/// A lattice of verdicts over the unit square of operating points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityGrid {
    /// Points per axis.
    pub resolution: usize,
    /// Occupancy the grid was evaluated at.
    pub p: f64,
    /// Loss factor used for the strong-with-gamma verdicts.
    pub gamma: f64,
    /// Axis values, identical for `p_fa` and `p_md`: `i / (n - 1)`.
    pub axis: Vec<f64>,
    /// Row-major over `p_fa` (outer) then `p_md` (inner).
    pub verdicts: Vec<AdmissibilityVerdict>,
}

impl AdmissibilityGrid {
    /// Fraction of lattice points that are weakly admissible.
    pub fn weak_fraction(&self) -> f64 {
        let hits = self.verdicts.iter().filter(|v| v.weakly_admissible).count();
        hits as f64 / self.verdicts.len() as f64
    }

    /// Fraction of lattice points admissible under the loss factor.
    pub fn strong_gamma_fraction(&self) -> f64 {
        let hits = self.verdicts.iter().filter(|v| v.strong_with_gamma).count();
        hits as f64 / self.verdicts.len() as f64
    }

    /// Verdict at `(i_fa, i_md)` lattice indices.
    pub fn at(&self, i_fa: usize, i_md: usize) -> &AdmissibilityVerdict {
        &self.verdicts[i_fa * self.resolution + i_md]
    }
}

/// Evaluate the verdict lattice at resolution `n >= 2` (axis values
/// `0, 1/(n-1), ..., 1`). Analytic and deterministic.
pub fn admissibility_grid(
    consts: &CapacityConstants,
    p: f64,
    gamma: LossFactor,
    n: usize,
) -> Result<AdmissibilityGrid> {
    if n < 2 {
        return Err(Error::domain(format!("grid resolution must be >= 2, got {n}")));
    }
    let axis: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut verdicts = Vec::with_capacity(n * n);
    for &p_fa in &axis {
        for &p_md in &axis {
            let err = DetectionErrorPair::new(p_fa, p_md)?;
            verdicts.push(verdict(consts, p, err, gamma)?);
        }
    }
    Ok(AdmissibilityGrid { resolution: n, p, gamma: gamma.value(), axis, verdicts })
}
