//! Rate regions, sum capacity, and the spectral efficiency factor for ideal
//! and error-prone sensing.
//!
//! Each slot falls in one of four outcomes depending on the true channel
//! state and the CR's detection of it; the outcome probabilities weight the
//! per-outcome link capacities into the average rates both users achieve.
//! The spectral efficiency factor is the ratio of the two users' sum
//! capacity to what the PU would achieve alone.

use crate::channel::CapacityConstants;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Detector operating point.
///
/// `p_fa` is the probability the CR declares the channel free while the PU
/// occupies it (causes interference); `p_md` is the probability it declares
/// the channel occupied while it is free (loses the opportunity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionErrorPair {
    pub p_fa: f64,
    pub p_md: f64,
}

impl DetectionErrorPair {
    /// Validated constructor: both probabilities in `[0, 1]`.
    pub fn new(p_fa: f64, p_md: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_fa) {
            return Err(Error::domain(format!("p_fa must be in [0, 1], got {p_fa}")));
        }
        if !(0.0..=1.0).contains(&p_md) {
            return Err(Error::domain(format!("p_md must be in [0, 1], got {p_md}")));
        }
        Ok(DetectionErrorPair { p_fa, p_md })
    }

    /// The error-free operating point.
    pub const PERFECT: DetectionErrorPair = DetectionErrorPair { p_fa: 0.0, p_md: 0.0 };
}

/// Probabilities of the four per-slot outcomes (they sum to one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    /// Channel free, detected free: the CR transmits alone.
    pub cr_only: f64,
    /// Channel busy, detected free: both transmit and interfere.
    pub collision: f64,
    /// Channel free, detected busy: nobody transmits.
    pub wasted: f64,
    /// Channel busy, detected busy: the PU transmits alone.
    pub pu_only: f64,
}

impl OutcomeProbabilities {
    pub fn as_array(&self) -> [f64; 4] {
        [self.cr_only, self.collision, self.wasted, self.pu_only]
    }
}

/// Distribution of the four detection outcomes for occupancy `p` (the
/// probability the channel is free) and a detector operating point.
pub fn outcome_distribution(p: f64, err: DetectionErrorPair) -> Result<OutcomeProbabilities> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("occupancy must be in [0, 1], got {p}")));
    }
    Ok(OutcomeProbabilities {
        cr_only: p * (1.0 - err.p_md),
        collision: (1.0 - p) * err.p_fa,
        wasted: p * err.p_md,
        pu_only: (1.0 - p) * (1.0 - err.p_fa),
    })
}

/// Which model a rate region belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Ideal,
    NonIdeal,
}

/// An achievable `(R_cr, R_pu)` region: a convex polygon in the nonnegative
/// quadrant, as a counterclockwise vertex list starting at the origin.
/// Zero-area (segment or point) regions are permitted and flagged by
/// [`RateRegionPolygon::is_degenerate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegionPolygon {
    /// `(cr_rate, pu_rate)` pairs, counterclockwise from the origin.
    pub vertices: Vec<(f64, f64)>,
    pub kind: RegionKind,
}

impl RateRegionPolygon {
    fn from_raw(kind: RegionKind, raw: Vec<(f64, f64)>) -> Self {
        // Drop consecutive duplicates (closed implicitly; first vertex is
        // the origin by construction).
        let mut vertices: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for v in raw {
            if vertices.last() != Some(&v) {
                vertices.push(v);
            }
        }
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        RateRegionPolygon { vertices, kind }
    }

    /// Largest CR rate in the region.
    pub fn cr_axis_cut(&self) -> f64 {
        self.vertices.iter().map(|v| v.0).fold(0.0, f64::max)
    }

    /// Largest PU rate in the region.
    pub fn pu_axis_cut(&self) -> f64 {
        self.vertices.iter().map(|v| v.1).fold(0.0, f64::max)
    }

    /// Signed area (shoelace); nonnegative for counterclockwise order.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut twice = 0.0;
        for i in 0..n {
            let (x0, y0) = self.vertices[i];
            let (x1, y1) = self.vertices[(i + 1) % n];
            twice += x0 * y1 - x1 * y0;
        }
        0.5 * twice
    }

    /// True when the region has collapsed to a segment or a point.
    pub fn is_degenerate(&self) -> bool {
        self.area() == 0.0
    }

    /// Whether `(cr, pu)` lies inside or on the boundary, within `tol`.
    ///
    /// For degenerate regions this degrades to a distance check against the
    /// vertex chain.
    pub fn contains_point(&self, cr: f64, pu: f64, tol: f64) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        if n == 1 {
            let (x, y) = self.vertices[0];
            return (cr - x).abs() <= tol && (pu - y).abs() <= tol;
        }
        if self.is_degenerate() {
            // Distance to any edge of the chain.
            return (0..n - 1).any(|i| {
                segment_distance(self.vertices[i], self.vertices[i + 1], (cr, pu)) <= tol
            });
        }
        // Convex, counterclockwise: inside iff left of (or on) every edge.
        (0..n).all(|i| {
            let (x0, y0) = self.vertices[i];
            let (x1, y1) = self.vertices[(i + 1) % n];
            let cross = (x1 - x0) * (pu - y0) - (y1 - y0) * (cr - x0);
            let scale = (x1 - x0).abs().max((y1 - y0).abs()).max(1.0);
            cross >= -tol * scale
        })
    }

    /// Whether every vertex of `other` lies inside this region (sufficient
    /// for containment of convex polygons).
    pub fn contains_polygon(&self, other: &RateRegionPolygon, tol: f64) -> bool {
        other.vertices.iter().all(|&(cr, pu)| self.contains_point(cr, pu, tol))
    }
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (ax, ay) = a;
    let (bx, by) = b;
    let (px, py) = p;
    let dx = bx - ax;
    let dy = by - ay;
    let len_sq = dx * dx + dy * dy;
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((px - ax) * dx + (py - ay) * dy) / len_sq).clamp(0.0, 1.0)
    };
    let (cx, cy) = (ax + t * dx, ay + t * dy);
    ((px - cx).powi(2) + (py - cy).powi(2)).sqrt()
}

fn check_probability(value: f64, name: &str) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::domain(format!("{name} must be in [0, 1], got {value}")));
    }
    Ok(value)
}

/// Rate region slice at a fixed occupancy `p` under perfect detection: the
/// triangle with axis cuts `p * C_c` on the CR axis and `(1 - p) * C_p` on
/// the PU axis (the two single-user operating points, time shared).
pub fn ideal_rate_region(consts: &CapacityConstants, p: f64) -> Result<RateRegionPolygon> {
    check_probability(p, "occupancy")?;
    let cr_cut = p * consts.cr_ideal;
    let pu_cut = (1.0 - p) * consts.pu_ideal;
    Ok(RateRegionPolygon::from_raw(
        RegionKind::Ideal,
        vec![(0.0, 0.0), (cr_cut, 0.0), (0.0, pu_cut)],
    ))
}

/// Rate region slice at a fixed occupancy `p` with detection errors.
///
/// The PU axis cut is `(1-p) * C2(p_fa)` with
/// `C2 = (1 - p_fa) A_p + p_fa B_p`; the CR extent is
/// `(1-p) * C1'(p_fa) + p * C1(p_md)` with `C1' = p_fa B_c` and
/// `C1 = (1 - p_md) A_c`. The PU rate is flat for CR rates below
/// `(1-p) * C1'` (that CR traffic rides on collision slots, which cost the
/// PU the same whether or not the CR uses them), then trades off linearly.
///
/// With perfect detection this reproduces [`ideal_rate_region`] exactly.
pub fn nonideal_rate_region(
    consts: &CapacityConstants,
    p: f64,
    err: DetectionErrorPair,
) -> Result<RateRegionPolygon> {
    check_probability(p, "occupancy")?;
    let c1 = (1.0 - err.p_md) * consts.cr_clear;
    let c1_prime = err.p_fa * consts.cr_interfered;
    let c2 = (1.0 - err.p_fa) * consts.pu_clear + err.p_fa * consts.pu_interfered;
    let cr_flat = (1.0 - p) * c1_prime;
    let cr_max = (1.0 - p) * c1_prime + p * c1;
    let pu_max = (1.0 - p) * c2;
    Ok(RateRegionPolygon::from_raw(
        RegionKind::NonIdeal,
        vec![(0.0, 0.0), (cr_max, 0.0), (cr_flat, pu_max), (0.0, pu_max)],
    ))
}

/// The full achievable region under perfect detection, enveloping all
/// occupancies: the triangle with axis cuts `C_c` and `C_p`.
pub fn ideal_rate_region_envelope(consts: &CapacityConstants) -> RateRegionPolygon {
    RateRegionPolygon::from_raw(
        RegionKind::Ideal,
        vec![(0.0, 0.0), (consts.cr_ideal, 0.0), (0.0, consts.pu_ideal)],
    )
}

/// The full achievable region with detection errors, enveloping all
/// occupancies: flat top from `(0, C2)` to the kink `(C1', C2)`, then a
/// straight frontier down to `(C1, 0)`.
///
/// This is the occupancy-envelope of [`nonideal_rate_region`]; its CR axis
/// cut depends only on `p_md` and its PU axis cut only on `p_fa`.
pub fn nonideal_rate_region_envelope(
    consts: &CapacityConstants,
    err: DetectionErrorPair,
) -> RateRegionPolygon {
    let c1 = (1.0 - err.p_md) * consts.cr_clear;
    let c1_prime = err.p_fa * consts.cr_interfered;
    let c2 = (1.0 - err.p_fa) * consts.pu_clear + err.p_fa * consts.pu_interfered;
    let raw = if c1 >= c1_prime {
        vec![(0.0, 0.0), (c1, 0.0), (c1_prime, c2), (0.0, c2)]
    } else {
        // Collision-slot rate alone exceeds the opportunistic rate: every
        // occupancy trade-off is dominated by full occupancy and the
        // region is the rectangle it spans.
        vec![(0.0, 0.0), (c1_prime, 0.0), (c1_prime, c2), (0.0, c2)]
    };
    RateRegionPolygon::from_raw(RegionKind::NonIdeal, raw)
}

/// Average rates both users achieve under detection errors, their sum, and
/// the spectral efficiency factor (undefined at `p = 1`, where the PU-alone
/// reference rate vanishes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityBreakdown {
    /// PU average rate (C_p').
    pub pu_rate: f64,
    /// CR average rate (C_c').
    pub cr_rate: f64,
    /// Sum of the two.
    pub sum: f64,
    /// Spectral efficiency factor; `None` at `p = 1`.
    pub efficiency: Option<f64>,
}

/// Average capacities of both users at occupancy `p` under detection
/// errors:
///
/// ```text
/// C_p' = (1-p) ((1 - p_fa) A_p + p_fa B_p)
/// C_c' = p (1 - p_md) A_c + (1-p) p_fa B_c
/// ```
pub fn nonideal_capacities(
    consts: &CapacityConstants,
    p: f64,
    err: DetectionErrorPair,
) -> Result<CapacityBreakdown> {
    check_probability(p, "occupancy")?;
    let cr_rate = p * (1.0 - err.p_md) * consts.cr_clear + (1.0 - p) * err.p_fa * consts.cr_interfered;
    let pu_rate = (1.0 - p) * ((1.0 - err.p_fa) * consts.pu_clear + err.p_fa * consts.pu_interfered);
    let sum = cr_rate + pu_rate;
    let efficiency = if p < 1.0 {
        Some(sum / ((1.0 - p) * consts.pu_ideal))
    } else {
        None
    };
    Ok(CapacityBreakdown { pu_rate, cr_rate, sum, efficiency })
}

/// Sum capacity of the two users, in the grouped affine-in-`p` form. Agrees
/// with the sum of [`nonideal_capacities`] to rounding error.
pub fn sum_capacity(consts: &CapacityConstants, p: f64, err: DetectionErrorPair) -> Result<f64> {
    check_probability(p, "occupancy")?;
    let c = consts;
    Ok(
        -c.cr_clear * p * err.p_md
            - (1.0 - p) * (c.pu_clear - c.pu_interfered - c.cr_interfered) * err.p_fa
            + p * c.cr_clear
            + (1.0 - p) * c.pu_clear,
    )
}

/// The occupancy maximizing [`sum_capacity`] for a fixed operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupancyChoice {
    /// Sum capacity decreases with `p`: keep the channel occupied (`p = 0`).
    AlwaysBusy,
    /// Sum capacity increases with `p`: keep the channel free (`p = 1`).
    AlwaysFree,
    /// Sum capacity is flat in `p`: any occupancy is optimal.
    Any,
}

/// Result of optimizing the sum capacity over occupancy: the choice and the
/// slope of the (affine) sum capacity in `p` that determined it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalOccupancy {
    pub choice: OccupancyChoice,
    /// d(sum capacity)/dp.
    pub slope: f64,
}

/// Slope ties within this margin count as indifference; the slope is a sum
/// of order-one rates, so anything smaller is rounding noise.
pub const OCCUPANCY_TIE_EPS: f64 = 1e-12;

/// Maximize the sum capacity over occupancy for a fixed operating point.
/// The sum capacity is affine in `p`, so the optimum sits at an endpoint
/// unless the slope vanishes.
pub fn optimal_occupancy(consts: &CapacityConstants, err: DetectionErrorPair) -> OptimalOccupancy {
    let c = consts;
    let slope = (c.pu_clear - c.pu_interfered - c.cr_interfered) * err.p_fa - c.cr_clear * err.p_md
        + c.cr_clear
        - c.pu_clear;
    let choice = if slope.abs() <= OCCUPANCY_TIE_EPS {
        OccupancyChoice::Any
    } else if slope > 0.0 {
        OccupancyChoice::AlwaysFree
    } else {
        OccupancyChoice::AlwaysBusy
    };
    OptimalOccupancy { choice, slope }
}

/// Spectral efficiency factor under perfect detection:
/// `1 + p C_c / ((1-p) C_p)`, always at least one.
///
/// Evaluated through the same arithmetic path as [`spectral_efficiency`] so
/// the two agree bit for bit at the perfect operating point.
pub fn spectral_efficiency_ideal(consts: &CapacityConstants, p: f64) -> Result<f64> {
    check_probability(p, "occupancy")?;
    if p >= 1.0 {
        return Err(Error::domain("spectral efficiency is unbounded at p = 1"));
    }
    if !(consts.pu_ideal > 0.0) {
        return Err(Error::domain("spectral efficiency requires C_p > 0"));
    }
    Ok((p * consts.cr_ideal + (1.0 - p) * consts.pu_ideal) / ((1.0 - p) * consts.pu_ideal))
}

/// Rate of growth of the ideal spectral efficiency factor with occupancy:
/// `C_c / (C_p (1-p)^2)`.
pub fn spectral_efficiency_ideal_slope(consts: &CapacityConstants, p: f64) -> Result<f64> {
    check_probability(p, "occupancy")?;
    if p >= 1.0 {
        return Err(Error::domain("slope is unbounded at p = 1"));
    }
    if !(consts.pu_ideal > 0.0) {
        return Err(Error::domain("slope requires C_p > 0"));
    }
    Ok(consts.cr_ideal / (consts.pu_ideal * (1.0 - p) * (1.0 - p)))
}

/// Spectral efficiency factor with detection errors:
/// `(C_c' + C_p') / ((1-p) C_p)`.
///
/// Equals [`spectral_efficiency_ideal`] exactly at the perfect operating
/// point, and exactly one when the CR is silent (`p_fa = 0`, `p_md = 1`).
pub fn spectral_efficiency(
    consts: &CapacityConstants,
    p: f64,
    err: DetectionErrorPair,
) -> Result<f64> {
    if !(consts.pu_ideal > 0.0) {
        return Err(Error::domain("spectral efficiency requires C_p > 0"));
    }
    let breakdown = nonideal_capacities(consts, p, err)?;
    breakdown
        .efficiency
        .ok_or_else(|| Error::domain("spectral efficiency is unbounded at p = 1"))
}

/// Partial derivatives of the spectral efficiency factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyPartials {
    /// With respect to occupancy `p`; positive, independent of `p_fa`.
    pub wrt_occupancy: f64,
    /// With respect to `p_md`; nonpositive, independent of `p_fa`.
    pub wrt_missed_detection: f64,
    /// With respect to `p_fa`; constant in both `p` and `p_md`.
    pub wrt_false_alarm: f64,
}

/// Analytic partials of [`spectral_efficiency`]:
///
/// ```text
/// d/dp     =  (1 - p_md) A_c / (A_p (1-p)^2)
/// d/dp_md  = -p A_c / ((1-p) A_p)
/// d/dp_fa  = -(A_p - B_p - B_c) / A_p
/// ```
pub fn spectral_efficiency_partials(
    consts: &CapacityConstants,
    p: f64,
    err: DetectionErrorPair,
) -> Result<EfficiencyPartials> {
    check_probability(p, "occupancy")?;
    if p >= 1.0 {
        return Err(Error::domain("partials are unbounded at p = 1"));
    }
    if !(consts.pu_ideal > 0.0) {
        return Err(Error::domain("partials require C_p > 0"));
    }
    let c = consts;
    let one_minus_p = 1.0 - p;
    Ok(EfficiencyPartials {
        wrt_occupancy: (1.0 - err.p_md) * c.cr_clear / (c.pu_ideal * one_minus_p * one_minus_p),
        wrt_missed_detection: -(p * c.cr_clear) / (one_minus_p * c.pu_ideal),
        wrt_false_alarm: -(c.pu_clear - c.pu_interfered - c.cr_interfered) / c.pu_ideal,
    })
}
