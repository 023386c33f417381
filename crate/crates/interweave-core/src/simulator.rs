//! Slot-level Monte Carlo simulation of the spectrum-sharing system.
//!
//! Each slot independently draws the channel state (free with probability
//! `p`), the CR's detection of it (with the configured false-alarm and
//! missed-detection probabilities), and the fading gains; the instantaneous
//! Shannon rates of whatever links operate in that slot are accumulated.
//! Interference is treated as Gaussian noise at its average power inside
//! the per-slot SINR (matching the analytic model); the cross gains are
//! still sampled by [`interference_power_check`] to validate that
//! treatment's variance assumption.
//!
//! Slot `i`'s randomness is derived from `(seed, i)` alone, so results are
//! bit-identical for a given seed at any parallelism degree: slots are
//! processed in fixed-size blocks whose partial sums are reduced in block
//! order.

use crate::channel::{capacity_constants, FadingModel, SystemParams};
use crate::error::{Error, Result};
use crate::ratemodel::{nonideal_capacities, outcome_distribution, DetectionErrorPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Everything one simulation run needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub params: SystemParams,
    pub err: DetectionErrorPair,
    pub fading: FadingModel,
    pub n_slots: u64,
    pub seed: u64,
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

/// Per-slot outcome counts, in the order
/// (CR transmits alone, collision, wasted, PU transmits alone).
pub type OutcomeCounts = [u64; 4];

/// Simulation output: empirical per-user average rates, outcome counts,
/// and the empirical spectral efficiency factor, with the configuration
/// echoed for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub config: SimulationConfig,
    /// Empirical PU average rate over all slots.
    pub pu_rate: Estimate,
    /// Empirical CR average rate over all slots.
    pub cr_rate: Estimate,
    /// Empirical spectral efficiency factor; `None` at `p = 1` where the
    /// PU-alone reference rate vanishes.
    pub efficiency: Option<Estimate>,
    pub outcome_counts: OutcomeCounts,
}

impl SimulationResult {
    /// JSON record of the full result (config echo included).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("simulation results always serialize")
    }
}

/// Report of the interference-power validation over collision slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferencePowerCheck {
    /// Number of collision slots observed.
    pub collision_slots: u64,
    /// Empirical mean of `|h_pc|^2 * P_p` over those slots.
    pub mean_power: f64,
    pub std_err: f64,
    /// The analytic value the mean should match (`P_p`).
    pub expected: f64,
    /// Set when no collision slot occurred, leaving nothing to check.
    pub skipped: bool,
}

const BLOCK_SLOTS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, Default)]
struct BlockStats {
    sum_pu: f64,
    sum_sq_pu: f64,
    sum_cr: f64,
    sum_sq_cr: f64,
    sum_total: f64,
    sum_sq_total: f64,
    counts: [u64; 4],
}

impl BlockStats {
    fn merge(mut self, other: &BlockStats) -> BlockStats {
        self.sum_pu += other.sum_pu;
        self.sum_sq_pu += other.sum_sq_pu;
        self.sum_cr += other.sum_cr;
        self.sum_sq_cr += other.sum_sq_cr;
        self.sum_total += other.sum_total;
        self.sum_sq_total += other.sum_sq_total;
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
        self
    }
}

/// Independent RNG for slot `i`: the stream depends only on `(seed, i)`,
/// never on execution order.
fn slot_rng(seed: u64, slot: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ slot.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn gain_sq(rng: &mut ChaCha8Rng, fading: FadingModel) -> f64 {
    match fading {
        FadingModel::RayleighUnit => rng.sample(Exp1),
        FadingModel::DeterministicUnit => 1.0,
    }
}

fn validate(config: &SimulationConfig) -> Result<()> {
    SystemParams::new(
        config.params.free_probability,
        config.params.power_pu,
        config.params.power_cr,
        config.params.noise_var,
    )?;
    DetectionErrorPair::new(config.err.p_fa, config.err.p_md)?;
    if config.n_slots == 0 {
        return Err(Error::domain("n_slots must be >= 1"));
    }
    Ok(())
}

fn simulate_block(config: &SimulationConfig, start: u64, end: u64) -> BlockStats {
    let p = config.params.free_probability;
    let err = config.err;
    let pu_power = config.params.power_pu;
    let cr_power = config.params.power_cr;
    let noise = config.params.noise_var;
    let mut stats = BlockStats::default();
    for slot in start..end {
        let mut rng = slot_rng(config.seed, slot);
        let free = rng.gen::<f64>() < p;
        let detected_free = if free {
            !(rng.gen::<f64>() < err.p_md)
        } else {
            rng.gen::<f64>() < err.p_fa
        };
        let mut pu_rate = 0.0;
        let mut cr_rate = 0.0;
        let outcome = match (free, detected_free) {
            (true, true) => {
                // CR transmits alone on a clear channel.
                let g = gain_sq(&mut rng, config.fading);
                cr_rate = (1.0 + g * cr_power / noise).log2();
                0
            }
            (false, true) => {
                // Collision: both links run, each treating the other as
                // Gaussian noise at its average power.
                let g_pu = gain_sq(&mut rng, config.fading);
                let g_cr = gain_sq(&mut rng, config.fading);
                pu_rate = (1.0 + g_pu * pu_power / (cr_power + noise)).log2();
                cr_rate = (1.0 + g_cr * cr_power / (pu_power + noise)).log2();
                1
            }
            (true, false) => 2, // missed opportunity, the slot is wasted
            (false, false) => {
                // PU transmits alone.
                let g = gain_sq(&mut rng, config.fading);
                pu_rate = (1.0 + g * pu_power / noise).log2();
                3
            }
        };
        stats.counts[outcome] += 1;
        stats.sum_pu += pu_rate;
        stats.sum_sq_pu += pu_rate * pu_rate;
        stats.sum_cr += cr_rate;
        stats.sum_sq_cr += cr_rate * cr_rate;
        let total = pu_rate + cr_rate;
        stats.sum_total += total;
        stats.sum_sq_total += total * total;
    }
    stats
}

fn estimate(sum: f64, sum_sq: f64, n: u64) -> Estimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 { ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
    Estimate { mean, std_err: (var / nf).sqrt() }
}

/// Run the simulation. Deterministic per seed, bit-identical at any thread
/// count (blocks are reduced in index order).
pub fn run(config: &SimulationConfig) -> Result<SimulationResult> {
    validate(config)?;
    let n = config.n_slots;
    let n_blocks = n.div_ceil(BLOCK_SLOTS);
    let blocks: Vec<BlockStats> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK_SLOTS;
            simulate_block(config, start, (start + BLOCK_SLOTS).min(n))
        })
        .collect();
    let stats = blocks.iter().fold(BlockStats::default(), BlockStats::merge);

    let pu_rate = estimate(stats.sum_pu, stats.sum_sq_pu, n);
    let cr_rate = estimate(stats.sum_cr, stats.sum_sq_cr, n);
    let p = config.params.free_probability;
    let efficiency = if p < 1.0 {
        let consts = capacity_constants(&config.params, config.fading)?;
        let reference = (1.0 - p) * consts.pu_ideal;
        let total = estimate(stats.sum_total, stats.sum_sq_total, n);
        Some(Estimate { mean: total.mean / reference, std_err: total.std_err / reference })
    } else {
        None
    };
    Ok(SimulationResult {
        config: *config,
        pu_rate,
        cr_rate,
        efficiency,
        outcome_counts: stats.counts,
    })
}

/// Validate the Gaussian-interference variance assumption: over collision
/// slots, the empirical mean of `|h_pc|^2 P_p` should match `P_p` (the
/// cross gain has unit second moment).
///
/// Runs its own slot draws (same counter-based derivation, offset stream)
/// so it never perturbs [`run`]'s statistics.
pub fn interference_power_check(
    config: &SimulationConfig,
    n_slots: u64,
) -> Result<InterferencePowerCheck> {
    validate(config)?;
    if n_slots == 0 {
        return Err(Error::domain("n_slots must be >= 1"));
    }
    let p = config.params.free_probability;
    let p_fa = config.err.p_fa;
    let pu_power = config.params.power_pu;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut hits: u64 = 0;
    for slot in 0..n_slots {
        // Offset stream so the check is independent of the rate draws.
        let mut rng = slot_rng(config.seed.wrapping_add(0x5EED_0FF5), slot);
        let free = rng.gen::<f64>() < p;
        if free {
            continue;
        }
        if rng.gen::<f64>() < p_fa {
            let g = gain_sq(&mut rng, config.fading);
            let power = g * pu_power;
            sum += power;
            sum_sq += power * power;
            hits += 1;
        }
    }
    if hits == 0 {
        return Ok(InterferencePowerCheck {
            collision_slots: 0,
            mean_power: 0.0,
            std_err: 0.0,
            expected: pu_power,
            skipped: true,
        });
    }
    let est = estimate(sum, sum_sq, hits);
    Ok(InterferencePowerCheck {
        collision_slots: hits,
        mean_power: est.mean,
        std_err: est.std_err,
        expected: pu_power,
        skipped: false,
    })
}

/// Compare a simulation against the analytic model: z-scores of the
/// empirical PU rate, CR rate, and efficiency factor against their
/// closed-form values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticComparison {
    pub analytic_pu_rate: f64,
    pub analytic_cr_rate: f64,
    pub analytic_efficiency: Option<f64>,
    pub z_pu: f64,
    pub z_cr: f64,
    pub z_efficiency: Option<f64>,
}

/// Z-scores of the empirical estimates against the analytic model values.
pub fn compare_with_analytic(result: &SimulationResult) -> Result<AnalyticComparison> {
    let consts = capacity_constants(&result.config.params, result.config.fading)?;
    let breakdown = nonideal_capacities(
        &consts,
        result.config.params.free_probability,
        result.config.err,
    )?;
    let z = |est: &Estimate, truth: f64| {
        if est.std_err > 0.0 {
            (est.mean - truth) / est.std_err
        } else {
            // Zero variance: exact agreement or unbounded discrepancy.
            if (est.mean - truth).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        }
    };
    let z_efficiency = match (&result.efficiency, breakdown.efficiency) {
        (Some(est), Some(truth)) => Some(z(est, truth)),
        _ => None,
    };
    Ok(AnalyticComparison {
        analytic_pu_rate: breakdown.pu_rate,
        analytic_cr_rate: breakdown.cr_rate,
        analytic_efficiency: breakdown.efficiency,
        z_pu: z(&result.pu_rate, breakdown.pu_rate),
        z_cr: z(&result.cr_rate, breakdown.cr_rate),
        z_efficiency,
    })
}

/// Expected outcome counts for a config (for frequency checks).
pub fn expected_outcome_probabilities(config: &SimulationConfig) -> Result<[f64; 4]> {
    Ok(outcome_distribution(config.params.free_probability, config.err)?.as_array())
}
