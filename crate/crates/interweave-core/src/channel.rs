//! Ergodic capacity of fading links with and without interference.
//!
//! The PU and CR links are flat-fading AWGN channels; interference from the
//! other user, when present, is treated as additional Gaussian noise at its
//! average received power. For unit-second-moment Rayleigh fading the
//! expectation has the closed form
//!
//! ```text
//! E[log2(1 + |h|^2 g)] = log2(e) * exp(1/g) * E1(1/g),   g = S / (I + N)
//! ```
//!
//! which the Monte Carlo path cross-checks. All rates are in bits per
//! complex dimension.

use crate::error::{Error, Result};
use crate::specfun::{self, MonteCarloEstimate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

/// Fading law of a link's amplitude gain.
///
/// One law applies to every gain in the scenario — direct and cross links
/// alike, all i.i.d. — so average capacities depend only on which powers
/// enter the SINR, never on which physical link carries them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingModel {
    /// `|h|` Rayleigh with unit second moment (`|h|^2` ~ Exp(1)).
    RayleighUnit,
    /// No fading: `|h| = 1`.
    DeterministicUnit,
}

/// Global scenario: occupancy statistics and link powers.
///
/// `free_probability` is the probability the channel is free of PU
/// transmission (the PU transmits with probability one minus it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Probability the channel is free (`p`).
    pub free_probability: f64,
    /// PU average transmit power constraint, watts.
    pub power_pu: f64,
    /// CR average transmit power constraint, watts.
    pub power_cr: f64,
    /// Receiver noise variance, watts.
    pub noise_var: f64,
}

impl SystemParams {
    /// Validated constructor.
    pub fn new(free_probability: f64, power_pu: f64, power_cr: f64, noise_var: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&free_probability) {
            return Err(Error::domain(format!(
                "free_probability must be in [0, 1], got {free_probability}"
            )));
        }
        if !(power_pu >= 0.0) {
            return Err(Error::domain(format!("power_pu must be >= 0, got {power_pu}")));
        }
        if !(power_cr >= 0.0) {
            return Err(Error::domain(format!("power_cr must be >= 0, got {power_cr}")));
        }
        if !(noise_var > 0.0) {
            return Err(Error::domain(format!("noise_var must be > 0, got {noise_var}")));
        }
        Ok(SystemParams { free_probability, power_pu, power_cr, noise_var })
    }

    /// Relative PU-to-CR power level `10 log10(P_p / P_c)` in dB.
    pub fn rs_db(&self) -> f64 {
        10.0 * (self.power_pu / self.power_cr).log10()
    }
}

/// The four link capacities of the detection-error model, plus the ideal
/// (interference-free, perfectly detected) capacities of both users.
///
/// `*_clear` is the link capacity with only receiver noise; `*_interfered`
/// is the capacity when the other user's transmission is treated as
/// additional Gaussian noise. Under matched fading models the ideal
/// capacities equal the clear ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityConstants {
    /// PU capacity with no CR interference (A_p).
    pub pu_clear: f64,
    /// PU capacity under CR interference (B_p).
    pub pu_interfered: f64,
    /// CR capacity with no PU interference (A_c).
    pub cr_clear: f64,
    /// CR capacity under PU interference (B_c).
    pub cr_interfered: f64,
    /// PU capacity in the ideal (perfect detection) model (C_p).
    pub pu_ideal: f64,
    /// CR capacity in the ideal model (C_c).
    pub cr_ideal: f64,
}

/// Ergodic capacity `E[log2(1 + |h|^2 S / (I + N))]` in bits per complex
/// dimension.
///
/// Exactly zero when `signal_power` is zero. For Rayleigh fading the closed
/// form is evaluated through the exponentially scaled E1, which stays finite
/// for arbitrarily small SNR.
pub fn ergodic_capacity(
    signal_power: f64,
    interference_power: f64,
    noise_var: f64,
    fading: FadingModel,
) -> Result<f64> {
    if !(noise_var > 0.0) {
        return Err(Error::domain(format!("noise_var must be > 0, got {noise_var}")));
    }
    if !(signal_power >= 0.0) {
        return Err(Error::domain(format!("signal_power must be >= 0, got {signal_power}")));
    }
    if !(interference_power >= 0.0) {
        return Err(Error::domain(format!(
            "interference_power must be >= 0, got {interference_power}"
        )));
    }
    if signal_power == 0.0 {
        return Ok(0.0);
    }
    let snr = signal_power / (interference_power + noise_var);
    match fading {
        FadingModel::DeterministicUnit => Ok((1.0 + snr).log2()),
        FadingModel::RayleighUnit => {
            Ok(std::f64::consts::LOG2_E * specfun::exp_scaled_e1(1.0 / snr)?)
        }
    }
}

/// Monte Carlo estimate of the same expectation as [`ergodic_capacity`],
/// from `n_samples` independent fading draws. Deterministic per seed.
pub fn ergodic_capacity_monte_carlo(
    signal_power: f64,
    interference_power: f64,
    noise_var: f64,
    fading: FadingModel,
    n_samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if !(noise_var > 0.0) {
        return Err(Error::domain(format!("noise_var must be > 0, got {noise_var}")));
    }
    if n_samples == 0 {
        return Err(Error::domain("n_samples must be >= 1"));
    }
    let snr = signal_power / (interference_power + noise_var);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let gain_sq: f64 = match fading {
            FadingModel::RayleighUnit => Exp1.sample(&mut rng),
            FadingModel::DeterministicUnit => 1.0,
        };
        let rate = (1.0 + gain_sq * snr).log2();
        sum += rate;
        sum_sq += rate * rate;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
    Ok(MonteCarloEstimate { mean, std_err: (var / n).sqrt(), trials: n_samples })
}

/// The capacity constants of the scenario: both users' clear and interfered
/// capacities plus the ideal-model ones.
pub fn capacity_constants(params: &SystemParams, fading: FadingModel) -> Result<CapacityConstants> {
    let p = params;
    let pu_clear = ergodic_capacity(p.power_pu, 0.0, p.noise_var, fading)?;
    let pu_interfered = ergodic_capacity(p.power_pu, p.power_cr, p.noise_var, fading)?;
    let cr_clear = ergodic_capacity(p.power_cr, 0.0, p.noise_var, fading)?;
    let cr_interfered = ergodic_capacity(p.power_cr, p.power_pu, p.noise_var, fading)?;
    Ok(CapacityConstants {
        pu_clear,
        pu_interfered,
        cr_clear,
        cr_interfered,
        pu_ideal: pu_clear,
        cr_ideal: cr_clear,
    })
}
