//! Configuration document: a TOML file with the scenario, per-command
//! sections, and detector blocks. Parsing round-trips (parse, serialize,
//! parse is the identity) and unknown keys are rejected so typos surface
//! as config errors naming the field.

use crate::error::{CliError, CliResult};
use interweave_core::channel::{FadingModel, SystemParams};
use interweave_core::detectors::Detector;
use interweave_core::ratemodel::DetectionErrorPair;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Seed for every randomized routine (overridable with `--seed`).
    pub seed: u64,
    pub scenario: ScenarioConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_sweep: Option<EtaSweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_region: Option<RateRegionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admissible_grid: Option<AdmissibleGridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub detectors: Vec<Detector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roc: Option<RocConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Probability the channel is free of PU transmission.
    pub free_probability: f64,
    pub power_pu: f64,
    pub power_cr: f64,
    pub noise_var: f64,
    pub fading: FadingModel,
}

impl ScenarioConfig {
    pub fn system_params(&self) -> CliResult<SystemParams> {
        SystemParams::new(self.free_probability, self.power_pu, self.power_cr, self.noise_var)
            .map_err(|e| CliError::config(format!("[scenario] {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub p_fa: f64,
    pub p_md: f64,
}

impl DetectionConfig {
    pub fn pair(&self) -> CliResult<DetectionErrorPair> {
        DetectionErrorPair::new(self.p_fa, self.p_md)
            .map_err(|e| CliError::config(format!("[detection] {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaSweepConfig {
    /// Occupancy grid in `start:step:stop` form (inclusive endpoints).
    pub p: String,
    /// Relative power levels `10 log10(P_p / P_c)` to sweep, dB.
    pub rs_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateRegionConfig {
    /// Detector operating points to draw regions for, as `[p_fa, p_md]`.
    pub error_pairs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibleGridConfig {
    /// Lattice points per axis (at least 2).
    pub resolution: usize,
    /// Occupancies to evaluate the lattice at.
    pub p_values: Vec<f64>,
    /// Loss factor for the strong-admissibility verdicts.
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub n_slots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RocConfig {
    #[serde(default = "default_roc_points")]
    pub points: usize,
    #[serde(default = "default_pfa_min")]
    pub p_fa_min: f64,
    #[serde(default = "default_pfa_max")]
    pub p_fa_max: f64,
}

fn default_roc_points() -> usize {
    interweave_core::detectors::DEFAULT_ROC_POINTS
}
fn default_pfa_min() -> f64 {
    interweave_core::detectors::DEFAULT_PFA_MIN
}
fn default_pfa_max() -> f64 {
    interweave_core::detectors::DEFAULT_PFA_MAX
}

impl Default for RocConfig {
    fn default() -> Self {
        RocConfig {
            points: default_roc_points(),
            p_fa_min: default_pfa_min(),
            p_fa_max: default_pfa_max(),
        }
    }
}

impl ConfigDocument {
    pub fn parse(text: &str) -> CliResult<Self> {
        let doc: ConfigDocument =
            toml::from_str(text).map_err(|e| CliError::config(format!("config parse: {e}")))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        doc.scenario.system_params()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> CliResult<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::config(format!("{} is not UTF-8: {e}", path.display())))?;
        let doc = Self::parse(text)?;
        Ok((doc, bytes))
    }

    /// Serialization half of the parse/serialize/parse identity.
    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config documents always serialize")
    }
}

/// Parse an inclusive `start:step:stop` sweep into its grid, with exact
/// rational stepping: point `i` is `start + i * step`, never an
/// accumulated sum.
pub fn sweep_points(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::config(format!(
            "sweep '{spec}' must have the form start:step:stop"
        )));
    }
    let parse = |s: &str, what: &str| -> CliResult<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::config(format!("sweep '{spec}': bad {what} '{s}'")))
    };
    let start = parse(parts[0], "start")?;
    let step = parse(parts[1], "step")?;
    let stop = parse(parts[2], "stop")?;
    if step == 0.0 {
        if start == stop {
            return Ok(vec![start]);
        }
        return Err(CliError::config(format!("sweep '{spec}': zero step with start != stop")));
    }
    let span = (stop - start) / step;
    if span < -1e-9 {
        return Err(CliError::config(format!("sweep '{spec}': step points away from stop")));
    }
    let n = span.round();
    if (span - n).abs() > 1e-6 {
        return Err(CliError::config(format!(
            "sweep '{spec}': step does not divide the span evenly"
        )));
    }
    Ok((0..=(n.max(0.0) as u64)).map(|i| start + i as f64 * step).collect())
}
