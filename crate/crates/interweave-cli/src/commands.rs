//! The five subcommands. Each one reads its config section, computes
//! through `interweave-core`, and writes CSV (plus optional SVG) under the
//! output directory in deterministic order.

use crate::config::{sweep_points, ConfigDocument};
use crate::error::{CliError, CliResult};
use crate::output::{cell, write_table, Provenance};
use crate::svg::{self, Series};
use interweave_core::admissibility::{admissibility_grid, weak_boundary, LossFactor};
use interweave_core::channel::{capacity_constants, CapacityConstants, SystemParams};
use interweave_core::detectors::{admissible_arc, logit_grid, sample_roc, RocCurve};
use interweave_core::ratemodel::{
    ideal_rate_region_envelope, nonideal_rate_region_envelope, spectral_efficiency_ideal,
    DetectionErrorPair, RateRegionPolygon, RegionKind,
};
use interweave_core::simulator::{compare_with_analytic, run, SimulationConfig};
use rayon::prelude::*;
use std::path::Path;

pub struct CommandContext<'a> {
    pub config: &'a ConfigDocument,
    pub provenance: &'a Provenance,
    pub out_dir: &'a Path,
    pub seed: u64,
    pub svg: bool,
}

fn constants_for_rs(
    params: &SystemParams,
    rs_db: f64,
    fading: interweave_core::channel::FadingModel,
) -> CliResult<CapacityConstants> {
    let power_cr = params.power_pu / 10_f64.powf(rs_db / 10.0);
    let adjusted = SystemParams::new(
        params.free_probability,
        params.power_pu,
        power_cr,
        params.noise_var,
    )?;
    Ok(capacity_constants(&adjusted, fading)?)
}

// ---------------------------------------------------------------------------
// eta-sweep
// ---------------------------------------------------------------------------

/// Spectral efficiency factor over an occupancy grid, one curve per
/// relative power level. Columns: p, rs_db, eta.
pub fn eta_sweep(ctx: &CommandContext) -> CliResult<()> {
    let section = ctx
        .config
        .eta_sweep
        .as_ref()
        .ok_or_else(|| CliError::config("missing [eta_sweep] section"))?;
    let p_grid = sweep_points(&section.p)?;
    if p_grid.is_empty() || section.rs_db.is_empty() {
        return Err(CliError::config("[eta_sweep] grids must be non-empty"));
    }
    let params = ctx.config.scenario.system_params()?;
    let fading = ctx.config.scenario.fading;

    let mut cases = Vec::new();
    for &rs in &section.rs_db {
        let consts = constants_for_rs(&params, rs, fading)?;
        cases.push((rs, consts));
    }

    let jobs: Vec<(f64, f64)> = cases
        .iter()
        .flat_map(|&(rs, _)| p_grid.iter().map(move |&p| (rs, p)))
        .collect();
    let rows: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(rs, p)| {
            let consts = &cases.iter().find(|(r, _)| *r == rs).expect("case exists").1;
            let eta = if p >= 1.0 {
                eprintln!("warning: eta is unbounded at p = 1; emitting inf");
                f64::INFINITY
            } else {
                spectral_efficiency_ideal(consts, p).expect("p < 1 and C_p > 0 checked")
            };
            vec![cell(p), cell(rs), cell(eta)]
        })
        .collect();

    let path = ctx.out_dir.join("eta_sweep.csv");
    write_table(&path, ctx.provenance, &["p", "rs_db", "eta"], &rows, jobs.len())?;

    if ctx.svg {
        let series: Vec<Series> = cases
            .iter()
            .map(|(rs, consts)| Series {
                label: format!("RS {rs} dB"),
                points: p_grid
                    .iter()
                    .filter(|&&p| p < 1.0)
                    .map(|&p| (p, spectral_efficiency_ideal(consts, p).expect("checked")))
                    .collect(),
            })
            .collect();
        svg::line_chart(
            &ctx.out_dir.join("eta_sweep.svg"),
            "spectral efficiency factor vs occupancy",
            "p (channel free probability)",
            "eta",
            &series,
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// rate-region
// ---------------------------------------------------------------------------

fn polygon_rows(case: &str, p_fa: Option<f64>, p_md: Option<f64>, poly: &RateRegionPolygon) -> Vec<Vec<String>> {
    let kind = match poly.kind {
        RegionKind::Ideal => "ideal",
        RegionKind::NonIdeal => "non_ideal",
    };
    poly.vertices
        .iter()
        .enumerate()
        .map(|(i, &(cr, pu))| {
            vec![
                case.to_string(),
                kind.to_string(),
                p_fa.map(cell).unwrap_or_default(),
                p_md.map(cell).unwrap_or_default(),
                i.to_string(),
                cell(cr),
                cell(pu),
            ]
        })
        .collect()
}

/// Achievable-region polygons: the perfect-detection envelope plus one
/// error-prone envelope per configured operating point. Containment of
/// every error-prone region in the ideal one is asserted before writing.
pub fn rate_region(ctx: &CommandContext) -> CliResult<()> {
    let section = ctx
        .config
        .rate_region
        .as_ref()
        .ok_or_else(|| CliError::config("missing [rate_region] section"))?;
    if section.error_pairs.is_empty() {
        return Err(CliError::config("[rate_region] error_pairs must be non-empty"));
    }
    let params = ctx.config.scenario.system_params()?;
    let consts = capacity_constants(&params, ctx.config.scenario.fading)?;
    let ideal = ideal_rate_region_envelope(&consts);

    let mut rows = polygon_rows("ideal", None, None, &ideal);
    let mut series = vec![Series {
        label: "ideal".into(),
        points: closed_outline(&ideal),
    }];
    for (i, &(p_fa, p_md)) in section.error_pairs.iter().enumerate() {
        let err = DetectionErrorPair::new(p_fa, p_md)
            .map_err(|e| CliError::config(format!("[rate_region] pair {i}: {e}")))?;
        let region = nonideal_rate_region_envelope(&consts, err);
        if !ideal.contains_polygon(&region, 1e-9) {
            return Err(CliError::invariant(format!(
                "non-ideal region at (p_fa={p_fa}, p_md={p_md}) escapes the ideal region; \
                 the scenario is outside the regime where interference is always harmful"
            )));
        }
        rows.extend(polygon_rows(&format!("case{i}"), Some(p_fa), Some(p_md), &region));
        series.push(Series {
            label: format!("p_fa={p_fa}, p_md={p_md}"),
            points: closed_outline(&region),
        });
    }

    let expected = rows.len();
    let path = ctx.out_dir.join("rate_region.csv");
    write_table(
        &path,
        ctx.provenance,
        &["case", "kind", "p_fa", "p_md", "vertex", "cr_rate", "pu_rate"],
        &rows,
        expected,
    )?;

    if ctx.svg {
        svg::line_chart(
            &ctx.out_dir.join("rate_region.svg"),
            "achievable rate regions",
            "CR rate (bits/complex dim)",
            "PU rate (bits/complex dim)",
            &series,
        )?;
    }
    Ok(())
}

fn closed_outline(poly: &RateRegionPolygon) -> Vec<(f64, f64)> {
    let mut pts = poly.vertices.clone();
    if let Some(&first) = pts.first() {
        pts.push(first);
    }
    pts
}

// ---------------------------------------------------------------------------
// admissible-grid
// ---------------------------------------------------------------------------

/// Weak/strong admissibility lattices over the unit square of operating
/// points, one file per occupancy, plus a summary of admissible-area
/// fractions. Columns: p_fa, p_md, eta_hat, weak, strong_gamma.
pub fn admissible_grid_cmd(ctx: &CommandContext) -> CliResult<()> {
    let section = ctx
        .config
        .admissible_grid
        .as_ref()
        .ok_or_else(|| CliError::config("missing [admissible_grid] section"))?;
    let params = ctx.config.scenario.system_params()?;
    let consts = capacity_constants(&params, ctx.config.scenario.fading)?;
    let gamma = LossFactor::new(section.gamma)
        .map_err(|e| CliError::config(format!("[admissible_grid] {e}")))?;
    if section.p_values.is_empty() {
        return Err(CliError::config("[admissible_grid] p_values must be non-empty"));
    }
    let n = section.resolution;

    let grids: Vec<_> = section
        .p_values
        .par_iter()
        .map(|&p| admissibility_grid(&consts, p, gamma, n))
        .collect::<Result<Vec<_>, _>>()?;

    let mut summary_rows = Vec::new();
    for (p, grid) in section.p_values.iter().zip(&grids) {
        if *p == 0.0 {
            eprintln!(
                "warning: at p = 0 the weak region is empty except the p_fa = 0 line"
            );
        }
        let mut rows = Vec::with_capacity(n * n);
        for (i, &p_fa) in grid.axis.iter().enumerate() {
            for (j, &p_md) in grid.axis.iter().enumerate() {
                let v = grid.at(i, j);
                rows.push(vec![
                    cell(p_fa),
                    cell(p_md),
                    cell(v.efficiency),
                    v.weakly_admissible.to_string(),
                    v.strong_with_gamma.to_string(),
                ]);
            }
        }
        let path = ctx.out_dir.join(format!("admissible_grid_p{p:.3}.csv"));
        write_table(
            &path,
            ctx.provenance,
            &["p_fa", "p_md", "eta_hat", "weak", "strong_gamma"],
            &rows,
            n * n,
        )?;
        summary_rows.push(vec![
            cell(*p),
            cell(grid.weak_fraction()),
            cell(grid.strong_gamma_fraction()),
        ]);

        if ctx.svg {
            let values: Vec<f64> = grid.verdicts.iter().map(|v| v.efficiency).collect();
            svg::heatmap(
                &ctx.out_dir.join(format!("admissible_grid_p{p:.3}.svg")),
                &format!("eta over (p_fa, p_md) at p = {p}"),
                n,
                &values,
            )?;
        }
    }
    write_table(
        &ctx.out_dir.join("admissible_summary.csv"),
        ctx.provenance,
        &["p", "weak_fraction", "strong_gamma_fraction"],
        &summary_rows,
        section.p_values.len(),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// detector-roc
// ---------------------------------------------------------------------------

/// Per-detector ROC curves with the weak-admissibility mask against the
/// configured scenario. Columns: detector, p_fa, p_md, admissible.
pub fn detector_roc(ctx: &CommandContext) -> CliResult<()> {
    if ctx.config.detectors.is_empty() {
        return Err(CliError::config("no [[detectors]] blocks configured"));
    }
    let roc_cfg = ctx.config.roc.clone().unwrap_or_default();
    let grid = logit_grid(roc_cfg.points, roc_cfg.p_fa_min, roc_cfg.p_fa_max)
        .map_err(|e| CliError::config(format!("[roc] {e}")))?;
    let params = ctx.config.scenario.system_params()?;
    let consts = capacity_constants(&params, ctx.config.scenario.fading)?;
    let p = params.free_probability;

    let curves: Vec<RocCurve> = ctx
        .config
        .detectors
        .par_iter()
        .map(|det| {
            let curve = sample_roc(det, &grid)?;
            admissible_arc(curve, &consts, p)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::config(format!("[[detectors]] {e}")))?;

    let mut rows = Vec::with_capacity(curves.len() * grid.len());
    let mut summary = Vec::new();
    let mut series = Vec::new();
    for curve in &curves {
        let mask = curve.admissible.as_ref().expect("mask filled by admissible_arc");
        for (&(p_fa, p_md), &ok) in curve.points.iter().zip(mask) {
            rows.push(vec![
                curve.kind.label().to_string(),
                cell(p_fa),
                cell(p_md),
                ok.to_string(),
            ]);
        }
        summary.push(vec![
            curve.kind.label().to_string(),
            cell(curve.admissible_fraction().expect("mask present")),
        ]);
        series.push(Series {
            label: curve.kind.label().to_string(),
            points: curve.points.clone(),
        });
    }

    write_table(
        &ctx.out_dir.join("detector_roc.csv"),
        ctx.provenance,
        &["detector", "p_fa", "p_md", "admissible"],
        &rows,
        curves.len() * grid.len(),
    )?;
    write_table(
        &ctx.out_dir.join("detector_summary.csv"),
        ctx.provenance,
        &["detector", "admissible_fraction"],
        &summary,
        curves.len(),
    )?;

    if ctx.svg {
        // Overlay the weak-admissibility boundary on the ROC curves.
        if p > 0.0 {
            let boundary: Vec<(f64, f64)> = grid
                .iter()
                .map(|&p_fa| (p_fa, weak_boundary(&consts, p, p_fa).expect("p > 0")))
                .collect();
            series.push(Series { label: "weak boundary".into(), points: boundary });
        }
        svg::line_chart(
            &ctx.out_dir.join("detector_roc.svg"),
            "detector ROC curves vs weak-admissibility boundary",
            "p_fa",
            "p_md",
            &series,
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Run the slot-level simulation, export the JSON record, and compare the
/// empirical estimates against the analytic model. Any |z| above 4 is a
/// statistical failure (exit code 3).
pub fn simulate(ctx: &CommandContext) -> CliResult<()> {
    let section = ctx
        .config
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::config("missing [simulation] section"))?;
    let detection = ctx
        .config
        .detection
        .as_ref()
        .ok_or_else(|| CliError::config("missing [detection] section"))?;
    let sim_config = SimulationConfig {
        params: ctx.config.scenario.system_params()?,
        err: detection.pair()?,
        fading: ctx.config.scenario.fading,
        n_slots: section.n_slots,
        seed: ctx.seed,
    };
    let result = run(&sim_config)?;
    let cmp = compare_with_analytic(&result)?;

    std::fs::write(ctx.out_dir.join("simulate.json"), result.to_json())?;

    let mut rows = vec![
        vec![
            "pu_rate".to_string(),
            cell(result.pu_rate.mean),
            cell(result.pu_rate.std_err),
            cell(cmp.analytic_pu_rate),
            cell(cmp.z_pu),
        ],
        vec![
            "cr_rate".to_string(),
            cell(result.cr_rate.mean),
            cell(result.cr_rate.std_err),
            cell(cmp.analytic_cr_rate),
            cell(cmp.z_cr),
        ],
    ];
    if let (Some(eff), Some(analytic), Some(z)) =
        (&result.efficiency, cmp.analytic_efficiency, cmp.z_efficiency)
    {
        rows.push(vec![
            "efficiency".to_string(),
            cell(eff.mean),
            cell(eff.std_err),
            cell(analytic),
            cell(z),
        ]);
    }
    let expected = rows.len();
    write_table(
        &ctx.out_dir.join("simulate_comparison.csv"),
        ctx.provenance,
        &["quantity", "empirical", "std_err", "analytic", "z"],
        &rows,
        expected,
    )?;

    let worst = [Some(cmp.z_pu), Some(cmp.z_cr), cmp.z_efficiency]
        .into_iter()
        .flatten()
        .map(f64::abs)
        .fold(0.0, f64::max);
    if worst > 4.0 {
        return Err(CliError::statistical(format!(
            "empirical estimates disagree with the analytic model (worst |z| = {worst:.2})"
        )));
    }
    Ok(())
}
