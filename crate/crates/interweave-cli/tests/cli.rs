//! End-to-end CLI behavior: exit codes, output shapes, determinism knobs.

use std::path::Path;
use std::process::Command;

const BASELINE: &str = r#"
schema_version = 1
seed = 7

[scenario]
free_probability = 0.4
power_pu = 10000.0
power_cr = 100.0
noise_var = 1.0
fading = "rayleigh_unit"

[detection]
p_fa = 0.2
p_md = 0.3

[eta_sweep]
p = "0.0:0.2:1.0"
rs_db = [0.0, 10.0, 20.0, 30.0]

[rate_region]
error_pairs = [[0.1, 0.2], [0.3, 0.2], [0.2, 0.5]]

[admissible_grid]
resolution = 11
p_values = [0.0, 0.4]
gamma = 0.8

[simulation]
n_slots = 100000

[[detectors]]
kind = "energy"
segments = 4
samples_per_segment = 64
power_pu = 0.003981071705534973
noise_var = 1.0

[[detectors]]
kind = "matched_filter"
signal_energy = 0.0
noise_var = 1.0

[[detectors]]
kind = "msc"
segments = 8
true_msc = 0.2

[roc]
points = 50
"#;

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("config.toml"), config).unwrap();
        Fixture { dir }
    }

    fn config(&self) -> String {
        self.dir.path().join("config.toml").to_str().unwrap().to_string()
    }

    fn out(&self) -> String {
        self.dir.path().join("out").to_str().unwrap().to_string()
    }

    fn run(&self, args: &[&str]) -> std::process::Output {
        Command::new(env!("CARGO_BIN_EXE_interweave"))
            .args(args)
            .output()
            .expect("binary runs")
    }

    fn run_ok(&self, sub: &str) -> std::process::Output {
        let out = self.run(&["--config", &self.config(), "--out", &self.out(), sub]);
        assert!(
            out.status.success(),
            "{sub} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out
    }
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn missing_config_is_a_config_error() {
    let fx = Fixture::new(BASELINE);
    let out = fx.run(&["eta-sweep"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fx.run(&["--config", "/nonexistent.toml", "eta-sweep"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_config_names_the_field() {
    let fx = Fixture::new(&BASELINE.replace("signal_energy", "signal_enrgy"));
    let out = fx.run(&["--config", &fx.config(), "--out", &fx.out(), "detector-roc"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("signal_enrgy") || stderr.contains("missing field"), "{stderr}");
}

#[test]
fn missing_section_is_a_config_error() {
    let trimmed = BASELINE.replace("[eta_sweep]", "[eta_sweep_removed]");
    let fx = Fixture::new(&trimmed);
    let out = fx.run(&["--config", &fx.config(), "--out", &fx.out(), "eta-sweep"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eta_sweep_rows_and_monotonicity() {
    let fx = Fixture::new(BASELINE);
    fx.run_ok("eta-sweep");
    let lines = data_lines(&Path::new(&fx.out()).join("eta_sweep.csv"));
    assert_eq!(lines[0], "p,rs_db,eta");
    // 6 occupancies x 4 power ratios.
    assert_eq!(lines.len() - 1, 24);
    // p = 1 rows carry the inf sentinel.
    assert!(lines.iter().any(|l| l.starts_with("1,") && l.ends_with(",inf")));
    // Each RS block is monotone increasing in p (finite part).
    for rs in ["0", "10", "20", "30"] {
        let etas: Vec<f64> = lines[1..]
            .iter()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|f| f[1] == rs && f[2] != "inf")
            .map(|f| f[2].parse().unwrap())
            .collect();
        assert!(etas.windows(2).all(|w| w[0] < w[1]), "RS {rs} not monotone: {etas:?}");
    }
}

#[test]
fn rate_region_emits_all_cases_and_asserts_containment() {
    let fx = Fixture::new(BASELINE);
    fx.run_ok("rate-region");
    let lines = data_lines(&Path::new(&fx.out()).join("rate_region.csv"));
    let cases: std::collections::BTreeSet<&str> =
        lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    // 3 configured operating points plus the ideal envelope.
    assert_eq!(cases.len(), 4);
    assert!(cases.contains("ideal"));
}

#[test]
fn rate_region_containment_breach_exits_2() {
    // Symmetric powers at 0 dB SNR: collision slots add net rate, the
    // error-prone region pokes out of the time-sharing triangle, and the
    // command must refuse to write.
    let sym = BASELINE
        .replace("power_pu = 10000.0", "power_pu = 1.0")
        .replace("power_cr = 100.0", "power_cr = 1.0");
    let fx = Fixture::new(&sym);
    let out = fx.run(&["--config", &fx.config(), "--out", &fx.out(), "rate-region"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new(&fx.out()).join("rate_region.csv").exists());
}

#[test]
fn admissible_grid_rows_warning_and_summary() {
    let fx = Fixture::new(BASELINE);
    let out = fx.run_ok("admissible-grid");
    // p = 0 in the list draws the empty-region warning.
    assert!(String::from_utf8_lossy(&out.stderr).contains("p = 0"));
    let grid = data_lines(&Path::new(&fx.out()).join("admissible_grid_p0.400.csv"));
    assert_eq!(grid[0], "p_fa,p_md,eta_hat,weak,strong_gamma");
    assert_eq!(grid.len() - 1, 121); // 11 x 11
    let summary = data_lines(&Path::new(&fx.out()).join("admissible_summary.csv"));
    assert_eq!(summary.len() - 1, 2);
    // At p = 0 only the p_fa = 0 column is weakly admissible: 11 of 121.
    let p0 = data_lines(&Path::new(&fx.out()).join("admissible_grid_p0.000.csv"));
    let weak_count = p0[1..]
        .iter()
        .filter(|l| l.split(',').nth(3).unwrap() == "true")
        .count();
    assert_eq!(weak_count, 11);
}

#[test]
fn detector_roc_rows_and_chance_diagonal() {
    let fx = Fixture::new(BASELINE);
    fx.run_ok("detector-roc");
    let lines = data_lines(&Path::new(&fx.out()).join("detector_roc.csv"));
    assert_eq!(lines[0], "detector,p_fa,p_md,admissible");
    assert_eq!(lines.len() - 1, 150); // 50 points x 3 detectors
    // The zero-energy matched filter rides the chance diagonal.
    for line in lines[1..].iter().filter(|l| l.starts_with("matched_filter")) {
        let f: Vec<&str> = line.split(',').collect();
        let p_fa: f64 = f[1].parse().unwrap();
        let p_md: f64 = f[2].parse().unwrap();
        assert!((p_md - (1.0 - p_fa)).abs() < 1e-9);
    }
}

#[test]
fn simulate_writes_json_and_comparison() {
    let fx = Fixture::new(BASELINE);
    fx.run_ok("simulate");
    let json = std::fs::read_to_string(Path::new(&fx.out()).join("simulate.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["config"]["seed"], 7);
    let counts: Vec<u64> = value["outcome_counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(counts.iter().sum::<u64>(), 100_000);
    let cmp = data_lines(&Path::new(&fx.out()).join("simulate_comparison.csv"));
    assert_eq!(cmp[0], "quantity,empirical,std_err,analytic,z");
    assert_eq!(cmp.len() - 1, 3);
}

#[test]
fn seed_flag_overrides_config() {
    let fx = Fixture::new(BASELINE);
    let out = fx.run(&[
        "--config",
        &fx.config(),
        "--out",
        &fx.out(),
        "--seed",
        "99",
        "simulate",
    ]);
    assert!(out.status.success());
    let json = std::fs::read_to_string(Path::new(&fx.out()).join("simulate.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["config"]["seed"], 99);
    let table = std::fs::read_to_string(Path::new(&fx.out()).join("simulate_comparison.csv"))
        .unwrap();
    assert!(table.contains("# seed: 99"));
}

#[test]
fn svg_flag_emits_plots() {
    let fx = Fixture::new(BASELINE);
    let out = fx.run(&[
        "--config",
        &fx.config(),
        "--out",
        &fx.out(),
        "--svg",
        "eta-sweep",
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(Path::new(&fx.out()).join("eta_sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polyline"));
}
