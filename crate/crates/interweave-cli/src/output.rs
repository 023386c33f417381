//! Table output with provenance headers.
//!
//! Every table starts with comment lines recording the tool version, the
//! SHA-256 of the configuration file, and the effective seed, followed by
//! a mandatory column header row. Values never contain separators or
//! quotes, so rows are plain comma joins. Reruns with the same config and
//! seed produce byte-identical files.

use crate::error::{CliError, CliResult};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct Provenance {
    pub tool_version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_bytes: &[u8], seed: u64) -> Self {
        let digest = Sha256::digest(config_bytes);
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        Provenance {
            tool_version: env!("CARGO_PKG_VERSION"),
            config_sha256: hex,
            seed,
        }
    }

    fn header_lines(&self) -> String {
        format!(
            "# interweave {}\n# config_sha256: {}\n# seed: {}\n",
            self.tool_version, self.config_sha256, self.seed
        )
    }
}

/// Deterministic cell rendering: shortest round-trip float formatting,
/// infinities as `inf`/`-inf`.
pub fn cell(value: f64) -> String {
    if value == f64::INFINITY {
        "inf".to_string()
    } else if value == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{value}")
    }
}

/// Write a CSV table. `expected_rows` pins the row count (grid-size
/// products) so a short or long write is an internal error, not silent
/// truncation.
pub fn write_table(
    path: &Path,
    provenance: &Provenance,
    columns: &[&str],
    rows: &[Vec<String>],
    expected_rows: usize,
) -> CliResult<()> {
    if rows.len() != expected_rows {
        return Err(CliError::invariant(format!(
            "{}: produced {} rows, expected {}",
            path.display(),
            rows.len(),
            expected_rows
        )));
    }
    for row in rows {
        if row.len() != columns.len() {
            return Err(CliError::invariant(format!(
                "{}: row width {} does not match {} columns",
                path.display(),
                row.len(),
                columns.len()
            )));
        }
    }
    let mut buf = String::new();
    buf.push_str(&provenance.header_lines());
    buf.push_str(&columns.join(","));
    buf.push('\n');
    for row in rows {
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(buf.as_bytes())?;
    Ok(())
}

/// Verify the output directory exists (creating it if needed) and is
/// writable, before any computation starts.
pub fn prepare_out_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", dir.display())))?;
    let probe = dir.join(".write_probe");
    std::fs::write(&probe, b"ok")
        .map_err(|e| CliError::config(format!("{} is not writable: {e}", dir.display())))?;
    std::fs::remove_file(&probe).ok();
    Ok(())
}
