mod denoise;
mod evaluate;
mod generate;
mod mc;

use std::path::{Path, PathBuf};

use laat_core::{io, PointCloud};

use crate::error::{CliError, CliResult};

pub use denoise::denoise;
pub use evaluate::evaluate;
pub use generate::generate;
pub use mc::mc;

fn read_cloud(path: &Path) -> CliResult<PointCloud> {
    Ok(io::read_cloud(path)?)
}

fn read_scores(path: &Path) -> CliResult<Vec<f64>> {
    Ok(io::read_scores(path)?)
}

fn write_report(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// `dir/epoch-0001.csv`, ...
fn snapshot_path(dir: &Path, epoch: usize) -> PathBuf {
    dir.join(format!("epoch-{epoch:04}.csv"))
}

/// Snapshot files of a directory in epoch order.
fn snapshot_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("epoch-") && name.ends_with(".csv") {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(CliError::data(format!("{}: no epoch-*.csv snapshots", dir.display())));
    }
    files.sort();
    Ok(files)
}

fn check_positive(name: &str, v: f64, problems: &mut Vec<String>) {
    if !(v > 0.0 && v.is_finite()) {
        problems.push(format!("{name} must be positive, got {v}"));
    }
}

fn usage_if_any(problems: Vec<String>) -> CliResult<()> {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::usage(problems.join("\n")))
    }
}
