use std::path::{Path, PathBuf};

use laat_core::io;
use laat_core::laat::{run_laat_multi_reward, RewardTerm};
use laat_core::{LaatConfig, PointCloud};

use super::{create_dir, read_cloud, snapshot_path};
use crate::config::{resolve, FileConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::DenoiseArgs;

/// `out.csv` becomes `out.pass1.csv`.
fn first_pass_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("scores");
    let name = match output.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}.pass1.{ext}"),
        None => format!("{stem}.pass1"),
    };
    output.with_file_name(name)
}

/// Runs the colony and returns the final field and per-epoch snapshots.
fn colony(cloud: &PointCloud, cfg: &LaatConfig, rewards: &[RewardTerm]) -> CliResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let field = run_laat_multi_reward(cloud, cfg, rewards)?;
    let history = field.history().map(|h| h.to_vec()).unwrap_or_default();
    Ok((field.into_values(), history))
}

pub fn denoise(a: DenoiseArgs) -> CliResult<()> {
    let mut rec = Recorder::new("denoise");
    let file = a.config.as_deref().map(FileConfig::load).transpose()?;
    let resolved = resolve(file, &a.flags)?;
    if let Some(t) = a.rerun_excluding {
        if !t.is_finite() {
            return Err(CliError::usage(format!("rerun threshold must be finite, got {t}")));
        }
    }

    let cloud = read_cloud(&a.input)?;
    for r in &resolved.rewards {
        if cloud.attribute(&r.attribute).is_none() {
            return Err(CliError::usage(format!("unknown attribute channel `{}`", r.attribute)));
        }
    }
    let mut cfg = resolved.laat.clone();
    cfg.record_snapshots = a.snapshots.is_some();

    let (first, first_history) = colony(&cloud, &cfg, &resolved.rewards)?;
    let (scores, history) = match a.rerun_excluding {
        None => (first, first_history),
        Some(threshold) => {
            let remaining: Vec<usize> = (0..cloud.len()).filter(|&i| first[i] < threshold).collect();
            if remaining.is_empty() {
                return Err(CliError::data(format!("no points score below {threshold}; nothing to rerun on")));
            }
            let pass1 = first_pass_path(&a.output);
            io::write_scores(&pass1, &first)?;
            rec.notes.push(format!(
                "first pass written to {}; {} points scoring at least {threshold} were excluded and score 0 in the second pass",
                pass1.display(),
                cloud.len() - remaining.len()
            ));
            rec.outputs.push(pass1);

            let rest = cloud.subset(&remaining)?;
            let (second, second_history) = colony(&rest, &cfg, &resolved.rewards)?;
            let lift = |values: &[f64]| {
                let mut full = vec![0.0; cloud.len()];
                for (&i, &v) in remaining.iter().zip(values) {
                    full[i] = v;
                }
                full
            };
            (lift(&second), second_history.iter().map(|h| lift(h)).collect())
        }
    };

    io::write_scores(&a.output, &scores)?;
    rec.outputs.insert(0, a.output.clone());
    if let Some(dir) = &a.snapshots {
        create_dir(dir)?;
        for (epoch, snap) in history.iter().enumerate() {
            let path = snapshot_path(dir, epoch + 1);
            io::write_scores(&path, snap)?;
            rec.outputs.push(path);
        }
    }

    rec.seed = Some(cfg.seed);
    rec.config = resolved.to_json();
    if let Some(t) = a.rerun_excluding {
        rec.config["rerun_excluding"] = t.into();
    }
    rec.inputs.push(a.input);
    if let Some(c) = a.config {
        rec.inputs.push(c);
    }
    rec.finish(a.manifest.as_deref())?;
    Ok(())
}
