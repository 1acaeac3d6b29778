use laat_core::metrics::{ahd_at_threshold, convergence_curve, ground_truth, pr_curve, threshold_sweep};
use laat_core::{LaatError, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{read_cloud, read_scores, snapshot_files, usage_if_any, write_report};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::{CalibrateArgs, ConvergenceArgs, EvaluateCommand, PrArgs, ScoredCloud, SweepArgs};

pub fn evaluate(c: EvaluateCommand) -> CliResult<()> {
    match c {
        EvaluateCommand::Sweep(a) => sweep(a),
        EvaluateCommand::Calibrate(a) => calibrate(a),
        EvaluateCommand::Pr(a) => pr(a),
        EvaluateCommand::Convergence(a) => convergence(a),
    }
}

fn load(common: &ScoredCloud) -> CliResult<(Vec<f64>, PointCloud)> {
    let scores = read_scores(&common.scores)?;
    let cloud = read_cloud(&common.cloud)?;
    if scores.len() != cloud.len() {
        return Err(LaatError::LengthMismatch {
            what: "score vector",
            got: scores.len(),
            expected: cloud.len(),
        }
        .into());
    }
    Ok((scores, cloud))
}

fn finish(mut rec: Recorder, common: ScoredCloud) -> CliResult<()> {
    rec.inputs.push(common.scores);
    rec.inputs.push(common.cloud);
    rec.outputs.push(common.output);
    rec.finish(common.manifest.as_deref())?;
    Ok(())
}

fn sweep(a: SweepArgs) -> CliResult<()> {
    let mut rec = Recorder::new("evaluate sweep");
    let (scores, cloud) = load(&a.common)?;
    let truth = ground_truth(&cloud)?;
    let report = threshold_sweep(&scores, &truth, &cloud)?;
    write_report(&a.common.output, &report.to_csv())?;
    rec.notes.push(format!(
        "minimum AHD {:e} at threshold {:e} with {} survivors",
        report.best.ahd, report.best.threshold, report.best.survivors
    ));
    finish(rec, a.common)
}

/// Ids inside a random axis-aligned box whose volume is `fraction` of the
/// bounding box, with the same aspect ratio.
fn random_cube(cloud: &PointCloud, fraction: f64, seed: u64) -> (Vec<usize>, Vec<(f64, f64)>) {
    let (lo, hi) = cloud.bounds();
    let scale = fraction.powf(1.0 / cloud.dim() as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds: Vec<(f64, f64)> = lo
        .iter()
        .zip(&hi)
        .map(|(&l, &h)| {
            let side = (h - l) * scale;
            let start = l + rng.random::<f64>() * (h - l - side);
            (start, start + side)
        })
        .collect();
    let ids = (0..cloud.len())
        .filter(|&i| {
            cloud
                .point(i)
                .iter()
                .zip(&bounds)
                .all(|(&x, &(l, h))| x >= l && x <= h)
        })
        .collect();
    (ids, bounds)
}

fn calibrate(a: CalibrateArgs) -> CliResult<()> {
    let mut rec = Recorder::new("evaluate calibrate");
    if let Some(f) = a.cube_fraction {
        if !(f > 0.0 && f <= 1.0) {
            return Err(CliError::usage(format!("cube-fraction must lie in (0, 1], got {f}")));
        }
    }
    let (scores, cloud) = load(&a.common)?;
    let (scores, cloud) = match a.cube_fraction {
        None => (scores, cloud),
        Some(f) => {
            let (ids, bounds) = random_cube(&cloud, f, a.cube_seed);
            if ids.is_empty() {
                return Err(CliError::data("the calibration cube holds no points"));
            }
            rec.notes.push(format!(
                "calibrated on {} points inside the cube {:?} (fraction {f}, seed {})",
                ids.len(),
                bounds,
                a.cube_seed
            ));
            (ids.iter().map(|&i| scores[i]).collect(), cloud.subset(&ids)?)
        }
    };
    let truth = ground_truth(&cloud)?;
    let best = threshold_sweep(&scores, &truth, &cloud)?.best;
    let mut report = String::from("set,threshold,survivors,ahd\n");
    report.push_str(&format!("calibration,{:e},{},{:e}\n", best.threshold, best.survivors, best.ahd));

    if let (Some(sp), Some(cp)) = (&a.apply_scores, &a.apply_cloud) {
        let scores = read_scores(sp)?;
        let cloud = read_cloud(cp)?;
        let truth = ground_truth(&cloud)?;
        let ahd = ahd_at_threshold(&scores, best.threshold, &truth, &cloud)?;
        let survivors = scores.iter().filter(|&&s| s >= best.threshold).count();
        report.push_str(&format!("applied,{:e},{survivors},{ahd:e}\n", best.threshold));
        rec.inputs.push(sp.clone());
        rec.inputs.push(cp.clone());
    }
    write_report(&a.common.output, &report)?;
    rec.config = json!({
        "cube_fraction": a.cube_fraction,
        "cube_seed": a.cube_fraction.map(|_| a.cube_seed),
    });
    finish(rec, a.common)
}

fn pr(a: PrArgs) -> CliResult<()> {
    let mut rec = Recorder::new("evaluate pr");
    usage_if_any(
        a.counts
            .iter()
            .filter(|&&c| c == 0)
            .map(|_| "counts must be positive".to_string())
            .take(1)
            .collect(),
    )?;
    let (scores, cloud) = load(&a.common)?;
    let labels = cloud
        .labels()
        .ok_or_else(|| CliError::data(format!("{} carries no labels", a.common.cloud.display())))?;
    let positives: Vec<bool> = labels
        .iter()
        .map(|l| {
            if a.positive_labels.is_empty() {
                *l != 0
            } else {
                a.positive_labels.contains(l)
            }
        })
        .collect();
    let curve = pr_curve(&scores, &positives, &a.counts)?;
    write_report(&a.common.output, &curve.to_csv())?;
    rec.config = json!({ "counts": a.counts, "positive_labels": a.positive_labels });
    finish(rec, a.common)
}

fn convergence(a: ConvergenceArgs) -> CliResult<()> {
    let mut rec = Recorder::new("evaluate convergence");
    let cal_cloud = read_cloud(&a.calibration_cloud)?;
    let eval_cloud = read_cloud(&a.cloud)?;
    let cal_files = snapshot_files(&a.calibration_snapshots)?;
    let eval_files = snapshot_files(&a.snapshots)?;
    let cal: Vec<Vec<f64>> = cal_files.iter().map(|p| read_scores(p)).collect::<CliResult<_>>()?;
    let eval: Vec<Vec<f64>> = eval_files.iter().map(|p| read_scores(p)).collect::<CliResult<_>>()?;
    let curve = convergence_curve(&cal_cloud, &cal, &eval_cloud, &eval)?;

    let mut report = String::from("epoch,ahd\n");
    for (epoch, ahd) in &curve {
        report.push_str(&format!("{epoch},{ahd:e}\n"));
    }
    write_report(&a.output, &report)?;
    rec.inputs.push(a.calibration_cloud);
    rec.inputs.push(a.cloud);
    rec.inputs.extend(cal_files);
    rec.inputs.extend(eval_files);
    rec.outputs.push(a.output);
    rec.finish(a.manifest.as_deref())?;
    Ok(())
}
