//! Ground-truth evaluation: Hausdorff distances, threshold sweeps, threshold
//! calibration, precision/recall at matched survivor counts and per-epoch
//! convergence curves.

use crate::error::{LaatError, Result};
use crate::geometry::{dist, KdTree, PointCloud, PointSet};

/// Beyond this many points a sweep visits quantiles instead of every distinct score.
pub const FULL_SWEEP_LIMIT: usize = 50_000;
pub const SWEEP_QUANTILES: usize = 2000;

fn check_sets(x: &PointSet, y: &PointSet) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(LaatError::invalid("Hausdorff distances need two nonempty sets"));
    }
    if x.dim() != y.dim() {
        return Err(LaatError::invalid(format!(
            "point sets differ in dimension ({} vs {})",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}

/// Sum and maximum of nearest-neighbor distances from each point of `from` to `to`.
fn directed(from: &PointSet, to: &KdTree) -> (f64, f64) {
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    for p in from.iter() {
        let (_, d) = to.nearest(p).expect("nonempty tree");
        sum += d;
        max = max.max(d);
    }
    (sum, max)
}

/// Hausdorff distance: the larger of the two directed sup-inf distances.
pub fn hausdorff(x: &PointSet, y: &PointSet) -> Result<f64> {
    check_sets(x, y)?;
    let (_, xy) = directed(x, &KdTree::build(y));
    let (_, yx) = directed(y, &KdTree::build(x));
    Ok(xy.max(yx))
}

/// Average Hausdorff distance: half the mean distance from `Y` to `X` plus
/// half the mean distance from `X` to `Y`.
pub fn average_hausdorff(x: &PointSet, y: &PointSet) -> Result<f64> {
    check_sets(x, y)?;
    let (sum_y, _) = directed(y, &KdTree::build(x));
    let (sum_x, _) = directed(x, &KdTree::build(y));
    Ok(sum_y / (2.0 * y.len() as f64) + sum_x / (2.0 * x.len() as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepEntry {
    pub threshold: f64,
    pub survivors: usize,
    pub ahd: f64,
}

/// AHD between survivors and ground truth as the threshold is lowered.
#[derive(Debug, Clone, PartialEq)]
pub struct AhdReport {
    /// Entries by decreasing threshold.
    pub sweep: Vec<SweepEntry>,
    pub best: SweepEntry,
}

impl AhdReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("threshold,survivors,ahd\n");
        for e in &self.sweep {
            s.push_str(&format!("{:e},{},{:e}\n", e.threshold, e.survivors, e.ahd));
        }
        s
    }
}

/// Point ids ordered by decreasing score, ties by ascending id.
pub fn rank_by_score(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Lowers the threshold from the largest score to the smallest and records
/// the AHD between the surviving points and `ground_truth` at each step.
///
/// Every distinct score is a step for clouds up to [`FULL_SWEEP_LIMIT`]
/// points; larger clouds are visited at [`SWEEP_QUANTILES`] evenly spaced
/// survivor counts.
pub fn threshold_sweep(scores: &[f64], ground_truth: &PointSet, cloud: &PointCloud) -> Result<AhdReport> {
    let n = cloud.len();
    if scores.len() != n {
        return Err(LaatError::LengthMismatch {
            what: "score vector",
            got: scores.len(),
            expected: n,
        });
    }
    check_sets(ground_truth, cloud.points())?;
    let gt_tree = KdTree::build(ground_truth);
    let to_truth: Vec<f64> = cloud
        .points()
        .iter()
        .map(|p| gt_tree.nearest(p).expect("nonempty").1)
        .collect();

    let order = rank_by_score(scores);
    let n_gt = ground_truth.len();
    // distance from each truth point to the nearest survivor so far
    let mut nearest = vec![f64::INFINITY; n_gt];
    let mut open: Vec<usize> = (0..n_gt).collect();
    let mut survivor_sum = 0.0;

    let mut next_target = 1usize;
    let quantile_step = if n > FULL_SWEEP_LIMIT {
        Some(n as f64 / SWEEP_QUANTILES as f64)
    } else {
        None
    };

    let mut sweep = Vec::new();
    let mut pos = 0;
    while pos < n {
        let value = scores[order[pos]];
        let mut end = pos;
        while end < n && scores[order[end]] == value {
            let y = cloud.point(order[end]);
            survivor_sum += to_truth[order[end]];
            open.retain(|&x| {
                let d = dist(ground_truth.point(x), y);
                if d < nearest[x] {
                    nearest[x] = d;
                }
                nearest[x] > 0.0
            });
            end += 1;
        }
        pos = end;
        let take = match quantile_step {
            None => true,
            Some(step) => {
                let due = (next_target as f64 * step).ceil() as usize;
                if pos >= due || pos == n {
                    while (next_target as f64 * step).ceil() as usize <= pos {
                        next_target += 1;
                    }
                    true
                } else {
                    false
                }
            }
        };
        if take {
            let truth_sum: f64 = nearest.iter().sum();
            let ahd = survivor_sum / (2.0 * pos as f64) + truth_sum / (2.0 * n_gt as f64);
            sweep.push(SweepEntry {
                threshold: value,
                survivors: pos,
                ahd,
            });
        }
    }
    let best = *sweep
        .iter()
        .min_by(|a, b| a.ahd.total_cmp(&b.ahd))
        .expect("at least one sweep entry");
    Ok(AhdReport { sweep, best })
}

/// Ground-truth manifold points of a labeled cloud.
pub fn ground_truth(cloud: &PointCloud) -> Result<PointSet> {
    let ids = cloud
        .manifold_ids()
        .ok_or_else(|| LaatError::invalid("cloud carries no labels"))?;
    if ids.is_empty() {
        return Err(LaatError::invalid("cloud has no manifold points"));
    }
    Ok(cloud.points().select(&ids))
}

/// Runs a scoring method on a labeled calibration cloud and returns the
/// threshold with the lowest AHD to that cloud's ground truth.
pub fn calibrate_threshold<F>(runner: F, calibration: &PointCloud) -> Result<f64>
where
    F: FnOnce(&PointCloud) -> Result<Vec<f64>>,
{
    let truth = ground_truth(calibration)?;
    let scores = runner(calibration)?;
    Ok(threshold_sweep(&scores, &truth, calibration)?.best.threshold)
}

/// AHD between the points scoring at least `threshold` and the ground truth.
pub fn ahd_at_threshold(scores: &[f64], threshold: f64, ground_truth: &PointSet, cloud: &PointCloud) -> Result<f64> {
    if scores.len() != cloud.len() {
        return Err(LaatError::LengthMismatch {
            what: "score vector",
            got: scores.len(),
            expected: cloud.len(),
        });
    }
    let survivors: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] >= threshold).collect();
    if survivors.is_empty() {
        return Err(LaatError::NoSurvivors(threshold));
    }
    average_hausdorff(ground_truth, &cloud.points().select(&survivors))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrEntry {
    pub survivors: usize,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PrCurve {
    pub entries: Vec<PrEntry>,
}

impl PrCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("survivors,precision,recall\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", e.survivors, e.precision, e.recall));
        }
        s
    }
}

/// Precision and recall of the `target` best-scoring points. Recall is 0
/// when there are no positives.
pub fn precision_recall_at_count(scores: &[f64], positives: &[bool], target: usize) -> Result<(f64, f64)> {
    let curve = pr_curve(scores, positives, &[target])?;
    let e = curve.entries[0];
    Ok((e.precision, e.recall))
}

/// Precision/recall at each requested survivor count.
pub fn pr_curve(scores: &[f64], positives: &[bool], counts: &[usize]) -> Result<PrCurve> {
    let n = scores.len();
    if positives.len() != n {
        return Err(LaatError::LengthMismatch {
            what: "label vector",
            got: positives.len(),
            expected: n,
        });
    }
    if let Some(&bad) = counts.iter().find(|&&c| c == 0 || c > n) {
        return Err(LaatError::invalid(format!(
            "survivor count must lie in [1, {n}], got {bad}"
        )));
    }
    let order = rank_by_score(scores);
    let mut tp_prefix = Vec::with_capacity(n + 1);
    tp_prefix.push(0usize);
    for &i in &order {
        tp_prefix.push(tp_prefix.last().unwrap() + positives[i] as usize);
    }
    let total_pos = tp_prefix[n];
    let entries = counts
        .iter()
        .map(|&k| {
            let tp = tp_prefix[k] as f64;
            PrEntry {
                survivors: k,
                precision: tp / k as f64,
                recall: if total_pos == 0 { 0.0 } else { tp / total_pos as f64 },
            }
        })
        .collect();
    Ok(PrCurve { entries })
}

/// Per-epoch AHD: each epoch's threshold is calibrated on the calibration
/// run's snapshot of that epoch and applied to the evaluation snapshot.
pub fn convergence_curve(
    calibration: &PointCloud,
    calibration_snapshots: &[Vec<f64>],
    evaluation: &PointCloud,
    evaluation_snapshots: &[Vec<f64>],
) -> Result<Vec<(usize, f64)>> {
    if calibration_snapshots.len() != evaluation_snapshots.len() {
        return Err(LaatError::LengthMismatch {
            what: "evaluation snapshots",
            got: evaluation_snapshots.len(),
            expected: calibration_snapshots.len(),
        });
    }
    let cal_truth = ground_truth(calibration)?;
    let eval_truth = ground_truth(evaluation)?;
    calibration_snapshots
        .iter()
        .zip(evaluation_snapshots)
        .enumerate()
        .map(|(epoch, (cal, eval))| {
            let threshold = threshold_sweep(cal, &cal_truth, calibration)?.best.threshold;
            let ahd = ahd_at_threshold(eval, threshold, &eval_truth, evaluation)?;
            Ok((epoch + 1, ahd))
        })
        .collect()
}
