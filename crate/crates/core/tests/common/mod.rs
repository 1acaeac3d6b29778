//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use laat_core::geometry::{PointCloud, PointSet};
use laat_core::markov::{KernelFlavor, TransitionKernel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn cloud(rows: &[Vec<f64>]) -> PointCloud {
    PointCloud::new(PointSet::from_rows(rows).unwrap()).unwrap()
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// eigenvalues in descending order with unit eigenvectors (as rows).
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let vals = order.iter().map(|&k| a[k][k].max(0.0)).collect();
    let vecs = order.iter().map(|&k| (0..n).map(|r| v[r][k]).collect()).collect();
    (vals, vecs)
}

/// Mean-centred population covariance of the given points.
pub fn covariance(points: &[&[f64]]) -> Vec<Vec<f64>> {
    let d = points[0].len();
    let m = points.len() as f64;
    let mean: Vec<f64> = (0..d).map(|k| points.iter().map(|p| p[k]).sum::<f64>() / m).collect();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| points.iter().map(|p| (p[a] - mean[a]) * (p[b] - mean[b])).sum::<f64>() / m)
                .collect()
        })
        .collect()
}

/// Alignment preferences of the jumps from `centre` to each of `nbrs`,
/// computed directly from the definitions with a Jacobi PCA over the
/// centre and its neighbors.
pub fn preference_from_scratch(centre: &[f64], nbrs: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<&[f64]> = vec![centre];
    all.extend_from_slice(nbrs);
    let (vals, vecs) = jacobi_eigen(covariance(&all));
    let total: f64 = vals.iter().sum();
    let lam: Vec<f64> = vals.iter().map(|l| l / total).collect();
    let raw: Vec<f64> = nbrs
        .iter()
        .map(|x| {
            let jump: Vec<f64> = x.iter().zip(centre).map(|(a, b)| a - b).collect();
            let len = jump.iter().map(|c| c * c).sum::<f64>().sqrt();
            let cos: Vec<f64> = vecs
                .iter()
                .map(|v| (v.iter().zip(&jump).map(|(a, b)| a * b).sum::<f64>() / len).abs())
                .collect();
            let s: f64 = cos.iter().sum();
            cos.iter().zip(&lam).map(|(c, l)| c / s * l).sum()
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|e| e / s).collect()
}

/// Left stationary vector of a dense row-stochastic matrix by Gaussian
/// elimination with full pivoting on `πᵀ(P − I) = 0`, `Σπ = 1`.
pub fn dense_stationary(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    // rows = equations: for each state j, Σ_i π_i (P_ij − δ_ij) = 0; last replaced by Σπ = 1
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| p[i][j] - if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut b = vec![0.0; n];
    a[n - 1] = vec![1.0; n];
    b[n - 1] = 1.0;
    let mut col_of: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, -1.0);
        for r in k..n {
            for c in k..n {
                if a[r][c].abs() > best {
                    best = a[r][c].abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        a.swap(k, pr);
        b.swap(k, pr);
        for row in a.iter_mut() {
            row.swap(k, pc);
        }
        col_of.swap(k, pc);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            if f != 0.0 {
                for c in k..n {
                    a[r][c] -= f * a[k][c];
                }
                b[r] -= f * b[k];
            }
        }
    }
    let mut y = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k][c] * y[c]).sum();
        y[k] = (b[k] - s) / a[k][k];
    }
    let mut pi = vec![0.0; n];
    for k in 0..n {
        pi[col_of[k]] = y[k];
    }
    pi
}

pub fn brute_hausdorff(x: &PointSet, y: &PointSet) -> f64 {
    let directed = |a: &PointSet, b: &PointSet| {
        a.iter()
            .map(|p| b.iter().map(|q| euclid(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(x, y).max(directed(y, x))
}

pub fn brute_average_hausdorff(x: &PointSet, y: &PointSet) -> f64 {
    let mean_min = |a: &PointSet, b: &PointSet| {
        a.iter()
            .map(|p| b.iter().map(|q| euclid(p, q)).fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            / (2.0 * a.len() as f64)
    };
    mean_min(y, x) + mean_min(x, y)
}

/// A random irreducible kernel on a symmetric graph: a ring plus random chords.
pub fn random_kernel(rng: &mut ChaCha8Rng) -> (TransitionKernel, Vec<Vec<f64>>) {
    let n = rng.random_range(2..=12);
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        let j = (i + 1) % n;
        if i != j {
            adj[i][j] = true;
            adj[j][i] = true;
        }
    }
    for _ in 0..rng.random_range(0..2 * n) {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    }
    let mut dense = vec![vec![0.0; n]; n];
    let rows = (0..n)
        .map(|i| {
            let t: Vec<u32> = (0..n).filter(|&j| adj[i][j]).map(|j| j as u32).collect();
            let w: Vec<f64> = t.iter().map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|x| x / s).collect();
            for (&j, &q) in t.iter().zip(&p) {
                dense[i][j as usize] = q;
            }
            (t, p)
        })
        .collect();
    (TransitionKernel::from_rows(KernelFlavor::Alignment, 1.0, rows).unwrap(), dense)
}

/// Uniformly random rotation matrix from a normalized Gaussian quaternion.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let q: Vec<f64> = (0..4).map(|_| StandardNormal.sample(rng)).collect();
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}
