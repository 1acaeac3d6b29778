//! Fixed transition kernels over the neighborhood graph and their stationary vectors.
//!
//! With the pheromone term switched off the ant walk is a time-homogeneous
//! Markov chain; its stationary vector is the long-run visitation frequency
//! and serves as an analytic baseline for the colony.

use std::fmt;

use crate::error::{LaatError, Result};
use crate::geometry::{dist, AlignmentTable, Degeneracy, NeighborhoodIndex, PointCloud};
use crate::softmax::softmax_into;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFlavor {
    /// Softmax over the alignment preference.
    Alignment,
    /// Softmax over normalized proximity `1 − ‖x_j − x_i‖ / r`.
    Distance,
}

impl fmt::Display for KernelFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelFlavor::Alignment => write!(f, "alignment"),
            KernelFlavor::Distance => write!(f, "distance"),
        }
    }
}

impl std::str::FromStr for KernelFlavor {
    type Err = LaatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alignment" => Ok(KernelFlavor::Alignment),
            "distance" => Ok(KernelFlavor::Distance),
            _ => Err(LaatError::invalid(format!(
                "kernel flavor must be `alignment` or `distance`, got `{s}`"
            ))),
        }
    }
}

/// Row-stochastic jump probabilities, one row per point, sparse over the
/// neighborhood graph. Inactive points have empty rows.
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    flavor: KernelFlavor,
    beta: f64,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    probs: Vec<f64>,
}

impl TransitionKernel {
    /// Builds a kernel from explicit rows `(targets, probabilities)`.
    pub fn from_rows(flavor: KernelFlavor, beta: f64, rows: Vec<(Vec<u32>, Vec<f64>)>) -> Result<Self> {
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        let mut probs = Vec::new();
        for (i, (t, p)) in rows.into_iter().enumerate() {
            if t.len() != p.len() {
                return Err(LaatError::invalid(format!("row {i} has mismatched lengths")));
            }
            targets.extend(t);
            probs.extend(p);
            offsets.push(targets.len());
        }
        let n = offsets.len() - 1;
        if let Some(&bad) = targets.iter().find(|&&t| t as usize >= n) {
            return Err(LaatError::invalid(format!("transition to unknown state {bad}")));
        }
        Ok(Self {
            flavor,
            beta,
            offsets,
            targets,
            probs,
        })
    }

    pub fn flavor(&self) -> KernelFlavor {
        self.flavor
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn targets(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.probs[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Connected components over states with nonempty rows, treating
    /// transitions as undirected edges.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for &j in self.targets(i) {
                adj[i].push(j as usize);
                adj[j as usize].push(i);
            }
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || self.targets(s).is_empty() {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(i) = stack.pop() {
                comp.push(i);
                for &j in &adj[i] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// `‖xᵀP − xᵀ‖₁` for a vector over all states.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.len()];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (&j, &p) in self.targets(i).iter().zip(self.row(i)) {
                y[j as usize] += xi * p;
            }
        }
        y.iter().zip(x).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// `P(j|i) ∝ exp(β·Ē^(i,j))` over the neighborhood of each active point.
pub fn alignment_kernel(cloud: &PointCloud, index: &NeighborhoodIndex, beta: f64) -> Result<TransitionKernel> {
    alignment_kernel_with(cloud, index, beta, Degeneracy::Lenient)
}

pub fn alignment_kernel_with(
    cloud: &PointCloud,
    index: &NeighborhoodIndex,
    beta: f64,
    mode: Degeneracy,
) -> Result<TransitionKernel> {
    check_beta(beta)?;
    let table = AlignmentTable::build(cloud, index, mode)?;
    kernel_from_scores(index, KernelFlavor::Alignment, beta, |i| table.row(i).to_vec())
}

/// `P(j|i) ∝ exp(β·D̄^(i,j))` with `D̄` the normalized proximity `1 − d/r`.
pub fn distance_kernel(cloud: &PointCloud, index: &NeighborhoodIndex, beta: f64) -> Result<TransitionKernel> {
    check_beta(beta)?;
    let r = index.radius();
    kernel_from_scores(index, KernelFlavor::Distance, beta, |i| {
        let xi = cloud.point(i);
        let scores: Vec<f64> = index
            .neighbors(i)
            .iter()
            .map(|&j| 1.0 - dist(xi, cloud.point(j as usize)) / r)
            .collect();
        let total: f64 = scores.iter().sum();
        if total > 0.0 {
            scores.iter().map(|s| s / total).collect()
        } else {
            // every neighbor sits exactly on the radius
            vec![1.0 / scores.len() as f64; scores.len()]
        }
    })
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(LaatError::invalid(format!("beta must be positive, got {beta}")))
    }
}

fn kernel_from_scores<F>(index: &NeighborhoodIndex, flavor: KernelFlavor, beta: f64, scores: F) -> Result<TransitionKernel>
where
    F: Fn(usize) -> Vec<f64>,
{
    let rows = (0..index.len())
        .map(|i| {
            if !index.is_active(i) {
                return (Vec::new(), Vec::new());
            }
            let s = scores(i);
            let mut p = vec![0.0; s.len()];
            softmax_into(beta, &s, &mut p);
            (index.neighbors(i).to_vec(), p)
        })
        .collect();
    TransitionKernel::from_rows(flavor, beta, rows)
}

/// Stationary visitation vector of one connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryVector {
    /// One entry per point; zero outside the analysed component.
    pub pi: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl StationaryVector {
    pub fn scores(&self) -> &[f64] {
        &self.pi
    }
}

/// Power iteration for the left dominant eigenvector of a single-component kernel.
pub fn stationary_vector(kernel: &TransitionKernel, tol: f64, max_iter: usize) -> Result<StationaryVector> {
    let comps = kernel.components();
    match comps.len() {
        0 => Err(LaatError::invalid("kernel has no states with transitions")),
        1 => stationary_on(kernel, &comps[0], tol, max_iter),
        k => Err(LaatError::MultipleComponents { components: k }),
    }
}

/// Transitions among `states` in local numbering.
struct LocalChain {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    probs: Vec<f64>,
}

impl LocalChain {
    fn new(kernel: &TransitionKernel, states: &[usize]) -> Result<Self> {
        let mut local = vec![usize::MAX; kernel.len()];
        for (k, &s) in states.iter().enumerate() {
            local[s] = k;
        }
        let mut offsets = Vec::with_capacity(states.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut probs = Vec::new();
        for &s in states {
            for (&j, &p) in kernel.targets(s).iter().zip(kernel.row(s)) {
                let lj = local[j as usize];
                if lj == usize::MAX {
                    return Err(LaatError::invalid(format!(
                        "state {s} leaves the analysed component"
                    )));
                }
                targets.push(lj);
                probs.push(p);
            }
            offsets.push(targets.len());
        }
        Ok(Self {
            offsets,
            targets,
            probs,
        })
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `y = xP`
    fn step(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (k, &xk) in x.iter().enumerate() {
            for e in self.offsets[k]..self.offsets[k + 1] {
                y[self.targets[e]] += xk * self.probs[e];
            }
        }
    }

    /// Sparse LU solve of `xᵀ(I − P) = 0` with the last state pinned to 1,
    /// normalized to sum 1. `None` if the factorization fails or the result
    /// is not a distribution.
    fn direct_solve(&self) -> Option<Vec<f64>> {
        use faer::sparse::{SparseColMat, Triplet};
        use faer::linalg::solvers::Solve;

        let m = self.len();
        if m == 1 {
            return Some(vec![1.0]);
        }
        let pinned = m - 1;
        // rows: equations for states 0..m-1 (column j of I − P), unknowns x_0..x_{m-2}
        let mut entries = Vec::with_capacity(self.targets.len() + m);
        let mut rhs = vec![0.0; m - 1];
        for k in 0..m - 1 {
            entries.push(Triplet::new(k, k, 1.0));
        }
        for k in 0..m {
            for e in self.offsets[k]..self.offsets[k + 1] {
                let j = self.targets[e];
                if j == pinned {
                    continue;
                }
                if k == pinned {
                    rhs[j] += self.probs[e];
                } else {
                    entries.push(Triplet::new(j, k, -self.probs[e]));
                }
            }
        }
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(m - 1, m - 1, &entries).ok()?;
        let lu = a.sp_lu().ok()?;
        let b = faer::Mat::from_fn(m - 1, 1, |i, _| rhs[i]);
        let sol = lu.solve(&b);
        let mut x: Vec<f64> = (0..m - 1).map(|i| sol[(i, 0)]).collect();
        x.push(1.0);
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        x.iter_mut().for_each(|v| *v = v.max(0.0));
        let total: f64 = x.iter().sum();
        (total > 0.0).then(|| x.into_iter().map(|v| v / total).collect())
    }
}

/// Stationary vector of the chain restricted to `states`, which must be
/// closed under the kernel.
///
/// The start vector comes from a sparse direct solve, which removes the
/// dependence on the spectral gap; the power iteration then certifies
/// `‖xP − x‖₁ ≤ tol`. If the direct solve fails the iteration starts from
/// the uniform vector.
pub fn stationary_on(kernel: &TransitionKernel, states: &[usize], tol: f64, max_iter: usize) -> Result<StationaryVector> {
    check_budget(tol, max_iter)?;
    let chain = LocalChain::new(kernel, states)?;
    let start = chain.direct_solve();
    iterate(&chain, kernel.len(), states, start, tol, max_iter)
}

/// Plain power iteration restricted to `states` from the uniform vector.
///
/// Iterates the lazy chain `x ← (x + xP) / 2`, which has the same fixed
/// point as `P` but no periodic orbits, and stops once `‖xP − x‖₁ ≤ tol`.
pub fn power_iteration(kernel: &TransitionKernel, states: &[usize], tol: f64, max_iter: usize) -> Result<StationaryVector> {
    check_budget(tol, max_iter)?;
    let chain = LocalChain::new(kernel, states)?;
    iterate(&chain, kernel.len(), states, None, tol, max_iter)
}

fn check_budget(tol: f64, max_iter: usize) -> Result<()> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(LaatError::invalid("tolerance and iteration cap must be positive"));
    }
    Ok(())
}

fn iterate(
    chain: &LocalChain,
    n: usize,
    states: &[usize],
    start: Option<Vec<f64>>,
    tol: f64,
    max_iter: usize,
) -> Result<StationaryVector> {
    let m = chain.len();
    let mut x = start.unwrap_or_else(|| vec![1.0 / m as f64; m]);
    let mut y = vec![0.0; m];
    let mut residual = f64::INFINITY;
    for iter in 0..max_iter {
        chain.step(&x, &mut y);
        residual = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        if residual <= tol {
            let mut pi = vec![0.0; n];
            for (k, &s) in states.iter().enumerate() {
                pi[s] = x[k];
            }
            return Ok(StationaryVector {
                pi,
                residual,
                iterations: iter + 1,
            });
        }
        let mut total = 0.0;
        for (a, b) in x.iter_mut().zip(&y) {
            *a = 0.5 * (*a + b);
            total += *a;
        }
        x.iter_mut().for_each(|v| *v /= total);
    }
    Err(LaatError::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Stationary vector of every component, one per component.
pub fn stationary_per_component(
    kernel: &TransitionKernel,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<(Vec<usize>, StationaryVector)>> {
    kernel
        .components()
        .into_iter()
        .map(|c| {
            let v = stationary_on(kernel, &c, tol, max_iter)?;
            Ok((c, v))
        })
        .collect()
}

/// Visitation scores over the whole cloud: each component's stationary
/// vector scaled by the component's share of all transitions (its edge
/// volume). For a walk with near-uniform rows the stationary vector is
/// close to degree over volume, so this scaling makes scores comparable
/// across components as if they were one chain.
pub fn visitation_scores(kernel: &TransitionKernel, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let parts = stationary_per_component(kernel, tol, max_iter)?;
    let volume = |c: &[usize]| c.iter().map(|&s| kernel.targets(s).len()).sum::<usize>();
    let total: usize = parts.iter().map(|(c, _)| volume(c)).sum();
    let mut scores = vec![0.0; kernel.len()];
    for (comp, v) in parts {
        let share = volume(&comp) as f64 / total as f64;
        for &s in &comp {
            scores[s] = v.pi[s] * share;
        }
    }
    Ok(scores)
}

/// Points whose score reaches `threshold`, in ascending id order.
pub fn threshold_by_visitation(scores: &[f64], threshold: f64) -> Vec<usize> {
    scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= threshold)
        .map(|(i, _)| i)
        .collect()
}
