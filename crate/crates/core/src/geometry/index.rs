use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::cloud::PointCloud;
use super::kdtree::KdTree;
use crate::error::{LaatError, Result};

/// Radius neighborhoods with cached local PCA.
///
/// Neighbor lists are stored in compressed-row form. A point whose
/// neighborhood holds fewer than `D` other points is marked inactive and
/// dropped from every list; the removal is repeated until no such point is
/// left, so each active point keeps at least `D` neighbors.
#[derive(Debug, Clone)]
pub struct NeighborhoodIndex {
    radius: f64,
    dim: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    eigenvalues: Vec<f64>,
    // per point a D×D block, eigenvector d at [d*D..(d+1)*D]
    eigenvectors: Vec<f64>,
    active: Vec<bool>,
    size_median: f64,
}

impl NeighborhoodIndex {
    pub fn build(cloud: &PointCloud, radius: f64) -> Result<Self> {
        let tree = KdTree::build(cloud.points());
        Self::build_with(cloud, radius, |i| {
            let mut hits = tree.within_radius(cloud.point(i), radius);
            hits.retain(|&j| j != i);
            hits
        })
    }

    /// O(n²) reference construction used to check the tree-backed one.
    pub fn build_brute_force(cloud: &PointCloud, radius: f64) -> Result<Self> {
        let n = cloud.len();
        let r2 = radius * radius;
        Self::build_with(cloud, radius, |i| {
            (0..n)
                .filter(|&j| j != i && super::cloud::dist2(cloud.point(i), cloud.point(j)) <= r2)
                .collect()
        })
    }

    fn build_with<F>(cloud: &PointCloud, radius: f64, query: F) -> Result<Self>
    where
        F: Fn(usize) -> Vec<usize> + Sync,
    {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LaatError::invalid(format!(
                "neighborhood radius must be positive, got {radius}"
            )));
        }
        let n = cloud.len();
        let dim = cloud.dim();
        let mut lists: Vec<Vec<usize>> = (0..n).into_par_iter().map(&query).collect();

        let mut active = vec![true; n];
        let mut degree: Vec<usize> = lists.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| degree[i] < dim).collect();
        for &i in &queue {
            active[i] = false;
        }
        while let Some(i) = queue.pop() {
            for &j in &lists[i] {
                if active[j] {
                    degree[j] -= 1;
                    if degree[j] < dim {
                        active[j] = false;
                        queue.push(j);
                    }
                }
            }
        }
        if !active.iter().any(|&a| a) {
            return Err(LaatError::EmptyAfterFilter { min_size: dim });
        }
        for (i, list) in lists.iter_mut().enumerate() {
            if active[i] {
                list.retain(|&j| active[j]);
            } else {
                list.clear();
            }
        }

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        for list in &lists {
            neighbors.extend(list.iter().map(|&j| j as u32));
            offsets.push(neighbors.len());
        }

        let pca: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                if active[i] {
                    local_pca(cloud, i, &lists[i])
                } else {
                    (vec![0.0; dim], vec![0.0; dim * dim])
                }
            })
            .collect();
        let mut eigenvalues = Vec::with_capacity(n * dim);
        let mut eigenvectors = Vec::with_capacity(n * dim * dim);
        for (vals, vecs) in pca {
            eigenvalues.extend(vals);
            eigenvectors.extend(vecs);
        }

        let mut sizes: Vec<usize> = (0..n).filter(|&i| active[i]).map(|i| lists[i].len()).collect();
        sizes.sort_unstable();
        let m = sizes.len();
        let size_median = if m % 2 == 1 {
            sizes[m / 2] as f64
        } else {
            (sizes[m / 2 - 1] + sizes[m / 2]) as f64 / 2.0
        };

        Ok(Self {
            radius,
            dim,
            offsets,
            neighbors,
            eigenvalues,
            eigenvectors,
            active,
            size_median,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Offset of point `i`'s row in edge-aligned per-neighbor tables.
    #[inline]
    pub fn row_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len()
    }

    #[inline]
    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn active_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i)
    }

    /// Median neighborhood size over active points.
    pub fn size_median(&self) -> f64 {
        self.size_median
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|i| self.neighbors(i).len()).max().unwrap_or(0)
    }

    /// Local eigenvalues of point `i`, largest first.
    pub fn eigenvalues(&self, i: usize) -> &[f64] {
        &self.eigenvalues[i * self.dim..(i + 1) * self.dim]
    }

    /// Unit eigenvector `d` of point `i`, matching `eigenvalues(i)[d]`.
    pub fn eigenvector(&self, i: usize, d: usize) -> &[f64] {
        let base = i * self.dim * self.dim + d * self.dim;
        &self.eigenvectors[base..base + self.dim]
    }

    /// Replaces the local basis of point `i`. Used to probe invariance of the
    /// alignment preference under sign flips and in-eigenspace rotations.
    pub fn set_eigenvectors(&mut self, i: usize, vectors: &[Vec<f64>]) {
        let d = self.dim;
        assert_eq!(vectors.len(), d);
        for (k, v) in vectors.iter().enumerate() {
            assert_eq!(v.len(), d);
            let base = i * d * d + k * d;
            self.eigenvectors[base..base + d].copy_from_slice(v);
        }
    }

    /// Connected components of the active neighborhood graph, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for s in self.active_ids() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(i) = queue.pop_front() {
                comp.push(i);
                for &j in self.neighbors(i) {
                    let j = j as usize;
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Mean-centred covariance (1/m) of the neighborhood plus the centre point,
/// eigen-decomposed and sorted by decreasing eigenvalue.
fn local_pca(cloud: &PointCloud, i: usize, neighbors: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let dim = cloud.dim();
    let m = neighbors.len() + 1;
    let mut mean = vec![0.0; dim];
    for p in std::iter::once(i).chain(neighbors.iter().copied()) {
        for (acc, c) in mean.iter_mut().zip(cloud.point(p)) {
            *acc += c;
        }
    }
    mean.iter_mut().for_each(|c| *c /= m as f64);
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    for p in std::iter::once(i).chain(neighbors.iter().copied()) {
        let x = cloud.point(p);
        for a in 0..dim {
            let da = x[a] - mean[a];
            for b in a..dim {
                cov[(a, b)] += da * (x[b] - mean[b]);
            }
        }
    }
    for a in 0..dim {
        for b in a..dim {
            let v = cov[(a, b)] / m as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut values = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim * dim);
    for &k in &order {
        values.push(eig.eigenvalues[k].max(0.0));
        vectors.extend(eig.eigenvectors.column(k).iter().copied());
    }
    (values, vectors)
}
