//! Alignment of jump vectors with the local principal directions.
//!
//! For a jump `i → j` the weight of eigen-direction `d` is the share of
//! `|cos α_d|` among all directions; the jump preference is those weights
//! averaged against the normalized eigenvalues of `i`, then normalized over
//! the neighborhood of `i`.

use super::cloud::PointCloud;
use super::index::NeighborhoodIndex;
use crate::error::{LaatError, Result};

/// How zero-length jumps (coincident points) are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Degeneracy {
    /// Coincident neighbors get zero preference and are left out of the
    /// normalization; a neighborhood with no usable preference becomes uniform.
    #[default]
    Lenient,
    /// Any zero-length jump or all-zero spectrum is an error.
    Strict,
}

/// `w_d = |cos α_d| / Σ_d' |cos α_d'|` for the jump from `i` to `j`.
pub fn jump_alignment_weights(
    cloud: &PointCloud,
    index: &NeighborhoodIndex,
    i: usize,
    j: usize,
) -> Result<Vec<f64>> {
    let dim = index.dim();
    let mut w = vec![0.0; dim];
    if !fill_jump_weights(cloud, index, i, j, &mut w) {
        return Err(LaatError::DegenerateJump { from: i, to: j });
    }
    Ok(w)
}

/// Writes the alignment weights into `out`; false when the jump has zero length.
fn fill_jump_weights(
    cloud: &PointCloud,
    index: &NeighborhoodIndex,
    i: usize,
    j: usize,
    out: &mut [f64],
) -> bool {
    let xi = cloud.point(i);
    let xj = cloud.point(j);
    let norm = super::cloud::dist(xi, xj);
    if norm == 0.0 {
        return false;
    }
    let mut total = 0.0;
    for (d, w) in out.iter_mut().enumerate() {
        let v = index.eigenvector(i, d);
        let dot: f64 = xi.iter().zip(xj).zip(v).map(|((a, b), c)| (b - a) * c).sum();
        *w = (dot / norm).abs();
        total += *w;
    }
    // the eigenvectors span the space, so a nonzero jump has a nonzero cosine
    for w in out.iter_mut() {
        *w /= total;
    }
    true
}

/// Eigenvalues of `i` divided by their sum.
pub fn normalized_eigenvalues(index: &NeighborhoodIndex, i: usize) -> Result<Vec<f64>> {
    if !index.is_active(i) {
        return Err(LaatError::InactivePoint(i));
    }
    let vals = index.eigenvalues(i);
    let total: f64 = vals.iter().sum();
    if total <= 0.0 {
        return Err(LaatError::DegenerateNeighborhood(i));
    }
    Ok(vals.iter().map(|l| l / total).collect())
}

/// Relative preference `Ē^(i,j)` for every neighbor `j` of `i`, in neighbor-list order.
pub fn alignment_preference(
    cloud: &PointCloud,
    index: &NeighborhoodIndex,
    i: usize,
    mode: Degeneracy,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; index.neighbors(i).len()];
    fill_preference(cloud, index, i, mode, &mut out)?;
    Ok(out)
}

fn fill_preference(
    cloud: &PointCloud,
    index: &NeighborhoodIndex,
    i: usize,
    mode: Degeneracy,
    out: &mut [f64],
) -> Result<()> {
    let nbrs = index.neighbors(i);
    if !index.is_active(i) || nbrs.is_empty() {
        return Err(LaatError::InactivePoint(i));
    }
    let lambda = match normalized_eigenvalues(index, i) {
        Ok(l) => l,
        Err(e) if mode == Degeneracy::Strict => return Err(e),
        // every neighbor coincides with the centre
        Err(_) => vec![0.0; index.dim()],
    };
    let mut w = vec![0.0; index.dim()];
    let mut total = 0.0;
    for (slot, &j) in out.iter_mut().zip(nbrs) {
        let j = j as usize;
        if fill_jump_weights(cloud, index, i, j, &mut w) {
            *slot = w.iter().zip(&lambda).map(|(a, b)| a * b).sum();
            total += *slot;
        } else if mode == Degeneracy::Strict {
            return Err(LaatError::DegenerateJump { from: i, to: j });
        } else {
            *slot = 0.0;
        }
    }
    if total > 0.0 {
        out.iter_mut().for_each(|e| *e /= total);
    } else if mode == Degeneracy::Strict {
        return Err(LaatError::DegenerateNeighborhood(i));
    } else {
        let u = 1.0 / out.len() as f64;
        out.iter_mut().for_each(|e| *e = u);
    }
    Ok(())
}

/// `Ē` for every edge of the index, laid out like the index's neighbor lists.
#[derive(Debug, Clone)]
pub struct AlignmentTable {
    values: Vec<f64>,
    offsets: Vec<usize>,
}

impl AlignmentTable {
    pub fn build(cloud: &PointCloud, index: &NeighborhoodIndex, mode: Degeneracy) -> Result<Self> {
        let mut values = vec![0.0; index.edge_count()];
        for i in index.active_ids() {
            let start = index.row_offset(i);
            let end = start + index.neighbors(i).len();
            fill_preference(cloud, index, i, mode, &mut values[start..end])?;
        }
        let offsets = (0..=index.len())
            .map(|i| {
                if i == index.len() {
                    index.edge_count()
                } else {
                    index.row_offset(i)
                }
            })
            .collect();
        Ok(Self { values, offsets })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
