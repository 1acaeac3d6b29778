//! Point clouds, exact radius neighborhoods and local PCA.

mod alignment;
mod cloud;
mod index;
mod kdtree;

pub use alignment::{
    alignment_preference, jump_alignment_weights, normalized_eigenvalues, AlignmentTable,
    Degeneracy,
};
pub use cloud::{dist, dist2, Attribute, PointCloud, PointSet, NOISE_LABEL};
pub use index::NeighborhoodIndex;
pub use kdtree::KdTree;
