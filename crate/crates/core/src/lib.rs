//! Manifold extraction from noisy point clouds with locally aligned ant
//! walks, a Markov-chain baseline, Hausdorff-based evaluation and seeded
//! synthetic benchmarks.

pub mod datagen;
pub mod error;
pub mod geometry;
pub mod io;
pub mod laat;
pub mod markov;
pub mod metrics;
pub mod softmax;

pub use error::{LaatError, Result};
pub use geometry::{NeighborhoodIndex, PointCloud, PointSet};
pub use laat::{run_laat, LaatConfig, PheromoneField};
