//! Seeded generators for labeled synthetic benchmarks.
//!
//! Every generator draws its manifold points and its background noise from
//! separate random streams, so a calibration twin (same manifolds, fresh
//! noise) is obtained by changing only the noise seed.

mod cylinders;
mod two_arms;
mod voronoi;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use cylinders::{four_cylinders, four_cylinders_split, Cylinder, CYLINDERS, CYLINDER_BOX};
pub use two_arms::{arm_samples, two_arms, two_arms_split, ArmSample, TwoArmsShape};
pub use voronoi::{
    is_positive, voronoi_web, web_diagram, VoronoiDiagram, VoronoiSpec, WallPolygon, CLUSTER_LABEL,
    FILAMENT_LABEL, VOID_LABEL, WALL_LABEL,
};

use std::fmt;
use std::str::FromStr;

use crate::error::LaatError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    TwoArms,
    FourCylinders,
    VoronoiWeb,
}

impl FromStr for Family {
    type Err = LaatError;

    fn from_str(s: &str) -> Result<Self, LaatError> {
        match s {
            "two-arms" => Ok(Family::TwoArms),
            "four-cylinders" => Ok(Family::FourCylinders),
            "voronoi-web" => Ok(Family::VoronoiWeb),
            _ => Err(LaatError::invalid(format!(
                "unknown family `{s}` (expected two-arms, four-cylinders or voronoi-web)"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::TwoArms => "two-arms",
            Family::FourCylinders => "four-cylinders",
            Family::VoronoiWeb => "voronoi-web",
        })
    }
}

const MANIFOLD_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
