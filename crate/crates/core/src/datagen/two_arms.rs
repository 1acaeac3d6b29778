//! Two curved, non-intersecting strips wound around a common axis like a
//! double helix, buried in uniform background noise.
//!
//! Each arm is a strip swept along a helix. The strip extends radially, widens
//! linearly from its narrow to its wide end, and has points distributed along
//! the arc length `s` with density proportional to `1 / (1 + s)`, so it is
//! densest at the narrow end. Every manifold point is pushed off the strip
//! along the surface normal by `U[0, 0.2]`.

use rand::Rng;

use super::{stream, MANIFOLD_STREAM, NOISE_STREAM};
use crate::geometry::{PointCloud, PointSet, NOISE_LABEL};

/// Geometry constants of the two-arms benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoArmsShape {
    pub helix_radius: f64,
    /// Rise per full turn.
    pub pitch: f64,
    pub turns: f64,
    pub narrow_width: f64,
    pub wide_width: f64,
    pub thickness: f64,
    pub arm_counts: [usize; 2],
    pub noise_count: usize,
    pub box_lo: [f64; 3],
    pub box_hi: [f64; 3],
}

impl TwoArmsShape {
    pub const DEFAULT: TwoArmsShape = TwoArmsShape {
        helix_radius: 1.0,
        pitch: 2.0,
        turns: 0.75,
        narrow_width: 0.3,
        wide_width: 1.0,
        thickness: 0.2,
        arm_counts: [3000, 1000],
        noise_count: 8000,
        box_lo: [-2.5, -2.5, -1.0],
        box_hi: [2.5, 2.5, 2.5],
    };

    fn speed(&self) -> f64 {
        let rise = self.pitch / std::f64::consts::TAU;
        (self.helix_radius * self.helix_radius + rise * rise).sqrt()
    }

    /// Arc length of each arm's centre curve.
    pub fn arm_length(&self) -> f64 {
        self.speed() * self.turns * std::f64::consts::TAU
    }

    /// Point of arm `arm` at arc length `s`, radial offset `w` and normal offset `e`.
    pub fn embed(&self, arm: usize, s: f64, w: f64, e: f64) -> [f64; 3] {
        let theta = s / self.speed() + arm as f64 * std::f64::consts::PI;
        let rise = self.pitch / std::f64::consts::TAU;
        let (sin, cos) = theta.sin_cos();
        let centre = [
            self.helix_radius * cos,
            self.helix_radius * sin,
            rise * (s / self.speed()),
        ];
        let radial = [cos, sin, 0.0];
        // normal = tangent × radial, tangent ∝ (−R sin, R cos, rise)
        let r = self.helix_radius;
        let normal = {
            let n = [-rise * sin, rise * cos, -r];
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            [n[0] / len, n[1] / len, n[2] / len]
        };
        [
            centre[0] + w * radial[0] + e * normal[0],
            centre[1] + w * radial[1] + e * normal[1],
            centre[2] + w * radial[2] + e * normal[2],
        ]
    }

    pub fn width_at(&self, s: f64) -> f64 {
        self.narrow_width + (self.wide_width - self.narrow_width) * s / self.arm_length()
    }
}

/// The two-arms cloud: 3000 + 1000 arm points (labels 1 and 2) and 8000
/// noise points (label 0).
pub fn two_arms(seed: u64) -> PointCloud {
    two_arms_split(seed, seed)
}

/// Latent coordinates of one arm point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSample {
    pub arm: usize,
    /// Arc length along the centre curve.
    pub s: f64,
    /// Signed offset across the strip.
    pub w: f64,
    /// Offset along the surface normal, in `[0, thickness]`.
    pub e: f64,
}

/// The latent draws behind the arm points of `two_arms_split(manifold_seed, _)`.
pub fn arm_samples(manifold_seed: u64) -> Vec<ArmSample> {
    let shape = TwoArmsShape::DEFAULT;
    let mut rng = stream(manifold_seed, MANIFOLD_STREAM);
    let length = shape.arm_length();
    let mut out = Vec::with_capacity(shape.arm_counts.iter().sum());
    for (arm, &count) in shape.arm_counts.iter().enumerate() {
        for _ in 0..count {
            // inverse CDF of density ∝ 1/(1+s) on [0, L]
            let s = (1.0 + length).powf(rng.random::<f64>()) - 1.0;
            let half = 0.5 * shape.width_at(s);
            let w = rng.random_range(-half..=half);
            let e = rng.random::<f64>() * shape.thickness;
            out.push(ArmSample { arm, s, w, e });
        }
    }
    out
}

/// Two arms drawn from `manifold_seed` with noise drawn from `noise_seed`.
pub fn two_arms_split(manifold_seed: u64, noise_seed: u64) -> PointCloud {
    let shape = TwoArmsShape::DEFAULT;
    let samples = arm_samples(manifold_seed);
    let total = samples.len() + shape.noise_count;
    let mut coords = Vec::with_capacity(3 * total);
    let mut labels = Vec::with_capacity(total);
    for a in &samples {
        coords.extend_from_slice(&shape.embed(a.arm, a.s, a.w, a.e));
        labels.push(a.arm as u32 + 1);
    }
    let mut noise = stream(noise_seed, NOISE_STREAM);
    for _ in 0..shape.noise_count {
        for k in 0..3 {
            coords.push(noise.random_range(shape.box_lo[k]..shape.box_hi[k]));
        }
        labels.push(NOISE_LABEL);
    }
    let points = PointSet::new(3, coords).expect("three coordinates per point");
    PointCloud::with_parts(points, Vec::new(), Some(labels)).expect("generated cloud is valid")
}
