//! Four hollow cylinders of different size, 1000 surface points each, in
//! 5000 uniform noise points. The two vertical cylinders share a radius and
//! differ in height; no thickness noise is added.

use rand::Rng;

use super::{stream, MANIFOLD_STREAM, NOISE_STREAM};
use crate::geometry::{PointCloud, PointSet, NOISE_LABEL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    /// Centre of the bottom cap.
    pub base: [f64; 3],
    /// Unit axis direction.
    pub axis: [f64; 3],
    pub radius: f64,
    pub height: f64,
}

impl Cylinder {
    pub fn area(&self) -> f64 {
        std::f64::consts::TAU * self.radius * self.height
    }

    /// Two unit vectors completing `axis` to an orthonormal frame.
    pub fn frame(&self) -> ([f64; 3], [f64; 3]) {
        let a = self.axis;
        let helper = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = normalize(cross(a, helper));
        let v = cross(a, u);
        (u, v)
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Vertical, vertical (same radius, half the height), horizontal along x,
/// horizontal along y. Surface densities 1000/area are pairwise distinct.
pub const CYLINDERS: [Cylinder; 4] = [
    Cylinder {
        base: [1.2, 1.2, 0.5],
        axis: [0.0, 0.0, 1.0],
        radius: 0.5,
        height: 3.0,
    },
    Cylinder {
        base: [3.8, 1.2, 0.3],
        axis: [0.0, 0.0, 1.0],
        radius: 0.5,
        height: 1.5,
    },
    Cylinder {
        base: [0.8, 3.6, 1.0],
        axis: [1.0, 0.0, 0.0],
        radius: 0.35,
        height: 2.5,
    },
    Cylinder {
        base: [3.6, 1.0, 3.0],
        axis: [0.0, 1.0, 0.0],
        radius: 0.8,
        height: 3.0,
    },
];

pub const CYLINDER_BOX: ([f64; 3], [f64; 3]) = ([0.0, 0.0, 0.0], [5.0, 5.0, 4.0]);

const POINTS_PER_CYLINDER: usize = 1000;
const NOISE_POINTS: usize = 5000;

pub fn four_cylinders(seed: u64) -> PointCloud {
    four_cylinders_split(seed, seed)
}

/// Cylinder surfaces drawn from `manifold_seed`, noise from `noise_seed`.
/// Labels are 1..=4 per cylinder and 0 for noise.
pub fn four_cylinders_split(manifold_seed: u64, noise_seed: u64) -> PointCloud {
    let mut rng = stream(manifold_seed, MANIFOLD_STREAM);
    let total = 4 * POINTS_PER_CYLINDER + NOISE_POINTS;
    let mut coords = Vec::with_capacity(3 * total);
    let mut labels = Vec::with_capacity(total);
    for (c, cyl) in CYLINDERS.iter().enumerate() {
        let (u, v) = cyl.frame();
        for _ in 0..POINTS_PER_CYLINDER {
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            let h = rng.random::<f64>() * cyl.height;
            let (s, co) = phi.sin_cos();
            for k in 0..3 {
                coords.push(cyl.base[k] + h * cyl.axis[k] + cyl.radius * (co * u[k] + s * v[k]));
            }
            labels.push(c as u32 + 1);
        }
    }
    let (lo, hi) = CYLINDER_BOX;
    let mut noise = stream(noise_seed, NOISE_STREAM);
    for _ in 0..NOISE_POINTS {
        for k in 0..3 {
            coords.push(noise.random_range(lo[k]..hi[k]));
        }
        labels.push(NOISE_LABEL);
    }
    let points = PointSet::new(3, coords).expect("three coordinates per point");
    PointCloud::with_parts(points, Vec::new(), Some(labels)).expect("generated cloud is valid")
}
