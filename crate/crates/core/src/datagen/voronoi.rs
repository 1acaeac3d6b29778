//! Voronoi-tessellation stand-in for the cosmic web.
//!
//! The Voronoi diagram of random centres inside a cube is computed exactly:
//! faces (walls) as convex polygons, edges (filaments) as segments, vertices
//! (clusters) as points, all clipped to the cube. Points are then sampled on
//! those structures and inside the cells (voids).
//!
//! Labels: 0 void, 1 wall, 2 filament, 3 cluster. Filament and cluster
//! points are the positives.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{stream, MANIFOLD_STREAM, NOISE_STREAM};
use crate::error::{LaatError, Result};
use crate::geometry::{PointCloud, PointSet};

pub const VOID_LABEL: u32 = 0;
pub const WALL_LABEL: u32 = 1;
pub const FILAMENT_LABEL: u32 = 2;
pub const CLUSTER_LABEL: u32 = 3;

/// Share of positives placed in clusters; the rest go to filaments.
const CLUSTER_SHARE: f64 = 0.2;
/// Share of negatives placed on walls; the rest fill the voids.
const WALL_SHARE: f64 = 0.6;
/// Relative tolerance for "equidistant" when validating features.
const EQUIDISTANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiSpec {
    pub seed: u64,
    pub n_points: usize,
    pub n_centers: usize,
    /// (filament + cluster) : (wall + void) point ratio.
    pub mix_ratio: f64,
    pub edge: f64,
    /// Standard deviation of the isotropic jitter on wall and filament points.
    pub jitter: f64,
    /// Standard deviation of the blob around each cluster vertex.
    pub cluster_spread: f64,
}

impl Default for VoronoiSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            n_points: 262_144,
            n_centers: 32,
            mix_ratio: 0.367,
            edge: 200.0,
            jitter: 1.0,
            cluster_spread: 2.0,
        }
    }
}

impl VoronoiSpec {
    /// Positive and negative counts for the requested ratio.
    pub fn split_counts(&self) -> Result<(usize, usize)> {
        if !(self.mix_ratio > 0.0 && self.mix_ratio.is_finite()) {
            return Err(LaatError::invalid("mix ratio must be positive"));
        }
        let exact = self.n_points as f64 * self.mix_ratio / (1.0 + self.mix_ratio);
        let pos = exact.round() as usize;
        let neg = self.n_points.saturating_sub(pos);
        if pos == 0 || neg == 0 {
            return Err(LaatError::invalid(format!(
                "mix ratio {} cannot be realised with {} points",
                self.mix_ratio, self.n_points
            )));
        }
        Ok((pos, neg))
    }
}

/// A Voronoi face clipped to the cube, as an ordered convex polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct WallPolygon {
    pub cells: [usize; 2],
    pub vertices: Vec<[f64; 3]>,
}

impl WallPolygon {
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        (1..v.len().saturating_sub(1))
            .map(|k| triangle_area(v[0], v[k], v[k + 1]))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiDiagram {
    pub centers: Vec<[f64; 3]>,
    pub edge: f64,
    pub walls: Vec<WallPolygon>,
    /// Clipped Voronoi edges: the three cells sharing them and the endpoints.
    pub filaments: Vec<([usize; 3], [f64; 3], [f64; 3])>,
    /// Voronoi vertices inside the cube with their four cells.
    pub vertices: Vec<([usize; 4], [f64; 3])>,
}

impl VoronoiDiagram {
    pub fn build(centers: Vec<[f64; 3]>, edge: f64) -> Self {
        let n = centers.len();
        let scale = edge * edge;
        let mut walls = Vec::new();
        let mut filaments = Vec::new();
        let mut vertices = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if let Some(poly) = wall(&centers, edge, i, j) {
                    walls.push(poly);
                }
                for k in j + 1..n {
                    if let Some((a, b)) = filament(&centers, edge, [i, j, k]) {
                        filaments.push(([i, j, k], a, b));
                    }
                    for l in k + 1..n {
                        if let Some(p) = circumcenter(&centers, [i, j, k, l]) {
                            let inside = p.iter().all(|&c| (0.0..=edge).contains(&c));
                            let r2 = d2(p, centers[i]);
                            let clear = (0..n)
                                .filter(|m| ![i, j, k, l].contains(m))
                                .all(|m| d2(p, centers[m]) > r2 * (1.0 + EQUIDISTANT_TOL) + scale * 1e-15);
                            if inside && clear {
                                vertices.push(([i, j, k, l], p));
                            }
                        }
                    }
                }
            }
        }
        Self {
            centers,
            edge,
            walls,
            filaments,
            vertices,
        }
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn d2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

fn axpy(a: [f64; 3], t: f64, d: [f64; 3]) -> [f64; 3] {
    [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]]
}

fn triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let x = cross(sub(b, a), sub(c, a));
    0.5 * dot(x, x).sqrt()
}

/// Linear constraints `g(p) = n·p + c ≥ 0` that keep `p` at least as close to
/// `centers[i]` as to every centre outside `own`, and inside the cube.
fn constraints(centers: &[[f64; 3]], edge: f64, i: usize, own: &[usize]) -> Vec<([f64; 3], f64)> {
    let ci = centers[i];
    let mut out = Vec::new();
    for (m, &cm) in centers.iter().enumerate() {
        if own.contains(&m) {
            continue;
        }
        // |p − cm|² − |p − ci|² = 2 p·(ci − cm) + |cm|² − |ci|²
        let n = sub(ci, cm);
        out.push(([2.0 * n[0], 2.0 * n[1], 2.0 * n[2]], dot(cm, cm) - dot(ci, ci)));
    }
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        out.push((e, 0.0));
        e[k] = -1.0;
        out.push((e, edge));
    }
    out
}

fn wall(centers: &[[f64; 3]], edge: f64, i: usize, j: usize) -> Option<WallPolygon> {
    let (ci, cj) = (centers[i], centers[j]);
    let normal = sub(cj, ci);
    let mid = axpy(ci, 0.5, normal);
    let helper = if normal[0].abs() < 0.9 * dot(normal, normal).sqrt() {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let u = unit(cross(normal, helper));
    let v = unit(cross(normal, u));
    // a square in the bisector plane that covers the cube
    let big = 4.0 * edge;
    let mut poly: Vec<[f64; 3]> = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .iter()
        .map(|&(a, b)| axpy(axpy(mid, a * big, u), b * big, v))
        .collect();
    for (n, c) in constraints(centers, edge, i, &[i, j]) {
        poly = clip(&poly, n, c);
        if poly.len() < 3 {
            return None;
        }
    }
    let polygon = WallPolygon {
        cells: [i, j],
        vertices: poly,
    };
    (polygon.area() > 1e-12 * edge * edge).then_some(polygon)
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Sutherland–Hodgman clip of a convex polygon to `n·p + c ≥ 0`.
fn clip(poly: &[[f64; 3]], n: [f64; 3], c: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let ga = dot(n, a) + c;
        let gb = dot(n, b) + c;
        if ga >= 0.0 {
            out.push(a);
        }
        if (ga >= 0.0) != (gb >= 0.0) {
            let t = ga / (ga - gb);
            out.push(axpy(a, t, sub(b, a)));
        }
    }
    out
}

/// The segment of points equidistant to the three centres and closer to
/// them than to any other, clipped to the cube.
fn filament(centers: &[[f64; 3]], edge: f64, cells: [usize; 3]) -> Option<([f64; 3], [f64; 3])> {
    let [i, j, k] = cells;
    let (a, b, c) = (centers[i], centers[j], centers[k]);
    let dir = cross(sub(b, a), sub(c, a));
    if dot(dir, dir) == 0.0 {
        return None;
    }
    let origin = triangle_circumcenter(a, b, c)?;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (n, cst) in constraints(centers, edge, i, &cells) {
        let g0 = dot(n, origin) + cst;
        let slope = dot(n, dir);
        if slope == 0.0 {
            if g0 < 0.0 {
                return None;
            }
        } else if slope > 0.0 {
            lo = lo.max(-g0 / slope);
        } else {
            hi = hi.min(-g0 / slope);
        }
    }
    let len = (hi - lo) * dot(dir, dir).sqrt();
    (len > 1e-9 * edge).then(|| (axpy(origin, lo, dir), axpy(origin, hi, dir)))
}

fn triangle_circumcenter(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> Option<[f64; 3]> {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let n = cross(ab, ac);
    let nn = dot(n, n);
    if nn == 0.0 {
        return None;
    }
    // a + (|ac|²(n×ab)... standard closed form
    let t1 = cross(n, ab);
    let t2 = cross(ac, n);
    let s1 = dot(ac, ac);
    let s2 = dot(ab, ab);
    let off = [
        (s1 * t1[0] + s2 * t2[0]) / (2.0 * nn),
        (s1 * t1[1] + s2 * t2[1]) / (2.0 * nn),
        (s1 * t1[2] + s2 * t2[2]) / (2.0 * nn),
    ];
    Some([a[0] + off[0], a[1] + off[1], a[2] + off[2]])
}

fn circumcenter(centers: &[[f64; 3]], cells: [usize; 4]) -> Option<[f64; 3]> {
    let a = centers[cells[0]];
    let rows: Vec<[f64; 3]> = cells[1..].iter().map(|&m| sub(centers[m], a)).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| 0.5 * dot(*r, *r)).collect();
    let m = nalgebra::Matrix3::new(
        rows[0][0], rows[0][1], rows[0][2], rows[1][0], rows[1][1], rows[1][2], rows[2][0],
        rows[2][1], rows[2][2],
    );
    let x = m.lu().solve(&nalgebra::Vector3::new(rhs[0], rhs[1], rhs[2]))?;
    Some([a[0] + x[0], a[1] + x[1], a[2] + x[2]])
}

/// Splits `total` draws over items proportionally to `weights`, largest
/// remainders first.
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let raw: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut rest = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())).then(a.cmp(&b)));
    for &k in order.iter().cycle() {
        if rest == 0 {
            break;
        }
        counts[k] += 1;
        rest -= 1;
    }
    counts
}

fn jittered<R: Rng>(rng: &mut R, p: [f64; 3], sigma: f64, edge: f64) -> [f64; 3] {
    if sigma <= 0.0 {
        return p;
    }
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    loop {
        let q = [
            p[0] + normal.sample(rng),
            p[1] + normal.sample(rng),
            p[2] + normal.sample(rng),
        ];
        if q.iter().all(|&c| (0.0..=edge).contains(&c)) {
            return q;
        }
    }
}

fn draw_centers<R: Rng>(rng: &mut R, spec: &VoronoiSpec) -> Vec<[f64; 3]> {
    (0..spec.n_centers)
        .map(|_| {
            [
                rng.random::<f64>() * spec.edge,
                rng.random::<f64>() * spec.edge,
                rng.random::<f64>() * spec.edge,
            ]
        })
        .collect()
}

/// The tessellation [`voronoi_web`] samples from for this spec.
pub fn web_diagram(spec: &VoronoiSpec) -> VoronoiDiagram {
    let mut rng = stream(spec.seed, MANIFOLD_STREAM);
    VoronoiDiagram::build(draw_centers(&mut rng, spec), spec.edge)
}

/// Generates the labeled web. Positives (filaments, clusters) and negatives
/// (walls, voids) follow `mix_ratio`; every filament, wall and cluster gets a
/// random strength in `[0.5, 1.5]` so densities differ between structures.
pub fn voronoi_web(spec: &VoronoiSpec) -> Result<PointCloud> {
    if spec.n_centers < 4 {
        return Err(LaatError::invalid("the web needs at least 4 centres"));
    }
    if !(spec.edge > 0.0) {
        return Err(LaatError::invalid("cube edge must be positive"));
    }
    let (n_pos, n_neg) = spec.split_counts()?;
    let mut rng = stream(spec.seed, MANIFOLD_STREAM);
    let diagram = VoronoiDiagram::build(draw_centers(&mut rng, spec), spec.edge);
    if diagram.filaments.is_empty() || diagram.walls.is_empty() {
        return Err(LaatError::invalid("tessellation has no edges or faces inside the cube"));
    }

    let n_cluster = if diagram.vertices.is_empty() {
        0
    } else {
        (n_pos as f64 * CLUSTER_SHARE).round() as usize
    };
    let n_filament = n_pos - n_cluster;
    let n_wall = (n_neg as f64 * WALL_SHARE).round() as usize;
    let n_void = n_neg - n_wall;

    let mut coords = Vec::with_capacity(3 * spec.n_points);
    let mut labels = Vec::with_capacity(spec.n_points);

    let fil_weights: Vec<f64> = diagram
        .filaments
        .iter()
        .map(|(_, a, b)| d2(*a, *b).sqrt() * rng.random_range(0.5..1.5))
        .collect();
    for ((_, a, b), count) in diagram.filaments.iter().zip(apportion(n_filament, &fil_weights)) {
        for _ in 0..count {
            let t = rng.random::<f64>();
            let p = axpy(*a, t, sub(*b, *a));
            coords.extend_from_slice(&jittered(&mut rng, p, spec.jitter, spec.edge));
            labels.push(FILAMENT_LABEL);
        }
    }

    let cl_weights: Vec<f64> = diagram.vertices.iter().map(|_| rng.random_range(0.5..1.5)).collect();
    for ((_, v), count) in diagram.vertices.iter().zip(apportion(n_cluster, &cl_weights)) {
        for _ in 0..count {
            coords.extend_from_slice(&jittered(&mut rng, *v, spec.cluster_spread, spec.edge));
            labels.push(CLUSTER_LABEL);
        }
    }

    let wall_weights: Vec<f64> = diagram
        .walls
        .iter()
        .map(|w| w.area() * rng.random_range(0.5..1.5))
        .collect();
    for (w, count) in diagram.walls.iter().zip(apportion(n_wall, &wall_weights)) {
        let v = &w.vertices;
        let tri_areas: Vec<f64> = (1..v.len() - 1).map(|k| triangle_area(v[0], v[k], v[k + 1])).collect();
        let total: f64 = tri_areas.iter().sum();
        for _ in 0..count {
            let mut pick = rng.random::<f64>() * total;
            let mut t = 0;
            while t + 1 < tri_areas.len() && pick >= tri_areas[t] {
                pick -= tri_areas[t];
                t += 1;
            }
            let (mut r1, mut r2) = (rng.random::<f64>(), rng.random::<f64>());
            if r1 + r2 > 1.0 {
                r1 = 1.0 - r1;
                r2 = 1.0 - r2;
            }
            let base = v[0];
            let p = axpy(axpy(base, r1, sub(v[t + 1], base)), r2, sub(v[t + 2], base));
            coords.extend_from_slice(&jittered(&mut rng, p, spec.jitter, spec.edge));
            labels.push(WALL_LABEL);
        }
    }

    let mut noise = stream(spec.seed, NOISE_STREAM);
    for _ in 0..n_void {
        for _ in 0..3 {
            coords.push(noise.random::<f64>() * spec.edge);
        }
        labels.push(VOID_LABEL);
    }

    let points = PointSet::new(3, coords)?;
    PointCloud::with_parts(points, Vec::new(), Some(labels))
}

/// Whether a label counts as positive (filament or cluster).
pub fn is_positive(label: u32) -> bool {
    label == FILAMENT_LABEL || label == CLUSTER_LABEL
}
