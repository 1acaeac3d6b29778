use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{LaatConfig, Placement, RewardTerm, WalkMode};
use super::field::{AntRoute, PheromoneField};
use crate::error::{LaatError, Result};
use crate::geometry::{AlignmentTable, NeighborhoodIndex, PointCloud};
use crate::softmax::{exp_weights_into, softmax_into};

/// Jump preference `V = w_F·F̄ + static` for one row, written into `out`.
///
/// `pheromone` holds `F` of the neighbors; `fixed` holds the part of the
/// preference that does not change during a run (alignment plus rewards).
#[inline]
pub fn preference_row(pheromone: impl Iterator<Item = f64> + Clone, fixed: &[f64], pheromone_weight: f64, out: &mut [f64]) {
    let total: f64 = pheromone.clone().sum();
    for ((o, f), &s) in out.iter_mut().zip(pheromone).zip(fixed) {
        *o = pheromone_weight * (f / total) + s;
    }
}

/// Jump probabilities from neighbor pheromone and alignment preference,
/// mixed by `κ` and sharpened by `β`.
pub fn jump_probabilities_from(pheromone: &[f64], alignment: &[f64], kappa: f64, beta: f64) -> Vec<f64> {
    let fixed: Vec<f64> = alignment.iter().map(|e| kappa * e).collect();
    let mut v = vec![0.0; alignment.len()];
    preference_row(pheromone.iter().copied(), &fixed, 1.0 - kappa, &mut v);
    let mut p = vec![0.0; v.len()];
    softmax_into(beta, &v, &mut p);
    p
}

/// Everything about a cloud that stays fixed while ants walk it.
#[derive(Debug, Clone)]
pub struct Landscape {
    index: NeighborhoodIndex,
    // edge-aligned: weighted alignment plus reward terms
    fixed: Vec<f64>,
    pheromone_weight: f64,
    beta: f64,
}

impl Landscape {
    pub fn new(cloud: &PointCloud, cfg: &LaatConfig, rewards: &[RewardTerm]) -> Result<Self> {
        cfg.validate()?;
        let index = NeighborhoodIndex::build(cloud, cfg.radius)?;
        Self::from_index(cloud, index, cfg, rewards)
    }

    pub fn from_index(
        cloud: &PointCloud,
        index: NeighborhoodIndex,
        cfg: &LaatConfig,
        rewards: &[RewardTerm],
    ) -> Result<Self> {
        let channels = rewards
            .iter()
            .map(|r| {
                if !(r.weight >= 0.0 && r.weight.is_finite()) {
                    return Err(LaatError::invalid(format!(
                        "reward weight for `{}` must be nonnegative, got {}",
                        r.attribute, r.weight
                    )));
                }
                cloud
                    .attribute(&r.attribute)
                    .map(|values| (values, r.sign * r.weight))
                    .ok_or_else(|| LaatError::UnknownAttribute(r.attribute.clone()))
            })
            .collect::<Result<Vec<_>>>()?;

        let table = AlignmentTable::build(cloud, &index, cfg.degeneracy)?;
        let alignment_weight = cfg.alignment_term_weight();
        let mut fixed: Vec<f64> = table.values().iter().map(|e| alignment_weight * e).collect();
        for (values, signed_weight) in channels {
            for i in index.active_ids() {
                let start = index.row_offset(i);
                let nbrs = index.neighbors(i);
                let row = &mut fixed[start..start + nbrs.len()];
                let ai = values[i];
                let spread: f64 = nbrs.iter().map(|&j| (values[j as usize] - ai).abs()).sum();
                if spread == 0.0 {
                    // a flat channel carries no directional signal
                    continue;
                }
                for (slot, &j) in row.iter_mut().zip(nbrs) {
                    *slot += signed_weight * ((values[j as usize] - ai) / spread);
                }
            }
        }
        Ok(Self {
            index,
            fixed,
            pheromone_weight: cfg.pheromone_term_weight(),
            beta: cfg.beta,
        })
    }

    pub fn index(&self) -> &NeighborhoodIndex {
        &self.index
    }

    /// The static part of the preference for the neighbors of `i`.
    pub fn fixed_row(&self, i: usize) -> &[f64] {
        let start = self.index.row_offset(i);
        &self.fixed[start..start + self.index.neighbors(i).len()]
    }

    fn preference_into(&self, field: &[f64], i: usize, out: &mut [f64]) {
        let nbrs = self.index.neighbors(i);
        preference_row(
            nbrs.iter().map(|&j| field[j as usize]),
            self.fixed_row(i),
            self.pheromone_weight,
            out,
        );
    }

    /// `P(j | i)` over the neighbors of `i`, in neighbor-list order.
    pub fn jump_probabilities(&self, field: &PheromoneField, i: usize) -> Result<Vec<f64>> {
        let m = self.index.neighbors(i).len();
        if !self.index.is_active(i) || m == 0 {
            return Err(LaatError::InactivePoint(i));
        }
        let mut v = vec![0.0; m];
        self.preference_into(field.values(), i, &mut v);
        let mut p = vec![0.0; m];
        softmax_into(self.beta, &v, &mut p);
        Ok(p)
    }
}

/// Start points for one epoch.
pub fn select_start_points<R: Rng>(
    index: &NeighborhoodIndex,
    cloud: &PointCloud,
    cfg: &LaatConfig,
    rng: &mut R,
) -> Result<Vec<usize>> {
    match cfg.placement {
        Placement::MedianFilteredRandom => {
            let median = index.size_median();
            let eligible: Vec<usize> = index
                .active_ids()
                .filter(|&i| index.neighbors(i).len() as f64 >= median)
                .collect();
            if eligible.is_empty() {
                return Err(LaatError::Placement(
                    "no active point reaches the median neighborhood size".into(),
                ));
            }
            Ok((0..cfg.ants)
                .map(|_| eligible[rng.random_range(0..eligible.len())])
                .collect())
        }
        Placement::SubcubeStratified(cells) => {
            let grid = CellGrid::fit(index, cloud, cells);
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); grid.cell_count()];
            for i in index.active_ids() {
                members[grid.cell_of(cloud.point(i))].push(i);
            }
            let starts: Vec<usize> = members
                .iter()
                .filter(|m| !m.is_empty())
                .map(|m| m[rng.random_range(0..m.len())])
                .collect();
            if starts.is_empty() {
                return Err(LaatError::Placement("every cell is empty".into()));
            }
            Ok(starts)
        }
    }
}

/// Axis-aligned split of the active points' bounding box into exactly
/// `cells` boxes. Prime factors of `cells` go, largest first, to the axis
/// whose current cells are widest.
#[derive(Debug, Clone)]
pub struct CellGrid {
    lo: Vec<f64>,
    width: Vec<f64>,
    per_axis: Vec<usize>,
}

impl CellGrid {
    pub fn fit(index: &NeighborhoodIndex, cloud: &PointCloud, cells: usize) -> Self {
        let dim = cloud.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for i in index.active_ids() {
            for (k, &c) in cloud.point(i).iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        let extent: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a).max(0.0)).collect();
        let mut per_axis = vec![1usize; dim];
        for p in prime_factors(cells).into_iter().rev() {
            let axis = (0..dim)
                .max_by(|&a, &b| {
                    (extent[a] / per_axis[a] as f64).total_cmp(&(extent[b] / per_axis[b] as f64))
                })
                .unwrap_or(0);
            per_axis[axis] *= p;
        }
        let width = extent
            .iter()
            .zip(&per_axis)
            .map(|(e, &m)| e / m as f64)
            .collect();
        Self { lo, width, per_axis }
    }

    pub fn cell_count(&self) -> usize {
        self.per_axis.iter().product()
    }

    pub fn per_axis(&self) -> &[usize] {
        &self.per_axis
    }

    pub fn cell_of(&self, p: &[f64]) -> usize {
        let mut id = 0;
        for k in 0..p.len() {
            let m = self.per_axis[k];
            let c = if self.width[k] > 0.0 {
                (((p[k] - self.lo[k]) / self.width[k]).floor().max(0.0) as usize).min(m - 1)
            } else {
                0
            };
            id = id * m + c;
        }
        id
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Per-walker cache of cumulative jump weights. A row is valid while its
/// stamp equals the current generation, i.e. while the field is unchanged.
#[derive(Debug)]
struct RowCache {
    cumulative: Vec<f64>,
    stamp: Vec<u32>,
    generation: u32,
    scratch: Vec<f64>,
}

impl RowCache {
    fn new(landscape: &Landscape) -> Self {
        Self {
            cumulative: vec![0.0; landscape.index.edge_count()],
            stamp: vec![0; landscape.index.len()],
            generation: 0,
            scratch: Vec::with_capacity(landscape.index.max_degree()),
        }
    }

    fn invalidate(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
    }

    fn row(&mut self, landscape: &Landscape, field: &[f64], i: usize) -> &[f64] {
        let start = landscape.index.row_offset(i);
        let m = landscape.index.neighbors(i).len();
        if self.stamp[i] != self.generation {
            self.scratch.clear();
            self.scratch.resize(m, 0.0);
            landscape.preference_into(field, i, &mut self.scratch);
            let row = &mut self.cumulative[start..start + m];
            exp_weights_into(landscape.beta, &self.scratch, row);
            let mut acc = 0.0;
            for w in row.iter_mut() {
                acc += *w;
                *w = acc;
            }
            self.stamp[i] = self.generation;
        }
        &self.cumulative[start..start + m]
    }
}

/// One ant's walk of `steps` jumps from `start` on a frozen field.
pub fn walk_ant<R: Rng>(
    landscape: &Landscape,
    field: &PheromoneField,
    start: usize,
    steps: usize,
    rng: &mut R,
) -> Result<AntRoute> {
    let mut cache = RowCache::new(landscape);
    cache.invalidate();
    walk_cached(landscape, field.values(), start, steps, rng, &mut cache)
}

fn walk_cached<R: Rng>(
    landscape: &Landscape,
    field: &[f64],
    start: usize,
    steps: usize,
    rng: &mut R,
    cache: &mut RowCache,
) -> Result<AntRoute> {
    let index = &landscape.index;
    if !index.is_active(start) {
        return Err(LaatError::InactivePoint(start));
    }
    let mut visited = Vec::with_capacity(steps);
    let mut current = start;
    for _ in 0..steps {
        let nbrs = index.neighbors(current);
        // active points always keep at least D >= 2 neighbors
        assert!(!nbrs.is_empty(), "ant stuck at point {current}");
        let row = cache.row(landscape, field, current);
        let total = row[row.len() - 1];
        let u = rng.random::<f64>() * total;
        let k = row.partition_point(|&c| c <= u).min(row.len() - 1);
        current = nbrs[k] as usize;
        visited.push(current as u32);
    }
    Ok(AntRoute { start, visited })
}

fn placement_rng(seed: u64, epoch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((epoch as u64) << 32);
    rng
}

fn ant_rng(seed: u64, epoch: usize, ant: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((epoch as u64) << 32) | (ant as u64 + 1));
    rng
}

/// Runs the full colony and returns the final pheromone field.
pub fn run_laat(cloud: &PointCloud, cfg: &LaatConfig) -> Result<PheromoneField> {
    let landscape = Landscape::new(cloud, cfg, &[])?;
    run_on(&landscape, cloud, cfg)
}

/// Like [`run_laat`] with attribute channels as extra preference terms.
pub fn run_laat_multi_reward(
    cloud: &PointCloud,
    cfg: &LaatConfig,
    rewards: &[RewardTerm],
) -> Result<PheromoneField> {
    let landscape = Landscape::new(cloud, cfg, rewards)?;
    run_on(&landscape, cloud, cfg)
}

/// Runs the colony on a prepared landscape.
pub fn run_on(landscape: &Landscape, cloud: &PointCloud, cfg: &LaatConfig) -> Result<PheromoneField> {
    cfg.validate()?;
    let index = &landscape.index;
    let mut field = PheromoneField::new(index.len());
    match cfg.mode {
        WalkMode::Sequential => {
            let mut cache = RowCache::new(landscape);
            for epoch in 0..cfg.epochs {
                let starts = select_start_points(index, cloud, cfg, &mut placement_rng(cfg.seed, epoch))?;
                for (k, &start) in starts.iter().enumerate() {
                    cache.invalidate();
                    let mut rng = ant_rng(cfg.seed, epoch, k);
                    let route = walk_cached(landscape, field.values(), start, cfg.steps, &mut rng, &mut cache)?;
                    field.deposit(&route, cfg.deposit);
                }
                field.evaporate(cfg.evaporation);
                if cfg.record_snapshots {
                    field.record_snapshot();
                }
            }
        }
        WalkMode::EpochBatched => {
            let n = index.len();
            for epoch in 0..cfg.epochs {
                let starts = select_start_points(index, cloud, cfg, &mut placement_rng(cfg.seed, epoch))?;
                let frozen = field.values();
                let counts = starts
                    .par_iter()
                    .enumerate()
                    .map_init(
                        || {
                            let mut c = RowCache::new(landscape);
                            c.invalidate();
                            c
                        },
                        |cache, (k, &start)| {
                            let mut rng = ant_rng(cfg.seed, epoch, k);
                            walk_cached(landscape, frozen, start, cfg.steps, &mut rng, cache)
                        },
                    )
                    .try_fold(
                        || vec![0u64; n],
                        |mut acc, route| {
                            for &j in &route?.visited {
                                acc[j as usize] += 1;
                            }
                            Ok::<_, LaatError>(acc)
                        },
                    )
                    .try_reduce(
                        || vec![0u64; n],
                        |mut a, b| {
                            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                            Ok(a)
                        },
                    )?;
                field.deposit_counts(&counts, cfg.deposit);
                field.evaporate(cfg.evaporation);
                if cfg.record_snapshots {
                    field.record_snapshot();
                }
            }
        }
    }
    Ok(field)
}
