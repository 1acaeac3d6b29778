/// Pheromone held by every point of the cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField {
    values: Vec<f64>,
    history: Option<Vec<Vec<f64>>>,
}

impl PheromoneField {
    /// Every point starts with one unit of pheromone.
    pub fn new(n: usize) -> Self {
        Self::from_values(vec![1.0; n])
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self {
            values,
            history: None,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Field after each epoch, if snapshots were recorded.
    pub fn history(&self) -> Option<&[Vec<f64>]> {
        self.history.as_deref()
    }

    pub(crate) fn record_snapshot(&mut self) {
        let snap = self.values.clone();
        self.history.get_or_insert_with(Vec::new).push(snap);
    }

    /// `F ← (1 − ζ)·F` on every point.
    pub fn evaporate(&mut self, rate: f64) {
        let keep = 1.0 - rate;
        for v in &mut self.values {
            *v *= keep;
        }
    }

    /// `F^j ← F^j + ν(j)·φ` for every point the route visited.
    pub fn deposit(&mut self, route: &AntRoute, amount: f64) {
        for (j, count) in route.multiplicities() {
            self.values[j] += count as f64 * amount;
        }
    }

    /// Deposit from merged visit counts, one entry per point.
    pub fn deposit_counts(&mut self, counts: &[u64], amount: f64) {
        for (v, &c) in self.values.iter_mut().zip(counts) {
            if c > 0 {
                *v += c as f64 * amount;
            }
        }
    }
}

/// The points one ant landed on, in order. The start point is not included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntRoute {
    pub start: usize,
    pub visited: Vec<u32>,
}

impl AntRoute {
    pub fn len(&self) -> usize {
        self.visited.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visited.is_empty()
    }

    /// `(point, multiplicity)` pairs sorted by point id.
    pub fn multiplicities(&self) -> Vec<(usize, u32)> {
        let mut sorted = self.visited.clone();
        sorted.sort_unstable();
        let mut out: Vec<(usize, u32)> = Vec::new();
        for j in sorted {
            match out.last_mut() {
                Some((last, c)) if *last == j as usize => *c += 1,
                _ => out.push((j as usize, 1)),
            }
        }
        out
    }
}
