use std::fmt;
use std::str::FromStr;

use crate::error::{LaatError, Result};
use crate::geometry::Degeneracy;

/// Where ants start each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Uniform draws among active points whose neighborhood is at least the median size.
    MedianFilteredRandom,
    /// The bounding box is cut into this many axis-aligned cells and one ant
    /// starts in each cell that holds an active point.
    SubcubeStratified(usize),
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Placement::MedianFilteredRandom => write!(f, "median"),
            Placement::SubcubeStratified(k) => write!(f, "subcube:{k}"),
        }
    }
}

impl FromStr for Placement {
    type Err = LaatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" | "median-filtered-random" => Ok(Placement::MedianFilteredRandom),
            _ => {
                let k = s
                    .strip_prefix("subcube:")
                    .or_else(|| s.strip_prefix("subcube-stratified:"))
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k > 0)
                    .ok_or_else(|| {
                        LaatError::invalid(format!(
                            "placement must be `median` or `subcube:<k>` with k > 0, got `{s}`"
                        ))
                    })?;
                Ok(Placement::SubcubeStratified(k))
            }
        }
    }
}

/// How the ants of one epoch see the pheromone field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WalkMode {
    /// Ants walk one after another; each deposit is visible to the next ant.
    #[default]
    Sequential,
    /// All ants of an epoch read the field as it was when the epoch started and
    /// may walk in parallel; their visits are merged before deposit.
    EpochBatched,
}

impl fmt::Display for WalkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkMode::Sequential => write!(f, "sequential"),
            WalkMode::EpochBatched => write!(f, "batched"),
        }
    }
}

impl FromStr for WalkMode {
    type Err = LaatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(WalkMode::Sequential),
            "batched" | "epoch-batched" => Ok(WalkMode::EpochBatched),
            _ => Err(LaatError::invalid(format!(
                "mode must be `sequential` or `batched`, got `{s}`"
            ))),
        }
    }
}

/// An attribute channel used as an extra term of the jump preference.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTerm {
    pub attribute: String,
    /// +1 rewards increasing values along the jump, −1 rewards decreasing ones.
    pub sign: f64,
    pub weight: f64,
}

impl FromStr for RewardTerm {
    type Err = LaatError;

    /// Parses `name:+0.2` or `name:-0.2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || LaatError::invalid(format!("reward must look like `name:+0.2`, got `{s}`"));
        let (name, rest) = s.rsplit_once(':').ok_or_else(bad)?;
        if name.is_empty() {
            return Err(bad());
        }
        let (sign, magnitude) = match rest.as_bytes().first() {
            Some(b'+') => (1.0, &rest[1..]),
            Some(b'-') => (-1.0, &rest[1..]),
            _ => (1.0, rest),
        };
        let weight: f64 = magnitude.parse().map_err(|_| bad())?;
        Ok(RewardTerm {
            attribute: name.to_string(),
            sign,
            weight,
        })
    }
}

impl fmt::Display for RewardTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0.0 { '-' } else { '+' };
        write!(f, "{}:{s}{}", self.attribute, self.weight)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaatConfig {
    pub epochs: usize,
    pub ants: usize,
    pub steps: usize,
    pub radius: f64,
    /// Pheromone deposited per visit (φ).
    pub deposit: f64,
    /// Fraction of pheromone lost at the end of every epoch (ζ).
    pub evaporation: f64,
    /// Inverse temperature of the jump softmax (β).
    pub beta: f64,
    /// Weight of alignment against pheromone (κ).
    pub kappa: f64,
    pub seed: u64,
    pub placement: Placement,
    pub mode: WalkMode,
    /// Overrides the pheromone weight `1 − κ` in the multi-reward preference.
    pub pheromone_weight: Option<f64>,
    /// Overrides the alignment weight `κ` in the multi-reward preference.
    pub alignment_weight: Option<f64>,
    pub degeneracy: Degeneracy,
    /// Keep a copy of the field after every epoch.
    pub record_snapshots: bool,
}

impl Default for LaatConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            ants: 100,
            steps: 2500,
            radius: 0.2,
            deposit: 0.05,
            evaporation: 0.1,
            beta: 10.0,
            kappa: 0.5,
            seed: 0,
            placement: Placement::MedianFilteredRandom,
            mode: WalkMode::Sequential,
            pheromone_weight: None,
            alignment_weight: None,
            degeneracy: Degeneracy::Lenient,
            record_snapshots: false,
        }
    }
}

impl LaatConfig {
    /// Every range violation, one message per offending field.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.epochs == 0 {
            out.push("epochs must be a positive integer".to_string());
        }
        if self.ants == 0 {
            out.push("ants must be a positive integer".to_string());
        }
        if self.steps == 0 {
            out.push("steps must be a positive integer".to_string());
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            out.push(format!("radius must be positive, got {}", self.radius));
        }
        if !(self.deposit > 0.0 && self.deposit.is_finite()) {
            out.push(format!("deposit must be positive, got {}", self.deposit));
        }
        if !(self.evaporation > 0.0 && self.evaporation < 1.0) {
            out.push(format!(
                "evaporation must lie in (0, 1), got {}",
                self.evaporation
            ));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            out.push(format!("beta must be positive, got {}", self.beta));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            out.push(format!("kappa must lie in [0, 1], got {}", self.kappa));
        }
        for (name, w) in [
            ("pheromone-weight", self.pheromone_weight),
            ("alignment-weight", self.alignment_weight),
        ] {
            if let Some(w) = w {
                if !(w >= 0.0 && w.is_finite()) {
                    out.push(format!("{name} must be nonnegative, got {w}"));
                }
            }
        }
        if let Placement::SubcubeStratified(0) = self.placement {
            out.push("subcube placement needs at least one cell".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(LaatError::InvalidArgument(v.join("; ")))
        }
    }

    /// Weight of the relative pheromone term.
    pub fn pheromone_term_weight(&self) -> f64 {
        self.pheromone_weight.unwrap_or(1.0 - self.kappa)
    }

    /// Weight of the relative alignment term.
    pub fn alignment_term_weight(&self) -> f64 {
        self.alignment_weight.unwrap_or(self.kappa)
    }
}
