//! Run configuration: defaults, then a flat TOML file, then flags.

use std::path::Path;

use clap::Args;
use laat_core::geometry::Degeneracy;
use laat_core::laat::{LaatConfig, Placement, RewardTerm, WalkMode};
use serde::Deserialize;
use serde_json::json;

use crate::error::{CliError, CliResult};

/// Keys accepted in a config file. Names mirror the flags with `_` for `-`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub epochs: Option<usize>,
    pub ants: Option<usize>,
    pub steps: Option<usize>,
    pub radius: Option<f64>,
    pub deposit: Option<f64>,
    pub evaporation: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
    pub placement: Option<String>,
    pub mode: Option<String>,
    pub pheromone_weight: Option<f64>,
    pub alignment_weight: Option<f64>,
    pub degeneracy: Option<String>,
    pub rewards: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Default, Clone, Args)]
pub struct LaatFlags {
    /// Number of epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Ants per epoch.
    #[arg(long)]
    pub ants: Option<usize>,
    /// Jumps per ant.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Neighborhood radius.
    #[arg(long, short = 'r')]
    pub radius: Option<f64>,
    /// Pheromone deposited per visit.
    #[arg(long)]
    pub deposit: Option<f64>,
    /// Fraction of pheromone lost per epoch.
    #[arg(long)]
    pub evaporation: Option<f64>,
    /// Inverse temperature of the jump softmax.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Weight of alignment against pheromone, in [0, 1].
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `median` or `subcube:<k>`.
    #[arg(long)]
    pub placement: Option<String>,
    /// `sequential` or `batched`.
    #[arg(long)]
    pub mode: Option<String>,
    /// Override for the pheromone weight of the multi-reward preference.
    #[arg(long)]
    pub pheromone_weight: Option<f64>,
    /// Override for the alignment weight of the multi-reward preference.
    #[arg(long)]
    pub alignment_weight: Option<f64>,
    /// `lenient` or `strict` handling of coincident points.
    #[arg(long)]
    pub degeneracy: Option<String>,
    /// Attribute reward `name:+w` or `name:-w`; repeatable.
    #[arg(long = "reward")]
    pub rewards: Vec<String>,
}

pub fn parse_degeneracy(s: &str) -> CliResult<Degeneracy> {
    match s {
        "lenient" => Ok(Degeneracy::Lenient),
        "strict" => Ok(Degeneracy::Strict),
        _ => Err(CliError::usage(format!("degeneracy must be `lenient` or `strict`, got `{s}`"))),
    }
}

fn degeneracy_name(d: Degeneracy) -> &'static str {
    match d {
        Degeneracy::Lenient => "lenient",
        Degeneracy::Strict => "strict",
    }
}

/// A fully merged and validated run configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub laat: LaatConfig,
    pub rewards: Vec<RewardTerm>,
}

impl Resolved {
    pub fn to_json(&self) -> serde_json::Value {
        let c = &self.laat;
        json!({
            "epochs": c.epochs,
            "ants": c.ants,
            "steps": c.steps,
            "radius": c.radius,
            "deposit": c.deposit,
            "evaporation": c.evaporation,
            "beta": c.beta,
            "kappa": c.kappa,
            "seed": c.seed,
            "placement": c.placement.to_string(),
            "mode": c.mode.to_string(),
            "pheromone_weight": c.pheromone_term_weight(),
            "alignment_weight": c.alignment_term_weight(),
            "degeneracy": degeneracy_name(c.degeneracy),
            "rewards": self.rewards.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Defaults < file < flags. Every problem is reported, one per line.
pub fn resolve(file: Option<FileConfig>, flags: &LaatFlags) -> CliResult<Resolved> {
    let file = file.unwrap_or_default();
    let mut cfg = LaatConfig::default();
    let mut problems = Vec::new();

    macro_rules! take {
        ($($field:ident),*) => {
            $(
                if let Some(v) = flags.$field.or(file.$field) {
                    cfg.$field = v;
                }
            )*
        };
    }
    take!(epochs, ants, steps, radius, deposit, evaporation, beta, kappa, seed);
    cfg.pheromone_weight = flags.pheromone_weight.or(file.pheromone_weight);
    cfg.alignment_weight = flags.alignment_weight.or(file.alignment_weight);

    if let Some(p) = flags.placement.as_ref().or(file.placement.as_ref()) {
        match p.parse::<Placement>() {
            Ok(p) => cfg.placement = p,
            Err(e) => problems.push(e.to_string()),
        }
    }
    if let Some(m) = flags.mode.as_ref().or(file.mode.as_ref()) {
        match m.parse::<WalkMode>() {
            Ok(m) => cfg.mode = m,
            Err(e) => problems.push(e.to_string()),
        }
    }
    if let Some(d) = flags.degeneracy.as_ref().or(file.degeneracy.as_ref()) {
        match parse_degeneracy(d) {
            Ok(d) => cfg.degeneracy = d,
            Err(e) => problems.push(e.to_string()),
        }
    }

    let reward_specs = if flags.rewards.is_empty() {
        file.rewards.clone().unwrap_or_default()
    } else {
        flags.rewards.clone()
    };
    let mut rewards = Vec::new();
    for spec in &reward_specs {
        match spec.parse::<RewardTerm>() {
            Ok(r) if r.weight >= 0.0 && r.weight.is_finite() => rewards.push(r),
            Ok(r) => problems.push(format!("reward weight for `{}` must be nonnegative", r.attribute)),
            Err(e) => problems.push(e.to_string()),
        }
    }

    problems.extend(cfg.violations());
    if problems.is_empty() {
        Ok(Resolved { laat: cfg, rewards })
    } else {
        Err(CliError::usage(problems.join("\n")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file: FileConfig = toml::from_str("epochs = 7\nbeta = 3.0\nrewards = [\"t:+0.5\"]").unwrap();
        let flags = LaatFlags {
            beta: Some(4.0),
            ..LaatFlags::default()
        };
        let r = resolve(Some(file), &flags).unwrap();
        assert_eq!((r.laat.epochs, r.laat.beta, r.laat.kappa), (7, 4.0, 0.5));
        assert_eq!(r.rewards.len(), 1);
    }

    #[test]
    fn every_problem_is_listed() {
        let flags = LaatFlags {
            kappa: Some(2.0),
            evaporation: Some(1.5),
            mode: Some("fast".into()),
            ..LaatFlags::default()
        };
        let CliError::Usage(msg) = resolve(None, &flags).unwrap_err() else {
            panic!("expected a usage error");
        };
        assert_eq!(msg.lines().count(), 3, "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("epoch = 3").is_err());
    }
}
