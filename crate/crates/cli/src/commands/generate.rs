use std::path::PathBuf;

use laat_core::datagen::{four_cylinders_split, two_arms_split, voronoi_web, Family, VoronoiSpec};
use laat_core::io;
use serde_json::json;

use super::{check_positive, usage_if_any};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::GenerateArgs;

pub fn generate(a: GenerateArgs) -> CliResult<()> {
    let mut rec = Recorder::new("generate");
    let family: Family = a.family.parse().map_err(|e: laat_core::LaatError| CliError::usage(e.to_string()))?;
    let output = a.output.unwrap_or_else(|| PathBuf::from(format!("{family}-{}.csv", a.seed)));

    let mut problems = Vec::new();
    let cloud_params = a.points.is_some() || a.centers.is_some() || a.ratio.is_some();
    if family != Family::VoronoiWeb && cloud_params {
        problems.push(format!("--points, --centers and --ratio apply only to voronoi-web, not {family}"));
    }
    if family == Family::VoronoiWeb && a.noise_seed.is_some() {
        problems.push("voronoi-web has a single seed; drop --noise-seed".to_string());
    }
    let mut spec = VoronoiSpec {
        seed: a.seed,
        ..VoronoiSpec::default()
    };
    if let Some(n) = a.points {
        spec.n_points = n;
    }
    if let Some(c) = a.centers {
        if c < 4 {
            problems.push(format!("centers must be at least 4, got {c}"));
        }
        spec.n_centers = c;
    }
    if let Some(r) = a.ratio {
        check_positive("ratio", r, &mut problems);
        spec.mix_ratio = r;
    }
    if family == Family::VoronoiWeb && problems.is_empty() {
        if let Err(e) = spec.split_counts() {
            problems.push(e.to_string());
        }
    }
    usage_if_any(problems)?;

    let noise_seed = a.noise_seed.unwrap_or(a.seed);
    let cloud = match family {
        Family::TwoArms => two_arms_split(a.seed, noise_seed),
        Family::FourCylinders => four_cylinders_split(a.seed, noise_seed),
        Family::VoronoiWeb => voronoi_web(&spec)?,
    };
    io::write_cloud(&output, &cloud)?;

    rec.seed = Some(a.seed);
    rec.config = match family {
        Family::VoronoiWeb => json!({
            "family": family.to_string(),
            "seed": spec.seed,
            "points": spec.n_points,
            "centers": spec.n_centers,
            "ratio": spec.mix_ratio,
            "edge": spec.edge,
        }),
        _ => json!({
            "family": family.to_string(),
            "seed": a.seed,
            "noise_seed": noise_seed,
        }),
    };
    rec.notes.push(format!("{} points", cloud.len()));
    rec.outputs.push(output);
    rec.finish(a.manifest.as_deref())?;
    Ok(())
}
