use laat_core::geometry::NeighborhoodIndex;
use laat_core::io;
use laat_core::markov::{alignment_kernel_with, distance_kernel, visitation_scores, KernelFlavor};
use serde_json::json;

use super::{check_positive, read_cloud, usage_if_any};
use crate::config::parse_degeneracy;
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::McArgs;

pub fn mc(a: McArgs) -> CliResult<()> {
    let mut rec = Recorder::new("mc");
    let mut problems = Vec::new();
    let flavor = match a.flavor.parse::<KernelFlavor>() {
        Ok(f) => Some(f),
        Err(e) => {
            problems.push(e.to_string());
            None
        }
    };
    let degeneracy = match parse_degeneracy(&a.degeneracy) {
        Ok(d) => Some(d),
        Err(CliError::Usage(m)) => {
            problems.push(m);
            None
        }
        Err(e) => return Err(e),
    };
    check_positive("beta", a.beta, &mut problems);
    check_positive("radius", a.radius, &mut problems);
    check_positive("tol", a.tol, &mut problems);
    if a.max_iter == 0 {
        problems.push("max-iter must be a positive integer".to_string());
    }
    usage_if_any(problems)?;
    let (flavor, degeneracy) = (flavor.unwrap(), degeneracy.unwrap());

    let cloud = read_cloud(&a.input)?;
    let index = NeighborhoodIndex::build(&cloud, a.radius)?;
    let kernel = match flavor {
        KernelFlavor::Alignment => alignment_kernel_with(&cloud, &index, a.beta, degeneracy)?,
        KernelFlavor::Distance => distance_kernel(&cloud, &index, a.beta)?,
    };
    let scores = visitation_scores(&kernel, a.tol, a.max_iter)?;
    io::write_scores(&a.output, &scores)?;

    let components = kernel.components();
    let inactive = cloud.len() - index.active_count();
    if inactive > 0 {
        rec.notes.push(format!("{inactive} inactive points score 0"));
    }
    if components.len() > 1 {
        let volume = |c: &[usize]| c.iter().map(|&s| kernel.targets(s).len()).sum::<usize>();
        let total: usize = components.iter().map(|c| volume(c)).sum();
        rec.notes.push(format!(
            "{} components; each stationary vector is normalized within its component and scaled by the component's share of edge volume",
            components.len()
        ));
        let mut sizes: Vec<(usize, usize)> = components.iter().map(|c| (c.len(), volume(c))).collect();
        sizes.sort_by(|x, y| y.cmp(x));
        for (k, (states, vol)) in sizes.iter().take(10).enumerate() {
            rec.notes.push(format!(
                "component {k}: {states} states, volume share {:.6}",
                *vol as f64 / total as f64
            ));
        }
        if sizes.len() > 10 {
            rec.notes.push(format!("{} smaller components not listed", sizes.len() - 10));
        }
    }

    rec.config = json!({
        "flavor": flavor.to_string(),
        "beta": a.beta,
        "radius": a.radius,
        "tol": a.tol,
        "max_iter": a.max_iter,
        "degeneracy": a.degeneracy,
    });
    rec.inputs.push(a.input);
    rec.outputs.push(a.output);
    rec.finish(a.manifest.as_deref())?;
    Ok(())
}
