//! `gen`: graphs from the generators, or a Poisson cloud.

use std::path::Path;

use nibblepack_core::graph::generators::{
    disjoint_cliques, gnp, random_regular, random_regular_capped, sharpness_construction, symplectic_polar_graph,
};
use nibblepack_core::graph::{degree_profile, Graph};
use nibblepack_core::pointproc::sample_poisson;
use nibblepack_core::seeded_rng;
use serde_json::{json, Value};

use super::geometric::{write_graph, POINT_BUDGET};
use super::Outcome;
use crate::config::{DomainArg, GenKind, Settings};
use crate::error::{CliError, Result};
use crate::formats::{self, sort_cloud, CloudFile, Provenance};

pub fn run(kind: GenKind, s: &Settings, out: &Path) -> Result<Outcome> {
    let seed = s.seed();
    let mut rng = seeded_rng(seed);
    let n = s.vertices.unwrap_or(1000);
    let degree = s.degree.unwrap_or(8);
    let (g, params): (Graph, Value) = match kind {
        GenKind::Sharpness => {
            let eta = s.eta.unwrap_or(0.25);
            let sh = sharpness_construction(n, degree, eta, &mut rng)?;
            let params = json!({
                "kind": "sharpness", "vertices": n, "degree": degree, "eta": eta,
                "clique_size": sh.clique_size, "overlay_degree": sh.overlay_degree,
            });
            (sh.graph, params)
        }
        GenKind::Regular => (
            random_regular(n, degree, &mut rng)?,
            json!({ "kind": "regular", "vertices": n, "degree": degree }),
        ),
        GenKind::Capped => {
            let cap = Settings::require(s.codegree_cap, "codegree-cap", "for capped graphs")?;
            let attempts = s.attempts.unwrap_or(16);
            let c = random_regular_capped(n, degree, cap, attempts, &mut rng)?;
            let params = json!({
                "kind": "capped", "vertices": n, "degree": degree, "codegree_cap": cap,
                "attempts": attempts, "attempts_used": c.attempts,
            });
            (c.graph, params)
        }
        GenKind::Gnp => {
            let p = s.edge_prob.unwrap_or(0.01);
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Config(format!("edge probability {p} must lie in [0, 1]")));
            }
            (
                gnp(n, p, &mut rng),
                json!({ "kind": "gnp", "vertices": n, "edge_prob": p }),
            )
        }
        GenKind::Polar => {
            let q = s.q.unwrap_or(32);
            (symplectic_polar_graph(q)?, json!({ "kind": "polar", "q": q }))
        }
        GenKind::Cliques => {
            let size = s.clique_size.unwrap_or(degree + 1);
            if size == 0 || !n.is_multiple_of(size) {
                return Err(CliError::Config(format!(
                    "{n} vertices do not split into cliques of {size}"
                )));
            }
            (
                disjoint_cliques(n / size, size),
                json!({ "kind": "cliques", "vertices": n, "clique_size": size }),
            )
        }
        GenKind::Cloud => return cloud(s, out),
    };
    let profile = degree_profile(&g);
    let provenance = Provenance::new(seed, params);
    let path = write_graph(out, &g, s.binary, Some(provenance))?;
    Ok(Outcome {
        summary: format!(
            "gen: {} vertices, {} edges, Δ = {}, Δ₂ = {}",
            g.n(),
            g.edge_count(),
            profile.max_degree,
            profile.max_codegree
        ),
        files: vec![path],
    })
}

fn cloud(s: &Settings, out: &Path) -> Result<Outcome> {
    let dim = s.dim.unwrap_or(2);
    let domain_arg = s.domain.unwrap_or(DomainArg::Box(20.0));
    let domain = domain_arg.build(dim)?;
    let intensity = Settings::require(s.intensity, "intensity", "for a point cloud")?;
    let seed = s.seed();
    let mut cloud = sort_cloud(sample_poisson(&domain, intensity, POINT_BUDGET, &mut seeded_rng(seed))?);
    cloud.seed = seed;
    let params = json!({ "kind": "cloud", "dim": dim, "domain": domain_arg.to_string(), "intensity": intensity });
    let path = out.join("cloud.json");
    formats::write_json(
        &path,
        &CloudFile::from_cloud(&cloud, Some(Provenance::new(seed, params))),
    )?;
    Ok(Outcome {
        summary: format!("gen: {} points on {domain_arg} in dimension {dim}", cloud.len()),
        files: vec![path],
    })
}
