//! `pack` and `code`: sample, prune, build the threshold graph, nibble, verify.

use std::f64::consts::PI;
use std::path::Path;

use nibblepack_core::analysis::{greedy_mis, GreedyOrder};
use nibblepack_core::geometry::{ball_volume, cap_area, unit_ball_radius};
use nibblepack_core::graph::Graph;
use nibblepack_core::nibble::{Mode, Schedule};
use nibblepack_core::pointproc::{prune, sample_poisson, Domain, PaperPreset, PointCloud, PruneSpec};
use nibblepack_core::seeded_rng;
use serde_json::{json, Value};

use super::{nibble_graph, schedule_json, stop_json, write_trace, Outcome};
use crate::config::{DomainArg, Settings};
use crate::error::{CliError, Result};
use crate::formats::{self, sort_cloud, CloudFile, GraphFile, Provenance, ResultFile, VERSION};

/// Largest expected point count accepted from the sampler.
pub const POINT_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy)]
enum Target {
    Packing { radius: f64 },
    Code { theta: f64 },
}

pub fn pack(s: &Settings, out: &Path) -> Result<Outcome> {
    let dim = s.dim.unwrap_or(2);
    let domain_arg = s.domain.unwrap_or(DomainArg::Box(20.0));
    if domain_arg == DomainArg::Sphere {
        return Err(CliError::Config(
            "pack needs a box or ball domain; use `code` on the sphere".into(),
        ));
    }
    let domain = domain_arg.build(dim)?;
    let radius = s.radius.unwrap_or_else(|| unit_ball_radius(dim));
    if !(radius.is_finite() && radius > 0.0) {
        return Err(CliError::Config(format!("radius {radius} must be positive")));
    }
    let intensity = match s.mode() {
        Mode::Paper if dim < 2 => return Err(CliError::Config("paper mode needs --dim ≥ 2".into())),
        Mode::Paper => s.intensity.unwrap_or_else(|| PruneSpec::paper_euclidean(dim).intensity),
        Mode::Custom => Settings::require(s.intensity, "intensity", "in custom mode")?,
    };
    check_intensity(intensity)?;
    let preset = PruneSpec::euclidean(dim, radius, intensity);
    let params = json!({ "command": "pack", "domain": domain_arg.to_string(), "radius": radius });
    run(s, out, domain, preset, Target::Packing { radius }, params)
}

pub fn code(s: &Settings, out: &Path) -> Result<Outcome> {
    let dim = s.dim.unwrap_or(3);
    if dim < 2 {
        return Err(CliError::Config("code needs --dim ≥ 2".into()));
    }
    if s.domain.is_some_and(|d| d != DomainArg::Sphere) {
        return Err(CliError::Config(
            "code runs on the sphere; drop --domain or pass `sphere`".into(),
        ));
    }
    let theta = s.theta.unwrap_or(PI / 3.0);
    if !(theta > 0.0 && theta <= PI) {
        return Err(CliError::Config(format!("theta = {theta} must lie in (0, π]")));
    }
    let intensity = match s.mode() {
        Mode::Paper => s
            .intensity
            .unwrap_or_else(|| PruneSpec::paper_sphere(dim, theta).intensity),
        Mode::Custom => Settings::require(s.intensity, "intensity", "in custom mode")?,
    };
    check_intensity(intensity)?;
    let preset = PruneSpec::sphere(dim, theta, intensity);
    let domain = Domain::unit_sphere(dim).map_err(|e| CliError::Config(e.to_string()))?;
    let params = json!({ "command": "code", "domain": "sphere", "theta": theta });
    run(s, out, domain, preset, Target::Code { theta }, params)
}

fn check_intensity(intensity: f64) -> Result<()> {
    if intensity.is_finite() && intensity >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "intensity {intensity} must be finite and nonnegative"
        )))
    }
}

fn run(
    s: &Settings,
    out: &Path,
    domain: Domain,
    preset: PaperPreset,
    target: Target,
    mut params: Value,
) -> Result<Outcome> {
    let spec = PruneSpec {
        degree_cap: s.degree_cap.unwrap_or(preset.spec.degree_cap),
        codegree_cap: s.codegree_cap.unwrap_or(preset.spec.codegree_cap),
        ..preset.spec
    };
    if s.mode() == Mode::Paper {
        // The pruned graph has Δ ≤ degree_cap − 1, so a schedule that is
        // infeasible at the cap is infeasible for every draw.
        Schedule::paper(spec.degree_cap.saturating_sub(1), spec.codegree_cap.saturating_sub(1))?;
    }
    let seed = s.seed();
    let mut rng = seeded_rng(seed);
    let mut cloud = sort_cloud(sample_poisson(&domain, preset.intensity, POINT_BUDGET, &mut rng)?);
    cloud.seed = seed;
    let pruned = prune(&cloud, &spec)?;
    let g = &pruned.graph;
    let (schedule, result) = nibble_graph(g, s, &mut rng)?;
    let centers: Vec<u32> = result.independent_set.iter().map(|&v| g.label(v as usize)).collect();
    let extreme = verify(&cloud, &centers, target)?;
    let baseline = greedy_mis(g, GreedyOrder::Random(seed)).len();

    let extra = params.as_object_mut().expect("params is an object");
    extra.insert("mode".into(), schedule_json(&schedule, s.max_retries)["mode"].clone());
    extra.insert("dim".into(), json!(domain.dim));
    extra.insert("intensity".into(), json!(preset.intensity));
    extra.insert("degree_cap".into(), json!(spec.degree_cap));
    extra.insert("codegree_cap".into(), json!(spec.codegree_cap));
    extra.insert("schedule".into(), schedule_json(&schedule, s.max_retries));

    let k = centers.len();
    let mut report = json!({
        "points": cloud.len(),
        "kept": pruned.kept.len(),
        "removed_degree": pruned.removed_degree,
        "removed_codegree": pruned.removed_codegree,
        "expected_degree": preset.delta,
        "graph": graph_json(g),
        "stop": stop_json(&result),
        "baseline_size": baseline,
        "centers": centers.iter().map(|&i| cloud.point(i as usize).to_vec()).collect::<Vec<_>>(),
    });
    let fields = report.as_object_mut().expect("report is an object");
    let summary = match target {
        Target::Packing { radius } => {
            let ball = ball_volume(domain.dim, radius);
            let density = k as f64 * ball / domain.measure();
            let baseline_density = baseline as f64 * ball / domain.measure();
            fields.insert("min_distance".into(), json!(extreme));
            fields.insert("density".into(), json!(density));
            fields.insert("baseline_density".into(), json!(baseline_density));
            format!(
                "pack: {k} balls of radius {radius} from {} points ({} kept), density {density:.6} (greedy {baseline_density:.6})",
                cloud.len(),
                pruned.kept.len()
            )
        }
        Target::Code { theta } => {
            let cap = cap_area(domain.dim, theta);
            fields.insert("min_angle".into(), json!(extreme));
            fields.insert("cap_ratio".into(), json!(k as f64 * cap));
            fields.insert("baseline_cap_ratio".into(), json!(baseline as f64 * cap));
            format!(
                "code: {k} points at angle ≥ {theta} from {} sampled ({} kept), |I|·s_d(θ) = {:.6} (greedy {baseline})",
                cloud.len(),
                pruned.kept.len(),
                k as f64 * cap
            )
        }
    };

    let provenance = Provenance::new(seed, params.clone());
    let mut files = Vec::new();
    let cloud_path = out.join("cloud.json");
    formats::write_json(&cloud_path, &CloudFile::from_cloud(&cloud, Some(provenance.clone())))?;
    files.push(cloud_path);
    if s.emit_graph {
        files.push(write_graph(out, g, s.binary, Some(provenance))?);
    }
    let result_path = out.join("result.json");
    let file = ResultFile {
        independent_set: centers,
        size: k,
        verified: true,
        seed,
        params,
        version: VERSION.to_string(),
        report,
    };
    formats::write_json_pretty(&result_path, &file)?;
    files.push(result_path);
    write_trace(out, &result, &mut files)?;
    Ok(Outcome { summary, files })
}

pub(super) fn graph_json(g: &Graph) -> Value {
    json!({ "n": g.n(), "edges": g.edge_count(), "max_degree": g.max_degree() })
}

pub(super) fn write_graph(
    out: &Path,
    g: &Graph,
    binary: bool,
    provenance: Option<Provenance>,
) -> Result<std::path::PathBuf> {
    if binary {
        let path = out.join("graph.bin");
        formats::write_graph_binary(&path, g)?;
        Ok(path)
    } else {
        let path = out.join("graph.json");
        formats::write_json(&path, &GraphFile::from_graph(g, provenance))?;
        Ok(path)
    }
}

/// Checks every pair of chosen points, independently of the graph, and
/// returns the minimum distance (or angle).
fn verify(cloud: &PointCloud, chosen: &[u32], target: Target) -> Result<Option<f64>> {
    let points: Vec<&[f64]> = chosen.iter().map(|&i| cloud.point(i as usize)).collect();
    let pairs = || (0..points.len()).flat_map(|i| (i + 1..points.len()).map(move |j| (i, j)));
    match target {
        Target::Packing { radius } => {
            let reach2 = 4.0 * radius * radius;
            let mut min2 = f64::INFINITY;
            for (i, j) in pairs() {
                let d2 = cloud.domain().dist2(points[i], points[j]);
                if d2 <= reach2 {
                    return Err(CliError::Verification(format!(
                        "centers {} and {} are {} apart, below 2r = {}",
                        chosen[i],
                        chosen[j],
                        d2.sqrt(),
                        2.0 * radius
                    )));
                }
                min2 = min2.min(d2);
            }
            Ok(min2.is_finite().then(|| min2.sqrt()))
        }
        Target::Code { theta } => {
            let mut max_dot = f64::NEG_INFINITY;
            for (i, j) in pairs() {
                let dot: f64 = points[i].iter().zip(points[j]).map(|(a, b)| a * b).sum();
                if dot >= theta.cos() {
                    return Err(CliError::Verification(format!(
                        "points {} and {} are at angle {}, below θ = {theta}",
                        chosen[i],
                        chosen[j],
                        dot.clamp(-1.0, 1.0).acos()
                    )));
                }
                max_dot = max_dot.max(dot);
            }
            Ok(max_dot.is_finite().then(|| max_dot.clamp(-1.0, 1.0).acos()))
        }
    }
}
