//! `analyze`: inequality tables and empirical tail checks.

use std::f64::consts::PI;
use std::path::Path;

use nibblepack_core::analysis::{abstract_lemma_tail, Bipartite, ConcentrationReport, ConcentrationSetup, TailReport};
use nibblepack_core::geometry::{
    ball_volume, ball_volume_bounds, cap_area, lens_upper_bound, lens_volume, unit_ball_radius,
};
use nibblepack_core::graph::generators::symplectic_polar_graph;
use nibblepack_core::pointproc::{mecke_check, poisson_tail_bound, DomainKind, PointCloud};
use nibblepack_core::stats::Estimate;
use nibblepack_core::{seeded_rng, stream_rng};
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::Outcome;
use crate::config::{AnalyzeTarget, DomainArg, Settings};
use crate::error::{CliError, Result};
use crate::formats::{self, Provenance};

pub fn run(target: AnalyzeTarget, s: &Settings, out: &Path) -> Result<Outcome> {
    match target {
        AnalyzeTarget::Geometry => geometry(out),
        AnalyzeTarget::Concentration => concentration(s, out),
        AnalyzeTarget::PoissonTail => poisson_tail(s, out),
        AnalyzeTarget::Mecke => mecke(s, out),
        AnalyzeTarget::Abstract => abstract_lemma(s, out),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRow {
    pub d: usize,
    pub t: f64,
    pub lower: f64,
    pub volume: f64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusRow {
    pub d: usize,
    pub r_d: f64,
    pub volume: f64,
    pub sqrt_d_over_8: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LensRow {
    pub d: usize,
    pub t: f64,
    pub lens: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapRow {
    pub d: usize,
    pub theta: f64,
    pub area: f64,
    pub expected: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryTables {
    pub sandwich: Vec<SandwichRow>,
    pub radius: Vec<RadiusRow>,
    pub lens: Vec<LensRow>,
    pub caps: Vec<CapRow>,
}

impl GeometryTables {
    pub fn violations(&self) -> usize {
        self.sandwich.iter().filter(|r| !r.holds).count()
            + self.radius.iter().filter(|r| !r.holds).count()
            + self.lens.iter().filter(|r| !r.holds).count()
            + self.caps.iter().filter(|r| !r.holds).count()
    }
}

/// Volume sandwich on `d ∈ [4, 64]`, `t ∈ {0.1, 0.2, …, 3}`; `r_d ≤ √(d/8)` on
/// `d ∈ [4, 256]`; lens bound at `R = 2r_d` on `d ∈ {4, 8, …, 64}`,
/// `t ∈ {0, 0.25, …, 8}`; and the exact cap areas at `π/3` and `π/2`.
pub fn geometry_tables() -> GeometryTables {
    let mut sandwich = Vec::new();
    for d in 4..=64 {
        for k in 1..=30 {
            let t = k as f64 / 10.0;
            let (lower, upper) = ball_volume_bounds(d, t);
            let volume = ball_volume(d, t);
            sandwich.push(SandwichRow {
                d,
                t,
                lower,
                volume,
                upper,
                holds: lower <= volume && volume <= upper,
            });
        }
    }
    let radius = (4..=256)
        .map(|d| {
            let r_d = unit_ball_radius(d);
            let bound = (d as f64 / 8.0).sqrt();
            let volume = ball_volume(d, r_d);
            RadiusRow {
                d,
                r_d,
                volume,
                sqrt_d_over_8: bound,
                holds: r_d <= bound && (volume - 1.0).abs() <= 1e-12,
            }
        })
        .collect();
    let mut lens = Vec::new();
    for d in (4..=64).step_by(4) {
        let r = 2.0 * unit_ball_radius(d);
        for k in 0..=32 {
            let t = k as f64 / 4.0;
            let (v, bound) = (lens_volume(d, r, t), lens_upper_bound(d, t));
            lens.push(LensRow {
                d,
                t,
                lens: v,
                bound,
                holds: v <= bound * (1.0 + 1e-12),
            });
        }
    }
    let mut caps = Vec::new();
    let mut cap_row = |d, theta, expected: f64| {
        let area = cap_area(d, theta);
        caps.push(CapRow {
            d,
            theta,
            area,
            expected,
            holds: (area - expected).abs() <= 1e-12,
        });
    };
    cap_row(3, PI / 3.0, 0.25);
    for d in 2..=64 {
        cap_row(d, PI / 2.0, 0.5);
    }
    GeometryTables {
        sandwich,
        radius,
        lens,
        caps,
    }
}

fn geometry(out: &Path) -> Result<Outcome> {
    let tables = geometry_tables();
    let files = [
        "geometry_sandwich.csv",
        "geometry_radius.csv",
        "geometry_lens.csv",
        "geometry_caps.csv",
    ]
    .map(|name| out.join(name));
    formats::write_csv(
        &files[0],
        &["d", "t", "lower", "volume", "upper", "holds"],
        &tables.sandwich,
    )?;
    formats::write_csv(
        &files[1],
        &["d", "r_d", "volume", "sqrt_d_over_8", "holds"],
        &tables.radius,
    )?;
    formats::write_csv(&files[2], &["d", "t", "lens", "bound", "holds"], &tables.lens)?;
    formats::write_csv(&files[3], &["d", "theta", "area", "expected", "holds"], &tables.caps)?;
    let violations = tables.violations();
    let rows = tables.sandwich.len() + tables.radius.len() + tables.lens.len() + tables.caps.len();
    Ok(Outcome {
        summary: format!("analyze geometry: {rows} rows, {violations} violations"),
        files: files.to_vec(),
    })
}

/// Runs `trials` independent trials in parallel and merges them in index
/// order, so the report does not depend on the number of workers.
pub fn concentration_parallel(setup: &ConcentrationSetup<'_>, seed: u64, trials: usize) -> Result<ConcentrationReport> {
    if trials == 0 {
        return Err(CliError::Config("trials must be positive".into()));
    }
    let tallies = (0..trials as u64)
        .into_par_iter()
        .map(|i| setup.trial(seed, i))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(setup.report(&tallies))
}

#[derive(Debug, Serialize)]
struct ClassRow {
    side: &'static str,
    key: usize,
    samples: u64,
    hits: u64,
    frequency: f64,
    stderr: f64,
    bound: f64,
}

fn tail_json(t: &TailReport) -> serde_json::Value {
    json!({
        "delta": t.delta,
        "trials": t.trials,
        "samples": t.samples,
        "frequency": t.frequency.mean,
        "frequency_stderr": t.frequency.stderr,
        "bound": t.bound,
        "respected": t.respected(),
        "mean_ratio": t.mean_ratio.mean,
        "mean_ratio_stderr": t.mean_ratio.stderr,
        "mean_bound": t.mean_bound,
    })
}

fn concentration(s: &Settings, out: &Path) -> Result<Outcome> {
    let q = s.q.unwrap_or(32);
    let gamma = s.gamma.unwrap_or(0.5);
    let alpha = s.alpha.unwrap_or(0.5);
    let eta = s.eta.unwrap_or(1.0 / q as f64);
    let trials = s.trials.unwrap_or(100);
    let pairs = s.pair_samples.unwrap_or(4000);
    let seed = s.seed();
    let g = symplectic_polar_graph(q)?;
    // Two non-adjacent points of W(3, q) share q + 1 neighbours, adjacent ones q − 1.
    let setup = ConcentrationSetup::new(&g, gamma, alpha, eta, Some(q + 1))?.with_pair_samples(pairs);
    let report = concentration_parallel(&setup, seed, trials)?;
    let params = json!({
        "graph": format!("W(3,{q})"), "gamma": gamma, "alpha": alpha, "eta": eta,
        "trials": trials, "pair_samples": pairs,
    });
    let mut rows = Vec::new();
    for (side, t) in [("degree", &report.degree), ("codegree", &report.codegree)] {
        rows.extend(t.classes.iter().map(|c| ClassRow {
            side,
            key: c.key,
            samples: c.samples,
            hits: c.hits,
            frequency: c.frequency.mean,
            stderr: c.frequency.stderr,
            bound: t.bound,
        }));
    }
    let json_path = out.join("concentration.json");
    let body = json!({
        "provenance": Provenance::new(seed, params),
        "degree": tail_json(&report.degree),
        "codegree": tail_json(&report.codegree),
    });
    formats::write_json_pretty(&json_path, &body)?;
    let csv_path = out.join("concentration_classes.csv");
    formats::write_csv(
        &csv_path,
        &["side", "key", "samples", "hits", "frequency", "stderr", "bound"],
        &rows,
    )?;
    let ok = report.degree.respected() && report.codegree.respected();
    Ok(Outcome {
        summary: format!(
            "analyze concentration: degree {:.4} / codegree {:.4} against bound {:.4} ({})",
            report.degree.frequency.mean,
            report.codegree.frequency.mean,
            report.degree.bound,
            if ok { "respected" } else { "EXCEEDED" }
        ),
        files: vec![json_path, csv_path],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonTailRow {
    pub mu: f64,
    pub t: f64,
    pub samples: u64,
    pub hits: u64,
    pub frequency: f64,
    pub stderr: f64,
    pub bound: f64,
    pub respected: bool,
}

pub const POISSON_MEANS: [f64; 5] = [1.0, 5.0, 20.0, 50.0, 100.0];
pub const POISSON_DEVIATIONS: [f64; 5] = [0.1, 0.25, 0.5, 1.0, 2.0];

/// Frequency of `Y ≥ (1+t)μ` for `Y ~ Po(μ)` against `exp(−min{t,t²}μ/3)`,
/// one random stream per mean.
pub fn poisson_tail_table(seed: u64, samples: u64) -> Vec<PoissonTailRow> {
    POISSON_MEANS
        .par_iter()
        .enumerate()
        .map(|(k, &mu)| {
            let mut rng = stream_rng(seed, k as u64);
            let po = Poisson::new(mu).expect("positive mean");
            let draws: Vec<f64> = (0..samples).map(|_| po.sample(&mut rng)).collect();
            POISSON_DEVIATIONS
                .iter()
                .map(|&t| {
                    let hits = draws.iter().filter(|&&y| y >= (1.0 + t) * mu).count() as u64;
                    let est = Estimate::from_hits(hits, samples);
                    let bound = poisson_tail_bound(mu, t);
                    PoissonTailRow {
                        mu,
                        t,
                        samples,
                        hits,
                        frequency: est.mean,
                        stderr: est.stderr,
                        bound,
                        respected: est.mean <= bound,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

fn poisson_tail(s: &Settings, out: &Path) -> Result<Outcome> {
    let samples = s.samples.unwrap_or(100_000) as u64;
    if samples == 0 {
        return Err(CliError::Config("samples must be positive".into()));
    }
    let rows = poisson_tail_table(s.seed(), samples);
    let path = out.join("poisson_tail.csv");
    formats::write_csv(
        &path,
        &[
            "mu",
            "t",
            "samples",
            "hits",
            "frequency",
            "stderr",
            "bound",
            "respected",
        ],
        &rows,
    )?;
    let violations = rows.iter().filter(|r| !r.respected).count();
    Ok(Outcome {
        summary: format!(
            "analyze poisson-tail: {} cells, {violations} above the bound",
            rows.len()
        ),
        files: vec![path],
    })
}

fn mecke(s: &Settings, out: &Path) -> Result<Outcome> {
    let dim = s.dim.unwrap_or(2);
    let domain_arg = s.domain.unwrap_or(DomainArg::Box(1.0));
    let domain = domain_arg.build(dim)?;
    let intensity = s.intensity.unwrap_or(5.0);
    let radius = s.radius.unwrap_or(0.1);
    let samples = s.samples.unwrap_or(4000);
    let seed = s.seed();
    let isolated = |i: usize, cloud: &PointCloud| {
        let x = cloud.point(i);
        (0..cloud.len()).all(|j| j == i || cloud.domain().dist2(x, cloud.point(j)) > radius * radius)
    };
    let report = mecke_check(&domain, intensity, isolated, samples, samples, &mut seeded_rng(seed))?;
    // Void probability e^{−λ Vol(B_r)} holds when the ball does not wrap.
    let analytic = match domain.kind {
        DomainKind::PeriodicBox { side } if 2.0 * radius < side => {
            Some(intensity * domain.measure() * (-intensity * ball_volume(dim, radius)).exp())
        }
        _ => None,
    };
    let params = json!({
        "dim": dim, "domain": domain_arg.to_string(), "intensity": intensity,
        "radius": radius, "samples": samples, "predicate": "isolated",
    });
    let path = out.join("mecke.json");
    let body = json!({
        "provenance": Provenance::new(seed, params),
        "lhs": report.lhs.mean,
        "lhs_stderr": report.lhs.stderr,
        "rhs": report.rhs.mean,
        "rhs_stderr": report.rhs.stderr,
        "agrees_3sigma": report.agrees(3.0),
        "analytic": analytic,
    });
    formats::write_json_pretty(&path, &body)?;
    Ok(Outcome {
        summary: format!(
            "analyze mecke: lhs {:.4} ± {:.4}, rhs {:.4} ± {:.4}",
            report.lhs.mean, report.lhs.stderr, report.rhs.mean, report.rhs.stderr
        ),
        files: vec![path],
    })
}

#[derive(Debug, Serialize)]
struct AbstractRow {
    r: f64,
    samples: usize,
    frequency: f64,
    stderr: f64,
    bound: f64,
    respected: bool,
}

fn abstract_lemma(s: &Settings, out: &Path) -> Result<Outcome> {
    let (x_count, y_count) = (50, 500);
    let degree = s.degree.unwrap_or(20);
    let ell = 3;
    let p = s.edge_prob.unwrap_or(0.05);
    let samples = s.samples.unwrap_or(100_000);
    let seed = s.seed();
    let mut rng = seeded_rng(seed);
    let h = Bipartite::random_capped(x_count, y_count, degree, ell, &mut rng)?;
    let rs = [5.0, 10.0, 15.0, 20.0];
    let tails = abstract_lemma_tail(&h, p, ell, &rs, samples, &mut rng)?;
    let rows: Vec<AbstractRow> = tails
        .iter()
        .map(|t| AbstractRow {
            r: t.r,
            samples,
            frequency: t.frequency.mean,
            stderr: t.frequency.stderr,
            bound: t.bound,
            respected: t.respected(),
        })
        .collect();
    let path = out.join("abstract.csv");
    formats::write_csv(
        &path,
        &["r", "samples", "frequency", "stderr", "bound", "respected"],
        &rows,
    )?;
    let violations = rows.iter().filter(|r| !r.respected).count();
    Ok(Outcome {
        summary: format!("analyze abstract: |X| = {x_count}, |Y| = {y_count}, p = {p}, {violations} of {} deviations above the bound", rows.len()),
        files: vec![path],
    })
}
