//! One test per acceptance criterion. Each prints a single `PASS` or `FAIL`
//! line to stderr, bypassing the test harness's output capture.

// `eprintln!` is captured by the harness; a direct write to the handle is not.
#![allow(clippy::explicit_write)]
// Negated comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::Parser;
use nibblepack::commands::{concentration_parallel, geometry_tables, poisson_tail_table};
use nibblepack::formats::{read_cloud, ResultFile};
use nibblepack::{Cli, CliError};
use nibblepack_core::analysis::{
    abstract_lemma_tail, brute_force_mis, greedy_mis, Bipartite, ConcentrationSetup, GreedyOrder,
};
use nibblepack_core::geometry::{cap_area, lens_upper_bound, lens_volume, unit_ball_radius};
use nibblepack_core::graph::generators::*;
use nibblepack_core::graph::{
    build_geometric_graph, build_geometric_graph_brute_force, degree_profile, Graph, Threshold,
};
use nibblepack_core::nibble::*;
use nibblepack_core::pointproc::{mecke_check, prune, sample_poisson, Domain, PointCloud, PruneSpec};
use nibblepack_core::{seeded_rng, stream_rng};
use rand::Rng;
use tempfile::TempDir;

/// Size of the independent set on seed 0 of criterion 5, to be recorded once
/// the fixture run succeeds.
const FIXTURE: Option<usize> = None;

/// Runs a command in-process, as the binary would with these arguments.
fn nibblepack(args: &[&str], out: &Path) -> Result<(), CliError> {
    let argv = ["nibblepack"]
        .iter()
        .copied()
        .chain(args.iter().copied())
        .chain(["--out", out.to_str().unwrap()]);
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Config(e.to_string()))?;
    nibblepack::run(cli).map(drop)
}

fn verdict(criterion: u32, title: &str, started: Instant, limit: Duration, mut problems: Vec<String>, detail: String) {
    let elapsed = started.elapsed();
    if elapsed > limit {
        problems.push(format!(
            "took {:.1} s, limit {} s",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ));
    }
    let line = if problems.is_empty() {
        format!(
            "PASS criterion {criterion}: {title} ({detail}; {:.1} s)",
            elapsed.as_secs_f64()
        )
    } else {
        format!(
            "FAIL criterion {criterion}: {title}: {} ({detail})",
            problems.join("; ")
        )
    };
    writeln!(std::io::stderr(), "{line}").unwrap();
    assert!(problems.is_empty(), "{line}");
}

fn result(dir: &Path) -> ResultFile {
    serde_json::from_slice(&std::fs::read(dir.join("result.json")).unwrap()).unwrap()
}

/// Codegree of every pair with at least one common neighbour.
fn codegrees(g: &Graph) -> HashMap<(u32, u32), usize> {
    let mut out = HashMap::new();
    for w in 0..g.n() {
        let nb = g.neighbors(w);
        for (i, &u) in nb.iter().enumerate() {
            for &v in &nb[i + 1..] {
                *out.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }
    }
    out
}

fn max_codegree_oracle(g: &Graph) -> usize {
    codegrees(g).values().copied().max().unwrap_or(0)
}

/// Edge list of a threshold graph by comparing raw coordinates.
fn threshold_edges(cloud: &PointCloud, threshold: Threshold) -> Vec<(u32, u32)> {
    let d = cloud.dim();
    let close = |a: &[f64], b: &[f64]| match (threshold, &cloud.domain().kind) {
        (Threshold::Angle(theta), _) => a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() >= theta.cos(),
        (Threshold::Distance(t), nibblepack_core::pointproc::DomainKind::PeriodicBox { side }) => {
            let s = *side;
            (0..d)
                .map(|k| {
                    let gap = (a[k] - b[k]).abs();
                    gap.min(s - gap).powi(2)
                })
                .sum::<f64>()
                <= t * t
        }
        (Threshold::Distance(t), _) => a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() <= t * t,
    };
    let mut edges = Vec::new();
    for i in 0..cloud.len() {
        for j in i + 1..cloud.len() {
            if close(cloud.point(i), cloud.point(j)) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    edges
}

/// α(G) by checking every vertex subset, for `n ≤ 24`.
fn alpha_by_enumeration(g: &Graph) -> usize {
    let n = g.n();
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let mut independent = vec![false; 1 << n];
    independent[0] = true;
    let mut best = 0;
    for mask in 1usize..1 << n {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        independent[mask] = independent[rest] && adj[v] & rest as u32 == 0;
        if independent[mask] {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

fn random_cloud<R: Rng>(k: usize, rng: &mut R) -> (PointCloud, Threshold) {
    let dim = 1 + k % 6;
    let (domain, threshold) = match k % 3 {
        0 => {
            let side = rng.random_range(1.0..6.0);
            (
                Domain::periodic_box(dim, side).unwrap(),
                Threshold::Distance(rng.random_range(0.05..0.6) * side),
            )
        }
        1 => (
            Domain::ball(dim, rng.random_range(0.5..3.0)).unwrap(),
            Threshold::Distance(rng.random_range(0.05..1.0)),
        ),
        _ => (
            Domain::unit_sphere(dim.max(2)).unwrap(),
            Threshold::Angle(rng.random_range(0.05..PI)),
        ),
    };
    let count = rng.random_range(0..600) as f64;
    let cloud = sample_poisson(&domain, count / domain.measure(), 1 << 20, rng).unwrap();
    (cloud, threshold)
}

#[test]
fn criterion_1_geometry_inequalities() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let tables = geometry_tables();
    let violations = tables.violations();
    if violations > 0 {
        problems.push(format!("{violations} table rows violate their inequality"));
    }
    if tables.sandwich.iter().map(|r| r.d).min() != Some(4) || tables.sandwich.iter().map(|r| r.d).max() != Some(64) {
        problems.push("sandwich table does not span d = 4..64".into());
    }
    if tables.radius.len() != 253 {
        problems.push(format!(
            "radius table has {} rows, expected d = 4..256",
            tables.radius.len()
        ));
    }
    for d in 4..=256 {
        if unit_ball_radius(d) > (d as f64 / 8.0).sqrt() {
            problems.push(format!("r_{d} > √(d/8)"));
        }
    }
    let mut rng = seeded_rng(1);
    let mut lens_checked = 0;
    for _ in 0..1000 {
        let d = rng.random_range(4..=64);
        let t = rng.random_range(0.0..4.0 * unit_ball_radius(d));
        let (lens, bound) = (lens_volume(d, 2.0 * unit_ball_radius(d), t), lens_upper_bound(d, t));
        if !(lens <= bound) {
            problems.push(format!("lens({d}, {t}) = {lens:e} > {bound:e}"));
        }
        lens_checked += 1;
    }
    let third = cap_area(3, PI / 3.0);
    if (third - 0.25).abs() > 1e-12 {
        problems.push(format!("cap_area(3, π/3) = {third}"));
    }
    for d in 2..=64 {
        let half = cap_area(d, PI / 2.0);
        if (half - 0.5).abs() > 1e-12 {
            problems.push(format!("cap_area({d}, π/2) = {half}"));
        }
    }
    let rows = tables.sandwich.len() + tables.radius.len() + tables.lens.len() + tables.caps.len();
    verdict(
        1,
        "geometry inequality suite",
        started,
        Duration::from_secs(10),
        problems,
        format!("{rows} table rows, {lens_checked} random lens checks, caps at 63 dimensions"),
    );
}

#[test]
fn criterion_2_oracle_equivalence() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let mut rng = seeded_rng(2);
    let mut edges_seen = 0;
    for k in 0..100 {
        let (cloud, threshold) = random_cloud(k, &mut rng);
        let fast = build_geometric_graph(&cloud, threshold).unwrap();
        let brute = build_geometric_graph_brute_force(&cloud, threshold).unwrap();
        let raw = threshold_edges(&cloud, threshold);
        let fast_edges: Vec<_> = fast.edges().collect();
        if fast.n() != cloud.len() || fast_edges != brute.edges().collect::<Vec<_>>() || fast_edges != raw {
            problems.push(format!("cloud {k}: graphs differ"));
        }
        edges_seen += raw.len();
    }
    let mut corpus = vec![
        Graph::empty(0),
        Graph::empty(5),
        complete(7),
        complete(20),
        cycle(5),
        cycle(20),
        path(20),
    ];
    corpus.extend([
        complete_bipartite(3, 3),
        complete_bipartite(10, 10),
        disjoint_cliques(4, 5),
        disjoint_cliques(5, 4),
    ]);
    corpus.push(random_regular(20, 3, &mut rng).unwrap());
    corpus.push(random_regular(18, 5, &mut rng).unwrap());
    for n in 1..=20 {
        for p in [0.1, 0.3, 0.5, 0.8] {
            corpus.push(gnp(n, p, &mut rng));
        }
    }
    for (k, g) in corpus.iter().enumerate() {
        let mis = brute_force_mis(g).unwrap();
        if mis.size != alpha_by_enumeration(g) || mis.witness.len() != mis.size || !g.is_independent(&mis.witness) {
            problems.push(format!("corpus graph {k}: brute force disagrees with enumeration"));
        }
    }
    verdict(
        2,
        "oracle equivalence",
        started,
        Duration::from_secs(120),
        problems,
        format!(
            "100 clouds with {edges_seen} edges, {} graphs with n ≤ 20",
            corpus.len()
        ),
    );
}

/// Breadth-first distance, capped at `limit`.
fn distance(g: &Graph, u: usize, v: usize, limit: usize) -> usize {
    let mut seen = vec![false; g.n()];
    let mut frontier = vec![u];
    seen[u] = true;
    for d in 0..limit {
        if frontier.contains(&v) {
            return d;
        }
        let mut next = Vec::new();
        for &x in &frontier {
            for &y in g.neighbors(x) {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    next.push(y as usize);
                }
            }
        }
        frontier = next;
    }
    limit
}

fn random_capped_degree<R: Rng>(n: usize, delta: usize, rng: &mut R) -> Graph {
    let mut adj = vec![Vec::new(); n];
    for _ in 0..rng.random_range(0..=n * delta / 2) {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v && adj[u].len() < delta && adj[v].len() < delta && !adj[u].contains(&(v as u32)) {
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
    }
    Graph::from_adjacency(adj)
}

fn prune_problems(k: usize, cloud: &PointCloud, spec: &PruneSpec) -> Vec<String> {
    let n = cloud.len();
    let g = Graph::from_edges(n, &threshold_edges(cloud, spec.interaction)).unwrap();
    let mut bad: Vec<bool> = (0..n).map(|v| g.degree(v) >= spec.degree_cap).collect();
    for (&(u, v), &c) in &codegrees(&g) {
        if c >= spec.codegree_cap {
            bad[u as usize] = true;
            bad[v as usize] = true;
        }
    }
    if spec.codegree_cap == 0 && n >= 2 {
        bad.iter_mut().for_each(|b| *b = true);
    }
    let expected: Vec<u32> = (0..n as u32).filter(|&v| !bad[v as usize]).collect();
    let out = prune(cloud, spec).unwrap();
    let mut problems = Vec::new();
    if out.kept_indices != expected {
        problems.push(format!("prune {k}: kept set differs from the one-pass definition"));
    }
    let kept = Graph::from_edges(out.kept.len(), &threshold_edges(&out.kept, spec.interaction)).unwrap();
    if kept.n() > 0 && kept.max_degree() >= spec.degree_cap {
        problems.push(format!(
            "prune {k}: degree {} ≥ cap {}",
            kept.max_degree(),
            spec.degree_cap
        ));
    }
    if kept.n() > 1 && max_codegree_oracle(&kept) >= spec.codegree_cap.max(1) {
        problems.push(format!("prune {k}: codegree above cap {}", spec.codegree_cap));
    }
    problems
}

/// Checks an accepted step against the five conclusions and the definition
/// of `C`.
fn step_problems(label: &str, g: &Graph, cfg: &StepConfig, out: &StepOutcome) -> Vec<String> {
    let n = g.n();
    let (delta, gamma, alpha) = (cfg.delta as f64, cfg.gamma, cfg.alpha);
    let nf = n as f64;
    let mut problems = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            problems.push(format!("{label}: {what}"));
        }
    };
    let mut in_a = vec![false; n];
    out.a.iter().for_each(|&v| in_a[v as usize] = true);
    let a_edges = g.edges().filter(|&(u, v)| in_a[u as usize] && in_a[v as usize]).count();
    check(a_edges == out.a_edges, "reported e(G[A]) is wrong");
    check(
        out.a.len() as f64 >= (1.0 - alpha) * gamma * nf / delta,
        "|A| below (1−α)γn/Δ",
    );
    check(a_edges as f64 <= gamma * gamma * nf / delta, "e(G[A]) above γ²n/Δ");
    let alive: Vec<bool> = (0..n)
        .map(|v| !in_a[v] && g.neighbors(v).iter().all(|&w| !in_a[w as usize]))
        .collect();
    check(out.c.iter().all(|&v| alive[v as usize]), "C meets A ∪ N(A)");
    check(out.c.len() as f64 >= (1.0 - gamma - alpha) * nf, "|C| below (1−γ−α)n");
    let c_graph = g.induced(&out.c);
    let profile = degree_profile(&c_graph);
    check(
        profile.max_degree as f64 <= (1.0 - gamma + alpha) * delta,
        "Δ(G[C]) above (1−γ+α)Δ",
    );
    let c_codegree = max_codegree_oracle(&c_graph);
    check(
        c_codegree as f64 <= (1.0 - gamma + alpha) * out.eta_delta,
        "Δ₂(G[C]) above (1−γ+α)ηΔ",
    );
    let eta_delta = (max_codegree_oracle(g) as f64).max(2.0 * delta.sqrt());
    check(out.eta_delta == eta_delta, "ηΔ differs from max{Δ₂, 2√Δ}");
    problems
}

#[test]
fn criterion_3_lemma_postconditions() {
    let started = Instant::now();
    let mut problems = Vec::new();

    let mut rng = seeded_rng(3);
    let mut prunes = 0;
    for k in 0..60 {
        let (cloud, threshold) = random_cloud(k, &mut rng);
        let spec = PruneSpec {
            interaction: threshold,
            degree_cap: rng.random_range(0..12),
            codegree_cap: rng.random_range(0..6),
        };
        problems.extend(prune_problems(k, &cloud, &spec));
        prunes += 1;
    }
    for (k, d) in (2..=6).enumerate() {
        let r = unit_ball_radius(d);
        let domain = Domain::periodic_box(d, 6.0 * r).unwrap();
        let preset = PruneSpec::euclidean(d, r, 2.0);
        let cloud = sample_poisson(&domain, preset.intensity, 1 << 20, &mut rng).unwrap();
        problems.extend(prune_problems(100 + k, &cloud, &preset.spec));
        let sphere = PruneSpec::sphere(d.max(3), PI / 3.0, 60.0);
        let domain = Domain::unit_sphere(d.max(3)).unwrap();
        let cloud = sample_poisson(&domain, sphere.intensity / domain.measure(), 1 << 20, &mut rng).unwrap();
        problems.extend(prune_problems(200 + k, &cloud, &sphere.spec));
        prunes += 2;
    }

    let mut rng = seeded_rng(31);
    for k in 0..100 {
        let delta: usize = 2 + k % 5;
        let n = 2 * delta.pow(4) + rng.random_range(0..200);
        let g = random_capped_degree(n, delta, &mut rng);
        let h = regularize(&g, delta, RegularizePolicy::Strict).unwrap().graph;
        if !(0..n).all(|v| h.degree(v) == delta || h.degree(v) == delta + 1) {
            problems.push(format!("regularize {k}: a degree lies outside {{Δ, Δ+1}}"));
        }
        if !g.edges().all(|(u, v)| h.has_edge(u as usize, v as usize)) {
            problems.push(format!("regularize {k}: an input edge was dropped"));
        }
        if !h
            .edges()
            .all(|(u, v)| g.has_edge(u as usize, v as usize) || distance(&g, u as usize, v as usize, 4) >= 4)
        {
            problems.push(format!("regularize {k}: a new edge joins vertices at distance below 4"));
        }
        if max_codegree_oracle(&h) > max_codegree_oracle(&g).max(1) {
            problems.push(format!("regularize {k}: Δ₂ grew past max{{Δ₂(G), 1}}"));
        }
    }

    let params = NibbleParams::custom(0.25, 0.125);
    let cfg = StepConfig::new(40, &params);
    let regular = random_regular(3000, 40, &mut seeded_rng(32)).unwrap();
    let cliques = sharpness_construction(3000, 40, 0.5, &mut seeded_rng(33))
        .unwrap()
        .graph;
    let (mut accepted, mut refused) = (0, 0);
    for seed in 0..50u64 {
        let g = if seed % 2 == 0 { &regular } else { &cliques };
        match nibble_step(g, &cfg, &mut seeded_rng(seed)) {
            Ok(out) => {
                accepted += 1;
                problems.extend(step_problems(&format!("step seed {seed}"), g, &cfg, &out));
            }
            Err(_) => refused += 1,
        }
    }
    if accepted == 0 {
        problems.push("no nibble step was accepted".into());
    }
    verdict(
        3,
        "lemma post-conditions",
        started,
        Duration::from_secs(300),
        problems,
        format!("{prunes} prunes, 100 regularizations, {accepted} accepted and {refused} refused steps"),
    );
}

#[test]
fn criterion_4_probability_bounds() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let mut details = Vec::new();

    let polar = symplectic_polar_graph(32).unwrap();
    let setup = ConcentrationSetup::new(&polar, 0.5, 0.5, 1.0 / 32.0, Some(33))
        .unwrap()
        .with_pair_samples(250_000);
    for seed in 0..2 {
        let report = concentration_parallel(&setup, seed, 40).unwrap();
        for (side, tail) in [("degree", &report.degree), ("codegree", &report.codegree)] {
            if !tail.respected() {
                problems.push(format!(
                    "concentration seed {seed}: {side} tail {:.4} above {:.4}",
                    tail.frequency.mean, tail.bound
                ));
            }
            if tail.samples < 100_000 {
                problems.push(format!(
                    "concentration seed {seed}: only {} {side} samples",
                    tail.samples
                ));
            }
            details.push(tail.samples);
        }
    }

    for seed in 0..2 {
        let mut rng = seeded_rng(seed);
        let h = Bipartite::random_capped(50, 500, 20, 3, &mut rng).unwrap();
        for tail in abstract_lemma_tail(&h, 0.05, 3, &[5.0, 10.0, 15.0, 20.0], 100_000, &mut rng).unwrap() {
            if !tail.respected() {
                problems.push(format!(
                    "abstract seed {seed}: r = {} tail {:.4} above {:.4}",
                    tail.r, tail.frequency.mean, tail.bound
                ));
            }
        }
    }

    for seed in 0..2 {
        for row in poisson_tail_table(seed, 100_000) {
            if !row.respected {
                problems.push(format!(
                    "Poisson seed {seed}: μ = {}, t = {} tail {} above {}",
                    row.mu, row.t, row.frequency, row.bound
                ));
            }
        }
    }

    let mut mecke_runs = 0;
    for seed in 0..3u64 {
        let cases = [
            (Domain::periodic_box(2, 1.0).unwrap(), 5.0, Threshold::Distance(0.1)),
            (Domain::ball(3, 1.0).unwrap(), 8.0, Threshold::Distance(0.4)),
            (Domain::unit_sphere(3).unwrap(), 2.0, Threshold::Angle(PI / 4.0)),
        ];
        for (k, (domain, intensity, threshold)) in cases.into_iter().enumerate() {
            let isolated =
                |i: usize, cloud: &PointCloud| (0..cloud.len()).all(|j| j == i || !threshold.is_edge(cloud, i, j));
            let report = mecke_check(
                &domain,
                intensity,
                isolated,
                4000,
                4000,
                &mut stream_rng(seed, k as u64),
            )
            .unwrap();
            if !report.agrees(3.0) {
                problems.push(format!(
                    "Mecke seed {seed} case {k}: {:.4} ± {:.4} vs {:.4} ± {:.4}",
                    report.lhs.mean, report.lhs.stderr, report.rhs.mean, report.rhs.stderr
                ));
            }
            mecke_runs += 1;
        }
    }
    verdict(
        4,
        "probability-bound suite",
        started,
        Duration::from_secs(600),
        problems,
        format!(
            "concentration samples per side {:?}, abstract and Poisson at 10^5 draws over 2 seeds, {mecke_runs} Mecke checks",
            details
        ),
    );
}

/// Fraction of vertices outside `A ∪ N(A)` whose degree there stays below
/// `(1−γ+α)Δ`, for one `p`-random `A` with `p = γ/Δ`. Codegrees are not
/// filtered, so this is an upper estimate of `|C|/n`.
fn survivor_fraction<R: Rng>(g: &Graph, delta: usize, gamma: f64, alpha: f64, rng: &mut R) -> f64 {
    let p = gamma / delta as f64;
    let in_a: Vec<bool> = (0..g.n()).map(|_| rng.random_bool(p)).collect();
    let alive: Vec<bool> = (0..g.n())
        .map(|v| !in_a[v] && g.neighbors(v).iter().all(|&w| !in_a[w as usize]))
        .collect();
    let bound = (1.0 - gamma + alpha) * delta as f64;
    let kept = (0..g.n())
        .filter(|&v| alive[v] && (g.neighbors(v).iter().filter(|&&w| alive[w as usize]).count() as f64) < bound)
        .count();
    kept as f64 / g.n() as f64
}

#[test]
fn criterion_5_nibble_quality_on_calibrated_fixture() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let (n, delta, cap) = (200_000, 64, 4);
    let (gamma, alpha, rounds) = (0.1, 0.02, 12);
    let params = NibbleParams::custom(gamma, alpha);
    let mut wins = 0;
    let mut runs = Vec::new();
    let mut first_size = None;
    let mut survivors = None;
    for seed in 0..10u64 {
        let mut rng = seeded_rng(seed);
        let outcome = random_regular_capped(n, delta, cap, 64, &mut rng)
            .map_err(|e| format!("generator: {e}"))
            .and_then(|capped| {
                if survivors.is_none() {
                    survivors = Some(survivor_fraction(
                        &capped.graph,
                        delta,
                        gamma,
                        alpha,
                        &mut seeded_rng(seed),
                    ));
                }
                let schedule =
                    Schedule::custom(delta, capped.max_codegree, gamma, alpha, rounds).map_err(|e| e.to_string())?;
                let greedy = greedy_mis(&capped.graph, GreedyOrder::ByIndex).len();
                let run = run_schedule(&capped.graph, &schedule, &params, &RunOptions::default(), &mut rng);
                run.map(|r| (r.independent_set.len(), greedy, capped.max_codegree))
                    .map_err(|e| format!("Δ₂ = {}: {e}", capped.max_codegree))
            });
        match outcome {
            Ok((size, greedy, _)) => {
                wins += (size > greedy) as usize;
                if seed == 0 {
                    first_size = Some(size);
                }
                runs.push(format!("seed {seed}: {size} vs greedy {greedy}"));
            }
            Err(e) => runs.push(format!("seed {seed}: {e}")),
        }
        // 9 of 10 wins is out of reach once two seeds have lost.
        if seed + 1 - wins as u64 > 1 {
            break;
        }
    }
    if wins < 9 {
        problems.push(format!(
            "nibble beat greedy on {wins} of the {} seeds run, needs 9 of 10",
            runs.len()
        ));
    }
    match (FIXTURE, first_size) {
        (Some(fixture), Some(size)) if (size as f64 - fixture as f64).abs() <= 0.02 * fixture as f64 => {}
        (Some(fixture), size) => problems.push(format!("seed 0 size {size:?} is not within 2% of {fixture}")),
        (None, _) => problems.push("no fixture size is recorded".into()),
    }
    if let Some(fraction) = survivors {
        runs.push(format!(
            "|C|/n without the size requirement is {fraction:.3} against {:.3} required",
            1.0 - gamma - alpha
        ));
    }
    verdict(
        5,
        "end-to-end nibble quality",
        started,
        Duration::from_secs(300),
        problems,
        runs.join(", "),
    );
}

fn verify_packing(dir: &Path, side: f64, radius: f64) -> Result<usize, String> {
    let r = result(dir);
    let cloud = read_cloud(&dir.join("cloud.json")).map_err(|e| e.to_string())?;
    let centers: Vec<&[f64]> = r.independent_set.iter().map(|&i| cloud.point(i as usize)).collect();
    for (i, a) in centers.iter().enumerate() {
        for b in &centers[i + 1..] {
            let d2: f64 = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| {
                    let gap = (x - y).abs();
                    gap.min(side - gap).powi(2)
                })
                .sum();
            if d2 <= 4.0 * radius * radius {
                return Err(format!("centres at distance {} ≤ 2r", d2.sqrt()));
            }
        }
    }
    if !r.verified || r.size != centers.len() {
        return Err("result is not marked verified".into());
    }
    Ok(r.size)
}

fn verify_code(dir: &Path, theta: f64) -> Result<usize, String> {
    let r = result(dir);
    let cloud = read_cloud(&dir.join("cloud.json")).map_err(|e| e.to_string())?;
    let points: Vec<&[f64]> = r.independent_set.iter().map(|&i| cloud.point(i as usize)).collect();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
            if dot >= theta.cos() {
                return Err(format!("points at angle {} ≤ θ", dot.clamp(-1.0, 1.0).acos()));
            }
        }
    }
    if !r.verified || r.size != points.len() {
        return Err("result is not marked verified".into());
    }
    Ok(r.size)
}

#[test]
fn criterion_6_packing_and_code_sanity() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let mut sizes = BTreeMap::new();
    let packs = [(2, 20.0, "8", "0.5"), (2, 12.0, "12", "0.5"), (3, 8.0, "4", "0.5")];
    for (dim, side, intensity, radius) in packs {
        for seed in 0..10 {
            let dir = TempDir::new().unwrap();
            let (dim_s, domain, seed_s) = (dim.to_string(), format!("box:{side}"), seed.to_string());
            let args = [
                "pack",
                "--dim",
                &dim_s,
                "--domain",
                &domain,
                "--intensity",
                intensity,
                "--radius",
                radius,
                "--seed",
                &seed_s,
            ];
            let outcome = nibblepack(&args, dir.path()).map_err(|e| e.to_string());
            match outcome.and_then(|()| verify_packing(dir.path(), side, radius.parse().unwrap())) {
                Ok(size) => sizes
                    .entry(format!("pack d={dim} {domain} λ={intensity}"))
                    .or_insert_with(Vec::new)
                    .push(size),
                Err(e) => problems.push(format!("pack d={dim} {domain} λ={intensity} seed {seed}: {e}")),
            }
        }
    }
    let theta = PI / 3.0;
    for seed in 0..20 {
        let dir = TempDir::new().unwrap();
        let (theta_s, seed_s) = (theta.to_string(), seed.to_string());
        let args = [
            "code",
            "--dim",
            "3",
            "--theta",
            &theta_s,
            "--intensity",
            "48",
            "--rounds",
            "3",
            "--max-retries",
            "256",
            "--seed",
            &seed_s,
        ];
        let outcome = nibblepack(&args, dir.path()).map_err(|e| e.to_string());
        match outcome.and_then(|()| verify_code(dir.path(), theta)) {
            Ok(size) if size <= 12 => sizes.entry("code d=3".to_string()).or_insert_with(Vec::new).push(size),
            Ok(size) => problems.push(format!("code seed {seed}: {size} points exceed the kissing number 12")),
            Err(e) => problems.push(format!("code seed {seed}: {e}")),
        }
    }
    let mut refusals = 0;
    for command in ["pack", "code"] {
        for dim in [3, 8, 16, 24] {
            let dir = TempDir::new().unwrap();
            let dim_s = dim.to_string();
            match nibblepack(&[command, "--mode", "paper", "--dim", &dim_s], dir.path()) {
                Err(e @ CliError::Nibble(NibbleError::ScheduleInfeasible { .. })) if e.exit_code() == 2 => {
                    refusals += 1
                }
                other => problems.push(format!("paper-mode {command} at d={dim}: {other:?}")),
            }
        }
    }
    verdict(
        6,
        "packing and code sanity",
        started,
        Duration::from_secs(120),
        problems,
        format!("sizes {sizes:?}, {refusals} paper-mode refusals"),
    );
}

/// Every file under `dir`, by relative path.
fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        out.insert(
            path.strip_prefix(dir).unwrap().to_path_buf(),
            std::fs::read(&path).unwrap(),
        );
    }
    out
}

#[test]
fn criterion_7_determinism() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let inputs = TempDir::new().unwrap();
    nibblepack(
        &[
            "gen",
            "sharpness",
            "--vertices",
            "1800",
            "--degree",
            "24",
            "--seed",
            "7",
        ],
        inputs.path(),
    )
    .unwrap();
    let graph = inputs.path().join("graph.json");
    let graph = graph.to_str().unwrap();
    let third = (PI / 3.0).to_string();
    let obtuse = (2.0 * PI / 3.0).to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "gen",
            "sharpness",
            "--vertices",
            "1500",
            "--degree",
            "30",
            "--eta",
            "0.2",
        ],
        vec!["gen", "regular", "--vertices", "1000", "--degree", "9", "--binary"],
        vec![
            "gen",
            "capped",
            "--vertices",
            "2000",
            "--degree",
            "6",
            "--codegree-cap",
            "2",
        ],
        vec!["gen", "gnp", "--vertices", "800", "--edge-prob", "0.02"],
        vec!["gen", "polar", "--q", "7"],
        vec!["gen", "cliques", "--vertices", "60", "--degree", "5"],
        vec!["gen", "cloud", "--dim", "3", "--domain", "ball:2", "--intensity", "20"],
        vec![
            "pack",
            "--domain",
            "box:12",
            "--intensity",
            "12",
            "--radius",
            "0.5",
            "--emit-graph",
        ],
        vec![
            "code",
            "--dim",
            "3",
            "--theta",
            &obtuse,
            "--intensity",
            "6",
            "--rounds",
            "2",
            "--blow-up",
        ],
        vec![
            "code",
            "--dim",
            "3",
            "--theta",
            &third,
            "--intensity",
            "48",
            "--rounds",
            "3",
            "--max-retries",
            "256",
        ],
        vec!["nibble", graph, "--emit-graph"],
        vec!["nibble", graph, "--gamma", "0.2", "--alpha", "0.08", "--rounds", "4"],
        vec!["analyze", "geometry"],
        vec!["analyze", "concentration", "--trials", "3", "--pair-samples", "500"],
        vec!["analyze", "poisson-tail", "--samples", "2000"],
        vec!["analyze", "mecke", "--samples", "300"],
        vec!["analyze", "abstract", "--samples", "2000"],
    ];
    let mut compared = 0;
    for (k, args) in commands.iter().enumerate() {
        let runs: Vec<_> = ["1", "2"]
            .iter()
            .map(|threads| {
                let dir = TempDir::new().unwrap();
                let full = [&args[..], &["--seed", "11", "--threads", threads]].concat();
                let status = nibblepack(&full, dir.path()).map_err(|e| e.to_string());
                (status, snapshot(dir.path()))
            })
            .collect();
        match (&runs[0], &runs[1]) {
            ((Ok(()), a), (Ok(()), b)) if a == b && !a.is_empty() => compared += a.len(),
            ((Ok(()), a), (Ok(()), b)) => {
                let differing: Vec<_> = a.keys().filter(|f| a.get(*f) != b.get(*f)).collect();
                problems.push(format!("command {k} {args:?}: outputs differ in {differing:?}"));
            }
            ((first, _), (second, _)) => problems.push(format!("command {k} {args:?}: {first:?} / {second:?}")),
        }
    }
    verdict(
        7,
        "byte-for-byte determinism",
        started,
        Duration::from_secs(600),
        problems,
        format!(
            "{} commands, {compared} files identical across reruns and thread counts",
            commands.len()
        ),
    );
}

// Calibrated examples that sit outside the numbered criteria. They share this
// binary so that they run even when a criterion fails.

fn example(name: &str, problems: Vec<String>, detail: String) {
    let line = if problems.is_empty() {
        format!("PASS example {name} ({detail})")
    } else {
        format!("FAIL example {name}: {} ({detail})", problems.join("; "))
    };
    writeln!(std::io::stderr(), "{line}").unwrap();
    assert!(problems.is_empty(), "{line}");
}

#[test]
fn example_nibble_step_on_capped_64_regular_graph() {
    let (n, delta) = (100_000, 64);
    let g = random_regular_capped(n, delta, 4, 64, &mut seeded_rng(64)).unwrap();
    let mut params = NibbleParams::custom(0.1, 0.02);
    params.max_retries = 8;
    let cfg = StepConfig::new(delta, &params);
    let (mut accepted, mut refused) = (0, 0);
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        match nibble_step(&g.graph, &cfg, &mut seeded_rng(seed)) {
            Ok(_) => accepted += 1,
            Err(e) => {
                refused += 1;
                if failures.is_empty() {
                    failures.push(e.to_string());
                }
            }
        }
        // 45 of 50 is out of reach after six refusals.
        if refused > 5 {
            break;
        }
    }
    let mut problems = Vec::new();
    if accepted < 45 {
        problems.push(format!(
            "{accepted} of {} seeds accepted within 8 retries, needs 45 of 50",
            accepted + refused
        ));
    }
    example(
        "nibble_step on a capped 64-regular graph with n = 10^5",
        problems,
        format!("Δ₂ = {}, first refusal: {}", g.max_codegree, failures.join("")),
    );
}

#[test]
fn example_pack_against_greedy_on_the_same_cloud() {
    let mut wins = 0;
    let mut runs = Vec::new();
    for seed in 0..10 {
        let dir = TempDir::new().unwrap();
        let seed_s = seed.to_string();
        let args = [
            "pack",
            "--domain",
            "box:20",
            "--intensity",
            "8",
            "--radius",
            "0.5",
            "--seed",
            &seed_s,
        ];
        match nibblepack(&args, dir.path()) {
            Ok(()) => {
                let r = result(dir.path());
                let (size, baseline) = (r.size, r.report["baseline_size"].as_u64().unwrap() as usize);
                wins += (size >= baseline) as usize;
                runs.push(format!("{size} vs {baseline}"));
            }
            Err(e) => runs.push(e.to_string()),
        }
        // 8 of 10 is out of reach after three losses.
        if runs.len() - wins > 2 {
            break;
        }
    }
    let mut problems = Vec::new();
    if wins < 8 {
        problems.push(format!(
            "pack matched greedy on {wins} of {} seeds, needs 8 of 10",
            runs.len()
        ));
    }
    example(
        "pack density against random sequential greedy",
        problems,
        runs.join(", "),
    );
}
