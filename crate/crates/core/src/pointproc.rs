//! Poisson point processes and the bad-point pruning step.
//!
//! A cloud is sampled on a periodic box, a ball, or the unit sphere; pruning
//! then removes every point whose threshold-graph degree or codegree is too
//! large. Both conditions are evaluated once, against the original cloud.
//! Removing points never creates a new violation, so one pass suffices.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use thiserror::Error;

use crate::geometry;
use crate::graph::{build_geometric_graph, CodegreeScanner, Graph, GraphError, Threshold};
use crate::math;
use crate::stats::Estimate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointProcError {
    #[error("invalid domain: {0}")]
    InvalidDomain(&'static str),
    #[error("invalid point cloud: {0}")]
    InvalidCloud(&'static str),
    #[error("intensity must be finite and nonnegative, got {0}")]
    InvalidIntensity(f64),
    #[error("expected point count {expected:.3e} exceeds the budget of {budget} points")]
    Capacity { expected: f64, budget: usize },
    #[error("prune spec does not fit the domain: {0}")]
    SpecMismatch(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    /// `[0, L)^d` with wraparound distances.
    PeriodicBox { side: f64 },
    /// Closed ball of the given radius centred at the origin.
    Ball { radius: f64 },
    /// `S^{d−1}`, with normalized surface measure.
    UnitSphere,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub kind: DomainKind,
    pub dim: usize,
}

impl Domain {
    pub fn periodic_box(dim: usize, side: f64) -> Result<Self, PointProcError> {
        if dim == 0 {
            return Err(PointProcError::InvalidDomain("dimension must be positive"));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(PointProcError::InvalidDomain("box side must be positive"));
        }
        Ok(Domain {
            kind: DomainKind::PeriodicBox { side },
            dim,
        })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self, PointProcError> {
        if dim == 0 {
            return Err(PointProcError::InvalidDomain("dimension must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(PointProcError::InvalidDomain("ball radius must be positive"));
        }
        Ok(Domain {
            kind: DomainKind::Ball { radius },
            dim,
        })
    }

    pub fn unit_sphere(dim: usize) -> Result<Self, PointProcError> {
        if dim < 2 {
            return Err(PointProcError::InvalidDomain("the sphere needs dimension at least 2"));
        }
        Ok(Domain {
            kind: DomainKind::UnitSphere,
            dim,
        })
    }

    /// Lebesgue volume for the box and ball, 1 for the sphere.
    pub fn measure(&self) -> f64 {
        match self.kind {
            DomainKind::PeriodicBox { side } => math::powi(side, self.dim as i32),
            DomainKind::Ball { radius } => geometry::ball_volume(self.dim, radius),
            DomainKind::UnitSphere => 1.0,
        }
    }

    pub fn is_sphere(&self) -> bool {
        self.kind == DomainKind::UnitSphere
    }

    /// Squared distance, minimum-image on the periodic box.
    #[inline]
    pub fn dist2(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            DomainKind::PeriodicBox { side } => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let mut t = (x - y).abs();
                    if t > 0.5 * side {
                        t = side - t;
                    }
                    t * t
                })
                .sum(),
            _ => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim || p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        let norm2: f64 = p.iter().map(|x| x * x).sum();
        match self.kind {
            DomainKind::PeriodicBox { side } => p.iter().all(|&x| (0.0..side).contains(&x)),
            DomainKind::Ball { radius } => norm2 <= radius * radius,
            DomainKind::UnitSphere => (math::sqrt(norm2) - 1.0).abs() <= 1e-12,
        }
    }

    /// Writes one uniform point of the domain into `out`.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        match self.kind {
            DomainKind::PeriodicBox { side } => {
                for x in out.iter_mut() {
                    *x = rng.random::<f64>() * side;
                }
            }
            DomainKind::Ball { radius } => {
                gaussian_direction(rng, out);
                let r = radius * math::powf(rng.random::<f64>(), 1.0 / self.dim as f64);
                for x in out.iter_mut() {
                    *x *= r;
                }
            }
            DomainKind::UnitSphere => gaussian_direction(rng, out),
        }
    }
}

/// Uniform unit vector via a normalized Gaussian.
pub(crate) fn gaussian_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let norm = math::sqrt(out.iter().map(|x| x * x).sum());
        if norm > 1e-300 {
            for x in out.iter_mut() {
                *x /= norm;
            }
            return;
        }
    }
}

/// Finite point set in a domain, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    domain: Domain,
    coords: Vec<f64>,
    /// Seed of the draw that produced the cloud; metadata only.
    pub seed: u64,
}

impl PointCloud {
    /// Validates that every point lies in the domain.
    pub fn new(domain: Domain, coords: Vec<f64>, seed: u64) -> Result<Self, PointProcError> {
        if !coords.len().is_multiple_of(domain.dim) {
            return Err(PointProcError::InvalidCloud(
                "coordinate count is not a multiple of the dimension",
            ));
        }
        if !coords.chunks_exact(domain.dim).all(|p| domain.contains(p)) {
            return Err(PointProcError::InvalidCloud("point outside the domain"));
        }
        Ok(PointCloud { domain, coords, seed })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.domain.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.domain.dim;
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> core::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.domain.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The points at `indices`, in that order.
    pub fn subset(&self, indices: &[u32]) -> PointCloud {
        let mut coords = Vec::with_capacity(indices.len() * self.dim());
        for &i in indices {
            coords.extend_from_slice(self.point(i as usize));
        }
        PointCloud {
            domain: self.domain,
            coords,
            seed: self.seed,
        }
    }

    fn push(&mut self, p: &[f64]) {
        self.coords.extend_from_slice(p);
    }
}

/// Samples a Poisson process of intensity `intensity` on `domain`.
///
/// The expected count `intensity · measure` is checked against `max_points`
/// before anything is allocated.
pub fn sample_poisson<R: Rng + ?Sized>(
    domain: &Domain,
    intensity: f64,
    max_points: usize,
    rng: &mut R,
) -> Result<PointCloud, PointProcError> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(PointProcError::InvalidIntensity(intensity));
    }
    let mean = intensity * domain.measure();
    if mean > max_points as f64 {
        return Err(PointProcError::Capacity {
            expected: mean,
            budget: max_points,
        });
    }
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
    } else {
        0
    };
    let mut coords = vec![0.0; count * domain.dim];
    for p in coords.chunks_exact_mut(domain.dim) {
        domain.sample_uniform(rng, p);
    }
    Ok(PointCloud {
        domain: *domain,
        coords,
        seed: 0,
    })
}

/// Caps for the pruning step. A point is removed when its degree in the
/// threshold graph is at least `degree_cap`, or when it has a partner with at
/// least `codegree_cap` common neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneSpec {
    pub interaction: Threshold,
    pub degree_cap: usize,
    pub codegree_cap: usize,
}

/// Intensity and caps used by the asymptotic construction in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperPreset {
    pub intensity: f64,
    /// Target degree `Δ`.
    pub delta: f64,
    pub spec: PruneSpec,
}

/// `|X ∩ B_x| ≥ Δ(1 + Δ^{−1/3})` counts `x` itself, so the graph-degree cap is
/// one less.
fn degree_cap_from(delta: f64) -> usize {
    let count = math::ceil(delta * (1.0 + math::powf(delta, -1.0 / 3.0)));
    saturating_count(count).saturating_sub(1)
}

fn saturating_count(x: f64) -> usize {
    if x >= usize::MAX as f64 {
        usize::MAX
    } else {
        x.max(0.0) as usize
    }
}

impl PruneSpec {
    /// Euclidean caps for packing balls of radius `radius` from a process of
    /// the given intensity: interaction `2·radius`, `Δ = λ Vol(B(2·radius))`,
    /// degree cap from `Δ(1 + Δ^{−1/3})` and codegree cap `Δ e^{−(log d)²/8}`.
    pub fn euclidean(d: usize, radius: f64, intensity: f64) -> PaperPreset {
        assert!(d >= 1, "dimension must be positive");
        let ln_d = math::ln(d as f64);
        let delta = intensity * geometry::ball_volume(d, 2.0 * radius);
        PaperPreset {
            intensity,
            delta,
            spec: PruneSpec {
                interaction: Threshold::Distance(2.0 * radius),
                degree_cap: degree_cap_from(delta),
                codegree_cap: saturating_count(math::ceil(delta * math::exp(-ln_d * ln_d / 8.0))),
            },
        }
    }

    /// Spherical caps for codes of angle `theta`: `Δ = s_d(θ) λ`, degree cap
    /// from `Δ(1 + Δ^{−1/3})` and codegree cap `2Δ e^{−c(θ)(log d)²}`.
    pub fn sphere(d: usize, theta: f64, intensity: f64) -> PaperPreset {
        assert!(d >= 2, "the sphere needs d ≥ 2");
        let ln_d = math::ln(d as f64);
        let delta = geometry::cap_area(d, theta) * intensity;
        let c = geometry::cap_intersection_rate(theta);
        PaperPreset {
            intensity,
            delta,
            spec: PruneSpec {
                interaction: Threshold::Angle(theta),
                degree_cap: degree_cap_from(delta),
                codegree_cap: saturating_count(math::ceil(2.0 * delta * math::exp(-c * ln_d * ln_d))),
            },
        }
    }

    /// Euclidean preset: intensity `(√d/(8 log d))^d` and radius `r_d`, so
    /// `Δ = 2^d λ`.
    pub fn paper_euclidean(d: usize) -> PaperPreset {
        assert!(d >= 2, "the preset needs log d > 0");
        let df = d as f64;
        let intensity = math::powf(math::sqrt(df) / (8.0 * math::ln(df)), df);
        Self::euclidean(d, geometry::unit_ball_radius(d), intensity)
    }

    /// Spherical preset: intensity `(√d/(2 log d))^d`.
    pub fn paper_sphere(d: usize, theta: f64) -> PaperPreset {
        assert!(d >= 2, "the preset needs log d > 0");
        let df = d as f64;
        let intensity = math::powf(math::sqrt(df) / (2.0 * math::ln(df)), df);
        Self::sphere(d, theta, intensity)
    }
}

#[derive(Debug, Clone)]
pub struct PruneOutcome {
    pub kept: PointCloud,
    /// Threshold graph of the kept points; labels are indices into the input cloud.
    pub graph: Graph,
    /// Indices into the input cloud of the kept points, increasing.
    pub kept_indices: Vec<u32>,
    /// Points removed for their degree.
    pub removed_degree: usize,
    /// Points removed only for a codegree violation.
    pub removed_codegree: usize,
}

/// Removes degree and codegree violators in one pass over the original cloud,
/// then asserts the kept graph satisfies `Δ ≤ degree_cap − 1` and
/// `Δ₂ ≤ codegree_cap − 1`.
pub fn prune(cloud: &PointCloud, spec: &PruneSpec) -> Result<PruneOutcome, PointProcError> {
    if matches!(spec.interaction, Threshold::Angle(_)) != cloud.domain().is_sphere() {
        return Err(PointProcError::SpecMismatch(
            "use an angle on the sphere and a distance elsewhere",
        ));
    }
    let g = build_geometric_graph(cloud, spec.interaction)?;
    let n = g.n();
    let degree_bad: Vec<bool> = (0..n).map(|v| g.degree(v) >= spec.degree_cap).collect();
    let mut codegree_bad = vec![false; n];
    if spec.codegree_cap == 0 {
        // Every pair has codegree ≥ 0.
        if n >= 2 {
            codegree_bad.iter_mut().for_each(|b| *b = true);
        }
    } else {
        CodegreeScanner::new(n).mark_heavy_pairs(&g, None, spec.codegree_cap, &mut codegree_bad);
    }
    let mut kept_indices = Vec::new();
    let (mut removed_degree, mut removed_codegree) = (0, 0);
    for v in 0..n {
        if degree_bad[v] {
            removed_degree += 1;
        } else if codegree_bad[v] {
            removed_codegree += 1;
        } else {
            kept_indices.push(v as u32);
        }
    }
    let graph = g.induced(&kept_indices);
    let kept = cloud.subset(&kept_indices);
    if !kept_indices.is_empty() {
        assert!(
            graph.max_degree() < spec.degree_cap,
            "pruned graph exceeds the degree cap"
        );
        assert!(
            crate::graph::max_codegree(&graph) < spec.codegree_cap.max(1) || graph.n() < 2,
            "pruned graph exceeds the codegree cap"
        );
    }
    Ok(PruneOutcome {
        kept,
        graph,
        kept_indices,
        removed_degree,
        removed_codegree,
    })
}

/// `exp(−min{t, t²} μ / 3)`, a bound on `P(Y ≥ (1 + t)μ)` for `Y ~ Po(μ)`.
pub fn poisson_tail_bound(mean: f64, t: f64) -> f64 {
    math::exp(-t.min(t * t) * mean / 3.0)
}

/// Both sides of the Mecke equation for a per-point predicate, estimated by
/// simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeckeReport {
    /// `E |{x ∈ X : f(x, X)}|`.
    pub lhs: Estimate,
    /// `λ · measure · P(f(x, X ∪ {x}))` for uniform `x`.
    pub rhs: Estimate,
}

impl MeckeReport {
    /// Whether the two sides differ by at most `k` combined standard errors.
    pub fn agrees(&self, k: f64) -> bool {
        let se = math::sqrt(self.lhs.stderr * self.lhs.stderr + self.rhs.stderr * self.rhs.stderr);
        (self.lhs.mean - self.rhs.mean).abs() <= k * se + 1e-12
    }
}

/// Estimates both sides of the Mecke equation. `predicate(i, cloud)` decides
/// the property for point `i` of `cloud`.
pub fn mecke_check<R, F>(
    domain: &Domain,
    intensity: f64,
    predicate: F,
    integrand_samples: usize,
    process_samples: usize,
    rng: &mut R,
) -> Result<MeckeReport, PointProcError>
where
    R: Rng + ?Sized,
    F: Fn(usize, &PointCloud) -> bool,
{
    let budget = usize::MAX;
    let mut lhs = crate::stats::Accumulator::new();
    for _ in 0..process_samples {
        let cloud = sample_poisson(domain, intensity, budget, rng)?;
        let count = (0..cloud.len()).filter(|&i| predicate(i, &cloud)).count();
        lhs.push(count as f64);
    }
    let mut hits = 0u64;
    let mut x = vec![0.0; domain.dim];
    for _ in 0..integrand_samples {
        domain.sample_uniform(rng, &mut x);
        let mut cloud = sample_poisson(domain, intensity, budget, rng)?;
        cloud.push(&x);
        if predicate(cloud.len() - 1, &cloud) {
            hits += 1;
        }
    }
    Ok(MeckeReport {
        lhs: lhs.estimate(),
        rhs: Estimate::from_hits(hits, integrand_samples as u64).scaled(intensity * domain.measure()),
    })
}
