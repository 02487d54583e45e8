//! High-dimensional geometry: ball volumes, lens volumes, spherical caps.
//!
//! Everything that involves `Γ` is evaluated in log space, so dimensions in
//! the hundreds do not overflow.

pub mod special;

use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::math::{self, E, LN_2, PI};
use crate::stats::Estimate;
use special::GaussLegendre;

/// Slack applied to the asymptotic `(1 + o(1))` cap formulas when they are
/// used as upper bounds at finite dimension.
pub const DEFAULT_ASYMPTOTIC_SLACK: f64 = 1.1;

/// `ln Vol(B_0(t))` in `R^d`.
pub fn ln_ball_volume(d: usize, t: f64) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    assert!(t >= 0.0, "radius must be non-negative");
    let half = d as f64 / 2.0;
    half * math::ln(PI) - math::ln_gamma(half + 1.0) + d as f64 * math::ln(t)
}

/// `Vol(B_0(t)) = π^{d/2} t^d / Γ(d/2 + 1)`.
pub fn ball_volume(d: usize, t: f64) -> f64 {
    math::exp(ln_ball_volume(d, t))
}

/// The Stirling sandwich `((πe t²/d)^{d/2}, (2πe t²/d)^{d/2})`, valid for `d ≥ 4`.
pub fn ball_volume_bounds(d: usize, t: f64) -> (f64, f64) {
    let df = d as f64;
    let lower = math::powf(PI * E * t * t / df, df / 2.0);
    let upper = math::powf(2.0 * PI * E * t * t / df, df / 2.0);
    (lower, upper)
}

/// Radius `r_d` of the unit-volume ball in `R^d`.
pub fn unit_ball_radius(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    let half = d as f64 / 2.0;
    math::exp((math::ln_gamma(half + 1.0) - half * math::ln(PI)) / d as f64)
}

/// Volume of `B_x(R) ∩ B_y(R)` with `‖x − y‖ = t`.
///
/// The lens is two equal caps of height `R − t/2`, so its volume is
/// `Vol(B_0(R)) · I_{1 − (t/2R)²}((d+1)/2, 1/2)`.
pub fn lens_volume(d: usize, radius: f64, t: f64) -> f64 {
    assert!(radius > 0.0, "radius must be positive");
    assert!(t >= 0.0, "distance must be non-negative");
    if t == 0.0 {
        return ball_volume(d, radius);
    }
    if t >= 2.0 * radius {
        return 0.0;
    }
    let ratio = t / (2.0 * radius);
    let x = 1.0 - ratio * ratio;
    let ln_frac = special::ln_beta_reg(x, (d as f64 + 1.0) / 2.0, 0.5);
    math::exp(ln_ball_volume(d, radius) + ln_frac)
}

/// `2^d e^{−t²/4}`: upper bound on the lens of two `2 r_d` balls at distance `t`.
///
/// Only meaningful for `d ≥ 4`, where `r_d ≤ √(d/8)`.
pub fn lens_upper_bound(d: usize, t: f64) -> f64 {
    assert!(t >= 0.0);
    math::exp(d as f64 * LN_2 - t * t / 4.0)
}

/// Normalizing constant `Γ(d/2) / (√π Γ((d−1)/2))` of the cap integral.
fn cap_prefactor(d: usize) -> f64 {
    let df = d as f64;
    math::exp(math::ln_gamma(df / 2.0) - math::ln_gamma((df - 1.0) / 2.0)) / math::sqrt(PI)
}

/// Normalized area `s_d(θ)` of a cap of angular radius `θ` on `S^{d−1}`.
///
/// Integrates `sin^{d−2}` with adaptive Gauss-Legendre to absolute error
/// `1e−12`. Angles past `π/2` go through `s_d(θ) = 1 − s_d(π − θ)`, so the
/// quadrature never straddles the peak of the integrand.
pub fn cap_area(d: usize, theta: f64) -> f64 {
    assert!(d >= 2, "caps need d >= 2");
    assert!(theta > 0.0 && theta <= PI, "theta = {theta} outside (0, π]");
    if theta > PI / 2.0 {
        return 1.0 - cap_area_half(d, PI - theta);
    }
    cap_area_half(d, theta)
}

fn cap_area_half(d: usize, theta: f64) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    let pre = cap_prefactor(d);
    let power = (d - 2) as f64;
    let integrand = |x: f64| {
        if power == 0.0 {
            1.0
        } else {
            let s = math::sin(x);
            if s <= 0.0 {
                0.0
            } else {
                math::exp(power * math::ln(s))
            }
        }
    };
    let gl = GaussLegendre::new(20);
    pre * gl.integrate(integrand, 0.0, theta, 1e-13 / pre, 8)
}

/// `sin^{d−1}θ / (cos θ √(2πd))`, the large-`d` form of [`cap_area`] for `θ < π/2`.
pub fn cap_area_asymptotic(d: usize, theta: f64) -> f64 {
    let df = d as f64;
    math::exp((df - 1.0) * math::ln(math::sin(theta))) / (math::cos(theta) * math::sqrt(2.0 * PI * df))
}

/// `c(θ) = cot²θ / 16`.
pub fn cap_intersection_rate(theta: f64) -> f64 {
    let cot = 1.0 / math::tan(theta);
    cot * cot / 16.0
}

/// `s_d(θ) · e^{−c(θ) τ² d}`: asymptotic bound on the area of two caps of
/// radius `θ` whose centres are at angle `τ`. Requires `0 < τ < 2θ < π`.
pub fn cap_intersection_bound(d: usize, theta: f64, tau: f64) -> f64 {
    assert!(
        tau >= 0.0 && tau < 2.0 * theta && 2.0 * theta < PI,
        "need 0 < tau < 2 theta < pi"
    );
    cap_area(d, theta) * math::exp(-cap_intersection_rate(theta) * tau * tau * d as f64)
}

/// Hit-count estimate of `s(C_θ(x) ∩ C_θ(y))` with `⟨x, y⟩ = cos τ`.
///
/// Points are normalized Gaussian vectors; `x = e_1` and
/// `y = cos τ e_1 + sin τ e_2`.
pub fn cap_intersection_area_mc<R: Rng + ?Sized>(
    d: usize,
    theta: f64,
    tau: f64,
    samples: u64,
    rng: &mut R,
) -> Estimate {
    assert!(d >= 2);
    assert!(samples >= 10_000, "use at least 1e4 samples");
    let cos_theta = math::cos(theta);
    let (cos_tau, sin_tau) = (math::cos(tau), math::sin(tau));
    let mut z: Vec<f64> = alloc::vec![0.0; d];
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut norm2 = 0.0;
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(rng);
            norm2 += *zi * *zi;
        }
        let norm = math::sqrt(norm2);
        let to_x = z[0] / norm;
        let to_y = (cos_tau * z[0] + sin_tau * z[1]) / norm;
        if to_x >= cos_theta && to_y >= cos_theta {
            hits += 1;
        }
    }
    Estimate::from_hits(hits, samples)
}

/// A closed spherical cap `{y : ⟨axis, y⟩ ≥ cos θ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapSpec {
    pub theta: f64,
    pub axis: Option<Vec<f64>>,
}

impl CapSpec {
    pub fn new(theta: f64) -> Self {
        assert!(theta > 0.0 && theta <= PI);
        CapSpec { theta, axis: None }
    }

    /// Cap around a unit `axis`; the norm must be 1 within `1e−12`.
    pub fn with_axis(theta: f64, axis: Vec<f64>) -> Self {
        assert!(theta > 0.0 && theta <= PI);
        let norm = math::sqrt(axis.iter().map(|a| a * a).sum());
        assert!((norm - 1.0).abs() <= 1e-12, "cap axis must be a unit vector");
        CapSpec {
            theta,
            axis: Some(axis),
        }
    }

    pub fn area(&self, d: usize) -> f64 {
        cap_area(d, self.theta)
    }

    /// Membership of a unit vector; `None` for an axis-free cap.
    pub fn contains(&self, point: &[f64]) -> Option<bool> {
        let axis = self.axis.as_ref()?;
        let dot: f64 = axis.iter().zip(point).map(|(a, b)| a * b).sum();
        Some(dot >= math::cos(self.theta))
    }
}
