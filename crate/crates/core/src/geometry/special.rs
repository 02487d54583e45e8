//! Special functions: regularized incomplete beta and adaptive Gauss-Legendre quadrature.

use alloc::vec::Vec;

use crate::math;

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    math::ln_gamma(a) + math::ln_gamma(b) - math::ln_gamma(a + b)
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`, `x` in `[0, 1]`.
pub fn beta_reg(x: f64, a: f64, b: f64) -> f64 {
    math::exp(ln_beta_reg(x, a, b))
}

/// `ln I_x(a, b)`, accurate when the value itself would underflow.
///
/// Continued fraction (modified Lentz) on whichever side of the mean
/// `(a + 1) / (a + b + 2)` converges; the other side goes through
/// `I_x(a, b) = 1 - I_{1-x}(b, a)`.
pub fn ln_beta_reg(x: f64, a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x = {x} outside [0, 1]");
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 1.0 {
        return 0.0;
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front(x, a, b) + math::ln(beta_cf(x, a, b))
    } else {
        let other = math::exp(ln_front(1.0 - x, b, a)) * beta_cf(1.0 - x, b, a);
        math::ln_1p(-other)
    }
}

/// `ln(x^a (1-x)^b / (a B(a, b)))`.
fn ln_front(x: f64, a: f64, b: f64) -> f64 {
    a * math::ln(x) + b * math::ln_1p(-x) - ln_beta(a, b) - math::ln(a)
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return h;
        }
    }
    h
}

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut z = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z_prev = z;
                z = z_prev - p1 / dp;
                if (z - z_prev).abs() < 1e-15 {
                    break;
                }
            }
            nodes.push(z);
            weights.push(2.0 / ((1.0 - z * z) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    /// Fixed-order rule on `[a, b]`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Adaptive bisection: a panel is accepted when the rule on the panel and
    /// on its two halves agree to within the panel's share of `tol`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, tol: f64, panels: usize) -> f64 {
        const MAX_DEPTH: u32 = 48;
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut total = 0.0;
        let mut stack: Vec<(f64, f64, f64, u32)> = Vec::new();
        for k in (0..panels).rev() {
            let lo = a + width * k as f64;
            let hi = if k + 1 == panels { b } else { lo + width };
            stack.push((lo, hi, tol / panels as f64, 0));
        }
        while let Some((lo, hi, local_tol, depth)) = stack.pop() {
            let whole = self.apply(&f, lo, hi);
            let mid = 0.5 * (lo + hi);
            let left = self.apply(&f, lo, mid);
            let right = self.apply(&f, mid, hi);
            if (whole - (left + right)).abs() <= local_tol || depth >= MAX_DEPTH {
                total += left + right;
            } else {
                stack.push((mid, hi, 0.5 * local_tol, depth + 1));
                stack.push((lo, mid, 0.5 * local_tol, depth + 1));
            }
        }
        total
    }
}
