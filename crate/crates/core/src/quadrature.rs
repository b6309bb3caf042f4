//! Numerical integration used for wavelet coefficients and for the
//! integral-form cross checks.
//!
//! Two engines are provided:
//! - adaptive Gauss–Legendre on `[a, b]` for unweighted integrands,
//! - Gauss–Chebyshev (first kind) for integrands carrying the weight
//!   `1 / sqrt(1 - θ²)` on `[-1, 1]`, refined by doubling the node count.

use std::f64::consts::PI;
use std::sync::OnceLock;

use thiserror::Error;

/// Default absolute tolerance for every integral computed by the crate.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const PANEL_ORDER: usize = 15;
const MAX_DEPTH: u32 = 48;
const MAX_CHEBYSHEV_NODES: usize = 1 << 17;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge: estimate {estimate:e}, achieved tolerance {achieved:e} (requested {requested:e})"
    )]
    NotConverged {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre three-term recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<f64, QuadratureError> {
    let (nodes, weights) = panel_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let at = mid + half * x;
        let v = f(at);
        if !v.is_finite() {
            return Err(QuadratureError::NonFinite { at });
        }
        sum += w * v;
    }
    Ok(sum * half)
}

/// Adaptive Gauss–Legendre integral of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    let whole = panel(&f, a, b)?;
    let mut worst = 0.0_f64;
    let value = refine(&f, a, b, whole, tol, 0, &mut worst)?;
    if worst > tol {
        return Err(QuadratureError::NotConverged {
            estimate: value,
            achieved: worst,
            requested: tol,
        });
    }
    Ok(value)
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> Result<f64, QuadratureError> {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid)?;
    let right = panel(f, mid, b)?;
    let err = (left + right - whole).abs();
    if err <= tol || depth >= MAX_DEPTH || mid <= a || mid >= b {
        if err > tol {
            *worst = worst.max(err);
        }
        return Ok(left + right);
    }
    let l = refine(f, a, mid, left, 0.5 * tol, depth + 1, worst)?;
    let r = refine(f, mid, b, right, 0.5 * tol, depth + 1, worst)?;
    Ok(l + r)
}

/// Integrates over `[a, b]` splitting at every breakpoint that falls inside,
/// so that piecewise-smooth integrands are handled panel by panel.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<f64, QuadratureError> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    let mut total = 0.0;
    let mut lo = a;
    let pieces = cuts.len() + 1;
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        total += integrate(&f, lo, hi, tol / pieces as f64)?;
        lo = hi;
    }
    Ok(total)
}

/// `∫_{-1}^{1} g(θ) / sqrt(1 - θ²) dθ` by Gauss–Chebyshev quadrature,
/// doubling the node count until two successive estimates agree within `tol`.
pub fn integrate_chebyshev_weighted<G: Fn(f64) -> f64>(
    g: G,
    tol: f64,
) -> Result<f64, QuadratureError> {
    let rule = |n: usize| -> Result<f64, QuadratureError> {
        let mut sum = 0.0;
        for i in 1..=n {
            let theta = ((2 * i - 1) as f64 * PI / (2 * n) as f64).cos();
            let v = g(theta);
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite { at: theta });
            }
            sum += v;
        }
        Ok(sum * PI / n as f64)
    };
    let mut n = 16;
    let mut prev = rule(n)?;
    loop {
        n *= 2;
        let next = rule(n)?;
        let diff = (next - prev).abs();
        if diff <= tol {
            return Ok(next);
        }
        if n >= MAX_CHEBYSHEV_NODES {
            return Err(QuadratureError::NotConverged {
                estimate: next,
                achieved: diff,
                requested: tol,
            });
        }
        prev = next;
    }
}
