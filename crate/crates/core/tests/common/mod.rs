//! Independent reference computations for the wavelet basis.
//!
//! Every basis function is a polynomial of degree < 6 on each cell, so a
//! five-point Gauss–Legendre rule applied between breakpoints integrates it
//! (and its first two antiderivatives) exactly up to rounding.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavinv::basis::{chebyshev_poly, BasisIndex, BasisSpec, WaveletFamily};

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// `∫_a^b f` split at `cuts`, five-point Gauss–Legendre per piece.
pub fn gl5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cuts: &[f64]) -> f64 {
    let mut edges = vec![a];
    edges.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
    edges.push(b);
    edges
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            GL5_NODES
                .iter()
                .zip(GL5_WEIGHTS)
                .map(|(&s, wt)| wt * f(mid + half * s))
                .sum::<f64>()
                * half
        })
        .sum()
}

/// `∫_{-1}^{1} g(θ)/sqrt(1−θ²) dθ` with a fixed 128-node Gauss–Chebyshev rule.
pub fn gauss_chebyshev<G: Fn(f64) -> f64>(g: G) -> f64 {
    let n = 128;
    let s: f64 = (1..=n)
        .map(|i| g(((2 * i - 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos()))
        .sum();
    s * std::f64::consts::PI / n as f64
}

pub fn wavelet(spec: &BasisSpec, idx: BasisIndex, x: f64) -> f64 {
    spec.eval_wavelet(idx, x).unwrap()
}

pub fn first_oracle(spec: &BasisSpec, idx: BasisIndex, x: f64) -> f64 {
    gl5(|s| wavelet(spec, idx, s), 0.0, x, &spec.breakpoints())
}

/// Iterated: outer rule over the inner antiderivative.
pub fn second_oracle(spec: &BasisSpec, idx: BasisIndex, x: f64) -> f64 {
    gl5(|s| first_oracle(spec, idx, s), 0.0, x, &spec.breakpoints())
}

#[derive(Debug, Default)]
pub struct OracleSummary {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl OracleSummary {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 50 {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const FAMILIES: [WaveletFamily; 2] = [WaveletFamily::Taylor, WaveletFamily::ChebyshevFirstKind];

/// `R` and `S` against quadrature for `k ≤ 3`, `M ≤ 5`, 50 random points.
pub fn integral_equivalence(summary: &mut OracleSummary, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for family in FAMILIES {
        for k in 1..=3 {
            for m_count in 1..=5 {
                let spec = BasisSpec::new(family, k, m_count).unwrap();
                let xs: Vec<f64> = (0..50).map(|_| rng.random_range(0.0..=1.0)).collect();
                for idx in spec.indices() {
                    for &x in &xs {
                        let r = spec.eval_first_integral(idx, x).unwrap();
                        let r_ref = first_oracle(&spec, idx, x);
                        summary.check((r - r_ref).abs() <= 1e-8, || {
                            format!("{family} k={k} M={m_count} {idx:?} R({x}) = {r} vs {r_ref}")
                        });
                        let s = spec.eval_second_integral(idx, x).unwrap();
                        let s_ref = second_oracle(&spec, idx, x);
                        summary.check((s - s_ref).abs() <= 1e-8, || {
                            format!("{family} k={k} M={m_count} {idx:?} S({x}) = {s} vs {s_ref}")
                        });
                    }
                }
            }
        }
    }
}

/// Unit `L²` norm of every Taylor wavelet.
pub fn taylor_normality(summary: &mut OracleSummary) {
    for k in 1..=4 {
        for m_count in 1..=6 {
            let spec = BasisSpec::new(WaveletFamily::Taylor, k, m_count).unwrap();
            for idx in spec.indices() {
                let (a, b) = spec.support(idx.n);
                // I² reaches degree 10, beyond one five-point panel
                let fine: Vec<f64> = (1..64).map(|i| i as f64 / 64.0).collect();
                let norm = gl5(|x| wavelet(&spec, idx, x).powi(2), a, b, &fine);
                let outside = gl5(|x| wavelet(&spec, idx, x).powi(2), 0.0, 1.0, &fine);
                summary.check(
                    (norm - 1.0).abs() <= 1e-8 && (outside - 1.0).abs() <= 1e-8,
                    || format!("taylor k={k} M={m_count} {idx:?} norm {norm}"),
                );
            }
        }
    }
}

/// `∫ I_nm I_n'm' ω = δ δ` for the Chebyshev family, with the cell-local
/// weight `1/sqrt(1 − θ²)`.
pub fn chebyshev_orthonormality(summary: &mut OracleSummary) {
    for k in 1..=3 {
        for m_count in 1..=6 {
            let spec = BasisSpec::new(WaveletFamily::ChebyshevFirstKind, k, m_count).unwrap();
            let scale = (1u64 << k) as f64;
            for a in spec.indices() {
                for b in spec.indices() {
                    let value = if a.n != b.n {
                        0.0
                    } else {
                        let to_x = |theta: f64| (theta + 2.0 * a.n as f64 - 1.0) / scale;
                        gauss_chebyshev(|theta| {
                            let x = to_x(theta).clamp(0.0, 1.0 - 1e-15);
                            wavelet(&spec, a, x) * wavelet(&spec, b, x)
                        }) / scale
                    };
                    let want = if a == b { 1.0 } else { 0.0 };
                    summary.check((value - want).abs() <= 1e-8, || {
                        format!("chebyshev k={k} M={m_count} <{a:?},{b:?}> = {value}")
                    });
                }
            }
        }
    }
}

/// `R`, `S` continuous at every breakpoint; the wavelet vanishes left of
/// its support.
pub fn continuity(summary: &mut OracleSummary) {
    let h = 1e-12;
    for family in FAMILIES {
        for k in 1..=4 {
            for m_count in 1..=6 {
                let spec = BasisSpec::new(family, k, m_count).unwrap();
                for idx in spec.indices() {
                    let (a, b) = spec.support(idx.n);
                    for p in [a, b] {
                        let lo = (p - h).max(0.0);
                        let hi = (p + h).min(1.0);
                        let r_jump = spec.eval_first_integral(idx, hi).unwrap()
                            - spec.eval_first_integral(idx, lo).unwrap();
                        let s_jump = spec.eval_second_integral(idx, hi).unwrap()
                            - spec.eval_second_integral(idx, lo).unwrap();
                        summary.check(r_jump.abs() <= 1e-10 && s_jump.abs() <= 1e-10, || {
                            format!("{family} k={k} M={m_count} {idx:?} jump at {p}: R {r_jump:e}, S {s_jump:e}")
                        });
                    }
                    if a > 0.0 {
                        let x = 0.5 * a;
                        let zero = wavelet(&spec, idx, x) == 0.0
                            && spec.eval_first_integral(idx, x).unwrap() == 0.0
                            && spec.eval_second_integral(idx, x).unwrap() == 0.0;
                        summary.check(zero, || format!("{family} {idx:?} nonzero left of support"));
                    }
                }
            }
        }
    }
}

/// `C_m(cos φ) = cos(m φ)` for `m ≤ 12`.
pub fn chebyshev_identity(summary: &mut OracleSummary) {
    for m in 0..=12 {
        for i in 0..=40 {
            let phi = i as f64 * std::f64::consts::PI / 40.0;
            let got = chebyshev_poly(m, phi.cos());
            let want = (m as f64 * phi).cos();
            summary.check((got - want).abs() <= 1e-10, || {
                format!("C_{m}(cos {phi}) = {got} vs {want}")
            });
        }
    }
}

/// Flat ordering round-trips through `(n, m)`.
pub fn flat_roundtrip(summary: &mut OracleSummary) {
    for family in FAMILIES {
        for k in 1..=5 {
            for m_count in 1..=8 {
                let spec = BasisSpec::new(family, k, m_count).unwrap();
                for flat in 0..spec.dim() {
                    let idx = spec.index_from_flat(flat).unwrap();
                    let back = spec.index(idx.n, idx.m).unwrap();
                    summary.check(back.flat == flat, || {
                        format!("flat {flat} -> {idx:?} -> {}", back.flat)
                    });
                }
            }
        }
    }
}

pub fn full_suite(seed: u64) -> OracleSummary {
    let mut s = OracleSummary::default();
    integral_equivalence(&mut s, seed);
    taylor_normality(&mut s);
    chebyshev_orthonormality(&mut s);
    continuity(&mut s);
    chebyshev_identity(&mut s);
    flat_roundtrip(&mut s);
    s
}

/// Ten seeded `C²` test functions, each with an upper bound on `|f''|`
/// over `[0, 1]`: a polynomial part `a x² + b x³` plus `c sin(ω x + φ)`.
pub struct TestFunction {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub omega: f64,
    pub phase: f64,
    pub l: f64,
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x * x + self.b * x.powi(3) + self.c * (self.omega * x + self.phase).sin()
    }

    pub fn second(&self, x: f64) -> f64 {
        2.0 * self.a + 6.0 * self.b * x
            - self.c * self.omega.powi(2) * (self.omega * x + self.phase).sin()
    }
}

pub fn c2_test_functions(seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..10)
        .map(|_| {
            let a: f64 = rng.random_range(-2.0..2.0);
            let b: f64 = rng.random_range(-1.0..1.0);
            let c: f64 = rng.random_range(-1.0..1.0);
            let omega: f64 = rng.random_range(0.5..6.0);
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            // |2a + 6bx| ≤ |2a| + 6|b| and the trig part ≤ |c| ω²
            let l = 2.0 * a.abs() + 6.0 * b.abs() + c.abs() * omega * omega;
            TestFunction {
                a,
                b,
                c,
                omega,
                phase,
                l,
            }
        })
        .collect()
}
