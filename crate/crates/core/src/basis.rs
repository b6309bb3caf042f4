//! Taylor and Chebyshev wavelet families on `[0, 1]`.
//!
//! A basis is fixed by a family, a dilation level `k ≥ 1` and a polynomial
//! count `M ≥ 1`. It has `N = 2^(k-1)·M` members `I_nm`, with
//! `n ∈ [1, 2^(k-1)]` selecting the dyadic cell `[(n-1)/2^(k-1), n/2^(k-1))`
//! and `m ∈ [0, M-1]` the polynomial degree on that cell. Vectors are laid
//! out n-major, m-minor: `flat = (n-1)·M + m`.
//!
//! Besides the wavelets themselves, the closed-form first integrals
//! `R_nm(x) = ∫₀ˣ I_nm` and second integrals `S_nm(x) = ∫₀ˣ∫₀^ξ I_nm` are
//! provided; these are what the collocation scheme is built from.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::quadrature::{self, QuadratureError, DEFAULT_TOLERANCE};

/// Arguments of `C_m` this close outside `[-1, 1]` are clamped.
const CLAMP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveletFamily {
    Taylor,
    ChebyshevFirstKind,
}

impl WaveletFamily {
    pub fn label(self) -> &'static str {
        match self {
            WaveletFamily::Taylor => "taylor",
            WaveletFamily::ChebyshevFirstKind => "chebyshev",
        }
    }
}

impl std::fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("invalid basis resolution k={k}, M={m}: both must be at least 1")]
    InvalidResolution { k: u32, m: usize },
    #[error("basis index (n={n}, m={m}) out of range for 2^(k-1)={cells}, M={degrees}")]
    IndexOutOfRange {
        n: usize,
        m: usize,
        cells: usize,
        degrees: usize,
    },
    #[error("flat basis index {flat} out of range for N={dim}")]
    FlatOutOfRange { flat: usize, dim: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Wavelet family plus resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    family: WaveletFamily,
    k: u32,
    degrees: usize,
}

/// Position of one basis member, both as `(n, m)` and as its flat offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub n: usize,
    pub m: usize,
    pub flat: usize,
}

/// `I(x)`, `R(x)` and `S(x)` at a single point, in flat order.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisVectors {
    pub values: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

/// Chebyshev polynomial of the first kind `C_m(t)` by the three-term
/// recurrence. Arguments within `1e-12` of `±1` are clamped onto it.
pub fn chebyshev_poly(m: usize, t: f64) -> f64 {
    let t = clamp_unit(t);
    match m {
        0 => 1.0,
        1 => t,
        _ => {
            let (mut prev, mut cur) = (1.0, t);
            for _ in 1..m {
                let next = 2.0 * t * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

fn clamp_unit(t: f64) -> f64 {
    if t > 1.0 && t <= 1.0 + CLAMP_SLACK {
        1.0
    } else if (-1.0 - CLAMP_SLACK..-1.0).contains(&t) {
        -1.0
    } else {
        t
    }
}

/// Normalisation `γ_m` of the Chebyshev wavelets.
pub fn chebyshev_gamma(m: usize) -> f64 {
    if m == 0 {
        SQRT_2 / PI.sqrt()
    } else {
        2.0 / PI.sqrt()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn sign_pow(p: i64) -> f64 {
    if p.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Where `x` falls relative to one cell's support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Before,
    Inside,
    After,
}

impl BasisSpec {
    pub fn new(family: WaveletFamily, k: u32, degrees: usize) -> Result<Self, BasisError> {
        if k == 0 || degrees == 0 || k > 30 {
            return Err(BasisError::InvalidResolution { k, m: degrees });
        }
        Ok(Self { family, k, degrees })
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    /// Dilation level `k`.
    pub fn level(&self) -> u32 {
        self.k
    }

    /// Polynomial count `M`.
    pub fn degrees(&self) -> usize {
        self.degrees
    }

    /// Number of dyadic cells, `2^(k-1)`.
    pub fn cells(&self) -> usize {
        1 << (self.k - 1)
    }

    /// Basis dimension `N = 2^(k-1)·M`.
    pub fn dim(&self) -> usize {
        self.cells() * self.degrees
    }

    pub fn index(&self, n: usize, m: usize) -> Result<BasisIndex, BasisError> {
        if n == 0 || n > self.cells() || m >= self.degrees {
            return Err(BasisError::IndexOutOfRange {
                n,
                m,
                cells: self.cells(),
                degrees: self.degrees,
            });
        }
        Ok(BasisIndex {
            n,
            m,
            flat: (n - 1) * self.degrees + m,
        })
    }

    pub fn index_from_flat(&self, flat: usize) -> Result<BasisIndex, BasisError> {
        if flat >= self.dim() {
            return Err(BasisError::FlatOutOfRange {
                flat,
                dim: self.dim(),
            });
        }
        Ok(BasisIndex {
            n: flat / self.degrees + 1,
            m: flat % self.degrees,
            flat,
        })
    }

    pub fn indices(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (0..self.dim()).map(|flat| BasisIndex {
            n: flat / self.degrees + 1,
            m: flat % self.degrees,
            flat,
        })
    }

    fn check(&self, idx: BasisIndex) -> Result<(), BasisError> {
        let valid = self.index(idx.n, idx.m)?;
        if valid.flat != idx.flat {
            return Err(BasisError::FlatOutOfRange {
                flat: idx.flat,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Cell width `2^-(k-1)`.
    fn width(&self) -> f64 {
        1.0 / self.cells() as f64
    }

    /// `[(n-1)/2^(k-1), n/2^(k-1))` for cell `n`.
    pub fn support(&self, n: usize) -> (f64, f64) {
        let h = self.width();
        ((n - 1) as f64 * h, n as f64 * h)
    }

    /// Cell boundaries `0, 1/2^(k-1), …, 1`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let h = self.width();
        (0..=self.cells()).map(|j| j as f64 * h).collect()
    }

    fn region(&self, n: usize, x: f64) -> Region {
        let (a, b) = self.support(n);
        if x < a {
            Region::Before
        } else if x < b || (n == self.cells() && x <= b) {
            // x = 1 belongs to the last cell
            Region::Inside
        } else {
            Region::After
        }
    }

    /// `θ = 2^k x − 2n + 1`, mapping cell `n` onto `[-1, 1]`.
    fn theta(&self, n: usize, x: f64) -> f64 {
        (1u64 << self.k) as f64 * x - 2.0 * n as f64 + 1.0
    }

    /// `I_nm(x)`.
    pub fn eval_wavelet(&self, idx: BasisIndex, x: f64) -> Result<f64, BasisError> {
        self.check(idx)?;
        Ok(self.wavelet_unchecked(idx.n, idx.m, x))
    }

    /// `R_nm(x) = ∫₀ˣ I_nm(τ) dτ`.
    pub fn eval_first_integral(&self, idx: BasisIndex, x: f64) -> Result<f64, BasisError> {
        self.check(idx)?;
        Ok(self.first_unchecked(idx.n, idx.m, x))
    }

    /// `S_nm(x) = ∫₀ˣ ∫₀^ξ I_nm(τ) dτ dξ`.
    pub fn eval_second_integral(&self, idx: BasisIndex, x: f64) -> Result<f64, BasisError> {
        self.check(idx)?;
        Ok(self.second_unchecked(idx.n, idx.m, x))
    }

    fn wavelet_unchecked(&self, n: usize, m: usize, x: f64) -> f64 {
        if self.region(n, x) != Region::Inside {
            return 0.0;
        }
        let scale = 2f64.powf((self.k as f64 - 1.0) / 2.0);
        match self.family {
            WaveletFamily::Taylor => {
                let tau = self.cells() as f64 * x - n as f64 + 1.0;
                scale * ((2 * m + 1) as f64).sqrt() * tau.powi(m as i32)
            }
            WaveletFamily::ChebyshevFirstKind => {
                chebyshev_gamma(m) * scale * chebyshev_poly(m, self.theta(n, x))
            }
        }
    }

    fn first_unchecked(&self, n: usize, m: usize, x: f64) -> f64 {
        match self.region(n, x) {
            Region::Before => 0.0,
            region => match self.family {
                WaveletFamily::Taylor => self.taylor_integral(n, m, x, 1, region),
                WaveletFamily::ChebyshevFirstKind => self.chebyshev_first(n, m, x, region),
            },
        }
    }

    fn second_unchecked(&self, n: usize, m: usize, x: f64) -> f64 {
        match self.region(n, x) {
            Region::Before => 0.0,
            region => match self.family {
                WaveletFamily::Taylor => self.taylor_integral(n, m, x, 2, region),
                WaveletFamily::ChebyshevFirstKind => self.chebyshev_second(n, m, x, region),
            },
        }
    }

    /// Taylor integral forms of order `order ∈ {1, 2}`: the scaled monomial
    /// `2^((m+½)(k-1))·m!·√(2m+1)/(m+order)!·(x-a)^(m+order)`, minus the
    /// polynomial correction `P_order(x)` once `x` is past the cell.
    fn taylor_integral(&self, n: usize, m: usize, x: f64, order: usize, region: Region) -> f64 {
        let k1 = self.k as f64 - 1.0;
        let root = ((2 * m + 1) as f64).sqrt();
        let (a, b) = self.support(n);
        let lead = 2f64.powf((m as f64 + 0.5) * k1) * factorial(m) * root / factorial(m + order)
            * (x - a).powi((m + order) as i32);
        if region == Region::Inside {
            return lead;
        }
        let correction: f64 = (0..=m)
            .map(|j| {
                binomial(m, j) * 2f64.powf((j as f64 + 0.5) * k1) * factorial(j) * root
                    / factorial(j + order)
                    * (x - b).powi((j + order) as i32)
            })
            .sum();
        lead - correction
    }

    fn chebyshev_first(&self, n: usize, m: usize, x: f64, region: Region) -> f64 {
        let k1 = self.k as f64 - 1.0;
        let gamma = chebyshev_gamma(m);
        let theta = self.theta(n, x);
        let c = |j: usize| chebyshev_poly(j, theta);
        let inside = region == Region::Inside;
        match m {
            0 => {
                if inside {
                    gamma * 2f64.powf(-k1 / 2.0 - 1.0) * (c(1) + c(0))
                } else {
                    gamma * 2f64.powf(-k1 / 2.0) * c(0)
                }
            }
            1 => {
                if inside {
                    gamma * 2f64.powf(-k1 / 2.0 - 3.0) * (c(2) - c(0))
                } else {
                    0.0
                }
            }
            _ => {
                let mf = m as f64;
                let pre = gamma * 2f64.powf(-k1 / 2.0 - 2.0);
                if inside {
                    pre * (c(m + 1) / (mf + 1.0) - c(m - 1) / (mf - 1.0) + mu(m))
                } else {
                    pre * rho(m)
                }
            }
        }
    }

    fn chebyshev_second(&self, n: usize, m: usize, x: f64, region: Region) -> f64 {
        let k1 = self.k as f64 - 1.0;
        let gamma = chebyshev_gamma(m);
        let theta = self.theta(n, x);
        let c = |j: usize| chebyshev_poly(j, theta);
        let inside = region == Region::Inside;
        let (_, b) = self.support(n);
        let past = 1.0 / (1u64 << self.k) as f64 + x - b;
        match m {
            0 => {
                if inside {
                    gamma * 2f64.powf(-1.5 * k1 - 4.0) * (c(2) + 4.0 * c(1) + 3.0 * c(0))
                } else {
                    gamma * 2f64.powf(-k1 / 2.0) * past
                }
            }
            1 => {
                if inside {
                    gamma
                        * 2f64.powf(-1.5 * k1 - 4.0)
                        * (c(3) / 6.0 - 1.5 * c(1) - 4.0 * c(0) / 3.0)
                } else {
                    gamma * 2f64.powf(-1.5 * k1 - 1.0) / -3.0
                }
            }
            2 => {
                if inside {
                    gamma
                        * 2f64.powf(-1.5 * k1 - 3.0)
                        * ((c(4) - 1.0) / 24.0 - (c(2) - 1.0) / 3.0 - 2.0 / 3.0 * (c(1) + c(0)))
                } else {
                    gamma * 2f64.powf(-k1 / 2.0) / -3.0 * past
                }
            }
            _ => {
                let mf = m as f64;
                let pre = gamma * 2f64.powf(-1.5 * k1 - 3.0);
                // (C_j(θ) - (-1)^j) evaluated at the current θ, or at θ = 1 past the cell
                let shifted = |j: usize| {
                    let cj = if inside { c(j) } else { 1.0 };
                    cj - sign_pow(j as i64)
                };
                let body = shifted(m + 2) / (2.0 * (mf + 1.0) * (mf + 2.0))
                    - shifted(m) / (2.0 * (mf + 1.0) * mf)
                    - shifted(m) / (2.0 * (mf - 1.0) * mf)
                    + shifted(m - 2) / (2.0 * (mf - 1.0) * (mf - 2.0));
                if inside {
                    pre * (body + (1.0 + c(1)) * mu(m))
                } else {
                    let cells2 = (1u64 << self.k) as f64;
                    pre * (body + 2.0 * mu(m) + cells2 * (x - b) * rho(m))
                }
            }
        }
    }

    /// `I(x)`, `R(x)` and `S(x)` in flat order.
    pub fn basis_vectors(&self, x: f64) -> BasisVectors {
        let dim = self.dim();
        let mut out = BasisVectors {
            values: Vec::with_capacity(dim),
            first: Vec::with_capacity(dim),
            second: Vec::with_capacity(dim),
        };
        for idx in self.indices() {
            out.values.push(self.wavelet_unchecked(idx.n, idx.m, x));
            out.first.push(self.first_unchecked(idx.n, idx.m, x));
            out.second.push(self.second_unchecked(idx.n, idx.m, x));
        }
        out
    }

    /// Midpoint grid `x_l = (2l − 1)/(2N)`, `l = 1..N`.
    pub fn collocation_points(&self) -> Vec<f64> {
        let n = self.dim() as f64;
        (1..=self.dim())
            .map(|l| (2 * l - 1) as f64 / (2.0 * n))
            .collect()
    }

    /// Wavelet coefficients `d_nm = ⟨f, I_nm⟩`: the plain `L²` product for
    /// Taylor, the `ω`-weighted product for Chebyshev.
    pub fn expand<F: Fn(f64) -> f64>(&self, f: F) -> Result<Vec<f64>, BasisError> {
        let mut coeffs = Vec::with_capacity(self.dim());
        for idx in self.indices() {
            let (a, b) = self.support(idx.n);
            let d = match self.family {
                WaveletFamily::Taylor => quadrature::integrate(
                    |x| f(x) * self.wavelet_unchecked(idx.n, idx.m, x),
                    a,
                    b,
                    DEFAULT_TOLERANCE,
                )?,
                WaveletFamily::ChebyshevFirstKind => {
                    let scale = (1u64 << self.k) as f64;
                    let to_x = |theta: f64| (theta + 2.0 * idx.n as f64 - 1.0) / scale;
                    quadrature::integrate_chebyshev_weighted(
                        |theta| {
                            let x = to_x(theta);
                            f(x) * self.wavelet_unchecked(idx.n, idx.m, x)
                        },
                        DEFAULT_TOLERANCE,
                    )? / scale
                }
            };
            coeffs.push(d);
        }
        Ok(coeffs)
    }

    /// Least-squares (unweighted `L²`) projection coefficients, obtained by
    /// solving the per-cell Gram system. For the non-orthogonal Taylor
    /// family these, not [`BasisSpec::expand`], reproduce `f` via `D·I(x)`.
    pub fn project<F: Fn(f64) -> f64>(&self, f: F) -> Result<Vec<f64>, BasisError> {
        let mm = self.degrees;
        let mut coeffs = vec![0.0; self.dim()];
        for n in 1..=self.cells() {
            let (a, b) = self.support(n);
            let mut gram = DMatrix::zeros(mm, mm);
            let mut rhs = DVector::zeros(mm);
            for i in 0..mm {
                for j in i..mm {
                    let g = quadrature::integrate(
                        |x| self.wavelet_unchecked(n, i, x) * self.wavelet_unchecked(n, j, x),
                        a,
                        b,
                        DEFAULT_TOLERANCE,
                    )?;
                    gram[(i, j)] = g;
                    gram[(j, i)] = g;
                }
                rhs[i] = quadrature::integrate(
                    |x| f(x) * self.wavelet_unchecked(n, i, x),
                    a,
                    b,
                    DEFAULT_TOLERANCE,
                )?;
            }
            let sol = gram
                .lu()
                .solve(&rhs)
                .expect("Gram matrix of a polynomial basis is nonsingular");
            for i in 0..mm {
                coeffs[(n - 1) * mm + i] = sol[i];
            }
        }
        Ok(coeffs)
    }

    /// `D·I(x)`.
    pub fn reconstruct(&self, coeffs: &[f64], x: f64) -> f64 {
        self.indices()
            .zip(coeffs)
            .map(|(idx, d)| d * self.wavelet_unchecked(idx.n, idx.m, x))
            .sum()
    }
}

fn mu(m: usize) -> f64 {
    let mi = m as i64;
    let mf = m as f64;
    sign_pow(mi - 1) / (mf - 1.0) - sign_pow(mi + 1) / (mf + 1.0)
}

fn rho(m: usize) -> f64 {
    let mi = m as i64;
    let mf = m as f64;
    (1.0 - sign_pow(mi + 1)) / (mf + 1.0) - (1.0 - sign_pow(mi - 1)) / (mf - 1.0)
}
