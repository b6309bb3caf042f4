//! Error norms, report tables and the a-priori coefficient and tail bounds.

use thiserror::Error;

use crate::basis::{BasisError, BasisSpec, WaveletFamily};
use crate::problem::ExactReference;
use crate::solver::SolveOutput;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("length mismatch: {left} vs {right}")]
    Shape { left: usize, right: usize },
    #[error("empty input")]
    Empty,
    #[error("{0}")]
    Domain(String),
    #[error("no exact {0} available for this problem")]
    UnsupportedReport(&'static str),
    #[error("report time {t} is not on the time grid")]
    OffGrid { t: f64 },
    #[error("report point x={x} lies outside [0, 1]")]
    OutOfRange { x: f64 },
    #[error(transparent)]
    Basis(#[from] BasisError),
}

fn check_pair(exact: &[f64], numeric: &[f64]) -> Result<(), AnalysisError> {
    if exact.len() != numeric.len() {
        return Err(AnalysisError::Shape {
            left: exact.len(),
            right: numeric.len(),
        });
    }
    if exact.is_empty() {
        return Err(AnalysisError::Empty);
    }
    Ok(())
}

/// `max_l |exact_l − numeric_l|`.
pub fn linf_error(exact: &[f64], numeric: &[f64]) -> Result<f64, AnalysisError> {
    check_pair(exact, numeric)?;
    Ok(exact
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `(1/N) · sqrt(Σ (exact_l − numeric_l)²)`; the `1/N` sits outside the root.
pub fn l2_error(exact: &[f64], numeric: &[f64]) -> Result<f64, AnalysisError> {
    check_pair(exact, numeric)?;
    let sum: f64 = exact
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    Ok(sum.sqrt() / exact.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub t: f64,
    pub linf: f64,
    pub l2: f64,
    /// `(x, |y − Y|)` at each reporting point.
    pub pointwise: Vec<(f64, f64)>,
}

impl ErrorReport {
    pub fn from_values(
        t: f64,
        xs: &[f64],
        exact: &[f64],
        numeric: &[f64],
    ) -> Result<Self, AnalysisError> {
        check_pair(xs, exact)?;
        let linf = linf_error(exact, numeric)?;
        let l2 = l2_error(exact, numeric)?;
        let pointwise = xs
            .iter()
            .zip(exact.iter().zip(numeric))
            .map(|(&x, (a, b))| (x, (a - b).abs()))
            .collect();
        Ok(Self {
            t,
            linf,
            l2,
            pointwise,
        })
    }
}

/// Sup-norm bound on `|d_nm|` for `m ≥ 2` given `|f''| ≤ l`.
pub fn coefficient_bound(
    family: WaveletFamily,
    n: usize,
    m: usize,
    l: f64,
) -> Result<f64, AnalysisError> {
    if m < 2 {
        return Err(AnalysisError::Domain(format!(
            "coefficient bound needs m >= 2, got {m}"
        )));
    }
    if n < 1 {
        return Err(AnalysisError::Domain("cell index n starts at 1".into()));
    }
    if !(l >= 0.0) {
        return Err(AnalysisError::Domain(format!(
            "bound L must be nonnegative, got {l}"
        )));
    }
    let nf = n as f64;
    let mf = m as f64;
    Ok(match family {
        WaveletFamily::Taylor => {
            l * (2.0 * mf + 1.0).sqrt() / (nf.powf(2.5) * (mf + 1.0) * (mf + 2.0) * (mf + 3.0))
        }
        WaveletFamily::ChebyshevFirstKind => {
            crate::basis::chebyshev_gamma(m) * std::f64::consts::PI * l
                / (32.0 * nf.powf(2.5) * (mf - 1.0).powi(2))
        }
    })
}

/// Square root of a truncated double tail series together with an upper
/// bound on what the truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub value: f64,
    /// `sqrt(sum + remainder) − sqrt(sum)`.
    pub remainder: f64,
}

fn tail_m_term(family: WaveletFamily, m: usize) -> f64 {
    let mf = m as f64;
    match family {
        WaveletFamily::Taylor => (2.0 * mf + 1.0) / ((mf + 1.0) * (mf + 2.0) * (mf + 3.0)).powi(2),
        WaveletFamily::ChebyshevFirstKind => 1.0 / (mf - 1.0).powi(4),
    }
}

/// `sqrt(Σ_{n > 2^{k−1}} Σ_{m ≥ M} g(n, m))` with `g = n^{-5} · h(m)`,
/// each index summed over `trunc` terms. Since `g` factorises, the double
/// sum is the product of the two single sums; the remainder of each comes
/// from the integral test.
pub fn kappa_tail(
    family: WaveletFamily,
    k: u32,
    degrees: usize,
    trunc: usize,
) -> Result<TailSum, AnalysisError> {
    if k < 1 || degrees < 1 {
        return Err(AnalysisError::Domain("k and M must be at least 1".into()));
    }
    if family == WaveletFamily::ChebyshevFirstKind && degrees < 2 {
        return Err(AnalysisError::Domain(
            "Chebyshev tail needs M >= 2 (m = 1 term is singular)".into(),
        ));
    }
    if trunc < 1000 {
        return Err(AnalysisError::Domain(format!(
            "truncation {trunc} below 1000 terms"
        )));
    }
    let n0 = 1usize << (k - 1);
    let n_last = n0 + trunc;
    let n_sum: f64 = (n0 + 1..=n_last).rev().map(|n| (n as f64).powi(-5)).sum();
    let n_rem = 0.25 / (n_last as f64).powi(4);

    let m_last = degrees + trunc - 1;
    let m_sum: f64 = (degrees..=m_last)
        .rev()
        .map(|m| tail_m_term(family, m))
        .sum();
    let a = m_last as f64;
    let m_rem = match family {
        // (2m+1)/((m+1)(m+2)(m+3))^2 <= 2/(m+1)^5
        WaveletFamily::Taylor => 0.5 / (a + 1.0).powi(4),
        WaveletFamily::ChebyshevFirstKind => 1.0 / (3.0 * (a - 1.0).powi(3)),
    };
    let sum = n_sum * m_sum;
    let upper = (n_sum + n_rem) * (m_sum + m_rem);
    let value = sum.sqrt();
    Ok(TailSum {
        value,
        remainder: upper.sqrt() - value,
    })
}

/// Default truncation for [`kappa_tail`].
pub const TAIL_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    pub family: WaveletFamily,
    pub k: u32,
    pub degrees: usize,
    /// Bound on `|f''|`.
    pub l: f64,
    pub tail: TailSum,
    /// Free constant of the accumulation estimate.
    pub lambda: f64,
    /// `lambda · tail`.
    pub kappa: f64,
    /// Approximation-error bound `σ`: `√π L / 8 · tail` for Chebyshev,
    /// `L · tail` for Taylor.
    pub sigma: f64,
}

impl BoundEstimate {
    pub fn new(spec: &BasisSpec, l: f64, lambda: f64) -> Result<Self, AnalysisError> {
        let tail = kappa_tail(spec.family(), spec.level(), spec.degrees(), TAIL_TERMS)?;
        let sigma = match spec.family() {
            WaveletFamily::Taylor => l * tail.value,
            WaveletFamily::ChebyshevFirstKind => std::f64::consts::PI.sqrt() * l / 8.0 * tail.value,
        };
        Ok(Self {
            family: spec.family(),
            k: spec.level(),
            degrees: spec.degrees(),
            l,
            tail,
            lambda,
            kappa: lambda * tail.value,
            sigma,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEntry {
    pub n: usize,
    pub m: usize,
    pub coefficient: f64,
    pub bound: f64,
    /// `bound − |coefficient|`; negative means violated.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub family: WaveletFamily,
    pub entries: Vec<DecayEntry>,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.margin >= 0.0)
    }

    pub fn violations(&self) -> impl Iterator<Item = &DecayEntry> {
        self.entries.iter().filter(|e| e.margin < 0.0)
    }

    pub fn worst_margin(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.margin).reduce(f64::min)
    }
}

/// Expands `f` and checks every `m ≥ 2` coefficient against
/// [`coefficient_bound`].
pub fn verify_coefficient_decay<F: Fn(f64) -> f64>(
    f: F,
    l: f64,
    spec: &BasisSpec,
) -> Result<DecayReport, AnalysisError> {
    let coeffs = spec.expand(f)?;
    let mut entries = Vec::new();
    for idx in spec.indices().filter(|i| i.m >= 2) {
        let bound = coefficient_bound(spec.family(), idx.n, idx.m, l)?;
        let coefficient = coeffs[idx.flat];
        entries.push(DecayEntry {
            n: idx.n,
            m: idx.m,
            coefficient,
            bound,
            margin: bound - coefficient.abs(),
        });
    }
    Ok(DecayReport {
        family: spec.family(),
        entries,
    })
}

/// Read access to a time-marched numerical solution.
pub trait NumericHistory {
    fn times(&self) -> &[f64];
    fn collocation(&self) -> &[f64];
    /// `Y` on the collocation grid at step `r`.
    fn grid_field(&self, step: usize) -> &[f64];
    /// `Y(x, t_r)` at an arbitrary point.
    fn field(&self, x: f64, step: usize) -> f64;
    fn control(&self, step: usize) -> Option<f64>;

    fn step_at(&self, t: f64) -> Option<usize> {
        self.times().iter().position(|&s| (s - t).abs() <= 1e-9)
    }
}

impl NumericHistory for SolveOutput {
    fn times(&self) -> &[f64] {
        &self.times
    }

    fn collocation(&self) -> &[f64] {
        &self.collocation
    }

    fn grid_field(&self, step: usize) -> &[f64] {
        &self.snapshots[step].y
    }

    fn field(&self, x: f64, step: usize) -> f64 {
        self.field_at(x, step).y
    }

    fn control(&self, step: usize) -> Option<f64> {
        self.controls[step]
    }

    fn step_at(&self, t: f64) -> Option<usize> {
        SolveOutput::step_at(self, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionRow {
    pub t: f64,
    pub x: f64,
    pub exact: f64,
    pub numeric: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlRow {
    pub t: f64,
    pub exact: f64,
    /// Absent where the control could not be recovered.
    pub numeric: Option<f64>,
    pub abs_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tables {
    pub solution: Vec<SolutionRow>,
    pub control: Vec<ControlRow>,
}

impl Tables {
    pub fn max_solution_error(&self) -> f64 {
        self.solution
            .iter()
            .map(|r| r.abs_error)
            .fold(0.0, f64::max)
    }
}

/// Pointwise solution errors at `report_x × report_t` and control errors at
/// `report_t`. Report times must lie on the time grid.
pub fn build_tables<H: NumericHistory + ?Sized>(
    output: &H,
    exact: &ExactReference,
    report_x: &[f64],
    report_t: &[f64],
) -> Result<Tables, AnalysisError> {
    let field = exact
        .field
        .as_ref()
        .ok_or(AnalysisError::UnsupportedReport("solution"))?;
    if let Some(&x) = report_x.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(AnalysisError::OutOfRange { x });
    }
    let mut tables = Tables::default();
    for &t in report_t {
        let r = output.step_at(t).ok_or(AnalysisError::OffGrid { t })?;
        let t_r = output.times()[r];
        for &x in report_x {
            let y = field(x, t_r);
            let v = output.field(x, r);
            tables.solution.push(SolutionRow {
                t: t_r,
                x,
                exact: y,
                numeric: v,
                abs_error: (y - v).abs(),
            });
        }
        if let Some(control) = &exact.control {
            let xe = control(t_r);
            let xn = output.control(r);
            tables.control.push(ControlRow {
                t: t_r,
                exact: xe,
                numeric: xn,
                abs_error: xn.map(|v| (xe - v).abs()),
            });
        }
    }
    Ok(tables)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub t: f64,
    pub linf: f64,
    pub l2: f64,
}

/// `L∞` and `L2` errors on the collocation grid at every step.
pub fn error_series<H: NumericHistory + ?Sized>(
    output: &H,
    exact: &ExactReference,
) -> Result<Vec<SeriesPoint>, AnalysisError> {
    let field = exact
        .field
        .as_ref()
        .ok_or(AnalysisError::UnsupportedReport("solution"))?;
    let xs = output.collocation();
    output
        .times()
        .iter()
        .enumerate()
        .map(|(r, &t)| {
            let want: Vec<f64> = xs.iter().map(|&x| field(x, t)).collect();
            let got = output.grid_field(r);
            Ok(SeriesPoint {
                t,
                linf: linf_error(&want, got)?,
                l2: l2_error(&want, got)?,
            })
        })
        .collect()
}

/// Largest one-step error growth `κ` with `e_r ≤ e_{r−1} + κ Δt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccumulationFit {
    pub kappa: f64,
    /// Whether `e_r ≤ e_0 + r κ Δt` holds at every step.
    pub holds: bool,
}

pub fn fit_accumulation_rate(errors: &[f64], dt: f64) -> Result<AccumulationFit, AnalysisError> {
    if errors.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if !(dt > 0.0) {
        return Err(AnalysisError::Domain(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let kappa = errors
        .windows(2)
        .map(|w| (w[1] - w[0]) / dt)
        .fold(0.0, f64::max);
    let e0 = errors[0];
    let holds = errors
        .iter()
        .enumerate()
        .all(|(r, &e)| e <= e0 + r as f64 * kappa * dt * (1.0 + 1e-12) + 1e-15);
    Ok(AccumulationFit { kappa, holds })
}

/// Scientific notation with four significant digits.
pub fn sci4(v: f64) -> String {
    format!("{v:.3e}")
}
