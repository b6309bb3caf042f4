//! Problem data for
//!
//! ```text
//! y_t = A y_xx + B y_x + X(t) y + ψ(x, t),   x ∈ [0, 1], t ∈ [0, T]
//! y(x, 0) = y0(x),  y(0, t) = f0(t),  y(1, t) = f1(t),  y(x_in, t) = Q(t)
//! ```
//!
//! where the field `y` and the control `X` are both unknown. Derivatives of
//! the data that the scheme needs are supplied analytically.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{Expr, ExprError, Var};

/// Below this magnitude `Q(t)` is treated as vanishing.
pub const Q_GUARD: f64 = 1e-12;
/// Tolerance on the `t = 0` compatibility conditions.
pub const COMPATIBILITY_TOL: f64 = 1e-10;

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct InverseProblem {
    /// Diffusion coefficient `A`.
    pub diffusion: f64,
    /// Advection coefficient `B`.
    pub advection: f64,
    /// Source `ψ(x, t)`.
    pub source: Fn2,
    pub initial: Fn1,
    pub initial_dx: Fn1,
    pub initial_dxx: Fn1,
    pub left: Fn1,
    pub left_dt: Fn1,
    pub right: Fn1,
    pub right_dt: Fn1,
    /// Interior trace `Q(t) = y(x_in, t)`.
    pub interior: Fn1,
    pub interior_dt: Fn1,
    pub x_in: f64,
    /// Final time `T`.
    pub horizon: f64,
}

impl fmt::Debug for InverseProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InverseProblem")
            .field("diffusion", &self.diffusion)
            .field("advection", &self.advection)
            .field("x_in", &self.x_in)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

/// Closed-form solution, when one is known.
#[derive(Clone, Default)]
pub struct ExactReference {
    pub field: Option<Fn2>,
    pub control: Option<Fn1>,
}

impl fmt::Debug for ExactReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactReference")
            .field("field", &self.field.is_some())
            .field("control", &self.control.is_some())
            .finish()
    }
}

impl ExactReference {
    pub fn absent() -> Self {
        Self::default()
    }

    pub fn is_present(&self) -> bool {
        self.field.is_some() && self.control.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompatibilityCheck {
    /// `y0(0) = f0(0)`
    Left,
    /// `y0(1) = f1(0)`
    Right,
    /// `y0(x_in) = Q(0)`
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Compatibility {
        check: CompatibilityCheck,
        initial: f64,
        boundary: f64,
    },
    VanishingInterior {
        t: f64,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Compatibility {
                check,
                initial,
                boundary,
            } => write!(
                f,
                "{check:?} compatibility fails at t=0: initial data {initial}, boundary data {boundary}"
            ),
            Violation::VanishingInterior { t, value } => {
                write!(f, "interior trace Q({t}) = {value:e} vanishes")
            }
        }
    }
}

impl InverseProblem {
    /// Checks the `t = 0` compatibility conditions and that `Q` stays away
    /// from zero at each of `times`.
    pub fn validate(&self, times: &[f64]) -> Vec<Violation> {
        let mut out = Vec::new();
        let pairs = [
            (
                CompatibilityCheck::Left,
                (self.initial)(0.0),
                (self.left)(0.0),
            ),
            (
                CompatibilityCheck::Right,
                (self.initial)(1.0),
                (self.right)(0.0),
            ),
            (
                CompatibilityCheck::Interior,
                (self.initial)(self.x_in),
                (self.interior)(0.0),
            ),
        ];
        for (check, initial, boundary) in pairs {
            if !((initial - boundary).abs() <= COMPATIBILITY_TOL) {
                out.push(Violation::Compatibility {
                    check,
                    initial,
                    boundary,
                });
            }
        }
        for &t in times {
            let value = (self.interior)(t);
            if !(value.abs() > Q_GUARD) {
                out.push(Violation::VanishingInterior { t, value });
            }
        }
        out
    }

    /// Residual `y_t − A y_xx − B y_x − X y − ψ` of a candidate solution
    /// given through its derivatives.
    #[allow(clippy::too_many_arguments)]
    pub fn residual(
        &self,
        x: f64,
        t: f64,
        y: f64,
        y_t: f64,
        y_x: f64,
        y_xx: f64,
        control: f64,
    ) -> f64 {
        y_t - self.diffusion * y_xx - self.advection * y_x - control * y - (self.source)(x, t)
    }
}

fn f1(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Fn1 {
    Arc::new(f)
}

fn f2(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Fn2 {
    Arc::new(f)
}

/// `y = x·e^t`, `X = 1 + t²` on `T = 1`, with `A = 1`, `B = 2`.
pub fn example_one() -> (InverseProblem, ExactReference) {
    let problem = InverseProblem {
        diffusion: 1.0,
        advection: 2.0,
        source: f2(|x, t| -(2.0 + x * t * t) * t.exp()),
        initial: f1(|x| x),
        initial_dx: f1(|_| 1.0),
        initial_dxx: f1(|_| 0.0),
        left: f1(|_| 0.0),
        left_dt: f1(|_| 0.0),
        right: f1(f64::exp),
        right_dt: f1(f64::exp),
        interior: f1(|t| 0.5 * t.exp()),
        interior_dt: f1(|t| 0.5 * t.exp()),
        x_in: 0.5,
        horizon: 1.0,
    };
    let exact = ExactReference {
        field: Some(f2(|x, t| x * t.exp())),
        control: Some(f1(|t| 1.0 + t * t)),
    };
    (problem, exact)
}

/// `y = x·sin t`, `X = t` on `T = 0.5`, with `A = 1`, `B = 0`. Here
/// `Q(0) = 0`, so no control value exists at `t = 0`.
pub fn example_two() -> (InverseProblem, ExactReference) {
    let problem = InverseProblem {
        diffusion: 1.0,
        advection: 0.0,
        source: f2(|x, t| x * t.cos() - t * x * t.sin()),
        initial: f1(|_| 0.0),
        initial_dx: f1(|_| 0.0),
        initial_dxx: f1(|_| 0.0),
        left: f1(|_| 0.0),
        left_dt: f1(|_| 0.0),
        right: f1(f64::sin),
        right_dt: f1(f64::cos),
        interior: f1(|t| 0.5 * t.sin()),
        interior_dt: f1(|t| 0.5 * t.cos()),
        x_in: 0.5,
        horizon: 0.5,
    };
    let exact = ExactReference {
        field: Some(f2(|x, t| x * t.sin())),
        control: Some(f1(|t| t)),
    };
    (problem, exact)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("missing problem key '{key}'")]
    Missing { key: &'static str },
    #[error("key '{key}': {source}")]
    Expression {
        key: &'static str,
        #[source]
        source: ExprError,
    },
    #[error("key '{key}' may not depend on '{var}'")]
    ForbiddenVariable { key: &'static str, var: char },
    #[error("key '{key}': {message}")]
    Invalid { key: &'static str, message: String },
}

impl ProblemError {
    pub fn key(&self) -> &'static str {
        match self {
            ProblemError::Missing { key }
            | ProblemError::Expression { key, .. }
            | ProblemError::ForbiddenVariable { key, .. }
            | ProblemError::Invalid { key, .. } => key,
        }
    }
}

/// Keys understood by [`custom_problem`]. The first group is required;
/// `T`, `exact_y` and `exact_X` are optional.
pub const PROBLEM_KEYS: &[&str] = &[
    "A", "B", "psi", "y0", "y0_x", "y0_xx", "f0", "f0_t", "f1", "f1_t", "Q", "Q_t", "x_in", "T",
    "exact_y", "exact_X",
];

#[derive(Clone, Copy)]
enum Arity {
    Space,
    Time,
    Both,
}

/// Builds a problem from expression strings looked up by key.
pub fn custom_problem<'a>(
    lookup: impl Fn(&str) -> Option<&'a str>,
) -> Result<(InverseProblem, ExactReference), ProblemError> {
    let parse = |key: &'static str, arity: Arity| -> Result<Option<Expr>, ProblemError> {
        let Some(text) = lookup(key) else {
            return Ok(None);
        };
        let e = Expr::parse(text).map_err(|source| ProblemError::Expression { key, source })?;
        match arity {
            Arity::Space if e.uses(Var::T) => {
                Err(ProblemError::ForbiddenVariable { key, var: 't' })
            }
            Arity::Time if e.uses(Var::X) => Err(ProblemError::ForbiddenVariable { key, var: 'x' }),
            _ => Ok(Some(e)),
        }
    };
    let required = |key: &'static str, arity: Arity| -> Result<Expr, ProblemError> {
        parse(key, arity)?.ok_or(ProblemError::Missing { key })
    };
    let constant = |key: &'static str| -> Result<Option<f64>, ProblemError> {
        parse(key, Arity::Space)?
            .map(|e| {
                if e.uses(Var::X) {
                    Err(ProblemError::ForbiddenVariable { key, var: 'x' })
                } else {
                    Ok(e.eval(0.0, 0.0))
                }
            })
            .transpose()
    };
    let space = |e: Expr| -> Fn1 { Arc::new(move |x| e.eval(x, 0.0)) };
    let time = |e: Expr| -> Fn1 { Arc::new(move |t| e.eval(0.0, t)) };
    let both = |e: Expr| -> Fn2 { Arc::new(move |x, t| e.eval(x, t)) };

    let x_in = constant("x_in")?.ok_or(ProblemError::Missing { key: "x_in" })?;
    if !(x_in > 0.0 && x_in < 1.0) {
        return Err(ProblemError::Invalid {
            key: "x_in",
            message: format!("interior point {x_in} must lie in (0, 1)"),
        });
    }
    let horizon = constant("T")?.unwrap_or(1.0);
    if !(horizon > 0.0) {
        return Err(ProblemError::Invalid {
            key: "T",
            message: format!("final time {horizon} must be positive"),
        });
    }
    let problem = InverseProblem {
        diffusion: constant("A")?.ok_or(ProblemError::Missing { key: "A" })?,
        advection: constant("B")?.ok_or(ProblemError::Missing { key: "B" })?,
        source: both(required("psi", Arity::Both)?),
        initial: space(required("y0", Arity::Space)?),
        initial_dx: space(required("y0_x", Arity::Space)?),
        initial_dxx: space(required("y0_xx", Arity::Space)?),
        left: time(required("f0", Arity::Time)?),
        left_dt: time(required("f0_t", Arity::Time)?),
        right: time(required("f1", Arity::Time)?),
        right_dt: time(required("f1_t", Arity::Time)?),
        interior: time(required("Q", Arity::Time)?),
        interior_dt: time(required("Q_t", Arity::Time)?),
        x_in,
        horizon,
    };
    let exact = ExactReference {
        field: parse("exact_y", Arity::Both)?.map(both),
        control: parse("exact_X", Arity::Time)?.map(time),
    };
    Ok((problem, exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn example_one_values() {
        let (p, e) = example_one();
        assert_eq!((e.control.as_ref().unwrap())(1.0), 2.0);
        assert_eq!((e.field.as_ref().unwrap())(0.5, 0.0), 0.5);
        assert_eq!((p.interior)(0.0), 0.5);
        assert_eq!((p.source)(0.5, 0.0), -2.0);
    }

    #[test]
    fn example_two_values() {
        let (p, e) = example_two();
        assert_eq!((e.control.as_ref().unwrap())(0.5), 0.5);
        assert_eq!((p.interior)(0.0), 0.0);
        assert_eq!((p.source)(1.0, 0.0), 1.0);
    }

    #[test]
    fn validate_examples() {
        let (p, _) = example_one();
        let times: Vec<f64> = (1..=10).map(|j| j as f64 / 10.0).collect();
        assert!(p.validate(&times).is_empty());

        let (p, _) = example_two();
        let v = p.validate(&[0.0, 0.1, 0.5]);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::VanishingInterior { t, .. } if t == 0.0));

        let (mut p, _) = example_one();
        p.initial = Arc::new(|x| if x == 1.0 { 2.0 } else { x });
        let v = p.validate(&times);
        assert_eq!(v.len(), 1);
        assert!(matches!(
            v[0],
            Violation::Compatibility {
                check: CompatibilityCheck::Right,
                ..
            }
        ));
    }

    fn example_one_keys() -> HashMap<&'static str, &'static str> {
        HashMap::from([
            ("A", "1"),
            ("B", "2"),
            ("psi", "-(2 + x*t^2)*exp(t)"),
            ("y0", "x"),
            ("y0_x", "1"),
            ("y0_xx", "0"),
            ("f0", "0"),
            ("f0_t", "0"),
            ("f1", "exp(t)"),
            ("f1_t", "exp(t)"),
            ("Q", "exp(t)/2"),
            ("Q_t", "exp(t)/2"),
            ("x_in", "0.5"),
            ("exact_y", "x*exp(t)"),
            ("exact_X", "1 + t^2"),
        ])
    }

    #[test]
    fn custom_problem_matches_builtin() {
        let keys = example_one_keys();
        let (p, e) = custom_problem(|k| keys.get(k).copied()).unwrap();
        let (q, f) = example_one();
        for &(x, t) in &[(0.1, 0.2), (0.7, 0.9), (0.5, 1.0)] {
            assert!(((p.source)(x, t) - (q.source)(x, t)).abs() < 1e-14);
            assert!(((p.interior)(t) - (q.interior)(t)).abs() < 1e-14);
            let a = (e.field.as_ref().unwrap())(x, t);
            let b = (f.field.as_ref().unwrap())(x, t);
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(p.horizon, 1.0);
        assert!(e.is_present());
    }

    #[test]
    fn custom_problem_errors() {
        let mut keys = example_one_keys();
        keys.remove("Q_t");
        let err = custom_problem(|k| keys.get(k).copied()).unwrap_err();
        assert_eq!(err, ProblemError::Missing { key: "Q_t" });

        let mut keys = example_one_keys();
        keys.insert("f1", "exp(x)");
        let err = custom_problem(|k| keys.get(k).copied()).unwrap_err();
        assert_eq!(err.key(), "f1");

        let mut keys = example_one_keys();
        keys.insert("psi", "x +");
        assert!(matches!(
            custom_problem(|k| keys.get(k).copied()),
            Err(ProblemError::Expression { key: "psi", .. })
        ));

        let mut keys = example_one_keys();
        keys.insert("x_in", "1.5");
        assert!(custom_problem(|k| keys.get(k).copied()).is_err());
    }
}
