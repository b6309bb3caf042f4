//! Time marching for the collocated scheme.
//!
//! On each step `[t_r, t_r+1]` the mixed derivative `∂³Y/∂t∂x²` is written
//! as `D·I(x)`. Integrating in `x` twice and using the Dirichlet data gives
//! `Y_t`, `Y_x`, `Y` in terms of `D` and the previous snapshot; collocating
//! the PDE at the `N` grid points then yields an `N × N` system for `D`.
//! The control `X(t_r+1)` is predicted first from the interior trace `Q`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::basis::{BasisSpec, BasisVectors};
use crate::linalg::{self, GmresOptions, LinearError, LinearMethod, LinearSolution};
use crate::problem::{InverseProblem, Q_GUARD};

/// Allowed mismatch between `dt · steps` and the final time.
pub const STEP_CONSISTENCY_TOL: f64 = 1e-12;

/// How the control predictor treats the first step, where no previous
/// coefficient vector exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlBootstrap {
    /// Use a zero coefficient vector: the `Y_xt` correction keeps its
    /// boundary-rate part `f1'(t_0) − f0'(t_0)`.
    #[default]
    BoundaryRate,
    /// Drop both time corrections on the first step.
    ZeroCorrection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub basis: BasisSpec,
    pub dt: f64,
    pub steps: usize,
    pub linear_method: LinearMethod,
    pub gmres: GmresOptions,
    pub bootstrap: ControlBootstrap,
}

impl SolverConfig {
    /// `steps` uniform steps over `[0, horizon]`, direct LU.
    pub fn new(basis: BasisSpec, horizon: f64, steps: usize) -> Self {
        Self {
            basis,
            dt: horizon / steps as f64,
            steps,
            linear_method: LinearMethod::DirectLu,
            gmres: GmresOptions::for_dim(basis.dim()),
            bootstrap: ControlBootstrap::default(),
        }
    }

    /// Steps of size `dt`; fails unless `dt` divides `horizon`.
    pub fn with_step(basis: BasisSpec, horizon: f64, dt: f64) -> Result<Self, SolverError> {
        let steps = step_count(horizon, dt)?;
        Ok(Self {
            dt,
            ..Self::new(basis, horizon, steps)
        })
    }

    pub fn linear_method(mut self, method: LinearMethod) -> Self {
        self.linear_method = method;
        self
    }

    pub fn bootstrap(mut self, bootstrap: ControlBootstrap) -> Self {
        self.bootstrap = bootstrap;
        self
    }
}

/// Number of steps of size `dt` covering `[0, horizon]`.
pub fn step_count(horizon: f64, dt: f64) -> Result<usize, SolverError> {
    if !(dt > 0.0) || !(horizon > 0.0) || !dt.is_finite() || !horizon.is_finite() {
        return Err(SolverError::Config(format!(
            "time step {dt} and final time {horizon} must be positive"
        )));
    }
    let steps = (horizon / dt).round();
    if steps < 1.0 || (steps * dt - horizon).abs() > STEP_CONSISTENCY_TOL {
        return Err(SolverError::Config(format!(
            "time step {dt} does not divide final time {horizon}"
        )));
    }
    Ok(steps as usize)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("interior trace Q vanishes at t={t}; control cannot be recovered")]
    DegenerateInterior { t: f64 },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("step {step} (t={t}): {source}")]
    Step {
        step: usize,
        t: f64,
        #[source]
        source: LinearError,
    },
}

/// Basis data at the points the scheme ever evaluates: the collocation
/// grid, `x_in`, and the two boundary ends.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub spec: BasisSpec,
    pub points: Vec<f64>,
    pub x_in: f64,
    /// `I(x_l)` as rows.
    values: DMatrix<f64>,
    /// `R(x_l) − S(1)` as rows.
    slope: DMatrix<f64>,
    /// `S(x_l) − x_l S(1)` as rows.
    shape: DMatrix<f64>,
    interior: BasisVectors,
    s_one: DVector<f64>,
}

impl Discretization {
    pub fn new(spec: BasisSpec, x_in: f64) -> Self {
        let points = spec.collocation_points();
        let n = spec.dim();
        let s_one = DVector::from_vec(spec.basis_vectors(1.0).second);
        let mut values = DMatrix::zeros(n, n);
        let mut slope = DMatrix::zeros(n, n);
        let mut shape = DMatrix::zeros(n, n);
        for (l, &x) in points.iter().enumerate() {
            let v = spec.basis_vectors(x);
            for j in 0..n {
                values[(l, j)] = v.values[j];
                slope[(l, j)] = v.first[j] - s_one[j];
                shape[(l, j)] = v.second[j] - x * s_one[j];
            }
        }
        Self {
            spec,
            points,
            x_in,
            values,
            slope,
            shape,
            interior: spec.basis_vectors(x_in),
            s_one,
        }
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// `S(1)`.
    pub fn s_one(&self) -> &DVector<f64> {
        &self.s_one
    }

    /// `(D·I(x), D·(R(x) − S(1)), D·(S(x) − x S(1)))` at an arbitrary point.
    pub fn increments_at(&self, coeffs: &DVector<f64>, x: f64) -> (f64, f64, f64) {
        let v = self.spec.basis_vectors(x);
        let mut out = (0.0, 0.0, 0.0);
        for j in 0..self.dim() {
            out.0 += coeffs[j] * v.values[j];
            out.1 += coeffs[j] * (v.first[j] - self.s_one[j]);
            out.2 += coeffs[j] * (v.second[j] - x * self.s_one[j]);
        }
        out
    }
}

/// `Y`, `Y_x`, `Y_xx` at every collocation point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub y: Vec<f64>,
    pub y_x: Vec<f64>,
    pub y_xx: Vec<f64>,
}

/// `Y`, `Y_x`, `Y_xx` at a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValues {
    pub y: f64,
    pub y_x: f64,
    pub y_xx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub step: usize,
    pub t: f64,
    pub field: FieldSnapshot,
    pub interior: PointValues,
    /// `Y(0, t_r)` and `Y(1, t_r)` carried by the same update.
    pub boundary: [f64; 2],
    pub prev_coefficients: Option<DVector<f64>>,
    pub control: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Snapshots and control values at `t_0 … t_Nt`, the coefficients of every
/// step and the linear-solve diagnostics.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub basis: BasisSpec,
    pub dt: f64,
    pub times: Vec<f64>,
    pub controls: Vec<Option<f64>>,
    pub snapshots: Vec<FieldSnapshot>,
    pub boundary: Vec<[f64; 2]>,
    /// `D` for steps `1..=Nt` (index `r - 1` holds step `r`).
    pub coefficients: Vec<DVector<f64>>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub collocation: Vec<f64>,
    discretization: Discretization,
    problem: InverseProblem,
    /// Running sums `Σ_{s ≤ r} D_s`, starting with the zero vector.
    cumulative: Vec<DVector<f64>>,
}

impl SolveOutput {
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    /// Step index whose time is within `1e-9` of `t`.
    pub fn step_at(&self, t: f64) -> Option<usize> {
        let r = (t / self.dt).round();
        if r < 0.0 || r as usize >= self.times.len() {
            return None;
        }
        let r = r as usize;
        ((self.times[r] - t).abs() <= 1e-9).then_some(r)
    }

    /// `Y(x, t_r)`, `Y_x`, `Y_xx` at an arbitrary `x` from the coefficient
    /// history; the per-step updates telescope into one sum.
    pub fn field_at(&self, x: f64, step: usize) -> PointValues {
        let p = &self.problem;
        let t = self.times[step];
        let (dxx, dx, d) = self.discretization.increments_at(&self.cumulative[step], x);
        let left = (p.left)(t) - (p.left)(0.0);
        let span = (p.right)(t) - (p.right)(0.0) - left;
        PointValues {
            y: (p.initial)(x) + self.dt * d + left + x * span,
            y_x: (p.initial_dx)(x) + self.dt * dx + span,
            y_xx: (p.initial_dxx)(x) + self.dt * dxx,
        }
    }

    pub fn problem(&self) -> &InverseProblem {
        &self.problem
    }
}

/// State at `t = 0` from the initial data. `X(0)` is recovered from the
/// interior trace when `Q(0)` is nonzero.
pub fn init_state(problem: &InverseProblem, disc: &Discretization) -> StepState {
    let field = FieldSnapshot {
        y: disc.points.iter().map(|&x| (problem.initial)(x)).collect(),
        y_x: disc
            .points
            .iter()
            .map(|&x| (problem.initial_dx)(x))
            .collect(),
        y_xx: disc
            .points
            .iter()
            .map(|&x| (problem.initial_dxx)(x))
            .collect(),
    };
    let x_in = disc.x_in;
    let interior = PointValues {
        y: (problem.initial)(x_in),
        y_x: (problem.initial_dx)(x_in),
        y_xx: (problem.initial_dxx)(x_in),
    };
    let q = (problem.interior)(0.0);
    let control = (q.abs() > Q_GUARD).then(|| {
        ((problem.interior_dt)(0.0)
            - problem.diffusion * interior.y_xx
            - problem.advection * interior.y_x
            - (problem.source)(x_in, 0.0))
            / q
    });
    StepState {
        step: 0,
        t: 0.0,
        field,
        interior,
        boundary: [(problem.initial)(0.0), (problem.initial)(1.0)],
        prev_coefficients: None,
        control,
    }
}

/// `X(t_r + dt)` from the PDE restricted to `x_in`, with `Y_xx` and `Y_x`
/// carried forward one step by a first-order Taylor expansion in time.
pub fn predict_control(
    state: &StepState,
    problem: &InverseProblem,
    disc: &Discretization,
    dt: f64,
    bootstrap: ControlBootstrap,
) -> Result<f64, SolverError> {
    let t = state.t;
    let t_next = t + dt;
    let q = (problem.interior)(t_next);
    if !(q.abs() > Q_GUARD) {
        return Err(SolverError::DegenerateInterior { t: t_next });
    }
    let boundary_rate = (problem.right_dt)(t) - (problem.left_dt)(t);
    let (w_xx, w_x) = match &state.prev_coefficients {
        Some(d) => {
            let iv = &disc.interior;
            let mut w_xx = 0.0;
            let mut w_x = boundary_rate;
            for j in 0..disc.dim() {
                w_xx += d[j] * iv.values[j];
                w_x += d[j] * (iv.first[j] - disc.s_one[j]);
            }
            (w_xx, w_x)
        }
        None => match bootstrap {
            ControlBootstrap::BoundaryRate => (0.0, boundary_rate),
            ControlBootstrap::ZeroCorrection => (0.0, 0.0),
        },
    };
    let numerator = (problem.interior_dt)(t_next)
        - problem.diffusion * (state.interior.y_xx + dt * w_xx)
        - problem.advection * (state.interior.y_x + dt * w_x)
        - (problem.source)(disc.x_in, t_next);
    Ok(numerator / q)
}

/// Collocated system `M D = b` for the step ending at `t_next`.
pub fn assemble(
    state: &StepState,
    control: f64,
    problem: &InverseProblem,
    disc: &Discretization,
    t_next: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let dt = t_next - state.t;
    let a = problem.diffusion;
    let b_coef = problem.advection;
    let matrix =
        &disc.shape * (1.0 - control * dt) - &disc.values * (a * dt) - &disc.slope * (b_coef * dt);

    let t = state.t;
    let left_step = (problem.left)(t_next) - (problem.left)(t);
    let span_step = (problem.right)(t_next) - (problem.right)(t) - left_step;
    let left_rate = (problem.left_dt)(t_next);
    let span_rate = (problem.right_dt)(t_next) - left_rate;
    let f = &state.field;
    let rhs = DVector::from_iterator(
        disc.dim(),
        disc.points.iter().enumerate().map(|(l, &x)| {
            (problem.source)(x, t_next) - x * span_rate - left_rate
                + a * f.y_xx[l]
                + b_coef * (f.y_x[l] + span_step)
                + control * (f.y[l] + left_step + x * span_step)
        }),
    );
    (matrix, rhs)
}

/// Solves the step system with the configured method.
pub fn linear_solve(
    matrix: &DMatrix<f64>,
    rhs: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<LinearSolution, LinearError> {
    match cfg.linear_method {
        LinearMethod::DirectLu => linalg::solve_lu(matrix, rhs),
        LinearMethod::RestartedGmres => linalg::solve_gmres(matrix, rhs, &cfg.gmres),
    }
}

/// Moves the snapshots from `t_r` to `t_r + dt` given this step's `D`.
pub fn advance(
    state: StepState,
    coeffs: DVector<f64>,
    control: Option<f64>,
    problem: &InverseProblem,
    disc: &Discretization,
    dt: f64,
) -> StepState {
    let t = state.t;
    let t_next = t + dt;
    let left_step = (problem.left)(t_next) - (problem.left)(t);
    let span_step = (problem.right)(t_next) - (problem.right)(t) - left_step;

    let d_xx = &disc.values * &coeffs;
    let d_x = &disc.slope * &coeffs;
    let d_y = &disc.shape * &coeffs;
    let mut field = state.field;
    for (l, &x) in disc.points.iter().enumerate() {
        field.y_xx[l] += dt * d_xx[l];
        field.y_x[l] += dt * d_x[l] + span_step;
        field.y[l] += dt * d_y[l] + left_step + x * span_step;
    }

    let x_in = disc.x_in;
    let (ixx, ix, iy) = disc.increments_at(&coeffs, x_in);
    let interior = PointValues {
        y: state.interior.y + dt * iy + left_step + x_in * span_step,
        y_x: state.interior.y_x + dt * ix + span_step,
        y_xx: state.interior.y_xx + dt * ixx,
    };
    let (_, _, at_zero) = disc.increments_at(&coeffs, 0.0);
    let (_, _, at_one) = disc.increments_at(&coeffs, 1.0);
    let boundary = [
        state.boundary[0] + dt * at_zero + left_step,
        state.boundary[1] + dt * at_one + left_step + span_step,
    ];

    StepState {
        step: state.step + 1,
        t: t_next,
        field,
        interior,
        boundary,
        prev_coefficients: Some(coeffs),
        control,
    }
}

/// Runs the whole march from `t = 0` to `cfg.steps · cfg.dt`.
///
/// Where `Q(t_r+1)` vanishes the control is recorded as absent and the step
/// is assembled with the most recent available value (zero if none).
pub fn run(problem: &InverseProblem, cfg: &SolverConfig) -> Result<SolveOutput, SolverError> {
    if cfg.steps == 0 || !(cfg.dt > 0.0) {
        return Err(SolverError::Config(
            "at least one positive time step is required".into(),
        ));
    }
    if (cfg.dt * cfg.steps as f64 - problem.horizon).abs() > STEP_CONSISTENCY_TOL {
        return Err(SolverError::Config(format!(
            "dt * steps = {} does not match final time {}",
            cfg.dt * cfg.steps as f64,
            problem.horizon
        )));
    }
    let disc = Discretization::new(cfg.basis, problem.x_in);
    let n = disc.dim();
    let mut state = init_state(problem, &disc);

    let mut times = Vec::with_capacity(cfg.steps + 1);
    let mut controls = Vec::with_capacity(cfg.steps + 1);
    let mut snapshots = Vec::with_capacity(cfg.steps + 1);
    let mut boundary = Vec::with_capacity(cfg.steps + 1);
    let mut coefficients = Vec::with_capacity(cfg.steps);
    let mut diagnostics = Vec::with_capacity(cfg.steps);
    let mut cumulative = Vec::with_capacity(cfg.steps + 1);
    times.push(0.0);
    controls.push(state.control);
    snapshots.push(state.field.clone());
    boundary.push(state.boundary);
    cumulative.push(DVector::zeros(n));
    let mut last_control = state.control;

    for r in 0..cfg.steps {
        // t_{r+1} from the index, not by accumulation
        let t_next = (r + 1) as f64 * cfg.dt;
        let dt = t_next - state.t;
        let predicted = match predict_control(&state, problem, &disc, dt, cfg.bootstrap) {
            Ok(x) => Some(x),
            Err(SolverError::DegenerateInterior { .. }) => None,
            Err(e) => return Err(e),
        };
        let used = predicted.or(last_control).unwrap_or(0.0);
        let (matrix, rhs) = assemble(&state, used, problem, &disc, t_next);
        let solved = linear_solve(&matrix, &rhs, cfg).map_err(|source| SolverError::Step {
            step: r + 1,
            t: t_next,
            source,
        })?;
        diagnostics.push(StepDiagnostics {
            step: r + 1,
            t: t_next,
            residual: solved.residual,
            iterations: solved.iterations,
        });
        let sum = cumulative.last().expect("seeded with zero") + &solved.solution;
        cumulative.push(sum);
        coefficients.push(solved.solution.clone());
        state = advance(state, solved.solution, predicted, problem, &disc, dt);
        state.t = t_next;
        if predicted.is_some() {
            last_control = predicted;
        }
        times.push(t_next);
        controls.push(predicted);
        snapshots.push(state.field.clone());
        boundary.push(state.boundary);
    }

    Ok(SolveOutput {
        basis: cfg.basis,
        dt: cfg.dt,
        times,
        controls,
        snapshots,
        boundary,
        coefficients,
        diagnostics,
        collocation: disc.points.clone(),
        discretization: disc,
        problem: problem.clone(),
        cumulative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::WaveletFamily;
    use crate::problem::{example_one, example_two};
    use std::sync::Arc;

    fn taylor44() -> BasisSpec {
        BasisSpec::new(WaveletFamily::Taylor, 4, 4).unwrap()
    }

    #[test]
    fn init_state_example_one() {
        let (p, _) = example_one();
        let disc = Discretization::new(taylor44(), p.x_in);
        let s = init_state(&p, &disc);
        assert_eq!(s.interior.y, 0.5);
        assert_eq!(s.interior.y_x, 1.0);
        assert_eq!(s.interior.y_xx, 0.0);
        assert!((s.control.unwrap() - 1.0).abs() < 1e-15);
        assert!(s.prev_coefficients.is_none());
    }

    #[test]
    fn init_state_example_two_has_no_control() {
        let (p, _) = example_two();
        let disc = Discretization::new(taylor44(), p.x_in);
        let s = init_state(&p, &disc);
        assert!(s.field.y.iter().all(|&v| v == 0.0));
        assert!(s.control.is_none());
        assert!(s.prev_coefficients.is_none());
    }

    #[test]
    fn first_prediction_without_corrections() {
        let (p, _) = example_one();
        let disc = Discretization::new(taylor44(), p.x_in);
        let s = init_state(&p, &disc);
        let dt = 1e-3;
        let x = predict_control(&s, &p, &disc, dt, ControlBootstrap::ZeroCorrection).unwrap();
        // hand evaluation: 5 + t^2 - 4 e^{-t}
        let expect = 5.0 + dt * dt - 4.0 * (-dt).exp();
        assert!((x - expect).abs() < 1e-12, "{x} vs {expect}");
        assert!((x - 1.0040).abs() < 1e-4);
    }

    #[test]
    fn first_prediction_with_boundary_rate() {
        let (p, _) = example_one();
        let disc = Discretization::new(taylor44(), p.x_in);
        let s = init_state(&p, &disc);
        let dt = 1e-3;
        let x = predict_control(&s, &p, &disc, dt, ControlBootstrap::BoundaryRate).unwrap();
        // 5 + t^2 - 4 (1 + dt) e^{-t}
        let expect = 5.0 + dt * dt - 4.0 * (1.0 + dt) * (-dt).exp();
        assert!((x - expect).abs() < 1e-12);
        assert!((x - (1.0 + dt * dt)).abs() < 3e-6);
    }

    #[test]
    fn zero_coefficients_reduce_to_lagged_formula() {
        let (p, _) = example_one();
        let disc = Discretization::new(taylor44(), p.x_in);
        let mut s = init_state(&p, &disc);
        s.prev_coefficients = Some(DVector::zeros(disc.dim()));
        let with_zero =
            predict_control(&s, &p, &disc, 1e-2, ControlBootstrap::ZeroCorrection).unwrap();
        s.prev_coefficients = None;
        let boot = predict_control(&s, &p, &disc, 1e-2, ControlBootstrap::BoundaryRate).unwrap();
        assert!((with_zero - boot).abs() < 1e-14);
    }

    #[test]
    fn degenerate_interior_is_an_error() {
        let (mut p, _) = example_one();
        p.interior = Arc::new(|_| 0.0);
        let disc = Discretization::new(taylor44(), p.x_in);
        let s = init_state(&p, &disc);
        let err = predict_control(&s, &p, &disc, 0.1, ControlBootstrap::default()).unwrap_err();
        assert_eq!(err, SolverError::DegenerateInterior { t: 0.1 });
    }

    #[test]
    fn assemble_shapes() {
        let (p, _) = example_one();
        let disc = Discretization::new(taylor44(), p.x_in);
        let s = init_state(&p, &disc);
        let (m, b) = assemble(&s, 1.0, &p, &disc, 1e-3);
        assert_eq!(m.shape(), (32, 32));
        assert_eq!(b.len(), 32);
    }

    #[test]
    fn assemble_single_cell_by_hand() {
        let spec = BasisSpec::new(WaveletFamily::Taylor, 1, 1).unwrap();
        let (mut p, _) = example_one();
        p.diffusion = 1.0;
        p.advection = 0.0;
        let disc = Discretization::new(spec, p.x_in);
        let s = init_state(&p, &disc);
        let (m, _) = assemble(&s, 0.0, &p, &disc, 0.01);
        assert!((m[(0, 0)] + 0.135).abs() < 1e-15);
    }

    #[test]
    fn assemble_pure_shape_rows() {
        let spec = BasisSpec::new(WaveletFamily::ChebyshevFirstKind, 2, 3).unwrap();
        let (mut p, _) = example_one();
        p.diffusion = 0.0;
        p.advection = 0.0;
        let disc = Discretization::new(spec, p.x_in);
        let s = init_state(&p, &disc);
        let (m, _) = assemble(&s, 0.0, &p, &disc, 0.01);
        let s1 = spec.basis_vectors(1.0).second;
        for (l, &x) in disc.points.iter().enumerate() {
            let v = spec.basis_vectors(x);
            for j in 0..spec.dim() {
                assert_eq!(m[(l, j)], v.second[j] - x * s1[j]);
            }
        }
    }

    #[test]
    fn advance_preserves_boundary_values() {
        let (p, exact) = example_one();
        let disc = Discretization::new(taylor44(), p.x_in);
        let s = init_state(&p, &disc);
        let dt = 1e-2;
        let x = predict_control(&s, &p, &disc, dt, ControlBootstrap::default()).unwrap();
        let (m, b) = assemble(&s, x, &p, &disc, dt);
        let d = linalg::solve_lu(&m, &b).unwrap().solution;
        let next = advance(s, d, Some(x), &p, &disc, dt);
        assert!((next.boundary[0] - (p.left)(dt)).abs() < 1e-12);
        assert!((next.boundary[1] - (p.right)(dt)).abs() < 1e-12);
        let y = exact.field.unwrap();
        let worst = disc
            .points
            .iter()
            .zip(&next.field.y)
            .map(|(&xl, &yl)| (y(xl, dt) - yl).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "one-step error {worst}");
    }

    #[test]
    fn run_rejects_inconsistent_steps() {
        let (p, _) = example_one();
        let mut cfg = SolverConfig::new(taylor44(), 1.0, 10);
        cfg.dt = 0.3;
        assert!(matches!(run(&p, &cfg), Err(SolverError::Config(_))));
        assert!(SolverConfig::with_step(taylor44(), 1.0, 0.3).is_err());
        assert_eq!(
            SolverConfig::with_step(taylor44(), 1.0, 1e-3)
                .unwrap()
                .steps,
            1000
        );
    }

    #[test]
    fn field_at_matches_incremental_snapshots() {
        let (p, _) = example_one();
        let cfg = SolverConfig::new(taylor44(), 1.0, 50);
        let out = run(&p, &cfg).unwrap();
        for r in [1, 17, 50] {
            for (l, &x) in out.collocation.iter().enumerate() {
                let v = out.field_at(x, r);
                assert!((v.y - out.snapshots[r].y[l]).abs() < 1e-12);
                assert!((v.y_x - out.snapshots[r].y_x[l]).abs() < 1e-10);
                assert!((v.y_xx - out.snapshots[r].y_xx[l]).abs() < 1e-9);
            }
        }
        assert_eq!(out.step_at(0.5), Some(25));
        assert_eq!(out.step_at(0.51), None);
    }
}
