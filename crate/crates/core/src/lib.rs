//! Wavelet collocation for the one-dimensional parabolic inverse problem of
//! recovering a time-dependent source coefficient from an interior trace.
//!
//! The unknown mixed derivative `Y_txx` is expanded in a Taylor or Chebyshev
//! wavelet basis on `[0, 1]`; integrating the expansion twice in `x` and once
//! in `t` gives a linear collocation system per time step.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod basis;
pub mod expr;
pub mod linalg;
pub mod problem;
pub mod quadrature;
pub mod solver;

pub use basis::{BasisSpec, WaveletFamily};
pub use problem::{ExactReference, InverseProblem};
pub use solver::{run, SolveOutput, SolverConfig};
