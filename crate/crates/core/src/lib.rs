//! Lanczos tau solver for systems of linear and nonlinear integro-differential
//! equations with polynomial data.
//!
//! Every computation stays in an orthogonal polynomial basis (Chebyshev or
//! Legendre, shifted to the problem interval): evaluation runs the three-term
//! recurrence forward, the operational matrices for multiplication by `x`,
//! differentiation and integration are built from the recurrence coefficients
//! directly, and products of series use linearization coefficients. The
//! monomial basis is never used as an intermediate.
//!
//! The layers are:
//!
//! * [`basis`]: families, shifted series, evaluation, products.
//! * [`opalg`]: operational matrices and Volterra/Fredholm operators.
//! * [`problem`]: the problem model, JSON ingestion, Newton linearization.
//! * [`solver`]: tau system assembly, dense LU, Newton loop, residuals and
//!   convergence sweeps.
//! * [`solution`]: the `tauspec-solution/1` file format.
//! * [`builtin`]: reference problems with known closed-form solutions.

pub mod basis;
pub mod builtin;
mod error;
pub mod exec;
pub mod opalg;
pub mod problem;
pub mod solution;
pub mod solver;

pub use basis::{BasisSpec, Family, LinearizationTable, Recurrence, Series};
pub use error::{Result, TauError};
pub use exec::Execution;
pub use opalg::{KernelPoly, OperatorMatrix, Role};
pub use problem::{parse_problem, ProblemSpec};
pub use solver::{solve, TauSolution};
