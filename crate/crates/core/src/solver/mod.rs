//! Assembly and solution of the quasi-linear Galerkin problem.

mod assemble;
mod coefficients;
mod dirichlet;
mod form;
mod linear;
mod picard;
mod sparse;
mod zeroth;

pub use assemble::{assemble_q, assemble_q_with, element_integrals, local_system, ElementIntegrals, LocalSystem};
pub use coefficients::{CMode, CoefficientCheck, CoefficientSet, ReactionFn, ScalarFn, SourceFn, VectorFn};
pub use dirichlet::{apply_dirichlet, interpolate_boundary, BoundaryValues};
pub use form::{q_apply, q_apply_with};
pub use linear::{linear_solve, linear_solve_from, LinearMethod, LinearSolution};
pub use picard::{picard_solve, SolveOptions, SolveResult, SolveSummary};
pub use sparse::{CsrMatrix, SparseSystem};
pub use zeroth::{check_zeroth_order_condition, ZerothOrderReport};
