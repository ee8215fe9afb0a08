//! P1-conforming finite elements for quasi-linear second-order elliptic
//! Dirichlet problems, together with verifiers for discrete maximum
//! principles.
//!
//! The crate is organized in four layers:
//!
//! * [`mesh`]: simplicial meshes (triangles and tetrahedra), structured
//!   generators, JSON/VTK I/O and the angle geometry used by the acuteness
//!   conditions.
//! * [`p1`]: shape functions, quadrature, nodal fields, cut decomposition
//!   and discrete norms.
//! * [`solver`]: assembly of the quasi-linear form, Dirichlet elimination,
//!   sparse linear solvers and the frozen-coefficient Picard iteration.
//! * [`dmp`]: the maximum-principle checks and certificates.
//!
//! Per-cell work is data parallel. With the default `rayon` feature the
//! loops run on the rayon pool; without it (or with
//! [`Execution::Sequential`]) they run on the calling thread. Both paths
//! produce bit-identical results because every reduction is performed in
//! cell order after the parallel map.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dmp;
mod error;
pub mod mesh;
pub mod p1;
pub mod par;
pub mod solver;

pub use error::{Error, Result};
pub use par::Execution;
