//! Generalized polynomial complementarity problems over closed convex cones.
//!
//! The crate evaluates polynomial maps defined by tensor tuples, solves
//! instances over the nonnegative orthant by semismooth Newton and homotopy
//! continuation, classifies structured tensor pairs by counterexample search,
//! and empirically probes residual-based error bounds on concrete instances.
//!
//! The `gpcp` binary exposes the same functionality behind `solve`,
//! `residual`, `classify`, `errorbound`, and `demo` subcommands.

pub mod classify;
pub mod cli;
pub mod cone;
pub mod error;
pub mod errorbound;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod polymap;
pub mod problem;
pub mod solver;
pub mod tensor;

pub use cone::{Cone, DEFAULT_MEMBERSHIP_TOL};
pub use error::{GpcpError, Result};
pub use polymap::{PolyMap, TensorTuple};
pub use problem::{GpcpProblem, SolutionCheck, SolutionSetEstimate};
pub use tensor::DenseTensor;
