//! Nonlinear entanglement witnesses.
//!
//! Builds nonlinear witnesses from linear ones and evaluates them on
//! bipartite density matrices. The crate carries its own dense complex
//! kernels (`linalg`), a zoo of state families (`states`), linear witnesses
//! and their sampling certification (`witness`), the nonlinear evaluators
//! (`nlew`), maximization of `Tr(W^2 rho)` over separable states (`sepmax`),
//! local-observable decompositions (`decompose`), seeded property batteries
//! (`properties`) and the batch sweep driver behind the `nlew` binary
//! (`scan`).

pub mod decompose;
pub mod error;
pub mod linalg;
pub mod nlew;
pub mod properties;
pub mod scan;
pub mod sepmax;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
