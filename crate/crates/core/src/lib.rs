//! Constant-factor approximation of discrete partition functions.
//!
//! The estimator hashes the configuration space with random parity
//! constraints `A x = b (mod 2)` and asks a constrained MAP solver for the
//! heaviest surviving configuration at every constraint count. Medians of
//! those maxima approximate the weight quantiles, which in turn bound the
//! total weight within a factor of 16 with high probability.
//!
//! Modules:
//! - [`model`]: factor graphs, the UAI reader/writer, binarization, power
//!   models and random Ising generators.
//! - [`parity`]: random parity systems, GF(2) elimination and propagation.
//! - [`solver`]: depth-first branch and bound under parity constraints, and
//!   an enumeration reference.
//! - [`wish`]: the estimator driver, tail estimates and refinement.
//! - [`oracle`]: exact enumeration of `Z`, quantiles and tail counts.
//! - [`cli`]: command implementations and the JSON run report.

pub mod bits;
pub mod cli;
pub mod error;
pub mod logspace;
pub mod model;
pub mod oracle;
pub mod parity;
pub mod solver;
pub mod wish;

pub use bits::Bits;
pub use error::{Error, Result};
pub use model::{BinaryModel, Factor, FactorGraph};
pub use parity::{ParitySystem, ReducedParitySystem};
pub use solver::{Budget, MapResult, MapStatus};
pub use wish::{Guarantee, WishConfig, WishResult};
