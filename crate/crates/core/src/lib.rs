//! Parameter-less hierarchical Bayesian optimization algorithm (hBOA).
//!
//! The crate is organised bottom-up:
//!
//! - [`bits`], [`population`], [`random`] and [`problem`] hold the shared
//!   data types: packed bitstrings, genomes, populations, a seedable random
//!   source and the black-box problem interface.
//! - [`bayesnet`] learns Bayesian networks with decision-tree local
//!   structures from selected solutions and samples new ones from them.
//! - [`hboa`] is a single fixed-size hBOA population: tournament selection,
//!   model building, sampling and restricted tournament replacement.
//! - [`parameterless`] simulates the unbounded, doubling collection of hBOA
//!   populations, removing the population-size parameter.
//! - [`problems`] contains the benchmark functions (order-3 deceptive,
//!   hierarchical trap, 2D ±J spin glass) and the best-improvement local
//!   searcher.
//! - [`harness`] runs experiments: bisection for minimal population sizes,
//!   scaling sweeps, exhaustive spin-glass ground states and CSV output.

pub mod bayesnet;
pub mod bits;
pub mod error;
pub mod harness;
pub mod hboa;
pub mod parameterless;
pub mod population;
pub mod problem;
pub mod problems;
pub mod random;
pub mod result;

pub use bits::BitString;
pub use error::{Error, Result};
pub use population::{random_population, Genome, Population};
pub use problem::{evaluate, EvalCounter, Problem};
pub use random::RandomSource;
pub use result::{FailureReason, RunResult};

/// Absolute tolerance used when comparing a fitness against a known optimum.
pub const OPTIMUM_TOLERANCE: f64 = 1e-9;
