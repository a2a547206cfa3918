//! Experiment engine: fixed-size and parameter-less runs, bisection for the
//! minimal reliable population size, scaling sweeps, the exhaustive
//! spin-glass oracle and CSV output.

mod bisect;
mod experiment;
mod fit;
mod oracle;
mod seeds;

pub use bisect::{bisect_population_size, Bisection, BisectionConfig, Probe};
pub use experiment::{
    format_sig6, make_problem, read_csv, run_experiment, write_csv, write_trace, ExperimentConfig,
    ExperimentRecord, Family, Mode,
};
pub use fit::{power_law_fit, record_exponent};
pub use oracle::{brute_force_ground_state, ORACLE_MAX_SPINS};
pub use seeds::derive_seed;

pub use crate::result::{FailureReason, RunResult};
