use std::fmt;

use crate::bits::BitString;

/// Why a run stopped without reaching the optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureReason {
    /// A fixed-size run used up its generation cap.
    GenerationCap,
    /// The evaluation budget was exceeded.
    Budget,
    /// Every population terminated and no new one fits in the budget.
    Exhausted,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::GenerationCap => "generation-cap",
            FailureReason::Budget => "budget",
            FailureReason::Exhausted => "exhausted",
        })
    }
}

/// Outcome of one optimization run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub success: bool,
    pub failure: Option<FailureReason>,
    pub evaluations: u64,
    pub flips: u64,
    pub best_fitness: f64,
    pub best: BitString,
    /// Generations for fixed-size runs, schedule steps for parameter-less runs.
    pub generations: u64,
    /// Largest population index initialized (parameter-less runs only).
    pub largest_population: Option<usize>,
    pub seed: u64,
    /// Informational; not covered by determinism guarantees.
    pub wall_time: f64,
}

impl RunResult {
    /// Equality ignoring wall-clock time.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        RunResult {
            wall_time: 0.0,
            ..self.clone()
        } == RunResult {
            wall_time: 0.0,
            ..other.clone()
        }
    }
}
