//! Black-box problem interface and evaluation accounting.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::population::Genome;

/// Running totals for one optimization run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalCounter {
    /// Completed fitness evaluations, one per candidate passed to [`evaluate`].
    pub evaluations: u64,
    /// Single-bit-flip probes made by a local searcher. Bookkeeping only.
    pub flips: u64,
}

/// A maximization problem over fixed-length bitstrings.
///
/// `fitness` must be deterministic and defined for every string of length
/// [`Problem::len`].
pub trait Problem: Send + Sync {
    /// Short identifier used in reports and seed derivation.
    fn id(&self) -> String;

    fn len(&self) -> usize;

    fn fitness(&self, bits: &BitString) -> f64;

    /// Best attainable fitness, when known.
    fn known_optimum(&self) -> Option<f64> {
        None
    }

    /// Fitness change caused by flipping bit `i` of `bits`, whose current
    /// fitness is `current`. Problems with cheap incremental updates override
    /// this.
    fn flip_gain(&self, bits: &mut BitString, current: f64, i: usize) -> f64 {
        bits.flip(i);
        let f = self.fitness(bits);
        bits.flip(i);
        f - current
    }

    /// Improves `bits` in place before evaluation and returns the resulting
    /// fitness; `None` when the problem has no repair step.
    fn repair(&self, _bits: &mut BitString, _counter: &mut EvalCounter) -> Option<f64> {
        None
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    fn id(&self) -> String {
        (**self).id()
    }
    fn len(&self) -> usize {
        (**self).len()
    }
    fn fitness(&self, bits: &BitString) -> f64 {
        (**self).fitness(bits)
    }
    fn known_optimum(&self) -> Option<f64> {
        (**self).known_optimum()
    }
    fn flip_gain(&self, bits: &mut BitString, current: f64, i: usize) -> f64 {
        (**self).flip_gain(bits, current, i)
    }
    fn repair(&self, bits: &mut BitString, counter: &mut EvalCounter) -> Option<f64> {
        (**self).repair(bits, counter)
    }
}

impl<P: Problem + ?Sized> Problem for Box<P> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn len(&self) -> usize {
        (**self).len()
    }
    fn fitness(&self, bits: &BitString) -> f64 {
        (**self).fitness(bits)
    }
    fn known_optimum(&self) -> Option<f64> {
        (**self).known_optimum()
    }
    fn flip_gain(&self, bits: &mut BitString, current: f64, i: usize) -> f64 {
        (**self).flip_gain(bits, current, i)
    }
    fn repair(&self, bits: &mut BitString, counter: &mut EvalCounter) -> Option<f64> {
        (**self).repair(bits, counter)
    }
}

/// Evaluates `genome` in place, applying the problem's repair step first.
///
/// A repaired genotype is written back into the genome. Exactly one
/// evaluation is counted regardless of how many probes the repair made.
pub fn evaluate<P: Problem + ?Sized>(
    genome: &mut Genome,
    problem: &P,
    counter: &mut EvalCounter,
) -> Result<()> {
    if genome.len() != problem.len() {
        return Err(Error::invalid(format!(
            "genome has {} bits, problem expects {}",
            genome.len(),
            problem.len()
        )));
    }
    let fitness = match problem.repair(&mut genome.bits, counter) {
        Some(f) => f,
        None => problem.fitness(&genome.bits),
    };
    genome.fitness = Some(fitness);
    counter.evaluations += 1;
    Ok(())
}

/// True when `fitness` reaches `problem`'s known optimum.
pub fn reaches_optimum<P: Problem + ?Sized>(problem: &P, fitness: f64) -> bool {
    problem
        .known_optimum()
        .is_some_and(|opt| fitness >= opt - crate::OPTIMUM_TOLERANCE)
}
