//! Parameter-less population sizing.
//!
//! An unbounded sequence of hBOA populations `P_0, P_1, ...` is simulated,
//! where `P_i` has `N_0 * 2^i` members. One generation of `P_i` runs after
//! every `k` generations of `P_{i-1}`; populations are created lazily the
//! first time the schedule reaches them. With `k = 2` every population
//! consumes evaluations at the same rate.
//!
//! A population stops when all its members are identical, when a larger
//! population has a strictly higher average fitness, or when it has run as
//! many generations as the genome has bits. Terminated populations are
//! skipped: "restart from the smallest population" means the smallest
//! active one, and "advance" means the next larger active or not yet created
//! population.

use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::hboa::{hboa_generation, initial_population, HboaConfig};
use crate::population::{Genome, Population};
use crate::problem::{reaches_optimum, EvalCounter, Problem};
use crate::random::RandomSource;
use crate::result::{FailureReason, RunResult};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    Dominated,
    GenerationCap,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::Dominated => "dominated",
            Termination::GenerationCap => "generation-cap",
        })
    }
}

/// Which termination rules are in force.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TerminationRules {
    pub converged: bool,
    pub dominated: bool,
    pub generation_cap: bool,
}

impl TerminationRules {
    pub const ALL: TerminationRules = TerminationRules {
        converged: true,
        dominated: true,
        generation_cap: true,
    };
    pub const NONE: TerminationRules = TerminationRules {
        converged: false,
        dominated: false,
        generation_cap: false,
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterlessConfig {
    pub base_size: usize,
    /// Generations of `P_{i-1}` per generation of `P_i`.
    pub k: usize,
    pub budget: u64,
    pub rules: TerminationRules,
    pub hboa: HboaConfig,
}

impl Default for ParameterlessConfig {
    fn default() -> Self {
        ParameterlessConfig {
            base_size: 10,
            k: 2,
            budget: DEFAULT_BUDGET,
            rules: TerminationRules::ALL,
            hboa: HboaConfig::default(),
        }
    }
}

impl ParameterlessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid("k must be at least 2"));
        }
        if self.base_size < 2 {
            return Err(Error::invalid("base population size must be at least 2"));
        }
        if self.budget < self.base_size as u64 {
            return Err(Error::invalid(format!(
                "budget {} is smaller than the base population size {}",
                self.budget, self.base_size
            )));
        }
        self.hboa.validate()
    }

    /// `N_i = N_0 * 2^i`.
    pub fn population_size(&self, index: usize) -> usize {
        self.base_size << index
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryStatus {
    Active,
    Terminated(Termination),
}

#[derive(Clone, Debug)]
pub struct PopulationEntry {
    pub population: Population,
    pub generation: usize,
    pub status: EntryStatus,
    /// Evaluations spent on offspring of this population.
    pub evaluations: u64,
    /// Evaluations spent on the random initial population.
    pub initial_evaluations: u64,
    pub average: f64,
}

impl PopulationEntry {
    pub fn is_active(&self) -> bool {
        self.status == EntryStatus::Active
    }
}

/// One executed schedule step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub index: usize,
    pub size: usize,
    pub generation: usize,
    pub best: f64,
    pub average: f64,
    /// Cumulative evaluations over all populations.
    pub evaluations: u64,
}

/// A `dominated` verdict together with the averages that justified it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominanceVerdict {
    pub victim: usize,
    pub by: usize,
    pub victim_average: f64,
    pub by_average: f64,
}

/// The collection of populations and the schedule cursor.
pub struct Scheduler<'p, P: Problem + ?Sized> {
    problem: &'p P,
    cfg: ParameterlessConfig,
    rng: RandomSource,
    counter: EvalCounter,
    entries: Vec<PopulationEntry>,
    /// Index of the population that runs next; `None` once the budget cannot
    /// cover the next population to create.
    cursor: Option<usize>,
    steps: u64,
    best: Genome,
    verdicts: Vec<DominanceVerdict>,
}

impl<'p, P: Problem + ?Sized> Scheduler<'p, P> {
    /// Creates the schedule with `P_0` initialized and evaluated.
    pub fn new(problem: &'p P, cfg: ParameterlessConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut scheduler = Scheduler {
            problem,
            cfg,
            rng: RandomSource::new(seed),
            counter: EvalCounter::default(),
            entries: Vec::new(),
            cursor: Some(0),
            steps: 0,
            best: Genome::new(crate::BitString::zeros(problem.len())),
            verdicts: Vec::new(),
        };
        scheduler.create_entry()?;
        Ok(scheduler)
    }

    pub fn entries(&self) -> &[PopulationEntry] {
        &self.entries
    }

    pub fn cursor(&self) -> Option<usize> {
        self.cursor
    }

    pub fn counter(&self) -> EvalCounter {
        self.counter
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn best(&self) -> &Genome {
        &self.best
    }

    pub fn best_fitness(&self) -> f64 {
        self.best.fitness.unwrap_or(f64::NEG_INFINITY)
    }

    pub fn config(&self) -> &ParameterlessConfig {
        &self.cfg
    }

    /// Every `dominated` verdict issued so far.
    pub fn verdicts(&self) -> &[DominanceVerdict] {
        &self.verdicts
    }

    pub fn solved(&self) -> bool {
        reaches_optimum(self.problem, self.best_fitness())
    }

    fn create_entry(&mut self) -> Result<()> {
        let index = self.entries.len();
        let size = self.cfg.population_size(index);
        let before = self.counter.evaluations;
        let population = initial_population(self.problem, size, &mut self.rng, &mut self.counter)?;
        if let Some(g) = population.best().cloned() {
            self.note_genome(g);
        }
        let average = population.average_fitness().unwrap_or(f64::NEG_INFINITY);
        self.entries.push(PopulationEntry {
            population,
            generation: 0,
            status: EntryStatus::Active,
            evaluations: 0,
            initial_evaluations: self.counter.evaluations - before,
            average,
        });
        Ok(())
    }

    fn note_genome(&mut self, g: Genome) {
        if self.best.fitness.is_none() || g.fitness > self.best.fitness {
            self.best = g;
        }
    }

    /// Termination verdict for population `i`, if any rule fires.
    pub fn check_termination(&self, i: usize) -> Option<Termination> {
        let entry = &self.entries[i];
        let rules = self.cfg.rules;
        if rules.converged && entry.population.is_converged() {
            return Some(Termination::Converged);
        }
        if rules.dominated && self.dominator(i).is_some() {
            return Some(Termination::Dominated);
        }
        if rules.generation_cap && entry.generation >= self.problem.len() {
            return Some(Termination::GenerationCap);
        }
        None
    }

    /// First larger population with a strictly higher average fitness.
    fn dominator(&self, i: usize) -> Option<usize> {
        let avg = self.entries[i].average;
        (i + 1..self.entries.len()).find(|&j| self.entries[j].average > avg)
    }

    fn terminate(&mut self, i: usize, reason: Termination) {
        if reason == Termination::Dominated {
            let by = self.dominator(i).expect("dominated verdict needs a dominator");
            self.verdicts.push(DominanceVerdict {
                victim: i,
                by,
                victim_average: self.entries[i].average,
                by_average: self.entries[by].average,
            });
        }
        self.entries[i].status = EntryStatus::Terminated(reason);
    }

    /// Smallest index `>= from` that is active or not yet created.
    fn next_runnable(&self, from: usize) -> usize {
        (from..self.entries.len())
            .find(|&j| self.entries[j].is_active())
            .unwrap_or(self.entries.len())
    }

    /// Runs one generation of the population under the cursor, applies the
    /// termination rules and moves the cursor. Returns what was executed.
    pub fn step(&mut self) -> Result<StepRecord> {
        let index = self
            .cursor
            .ok_or_else(|| Error::invalid("no population left to run within the budget"))?;
        let size = self.entries[index].population.len();
        let generation = self.entries[index].generation + 1;
        let before = self.counter.evaluations;
        let stats = hboa_generation(
            &mut self.entries[index].population,
            generation,
            &self.cfg.hboa,
            self.problem,
            &mut self.rng,
            &mut self.counter,
        )?;
        self.steps += 1;
        {
            let entry = &mut self.entries[index];
            entry.generation = generation;
            entry.evaluations += self.counter.evaluations - before;
            entry.average = stats.average;
        }
        if let Some(g) = self.entries[index].population.best().cloned() {
            self.note_genome(g);
        }

        if let Some(reason) = self.check_termination(index) {
            self.terminate(index, reason);
        }
        if self.cfg.rules.dominated {
            for i in 0..index {
                if self.entries[i].is_active() && self.dominator(i).is_some() {
                    self.terminate(i, Termination::Dominated);
                }
            }
        }

        let target = if generation % self.cfg.k == 0 {
            self.next_runnable(index + 1)
        } else {
            self.next_runnable(0)
        };
        self.cursor = Some(target);
        if target == self.entries.len() {
            let size = self.cfg.population_size(target) as u64;
            if self.counter.evaluations + size > self.cfg.budget {
                self.cursor = None;
            } else {
                self.create_entry()?;
            }
        }

        Ok(StepRecord {
            step: self.steps,
            index,
            size,
            generation,
            best: stats.best,
            average: stats.average,
            evaluations: self.counter.evaluations,
        })
    }

    fn result(&self, failure: Option<FailureReason>, seed: u64, start: Instant) -> RunResult {
        RunResult {
            success: failure.is_none(),
            failure,
            evaluations: self.counter.evaluations,
            flips: self.counter.flips,
            best_fitness: self.best_fitness(),
            best: self.best.bits.clone(),
            generations: self.steps,
            largest_population: Some(self.entries.len() - 1),
            seed,
            wall_time: start.elapsed().as_secs_f64(),
        }
    }
}

/// Runs parameter-less hBOA until a population holds the known optimum or
/// the evaluation budget is exceeded.
pub fn run_parameterless<P: Problem + ?Sized>(
    problem: &P,
    cfg: &ParameterlessConfig,
    seed: u64,
) -> Result<RunResult> {
    run_parameterless_traced(problem, cfg, seed, |_| {})
}

/// [`run_parameterless`] calling `trace` after every schedule step.
pub fn run_parameterless_traced<P: Problem + ?Sized, F: FnMut(&StepRecord)>(
    problem: &P,
    cfg: &ParameterlessConfig,
    seed: u64,
    mut trace: F,
) -> Result<RunResult> {
    let start = Instant::now();
    let mut scheduler = Scheduler::new(problem, cfg.clone(), seed)?;
    loop {
        if scheduler.solved() {
            return Ok(scheduler.result(None, seed, start));
        }
        if scheduler.counter.evaluations > cfg.budget {
            return Ok(scheduler.result(Some(FailureReason::Budget), seed, start));
        }
        if scheduler.cursor.is_none() {
            let reason = if scheduler.entries.iter().any(PopulationEntry::is_active) {
                FailureReason::Budget
            } else {
                FailureReason::Exhausted
            };
            return Ok(scheduler.result(Some(reason), seed, start));
        }
        let record = scheduler.step()?;
        trace(&record);
    }
}
