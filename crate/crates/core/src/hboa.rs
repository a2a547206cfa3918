//! A single fixed-size hBOA population.
//!
//! Each generation selects promising solutions by tournament, learns a
//! Bayesian network with local structures from them, samples offspring and
//! merges the offspring back with restricted tournament replacement (RTR).

use std::time::Instant;

use crate::bayesnet::learn_model;
use crate::error::{Error, Result};
use crate::population::{random_population, Genome, Population};
use crate::problem::{evaluate, reaches_optimum, EvalCounter, Problem};
use crate::random::RandomSource;
use crate::result::{FailureReason, RunResult};

/// How many generations a fixed-size run may execute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenerationCap {
    /// One generation per bit of the genome.
    GenomeLength,
    Fixed(usize),
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HboaConfig {
    pub tournament_size: usize,
    /// Fraction of the population size sampled as offspring per generation.
    pub offspring_fraction: f64,
    /// RTR window; `None` means `min(n, N / 20)`, at least 1.
    pub rtr_window: Option<usize>,
    pub max_generations: GenerationCap,
}

impl Default for HboaConfig {
    fn default() -> Self {
        HboaConfig {
            tournament_size: 2,
            offspring_fraction: 1.0,
            rtr_window: None,
            max_generations: GenerationCap::GenomeLength,
        }
    }
}

impl HboaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tournament_size < 2 {
            return Err(Error::invalid("tournament size must be at least 2"));
        }
        if !(self.offspring_fraction > 0.0 && self.offspring_fraction <= 1.0) {
            return Err(Error::invalid("offspring fraction must lie in (0, 1]"));
        }
        if self.rtr_window == Some(0) {
            return Err(Error::invalid("RTR window must be at least 1"));
        }
        Ok(())
    }

    pub fn window(&self, n: usize, pop_size: usize) -> usize {
        self.rtr_window
            .unwrap_or_else(|| n.min(pop_size / 20))
            .clamp(1, pop_size)
    }

    pub fn offspring_count(&self, pop_size: usize) -> usize {
        ((self.offspring_fraction * pop_size as f64).floor() as usize).max(1)
    }

    pub fn generation_limit(&self, n: usize) -> Option<usize> {
        match self.max_generations {
            GenerationCap::GenomeLength => Some(n),
            GenerationCap::Fixed(g) => Some(g),
            GenerationCap::Unbounded => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub average: f64,
    pub evaluations: u64,
}

/// `count` winners of independent `s`-ary tournaments. Contestants are
/// drawn uniformly with replacement; the first-drawn of the fittest wins.
pub fn select(pop: &Population, count: usize, s: usize, rng: &mut RandomSource) -> Result<Population> {
    if count == 0 {
        return Err(Error::invalid("selection count must be positive"));
    }
    if s == 0 {
        return Err(Error::invalid("tournament size must be positive"));
    }
    let fitness: Vec<f64> = pop
        .members()
        .iter()
        .map(Genome::fitness_or_err)
        .collect::<Result<_>>()?;
    let winners = (0..count)
        .map(|_| {
            let mut best = rng.below(pop.len());
            for _ in 1..s {
                let c = rng.below(pop.len());
                if fitness[c] > fitness[best] {
                    best = c;
                }
            }
            pop.get(best).clone()
        })
        .collect();
    Population::new(winners)
}

/// One RTR decision, kept for inspection.
#[derive(Clone, Debug, PartialEq)]
pub struct RtrDecision {
    /// Member indices drawn for the window, in draw order.
    pub window: Vec<usize>,
    /// Window member nearest to the offspring.
    pub closest: usize,
    pub replaced: bool,
}

/// Merges `offspring` into `pop` with restricted tournament replacement.
///
/// For each offspring in turn, `w` distinct members are drawn; the one at the
/// smallest Hamming distance (lowest index on ties) is replaced when the
/// offspring is strictly fitter.
pub fn rtr_incorporate(
    pop: &mut Population,
    offspring: Population,
    w: usize,
    rng: &mut RandomSource,
) -> Result<()> {
    rtr_incorporate_inner(pop, offspring, w, rng, None)
}

/// [`rtr_incorporate`] that also returns every decision made.
pub fn rtr_incorporate_logged(
    pop: &mut Population,
    offspring: Population,
    w: usize,
    rng: &mut RandomSource,
) -> Result<Vec<RtrDecision>> {
    let mut log = Vec::new();
    rtr_incorporate_inner(pop, offspring, w, rng, Some(&mut log))?;
    Ok(log)
}

fn rtr_incorporate_inner(
    pop: &mut Population,
    offspring: Population,
    w: usize,
    rng: &mut RandomSource,
    mut log: Option<&mut Vec<RtrDecision>>,
) -> Result<()> {
    if w == 0 || w > pop.len() {
        return Err(Error::invalid(format!(
            "RTR window {w} must lie in [1, {}]",
            pop.len()
        )));
    }
    if offspring.genome_len() != pop.genome_len() {
        return Err(Error::invalid("offspring and population differ in genome length"));
    }
    if !pop.is_evaluated() {
        return Err(Error::ContractViolation("population has not been evaluated".into()));
    }
    let mut order: Vec<usize> = (0..pop.len()).collect();
    for child in offspring.into_members() {
        let child_fitness = child.fitness_or_err()?;
        let window = rng.choose_front(&mut order, w);
        let members = pop.members_mut();
        let mut closest = window[0];
        let mut closest_dist = members[closest].bits.hamming(&child.bits);
        for &idx in &window[1..] {
            let d = members[idx].bits.hamming(&child.bits);
            if d < closest_dist || (d == closest_dist && idx < closest) {
                closest = idx;
                closest_dist = d;
            }
        }
        let replaced = child_fitness > members[closest].fitness_or_err()?;
        if let Some(log) = log.as_deref_mut() {
            log.push(RtrDecision {
                window: window.to_vec(),
                closest,
                replaced,
            });
        }
        if replaced {
            members[closest] = child;
        }
    }
    Ok(())
}

/// Runs one generation on `pop` in place; `generation` is the index the
/// finished generation will carry.
pub fn hboa_generation<P: Problem + ?Sized>(
    pop: &mut Population,
    generation: usize,
    cfg: &HboaConfig,
    problem: &P,
    rng: &mut RandomSource,
    counter: &mut EvalCounter,
) -> Result<GenerationStats> {
    let size = pop.len();
    let selected = select(pop, size, cfg.tournament_size, rng)?;
    let model = learn_model(&selected)?;
    let mut offspring = model.sample(cfg.offspring_count(size), rng)?;
    for child in offspring.members_mut() {
        evaluate(child, problem, counter)?;
    }
    rtr_incorporate(pop, offspring, cfg.window(problem.len(), size), rng)?;
    Ok(GenerationStats {
        generation,
        best: pop.best_fitness().unwrap_or(f64::NEG_INFINITY),
        average: pop.average_fitness().unwrap_or(f64::NEG_INFINITY),
        evaluations: counter.evaluations,
    })
}

/// Random initial population of `size`, evaluated.
pub fn initial_population<P: Problem + ?Sized>(
    problem: &P,
    size: usize,
    rng: &mut RandomSource,
    counter: &mut EvalCounter,
) -> Result<Population> {
    let mut pop = random_population(problem.len(), size, rng)?;
    for g in pop.members_mut() {
        evaluate(g, problem, counter)?;
    }
    Ok(pop)
}

/// Runs hBOA with population size `size` until the known optimum is found
/// or the generation cap is reached.
pub fn run_fixed<P: Problem + ?Sized>(
    problem: &P,
    size: usize,
    cfg: &HboaConfig,
    seed: u64,
) -> Result<RunResult> {
    cfg.validate()?;
    if size < 2 {
        return Err(Error::invalid("population size must be at least 2"));
    }
    let limit = cfg.generation_limit(problem.len());
    if problem.known_optimum().is_none() && limit.is_none() {
        return Err(Error::invalid(
            "a run needs a known optimum or a generation cap to stop",
        ));
    }
    let start = Instant::now();
    let mut rng = RandomSource::new(seed);
    let mut counter = EvalCounter::default();
    let mut pop = initial_population(problem, size, &mut rng, &mut counter)?;
    let mut generation = 0usize;
    loop {
        let best = pop.best().expect("evaluated population").clone();
        let best_fitness = best.fitness.expect("evaluated");
        let solved = reaches_optimum(problem, best_fitness);
        let capped = limit.is_some_and(|l| generation >= l);
        if solved || capped {
            return Ok(RunResult {
                success: solved,
                failure: (!solved).then_some(FailureReason::GenerationCap),
                evaluations: counter.evaluations,
                flips: counter.flips,
                best_fitness,
                best: best.bits,
                generations: generation as u64,
                largest_population: None,
                seed,
                wall_time: start.elapsed().as_secs_f64(),
            });
        }
        generation += 1;
        hboa_generation(&mut pop, generation, cfg, problem, &mut rng, &mut counter)?;
    }
}
