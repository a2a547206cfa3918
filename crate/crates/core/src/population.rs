//! Genomes and populations.

use crate::bits::{word_count, BitString};
use crate::error::{Error, Result};
use crate::random::RandomSource;

/// A candidate solution: a bitstring plus its fitness once evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct Genome {
    pub bits: BitString,
    pub fitness: Option<f64>,
}

impl Genome {
    pub fn new(bits: BitString) -> Self {
        Genome {
            bits,
            fitness: None,
        }
    }

    pub fn with_fitness(bits: BitString, fitness: f64) -> Self {
        Genome {
            bits,
            fitness: Some(fitness),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub(crate) fn fitness_or_err(&self) -> Result<f64> {
        self.fitness
            .ok_or_else(|| Error::ContractViolation("genome has not been evaluated".into()))
    }
}

/// An ordered multiset of genomes of one common length.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    genome_len: usize,
    members: Vec<Genome>,
}

impl Population {
    /// Wraps `members`, rejecting empty input and mixed genome lengths.
    pub fn new(members: Vec<Genome>) -> Result<Self> {
        let genome_len = members
            .first()
            .ok_or_else(|| Error::invalid("population must not be empty"))?
            .len();
        if members.iter().any(|g| g.len() != genome_len) {
            return Err(Error::invalid("population members differ in length"));
        }
        Ok(Population {
            genome_len,
            members,
        })
    }

    pub fn from_bits<I: IntoIterator<Item = BitString>>(bits: I) -> Result<Self> {
        Population::new(bits.into_iter().map(Genome::new).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn genome_len(&self) -> usize {
        self.genome_len
    }

    pub fn members(&self) -> &[Genome] {
        &self.members
    }

    pub(crate) fn members_mut(&mut self) -> &mut [Genome] {
        &mut self.members
    }

    pub fn into_members(self) -> Vec<Genome> {
        self.members
    }

    pub fn get(&self, i: usize) -> &Genome {
        &self.members[i]
    }

    pub fn is_evaluated(&self) -> bool {
        self.members.iter().all(|g| g.fitness.is_some())
    }

    /// Member with the highest fitness (first one on ties), if evaluated.
    pub fn best(&self) -> Option<&Genome> {
        let mut best: Option<&Genome> = None;
        for g in &self.members {
            let f = g.fitness?;
            if best.is_none_or(|b| f > b.fitness.unwrap_or(f64::NEG_INFINITY)) {
                best = Some(g);
            }
        }
        best
    }

    pub fn best_fitness(&self) -> Option<f64> {
        self.best().and_then(|g| g.fitness)
    }

    pub fn average_fitness(&self) -> Option<f64> {
        let mut sum = 0.0;
        for g in &self.members {
            sum += g.fitness?;
        }
        Some(sum / self.members.len() as f64)
    }

    /// True when every member carries the same bitstring.
    pub fn is_converged(&self) -> bool {
        let first = &self.members[0].bits;
        self.members.iter().all(|g| &g.bits == first)
    }
}

/// `size` genomes of `n` independent uniform bits each, unevaluated.
pub fn random_population(n: usize, size: usize, rng: &mut RandomSource) -> Result<Population> {
    if n == 0 {
        return Err(Error::invalid("genome length must be at least 1"));
    }
    if size == 0 {
        return Err(Error::invalid("population size must be at least 1"));
    }
    let words = word_count(n);
    let members = (0..size)
        .map(|_| {
            let raw = (0..words).map(|_| rng.next_u64()).collect();
            Genome::new(BitString::from_words(n, raw))
        })
        .collect();
    Population::new(members)
}
