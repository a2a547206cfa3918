use crate::bits::BitString;
use crate::problem::{EvalCounter, Problem};

/// Deterministic best-improvement hill climber.
///
/// Each pass probes all single-bit flips and applies the one with the largest
/// strict improvement (lowest index on ties). Stops at a single-flip local
/// optimum and returns its fitness. Every probe is counted in
/// `counter.flips`.
pub fn local_search<P: Problem + ?Sized>(bits: &mut BitString, problem: &P, counter: &mut EvalCounter) -> f64 {
    climb(bits, problem, counter, |_| {})
}

/// [`local_search`] that also returns the applied flips in order.
pub fn local_search_trajectory<P: Problem + ?Sized>(
    bits: &mut BitString,
    problem: &P,
    counter: &mut EvalCounter,
) -> (f64, Vec<usize>) {
    let mut path = Vec::new();
    let f = climb(bits, problem, counter, |i| path.push(i));
    (f, path)
}

fn climb<P: Problem + ?Sized, F: FnMut(usize)>(
    bits: &mut BitString,
    problem: &P,
    counter: &mut EvalCounter,
    mut on_flip: F,
) -> f64 {
    let mut current = problem.fitness(bits);
    loop {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..bits.len() {
            let gain = problem.flip_gain(bits, current, i);
            counter.flips += 1;
            if gain > 0.0 && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, i));
            }
        }
        match best {
            Some((_, i)) => {
                bits.flip(i);
                on_flip(i);
                current = problem.fitness(bits);
            }
            None => return current,
        }
    }
}

/// Wraps a problem so that every candidate is locally optimized before it
/// is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct Hybrid<P> {
    inner: P,
}

impl<P: Problem> Hybrid<P> {
    pub fn new(inner: P) -> Self {
        Hybrid { inner }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Problem> Problem for Hybrid<P> {
    fn id(&self) -> String {
        self.inner.id()
    }

    fn len(&self) -> usize {
        self.inner.len()
    }

    fn fitness(&self, bits: &BitString) -> f64 {
        self.inner.fitness(bits)
    }

    fn known_optimum(&self) -> Option<f64> {
        self.inner.known_optimum()
    }

    fn flip_gain(&self, bits: &mut BitString, current: f64, i: usize) -> f64 {
        self.inner.flip_gain(bits, current, i)
    }

    fn repair(&self, bits: &mut BitString, counter: &mut EvalCounter) -> Option<f64> {
        Some(local_search(bits, &self.inner, counter))
    }
}
