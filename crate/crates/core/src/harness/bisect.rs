use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hboa::{run_fixed, HboaConfig};
use crate::problem::Problem;

use super::seeds::derive_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct BisectionConfig {
    /// Independent runs that must all succeed for a size to pass.
    pub runs: usize,
    pub base_size: usize,
    pub ceiling: usize,
    pub master_seed: u64,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            runs: 30,
            base_size: 10,
            ceiling: 1 << 22,
            master_seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub size: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bisection {
    /// Smallest size found to pass; equals `upper`.
    pub n_min: usize,
    /// Largest size found to fail; `None` when the base size passed.
    pub lower: Option<usize>,
    pub upper: usize,
    pub probes: Vec<Probe>,
}

impl Bisection {
    /// `(lower, upper)`, degenerate when no size failed.
    pub fn interval(&self) -> (usize, usize) {
        (self.lower.unwrap_or(self.upper), self.upper)
    }
}

/// Midpoint rounded to an even size, or the plain integer midpoint when
/// rounding would land on a bound.
fn midpoint(lo: usize, hi: usize) -> usize {
    let mid = lo + (hi - lo) / 2;
    let even = mid + (mid % 2);
    if even > lo && even < hi {
        even
    } else {
        mid
    }
}

fn passes<P: Problem + ?Sized>(
    problem: &P,
    hboa: &HboaConfig,
    cfg: &BisectionConfig,
    size: usize,
) -> Result<bool> {
    let stream = format!("{}/bisect", problem.id());
    let outcome = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|r| {
            run_fixed(problem, size, hboa, derive_seed(cfg.master_seed, &stream, size, r))
                .map(|res| res.success)
        })
        .find_any(|r| !matches!(r, Ok(true)));
    match outcome {
        None => Ok(true),
        Some(Ok(_)) => Ok(false),
        Some(Err(e)) => Err(e),
    }
}

/// Minimal population size at which `cfg.runs` fixed-size runs all reach
/// the optimum.
///
/// Doubles from the base size until a size passes, then bisects between the
/// last failing and the first passing size until the interval width is at
/// most 10% of its lower bound.
pub fn bisect_population_size<P: Problem + ?Sized>(
    problem: &P,
    hboa: &HboaConfig,
    cfg: &BisectionConfig,
) -> Result<Bisection> {
    if problem.known_optimum().is_none() {
        return Err(Error::invalid("bisection needs a problem with a known optimum"));
    }
    if cfg.runs == 0 {
        return Err(Error::invalid("bisection needs at least one run per size"));
    }
    if cfg.base_size < 2 {
        return Err(Error::invalid("base population size must be at least 2"));
    }
    let mut probes = Vec::new();
    let mut size = cfg.base_size;
    let mut lower = None;
    let upper = loop {
        if size > cfg.ceiling {
            return Err(Error::UnsolvableAtCeiling { ceiling: cfg.ceiling });
        }
        let passed = passes(problem, hboa, cfg, size)?;
        probes.push(Probe { size, passed });
        if passed {
            break size;
        }
        lower = Some(size);
        size *= 2;
    };
    let Some(mut lo) = lower else {
        return Ok(Bisection {
            n_min: upper,
            lower: None,
            upper,
            probes,
        });
    };
    let mut hi = upper;
    while (hi - lo) as f64 > 0.1 * lo as f64 {
        let mid = midpoint(lo, hi);
        let passed = passes(problem, hboa, cfg, mid)?;
        probes.push(Probe { size: mid, passed });
        if passed {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Bisection {
        n_min: hi,
        lower: Some(lo),
        upper: hi,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoints_stay_inside() {
        assert_eq!(midpoint(10, 20), 16);
        assert_eq!(midpoint(80, 160), 120);
        assert_eq!(midpoint(10, 12), 11);
        assert_eq!(midpoint(10, 11), 10);
        for lo in 10..60 {
            for hi in lo + 2..lo + 40 {
                let m = midpoint(lo, hi);
                assert!(m > lo && m < hi, "{lo} {hi} {m}");
            }
        }
    }
}
