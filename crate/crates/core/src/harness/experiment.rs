use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hboa::{run_fixed, HboaConfig};
use crate::parameterless::{run_parameterless, ParameterlessConfig, StepRecord, DEFAULT_BUDGET};
use crate::problem::Problem;
use crate::problems::{Dec3, HTrap, Hybrid, OneMax, SpinGlass, SpinGlassInstance};
use crate::result::RunResult;

use super::bisect::{bisect_population_size, BisectionConfig};
use super::oracle::{brute_force_ground_state, ORACLE_MAX_SPINS};
use super::seeds::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    OneMax,
    Dec3,
    HTrap,
    SpinGlass,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::OneMax => "onemax",
            Family::Dec3 => "dec3",
            Family::HTrap => "htrap",
            Family::SpinGlass => "spinglass",
        }
    }

    /// Spin glasses are combined with local search unless told otherwise.
    pub fn default_local_search(self) -> bool {
        self == Family::SpinGlass
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onemax" => Ok(Family::OneMax),
            "dec3" => Ok(Family::Dec3),
            "htrap" => Ok(Family::HTrap),
            "spinglass" => Ok(Family::SpinGlass),
            other => Err(Error::invalid(format!("unknown problem {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Parameterless,
    FixedBisected,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Parameterless => "pl",
            Mode::FixedBisected => "fixed-bisected",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pl" => Ok(Mode::Parameterless),
            "fixed-bisected" => Ok(Mode::FixedBisected),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

/// Side length of a square grid with `n` cells.
pub(crate) fn grid_side(n: usize) -> Result<usize> {
    let side = (n as f64).sqrt().round() as usize;
    if side * side != n || side < 3 {
        return Err(Error::invalid(format!(
            "spin-glass size must be a square of a side of at least 3, got {n}"
        )));
    }
    Ok(side)
}

/// Builds a non-spin-glass benchmark of size `n`.
pub fn make_problem(family: Family, n: usize, local_search: bool) -> Result<Box<dyn Problem>> {
    fn wrap<P: Problem + 'static>(p: P, ls: bool) -> Box<dyn Problem> {
        if ls {
            Box::new(Hybrid::new(p))
        } else {
            Box::new(p)
        }
    }
    match family {
        Family::OneMax if n > 0 => Ok(wrap(OneMax { n }, local_search)),
        Family::OneMax => Err(Error::invalid("onemax size must be positive")),
        Family::Dec3 => Ok(wrap(Dec3::new(n)?, local_search)),
        Family::HTrap => Ok(wrap(HTrap::new(n)?, local_search)),
        Family::SpinGlass => Err(Error::invalid("spin glasses are built from instances")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub runs: usize,
    pub mode: Mode,
    pub master_seed: u64,
    pub budget: u64,
    /// Overrides the family's default local-search setting.
    pub local_search: Option<bool>,
    /// Best-known ground energies for spin glasses too large for the oracle.
    pub best_known_dir: Option<PathBuf>,
    /// Budget of the run that seeds a missing best-known energy.
    pub bootstrap_budget: u64,
    pub bisection_runs: usize,
    pub ceiling: usize,
    pub hboa: HboaConfig,
}

impl ExperimentConfig {
    pub fn new(family: Family, sizes: Vec<usize>, mode: Mode, master_seed: u64) -> Self {
        ExperimentConfig {
            family,
            sizes,
            runs: 100,
            mode,
            master_seed,
            budget: DEFAULT_BUDGET,
            local_search: None,
            best_known_dir: None,
            bootstrap_budget: 1_000_000,
            bisection_runs: 30,
            ceiling: 1 << 22,
            hboa: HboaConfig::default(),
        }
    }

    fn local_search(&self) -> bool {
        self.local_search.unwrap_or(self.family.default_local_search())
    }

    /// Scheduler settings used by parameter-less runs.
    pub fn parameterless(&self) -> ParameterlessConfig {
        ParameterlessConfig {
            budget: self.budget,
            hboa: self.hboa.clone(),
            ..ParameterlessConfig::default()
        }
    }

    fn bisection(&self, stream_size: usize) -> BisectionConfig {
        BisectionConfig {
            runs: self.bisection_runs,
            ceiling: self.ceiling,
            master_seed: derive_seed(self.master_seed, "bisection", stream_size, 0),
            ..BisectionConfig::default()
        }
    }

    /// Seed of run `run` at size `n`; replays that run bit for bit.
    pub fn run_seed(&self, n: usize, run: usize) -> u64 {
        derive_seed(self.master_seed, &format!("{}/{}/run", self.family, self.mode), n, run as u64)
    }

    /// Seed of the `run`-th random spin-glass instance of `n` spins.
    pub fn instance_seed(&self, n: usize, run: usize) -> u64 {
        derive_seed(self.master_seed, "spinglass/instance", n, run as u64)
    }
}

/// Summary of one (problem, size, mode) sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub problem: String,
    pub n: usize,
    pub mode: Mode,
    pub runs: usize,
    pub successes: usize,
    /// Mean evaluations over successful runs; NaN without successes.
    pub mean_evals: f64,
    /// Sample standard deviation over successful runs.
    pub std_evals: f64,
    pub nmin: Option<usize>,
    pub master_seed: u64,
}

impl ExperimentRecord {
    fn from_runs(cfg: &ExperimentConfig, n: usize, results: &[RunResult], nmin: Option<usize>) -> Self {
        let evals: Vec<f64> = results
            .iter()
            .filter(|r| r.success)
            .map(|r| r.evaluations as f64)
            .collect();
        let (mean, std) = mean_std(&evals);
        ExperimentRecord {
            problem: cfg.family.name().to_string(),
            n,
            mode: cfg.mode,
            runs: results.len(),
            successes: evals.len(),
            mean_evals: mean,
            std_evals: std,
            nmin,
            master_seed: cfg.master_seed,
        }
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

/// Runs every configured size and returns one record per size.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    if cfg.runs == 0 {
        return Err(Error::invalid("runs must be positive"));
    }
    if cfg.sizes.is_empty() {
        return Err(Error::invalid("no problem sizes given"));
    }
    // Validate every size before spending time on any of them.
    for &n in &cfg.sizes {
        match cfg.family {
            Family::SpinGlass => {
                let side = grid_side(n)?;
                if n > ORACLE_MAX_SPINS && cfg.best_known_dir.is_none() {
                    return Err(Error::Configuration(format!(
                        "{side}x{side} spin glasses are too large for the exhaustive oracle; \
                         a best-known energy directory is required"
                    )));
                }
            }
            family => {
                make_problem(family, n, false)?;
            }
        }
    }
    cfg.sizes
        .iter()
        .map(|&n| match cfg.family {
            Family::SpinGlass => spin_glass_point(cfg, n),
            family => benchmark_point(cfg, &*make_problem(family, n, cfg.local_search())?, n),
        })
        .collect()
}

fn benchmark_point(cfg: &ExperimentConfig, problem: &dyn Problem, n: usize) -> Result<ExperimentRecord> {
    match cfg.mode {
        Mode::Parameterless => {
            let pl = cfg.parameterless();
            let results = (0..cfg.runs)
                .into_par_iter()
                .map(|r| run_parameterless(problem, &pl, cfg.run_seed(n, r)))
                .collect::<Result<Vec<_>>>()?;
            Ok(ExperimentRecord::from_runs(cfg, n, &results, None))
        }
        Mode::FixedBisected => {
            let bisection = bisect_population_size(problem, &cfg.hboa, &cfg.bisection(n))?;
            let results = (0..cfg.runs)
                .into_par_iter()
                .map(|r| run_fixed(problem, bisection.n_min, &cfg.hboa, cfg.run_seed(n, r)))
                .collect::<Result<Vec<_>>>()?;
            Ok(ExperimentRecord::from_runs(cfg, n, &results, Some(bisection.n_min)))
        }
    }
}

fn best_known_path(dir: &Path, instance: &SpinGlassInstance) -> PathBuf {
    dir.join(format!("L{}-{}.energy", instance.side(), instance.seed()))
}

fn read_best_known(path: &Path) -> Result<Option<i64>> {
    match fs::read_to_string(path) {
        Ok(text) => text
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Parse { line: 1, message: format!("bad energy in {}", path.display()) }),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Ground energy used as the success target for one instance.
fn ground_truth(cfg: &ExperimentConfig, instance: &SpinGlassInstance, local_search: bool) -> Result<i64> {
    if instance.spins() <= ORACLE_MAX_SPINS {
        return Ok(brute_force_ground_state(instance)?.0);
    }
    let dir = cfg
        .best_known_dir
        .as_deref()
        .ok_or_else(|| Error::Configuration("missing best-known energy directory".into()))?;
    let path = best_known_path(dir, instance);
    if let Some(e) = read_best_known(&path)? {
        return Ok(e);
    }
    // No record yet: run without a target and keep the best energy seen.
    let problem = spin_glass_problem(instance.clone(), None, local_search);
    let pl = ParameterlessConfig {
        budget: cfg.bootstrap_budget,
        hboa: cfg.hboa.clone(),
        ..ParameterlessConfig::default()
    };
    let res = run_parameterless(&*problem, &pl, derive_seed(cfg.master_seed, "spinglass/bootstrap", 0, instance.seed()))?;
    let energy = -(res.best_fitness.round() as i64);
    fs::create_dir_all(dir)?;
    fs::write(&path, format!("{energy}\n"))?;
    Ok(energy)
}

fn spin_glass_problem(instance: SpinGlassInstance, ground: Option<i64>, local_search: bool) -> Box<dyn Problem> {
    let mut p = SpinGlass::new(instance);
    if let Some(e) = ground {
        p = p.with_ground_energy(e);
    }
    if local_search {
        Box::new(Hybrid::new(p))
    } else {
        Box::new(p)
    }
}

fn spin_glass_point(cfg: &ExperimentConfig, n: usize) -> Result<ExperimentRecord> {
    let side = grid_side(n)?;
    let ls = cfg.local_search();
    let outcomes = (0..cfg.runs)
        .into_par_iter()
        .map(|r| -> Result<(RunResult, Option<usize>)> {
            let instance = SpinGlassInstance::random(side, cfg.instance_seed(n, r))?;
            let ground = ground_truth(cfg, &instance, ls)?;
            let problem = spin_glass_problem(instance.clone(), Some(ground), ls);
            let (result, nmin) = match cfg.mode {
                Mode::Parameterless => (run_parameterless(&*problem, &cfg.parameterless(), cfg.run_seed(n, r))?, None),
                Mode::FixedBisected => {
                    let b = bisect_population_size(&*problem, &cfg.hboa, &cfg.bisection(instance.seed() as usize))?;
                    (run_fixed(&*problem, b.n_min, &cfg.hboa, cfg.run_seed(n, r))?, Some(b.n_min))
                }
            };
            if n > ORACLE_MAX_SPINS {
                let found = -(result.best_fitness.round() as i64);
                if found < ground {
                    if let Some(dir) = &cfg.best_known_dir {
                        fs::write(best_known_path(dir, &instance), format!("{found}\n"))?;
                    }
                }
            }
            Ok((result, nmin))
        })
        .collect::<Result<Vec<_>>>()?;
    let nmins: Vec<usize> = outcomes.iter().filter_map(|o| o.1).collect();
    let nmin = (!nmins.is_empty())
        .then(|| (nmins.iter().sum::<usize>() as f64 / nmins.len() as f64).round() as usize);
    let results: Vec<RunResult> = outcomes.into_iter().map(|o| o.0).collect();
    Ok(ExperimentRecord::from_runs(cfg, n, &results, nmin))
}

/// `x` rounded to 6 significant digits, printed in its shortest form.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

const CSV_HEADER: [&str; 9] = [
    "problem", "n", "mode", "runs", "successes", "mean_evals", "std_evals", "nmin", "master_seed",
];

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.problem.clone(),
            r.n.to_string(),
            r.mode.to_string(),
            r.runs.to_string(),
            r.successes.to_string(),
            format_sig6(r.mean_evals),
            format_sig6(r.std_evals),
            r.nmin.map(|v| v.to_string()).unwrap_or_default(),
            r.master_seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse { line: 1, message: "unexpected CSV header".into() });
    }
    let mut records = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |field: &str| Error::Parse { line, message: format!("bad {field}") };
        let int = |k: usize, name: &str| row[k].parse::<usize>().map_err(|_| bad(name));
        let real = |k: usize, name: &str| row[k].parse::<f64>().map_err(|_| bad(name));
        records.push(ExperimentRecord {
            problem: row[0].to_string(),
            n: int(1, "n")?,
            mode: row[2].parse()?,
            runs: int(3, "runs")?,
            successes: int(4, "successes")?,
            mean_evals: real(5, "mean_evals")?,
            std_evals: real(6, "std_evals")?,
            nmin: if row[7].is_empty() { None } else { Some(int(7, "nmin")?) },
            master_seed: row[8].parse().map_err(|_| bad("master_seed"))?,
        });
    }
    Ok(records)
}

/// Writes per-step scheduler records as CSV.
pub fn write_trace<W: Write>(steps: &[StepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "index", "size", "generation", "best", "average", "evaluations"])?;
    for s in steps {
        w.write_record([
            s.step.to_string(),
            s.index.to_string(),
            s.size.to_string(),
            s.generation.to_string(),
            s.best.to_string(),
            s.average.to_string(),
            s.evaluations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
