use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use plhboa::harness::{
    bisect_population_size, brute_force_ground_state, make_problem, record_exponent, run_experiment,
    write_csv, write_trace, BisectionConfig, ExperimentConfig, Family, Mode, ORACLE_MAX_SPINS,
};
use plhboa::hboa::{run_fixed, HboaConfig};
use plhboa::parameterless::{run_parameterless_traced, ParameterlessConfig, DEFAULT_BUDGET};
use plhboa::problems::{Hybrid, SpinGlass, SpinGlassInstance};
use plhboa::{Error, Problem, RandomSource, Result, RunResult};

#[derive(Parser)]
#[command(name = "plhboa", version, about = "Parameter-less hierarchical BOA and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Onemax,
    Dec3,
    Htrap,
    Spinglass,
}

impl From<ProblemArg> for Family {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Onemax => Family::OneMax,
            ProblemArg::Dec3 => Family::Dec3,
            ProblemArg::Htrap => Family::HTrap,
            ProblemArg::Spinglass => Family::SpinGlass,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RunMode {
    Pl,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMode {
    Pl,
    FixedBisected,
}

#[derive(Subcommand)]
enum Command {
    /// Run hBOA once, parameter-less or with a fixed population size.
    Run {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        /// Spin-glass instance file; a random instance is generated when absent.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "pl")]
        mode: RunMode,
        /// Population size for `--mode fixed`.
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Per-step CSV trace of the parameter-less schedule.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Force local search on (spin glasses use it by default).
        #[arg(long)]
        local_search: bool,
    },
    /// Find the minimal population size solving every one of `--runs` runs.
    Bisect {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Sweep problem sizes and write one CSV row per size.
    Experiment {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, value_enum, default_value = "pl")]
        mode: SweepMode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Directory of best-known spin-glass energies for sizes beyond the oracle.
        #[arg(long)]
        best_known_dir: Option<PathBuf>,
    },
    /// Generate random ±J spin-glass instance files.
    GenSpinglass {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Exact ground state of a small instance by enumeration.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
}

fn load_instance(path: Option<&PathBuf>, n: usize, seed: u64) -> Result<SpinGlassInstance> {
    let instance = match path {
        Some(p) => SpinGlassInstance::read(p)?,
        None => {
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                return Err(Error::InvalidArgument(format!("spin-glass size {n} is not a square")));
            }
            SpinGlassInstance::random(side, seed)?
        }
    };
    if instance.spins() != n {
        return Err(Error::InvalidArgument(format!(
            "instance has {} spins but --n is {n}",
            instance.spins()
        )));
    }
    Ok(instance)
}

fn build_problem(
    family: Family,
    n: usize,
    instance: Option<&PathBuf>,
    seed: u64,
    local_search: bool,
) -> Result<Box<dyn Problem>> {
    if family != Family::SpinGlass {
        return make_problem(family, n, local_search);
    }
    let instance = load_instance(instance, n, seed)?;
    let mut problem = SpinGlass::new(instance.clone());
    if instance.spins() <= ORACLE_MAX_SPINS {
        problem = problem.with_ground_energy(brute_force_ground_state(&instance)?.0);
    }
    Ok(Box::new(Hybrid::new(problem)))
}

fn print_result(r: &RunResult) {
    println!("success={}", r.success);
    if let Some(f) = r.failure {
        println!("failure={f}");
    }
    println!("evaluations={}", r.evaluations);
    println!("flips={}", r.flips);
    println!("best_fitness={}", r.best_fitness);
    println!("best={}", r.best);
    println!("generations={}", r.generations);
    if let Some(i) = r.largest_population {
        println!("largest_population={i}");
    }
    println!("seed={}", r.seed);
    println!("wall_time={:.3}", r.wall_time);
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            problem,
            n,
            instance,
            mode,
            pop,
            seed,
            budget,
            trace,
            local_search,
        } => {
            let family: Family = problem.into();
            let problem = build_problem(family, n, instance.as_ref(), seed, local_search)?;
            let result = match mode {
                RunMode::Pl => {
                    let cfg = ParameterlessConfig {
                        budget,
                        ..ParameterlessConfig::default()
                    };
                    let mut steps = Vec::new();
                    let r = run_parameterless_traced(&*problem, &cfg, seed, |s| {
                        if trace.is_some() {
                            steps.push(*s)
                        }
                    })?;
                    if let Some(path) = &trace {
                        write_trace(&steps, BufWriter::new(File::create(path)?))?;
                    }
                    r
                }
                RunMode::Fixed => {
                    let size = pop.ok_or_else(|| Error::InvalidArgument("--mode fixed needs --pop".into()))?;
                    run_fixed(&*problem, size, &HboaConfig::default(), seed)?
                }
            };
            print_result(&result);
        }
        Command::Bisect {
            problem,
            n,
            instance,
            runs,
            seed,
        } => {
            let family: Family = problem.into();
            let problem = build_problem(family, n, instance.as_ref(), seed, false)?;
            let cfg = BisectionConfig {
                runs,
                master_seed: seed,
                ..BisectionConfig::default()
            };
            let b = bisect_population_size(&*problem, &HboaConfig::default(), &cfg)?;
            let (lo, hi) = b.interval();
            println!("n_min={}", b.n_min);
            println!("interval={lo},{hi}");
            for p in &b.probes {
                println!("probe size={} passed={}", p.size, p.passed);
            }
        }
        Command::Experiment {
            problem,
            sizes,
            runs,
            mode,
            seed,
            out,
            budget,
            best_known_dir,
        } => {
            let mode = match mode {
                SweepMode::Pl => Mode::Parameterless,
                SweepMode::FixedBisected => Mode::FixedBisected,
            };
            let mut cfg = ExperimentConfig::new(problem.into(), sizes, mode, seed);
            cfg.runs = runs;
            cfg.budget = budget;
            cfg.best_known_dir = best_known_dir;
            let records = run_experiment(&cfg)?;
            write_csv(&records, BufWriter::new(File::create(&out)?))?;
            write_csv(&records, io::stdout())?;
            if let Ok(exponent) = record_exponent(&records) {
                println!("power_law_exponent={exponent:.4}");
            }
        }
        Command::GenSpinglass {
            l,
            count,
            seed,
            out_dir,
        } => {
            fs::create_dir_all(&out_dir)?;
            let mut master = RandomSource::new(seed);
            for i in 0..count {
                let instance = SpinGlassInstance::random(l, master.next_u64())?;
                let path = out_dir.join(format!("spinglass-L{l}-{i:03}.txt"));
                instance.write(&path)?;
                println!("{}", path.display());
            }
        }
        Command::Oracle { instance } => {
            let instance = SpinGlassInstance::read(&instance)?;
            let (energy, witness) = brute_force_ground_state(&instance)?;
            println!("energy={energy}");
            println!("witness={witness}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
