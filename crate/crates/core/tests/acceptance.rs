//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run a subset with `cargo test --release --test acceptance -- 1 2 7`.

mod common;

use std::time::Instant;

use common::*;
use plhboa::harness::{
    bisect_population_size, brute_force_ground_state, make_problem, record_exponent, run_experiment, BisectionConfig, ExperimentConfig,
    ExperimentRecord, Family, Mode,
};
use plhboa::hboa::{hboa_generation, initial_population, run_fixed, select, HboaConfig};
use plhboa::parameterless::{run_parameterless, ParameterlessConfig, Scheduler, TerminationRules};
use plhboa::problems::{
    dec3, htrap, local_search, Dec3, HTrap, Hybrid, OneMax, SpinGlass, SpinGlassInstance,
};
use plhboa::{BitString, EvalCounter, Genome, Population, Problem, RandomSource};

const MASTER_SEED: u64 = 1;
const RUNS: usize = 100;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn bits(s: &str) -> BitString {
    s.parse().unwrap()
}

fn exact(got: f64, want: f64, what: &str) -> Check {
    ensure!((got - want).abs() <= 1e-12, "{what}: got {got}, want {want}");
    Ok(())
}

fn benchmark_values() -> Check {
    for (s, want) in [("111", 1.0), ("110", 0.0), ("100", 0.8), ("000", 0.9)] {
        exact(dec3(&bits(s)).map_err(|e| e.to_string())?, want, &format!("dec3({s})"))?;
    }
    exact(htrap(&BitString::ones(27)).unwrap(), 27.0, "htrap(1^27)")?;
    exact(htrap(&BitString::zeros(27)).unwrap(), 26.1, "htrap(0^27)")?;
    let ferro = SpinGlassInstance::uniform(6, -1).unwrap();
    let e = ferro.energy(&BitString::ones(36)).unwrap();
    ensure!(e == -72, "ferromagnetic 6x6 energy {e}");
    exact(SpinGlass::new(ferro).fitness(&BitString::ones(36)), 72.0, "ferromagnetic fitness")?;
    Ok(())
}

/// Index sequence of the schedule with k = 2 and no terminations, computed
/// from the recurrence alone.
fn reference_indices(steps: usize) -> Vec<usize> {
    let mut gens: Vec<usize> = vec![0];
    let mut i = 0;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        out.push(i);
        gens[i] += 1;
        i = if gens[i] % 2 == 0 { i + 1 } else { 0 };
        if i == gens.len() {
            gens.push(0);
        }
    }
    out
}

fn scheduler_pacing() -> Check {
    const STEPS: usize = 10_000;
    let problem = OneMax { n: 10 };
    let cfg = ParameterlessConfig {
        rules: TerminationRules::NONE,
        ..ParameterlessConfig::default()
    };
    let mut s = Scheduler::new(&problem, cfg.clone(), MASTER_SEED).map_err(|e| e.to_string())?;
    let reference = reference_indices(STEPS);
    ensure!(reference[..7] == [0, 0, 1, 0, 0, 1, 2], "reference recurrence {:?}", &reference[..7]);
    // Generations of P_i since the last generation of P_{i+1}.
    let mut since_larger: Vec<usize> = Vec::new();
    let mut executed = Vec::with_capacity(STEPS);
    for step in 0..STEPS {
        let rec = s.step().map_err(|e| e.to_string())?;
        executed.push(rec.index);
        ensure!(rec.index == reference[step], "step {step}: ran P_{} expected P_{}", rec.index, reference[step]);
        let entries = s.entries();
        since_larger.resize(entries.len(), 0);
        if rec.index > 0 {
            let before = since_larger[rec.index - 1];
            let first = entries[rec.index].generation == 1;
            if first {
                ensure!(before >= 2, "step {step}: P_{} started after {before} generations of P_{}", rec.index, rec.index - 1);
            } else {
                ensure!(before == 2, "step {step}: P_{} ran {before} generations between two of P_{}", rec.index - 1, rec.index);
            }
            since_larger[rec.index - 1] = 0;
        }
        since_larger[rec.index] += 1;
        for (i, e) in entries.iter().enumerate() {
            ensure!(e.population.len() == 10 << i, "P_{i} has {} members", e.population.len());
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                ensure!(
                    entries[i].evaluations >= entries[j].evaluations,
                    "step {step}: P_{i} used {} < P_{j} used {}",
                    entries[i].evaluations,
                    entries[j].evaluations
                );
            }
        }
        let furthest = executed.iter().max().copied().unwrap().max(s.cursor().unwrap());
        ensure!(entries.len() == furthest + 1, "step {step}: {} entries, cursor reached {furthest}", entries.len());
    }
    println!(
        "    {STEPS} steps, {} populations, largest {} members",
        s.entries().len(),
        s.entries().last().unwrap().population.len()
    );
    Ok(())
}

fn record_line(r: &ExperimentRecord) -> String {
    format!(
        "    {} n={} {}: {}/{} solved, mean evals {:.0} (sd {:.0}){}",
        r.problem,
        r.n,
        r.mode,
        r.successes,
        r.runs,
        r.mean_evals,
        r.std_evals,
        r.nmin.map(|v| format!(", N_min {v}")).unwrap_or_default()
    )
}

fn sweep(family: Family, sizes: &[usize], mode: Mode) -> Result<Vec<ExperimentRecord>, String> {
    let mut cfg = ExperimentConfig::new(family, sizes.to_vec(), mode, MASTER_SEED);
    cfg.runs = RUNS;
    let records = run_experiment(&cfg).map_err(|e| e.to_string())?;
    for r in &records {
        println!("{}", record_line(r));
    }
    Ok(records)
}

fn all_solved(records: &[ExperimentRecord], need: usize) -> Check {
    for r in records {
        ensure!(r.successes >= need, "{} n={}: {}/{} solved", r.problem, r.n, r.successes, r.runs);
    }
    Ok(())
}

fn dec3_reliability(pl: &[ExperimentRecord]) -> Check {
    all_solved(pl, RUNS)?;
    let exponent = record_exponent(pl).map_err(|e| e.to_string())?;
    println!("    power-law exponent {exponent:.3}");
    ensure!(exponent <= 2.5, "exponent {exponent:.3} > 2.5");
    Ok(())
}

fn overhead(pl: &[ExperimentRecord]) -> Check {
    let fixed = sweep(Family::Dec3, &[30, 60], Mode::FixedBisected)?;
    let ratio = |n: usize| {
        let p = pl.iter().find(|r| r.n == n).unwrap();
        let f = fixed.iter().find(|r| r.n == n).unwrap();
        p.mean_evals / f.mean_evals
    };
    let (r30, r60) = (ratio(30), ratio(60));
    println!("    ratio n=30 {r30:.3}, n=60 {r60:.3}, ratio of ratios {:.3}", r60 / r30);
    ensure!(r30.is_finite() && r60.is_finite(), "missing successful fixed runs");
    ensure!(r30 <= 32.0, "ratio at n=30 is {r30:.3}");
    ensure!(r60 <= 32.0, "ratio at n=60 is {r60:.3}");
    ensure!(r60 <= 3.0 * r30 && r30 <= 3.0 * r60, "ratios {r30:.3} and {r60:.3} differ by more than 3x");
    Ok(())
}

fn htrap_reliability() -> Check {
    all_solved(&sweep(Family::HTrap, &[27, 81], Mode::Parameterless)?, RUNS)
}

fn spin_glass_oracle() -> Check {
    let records = sweep(Family::SpinGlass, &[16, 25], Mode::Parameterless)?;
    all_solved(&records, 99)?;
    // Larger grids against best-known energies; reported, not gated.
    let dir = std::env::temp_dir().join(format!("plhboa-best-known-{}", std::process::id()));
    let mut cfg = ExperimentConfig::new(Family::SpinGlass, vec![36, 64, 100], Mode::Parameterless, MASTER_SEED);
    cfg.runs = 10;
    cfg.bootstrap_budget = 20_000;
    cfg.best_known_dir = Some(dir.clone());
    match run_experiment(&cfg) {
        Ok(large) => {
            for r in &large {
                println!("{}  [best-known]", record_line(r));
            }
            match record_exponent(&large) {
                Ok(x) => println!("    best-known sweep exponent {x:.3} (not gating)"),
                Err(e) => println!("    best-known sweep exponent unavailable: {e}"),
            }
        }
        Err(e) => println!("    best-known sweep failed: {e} (not gating)"),
    }
    let _ = std::fs::remove_dir_all(dir);
    Ok(())
}

fn property_suites() -> Check {
    let mut rng = RandomSource::new(MASTER_SEED);

    // Acyclicity, positive gains and edge replay on structured and
    // hBOA-selected populations.
    for case in 0..150 {
        let n = 2 + rng.below(14);
        let links: Vec<(usize, usize, bool)> = (0..rng.below(2 * n + 1))
            .map(|_| (rng.below(n), rng.below(n), rng.bit()))
            .filter(|(a, b, _)| a != b)
            .collect();
        let pop = correlated_population(n, 10 + rng.below(400), &links, rng.next_u64());
        check_learning_replay(&pop).map_err(|e| format!("acyclicity case {case}: {e}"))?;
    }
    for case in 0..20 {
        let problem = Dec3::new(24).unwrap();
        let mut counter = EvalCounter::default();
        let mut run_rng = RandomSource::new(rng.next_u64());
        let mut pop = initial_population(&problem, 200, &mut run_rng, &mut counter).unwrap();
        for g in 1..=case % 8 {
            hboa_generation(&mut pop, g, &HboaConfig::default(), &problem, &mut run_rng, &mut counter).unwrap();
        }
        let selected = select(&pop, 200, 2, &mut run_rng).unwrap();
        check_learning_replay(&selected).map_err(|e| format!("acyclicity on selected {case}: {e}"))?;
    }
    println!("    acyclicity: 170 learned networks replayed");

    let mut worst: f64 = 0.0;
    for case in 0..40 {
        let n = 1 + case % 4;
        let d = sampling_distance(n, 100_000, rng.next_u64());
        ensure!(d <= 0.02, "sampling case {case} (n={n}): L1 {d:.4}");
        worst = worst.max(d);
    }
    println!("    sampling: 40 models, worst L1 {worst:.4}");

    for case in 0..300 {
        let n = 1 + rng.below(12);
        let size = 2 + rng.below(40);
        let mut draw = |count: usize| {
            Population::new(
                (0..count)
                    .map(|_| {
                        let b = BitString::from_bools((0..n).map(|_| rng.bit()));
                        Genome::with_fitness(b, rng.below(5) as f64)
                    })
                    .collect(),
            )
            .unwrap()
        };
        let pop = draw(size);
        let off = draw(1 + size / 2);
        let w = 1 + rng.below(size);
        check_rtr_replay(&pop, &off, w, rng.next_u64()).map_err(|e| format!("RTR case {case}: {e}"))?;
    }
    println!("    RTR: 300 logged incorporations replayed");

    for case in 0..100 {
        let problem = SpinGlass::new(SpinGlassInstance::random(5, rng.next_u64()).unwrap());
        let mut b = BitString::from_bools((0..25).map(|_| rng.bit()));
        local_search(&mut b, &problem, &mut EvalCounter::default());
        check_no_improving_flip(&problem, &b).map_err(|e| format!("local search case {case}: {e}"))?;
        let dec = Dec3::new(30).unwrap();
        let mut b = BitString::from_bools((0..30).map(|_| rng.bit()));
        local_search(&mut b, &dec, &mut EvalCounter::default());
        check_no_improving_flip(&dec, &b).map_err(|e| format!("dec3 local search case {case}: {e}"))?;
    }
    println!("    local search: 200 outputs have no improving flip");

    for (problem, seed) in [
        (Box::new(OneMax { n: 10 }) as Box<dyn Problem>, 11),
        (Box::new(Dec3::new(12).unwrap()), 12),
        (Box::new(Dec3::new(24).unwrap()), 13),
    ] {
        let cfg = BisectionConfig {
            master_seed: seed,
            ..BisectionConfig::default()
        };
        let b = bisect_population_size(&*problem, &HboaConfig::default(), &cfg).map_err(|e| e.to_string())?;
        check_bisection(&b).map_err(|e| format!("bisection {}: {e}", problem.id()))?;
        println!("    bisection {} n={}: interval {:?}", problem.id(), problem.len(), b.interval());
    }

    let instance = SpinGlassInstance::random(5, 5).unwrap();
    let ground = brute_force_ground_state(&instance).map_err(|e| e.to_string())?.0;
    let spin = Hybrid::new(SpinGlass::new(instance).with_ground_energy(ground));
    let problems: Vec<Box<dyn Problem>> = vec![
        Box::new(Dec3::new(30).unwrap()),
        Box::new(HTrap::new(27).unwrap()),
        Box::new(spin),
    ];
    for p in &problems {
        let pl = ParameterlessConfig::default();
        let a = run_parameterless(&**p, &pl, 77).map_err(|e| e.to_string())?;
        let b = run_parameterless(&**p, &pl, 77).map_err(|e| e.to_string())?;
        ensure!(a.same_outcome(&b), "parameter-less replay differs for {}", p.id());
        let a = run_fixed(&**p, 300, &HboaConfig::default(), 78).map_err(|e| e.to_string())?;
        let b = run_fixed(&**p, 300, &HboaConfig::default(), 78).map_err(|e| e.to_string())?;
        ensure!(a.same_outcome(&b), "fixed replay differs for {}", p.id());
    }
    // A single run of a sweep is reproducible from the recorded master seed.
    let mut cfg = ExperimentConfig::new(Family::Dec3, vec![15], Mode::Parameterless, MASTER_SEED);
    cfg.runs = 5;
    let row = run_experiment(&cfg).map_err(|e| e.to_string())?.remove(0);
    let replay = ExperimentConfig::new(Family::Dec3, vec![row.n], row.mode, row.master_seed);
    let problem = make_problem(Family::Dec3, row.n, false).unwrap();
    let evals: Vec<f64> = (0..row.runs)
        .map(|r| run_parameterless(&*problem, &replay.parameterless(), replay.run_seed(row.n, r)).unwrap())
        .filter(|r| r.success)
        .map(|r| r.evaluations as f64)
        .collect();
    ensure!(evals.len() == row.successes, "replayed successes differ");
    ensure!(
        evals.iter().sum::<f64>() / evals.len() as f64 == row.mean_evals,
        "replayed mean differs"
    );
    println!("    replay: parameter-less, fixed and sweep runs reproduced bit for bit");
    Ok(())
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |c: u32| selected.is_empty() || selected.contains(&c);
    let mut failures = 0;
    let mut report = |id: u32, name: &str, start: Instant, outcome: Check| {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS criterion {id}: {name} ({secs:.1}s)"),
            Err(e) => {
                failures += 1;
                println!("FAIL criterion {id}: {name} ({secs:.1}s): {e}");
            }
        }
    };

    if wanted(1) {
        let t = Instant::now();
        report(1, "benchmark unit values", t, benchmark_values());
    }
    if wanted(2) {
        let t = Instant::now();
        report(2, "scheduler pacing over 10,000 steps", t, scheduler_pacing());
    }
    let mut dec3_pl = None;
    if wanted(3) || wanted(4) {
        let t = Instant::now();
        let records = sweep(Family::Dec3, &[30, 60, 90], Mode::Parameterless);
        if wanted(3) {
            report(3, "dec3 reliability and scaling", t, records.clone().and_then(|r| dec3_reliability(&r)));
        }
        dec3_pl = Some(records);
    }
    if wanted(4) {
        let t = Instant::now();
        let outcome = match dec3_pl.as_ref().unwrap() {
            Ok(pl) => overhead(pl),
            Err(e) => Err(e.clone()),
        };
        report(4, "parameter-less overhead vs bisected fixed size", t, outcome);
    }
    if wanted(5) {
        let t = Instant::now();
        report(5, "hierarchical trap reliability", t, htrap_reliability());
    }
    if wanted(6) {
        let t = Instant::now();
        report(6, "spin-glass ground states vs exhaustive oracle", t, spin_glass_oracle());
    }
    if wanted(7) {
        let t = Instant::now();
        report(7, "property suites", t, property_suites());
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
