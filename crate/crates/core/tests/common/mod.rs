//! Independent checks shared by the property tests and the acceptance suite.
//! Each returns `Err` with a readable message instead of panicking, so the
//! acceptance runner can report it.
#![allow(dead_code)]

use plhboa::bayesnet::{learn_model_traced, topological_order, BayesNet, DecisionTree, TreeNode};
use plhboa::harness::Bisection;
use plhboa::hboa::rtr_incorporate_logged;
use plhboa::problems::SpinGlassInstance;
use plhboa::{BitString, Genome, Population, Problem, RandomSource};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Replays every accepted split as an edge and runs a full topological sort
/// after each one. Also checks that all gains are strictly positive and the
/// replayed edge set matches the final network.
pub fn check_learning_replay(pop: &Population) -> Check {
    let (net, splits) = learn_model_traced(pop).map_err(|e| e.to_string())?;
    let n = pop.genome_len();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, s) in splits.iter().enumerate() {
        ensure!(s.gain > 0.0, "split {k} has gain {}", s.gain);
        ensure!(s.var != s.target, "split {k} on its own target");
        if !parents[s.target].contains(&s.var) {
            parents[s.target].push(s.var);
        }
        ensure!(topological_order(&parents).is_some(), "cycle after split {k}");
    }
    for (i, ps) in parents.iter_mut().enumerate() {
        ps.sort_unstable();
        ensure!(*ps == net.parents(i), "parents of {i}: replay {ps:?}, network {:?}", net.parents(i));
    }
    let order = net.order();
    let mut position = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    for (p, c) in net.edges() {
        ensure!(position[p] < position[c], "edge {p}->{c} against sampling order");
    }
    Ok(())
}

/// Population of `size` strings where a few bits copy (or negate) others.
pub fn correlated_population(n: usize, size: usize, links: &[(usize, usize, bool)], seed: u64) -> Population {
    let mut rng = RandomSource::new(seed);
    let members = (0..size)
        .map(|_| {
            let mut bits: Vec<bool> = (0..n).map(|_| rng.bit()).collect();
            for &(from, to, negate) in links {
                if rng.unit() < 0.9 {
                    bits[to] = bits[from] ^ negate;
                }
            }
            Genome::new(BitString::from_bools(bits))
        })
        .collect();
    Population::new(members).unwrap()
}

/// Full tree over `parents` (in the given order) with leaf counts drawn from
/// `counts`, which may contain zero-support leaves.
fn full_tree(target: usize, parents: &[usize], counts: &mut impl Iterator<Item = (u64, u64)>) -> DecisionTree {
    fn build(
        nodes: &mut Vec<TreeNode>,
        parents: &[usize],
        counts: &mut impl Iterator<Item = (u64, u64)>,
    ) -> usize {
        let idx = nodes.len();
        match parents.split_first() {
            None => {
                let (count0, count1) = counts.next().unwrap();
                nodes.push(TreeNode::Leaf { count0, count1 });
            }
            Some((&var, rest)) => {
                nodes.push(TreeNode::Leaf { count0: 0, count1: 0 });
                let zero = build(nodes, rest, counts);
                let one = build(nodes, rest, counts);
                nodes[idx] = TreeNode::Split { var, zero, one };
            }
        }
        idx
    }
    let mut nodes = Vec::new();
    build(&mut nodes, parents, counts);
    DecisionTree::new(target, nodes).unwrap()
}

/// Random network over `n` variables: variable `perm[k]` may depend on any
/// of `perm[..k]`.
pub fn random_network(n: usize, seed: u64) -> BayesNet {
    let mut rng = RandomSource::new(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.below(i + 1));
    }
    let mut trees: Vec<Option<DecisionTree>> = vec![None; n];
    for k in 0..n {
        let parents: Vec<usize> = perm[..k].iter().copied().filter(|_| rng.bit()).collect();
        let mut counts = std::iter::from_fn(|| Some((rng.below(20) as u64, rng.below(20) as u64)));
        trees[perm[k]] = Some(full_tree(perm[k], &parents, &mut counts));
    }
    BayesNet::new(trees.into_iter().map(Option::unwrap).collect()).unwrap()
}

/// Exact joint distribution of `net` over all `2^n` strings, indexed by the
/// string read as a little-endian integer.
pub fn exact_distribution(net: &BayesNet) -> Vec<f64> {
    let n = net.len();
    (0..1usize << n)
        .map(|x| {
            let bits = BitString::from_bools((0..n).map(|i| (x >> i) & 1 == 1));
            net.trees()
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let p = t.probability_of_one(&bits);
                    if bits.get(i) {
                        p
                    } else {
                        1.0 - p
                    }
                })
                .product()
        })
        .collect()
}

pub fn empirical_distribution(pop: &Population) -> Vec<f64> {
    let n = pop.genome_len();
    let mut freq = vec![0.0; 1 << n];
    for g in pop.members() {
        let x = (0..n).filter(|&i| g.bits.get(i)).map(|i| 1 << i).sum::<usize>();
        freq[x] += 1.0;
    }
    freq.iter().map(|f| f / pop.len() as f64).collect()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Samples `count` strings from a random network over `n <= 4` variables and
/// returns the L1 distance to the exact distribution.
pub fn sampling_distance(n: usize, count: usize, seed: u64) -> f64 {
    let net = random_network(n, seed);
    let sample = net.sample(count, &mut RandomSource::new(seed ^ 0x5eed)).unwrap();
    l1(&exact_distribution(&net), &empirical_distribution(&sample))
}

/// Runs RTR with logging and replays each decision by brute force.
pub fn check_rtr_replay(pop: &Population, offspring: &Population, w: usize, seed: u64) -> Check {
    let mut live = pop.clone();
    let log = rtr_incorporate_logged(&mut live, offspring.clone(), w, &mut RandomSource::new(seed))
        .map_err(|e| e.to_string())?;
    ensure!(log.len() == offspring.len(), "{} decisions for {} offspring", log.len(), offspring.len());
    let best_before = pop.best_fitness();
    let mut replay = pop.members().to_vec();
    for (k, (d, child)) in log.iter().zip(offspring.members()).enumerate() {
        let mut window = d.window.clone();
        ensure!(window.len() == w, "decision {k}: window of {} not {w}", window.len());
        window.sort_unstable();
        window.dedup();
        ensure!(window.len() == w, "decision {k}: repeated window member");
        ensure!(window.iter().all(|&i| i < replay.len()), "decision {k}: index out of range");
        let distance = |i: usize| replay[i].bits.hamming(&child.bits);
        let nearest = window.iter().copied().min_by_key(|&i| (distance(i), i)).unwrap();
        ensure!(d.closest == nearest, "decision {k}: chose {} but {nearest} is nearest", d.closest);
        let fitter = child.fitness.unwrap() > replay[nearest].fitness.unwrap();
        ensure!(d.replaced == fitter, "decision {k}: replaced={} but fitter={fitter}", d.replaced);
        if fitter {
            replay[nearest] = child.clone();
        }
    }
    ensure!(replay == live.members(), "replayed population differs");
    ensure!(live.len() == pop.len(), "population size changed");
    ensure!(live.best_fitness() >= best_before, "best fitness decreased");
    Ok(())
}

/// No single flip strictly improves `bits`, checked by full re-evaluation.
pub fn check_no_improving_flip<P: Problem + ?Sized>(problem: &P, bits: &BitString) -> Check {
    let f = problem.fitness(bits);
    for i in 0..bits.len() {
        let mut probe = bits.clone();
        probe.flip(i);
        let g = problem.fitness(&probe);
        ensure!(g <= f, "flip {i} improves {f} to {g}");
    }
    Ok(())
}

/// Best-improvement hill climbing by full re-evaluation of every neighbour.
pub fn naive_climb<P: Problem + ?Sized>(problem: &P, bits: &mut BitString) -> Vec<usize> {
    let mut path = Vec::new();
    loop {
        let f = problem.fitness(bits);
        let mut best: Option<(f64, usize)> = None;
        for i in 0..bits.len() {
            let mut probe = bits.clone();
            probe.flip(i);
            let gain = problem.fitness(&probe) - f;
            if gain > 0.0 && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, i));
            }
        }
        match best {
            Some((_, i)) => {
                bits.flip(i);
                path.push(i);
            }
            None => return path,
        }
    }
}

/// Energy of `bits` computed straight from the coupling list.
pub fn naive_energy(instance: &SpinGlassInstance, bits: &BitString) -> i64 {
    let spin = |i: usize| if bits.get(i) { 1i64 } else { -1 };
    instance
        .edges()
        .iter()
        .map(|&(i, j, c)| c as i64 * spin(i) * spin(j))
        .sum()
}

/// Minimum energy over all `2^n` assignments, without symmetry tricks.
pub fn naive_ground_energy(instance: &SpinGlassInstance) -> i64 {
    let n = instance.spins();
    (0..1u64 << n)
        .map(|x| naive_energy(instance, &BitString::from_bools((0..n).map(|i| (x >> i) & 1 == 1))))
        .min()
        .unwrap()
}

/// The interval rule plus the pass/fail status of its bounds.
pub fn check_bisection(b: &Bisection) -> Check {
    let (lo, hi) = b.interval();
    ensure!(b.n_min == hi, "n_min {} differs from upper bound {hi}", b.n_min);
    ensure!(
        (hi - lo) as f64 <= 0.1 * lo as f64,
        "interval [{lo}, {hi}] wider than 10% of {lo}"
    );
    let status = |size: usize| b.probes.iter().find(|p| p.size == size).map(|p| p.passed);
    ensure!(status(hi) == Some(true), "upper bound {hi} was not a passing probe");
    if let Some(lo) = b.lower {
        ensure!(status(lo) == Some(false), "lower bound {lo} was not a failing probe");
    }
    Ok(())
}
