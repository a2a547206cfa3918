//! Bayesian networks with decision-tree local structures.
//!
//! Every variable owns a decision tree whose internal nodes split on other
//! variables and whose leaves hold the counts of 0s and 1s of the target
//! variable among the training instances reaching them. The parents of a
//! variable are the variables its tree splits on; the parent graph must be a
//! DAG.
//!
//! Learning is greedy: all trees start as single leaves, and the split with
//! the highest penalized log-likelihood gain over all leaves of all trees is
//! applied until no admissible split has a positive gain. A split of a leaf
//! with counts `(c0, c1)` on `x_j` is scored as
//!
//! ```text
//! gain = LL(child x_j=0) + LL(child x_j=1) - LL(leaf) - 0.5 * ln(N)
//! LL(c0, c1) = c0 ln(c0 / (c0 + c1)) + c1 ln(c1 / (c0 + c1)),  0 ln 0 = 0
//! ```
//!
//! where `N` is the number of training instances. Ties are broken by leaf
//! creation order, then by split-variable index.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;

use crate::bits::{word_count, BitString};
use crate::error::{Error, Result};
use crate::population::{Genome, Population};
use crate::random::RandomSource;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    /// Internal node; `zero` and `one` index the children followed when the
    /// split variable is 0 or 1.
    Split { var: usize, zero: usize, one: usize },
    Leaf { count0: u64, count1: u64 },
}

/// Conditional distribution of one variable given its parents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionTree {
    target: usize,
    /// Node 0 is the root.
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn leaf(target: usize, count0: u64, count1: u64) -> Self {
        DecisionTree {
            target,
            nodes: vec![TreeNode::Leaf { count0, count1 }],
        }
    }

    /// Builds a tree from an explicit node list rooted at index 0.
    ///
    /// Rejects dangling or shared child indices, splits on the target, and
    /// variables repeated along a root-to-leaf path.
    pub fn new(target: usize, nodes: Vec<TreeNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("decision tree needs a root node"));
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![(0usize, Vec::<usize>::new())];
        while let Some((idx, path)) = stack.pop() {
            if idx >= nodes.len() || seen[idx] {
                return Err(Error::invalid(format!("bad child reference {idx}")));
            }
            seen[idx] = true;
            if let TreeNode::Split { var, zero, one } = nodes[idx] {
                if var == target || path.contains(&var) {
                    return Err(Error::invalid(format!(
                        "variable {var} cannot be split on in the tree of {target}"
                    )));
                }
                let mut child_path = path.clone();
                child_path.push(var);
                stack.push((zero, child_path.clone()));
                stack.push((one, child_path));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("decision tree has unreachable nodes"));
        }
        Ok(DecisionTree { target, nodes })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Distinct variables this tree splits on, ascending.
    pub fn parents(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Split { var, .. } => Some(*var),
                TreeNode::Leaf { .. } => None,
            })
            .collect();
        set.into_iter().collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    /// Sum of the counts over all leaves.
    pub fn total_count(&self) -> u64 {
        self.nodes
            .iter()
            .map(|n| match n {
                TreeNode::Leaf { count0, count1 } => count0 + count1,
                TreeNode::Split { .. } => 0,
            })
            .sum()
    }

    /// Counts at the leaf reached by `bits`. Only parent bits are read.
    pub fn leaf_counts(&self, bits: &BitString) -> (u64, u64) {
        let mut idx = 0;
        loop {
            match self.nodes[idx] {
                TreeNode::Split { var, zero, one } => {
                    idx = if bits.get(var) { one } else { zero };
                }
                TreeNode::Leaf { count0, count1 } => return (count0, count1),
            }
        }
    }

    /// P(target = 1 | parents as in `bits`); 0.5 at leaves without support.
    pub fn probability_of_one(&self, bits: &BitString) -> f64 {
        let (c0, c1) = self.leaf_counts(bits);
        if c0 + c1 == 0 {
            0.5
        } else {
            c1 as f64 / (c0 + c1) as f64
        }
    }

    fn write_node(&self, f: &mut fmt::Formatter<'_>, idx: usize, depth: usize, label: &str) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self.nodes[idx] {
            TreeNode::Split { var, zero, one } => {
                writeln!(f, "{pad}{label}split x{var}")?;
                self.write_node(f, zero, depth + 1, &format!("x{var}=0: "))?;
                self.write_node(f, one, depth + 1, &format!("x{var}=1: "))
            }
            TreeNode::Leaf { count0, count1 } => {
                writeln!(f, "{pad}{label}leaf 0:{count0} 1:{count1}")
            }
        }
    }
}

/// A Bayesian network over `n` binary variables, one decision tree each.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesNet {
    trees: Vec<DecisionTree>,
    order: Vec<usize>,
}

impl BayesNet {
    /// `trees[i]` must model variable `i`, and the parent graph must be
    /// acyclic.
    pub fn new(trees: Vec<DecisionTree>) -> Result<Self> {
        let n = trees.len();
        if n == 0 {
            return Err(Error::invalid("network needs at least one variable"));
        }
        for (i, t) in trees.iter().enumerate() {
            if t.target != i {
                return Err(Error::invalid(format!("tree {i} targets variable {}", t.target)));
            }
            if let Some(&p) = t.parents().last() {
                if p >= n {
                    return Err(Error::invalid(format!("tree {i} splits on unknown variable {p}")));
                }
            }
        }
        let parents: Vec<Vec<usize>> = trees.iter().map(DecisionTree::parents).collect();
        let order = topological_order(&parents)
            .ok_or_else(|| Error::invalid("parent graph contains a cycle"))?;
        Ok(BayesNet { trees, order })
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn parents(&self, i: usize) -> Vec<usize> {
        self.trees[i].parents()
    }

    /// Directed edges `(parent, child)` of the network.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| self.parents(i).into_iter().map(move |p| (p, i)))
            .collect()
    }

    /// Ancestral ordering used for sampling.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Draws `count` unevaluated genomes, each variable sampled after its
    /// parents.
    pub fn sample(&self, count: usize, rng: &mut RandomSource) -> Result<Population> {
        if count == 0 {
            return Err(Error::invalid("sample count must be positive"));
        }
        let n = self.len();
        let members = (0..count)
            .map(|_| {
                let mut bits = BitString::zeros(n);
                for &v in &self.order {
                    let p = self.trees[v].probability_of_one(&bits);
                    if rng.unit() < p {
                        bits.set(v, true);
                    }
                }
                Genome::new(bits)
            })
            .collect();
        Population::new(members)
    }
}

impl fmt::Display for BayesNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tree) in self.trees.iter().enumerate() {
            let parents: Vec<String> = tree.parents().iter().map(usize::to_string).collect();
            writeln!(f, "var {i}: parents={{{}}}", parents.join(","))?;
            tree.write_node(f, 0, 1, "")?;
        }
        Ok(())
    }
}

/// Kahn's algorithm, always releasing the smallest ready index first.
/// `None` when the graph has a cycle.
pub fn topological_order(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(child);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// One split accepted during learning, in acceptance order.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitRecord {
    pub target: usize,
    pub var: usize,
    pub gain: f64,
}

/// `c0 ln(c0/t) + c1 ln(c1/t)` with `0 ln 0 = 0`.
pub fn leaf_log_likelihood(count0: u64, count1: u64) -> f64 {
    let total = (count0 + count1) as f64;
    let term = |c: u64| {
        if c == 0 {
            0.0
        } else {
            let c = c as f64;
            c * (c / total).ln()
        }
    };
    term(count0) + term(count1)
}

/// Penalized log-likelihood gain of splitting a leaf with counts
/// `(parent0, parent1)` into children with counts `zero` and `one`.
pub fn split_gain(parent: (u64, u64), zero: (u64, u64), one: (u64, u64), instances: usize) -> f64 {
    leaf_log_likelihood(zero.0, zero.1) + leaf_log_likelihood(one.0, one.1)
        - leaf_log_likelihood(parent.0, parent.1)
        - 0.5 * (instances as f64).ln()
}

/// Learns a network from `selected`.
pub fn learn_model(selected: &Population) -> Result<BayesNet> {
    learn_model_traced(selected).map(|(net, _)| net)
}

/// Learns a network and reports every accepted split in order.
pub fn learn_model_traced(selected: &Population) -> Result<(BayesNet, Vec<SplitRecord>)> {
    let mut learner = Learner::new(selected);
    learner.run();
    let Learner { trees, splits, .. } = learner;
    let net = BayesNet::new(trees)?;
    Ok((net, splits))
}

/// Heap entry: the best split of one leaf when it was pushed. Ordered by
/// gain, then earlier leaf, then lower variable.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    gain: f64,
    leaf: usize,
    var: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.leaf.cmp(&self.leaf))
            .then_with(|| other.var.cmp(&self.var))
    }
}

struct OpenLeaf {
    tree: usize,
    node: usize,
    instances: Vec<u32>,
    path: Vec<usize>,
    gains: Vec<f64>,
    /// Joint counts from [`Learner::joint_counts`], reused by the children.
    on: Vec<u32>,
    on_ones: Vec<u32>,
}

struct Learner {
    n: usize,
    instances: usize,
    penalty: f64,
    /// `c ln c` for every count the leaves can hold.
    xlnx: Vec<f64>,
    /// Bit r of `columns[i]` is variable i of instance r.
    columns: Vec<Vec<u64>>,
    /// Packed genome words of each instance.
    rows: Vec<Vec<u64>>,
    /// `reach[a][b]`: a directed path a -> b exists.
    reach: Vec<Vec<bool>>,
    trees: Vec<DecisionTree>,
    /// Indexed by creation order; closed leaves are `None`.
    leaves: Vec<Option<OpenLeaf>>,
    /// Cached best splits. Reachability only grows, so an entry whose
    /// variable is still admissible is the true best of its leaf.
    queue: BinaryHeap<Candidate>,
    splits: Vec<SplitRecord>,
}

impl Learner {
    fn new(selected: &Population) -> Self {
        let n = selected.genome_len();
        let instances = selected.len();
        let words = word_count(instances);
        let mut columns = vec![vec![0u64; words]; n];
        for (r, g) in selected.members().iter().enumerate() {
            let (w, b) = (r / 64, r % 64);
            for (i, col) in columns.iter_mut().enumerate() {
                if g.bits.get(i) {
                    col[w] |= 1 << b;
                }
            }
        }
        let rows = selected.members().iter().map(|g| g.bits.words().to_vec()).collect();
        let mut learner = Learner {
            n,
            instances,
            penalty: 0.5 * (instances as f64).ln(),
            xlnx: (0..=instances)
                .map(|c| if c == 0 { 0.0 } else { c as f64 * (c as f64).ln() })
                .collect(),
            columns,
            rows,
            reach: vec![vec![false; n]; n],
            trees: (0..n).map(|i| DecisionTree::leaf(i, 0, 0)).collect(),
            leaves: Vec::new(),
            queue: BinaryHeap::new(),
            splits: Vec::new(),
        };
        let all: Vec<u32> = (0..instances as u32).collect();
        for i in 0..n {
            learner.open_leaf(i, 0, all.clone(), Vec::new(), None);
        }
        learner
    }

    fn admissible(&self, target: usize, var: usize) -> bool {
        // Edge var -> target closes a cycle iff target already reaches var.
        !self.reach[target][var]
    }

    fn best_split(&self, gains: &[f64], target: usize) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (var, &g) in gains.iter().enumerate() {
            if g > 0.0 && best.is_none_or(|(bg, _)| g > bg) && self.admissible(target, var) {
                best = Some((g, var));
            }
        }
        best
    }

    /// [`leaf_log_likelihood`] through the `c ln c` table.
    fn leaf_ll(&self, count0: u64, count1: u64) -> f64 {
        self.xlnx[count0 as usize] + self.xlnx[count1 as usize] - self.xlnx[(count0 + count1) as usize]
    }

    fn bit(&self, instance: u32, var: usize) -> bool {
        (self.rows[instance as usize][var / 64] >> (var % 64)) & 1 == 1
    }

    /// For every variable j: instances of the leaf with `x_j = 1`, and those
    /// among them with the target set.
    fn joint_counts(&self, target: usize, instances: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let mut on = vec![0u32; self.n];
        let mut on_ones = vec![0u32; self.n];
        let words = word_count(self.instances);
        if instances.len() < 4 * words {
            // Few instances: walk their rows.
            for &r in instances {
                let with_target = self.bit(r, target);
                for (k, &word) in self.rows[r as usize].iter().enumerate() {
                    let mut w = word;
                    while w != 0 {
                        let j = k * 64 + w.trailing_zeros() as usize;
                        on[j] += 1;
                        on_ones[j] += with_target as u32;
                        w &= w - 1;
                    }
                }
            }
        } else {
            let mut mask = vec![0u64; words];
            for &r in instances {
                mask[r as usize / 64] |= 1 << (r % 64);
            }
            let col_t = &self.columns[target];
            let active: Vec<usize> = (0..words).filter(|&w| mask[w] != 0).collect();
            let with_target: Vec<u64> = active.iter().map(|&w| mask[w] & col_t[w]).collect();
            for j in 0..self.n {
                let col = &self.columns[j];
                let (mut a, mut b) = (0u32, 0u32);
                for (k, &w) in active.iter().enumerate() {
                    a += (mask[w] & col[w]).count_ones();
                    b += (with_target[k] & col[w]).count_ones();
                }
                on[j] = a;
                on_ones[j] = b;
            }
        }
        (on, on_ones)
    }

    /// Records the leaf's counts in its tree and, if some split could still
    /// pay off, keeps it open.
    fn open_leaf(
        &mut self,
        tree: usize,
        node: usize,
        instances: Vec<u32>,
        path: Vec<usize>,
        counts: Option<(Vec<u32>, Vec<u32>)>,
    ) {
        let target = tree;
        let total = instances.len() as u64;
        let ones = instances.iter().filter(|&&r| self.bit(r, target)).count() as u64;
        self.trees[tree].nodes[node] = TreeNode::Leaf {
            count0: total - ones,
            count1: ones,
        };
        // A pure leaf cannot gain likelihood, so every split scores -penalty.
        if ones == 0 || ones == total {
            self.leaves.push(None);
            return;
        }
        let (on, on_ones) = counts.unwrap_or_else(|| self.joint_counts(target, &instances));
        let parent = (total - ones, ones);
        let parent_ll = self.leaf_ll(parent.0, parent.1);
        let mut gains = vec![f64::NEG_INFINITY; self.n];
        for (var, gain) in gains.iter_mut().enumerate() {
            if var == target || path.contains(&var) {
                continue;
            }
            let one = ((on[var] - on_ones[var]) as u64, on_ones[var] as u64);
            let zero = (parent.0 - one.0, parent.1 - one.1);
            *gain = self.leaf_ll(zero.0, zero.1) + self.leaf_ll(one.0, one.1)
                - parent_ll
                - self.penalty;
        }
        let id = self.leaves.len();
        match self.best_split(&gains, target) {
            Some((gain, var)) => {
                self.queue.push(Candidate { gain, leaf: id, var });
                self.leaves.push(Some(OpenLeaf {
                    tree,
                    node,
                    instances,
                    path,
                    gains,
                    on,
                    on_ones,
                }));
            }
            None => self.leaves.push(None),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        if self.reach[from][to] {
            return;
        }
        let sources: Vec<usize> = (0..self.n).filter(|&a| a == from || self.reach[a][from]).collect();
        let sinks: Vec<usize> = (0..self.n).filter(|&b| b == to || self.reach[to][b]).collect();
        for &a in &sources {
            for &b in &sinks {
                self.reach[a][b] = true;
            }
        }
    }

    /// Highest-scoring admissible split over all open leaves.
    fn pop_best(&mut self) -> Option<Candidate> {
        while let Some(c) = self.queue.pop() {
            let Some(leaf) = &self.leaves[c.leaf] else { continue };
            if self.admissible(leaf.tree, c.var) {
                return Some(c);
            }
            match self.best_split(&leaf.gains, leaf.tree) {
                Some((gain, var)) => self.queue.push(Candidate { gain, leaf: c.leaf, var }),
                None => self.leaves[c.leaf] = None,
            }
        }
        None
    }

    fn run(&mut self) {
        while let Some(Candidate { gain, leaf: id, var }) = self.pop_best() {
            let leaf = self.leaves[id].take().expect("chosen leaf is open");
            let target = leaf.tree;
            self.splits.push(SplitRecord { target, var, gain });
            self.add_edge(var, target);

            let ones = leaf.on[var] as usize;
            let mut one_rows = Vec::with_capacity(ones);
            let mut zero_rows = Vec::with_capacity(leaf.instances.len() - ones);
            for &r in &leaf.instances {
                if self.bit(r, var) {
                    one_rows.push(r);
                } else {
                    zero_rows.push(r);
                }
            }
            let nodes = &mut self.trees[target].nodes;
            let zero = nodes.len();
            let one = zero + 1;
            nodes[leaf.node] = TreeNode::Split { var, zero, one };
            nodes.push(TreeNode::Leaf { count0: 0, count1: 0 });
            nodes.push(TreeNode::Leaf { count0: 0, count1: 0 });
            let mut path = leaf.path;
            path.push(var);
            // Count the smaller child directly; the other is the difference.
            let (small, large) = if one_rows.len() <= zero_rows.len() {
                (&one_rows, &zero_rows)
            } else {
                (&zero_rows, &one_rows)
            };
            let small_counts = self.joint_counts(target, small);
            let large_counts = if large.is_empty() {
                (vec![0; self.n], vec![0; self.n])
            } else {
                (
                    leaf.on.iter().zip(&small_counts.0).map(|(p, c)| p - c).collect(),
                    leaf.on_ones.iter().zip(&small_counts.1).map(|(p, c)| p - c).collect(),
                )
            };
            let (one_counts, zero_counts) = if one_rows.len() <= zero_rows.len() {
                (small_counts, large_counts)
            } else {
                (large_counts, small_counts)
            };
            self.open_leaf(target, zero, zero_rows, path.clone(), Some(zero_counts));
            self.open_leaf(target, one, one_rows, path, Some(one_counts));
        }
        debug_assert!(self.trees.iter().all(|t| t.total_count() == self.instances as u64));
    }
}
