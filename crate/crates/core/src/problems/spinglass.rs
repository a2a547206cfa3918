//! 2D ±J Ising spin glasses on an `L x L` torus.
//!
//! Bit `i` encodes spin `+1` when set and `-1` otherwise; cell `i` sits at
//! row `i / L`, column `i % L`. Each cell owns the edge to its right and the
//! edge below it, with wraparound, giving `2 L^2` couplings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::random::RandomSource;

const HEADER: &str = "spinglass 2d pm-j";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinGlassInstance {
    side: usize,
    seed: u64,
    /// Coupling between cell `i` and its right neighbour.
    right: Vec<i8>,
    /// Coupling between cell `i` and the cell below it.
    down: Vec<i8>,
}

/// Random instance with couplings `+1`/`-1` drawn with equal probability,
/// in edge order (cell, right before down).
pub fn generate_instance(side: usize, rng: &mut RandomSource) -> Result<SpinGlassInstance> {
    check_side(side)?;
    let n = side * side;
    let mut right = Vec::with_capacity(n);
    let mut down = Vec::with_capacity(n);
    for _ in 0..n {
        right.push(if rng.bit() { 1 } else { -1 });
        down.push(if rng.bit() { 1 } else { -1 });
    }
    Ok(SpinGlassInstance {
        side,
        seed: rng.seed(),
        right,
        down,
    })
}

fn check_side(side: usize) -> Result<()> {
    if side < 3 {
        return Err(Error::invalid(format!("spin glass side must be at least 3, got {side}")));
    }
    Ok(())
}

impl SpinGlassInstance {
    /// Instance with explicit couplings; `seed` is recorded only.
    pub fn new(side: usize, seed: u64, right: Vec<i8>, down: Vec<i8>) -> Result<Self> {
        check_side(side)?;
        let n = side * side;
        if right.len() != n || down.len() != n {
            return Err(Error::invalid(format!("expected {n} right and {n} down couplings")));
        }
        if right.iter().chain(&down).any(|&j| j != 1 && j != -1) {
            return Err(Error::invalid("couplings must be +1 or -1"));
        }
        Ok(SpinGlassInstance {
            side,
            seed,
            right,
            down,
        })
    }

    /// Generates an instance from its own seed.
    pub fn random(side: usize, seed: u64) -> Result<Self> {
        generate_instance(side, &mut RandomSource::new(seed))
    }

    /// Every coupling equal to `j`.
    pub fn uniform(side: usize, j: i8) -> Result<Self> {
        let n = side * side;
        SpinGlassInstance::new(side, 0, vec![j; n], vec![j; n])
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn spins(&self) -> usize {
        self.side * self.side
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn right_of(&self, i: usize) -> usize {
        let (r, c) = (i / self.side, i % self.side);
        r * self.side + (c + 1) % self.side
    }

    pub fn below(&self, i: usize) -> usize {
        let (r, c) = (i / self.side, i % self.side);
        ((r + 1) % self.side) * self.side + c
    }

    pub fn left_of(&self, i: usize) -> usize {
        let (r, c) = (i / self.side, i % self.side);
        r * self.side + (c + self.side - 1) % self.side
    }

    pub fn above(&self, i: usize) -> usize {
        let (r, c) = (i / self.side, i % self.side);
        ((r + self.side - 1) % self.side) * self.side + c
    }

    /// All edges as `(cell, neighbour, coupling)`, sorted by cell with the
    /// right edge before the down edge.
    pub fn edges(&self) -> Vec<(usize, usize, i8)> {
        (0..self.spins())
            .flat_map(|i| [(i, self.right_of(i), self.right[i]), (i, self.below(i), self.down[i])])
            .collect()
    }

    /// The four `(neighbour, coupling)` pairs of cell `i`.
    pub fn neighbours(&self, i: usize) -> [(usize, i8); 4] {
        let l = self.left_of(i);
        let u = self.above(i);
        [
            (self.right_of(i), self.right[i]),
            (self.below(i), self.down[i]),
            (l, self.right[l]),
            (u, self.down[u]),
        ]
    }

    /// `sum over edges of s_i J_ij s_j`.
    pub fn energy(&self, bits: &BitString) -> Result<i64> {
        if bits.len() != self.spins() {
            return Err(Error::invalid(format!(
                "assignment has {} spins, instance has {}",
                bits.len(),
                self.spins()
            )));
        }
        Ok(self.energy_unchecked(bits))
    }

    fn energy_unchecked(&self, bits: &BitString) -> i64 {
        let spin = |i: usize| if bits.get(i) { 1i64 } else { -1 };
        (0..self.spins())
            .map(|i| {
                let s = spin(i);
                s * self.right[i] as i64 * spin(self.right_of(i))
                    + s * self.down[i] as i64 * spin(self.below(i))
            })
            .sum()
    }

    /// `s_i * sum_j J_ij s_j`, the energy decrease from flipping spin `i`
    /// is twice this value.
    pub fn local_field(&self, bits: &BitString, i: usize) -> i64 {
        let spin = |k: usize| if bits.get(k) { 1i64 } else { -1 };
        spin(i)
            * self
                .neighbours(i)
                .iter()
                .map(|&(j, c)| c as i64 * spin(j))
                .sum::<i64>()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\nL {}\nseed {}\n", self.side, self.seed);
        for (i, j, c) in self.edges() {
            let _ = writeln!(out, "{i} {j} {}", if c > 0 { "+1" } else { "-1" });
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Parse { line: 0, message: format!("missing {what}") })
        };
        let (ln, header) = next("header")?;
        if header != HEADER {
            return Err(Error::Parse { line: ln, message: format!("expected {HEADER:?}") });
        }
        let (ln, side_line) = next("side")?;
        let side: usize = keyed(side_line, "L", ln)?;
        let (ln, seed_line) = next("seed")?;
        let seed: u64 = keyed(seed_line, "seed", ln)?;
        check_side(side).map_err(|e| Error::Parse { line: 2, message: e.to_string() })?;
        let n = side * side;
        let mut right = vec![0i8; n];
        let mut down = vec![0i8; n];
        let shape = SpinGlassInstance::uniform(side, 1)?;
        for k in 0..2 * n {
            let (ln, line) = next("edge")?;
            let bad = |m: &str| Error::Parse { line: ln, message: m.to_string() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [a, b, c] = fields[..] else {
                return Err(bad("expected `<cell> <neighbour> <+1|-1>`"));
            };
            let cell: usize = a.parse().map_err(|_| bad("bad cell index"))?;
            let nb: usize = b.parse().map_err(|_| bad("bad neighbour index"))?;
            let coupling: i8 = match c {
                "+1" => 1,
                "-1" => -1,
                _ => return Err(bad("coupling must be +1 or -1")),
            };
            let (want_cell, want_nb) = if k % 2 == 0 {
                (k / 2, shape.right_of(k / 2))
            } else {
                (k / 2, shape.below(k / 2))
            };
            if cell != want_cell || nb != want_nb {
                return Err(bad(&format!("expected edge {want_cell} {want_nb}")));
            }
            if k % 2 == 0 {
                right[cell] = coupling;
            } else {
                down[cell] = coupling;
            }
        }
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(Error::Parse { line: ln, message: format!("unexpected trailing line {extra:?}") });
        }
        SpinGlassInstance::new(side, seed, right, down)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        SpinGlassInstance::parse(&fs::read_to_string(path)?)
    }
}

fn keyed<T: std::str::FromStr>(line: &str, key: &str, ln: usize) -> Result<T> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse { line: ln, message: format!("expected `{key} <value>`") })
}

/// Ground-state search posed as maximization of `-E`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinGlass {
    instance: SpinGlassInstance,
    ground_energy: Option<i64>,
}

impl SpinGlass {
    pub fn new(instance: SpinGlassInstance) -> Self {
        SpinGlass {
            instance,
            ground_energy: None,
        }
    }

    /// Sets the energy whose attainment counts as success.
    pub fn with_ground_energy(mut self, energy: i64) -> Self {
        self.ground_energy = Some(energy);
        self
    }

    pub fn instance(&self) -> &SpinGlassInstance {
        &self.instance
    }
}

impl Problem for SpinGlass {
    fn id(&self) -> String {
        format!("spinglass-{}", self.instance.seed)
    }

    fn len(&self) -> usize {
        self.instance.spins()
    }

    fn fitness(&self, bits: &BitString) -> f64 {
        -(self.instance.energy_unchecked(bits) as f64)
    }

    fn known_optimum(&self) -> Option<f64> {
        self.ground_energy.map(|e| -(e as f64))
    }

    fn flip_gain(&self, bits: &mut BitString, _current: f64, i: usize) -> f64 {
        2.0 * self.instance.local_field(bits, i) as f64
    }
}
