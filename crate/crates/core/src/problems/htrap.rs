use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;

/// A symbol on some level of the hierarchy; `None` is the null symbol.
type Symbol = Option<bool>;

/// Trap basis on a block of three symbols with `ones` ones.
fn basis(ones: usize, f_lo: f64, f_hi: f64) -> f64 {
    if ones == 3 {
        f_hi
    } else {
        f_lo * (1.0 - ones as f64 / 2.0)
    }
}

/// Level count `L` with `3^L = n`, if `n` is a power of three.
fn levels_of(n: usize) -> Option<u32> {
    let mut size = 1usize;
    let mut levels = 0;
    while size < n {
        size = size.checked_mul(3)?;
        levels += 1;
    }
    (size == n && levels > 0).then_some(levels)
}

/// Order-3 hierarchical trap of `bits`, whose length must be `3^L`.
pub fn htrap(bits: &BitString) -> Result<f64> {
    if levels_of(bits.len()).is_none() {
        return Err(Error::invalid(format!(
            "hierarchical trap needs a power of 3 bits, got {}",
            bits.len()
        )));
    }
    Ok(evaluate_levels(bits))
}

fn evaluate_levels(bits: &BitString) -> f64 {
    let mut symbols: Vec<Symbol> = bits.iter().map(Some).collect();
    let mut weight = 1.0;
    let mut total = 0.0;
    loop {
        let top = symbols.len() == 3;
        let (f_lo, f_hi) = if top { (0.9, 1.0) } else { (1.0, 1.0) };
        let mut level = 0.0;
        let mut next = Vec::with_capacity(symbols.len() / 3);
        for block in symbols.chunks_exact(3) {
            if block.iter().all(Option::is_some) {
                let ones = block.iter().filter(|s| **s == Some(true)).count();
                level += basis(ones, f_lo, f_hi);
                next.push(match ones {
                    0 => Some(false),
                    3 => Some(true),
                    _ => None,
                });
            } else {
                next.push(None);
            }
        }
        total += weight * level;
        if top {
            return total;
        }
        symbols = next;
        weight *= 3.0;
    }
}

/// Hierarchical trap on `n = 3^L` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HTrap {
    n: usize,
    levels: u32,
}

impl HTrap {
    pub fn new(n: usize) -> Result<Self> {
        let levels = levels_of(n)
            .ok_or_else(|| Error::invalid(format!("hierarchical trap size must be a power of 3, got {n}")))?;
        Ok(HTrap { n, levels })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }
}

impl Problem for HTrap {
    fn id(&self) -> String {
        "htrap".into()
    }

    fn len(&self) -> usize {
        self.n
    }

    fn fitness(&self, bits: &BitString) -> f64 {
        evaluate_levels(bits)
    }

    /// Every level of the all-ones string contributes `3^(L-1)`.
    fn known_optimum(&self) -> Option<f64> {
        Some(self.levels as f64 * 3f64.powi(self.levels as i32 - 1))
    }
}
