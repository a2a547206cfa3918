use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;

/// Order-3 deceptive trap by number of ones in the block.
const TABLE: [f64; 4] = [0.9, 0.8, 0.0, 1.0];

/// Sum of 3-bit deceptive traps over consecutive bit triples.
pub fn dec3(bits: &BitString) -> Result<f64> {
    if bits.len() % 3 != 0 || bits.is_empty() {
        return Err(Error::invalid(format!(
            "dec3 needs a positive multiple of 3 bits, got {}",
            bits.len()
        )));
    }
    Ok(block_sum(bits))
}

fn block_sum(bits: &BitString) -> f64 {
    (0..bits.len() / 3)
        .map(|b| TABLE[block_ones(bits, b)])
        .sum()
}

fn block_ones(bits: &BitString, block: usize) -> usize {
    let i = 3 * block;
    bits.get(i) as usize + bits.get(i + 1) as usize + bits.get(i + 2) as usize
}

/// Concatenated order-3 deceptive functions on `n` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dec3 {
    n: usize,
}

impl Dec3 {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n % 3 != 0 {
            return Err(Error::invalid(format!("dec3 size must be a positive multiple of 3, got {n}")));
        }
        Ok(Dec3 { n })
    }
}

impl Problem for Dec3 {
    fn id(&self) -> String {
        "dec3".into()
    }

    fn len(&self) -> usize {
        self.n
    }

    fn fitness(&self, bits: &BitString) -> f64 {
        block_sum(bits)
    }

    fn known_optimum(&self) -> Option<f64> {
        Some((self.n / 3) as f64)
    }

    fn flip_gain(&self, bits: &mut BitString, _current: f64, i: usize) -> f64 {
        let block = i / 3;
        let before = block_ones(bits, block);
        let after = if bits.get(i) { before - 1 } else { before + 1 };
        TABLE[after] - TABLE[before]
    }
}
