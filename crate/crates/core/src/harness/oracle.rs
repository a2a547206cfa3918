use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problems::SpinGlassInstance;

/// Largest instance the exhaustive search accepts.
pub const ORACLE_MAX_SPINS: usize = 26;

/// Exact ground state by enumeration.
///
/// Spin 0 is pinned to `+1` (a global flip leaves the energy unchanged) and
/// the remaining `2^(n-1)` assignments are visited in Gray-code order, so
/// each step flips one spin and updates the energy from its four couplings.
/// Returns the minimum energy and one assignment attaining it.
pub fn brute_force_ground_state(instance: &SpinGlassInstance) -> Result<(i64, BitString)> {
    let n = instance.spins();
    if n > ORACLE_MAX_SPINS {
        return Err(Error::invalid(format!(
            "exhaustive search supports at most {ORACLE_MAX_SPINS} spins, instance has {n}"
        )));
    }
    let neighbours: Vec<[(usize, i64); 4]> = (0..n)
        .map(|i| instance.neighbours(i).map(|(j, c)| (j, c as i64)))
        .collect();
    let mut spins = vec![1i64; n];
    let mut energy = instance.energy(&BitString::ones(n))?;
    let mut best = (energy, 0u64);
    let free = n - 1;
    for step in 1u64..(1u64 << free) {
        let i = step.trailing_zeros() as usize + 1;
        let field: i64 = neighbours[i].iter().map(|&(j, c)| c * spins[j]).sum();
        energy -= 2 * spins[i] * field;
        spins[i] = -spins[i];
        if energy < best.0 {
            best = (energy, step ^ (step >> 1));
        }
    }
    let (energy, gray) = best;
    let witness = BitString::from_bools((0..n).map(|i| i == 0 || (gray >> (i - 1)) & 1 == 0));
    debug_assert_eq!(instance.energy(&witness).ok(), Some(energy));
    Ok((energy, witness))
}
