use sha2::{Digest, Sha256};

/// Per-run seed split off a master seed.
///
/// `stream` names the purpose (problem and mode), `size` the problem or
/// population size and `index` the run. Distinct inputs give independent
/// seeds, and any single run can be replayed from the master seed alone.
pub fn derive_seed(master: u64, stream: &str, size: usize, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((stream.len() as u64).to_le_bytes());
    h.update(stream.as_bytes());
    h.update((size as u64).to_le_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(first)
}
