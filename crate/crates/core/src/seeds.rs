//! Seed derivation for reproducible runs.
//!
//! A single root seed fans out into independent sub-seeds, one per random
//! consumer (dataset sampling, weight init, shuffling, dropout, GA, ...).
//! Derivation is pure arithmetic on the root seed and a domain label, so the
//! same root seed gives the same stream everywhere regardless of thread
//! count or evaluation order.

/// Derives the sub-seed for a named random domain from the root seed.
pub fn domain_seed(root: u64, domain: &str) -> u64 {
    // FNV-1a over the label, then a splitmix64 finalizer over the mix.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in domain.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(root ^ h)
}

/// Derives the `index`-th seed of a domain's stream (used for per-sample
/// seeding that must not depend on worker scheduling).
pub fn indexed_seed(domain_seed: u64, index: u64) -> u64 {
    splitmix64(domain_seed.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
