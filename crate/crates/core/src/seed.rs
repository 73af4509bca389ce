//! Seed derivation.
//!
//! Every random stream in a run is derived from one base seed. A replica's
//! seed is `mix(mix(base ^ fnv1a(label)) ^ index)` where `mix` is the
//! SplitMix64 finaliser, so streams for different subcommands or replicas
//! never share state and no global RNG exists.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn fnv1a(label: &str) -> u64 {
    label
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Seed for replica `index` of the stream named `label`.
pub fn derive_seed(base: u64, label: &str, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ fnv1a(label)) ^ index)
}

/// Seeds for `n` replicas, in replica order.
pub fn replica_seeds(base: u64, label: &str, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| derive_seed(base, label, i)).collect()
}
