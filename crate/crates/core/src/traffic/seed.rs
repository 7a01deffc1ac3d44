//! Deterministic seed derivation.
//!
//! A child seed is computed from a 64-bit master seed and a path of indices by
//! a chain of SplitMix64 finalizers:
//!
//! ```text
//! h = mix(master ^ 0x6a09e667f3bcc909)
//! for each index i: h = mix(h ^ mix(i + 0x9e3779b97f4a7c15))
//! ```
//!
//! `mix` is a bijection on `u64`, so for a fixed prefix distinct last
//! indices always produce distinct seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for every random draw in the crate.
pub type SimRng = ChaCha8Rng;

const MASTER_SALT: u64 = 0x6a09_e667_f3bc_c909;
const INDEX_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(master ^ MASTER_SALT), |h, &i| {
        mix(h ^ mix(i.wrapping_add(INDEX_SALT)))
    })
}

pub fn seeded_rng(master: u64, path: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, path))
}

/// Fixed path components naming what a derived stream of randomness is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum SeedRole {
    RelaySample = 1,
    FlagAssign = 2,
    RelayPlace = 3,
    ClientPlace = 4,
    AuxPlace = 5,
    CircuitArrivals = 10,
    PathSelect = 11,
    StreamModel = 12,
    PacketModel = 13,
    PerfSchedule = 14,
    ServerChoice = 15,
}

impl SeedRole {
    pub fn id(self) -> u64 {
        self as u64
    }
}
