//! Seed derivation. Every random stream in an experiment is seeded from
//! `derive_seed(master, index, role)`; the mixing below is part of the
//! output format and must not change between versions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::belief::Strategy;

/// The generator used for every experiment stream.
pub type ExperimentRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const INDEX_MUL: u64 = 0xd1b5_4a32_d192_ed03;
const ROLE_MUL: u64 = 0xaef1_7502_108e_f2d9;

/// One step of the SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// What a random stream is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    States,
    Observables,
    Truth,
    Noise,
    /// Shot stream of one strategy or observable-set arm within a trial.
    Shots(u32),
}

impl Role {
    pub fn tag(self) -> u64 {
        match self {
            Role::States => 1,
            Role::Observables => 2,
            Role::Truth => 3,
            Role::Noise => 4,
            Role::Shots(arm) => 0x100 + u64::from(arm),
        }
    }

    pub fn shots_for(strategy: Strategy) -> Self {
        Role::Shots(match strategy {
            Strategy::InfoOptimized => 0,
            Strategy::Random => 1,
            Strategy::FixedBest => 2,
        })
    }
}

pub fn derive_seed(master: u64, index: u64, role: Role) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ index.wrapping_mul(INDEX_MUL));
    splitmix64(b ^ role.tag().wrapping_mul(ROLE_MUL))
}

pub fn stream(master: u64, index: u64, role: Role) -> ExperimentRng {
    ExperimentRng::seed_from_u64(derive_seed(master, index, role))
}
