//! Seeded traffic models: emission distributions, Markov state machines for
//! streams and packets, the Poisson circuit process, and seed derivation.

mod circuit;
mod dist;
mod markov;
mod seed;

pub use circuit::{CircuitProcess, MICROS_PER_10_MIN};
pub use dist::{DistributionSpec, Family};
pub use markov::{
    default_models, load_model, EventKind, MarkovModel, ModelDocument, StateDocument, Walk,
    WalkEvent, DEFAULT_BUDGET, DEFAULT_MEAN_STREAMS_PER_CIRCUIT, DEFAULT_PACKET_BYTES,
};
pub use seed::{derive_seed, seeded_rng, SeedRole, SimRng};
