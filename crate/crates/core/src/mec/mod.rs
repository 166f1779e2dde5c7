//! Counting, enumerating and sampling members of a Markov equivalence class.

mod count;
mod enumerate;
mod rng;
mod sample;

pub use count::{count_mec, count_with_prior, rooted_sizes, Hypothesis, MecCount, MecCounter};
pub use enumerate::{enumerate_mec, DEFAULT_ENUMERATION_CAP};
pub use rng::RandomSource;
pub use sample::{
    sample_fast, sample_uniform, FastSampler, FastSamplerConfig, Sampler, SamplerKind, UniformSampler,
};
