//! Memory-bounded streaming multi-armed bandits.
//!
//! Arms arrive one at a time and are lost unless the policy keeps them. A
//! [`env::BanditEnvironment`] enforces the single-pass rule, the pull budget
//! and the memory accounting; the policies in [`algorithms`] explore the
//! stream and the explore-and-commit wrapper spends what is left of the
//! horizon on their answer. [`harness`] runs seeded experiment grids and
//! writes the results.

pub mod algorithms;
pub mod env;
pub mod error;
pub mod harness;
pub mod instances;
pub mod rng;
pub mod stats;

pub use algorithms::{
    explore_and_commit, AlgorithmId, EpsBestParams, Mode, PolicyOutcome, StreamingPolicy,
};
pub use env::{ArmHandle, BanditEnvironment, StreamInstance};
pub use error::{EnvError, Error, Result};
