//! Desk-scale sim-real co-training for chunked manipulation policies.
//!
//! Twin planar environments (an exact "sim" twin and a gap-perturbed "real"
//! twin), scripted-expert demonstration collection, object-frame
//! demonstration scaling, Stage-I supervised co-training on an alpha-mixture
//! of both datasets, Stage-II PPO in the sim twin regularized by a
//! beta-weighted supervised loss on real demonstrations, and the experiment
//! harness that reproduces the comparative results at desk scale.

pub mod config;
pub mod dataset;
pub mod error;
pub mod rng;
pub mod policy;
pub mod twinsim;
pub mod types;

pub use config::{load_config, ExperimentConfig};
pub use dataset::{read_dataset, write_dataset};
pub use error::{Error, Result};
pub use rng::{seeded_rng, substream, RandomStream};
