//! The pair of digital-twin planar environments: world state, gap
//! injection, rewards, initial-state randomization.

pub mod env;
pub mod gap;
pub mod init;
pub mod reward;
pub mod state;

pub use env::{EnvInstance, StepInfo, DEFAULT_MAX_STEPS};
pub use gap::GapProfile;
pub use init::{
    build_eval_set, build_eval_set_with, perturb_initial_state, sample_initial_state,
    InitStateSpec, PerturbationId, Rect, ALL_PERTURBATIONS,
};
pub use reward::{compute_reward, max_reward, shaping_rd, RewardMode};
pub use state::{ObjectState, WorldState};
