//! The chunked Gaussian policy, value function, SFT loss, and gradient
//! checking: the differentiable core every trainer consumes.

pub mod checkpoint;
pub mod gaussian;
pub mod gradcheck;
pub mod mlp;
pub mod optim;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use gaussian::{chunk_to_actions, ActionDistribution};
pub use gradcheck::grad_check;
pub use mlp::{Mlp, MlpCache, MlpGrads};
pub use optim::Adam;

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::types::{Action, Instruction, Observation, ACTION_DIM, OBS_INSTR_START, OBS_LEN};

pub const HIDDEN: usize = 64;
pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;

/// Parameters of the chunked Gaussian policy: an MLP mean head over the
/// flattened observation history plus a state-independent per-dimension log
/// std.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    pub history_h: usize,
    pub chunk_h: usize,
    pub mlp: Mlp,
    pub log_std: Vec<f64>,
}

/// Gradients shaped like `PolicyParams`.
#[derive(Debug, Clone)]
pub struct PolicyGrads {
    pub mlp: MlpGrads,
    pub log_std: Vec<f64>,
}

impl PolicyGrads {
    pub fn zero(&mut self) {
        self.mlp.zero();
        self.log_std.fill(0.0);
    }

    pub fn axpy(&mut self, s: f64, other: &PolicyGrads) {
        self.mlp.axpy(s, &other.mlp);
        for (a, b) in self.log_std.iter_mut().zip(&other.log_std) {
            *a += s * b;
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.mlp.flatten_into(&mut out);
        out.extend_from_slice(&self.log_std);
        out
    }
}

impl PolicyParams {
    pub fn init(history_h: usize, chunk_h: usize, log_std_init: f64, rng: &mut RandomStream) -> PolicyParams {
        let out = ACTION_DIM * chunk_h;
        let mlp = Mlp::init(&[OBS_LEN * history_h, HIDDEN, HIDDEN, out], rng);
        PolicyParams {
            history_h,
            chunk_h,
            mlp,
            log_std: vec![log_std_init.clamp(LOG_STD_MIN, LOG_STD_MAX); out],
        }
    }

    pub fn chunk_dim(&self) -> usize {
        ACTION_DIM * self.chunk_h
    }

    pub fn n_params(&self) -> usize {
        self.mlp.n_params() + self.log_std.len()
    }

    pub fn grads(&self) -> PolicyGrads {
        PolicyGrads {
            mlp: self.mlp.grads(),
            log_std: vec![0.0; self.log_std.len()],
        }
    }

    /// Flattened network input for an observation history; the instruction
    /// one-hot block of each observation is stamped with `instr`.
    pub fn input_vec(&self, obs_hist: &[Observation], instr: &Instruction) -> Result<Vec<f64>> {
        if obs_hist.len() != self.history_h {
            return Err(Error::BadHistoryLength {
                expected: self.history_h,
                got: obs_hist.len(),
            });
        }
        let code = instr.encode();
        let mut input = Vec::with_capacity(OBS_LEN * self.history_h);
        for obs in obs_hist {
            obs.validate()?;
            input.extend_from_slice(obs.as_slice());
            let start = input.len() - OBS_LEN + OBS_INSTR_START;
            input[start..].copy_from_slice(&code);
        }
        Ok(input)
    }

    /// Deterministic map from an observation history to the chunk
    /// distribution.
    pub fn forward(&self, obs_hist: &[Observation], instr: &Instruction) -> Result<ActionDistribution> {
        let input = self.input_vec(obs_hist, instr)?;
        let cache = self.mlp.forward(&input);
        Ok(self.dist_from_cache(&cache))
    }

    /// Distribution from an already-computed forward cache (trainer hot
    /// path).
    pub fn dist_from_cache(&self, cache: &MlpCache) -> ActionDistribution {
        ActionDistribution {
            mean: self.mlp.output(cache).to_vec(),
            std: self.log_std.iter().map(|l| l.exp()).collect(),
        }
    }

    /// Mean-chunk actions for deterministic evaluation.
    pub fn act_mean(&self, obs_hist: &[Observation], instr: &Instruction) -> Result<Vec<Action>> {
        let dist = self.forward(obs_hist, instr)?;
        Ok(chunk_to_actions(&dist.mean))
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.mlp.flatten_into(&mut out);
        out.extend_from_slice(&self.log_std);
        out
    }

    pub fn set_from_flat(&mut self, flat: &[f64]) {
        let used = self.mlp.set_from_flat(flat);
        let len = self.log_std.len();
        self.log_std.copy_from_slice(&flat[used..used + len]);
        self.clamp_log_std();
    }

    pub fn clamp_log_std(&mut self) {
        for l in &mut self.log_std {
            *l = l.clamp(LOG_STD_MIN, LOG_STD_MAX);
        }
    }
}

/// Value-function parameters: same observation encoding as the actor, scalar
/// output.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticParams {
    pub history_h: usize,
    pub mlp: Mlp,
}

impl CriticParams {
    pub fn init(history_h: usize, rng: &mut RandomStream) -> CriticParams {
        CriticParams {
            history_h,
            mlp: Mlp::init(&[OBS_LEN * history_h, HIDDEN, HIDDEN, 1], rng),
        }
    }

    pub fn forward(&self, obs_hist: &[Observation], instr: &Instruction) -> Result<f64> {
        let input = critic_input(self.history_h, obs_hist, instr)?;
        let cache = self.mlp.forward(&input);
        Ok(self.mlp.output(&cache)[0])
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.mlp.flatten_into(&mut out);
        out
    }

    pub fn set_from_flat(&mut self, flat: &[f64]) {
        self.mlp.set_from_flat(flat);
    }
}

pub fn critic_input(history_h: usize, obs_hist: &[Observation], instr: &Instruction) -> Result<Vec<f64>> {
    if obs_hist.len() != history_h {
        return Err(Error::BadHistoryLength {
            expected: history_h,
            got: obs_hist.len(),
        });
    }
    let code = instr.encode();
    let mut input = Vec::with_capacity(OBS_LEN * history_h);
    for obs in obs_hist {
        obs.validate()?;
        input.extend_from_slice(obs.as_slice());
        let start = input.len() - OBS_LEN + OBS_INSTR_START;
        input[start..].copy_from_slice(&code);
    }
    Ok(input)
}

/// Rolling window of the most recent `H` observations with episode-start
/// padding that repeats the first observation.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    h: usize,
    buf: std::collections::VecDeque<Observation>,
}

impl HistoryBuffer {
    pub fn new(h: usize) -> HistoryBuffer {
        HistoryBuffer {
            h,
            buf: std::collections::VecDeque::with_capacity(h),
        }
    }

    pub fn reset(&mut self, first: Observation) {
        self.buf.clear();
        for _ in 0..self.h {
            self.buf.push_back(first.clone());
        }
    }

    pub fn push(&mut self, obs: Observation) {
        if self.buf.len() == self.h {
            self.buf.pop_front();
        }
        self.buf.push_back(obs);
    }

    /// Oldest-to-newest history of length exactly `H`.
    pub fn snapshot(&self) -> Vec<Observation> {
        assert_eq!(self.buf.len(), self.h, "history buffer not reset");
        self.buf.iter().cloned().collect()
    }
}

/// A supervised training example: history, instruction, expert chunk.
#[derive(Debug, Clone)]
pub struct SftExample {
    pub obs_hist: Vec<Observation>,
    pub instr: Instruction,
    pub expert_chunk: Vec<f64>,
}

/// L1 chunk-regression loss and its exact parameter gradient.
///
/// `loss = mean_batch( mean_j |mean_j - expert_j| )`; the log-std carries no
/// gradient under this objective.
pub fn sft_loss(policy: &PolicyParams, batch: &[SftExample]) -> Result<(f64, PolicyGrads)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let dim = policy.chunk_dim();
    let mut grads = policy.grads();
    let mut loss = 0.0;
    let scale = 1.0 / (batch.len() as f64 * dim as f64);
    for ex in batch {
        if ex.expert_chunk.len() != dim {
            return Err(Error::Parse(format!(
                "expert chunk length {} != {dim}",
                ex.expert_chunk.len()
            )));
        }
        let input = policy.input_vec(&ex.obs_hist, &ex.instr)?;
        let cache = policy.mlp.forward(&input);
        let mean = policy.mlp.output(&cache);
        let mut d_mean = vec![0.0; dim];
        for j in 0..dim {
            let diff = mean[j] - ex.expert_chunk[j];
            loss += diff.abs() * scale;
            // L1 subgradient, zero at the kink.
            d_mean[j] = if diff > 0.0 {
                scale
            } else if diff < 0.0 {
                -scale
            } else {
                0.0
            };
        }
        policy.mlp.backward(&cache, &d_mean, &mut grads.mlp);
    }
    Ok((loss, grads))
}
