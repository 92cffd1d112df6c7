//! Experiment configuration: the single source of run reproducibility.
//!
//! Configs are JSON documents; unknown keys are rejected, unspecified keys
//! take the documented defaults, and range violations are reported before
//! any compute starts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::twinsim::{GapProfile, RewardMode};
use crate::types::TaskKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Probability of drawing a simulation trajectory per training example.
    pub alpha: f64,
    /// Weight of the real-data supervised loss added to the RL objective.
    pub beta: f64,
    /// Discount factor.
    pub gamma: f64,
    /// GAE lambda.
    pub gae_lambda: f64,
    /// Number of most recent observations fed to the policy.
    pub history_h: usize,
    /// Action-chunk horizon.
    pub chunk_h: usize,
    /// Training seeds (one run per seed).
    pub seeds: Vec<u64>,
    pub sft_lr: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub ppo_clip: f64,
    pub entropy_coef: f64,
    /// Initial per-dimension log std of the Gaussian policy.
    pub log_std_init: f64,
    /// Chunks collected per env per PPO iteration.
    pub rollout_steps: usize,
    /// Parallel env instances during rollout collection.
    pub n_envs: usize,
    /// Optimization epochs per PPO iteration.
    pub ppo_epochs: usize,
    /// Minibatch size (in chunks) for PPO updates.
    pub ppo_minibatch: usize,
    /// Gradient steps for Stage-I SFT.
    pub sft_steps: usize,
    /// Examples per SFT batch.
    pub sft_batch: usize,
    /// Examples per real-regularizer minibatch in Stage II.
    pub reg_batch: usize,
    /// Total environment-step budget for Stage II.
    pub budget_steps: usize,
    /// Environment steps between evaluations during Stage II.
    pub eval_interval: usize,
    /// Initial states per eval set.
    pub eval_episodes: usize,
    /// Episodes per initial state during evaluation.
    pub eval_repeats: usize,
    /// Seed for the shared eval sets.
    pub eval_seed: u64,
    /// Episode step limit.
    pub max_steps: usize,
    /// Real-twin gap profile; `null` selects the documented per-task
    /// default.
    pub gap: Option<GapProfile>,
    pub task: TaskKind,
    pub reward_mode: RewardMode,
    /// Selects the unrepaired PickPlace dense formula.
    pub pickplace_literal: bool,
    /// Real demonstrations to collect (`null` = per-task default).
    pub real_demos: Option<usize>,
    /// Target size of the generated sim dataset.
    pub sim_demos: usize,
    /// Collect rollouts with one thread per env instance.
    pub parallel_rollouts: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alpha: 0.5,
            beta: 1.0,
            gamma: 0.99,
            gae_lambda: 0.95,
            history_h: 1,
            chunk_h: 4,
            seeds: vec![1, 2, 3],
            sft_lr: 2.5e-4,
            actor_lr: 3e-4,
            critic_lr: 1e-3,
            ppo_clip: 0.2,
            entropy_coef: 0.0,
            log_std_init: -3.5,
            rollout_steps: 32,
            n_envs: 8,
            ppo_epochs: 4,
            ppo_minibatch: 256,
            sft_steps: 4000,
            sft_batch: 64,
            reg_batch: 64,
            budget_steps: 300_000,
            eval_interval: 30_000,
            eval_episodes: 16,
            eval_repeats: 2,
            eval_seed: 1234,
            max_steps: 120,
            gap: None,
            task: TaskKind::PickPlace,
            reward_mode: RewardMode::Dense,
            pickplace_literal: false,
            real_demos: None,
            sim_demos: 1000,
            parallel_rollouts: false,
        }
    }
}

impl ExperimentConfig {
    /// The real-twin gap profile for this run.
    pub fn gap_profile(&self) -> GapProfile {
        self.gap
            .clone()
            .unwrap_or_else(|| GapProfile::default_real(self.task))
    }

    /// Real demo count: explicit value or the per-task default
    /// (50/50/20/30).
    pub fn real_demo_count(&self) -> usize {
        self.real_demos.unwrap_or(match self.task {
            TaskKind::PickPlace => 50,
            TaskKind::PushCube => 50,
            TaskKind::OpenDrawer => 20,
            TaskKind::CloseDrawer => 30,
        })
    }

    pub fn validate(&self) -> Result<()> {
        fn range(field: &'static str, ok: bool, detail: String) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Range { field, detail })
            }
        }
        range("alpha", (0.0..=1.0).contains(&self.alpha), format!("{} not in [0,1]", self.alpha))?;
        range("beta", self.beta >= 0.0 && self.beta.is_finite(), format!("{} < 0", self.beta))?;
        range("gamma", self.gamma > 0.0 && self.gamma < 1.0, format!("{} not in (0,1)", self.gamma))?;
        range(
            "gae_lambda",
            (0.0..=1.0).contains(&self.gae_lambda),
            format!("{} not in [0,1]", self.gae_lambda),
        )?;
        range("history_h", self.history_h >= 1, "must be >= 1".into())?;
        range("chunk_h", self.chunk_h >= 1, "must be >= 1".into())?;
        range("sft_lr", self.sft_lr > 0.0, format!("{} <= 0", self.sft_lr))?;
        range("actor_lr", self.actor_lr > 0.0, format!("{} <= 0", self.actor_lr))?;
        range("critic_lr", self.critic_lr > 0.0, format!("{} <= 0", self.critic_lr))?;
        range("ppo_clip", self.ppo_clip > 0.0 && self.ppo_clip < 1.0, format!("{} not in (0,1)", self.ppo_clip))?;
        range("entropy_coef", self.entropy_coef >= 0.0, "must be >= 0".into())?;
        range("rollout_steps", self.rollout_steps >= 1, "must be >= 1".into())?;
        range("n_envs", self.n_envs >= 1, "must be >= 1".into())?;
        range("ppo_epochs", self.ppo_epochs >= 1, "must be >= 1".into())?;
        range("ppo_minibatch", self.ppo_minibatch >= 1, "must be >= 1".into())?;
        range("sft_steps", self.sft_steps >= 1, "must be >= 1".into())?;
        range("sft_batch", self.sft_batch >= 1, "must be >= 1".into())?;
        range("reg_batch", self.reg_batch >= 1, "must be >= 1".into())?;
        range("budget_steps", self.budget_steps >= 1, "must be >= 1".into())?;
        range("eval_interval", self.eval_interval >= 1, "must be >= 1".into())?;
        range("eval_episodes", self.eval_episodes >= 1, "must be >= 1".into())?;
        range("eval_repeats", self.eval_repeats >= 1, "must be >= 1".into())?;
        range("max_steps", self.max_steps >= 1, "must be >= 1".into())?;
        range("seeds", !self.seeds.is_empty(), "at least one seed".into())?;
        if let Some(gap) = &self.gap {
            gap.validate()?;
        }
        if let Some(n) = self.real_demos {
            range("real_demos", n >= 1, "must be >= 1".into())?;
        }
        range("sim_demos", self.sim_demos >= 1, "must be >= 1".into())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!(
                "line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_unspecified_fields() {
        let cfg =
            ExperimentConfig::from_json(r#"{"alpha":0.5,"beta":1.0,"task":"PickPlace"}"#).unwrap();
        assert_eq!(cfg.alpha, 0.5);
        assert_eq!(cfg.beta, 1.0);
        assert_eq!(cfg.gamma, 0.99);
        assert_eq!(cfg.gae_lambda, 0.95);
        assert_eq!(cfg.history_h, 1);
        assert_eq!(cfg.chunk_h, 4);
    }

    #[test]
    fn out_of_range_alpha_names_field() {
        match ExperimentConfig::from_json(r#"{"alpha":1.5}"#) {
            Err(Error::Range { field, .. }) => assert_eq!(field, "alpha"),
            other => panic!("expected RangeError, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_parse_error() {
        assert!(matches!(
            ExperimentConfig::from_json(""),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"alfa":0.5}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn missing_file_reported() {
        assert!(matches!(
            load_config(Path::new("/nonexistent/rlco.json")),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
}
