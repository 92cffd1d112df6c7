//! The parameter delta that turns the sim twin into the real twin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::TaskKind;

/// Sim-to-real discrepancy knobs. The sim twin always runs the zero profile;
/// only the real twin carries a nonzero one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapProfile {
    /// Added elementwise to the leading `obs_bias.len()` observation
    /// dimensions (meters for position slots).
    pub obs_bias: Vec<f64>,
    /// Std of Gaussian noise added to the continuous observation block.
    pub obs_noise_std: f64,
    /// Std of Gaussian noise added to executed (dx, dy).
    pub action_noise_std: f64,
    /// Scales push displacement and drawer motion per unit of commanded
    /// action.
    pub friction_scale: f64,
    /// Added to object half sizes in contact computations.
    pub geometry_offset: f64,
}

impl Default for GapProfile {
    fn default() -> Self {
        GapProfile::zero()
    }
}

impl GapProfile {
    /// The identity profile used by the sim twin.
    pub fn zero() -> GapProfile {
        GapProfile {
            obs_bias: Vec::new(),
            obs_noise_std: 0.0,
            action_noise_std: 0.0,
            friction_scale: 1.0,
            geometry_offset: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.obs_bias.iter().all(|&b| b == 0.0)
            && self.obs_noise_std == 0.0
            && self.action_noise_std == 0.0
            && self.friction_scale == 1.0
            && self.geometry_offset == 0.0
    }

    /// The documented default real-twin profile for a task: a fixed +25 mm
    /// miscalibration on the observed object-feature positions (tcp
    /// proprioception stays exact), mild sensor and actuation noise, and 10%
    /// under-actuated contact motion.
    pub fn default_real(task: TaskKind) -> GapProfile {
        let mut bias = vec![0.0; crate::types::OBS_LEN];
        let dims: &[usize] = match task {
            TaskKind::PickPlace => &[3, 4, 6, 7],
            TaskKind::PushCube => &[3, 4, 6, 7, 9, 10, 12, 13],
            TaskKind::OpenDrawer | TaskKind::CloseDrawer => &[3, 4, 5, 6],
        };
        for &d in dims {
            bias[d] = 0.025;
        }
        GapProfile {
            obs_bias: bias,
            obs_noise_std: 0.003,
            action_noise_std: 0.004,
            friction_scale: 0.9,
            geometry_offset: 0.002,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.obs_noise_std < 0.0 {
            return Err(Error::Range {
                field: "gap.obs_noise_std",
                detail: format!("{} < 0", self.obs_noise_std),
            });
        }
        if self.action_noise_std < 0.0 {
            return Err(Error::Range {
                field: "gap.action_noise_std",
                detail: format!("{} < 0", self.action_noise_std),
            });
        }
        if self.friction_scale <= 0.0 {
            return Err(Error::Range {
                field: "gap.friction_scale",
                detail: format!("{} <= 0", self.friction_scale),
            });
        }
        if self.obs_bias.len() > crate::types::OBS_LEN {
            return Err(Error::Range {
                field: "gap.obs_bias",
                detail: format!("length {} > {}", self.obs_bias.len(), crate::types::OBS_LEN),
            });
        }
        if self.obs_bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::Range {
                field: "gap.obs_bias",
                detail: "non-finite entry".into(),
            });
        }
        Ok(())
    }
}
