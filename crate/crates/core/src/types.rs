//! Shared domain types: tasks, instructions, observations, actions,
//! trajectories, datasets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two twin processes a piece of data belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainTag {
    Sim,
    Real,
}

impl DomainTag {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainTag::Sim => "sim",
            DomainTag::Real => "real",
        }
    }
}

/// The four tabletop tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    PickPlace,
    PushCube,
    OpenDrawer,
    CloseDrawer,
}

pub const ALL_TASKS: [TaskKind; 4] = [
    TaskKind::PickPlace,
    TaskKind::PushCube,
    TaskKind::OpenDrawer,
    TaskKind::CloseDrawer,
];

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::PickPlace => "PickPlace",
            TaskKind::PushCube => "PushCube",
            TaskKind::OpenDrawer => "OpenDrawer",
            TaskKind::CloseDrawer => "CloseDrawer",
        }
    }

    pub fn index(self) -> usize {
        match self {
            TaskKind::PickPlace => 0,
            TaskKind::PushCube => 1,
            TaskKind::OpenDrawer => 2,
            TaskKind::CloseDrawer => 3,
        }
    }

    pub fn parse(s: &str) -> Result<TaskKind> {
        match s {
            "PickPlace" => Ok(TaskKind::PickPlace),
            "PushCube" => Ok(TaskKind::PushCube),
            "OpenDrawer" => Ok(TaskKind::OpenDrawer),
            "CloseDrawer" => Ok(TaskKind::CloseDrawer),
            other => Err(Error::Parse(format!("unknown task `{other}`"))),
        }
    }
}

/// Number of distinct cube colors in PushCube.
pub const NUM_COLORS: usize = 5;
/// Length of the one-hot instruction code: 4 task slots + 5 color slots.
pub const INSTR_LEN: usize = 9;

/// A task goal: the task id plus a color index (PushCube only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instruction {
    pub task: TaskKind,
    /// Color index in `[0, 4]` for PushCube, 0 for every other task.
    pub target_index: usize,
}

impl Instruction {
    pub fn new(task: TaskKind, target_index: usize) -> Result<Instruction> {
        let max = if task == TaskKind::PushCube { NUM_COLORS - 1 } else { 0 };
        if target_index > max {
            return Err(Error::Range {
                field: "target_index",
                detail: format!("{target_index} invalid for {}", task.as_str()),
            });
        }
        Ok(Instruction { task, target_index })
    }

    /// Fixed-length one-hot code: task slot then color slot.
    pub fn encode(&self) -> [f64; INSTR_LEN] {
        let mut v = [0.0; INSTR_LEN];
        v[self.task.index()] = 1.0;
        v[4 + self.target_index] = 1.0;
        v
    }
}

/// Total observation length, identical across tasks and domains.
pub const OBS_LEN: usize = 25;

/// Observation vector layout (all slots always present, unused slots zero):
/// `[0..2)` tcp xy, `[2]` gripper open flag, `[3..15)` task object features,
/// `[15]` drawer open fraction, `[16..25)` instruction one-hot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation(pub Vec<f64>);

pub const OBS_TCP_X: usize = 0;
pub const OBS_TCP_Y: usize = 1;
pub const OBS_GRIPPER: usize = 2;
pub const OBS_OBJ_START: usize = 3;
pub const OBS_OBJ_END: usize = 15;
pub const OBS_DRAWER_FRAC: usize = 15;
pub const OBS_INSTR_START: usize = 16;

impl Observation {
    pub fn zeros() -> Observation {
        Observation(vec![0.0; OBS_LEN])
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.len() != OBS_LEN {
            return Err(Error::Parse(format!(
                "observation length {} != {OBS_LEN}",
                self.0.len()
            )));
        }
        if self.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("non-finite observation entry".into()));
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-component action bound in meters.
pub const ACTION_BOUND: f64 = 0.05;
/// Action dimensionality: planar delta plus gripper command.
pub const ACTION_DIM: usize = 3;

/// Planar delta action. `grip > 0` commands the gripper closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub dx: f64,
    pub dy: f64,
    pub grip: f64,
}

impl Action {
    pub fn new(dx: f64, dy: f64, grip: f64) -> Action {
        Action { dx, dy, grip }
    }

    /// Components clamped to bounds, as executed by the environment.
    pub fn clamped(&self) -> Action {
        Action {
            dx: self.dx.clamp(-ACTION_BOUND, ACTION_BOUND),
            dy: self.dy.clamp(-ACTION_BOUND, ACTION_BOUND),
            grip: self.grip.clamp(-1.0, 1.0),
        }
    }
}

/// One environment transition as stored in a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub obs: Observation,
    pub action: Action,
    pub reward: f64,
    pub done: bool,
}

/// An instruction-tagged observation/action/reward sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub instruction: Instruction,
    pub domain: DomainTag,
    pub steps: Vec<Step>,
    pub success: bool,
}

impl Trajectory {
    /// Checks length and the exactly-one-terminal-step invariant.
    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Parse("trajectory must have K >= 1 steps".into()));
        }
        let done_count = self.steps.iter().filter(|s| s.done).count();
        let last_done = self.steps.last().map(|s| s.done).unwrap_or(false);
        if done_count != 1 || !last_done {
            return Err(Error::Parse(
                "exactly one step may have done=true and it must be the last".into(),
            ));
        }
        for s in &self.steps {
            s.obs.validate()?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// A success-filtered collection of trajectories from one domain.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub domain: Option<DomainTag>,
    pub trajectories: Vec<Trajectory>,
    pub meta: std::collections::BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(domain: DomainTag) -> Dataset {
        Dataset {
            domain: Some(domain),
            trajectories: Vec::new(),
            meta: Default::default(),
        }
    }

    /// Appends a trajectory, enforcing the shared-domain and success-only
    /// invariants.
    pub fn push(&mut self, traj: Trajectory) -> Result<()> {
        traj.validate()?;
        if !traj.success {
            return Err(Error::Parse(
                "datasets hold successful trajectories only".into(),
            ));
        }
        match self.domain {
            Some(d) if d != traj.domain => {
                return Err(Error::Parse(format!(
                    "trajectory domain {:?} does not match dataset domain {d:?}",
                    traj.domain
                )))
            }
            None => self.domain = Some(traj.domain),
            _ => {}
        }
        self.trajectories.push(traj);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.trajectories {
            t.validate()?;
            if !t.success {
                return Err(Error::Parse(
                    "datasets hold successful trajectories only".into(),
                ));
            }
            if self.domain.is_some() && Some(t.domain) != self.domain {
                return Err(Error::Parse("mixed domains in dataset".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instruction_one_hot_layout() {
        let i = Instruction::new(TaskKind::PushCube, 3).unwrap();
        let v = i.encode();
        assert_eq!(v.len(), INSTR_LEN);
        assert_eq!(v[1], 1.0); // PushCube task slot
        assert_eq!(v[4 + 3], 1.0); // color slot
        assert_eq!(v.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn instruction_rejects_color_outside_pushcube() {
        assert!(Instruction::new(TaskKind::PickPlace, 1).is_err());
        assert!(Instruction::new(TaskKind::PushCube, 5).is_err());
        assert!(Instruction::new(TaskKind::PushCube, 4).is_ok());
    }

    #[test]
    fn trajectory_done_invariant() {
        let instr = Instruction::new(TaskKind::PickPlace, 0).unwrap();
        let step = |done| Step {
            obs: Observation::zeros(),
            action: Action::new(0.0, 0.0, -1.0),
            reward: 0.0,
            done,
        };
        let good = Trajectory {
            instruction: instr,
            domain: DomainTag::Sim,
            steps: vec![step(false), step(true)],
            success: true,
        };
        assert!(good.validate().is_ok());

        let bad_mid = Trajectory {
            steps: vec![step(true), step(true)],
            ..good.clone()
        };
        assert!(bad_mid.validate().is_err());

        let bad_none = Trajectory {
            steps: vec![step(false)],
            ..good.clone()
        };
        assert!(bad_none.validate().is_err());

        let empty = Trajectory {
            steps: vec![],
            ..good
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn dataset_rejects_mixed_domain_and_failures() {
        let instr = Instruction::new(TaskKind::PickPlace, 0).unwrap();
        let traj = |domain, success| Trajectory {
            instruction: instr,
            domain,
            steps: vec![Step {
                obs: Observation::zeros(),
                action: Action::new(0.0, 0.0, -1.0),
                reward: 0.0,
                done: true,
            }],
            success,
        };
        let mut d = Dataset::new(DomainTag::Sim);
        d.push(traj(DomainTag::Sim, true)).unwrap();
        assert!(d.push(traj(DomainTag::Real, true)).is_err());
        assert!(d.push(traj(DomainTag::Sim, false)).is_err());
        assert_eq!(d.len(), 1);
    }
}
