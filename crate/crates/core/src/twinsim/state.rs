//! Ground-truth world state for the planar twins, plus the observation
//! encoding shared by both domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{
    Instruction, Observation, TaskKind, OBS_DRAWER_FRAC, OBS_GRIPPER, OBS_INSTR_START, OBS_LEN,
    OBS_OBJ_START, OBS_TCP_X, OBS_TCP_Y,
};

/// Workspace is the square `[0, WORKSPACE]^2` meters.
pub const WORKSPACE: f64 = 0.6;
/// Effective radius of the tool center point for contact.
pub const TCP_RADIUS: f64 = 0.01;
/// Grasp engages when the closed gripper is within this distance of an
/// object center.
pub const GRASP_RADIUS: f64 = 0.02;
/// Placement requires release with the object center within this distance of
/// the bowl center.
pub const PLACE_RADIUS: f64 = 0.04;
/// An open parallel gripper straddles objects up to this half size; wider
/// objects are shoved by any contact.
pub const STRADDLE_HALF: f64 = 0.022;
/// Drawer handle engagement radius.
pub const HANDLE_RADIUS: f64 = 0.03;
/// Drawer prismatic travel in meters; open fraction 1 pulls the front edge
/// this far from the closed pose.
pub const DRAWER_TRAVEL: f64 = 0.20;
/// Open fraction at or above which OpenDrawer succeeds.
pub const OPEN_SUCCESS_FRAC: f64 = 0.9;
/// Open fraction at or below which CloseDrawer succeeds.
pub const CLOSE_SUCCESS_FRAC: f64 = 0.05;
/// Margin behind the cube for the pushing pose.
pub const PUSH_MARGIN: f64 = 0.01;
/// Distance the target cube must travel along the push axis.
pub const PUSH_GOAL_OFFSET: f64 = 0.20;
/// Orthogonal tolerance band around the goal center for push success.
pub const PUSH_ORTH_TOL: f64 = 0.05;

pub type Vec2 = (f64, f64);

pub fn dist(a: Vec2, b: Vec2) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

pub fn clamp_ws(p: Vec2) -> Vec2 {
    (p.0.clamp(0.0, WORKSPACE), p.1.clamp(0.0, WORKSPACE))
}

/// A movable object (pick-and-place item or colored cube) or, for the drawer
/// tasks, the drawer body whose `pos` is the closed front-edge pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub pos: Vec2,
    pub half_size: f64,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub task: TaskKind,
    pub tcp: Vec2,
    pub gripper_open: bool,
    pub objects: Vec<ObjectState>,
    pub bowl_center: Option<Vec2>,
    pub goal_center: Option<Vec2>,
    pub drawer_open_frac: Option<f64>,
    /// Index into `objects` of the instructed target (PushCube) or the single
    /// manipulated object (PickPlace).
    pub target_object: Option<usize>,
    pub is_grasped: bool,
    pub is_placed: bool,
    pub grasped_index: Option<usize>,
    /// Episode flags: grasp/placement ever happened this episode.
    pub ever_grasped: bool,
    pub ever_placed: bool,
    pub time_step: usize,
}

impl WorldState {
    /// Fixed robot start pose for a task.
    pub fn tcp_start(task: TaskKind) -> Vec2 {
        match task {
            TaskKind::PickPlace => (0.30, 0.10),
            TaskKind::PushCube => (0.30, 0.05),
            TaskKind::OpenDrawer | TaskKind::CloseDrawer => (0.30, 0.15),
        }
    }

    pub fn new(task: TaskKind) -> WorldState {
        WorldState {
            task,
            tcp: Self::tcp_start(task),
            gripper_open: true,
            objects: Vec::new(),
            bowl_center: None,
            goal_center: None,
            drawer_open_frac: None,
            target_object: None,
            is_grasped: false,
            is_placed: false,
            grasped_index: None,
            ever_grasped: false,
            ever_placed: false,
            time_step: 0,
        }
    }

    /// Current drawer handle position (front-edge midpoint, pulled toward
    /// the robot as the drawer opens).
    pub fn handle_pos(&self) -> Option<Vec2> {
        let frac = self.drawer_open_frac?;
        let front = self.objects.first()?;
        Some((front.pos.0, front.pos.1 - frac * DRAWER_TRAVEL))
    }

    /// The instruction this state's goal corresponds to.
    pub fn instruction(&self) -> Result<Instruction> {
        let color = match self.task {
            TaskKind::PushCube => {
                let idx = self.target_object.ok_or_else(|| {
                    Error::InvalidInitState("PushCube state needs a target_object".into())
                })?;
                self.objects
                    .get(idx)
                    .ok_or_else(|| Error::InvalidInitState("target_object out of range".into()))?
                    .color
            }
            _ => 0,
        };
        Instruction::new(self.task, color)
    }

    /// Task success predicate on the current state.
    pub fn success(&self) -> bool {
        match self.task {
            TaskKind::PickPlace => self.is_placed,
            TaskKind::PushCube => {
                let (Some(ti), Some(goal)) = (self.target_object, self.goal_center) else {
                    return false;
                };
                let cube = self.objects[ti].pos;
                // Pushed beyond the goal center along +y, inside the
                // orthogonal tolerance band.
                cube.1 >= goal.1 && (cube.0 - goal.0).abs() <= PUSH_ORTH_TOL
            }
            TaskKind::OpenDrawer => self.drawer_open_frac.unwrap_or(0.0) >= OPEN_SUCCESS_FRAC,
            TaskKind::CloseDrawer => self.drawer_open_frac.unwrap_or(1.0) <= CLOSE_SUCCESS_FRAC,
        }
    }

    /// Validates state invariants for use as an initial state.
    pub fn validate_init(&self) -> Result<()> {
        let in_ws = |p: Vec2| p.0 >= 0.0 && p.0 <= WORKSPACE && p.1 >= 0.0 && p.1 <= WORKSPACE;
        if !in_ws(self.tcp) {
            return Err(Error::InvalidInitState(format!(
                "tcp {:?} outside workspace",
                self.tcp
            )));
        }
        for (i, o) in self.objects.iter().enumerate() {
            if !in_ws(o.pos) {
                return Err(Error::InvalidInitState(format!(
                    "object {i} at {:?} outside workspace",
                    o.pos
                )));
            }
            if o.half_size <= 0.0 {
                return Err(Error::InvalidInitState(format!(
                    "object {i} half_size {} <= 0",
                    o.half_size
                )));
            }
        }
        let is_drawer = matches!(self.task, TaskKind::OpenDrawer | TaskKind::CloseDrawer);
        match (is_drawer, self.drawer_open_frac) {
            (true, None) => {
                return Err(Error::InvalidInitState(
                    "drawer task requires drawer_open_frac".into(),
                ))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidInitState(
                    "drawer_open_frac present on a non-drawer task".into(),
                ))
            }
            (true, Some(f)) if !(0.0..=1.0).contains(&f) => {
                return Err(Error::InvalidInitState(format!(
                    "drawer_open_frac {f} outside [0,1]"
                )))
            }
            _ => {}
        }
        match self.task {
            TaskKind::PickPlace => {
                if self.objects.len() != 1 {
                    return Err(Error::InvalidInitState(
                        "PickPlace requires exactly one object".into(),
                    ));
                }
                if self.bowl_center.is_none() {
                    return Err(Error::InvalidInitState("PickPlace requires a bowl".into()));
                }
            }
            TaskKind::PushCube => {
                if self.objects.len() != 3 {
                    return Err(Error::InvalidInitState(
                        "PushCube requires exactly three cubes".into(),
                    ));
                }
                if self.target_object.map_or(true, |t| t >= 3) {
                    return Err(Error::InvalidInitState(
                        "PushCube requires target_object in 0..3".into(),
                    ));
                }
                if self.goal_center.is_none() {
                    return Err(Error::InvalidInitState("PushCube requires a goal".into()));
                }
            }
            TaskKind::OpenDrawer | TaskKind::CloseDrawer => {
                if self.objects.len() != 1 {
                    return Err(Error::InvalidInitState(
                        "drawer tasks use objects[0] as the drawer front".into(),
                    ));
                }
            }
        }
        if self.is_placed && !self.ever_grasped {
            return Err(Error::InvalidInitState(
                "is_placed requires a preceding grasp".into(),
            ));
        }
        Ok(())
    }

    /// Ground-truth feature encoding (sim-twin observation). The real twin
    /// corrupts this via its gap profile.
    pub fn observe_clean(&self, instr: &Instruction) -> Observation {
        let mut v = vec![0.0; OBS_LEN];
        v[OBS_TCP_X] = self.tcp.0;
        v[OBS_TCP_Y] = self.tcp.1;
        v[OBS_GRIPPER] = if self.gripper_open { 1.0 } else { 0.0 };
        let b = OBS_OBJ_START;
        match self.task {
            TaskKind::PickPlace => {
                let o = &self.objects[0];
                let bowl = self.bowl_center.unwrap_or((0.0, 0.0));
                v[b] = o.pos.0;
                v[b + 1] = o.pos.1;
                v[b + 2] = o.half_size;
                v[b + 3] = bowl.0;
                v[b + 4] = bowl.1;
                v[b + 5] = if self.is_grasped { 1.0 } else { 0.0 };
                v[b + 6] = if self.is_placed { 1.0 } else { 0.0 };
            }
            TaskKind::PushCube => {
                for (i, o) in self.objects.iter().enumerate() {
                    v[b + 3 * i] = o.pos.0;
                    v[b + 3 * i + 1] = o.pos.1;
                    v[b + 3 * i + 2] = o.color as f64 / 4.0;
                }
                let goal = self.goal_center.unwrap_or((0.0, 0.0));
                v[b + 9] = goal.0;
                v[b + 10] = goal.1;
            }
            TaskKind::OpenDrawer | TaskKind::CloseDrawer => {
                let front = &self.objects[0];
                let handle = self.handle_pos().unwrap_or(front.pos);
                v[b] = front.pos.0;
                v[b + 1] = front.pos.1;
                v[b + 2] = handle.0;
                v[b + 3] = handle.1;
            }
        }
        v[OBS_DRAWER_FRAC] = self.drawer_open_frac.unwrap_or(0.0);
        let code = instr.encode();
        v[OBS_INSTR_START..OBS_INSTR_START + code.len()].copy_from_slice(&code);
        Observation(v)
    }
}
