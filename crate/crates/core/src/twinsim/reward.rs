//! Per-task reward functions for the twin environments.
//!
//! Dense rewards are divided by the per-task per-step maximum so the
//! normalized per-step dense reward never exceeds 1, keeping scales
//! comparable across tasks. Terminal success bonuses replace the shaping
//! terms on the step they fire.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::twinsim::state::{dist, WorldState, PUSH_MARGIN};
use crate::types::TaskKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RewardMode {
    Dense,
    Sparse,
}

/// Smooth distance shaping `1 - tanh(10 x)`: 1 at contact, decaying toward 0.
pub fn shaping_rd(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::NegativeDistance(x));
    }
    Ok(1.0 - (10.0 * x).tanh())
}

/// Analytic per-step maximum of the dense reward, used as the normalization
/// divisor.
///
/// - PickPlace: the repaired dense formula is `min{1, ...}` with success
///   forcing 1, so its supremum is 1.
/// - PushCube: the success branch pays 3.0 and the shaping branch is at most
///   `r_reach + r_place <= 2`.
/// - OpenDrawer: the terminal bonus 5.0 dominates the shaping branch
///   (`r_reach + 2*open_frac <= 3`).
/// - CloseDrawer: the terminal bonus 5.0 dominates the progress branch
///   (`5*clip(delta) - 0.01 < 5`).
pub fn max_reward(task: TaskKind) -> f64 {
    match task {
        TaskKind::PickPlace => 1.0,
        TaskKind::PushCube => 3.0,
        TaskKind::OpenDrawer => 5.0,
        TaskKind::CloseDrawer => 5.0,
    }
}

/// Progress scale for CloseDrawer.
pub const CLOSE_PROGRESS_SCALE: f64 = 5.0;
/// Per-step time penalty for CloseDrawer.
pub const CLOSE_TIME_PENALTY: f64 = 0.01;
/// Drawer terminal success bonus.
pub const DRAWER_TERMINAL_BONUS: f64 = 5.0;
/// Reach shaping saturates once the drawer has started to open.
pub const OPEN_REACH_SAT_FRAC: f64 = 0.02;

/// The pre-defined pushing pose: behind the cube along the push axis by one
/// half size plus a small margin.
pub fn push_pose(cube: (f64, f64), half_size: f64) -> (f64, f64) {
    // Push direction is +y; the pushing pose sits behind the cube.
    (cube.0, cube.1 - (half_size + PUSH_MARGIN))
}

/// Reward for the transition `prev -> cur`. Dense values are normalized by
/// `max_reward(task)`; sparse PickPlace pays the event values verbatim.
///
/// `pickplace_literal` selects the unrepaired PickPlace dense formula
/// `min{I_success, I_grasped (1 + R_d(d2)) + R_d(d2)}` instead of the default
/// `min{1, I_grasped (1 + R_d(d2)) + R_d(d1)}` (success forcing 1).
pub fn compute_reward(
    task: TaskKind,
    mode: RewardMode,
    pickplace_literal: bool,
    prev: &WorldState,
    cur: &WorldState,
) -> Result<f64> {
    if prev.task != task || cur.task != task {
        return Err(Error::TaskStateMismatch(format!(
            "reward for {} requested on {} / {} states",
            task.as_str(),
            prev.task.as_str(),
            cur.task.as_str()
        )));
    }
    let is_drawer = matches!(task, TaskKind::OpenDrawer | TaskKind::CloseDrawer);
    if is_drawer && (prev.drawer_open_frac.is_none() || cur.drawer_open_frac.is_none()) {
        return Err(Error::TaskStateMismatch(
            "drawer reward requires drawer_open_frac".into(),
        ));
    }

    match (task, mode) {
        (TaskKind::PickPlace, RewardMode::Sparse) => {
            let grasp_event = !prev.is_grasped && cur.is_grasped;
            let place_event = !prev.is_placed && cur.is_placed;
            let leave_event = prev.is_placed && !cur.is_placed && !cur.success();
            let mut r = 0.0;
            if grasp_event {
                r += 0.2;
            }
            if place_event {
                r += 1.0;
            }
            if leave_event {
                r -= 0.4;
            }
            Ok(r)
        }
        (TaskKind::PickPlace, RewardMode::Dense) => {
            let obj = cur.objects[0].pos;
            let bowl = cur.bowl_center.ok_or_else(|| {
                Error::TaskStateMismatch("PickPlace reward requires a bowl".into())
            })?;
            let d1 = dist(cur.tcp, obj);
            let d2 = dist(obj, bowl);
            let grasped: f64 = if cur.is_grasped { 1.0 } else { 0.0 };
            let success: f64 = if cur.success() { 1.0 } else { 0.0 };
            let r = if pickplace_literal {
                success.min(grasped * (1.0 + shaping_rd(d2)?) + shaping_rd(d2)?)
            } else if cur.success() {
                1.0
            } else {
                1.0_f64.min(grasped * (1.0 + shaping_rd(d2)?) + shaping_rd(d1)?)
            };
            Ok(r / max_reward(task))
        }
        (TaskKind::PushCube, _) => {
            let ti = cur.target_object.ok_or_else(|| {
                Error::TaskStateMismatch("PushCube reward requires target_object".into())
            })?;
            let goal = cur.goal_center.ok_or_else(|| {
                Error::TaskStateMismatch("PushCube reward requires goal_center".into())
            })?;
            if mode == RewardMode::Sparse {
                return Ok(if cur.success() { 1.0 } else { 0.0 });
            }
            let cube = &cur.objects[ti];
            let r = if cur.success() {
                3.0
            } else {
                let p_push = push_pose(cube.pos, cube.half_size);
                let reach_dist = dist(cur.tcp, p_push);
                let r_reach = 1.0 - (5.0 * reach_dist).tanh();
                // Placement term gated on proximity to the pushing pose.
                let r_place = if reach_dist < cube.half_size + PUSH_MARGIN {
                    1.0 - (5.0 * dist(cube.pos, goal)).tanh()
                } else {
                    0.0
                };
                r_reach + r_place
            };
            Ok(r / max_reward(task))
        }
        (TaskKind::OpenDrawer, _) => {
            let frac = cur.drawer_open_frac.unwrap();
            if mode == RewardMode::Sparse {
                return Ok(if cur.success() { 1.0 } else { 0.0 });
            }
            let r = if cur.success() {
                DRAWER_TERMINAL_BONUS
            } else {
                let handle = cur.handle_pos().unwrap();
                let r_reach = if frac > OPEN_REACH_SAT_FRAC {
                    1.0
                } else {
                    1.0 - (5.0 * dist(cur.tcp, handle)).tanh()
                };
                r_reach + 2.0 * frac
            };
            Ok(r / max_reward(task))
        }
        (TaskKind::CloseDrawer, _) => {
            if mode == RewardMode::Sparse {
                return Ok(if cur.success() { 1.0 } else { 0.0 });
            }
            let r = if cur.success() {
                DRAWER_TERMINAL_BONUS
            } else {
                let delta = prev.drawer_open_frac.unwrap() - cur.drawer_open_frac.unwrap();
                CLOSE_PROGRESS_SCALE * delta.clamp(-1.0, 1.0) - CLOSE_TIME_PENALTY
            };
            Ok(r / max_reward(task))
        }
    }
}
