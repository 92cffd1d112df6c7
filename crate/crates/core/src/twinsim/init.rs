//! Initial-state randomization: per-task regions, eval sets, and the P1-P5
//! robot-pose perturbations.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, RandomStream};
use crate::twinsim::state::{
    clamp_ws, dist, ObjectState, Vec2, WorldState, DRAWER_TRAVEL, PUSH_GOAL_OFFSET,
};
use crate::types::{TaskKind, NUM_COLORS};

/// Axis-aligned rectangle `[x0, x0+w] x [y0, y0+h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, w: f64, h: f64) -> Rect {
        Rect { x0, y0, w, h }
    }
}

/// Initial-state randomization regions and object parameters for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitStateSpec {
    pub task: TaskKind,
    /// PickPlace object region (0.20 x 0.25 m), discretized at `grid`.
    pub object_region: Rect,
    /// PickPlace bowl region (0.10 x 0.20 m), discretized at `grid`.
    pub bowl_region: Rect,
    /// Grid resolution for PickPlace placements.
    pub grid: f64,
    /// PushCube nominal spacing between cube slots.
    pub cube_spacing: f64,
    /// PushCube per-cube jitter region side (0.05 m square).
    pub cube_jitter: f64,
    /// Drawer front-edge region.
    pub drawer_region: Rect,
    /// Sampled object half-size range.
    pub half_size_range: (f64, f64),
    /// Colors the instruction may target (PushCube).
    pub allowed_target_colors: Vec<usize>,
    /// Number of states an eval set built from this spec holds.
    pub count: usize,
}

/// Training half-size range; the unseen-objects evaluation swaps in
/// `UNSEEN_HALF_RANGE` and the held-out cube colors.
pub const TRAIN_HALF_RANGE: (f64, f64) = (0.015, 0.02);
pub const UNSEEN_HALF_RANGE: (f64, f64) = (0.025, 0.035);
/// Cube colors excluded from real demonstrations.
pub const HELD_OUT_COLORS: [usize; 2] = [3, 4];
pub const TRAIN_TARGET_COLORS: [usize; 3] = [0, 1, 2];

impl InitStateSpec {
    pub fn default_for(task: TaskKind) -> InitStateSpec {
        InitStateSpec {
            task,
            object_region: Rect::new(0.10, 0.30, 0.20, 0.25),
            bowl_region: Rect::new(0.40, 0.30, 0.10, 0.20),
            grid: 0.05,
            cube_spacing: 0.15,
            cube_jitter: 0.05,
            drawer_region: Rect::new(0.20, 0.40, 0.20, 0.10),
            half_size_range: TRAIN_HALF_RANGE,
            allowed_target_colors: TRAIN_TARGET_COLORS.to_vec(),
            count: 16,
        }
    }

    /// Variant with held-out object parameters for generalization eval.
    pub fn unseen_objects(task: TaskKind) -> Result<InitStateSpec> {
        match task {
            TaskKind::PickPlace | TaskKind::PushCube => {}
            other => {
                return Err(Error::ModeTaskMismatch(format!(
                    "UnseenObjects is defined for PickPlace/PushCube, not {}",
                    other.as_str()
                )))
            }
        }
        let mut spec = InitStateSpec::default_for(task);
        spec.half_size_range = UNSEEN_HALF_RANGE;
        if task == TaskKind::PushCube {
            spec.allowed_target_colors = HELD_OUT_COLORS.to_vec();
        }
        Ok(spec)
    }
}

fn grid_point(region: Rect, grid: f64, rng: &mut RandomStream) -> Vec2 {
    let nx = (region.w / grid).floor() as usize + 1;
    let ny = (region.h / grid).floor() as usize + 1;
    let ix = rng.gen_range(0..nx);
    let iy = rng.gen_range(0..ny);
    (region.x0 + ix as f64 * grid, region.y0 + iy as f64 * grid)
}

fn uniform_in(region: Rect, rng: &mut RandomStream) -> Vec2 {
    (
        region.x0 + rng.gen::<f64>() * region.w,
        region.y0 + rng.gen::<f64>() * region.h,
    )
}

/// Draws an initial world state for the spec's task.
pub fn sample_initial_state(spec: &InitStateSpec, rng: &mut RandomStream) -> Result<WorldState> {
    const MAX_ATTEMPTS: usize = 100;
    let mut state = WorldState::new(spec.task);
    match spec.task {
        TaskKind::PickPlace => {
            let half = rng.gen_range(spec.half_size_range.0..=spec.half_size_range.1);
            let mut ok = false;
            for _ in 0..MAX_ATTEMPTS {
                let obj = grid_point(spec.object_region, spec.grid, rng);
                let bowl = grid_point(spec.bowl_region, spec.grid, rng);
                if dist(obj, bowl) > half + crate::twinsim::state::PLACE_RADIUS {
                    state.objects = vec![ObjectState {
                        pos: obj,
                        half_size: half,
                        color: 0,
                    }];
                    state.bowl_center = Some(bowl);
                    state.target_object = Some(0);
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::RegionTooSmall {
                    attempts: MAX_ATTEMPTS,
                    detail: "object/bowl non-overlap unsatisfiable".into(),
                });
            }
        }
        TaskKind::PushCube => {
            let mut attempts = 0;
            let colors: Vec<usize> = loop {
                attempts += 1;
                let mut all: Vec<usize> = (0..NUM_COLORS).collect();
                all.shuffle(rng);
                let colors = all[..3].to_vec();
                if colors
                    .iter()
                    .any(|c| spec.allowed_target_colors.contains(c))
                {
                    break colors;
                }
                if attempts >= MAX_ATTEMPTS {
                    return Err(Error::RegionTooSmall {
                        attempts: MAX_ATTEMPTS,
                        detail: "no allowed target color reachable".into(),
                    });
                }
            };
            let base_y = 0.15;
            for (i, &color) in colors.iter().enumerate() {
                let jitter = spec.cube_jitter / 2.0;
                let jx = rng.gen_range(-jitter..=jitter);
                let jy = rng.gen_range(-jitter..=jitter);
                let half = rng.gen_range(spec.half_size_range.0..=spec.half_size_range.1);
                state.objects.push(ObjectState {
                    pos: (0.15 + i as f64 * spec.cube_spacing + jx, base_y + jy),
                    half_size: half,
                    color,
                });
            }
            let eligible: Vec<usize> = (0..3)
                .filter(|&i| spec.allowed_target_colors.contains(&state.objects[i].color))
                .collect();
            let ti = eligible[rng.gen_range(0..eligible.len())];
            state.target_object = Some(ti);
            let cube = state.objects[ti].pos;
            state.goal_center = Some((cube.0, cube.1 + PUSH_GOAL_OFFSET));
        }
        TaskKind::OpenDrawer | TaskKind::CloseDrawer => {
            let front = uniform_in(spec.drawer_region, rng);
            state.objects.push(ObjectState {
                pos: front,
                half_size: 0.08,
                color: 0,
            });
            state.drawer_open_frac = Some(if spec.task == TaskKind::OpenDrawer {
                0.0
            } else {
                // Opened by 0.10 m.
                0.10 / DRAWER_TRAVEL
            });
        }
    }
    state.validate_init()?;
    Ok(state)
}

/// Deterministic list of `n` initial states shared by every method in an
/// experiment.
pub fn build_eval_set(task: TaskKind, n: usize, seed: u64) -> Vec<WorldState> {
    build_eval_set_with(&InitStateSpec::default_for(task), n, seed)
}

pub fn build_eval_set_with(spec: &InitStateSpec, n: usize, seed: u64) -> Vec<WorldState> {
    let mut rng = substream(seed, "eval-set", spec.task.index() as u64);
    (0..n)
        .map(|_| sample_initial_state(spec, &mut rng).expect("default regions are feasible"))
        .collect()
}

/// TCP perturbation ids from the robustness table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationId {
    P1,
    P2,
    P3,
    P4,
    P5,
}

pub const ALL_PERTURBATIONS: [PerturbationId; 5] = [
    PerturbationId::P1,
    PerturbationId::P2,
    PerturbationId::P3,
    PerturbationId::P4,
    PerturbationId::P5,
];

impl PerturbationId {
    pub fn as_str(self) -> &'static str {
        match self {
            PerturbationId::P1 => "P1",
            PerturbationId::P2 => "P2",
            PerturbationId::P3 => "P3",
            PerturbationId::P4 => "P4",
            PerturbationId::P5 => "P5",
        }
    }

    /// Planar translation analog; the rotational component has no planar
    /// counterpart and is dropped.
    pub fn translation(self) -> Vec2 {
        match self {
            PerturbationId::P1 => (0.05, 0.0),
            PerturbationId::P2 => (-0.05, 0.0),
            PerturbationId::P3 => (0.0, 0.05),
            PerturbationId::P4 => (0.0, -0.05),
            // Diagonal stand-in for the out-of-plane "upward" offset.
            PerturbationId::P5 => (0.035, 0.035),
        }
    }
}

/// Applies a TCP perturbation to an initial state, clamped to the workspace.
pub fn perturb_initial_state(s: &WorldState, p: PerturbationId) -> WorldState {
    let (dx, dy) = p.translation();
    let mut out = s.clone();
    out.tcp = clamp_ws((s.tcp.0 + dx, s.tcp.1 + dy));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twinsim::state::WORKSPACE;

    #[test]
    fn pickplace_positions_on_grid() {
        let spec = InitStateSpec::default_for(TaskKind::PickPlace);
        let mut rng = substream(1, "t", 0);
        for _ in 0..50 {
            let s = sample_initial_state(&spec, &mut rng).unwrap();
            let obj = s.objects[0].pos;
            let rel_x = (obj.0 - spec.object_region.x0) / spec.grid;
            let rel_y = (obj.1 - spec.object_region.y0) / spec.grid;
            assert!((rel_x - rel_x.round()).abs() < 1e-9);
            assert!((rel_y - rel_y.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn close_drawer_initial_opening() {
        let spec = InitStateSpec::default_for(TaskKind::CloseDrawer);
        let mut rng = substream(2, "t", 0);
        let s = sample_initial_state(&spec, &mut rng).unwrap();
        let opening = s.drawer_open_frac.unwrap() * DRAWER_TRAVEL;
        assert!((opening - 0.10).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_state() {
        let spec = InitStateSpec::default_for(TaskKind::PushCube);
        let mut a = substream(3, "t", 0);
        let mut b = substream(3, "t", 0);
        let sa = sample_initial_state(&spec, &mut a).unwrap();
        let sb = sample_initial_state(&spec, &mut b).unwrap();
        assert_eq!(sa, sb);
    }

    #[test]
    fn eval_sets_deterministic_and_seed_sensitive() {
        let a = build_eval_set(TaskKind::PickPlace, 16, 7);
        let b = build_eval_set(TaskKind::PickPlace, 16, 7);
        assert_eq!(a, b);
        let c = build_eval_set(TaskKind::PickPlace, 16, 8);
        assert!(a.iter().zip(&c).any(|(x, y)| x != y));
        let d = build_eval_set(TaskKind::OpenDrawer, 10, 7);
        assert_eq!(d.len(), 10);
    }

    #[test]
    fn region_too_small_reported() {
        let mut spec = InitStateSpec::default_for(TaskKind::PickPlace);
        // Collapse both regions onto the same single grid point.
        spec.object_region = Rect::new(0.30, 0.30, 0.0, 0.0);
        spec.bowl_region = Rect::new(0.30, 0.30, 0.0, 0.0);
        let mut rng = substream(4, "t", 0);
        assert!(matches!(
            sample_initial_state(&spec, &mut rng),
            Err(Error::RegionTooSmall { .. })
        ));
    }

    #[test]
    fn perturbations_translate_and_clamp() {
        let spec = InitStateSpec::default_for(TaskKind::PickPlace);
        let mut rng = substream(5, "t", 0);
        let s = sample_initial_state(&spec, &mut rng).unwrap();
        let p1 = perturb_initial_state(&s, PerturbationId::P1);
        assert!((p1.tcp.0 - (s.tcp.0 + 0.05)).abs() < 1e-12);
        let p5 = perturb_initial_state(&s, PerturbationId::P5);
        let p5_twice = perturb_initial_state(&p5, PerturbationId::P5);
        assert_ne!(p5.tcp, p5_twice.tcp);
        for p in ALL_PERTURBATIONS {
            let t = perturb_initial_state(&s, p);
            assert!(t.tcp.0 >= 0.0 && t.tcp.0 <= WORKSPACE);
            assert!(t.tcp.1 >= 0.0 && t.tcp.1 <= WORKSPACE);
        }
    }

    #[test]
    fn unseen_objects_spec_restrictions() {
        assert!(InitStateSpec::unseen_objects(TaskKind::OpenDrawer).is_err());
        let spec = InitStateSpec::unseen_objects(TaskKind::PushCube).unwrap();
        let mut rng = substream(6, "t", 0);
        for _ in 0..20 {
            let s = sample_initial_state(&spec, &mut rng).unwrap();
            let target_color = s.objects[s.target_object.unwrap()].color;
            assert!(HELD_OUT_COLORS.contains(&target_color));
        }
    }
}
