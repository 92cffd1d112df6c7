//! The twin environment: kinematic planar manipulation with task-specific
//! affordances (grasping, pushing, drawer sliding) and gap-profile
//! corruption on the real twin.

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::twinsim::gap::GapProfile;
use crate::twinsim::reward::{compute_reward, RewardMode};
use crate::twinsim::state::{
    clamp_ws, dist, Vec2, WorldState, DRAWER_TRAVEL, GRASP_RADIUS, HANDLE_RADIUS, PLACE_RADIUS,
    STRADDLE_HALF, TCP_RADIUS, WORKSPACE,
};
use crate::types::{Action, DomainTag, Instruction, Observation, TaskKind, OBS_INSTR_START};

pub const DEFAULT_MAX_STEPS: usize = 120;

/// Per-step info readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub is_grasped: bool,
    pub is_placed: bool,
    pub open_frac: f64,
    pub success: bool,
}

pub struct EnvInstance {
    pub task: TaskKind,
    pub domain: DomainTag,
    pub gap: GapProfile,
    pub reward_mode: RewardMode,
    pub pickplace_literal: bool,
    pub max_steps: usize,
    pub state: WorldState,
    pub instruction: Instruction,
    rng: RandomStream,
    done: bool,
    started: bool,
}

impl EnvInstance {
    /// Builds an environment. The sim twin must carry the zero profile.
    pub fn new(
        task: TaskKind,
        domain: DomainTag,
        gap: GapProfile,
        reward_mode: RewardMode,
        rng: RandomStream,
    ) -> Result<EnvInstance> {
        gap.validate()?;
        if domain == DomainTag::Sim && !gap.is_zero() {
            return Err(Error::Range {
                field: "gap",
                detail: "the sim twin must use the zero gap profile".into(),
            });
        }
        Ok(EnvInstance {
            task,
            domain,
            gap,
            reward_mode,
            pickplace_literal: false,
            max_steps: DEFAULT_MAX_STEPS,
            state: WorldState::new(task),
            instruction: Instruction::new(task, 0).expect("color 0 valid for every task"),
            rng,
            done: true,
            started: false,
        })
    }

    pub fn sim(task: TaskKind, reward_mode: RewardMode, rng: RandomStream) -> EnvInstance {
        EnvInstance::new(task, DomainTag::Sim, GapProfile::zero(), reward_mode, rng)
            .expect("zero profile is valid")
    }

    pub fn real(
        task: TaskKind,
        gap: GapProfile,
        reward_mode: RewardMode,
        rng: RandomStream,
    ) -> Result<EnvInstance> {
        EnvInstance::new(task, DomainTag::Real, gap, reward_mode, rng)
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Resets to `init` with episode flags cleared and returns the (possibly
    /// gap-corrupted) first observation.
    pub fn reset(&mut self, init: &WorldState) -> Result<Observation> {
        if init.task != self.task {
            return Err(Error::InvalidInitState(format!(
                "init state is for {}, env runs {}",
                init.task.as_str(),
                self.task.as_str()
            )));
        }
        init.validate_init()?;
        let mut state = init.clone();
        state.time_step = 0;
        state.gripper_open = true;
        state.is_grasped = false;
        state.is_placed = false;
        state.grasped_index = None;
        state.ever_grasped = false;
        state.ever_placed = false;
        self.instruction = state.instruction()?;
        self.state = state;
        self.done = false;
        self.started = true;
        Ok(self.observe())
    }

    /// Current observation under this twin's gap profile.
    pub fn observe(&mut self) -> Observation {
        let mut obs = self.state.observe_clean(&self.instruction);
        for (i, b) in self.gap.obs_bias.iter().enumerate() {
            obs.0[i] += b;
        }
        if self.gap.obs_noise_std > 0.0 {
            let normal = Normal::new(0.0, self.gap.obs_noise_std).expect("validated std");
            for v in obs.0.iter_mut().take(OBS_INSTR_START) {
                *v += normal.sample(&mut self.rng);
            }
        }
        obs
    }

    /// Advances one step. Returns observation, reward, done flag, and info.
    pub fn step(&mut self, a: &Action) -> Result<(Observation, f64, bool, StepInfo)> {
        if !self.started || self.done {
            return Err(Error::SteppedAfterDone);
        }
        let prev = self.state.clone();
        let mut act = a.clamped();
        if self.gap.action_noise_std > 0.0 {
            let normal = Normal::new(0.0, self.gap.action_noise_std).expect("validated std");
            act.dx += normal.sample(&mut self.rng);
            act.dy += normal.sample(&mut self.rng);
        }

        let tcp_before = self.state.tcp;
        let tcp_after = clamp_ws((tcp_before.0 + act.dx, tcp_before.1 + act.dy));
        let grip_closed = act.grip > 0.0;

        self.state.tcp = tcp_after;
        self.state.gripper_open = !grip_closed;

        match self.task {
            TaskKind::PickPlace => self.step_pickplace(grip_closed),
            TaskKind::PushCube => self.step_pushcube(grip_closed),
            TaskKind::OpenDrawer | TaskKind::CloseDrawer => {
                self.step_drawer(tcp_before, tcp_after, grip_closed)
            }
        }

        self.state.time_step += 1;
        let success = self.state.success();
        self.done = success || self.state.time_step >= self.max_steps;

        let reward = compute_reward(
            self.task,
            self.reward_mode,
            self.pickplace_literal,
            &prev,
            &self.state,
        )?;
        let info = StepInfo {
            is_grasped: self.state.is_grasped,
            is_placed: self.state.is_placed,
            open_frac: self.state.drawer_open_frac.unwrap_or(0.0),
            success,
        };
        Ok((self.observe(), reward, self.done, info))
    }

    fn step_pickplace(&mut self, grip_closed: bool) {
        let tcp = self.state.tcp;
        if let Some(gi) = self.state.grasped_index {
            // Grasped object tracks the tcp.
            self.state.objects[gi].pos = tcp;
            if !grip_closed {
                self.state.is_grasped = false;
                self.state.grasped_index = None;
                let bowl = self.state.bowl_center.expect("validated init");
                if dist(self.state.objects[gi].pos, bowl) <= PLACE_RADIUS {
                    self.state.is_placed = true;
                    self.state.ever_placed = true;
                }
            }
            return;
        }
        // Grasp check takes priority over contact resolution, so a step that
        // lands inside the grasp radius with the gripper closing engages
        // without shoving the object first.
        if grip_closed {
            let nearest = self
                .state
                .objects
                .iter()
                .enumerate()
                .map(|(i, o)| (i, dist(tcp, o.pos)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((i, d)) = nearest {
                if d <= GRASP_RADIUS {
                    self.state.is_grasped = true;
                    self.state.ever_grasped = true;
                    self.state.grasped_index = Some(i);
                    self.state.is_placed = false;
                    self.state.objects[i].pos = tcp;
                    return;
                }
            }
        }
        self.resolve_contacts(grip_closed);
        // A placed object shoved out of the bowl loses its placement.
        if self.state.is_placed {
            let bowl = self.state.bowl_center.expect("validated init");
            if dist(self.state.objects[0].pos, bowl) > PLACE_RADIUS {
                self.state.is_placed = false;
            }
        }
    }

    fn step_pushcube(&mut self, grip_closed: bool) {
        self.resolve_contacts(grip_closed);
    }

    /// Circle-on-circle penetration resolution: the tcp displaces any object
    /// it overlaps, scaled by the twin's friction. An open gripper straddles
    /// narrow objects and only shoves wide ones.
    fn resolve_contacts(&mut self, grip_closed: bool) {
        let tcp = self.state.tcp;
        for obj in &mut self.state.objects {
            let half_eff = obj.half_size + self.gap.geometry_offset;
            if !grip_closed && half_eff <= STRADDLE_HALF {
                continue;
            }
            let solid = half_eff + TCP_RADIUS;
            let d = dist(tcp, obj.pos);
            if d < solid {
                let dir = if d > 1e-12 {
                    ((obj.pos.0 - tcp.0) / d, (obj.pos.1 - tcp.1) / d)
                } else {
                    (0.0, 1.0)
                };
                let shift = (solid - d) * self.gap.friction_scale;
                let half = obj.half_size;
                obj.pos = (
                    (obj.pos.0 + dir.0 * shift).clamp(half, WORKSPACE - half),
                    (obj.pos.1 + dir.1 * shift).clamp(half, WORKSPACE - half),
                );
            }
        }
    }

    fn step_drawer(&mut self, tcp_before: Vec2, tcp_after: Vec2, grip_closed: bool) {
        let handle = self.state.handle_pos().expect("validated init");
        if dist(tcp_before, handle) > HANDLE_RADIUS {
            return;
        }
        let dy = tcp_after.1 - tcp_before.1;
        let frac = self.state.drawer_open_frac.expect("validated init");
        // Pulling the drawer open requires holding the handle; pushing it
        // shut works by contact alone.
        let delta_frac = if dy < 0.0 && grip_closed {
            -dy * self.gap.friction_scale / DRAWER_TRAVEL
        } else if dy > 0.0 {
            -dy * self.gap.friction_scale / DRAWER_TRAVEL
        } else {
            0.0
        };
        self.state.drawer_open_frac = Some((frac + delta_frac).clamp(0.0, 1.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::twinsim::init::{sample_initial_state, InitStateSpec};
    use crate::twinsim::state::ObjectState;

    fn sim_env(task: TaskKind) -> EnvInstance {
        EnvInstance::sim(task, RewardMode::Dense, substream(0, "test-env", 0))
    }

    fn pick_init() -> WorldState {
        let mut s = WorldState::new(TaskKind::PickPlace);
        s.objects.push(ObjectState {
            pos: (0.20, 0.40),
            half_size: 0.018,
            color: 0,
        });
        s.bowl_center = Some((0.45, 0.40));
        s.target_object = Some(0);
        s
    }

    #[test]
    fn sim_reset_reports_exact_tcp() {
        let mut env = sim_env(TaskKind::PickPlace);
        let init = pick_init();
        let obs = env.reset(&init).unwrap();
        assert_eq!(obs.0[0], init.tcp.0);
        assert_eq!(obs.0[1], init.tcp.1);
    }

    #[test]
    fn real_bias_shifts_observation() {
        let mut gap = GapProfile::zero();
        gap.obs_bias = vec![0.01, 0.0];
        let mut env = EnvInstance::real(
            TaskKind::PickPlace,
            gap,
            RewardMode::Dense,
            substream(0, "test-env", 1),
        )
        .unwrap();
        let init = pick_init();
        let obs = env.reset(&init).unwrap();
        assert!((obs.0[0] - (init.tcp.0 + 0.01)).abs() < 1e-15);
        assert_eq!(obs.0[1], init.tcp.1);
    }

    #[test]
    fn invalid_init_rejected() {
        let mut env = sim_env(TaskKind::PickPlace);
        let mut init = pick_init();
        init.objects[0].pos = (0.9, 0.4);
        assert!(matches!(
            env.reset(&init),
            Err(Error::InvalidInitState(_))
        ));
    }

    #[test]
    fn zero_action_keeps_tcp() {
        let mut env = sim_env(TaskKind::PickPlace);
        env.reset(&pick_init()).unwrap();
        let before = env.state.tcp;
        let (_, r, done, _) = env.step(&Action::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(env.state.tcp, before);
        assert!(!done);
        assert!(r > 0.0 && r <= 1.0);
    }

    #[test]
    fn grasp_engages_on_center() {
        let mut env = sim_env(TaskKind::PickPlace);
        let mut init = pick_init();
        init.tcp = init.objects[0].pos;
        env.reset(&init).unwrap();
        let (_, _, _, info) = env.step(&Action::new(0.0, 0.0, 1.0)).unwrap();
        assert!(info.is_grasped);
    }

    #[test]
    fn horizon_termination() {
        let mut env = sim_env(TaskKind::PickPlace);
        env.reset(&pick_init()).unwrap();
        let mut done = false;
        let mut steps = 0;
        while !done {
            let (_, _, d, info) = env.step(&Action::new(0.0, 0.0, -1.0)).unwrap();
            done = d;
            steps += 1;
            if done {
                assert!(!info.success);
            }
        }
        assert_eq!(steps, DEFAULT_MAX_STEPS);
        assert!(matches!(
            env.step(&Action::new(0.0, 0.0, -1.0)),
            Err(Error::SteppedAfterDone)
        ));
    }

    #[test]
    fn sim_twin_is_deterministic() {
        let spec = InitStateSpec::default_for(TaskKind::PushCube);
        let mut rng = substream(9, "det", 0);
        let init = sample_initial_state(&spec, &mut rng).unwrap();
        let actions: Vec<Action> = (0..40)
            .map(|i| Action::new(0.03 * ((i % 5) as f64 - 2.0), 0.02, if i % 3 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let run = |seed| {
            let mut env = EnvInstance::sim(
                TaskKind::PushCube,
                RewardMode::Dense,
                substream(seed, "det-env", 0),
            );
            let mut trace = vec![env.reset(&init).unwrap()];
            for a in &actions {
                if env.is_done() {
                    break;
                }
                let (o, _, _, _) = env.step(a).unwrap();
                trace.push(o);
            }
            trace
        };
        // Different env rng seeds: the zero-gap twin must not consume them.
        assert_eq!(run(1), run(2));
    }

    #[test]
    fn drawer_opens_by_pull_and_closes_by_push() {
        let mut env = sim_env(TaskKind::OpenDrawer);
        let mut init = WorldState::new(TaskKind::OpenDrawer);
        init.objects.push(ObjectState {
            pos: (0.30, 0.45),
            half_size: 0.08,
            color: 0,
        });
        init.drawer_open_frac = Some(0.0);
        init.tcp = (0.30, 0.45);
        env.reset(&init).unwrap();
        // Pull with closed gripper.
        env.step(&Action::new(0.0, -0.05, 1.0)).unwrap();
        let frac = env.state.drawer_open_frac.unwrap();
        assert!((frac - 0.25).abs() < 1e-12);
        // Pull with open gripper: no motion.
        let (_, _, _, info) = env.step(&Action::new(0.0, -0.05, -1.0)).unwrap();
        assert_eq!(info.open_frac, frac);
        // Pushing back closes regardless of grip once re-engaged.
        let handle = env.state.handle_pos().unwrap();
        env.state.tcp = handle;
        env.step(&Action::new(0.0, 0.04, -1.0)).unwrap();
        assert!(env.state.drawer_open_frac.unwrap() < frac);
    }
}
