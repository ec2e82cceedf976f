use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Assignment, Planner, TipPlan};
use crate::drum::NUM_DRUMS;
use crate::error::Result;
use crate::eval::StrikeLog;
use crate::reward::RewardWeights;
use crate::rhythm::{build_chain, Segment, DEFAULT_LOOKAHEAD};
use crate::sim::{
    detect_strikes, target_to_action, DrumEnv, InitMode, PointTips, RolloutRecord, SimState,
};
use crate::track::DrumTrack;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerformMode {
    /// Move the tips exactly along the plan.
    Kinematic,
    /// Track the plan with PD targets through the simulator.
    #[default]
    Pd,
}

impl std::str::FromStr for PerformMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<PerformMode> {
        match s {
            "kinematic" => Ok(PerformMode::Kinematic),
            "pd" => Ok(PerformMode::Pd),
            other => Err(crate::error::Error::input(format!(
                "unknown perform mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Performance {
    pub assignment: Assignment,
    pub plan: TipPlan,
    pub log: StrikeLog,
    /// Per-frame simulator records; empty in kinematic mode.
    pub rollout: Vec<RolloutRecord>,
}

pub(super) fn perform(
    planner: &Planner,
    track: &DrumTrack,
    mode: PerformMode,
) -> Result<Performance> {
    let chain = build_chain(track, "perform");
    let assignment = planner.assign_sticks(&chain);
    let plan = planner.plan_trajectories(&assignment);
    let fps = track.fps();
    if chain.is_empty() {
        return Ok(Performance {
            assignment,
            plan,
            log: StrikeLog::new(fps, Vec::new()),
            rollout: Vec::new(),
        });
    }
    let (strikes, rollout) = match mode {
        PerformMode::Kinematic => (run_kinematic(planner, &plan, &chain_end(track)), Vec::new()),
        PerformMode::Pd => run_pd(planner, track, &plan)?,
    };
    Ok(Performance {
        assignment,
        plan,
        log: StrikeLog::new(fps, strikes),
        rollout,
    })
}

fn chain_end(track: &DrumTrack) -> usize {
    track.hits().keys().next_back().map_or(0, |f| f + 1)
}

fn run_kinematic(planner: &Planner, plan: &TipPlan, last: &usize) -> Vec<crate::sim::StrikeEvent> {
    let config = planner.config();
    let fps = f64::from(config.control_fps);
    let subs = config.substeps();
    let end = last + config.tail_padding;
    let mut state = SimState::at_rest(config, 0);
    state.q = plan.q_at(0.0);
    let mut out = Vec::new();
    for frame in 0..end {
        for j in 1..=subs {
            let prev = state.clone();
            state.t_frame = frame;
            state.q = plan.q_at((frame as f64 + j as f64 / subs as f64) / fps);
            let hits = detect_strikes(&prev, &state, planner.kit(), config, &PointTips);
            for h in &hits {
                state.last_strike_frame[h.drum.index()] = Some(h.frame);
            }
            out.extend(hits);
        }
    }
    debug_assert!(state.last_strike_frame.len() == NUM_DRUMS);
    out
}

/// Per-frame PD targets: the plan's position plus the offset that makes the
/// PD force equal the planned acceleration, evaluated mid-frame.
fn pd_targets(planner: &Planner, plan: &TipPlan, frame: usize) -> Vec<f64> {
    let config = planner.config();
    let t = (frame as f64 + 0.5) / f64::from(config.control_fps);
    let mut q = Vec::with_capacity(config.n);
    for stick in &plan.sticks {
        let (x, v, a) = (stick.position(t), stick.velocity(t), stick.acceleration(t));
        for k in 0..3 {
            let i = q.len();
            q.push(x[k] + (a[k] + config.kd[i] * v[k]) / config.kp[i].max(f64::MIN_POSITIVE));
        }
    }
    q
}

fn run_pd(
    planner: &Planner,
    track: &DrumTrack,
    plan: &TipPlan,
) -> Result<(Vec<crate::sim::StrikeEvent>, Vec<RolloutRecord>)> {
    let config = planner.config().clone();
    let mut env = DrumEnv::new(
        track.clone(),
        planner.kit().clone(),
        config.clone(),
        RewardWeights::default(),
        DEFAULT_LOOKAHEAD,
    )?;
    env.enable_log();
    let segment = Segment::whole(env.chain());
    env.reset(&segment, InitMode::Start, &mut ChaCha8Rng::seed_from_u64(0))?;
    let mut strikes = Vec::new();
    while !env.is_done() {
        let frame = env.state().t_frame;
        let action = target_to_action(&pd_targets(planner, plan, frame), config.beta, &config.q0);
        strikes.extend(env.step(&action)?.strikes);
    }
    Ok((strikes, env.take_log()))
}
