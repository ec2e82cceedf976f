//! Desk-scale drumming simulator: two point stick tips driven by a PD law,
//! disc-shaped drums, and an episode loop emitting observations and rewards.

mod config;
mod dynamics;
mod env;
mod kit;
mod strike;

pub use config::{default_q0, SimConfig};
pub use dynamics::{
    action_to_target, clamp_action, integrate, pd_control, target_to_action, SimState,
};
pub use env::{
    rollout_jsonl, DrumEnv, InitMode, Observation, RolloutRecord, StepOutcome, SPATIAL_WIDTH,
};
pub use kit::{DrumGeometry, DrumKitLayout};
pub use strike::{detect_strikes, PointTips, StrikeEvent, TipMap};
