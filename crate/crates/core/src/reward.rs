//! Dense per-frame contact reward plus motion regularization.

use serde::{Deserialize, Serialize};

use crate::drum::{DrumSet, NUM_DRUMS};
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    pub w_correct: f64,
    pub w_wrong: f64,
    pub w_missed: f64,
    pub w_prox: f64,
    pub w_action_rate: f64,
    pub w_dof_acc: f64,
    /// Apply the proximity term on every frame with targets (true) or only
    /// on frames where a strike actually occurs (false).
    pub proximity_every_frame: bool,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights {
            w_correct: 1.0,
            w_wrong: -0.5,
            w_missed: -2.0,
            w_prox: -1.0,
            w_action_rate: -1e-3,
            w_dof_acc: -2.5e-7,
            proximity_every_frame: true,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.w_correct,
            self.w_wrong,
            self.w_missed,
            self.w_prox,
            self.w_action_rate,
            self.w_dof_acc,
        ];
        if all.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("reward weights must be finite".into()));
        }
        if self.w_correct <= 0.0 {
            return Err(Error::Config("w_correct must be positive".into()));
        }
        if all[1..].iter().any(|w| *w > 0.0) {
            return Err(Error::Config("penalty weights must be non-positive".into()));
        }
        Ok(())
    }
}

/// What happened at one control frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepContactState {
    pub targets: DrumSet,
    pub executed: DrumSet,
    /// Left then right stick tip.
    pub stick_positions: [Vec3; 2],
    pub drum_positions: [Vec3; NUM_DRUMS],
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub correct_count: usize,
    pub wrong_count: usize,
    pub missed_count: usize,
    pub correct: f64,
    pub wrong: f64,
    pub missed: f64,
    pub proximity: f64,
    pub action_rate: f64,
    pub dof_acc: f64,
    pub total: f64,
}

impl RewardBreakdown {
    pub fn contact_total(&self) -> f64 {
        self.correct + self.wrong + self.missed + self.proximity
    }
}

fn dist(a: Vec3, b: Vec3) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Contact terms for one frame; regularization fields are left at zero.
pub fn contact_reward(state: &StepContactState, w: &RewardWeights) -> RewardBreakdown {
    let correct_count = state.executed.intersection(state.targets).len();
    let wrong_count = state.executed.difference(state.targets).len();
    let missed_count = state.targets.difference(state.executed).len();

    let gate = !state.targets.is_empty() && (w.proximity_every_frame || !state.executed.is_empty());
    let proximity = if gate {
        let summed: f64 = state
            .stick_positions
            .iter()
            .map(|&tip| {
                state
                    .targets
                    .iter()
                    .map(|d| dist(tip, state.drum_positions[d.index()]))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        w.w_prox * summed
    } else {
        0.0
    };

    let mut out = RewardBreakdown {
        correct_count,
        wrong_count,
        missed_count,
        correct: correct_count as f64 * w.w_correct,
        wrong: wrong_count as f64 * w.w_wrong,
        missed: missed_count as f64 * w.w_missed,
        proximity,
        ..RewardBreakdown::default()
    };
    out.total = out.contact_total();
    out
}

/// Action-rate and acceleration penalties as `(action_rate, dof_acc)`.
pub fn regularization_terms(
    action: &[f64],
    prev_action: &[f64],
    qddot: &[f64],
    w: &RewardWeights,
) -> Result<(f64, f64)> {
    if action.len() != prev_action.len() {
        return Err(Error::DimensionMismatch {
            expected: action.len(),
            got: prev_action.len(),
        });
    }
    if qddot.len() != action.len() {
        return Err(Error::DimensionMismatch {
            expected: action.len(),
            got: qddot.len(),
        });
    }
    let rate: f64 = action
        .iter()
        .zip(prev_action)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let acc: f64 = qddot.iter().map(|x| x * x).sum();
    Ok((w.w_action_rate * rate, w.w_dof_acc * acc))
}

pub fn regularization_reward(
    action: &[f64],
    prev_action: &[f64],
    qddot: &[f64],
    w: &RewardWeights,
) -> Result<f64> {
    regularization_terms(action, prev_action, qddot, w).map(|(a, b)| a + b)
}

/// Fold regularization into a contact breakdown and return the step reward.
pub fn total_reward(contact: &mut RewardBreakdown, action_rate: f64, dof_acc: f64) -> f64 {
    contact.action_rate = action_rate;
    contact.dof_acc = dof_acc;
    contact.total = contact.contact_total() + action_rate + dof_acc;
    contact.total
}
