use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use crate::drum::NUM_DRUMS;
use crate::error::{Error, Result};

/// Mutable simulator state for one environment instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub a_prev: Vec<f64>,
    pub t_frame: usize,
    pub last_strike_frame: [Option<usize>; NUM_DRUMS],
}

impl SimState {
    /// At rest in the default configuration.
    pub fn at_rest(config: &SimConfig, t_frame: usize) -> SimState {
        SimState {
            q: config.q0.clone(),
            qdot: vec![0.0; config.n],
            a_prev: vec![0.0; config.n],
            t_frame,
            last_strike_frame: [None; NUM_DRUMS],
        }
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `kp * (q_target - q) - kd * qdot`, elementwise.
pub fn pd_control(
    q_target: &[f64],
    q: &[f64],
    qdot: &[f64],
    kp: &[f64],
    kd: &[f64],
) -> Result<Vec<f64>> {
    let n = q.len();
    for len in [q_target.len(), qdot.len(), kp.len(), kd.len()] {
        check_dim(n, len)?;
    }
    Ok((0..n)
        .map(|i| kp[i] * (q_target[i] - q[i]) - kd[i] * qdot[i])
        .collect())
}

/// Clamp each action component to [-1, 1]. Returns whether anything changed.
pub fn clamp_action(action: &mut [f64]) -> bool {
    let mut clamped = false;
    for a in action.iter_mut() {
        let c = if a.is_nan() { 0.0 } else { a.clamp(-1.0, 1.0) };
        clamped |= c != *a;
        *a = c;
    }
    clamped
}

/// PD target `beta * clamp(a) + q0`.
pub fn action_to_target(action: &[f64], beta: f64, q0: &[f64]) -> Result<Vec<f64>> {
    check_dim(q0.len(), action.len())?;
    let mut a = action.to_vec();
    clamp_action(&mut a);
    Ok(a.iter().zip(q0).map(|(a, q)| beta * a + q).collect())
}

/// Inverse of [`action_to_target`] before clamping.
pub fn target_to_action(q_target: &[f64], beta: f64, q0: &[f64]) -> Vec<f64> {
    q_target
        .iter()
        .zip(q0)
        .map(|(q, q0)| (q - q0) / beta)
        .collect()
}

/// One semi-implicit Euler substep of a unit-mass double integrator per
/// coordinate. Coordinates leaving the workspace are clamped and stopped.
pub fn integrate(state: &mut SimState, force: &[f64], config: &SimConfig) -> Result<()> {
    check_dim(state.q.len(), force.len())?;
    if let Some(i) = force.iter().position(|f| !f.is_finite()) {
        return Err(Error::SimulationFault(format!(
            "non-finite force on coordinate {i}"
        )));
    }
    let dt = config.sim_dt;
    for i in 0..state.q.len() {
        state.qdot[i] += force[i] * dt;
        let q = state.q[i] + state.qdot[i] * dt;
        let [lo, hi] = config.bounds[i];
        if q < lo || q > hi {
            state.q[i] = q.clamp(lo, hi);
            state.qdot[i] = 0.0;
        } else {
            state.q[i] = q;
        }
    }
    Ok(())
}
