//! Baseline performer: greedy stick assignment, timed tip trajectories, and
//! execution either kinematically or through the PD-driven simulator.

mod assign;
mod curve;
mod perform;
mod trajectory;

pub use assign::{Assignment, StepAssignment};
pub use curve::Cubic;
pub use perform::{PerformMode, Performance};
pub use trajectory::{
    Keyframe, Phase, PlannedStrike, SkipReason, SkippedStrike, StickPlan, TipPlan,
};

use serde::{Deserialize, Serialize};

use crate::drum::{DrumId, Stick};
use crate::error::{Error, Result};
use crate::reward::Vec3;
use crate::rhythm::RhythmicContactChain;
use crate::sim::{DrumKitLayout, SimConfig};
use crate::track::DrumTrack;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerLimits {
    /// Tip speed limit, m/s.
    pub v_max: f64,
    /// Tip acceleration limit, m/s².
    pub a_max: f64,
    /// Height of the approach waypoint above the drum surface, m.
    pub hover: f64,
    /// Downward tip speed when crossing the surface, m/s.
    pub strike_speed: f64,
    /// Duration of the descent from hover to the surface, s.
    pub strike_time: f64,
    /// Duration of the braking phase after impact, s.
    pub brake_time: f64,
    /// Add the cheapest assignment of the next step to each candidate's cost.
    pub lookahead: bool,
}

impl Default for PlannerLimits {
    fn default() -> Self {
        PlannerLimits {
            v_max: 3.0,
            a_max: 40.0,
            hover: 0.08,
            strike_speed: 1.2,
            strike_time: 0.1,
            brake_time: 0.04,
            lookahead: false,
        }
    }
}

impl PlannerLimits {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v_max", self.v_max),
            ("a_max", self.a_max),
            ("hover", self.hover),
            ("strike_speed", self.strike_speed),
            ("strike_time", self.strike_time),
            ("brake_time", self.brake_time),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "planner {name} must be positive and finite"
                )));
            }
        }
        let descent = self.descent_curve();
        if !descent.is_monotone() {
            return Err(Error::Config(
                "strike_speed too high for the hover height and strike_time".into(),
            ));
        }
        let brake = self.brake_curve();
        let peak_speed = descent.peak_speed().max(brake.peak_speed());
        let peak_accel = descent.peak_accel().max(brake.peak_accel());
        if peak_speed > self.v_max + 1e-9 {
            return Err(Error::Config(format!(
                "strike profile reaches {peak_speed:.3} m/s, above v_max"
            )));
        }
        if peak_accel > self.a_max + 1e-9 {
            return Err(Error::Config(format!(
                "strike profile reaches {peak_accel:.3} m/s², above a_max"
            )));
        }
        Ok(())
    }

    /// Depth below the surface where the tip comes to rest after impact.
    pub fn brake_depth(&self) -> f64 {
        self.strike_speed * self.brake_time / 2.0
    }

    /// Vertical descent profile, height relative to the surface.
    pub(crate) fn descent_curve(&self) -> Cubic {
        Cubic::new(
            0.0,
            self.strike_time,
            [0.0, 0.0, self.hover],
            [0.0; 3],
            [0.0; 3],
            [0.0, 0.0, -self.strike_speed],
        )
    }

    /// Braking profile after impact, height relative to the surface.
    pub(crate) fn brake_curve(&self) -> Cubic {
        Cubic::new(
            0.0,
            self.brake_time,
            [0.0; 3],
            [0.0, 0.0, -self.strike_speed],
            [0.0, 0.0, -self.brake_depth()],
            [0.0; 3],
        )
    }

    /// Shortest rest-to-rest cubic move over `distance` within the limits.
    pub fn rest_to_rest_time(&self, distance: f64) -> f64 {
        if distance <= 0.0 {
            return 0.0;
        }
        (1.5 * distance / self.v_max).max((6.0 * distance / self.a_max).sqrt())
    }

    /// Shortest move from `from` to `to`, both at rest. Rising or level moves
    /// go in a straight line; descending moves go across first, then down.
    pub fn travel_time(&self, from: Vec3, to: Vec3) -> f64 {
        let (xy, dz) = split_move(from, to);
        if dz >= 0.0 {
            self.rest_to_rest_time((xy * xy + dz * dz).sqrt())
        } else {
            self.rest_to_rest_time(xy) + self.rest_to_rest_time(-dz)
        }
    }
}

pub(crate) fn split_move(from: Vec3, to: Vec3) -> (f64, f64) {
    let xy = ((to[0] - from[0]).powi(2) + (to[1] - from[1]).powi(2)).sqrt();
    let dz = to[2] - from[2];
    (xy, if dz.abs() < 1e-12 { 0.0 } else { dz })
}

pub(crate) fn distance(a: Vec3, b: Vec3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Plans and executes performances for one kit and simulator configuration.
#[derive(Debug, Clone)]
pub struct Planner {
    kit: DrumKitLayout,
    config: SimConfig,
    limits: PlannerLimits,
}

impl Planner {
    pub fn new(kit: DrumKitLayout, config: SimConfig, limits: PlannerLimits) -> Result<Planner> {
        kit.validate()?;
        config.validate()?;
        limits.validate()?;
        if config.n != 6 {
            return Err(Error::Config(
                "the planner drives two point tips (n = 6)".into(),
            ));
        }
        if limits.strike_speed < config.v_strike_min {
            return Err(Error::Config(
                "strike_speed is below the strike detection threshold".into(),
            ));
        }
        Ok(Planner {
            kit,
            config,
            limits,
        })
    }

    pub fn kit(&self) -> &DrumKitLayout {
        &self.kit
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn limits(&self) -> &PlannerLimits {
        &self.limits
    }

    /// Tip position of `stick` at the neutral pose.
    pub fn rest_tip(&self, stick: Stick) -> Vec3 {
        let o = 3 * stick.index();
        [
            self.config.q0[o],
            self.config.q0[o + 1],
            self.config.q0[o + 2],
        ]
    }

    /// Where `stick` hits `drum`: the center clamped into the stick's
    /// reachable box, or `None` when that lands outside half the radius.
    pub fn strike_point(&self, stick: Stick, drum: DrumId) -> Option<Vec3> {
        let geom = self.kit.drum(drum);
        let o = 3 * stick.index();
        let mut p = geom.center;
        for (k, v) in p.iter_mut().enumerate() {
            let q0 = self.config.q0[o + k];
            let [lo, hi] = self.config.bounds[o + k];
            let lo = lo.max(q0 - self.config.beta);
            let hi = hi.min(q0 + self.config.beta);
            *v = v.clamp(lo, hi);
        }
        let low = p[2] - self.limits.brake_depth();
        let high = p[2] + self.limits.hover;
        let [zlo, zhi] = self.config.bounds[o + 2];
        let reach = (
            self.config.q0[o + 2] - self.config.beta,
            self.config.q0[o + 2] + self.config.beta,
        );
        if p[2] != geom.center[2] || low < zlo.max(reach.0) || high > zhi.min(reach.1) {
            return None;
        }
        (geom.horizontal_distance(p[0], p[1]) <= 0.5 * geom.radius).then_some(p)
    }

    /// Strike time of a contact at `frame`: the middle of the frame.
    pub fn strike_time(&self, frame: usize) -> f64 {
        (frame as f64 + 0.5) / f64::from(self.config.control_fps)
    }

    pub fn assign_sticks(&self, chain: &RhythmicContactChain) -> Assignment {
        assign::assign_sticks(self, chain)
    }

    pub fn plan_trajectories(&self, assignment: &Assignment) -> TipPlan {
        trajectory::plan_trajectories(self, assignment)
    }

    pub fn perform(&self, track: &DrumTrack, mode: PerformMode) -> Result<Performance> {
        perform::perform(self, track, mode)
    }
}
