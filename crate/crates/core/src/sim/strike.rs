use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::dynamics::SimState;
use super::kit::DrumKitLayout;
use crate::drum::{DrumId, Stick};
use crate::reward::Vec3;

/// Maps a configuration vector to the two stick-tip positions.
///
/// The simulator only needs tip positions for contact checks and the spatial
/// observation; any body model that can report them fits the environment.
pub trait TipMap: Send + Sync {
    fn tips(&self, q: &[f64]) -> [Vec3; 2];
}

/// Tips are the configuration itself: `q = [left xyz, right xyz]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointTips;

impl TipMap for PointTips {
    fn tips(&self, q: &[f64]) -> [Vec3; 2] {
        [[q[0], q[1], q[2]], [q[3], q[4], q[5]]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrikeEvent {
    pub frame: usize,
    pub drum: DrumId,
    pub stick: Stick,
    /// Downward tip speed at the surface crossing, m/s.
    pub impact_speed: f64,
}

/// Strikes between two states one substep apart, attributed to `next.t_frame`.
///
/// A tip strikes a drum when it passes down through the drum's top plane
/// inside its radius, fast enough, and the drum is outside its refractory
/// window. The refractory state in `next` is not updated here.
pub fn detect_strikes(
    prev: &SimState,
    next: &SimState,
    kit: &DrumKitLayout,
    config: &SimConfig,
    tip_map: &dyn TipMap,
) -> Vec<StrikeEvent> {
    let before = tip_map.tips(&prev.q);
    let after = tip_map.tips(&next.q);
    let frame = next.t_frame;
    let mut last = next.last_strike_frame;
    let mut out = Vec::new();
    for stick in Stick::BOTH {
        let (a, b) = (before[stick.index()], after[stick.index()]);
        let speed = (a[2] - b[2]) / config.sim_dt;
        if speed < config.v_strike_min {
            continue;
        }
        for drum in DrumId::ALL {
            let geom = kit.drum(drum);
            let h = geom.surface_height();
            if !(a[2] > h && b[2] <= h) {
                continue;
            }
            let s = (a[2] - h) / (a[2] - b[2]);
            let x = a[0] + s * (b[0] - a[0]);
            let y = a[1] + s * (b[1] - a[1]);
            if geom.horizontal_distance(x, y) > geom.radius {
                continue;
            }
            if last[drum.index()].is_some_and(|f| frame < f + config.refractory) {
                continue;
            }
            last[drum.index()] = Some(frame);
            out.push(StrikeEvent {
                frame,
                drum,
                stick,
                impact_speed: speed,
            });
        }
    }
    out
}
