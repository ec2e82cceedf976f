use serde::{Deserialize, Serialize};

use super::curve::Cubic;
use super::{split_move, Assignment, Planner};
use crate::drum::{DrumId, Stick};
use crate::reward::Vec3;
use crate::track::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Moving between rest points.
    Travel,
    /// Descending from the hover point through the drum surface.
    Strike,
    /// Braking after impact, or rising back to hover after the last strike.
    Retract,
}

/// A waypoint; `phase` names the segment that ends here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub time: f64,
    pub position: Vec3,
    pub velocity: Vec3,
    pub phase: Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannedStrike {
    pub step: usize,
    pub frame: usize,
    pub drum: DrumId,
    pub stick: Stick,
    /// When the tip crosses the surface.
    pub time: f64,
    pub point: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    /// Not enough time to get there within the speed and acceleration limits.
    Infeasible,
    /// The drum lies outside the stick's workspace.
    Unreachable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedStrike {
    pub step: usize,
    pub frame: usize,
    pub drum: DrumId,
    pub stick: Stick,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickPlan {
    pub stick: Stick,
    pub keyframes: Vec<Keyframe>,
    pub strikes: Vec<PlannedStrike>,
}

impl StickPlan {
    fn segment(&self, t: f64) -> Option<Cubic> {
        let k = &self.keyframes;
        let i = k.partition_point(|f| f.time <= t);
        if i == 0 || i == k.len() {
            return None;
        }
        let (a, b) = (k[i - 1], k[i]);
        Some(Cubic::new(
            a.time, b.time, a.position, a.velocity, b.position, b.velocity,
        ))
    }

    pub fn position(&self, t: f64) -> Vec3 {
        match self.segment(t) {
            Some(c) => c.position(t),
            None if t < self.keyframes[0].time => self.keyframes[0].position,
            None => self.keyframes[self.keyframes.len() - 1].position,
        }
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        self.segment(t).map_or([0.0; 3], |c| c.velocity(t))
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        self.segment(t).map_or([0.0; 3], |c| c.acceleration(t))
    }

    /// Time of the final keyframe.
    pub fn end_time(&self) -> f64 {
        self.keyframes.last().map_or(0.0, |k| k.time)
    }

    /// Consecutive keyframe pairs as curves.
    pub fn segments(&self) -> impl Iterator<Item = Cubic> + '_ {
        self.keyframes.windows(2).map(|w| {
            Cubic::new(
                w[0].time,
                w[1].time,
                w[0].position,
                w[0].velocity,
                w[1].position,
                w[1].velocity,
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TipPlan {
    pub schema_version: u32,
    /// Left stick first.
    pub sticks: Vec<StickPlan>,
    pub skipped: Vec<SkippedStrike>,
    /// `(step, frame, drum)` left out by the assignment.
    pub dropped: Vec<(usize, usize, DrumId)>,
}

impl TipPlan {
    pub fn stick(&self, stick: Stick) -> &StickPlan {
        &self.sticks[stick.index()]
    }

    /// Tip coordinates of both sticks at time `t`, laid out like the simulator state.
    pub fn q_at(&self, t: f64) -> Vec<f64> {
        self.sticks.iter().flat_map(|s| s.position(t)).collect()
    }

    /// Every planned strike, ordered by time.
    pub fn strikes(&self) -> Vec<PlannedStrike> {
        let mut all: Vec<PlannedStrike> = self
            .sticks
            .iter()
            .flat_map(|s| s.strikes.iter().copied())
            .collect();
        all.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.drum.cmp(&b.drum)));
        all
    }

    pub fn feasible_count(&self) -> usize {
        self.sticks.iter().map(|s| s.strikes.len()).sum()
    }

    pub fn end_time(&self) -> f64 {
        self.sticks
            .iter()
            .map(StickPlan::end_time)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }
}

struct Target {
    step: usize,
    frame: usize,
    drum: DrumId,
    time: f64,
    point: Vec3,
}

pub(super) fn plan_trajectories(planner: &Planner, assignment: &Assignment) -> TipPlan {
    let mut skipped = Vec::new();
    let sticks = Stick::BOTH
        .iter()
        .map(|&stick| plan_stick(planner, assignment, stick, &mut skipped))
        .collect();
    skipped.sort_by_key(|s| (s.frame, s.drum, s.stick));
    let dropped = assignment
        .steps
        .iter()
        .flat_map(|s| s.dropped.iter().map(move |d| (s.step, s.frame, *d)))
        .collect();
    TipPlan {
        schema_version: SCHEMA_VERSION,
        sticks,
        skipped,
        dropped,
    }
}

fn plan_stick(
    planner: &Planner,
    assignment: &Assignment,
    stick: Stick,
    skipped: &mut Vec<SkippedStrike>,
) -> StickPlan {
    let limits = planner.limits();
    let mut targets = Vec::new();
    for (step, frame, drum) in assignment.strikes_for(stick) {
        match planner.strike_point(stick, drum) {
            Some(point) => targets.push(Target {
                step,
                frame,
                drum,
                time: planner.strike_time(frame),
                point,
            }),
            None => skipped.push(SkippedStrike {
                step,
                frame,
                drum,
                stick,
                reason: SkipReason::Unreachable,
            }),
        }
    }

    let depth = limits.brake_depth();
    let hover = |p: Vec3| [p[0], p[1], p[2] + limits.hover];
    let bottom = |p: Vec3| [p[0], p[1], p[2] - depth];
    let home = planner.rest_tip(stick);
    // `None` stands for the neutral pose at time 0.
    let reaches = |from: Option<usize>, to: usize| {
        let (rest, free_at) = match from {
            None => (home, 0.0),
            Some(i) => (
                bottom(targets[i].point),
                targets[i].time + limits.brake_time,
            ),
        };
        let start = targets[to].time - limits.strike_time;
        start - free_at >= limits.travel_time(rest, hover(targets[to].point)) - 1e-9
    };

    let m = targets.len();
    let mut longest = vec![1usize; m];
    for i in (0..m).rev() {
        for j in i + 1..m {
            if longest[j] + 1 > longest[i] && reaches(Some(i), j) {
                longest[i] = longest[j] + 1;
            }
        }
    }
    let mut chosen = Vec::new();
    let mut remaining = (0..m)
        .filter(|&j| reaches(None, j))
        .map(|j| longest[j])
        .max()
        .unwrap_or(0);
    let mut cur = None;
    let mut j = 0;
    while remaining > 0 && j < m {
        if longest[j] == remaining && reaches(cur, j) {
            chosen.push(j);
            cur = Some(j);
            remaining -= 1;
        }
        j += 1;
    }

    let mut keep = vec![false; m];
    for &c in &chosen {
        keep[c] = true;
    }
    for (t, _) in targets.iter().zip(&keep).filter(|(_, k)| !**k) {
        skipped.push(SkippedStrike {
            step: t.step,
            frame: t.frame,
            drum: t.drum,
            stick,
            reason: SkipReason::Infeasible,
        });
    }

    let rest_key = |time: f64, position: Vec3, phase: Phase| Keyframe {
        time,
        position,
        velocity: [0.0; 3],
        phase,
    };
    let mut keyframes = vec![rest_key(0.0, home, Phase::Travel)];
    let mut strikes = Vec::with_capacity(chosen.len());
    for &c in &chosen {
        let t = &targets[c];
        let last = *keyframes.last().expect("starts with the home pose");
        let above = hover(t.point);
        let arrive = t.time - limits.strike_time;
        let (xy, dz) = split_move(last.position, above);
        if dz < 0.0 && xy > 0.0 {
            let across = limits.rest_to_rest_time(xy);
            let down = limits.rest_to_rest_time(-dz);
            let turn = last.time + (arrive - last.time) * across / (across + down);
            keyframes.push(rest_key(
                turn,
                [above[0], above[1], last.position[2]],
                Phase::Travel,
            ));
        }
        keyframes.push(rest_key(arrive, above, Phase::Travel));
        keyframes.push(Keyframe {
            time: t.time,
            position: t.point,
            velocity: [0.0, 0.0, -limits.strike_speed],
            phase: Phase::Strike,
        });
        keyframes.push(rest_key(
            t.time + limits.brake_time,
            bottom(t.point),
            Phase::Retract,
        ));
        strikes.push(PlannedStrike {
            step: t.step,
            frame: t.frame,
            drum: t.drum,
            stick,
            time: t.time,
            point: t.point,
        });
    }
    if let Some(t) = chosen.last().map(|&c| &targets[c]) {
        let last = *keyframes.last().expect("nonempty");
        let up = limits.rest_to_rest_time(limits.hover + depth);
        keyframes.push(rest_key(last.time + up, hover(t.point), Phase::Retract));
    }
    StickPlan {
        stick,
        keyframes,
        strikes,
    }
}
