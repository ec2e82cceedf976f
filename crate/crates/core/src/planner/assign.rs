use serde::{Deserialize, Serialize};

use super::{distance, Planner};
use crate::drum::{DrumId, DrumSet, Stick, StickSet};
use crate::reward::Vec3;
use crate::rhythm::{ContactStep, RhythmicContactChain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepAssignment {
    /// Index of the contact step in the chain.
    pub step: usize,
    pub frame: usize,
    pub strikes: Vec<(DrumId, Stick)>,
    /// Requested drums left unassigned because only two sticks exist.
    pub dropped: Vec<DrumId>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Assignment {
    pub steps: Vec<StepAssignment>,
}

impl Assignment {
    pub fn strike_count(&self) -> usize {
        self.steps.iter().map(|s| s.strikes.len()).sum()
    }

    pub fn dropped_count(&self) -> usize {
        self.steps.iter().map(|s| s.dropped.len()).sum()
    }

    /// Strikes given to `stick`, in time order, as `(step, frame, drum)`.
    pub fn strikes_for(&self, stick: Stick) -> Vec<(usize, usize, DrumId)> {
        self.steps
            .iter()
            .flat_map(|s| {
                s.strikes
                    .iter()
                    .filter(move |(_, st)| *st == stick)
                    .map(move |(d, _)| (s.step, s.frame, *d))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct StickState {
    /// Last committed strike point, or the neutral tip.
    aim: Vec3,
    /// Where the tip rests once free.
    rest: Vec3,
    free_at: f64,
}

/// Every way to give up to two of `drums` to distinct allowed sticks.
fn candidates(drums: DrumSet, sticks: StickSet) -> Vec<Vec<(DrumId, Stick)>> {
    let drums: Vec<DrumId> = drums.iter().collect();
    let sticks: Vec<Stick> = sticks.iter().collect();
    let k = drums.len().min(sticks.len()).min(2);
    let mut out = Vec::new();
    match k {
        1 => {
            for &d in &drums {
                for &s in &sticks {
                    out.push(vec![(d, s)]);
                }
            }
        }
        2 => {
            for i in 0..drums.len() {
                for j in i + 1..drums.len() {
                    out.push(vec![(drums[i], sticks[0]), (drums[j], sticks[1])]);
                    out.push(vec![(drums[i], sticks[1]), (drums[j], sticks[0])]);
                }
            }
        }
        _ => {}
    }
    out
}

fn aim_cost(planner: &Planner, state: &[StickState; 2], pairs: &[(DrumId, Stick)]) -> f64 {
    pairs
        .iter()
        .map(|&(d, s)| match planner.strike_point(s, d) {
            Some(p) => distance(state[s.index()].aim, p),
            None => distance(state[s.index()].aim, planner.kit().drum(d).center),
        })
        .sum()
}

fn cheapest_next(planner: &Planner, state: &[StickState; 2], next: Option<&ContactStep>) -> f64 {
    next.map_or(0.0, |step| {
        candidates(step.drums, step.sticks)
            .iter()
            .map(|c| aim_cost(planner, state, c))
            .fold(f64::INFINITY, f64::min)
    })
    .min(f64::MAX)
}

/// Greedy pass in chain order. Each step takes the pairing with the most
/// strikes reachable in time, then the least summed aiming distance, then
/// the lowest drum ids.
pub(super) fn assign_sticks(planner: &Planner, chain: &RhythmicContactChain) -> Assignment {
    let limits = planner.limits();
    let mut state = Stick::BOTH.map(|s| {
        let tip = planner.rest_tip(s);
        StickState {
            aim: tip,
            rest: tip,
            free_at: 0.0,
        }
    });
    let mut steps = Vec::with_capacity(chain.len());
    for (i, step) in chain.steps.iter().enumerate() {
        let t = planner.strike_time(step.frame);
        let feasible = |state: &[StickState; 2], d: DrumId, s: Stick| {
            planner.strike_point(s, d).is_some_and(|p| {
                let st = state[s.index()];
                let hover = [p[0], p[1], p[2] + limits.hover];
                let start = t - limits.strike_time;
                start - st.free_at >= limits.travel_time(st.rest, hover) - 1e-9
            })
        };
        let mut best: Option<(usize, f64, Vec<(DrumId, Stick)>)> = None;
        for cand in candidates(step.drums, step.sticks) {
            let n_ok = cand
                .iter()
                .filter(|&&(d, s)| feasible(&state, d, s))
                .count();
            let mut cost = aim_cost(planner, &state, &cand);
            if limits.lookahead {
                let mut after = state;
                for &(d, s) in &cand {
                    if let Some(p) = planner.strike_point(s, d) {
                        after[s.index()].aim = p;
                    }
                }
                cost += cheapest_next(planner, &after, chain.steps.get(i + 1));
            }
            let better = match &best {
                None => true,
                Some((bn, bc, _)) => n_ok > *bn || (n_ok == *bn && cost < *bc - 1e-12),
            };
            if better {
                best = Some((n_ok, cost, cand));
            }
        }
        let chosen = best.map(|b| b.2).unwrap_or_default();
        let committed: Vec<bool> = chosen
            .iter()
            .map(|&(d, s)| feasible(&state, d, s))
            .collect();
        for (&(d, s), ok) in chosen.iter().zip(committed) {
            if !ok {
                continue;
            }
            let p = planner
                .strike_point(s, d)
                .expect("feasible strikes are reachable");
            state[s.index()] = StickState {
                aim: p,
                rest: [p[0], p[1], p[2] - limits.brake_depth()],
                free_at: t + limits.brake_time,
            };
        }
        let assigned: DrumSet = chosen.iter().map(|(d, _)| *d).collect();
        let mut strikes = chosen;
        strikes.sort_by_key(|(d, s)| (*d, *s));
        steps.push(StepAssignment {
            step: i,
            frame: step.frame,
            strikes,
            dropped: step.drums.difference(assigned).iter().collect(),
        });
    }
    Assignment { steps }
}
