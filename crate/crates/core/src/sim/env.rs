use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::dynamics::{clamp_action, integrate, pd_control, SimState};
use super::kit::DrumKitLayout;
use super::strike::{detect_strikes, PointTips, StrikeEvent, TipMap};
use crate::drum::{DrumSet, NUM_DRUMS};
use crate::error::{Error, Result};
use crate::reward::{
    contact_reward, regularization_terms, total_reward, RewardBreakdown, RewardWeights,
    StepContactState,
};
use crate::rhythm::{build_chain, goal_window, sample_init, RhythmicContactChain, Segment};
use crate::track::DrumTrack;

/// Width of the spatial block: two tips and six drum centers, xyz each.
pub const SPATIAL_WIDTH: usize = 3 * (2 + NUM_DRUMS);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// `[q, qdot, a_prev]`
    pub proprio: Vec<f64>,
    /// `[left tip, right tip, drum centers...]`
    pub spatial: Vec<f64>,
    /// Flattened one-hot targets for frames `t ..= t + L`.
    pub goals: Vec<f64>,
}

impl Observation {
    pub fn widths(&self) -> (usize, usize, usize) {
        (self.proprio.len(), self.spatial.len(), self.goals.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// Start at the first frame of the segment.
    Start,
    /// Start at a randomly sampled contact step of the segment.
    MusicStateInit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub breakdown: RewardBreakdown,
    pub strikes: Vec<StrikeEvent>,
    pub done: bool,
}

/// One JSON-lines rollout record per control frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutRecord {
    pub frame: usize,
    pub q: Vec<f64>,
    pub action_clamped: bool,
    pub targets: DrumSet,
    pub strikes: Vec<StrikeEvent>,
    pub reward: RewardBreakdown,
}

/// Drumming environment over one song, stepped one control frame at a time.
pub struct DrumEnv {
    track: DrumTrack,
    chain: RhythmicContactChain,
    kit: DrumKitLayout,
    config: SimConfig,
    weights: RewardWeights,
    lookahead: usize,
    tip_map: Box<dyn TipMap>,
    state: SimState,
    end_frame: usize,
    done: bool,
    log: Option<Vec<RolloutRecord>>,
}

impl DrumEnv {
    pub fn new(
        track: DrumTrack,
        kit: DrumKitLayout,
        config: SimConfig,
        weights: RewardWeights,
        lookahead: usize,
    ) -> Result<DrumEnv> {
        config.validate()?;
        kit.validate()?;
        weights.validate()?;
        if track.fps() != config.control_fps {
            return Err(Error::FpsMismatch(track.fps(), config.control_fps));
        }
        let chain = build_chain(&track, "env");
        let state = SimState::at_rest(&config, 0);
        Ok(DrumEnv {
            track,
            chain,
            kit,
            config,
            weights,
            lookahead,
            tip_map: Box::new(PointTips),
            state,
            end_frame: 0,
            done: true,
            log: None,
        })
    }

    /// Swap the body model used to locate stick tips.
    pub fn with_tip_map(mut self, tip_map: Box<dyn TipMap>) -> DrumEnv {
        self.tip_map = tip_map;
        self
    }

    /// Record a [`RolloutRecord`] for every subsequent step.
    pub fn enable_log(&mut self) {
        self.log = Some(Vec::new());
    }

    pub fn take_log(&mut self) -> Vec<RolloutRecord> {
        self.log.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn chain(&self) -> &RhythmicContactChain {
        &self.chain
    }

    pub fn track(&self) -> &DrumTrack {
        &self.track
    }

    pub fn kit(&self) -> &DrumKitLayout {
        &self.kit
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Exclusive end frame of the running episode.
    pub fn end_frame(&self) -> usize {
        self.end_frame
    }

    pub fn reset<R: Rng + ?Sized>(
        &mut self,
        segment: &Segment,
        mode: InitMode,
        rng: &mut R,
    ) -> Result<Observation> {
        if segment.steps.end > self.chain.len() {
            return Err(Error::input("segment does not belong to this track"));
        }
        let start = match mode {
            InitMode::Start => segment.frames.start,
            InitMode::MusicStateInit => self.chain.steps[sample_init(segment, rng)?].frame,
        };
        self.state = SimState::at_rest(&self.config, start);
        self.end_frame = segment.frames.end + self.config.tail_padding;
        self.done = start >= self.end_frame;
        Ok(self.observe())
    }

    pub fn observe(&self) -> Observation {
        let s = &self.state;
        let proprio = [s.q.as_slice(), &s.qdot, &s.a_prev].concat();
        let tips = self.tip_map.tips(&s.q);
        let spatial: Vec<f64> = tips
            .iter()
            .chain(self.kit.centers().iter())
            .flatten()
            .copied()
            .collect();
        let goals = goal_window(&self.track, s.t_frame, self.lookahead).flatten();
        Observation {
            proprio,
            spatial,
            goals,
        }
    }

    pub fn step(&mut self, action: &[f64]) -> Result<StepOutcome> {
        if self.done {
            return Err(Error::Usage(
                "step called on a finished episode; call reset".into(),
            ));
        }
        let n = self.config.n;
        if action.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: action.len(),
            });
        }
        let mut a = action.to_vec();
        let action_clamped = clamp_action(&mut a);
        let q_target: Vec<f64> = a
            .iter()
            .zip(&self.config.q0)
            .map(|(a, q0)| self.config.beta * a + q0)
            .collect();

        let frame = self.state.t_frame;
        let qdot_before = self.state.qdot.clone();
        let mut strikes = Vec::new();
        for _ in 0..self.config.substeps() {
            let prev = self.state.clone();
            let force = pd_control(
                &q_target,
                &self.state.q,
                &self.state.qdot,
                &self.config.kp,
                &self.config.kd,
            )?;
            if let Err(e) = integrate(&mut self.state, &force, &self.config) {
                self.done = true;
                return Err(e);
            }
            let hits = detect_strikes(
                &prev,
                &self.state,
                &self.kit,
                &self.config,
                self.tip_map.as_ref(),
            );
            for hit in &hits {
                self.state.last_strike_frame[hit.drum.index()] = Some(hit.frame);
            }
            strikes.extend(hits);
        }

        let targets = self.track.at(frame);
        let executed: DrumSet = strikes.iter().map(|s| s.drum).collect();
        let contact_state = StepContactState {
            targets,
            executed,
            stick_positions: self.tip_map.tips(&self.state.q),
            drum_positions: self.kit.centers(),
        };
        let mut breakdown = contact_reward(&contact_state, &self.weights);
        let fps = f64::from(self.config.control_fps);
        let qddot: Vec<f64> = self
            .state
            .qdot
            .iter()
            .zip(&qdot_before)
            .map(|(v, v0)| (v - v0) * fps)
            .collect();
        let (rate, acc) = regularization_terms(&a, &self.state.a_prev, &qddot, &self.weights)?;
        let reward = total_reward(&mut breakdown, rate, acc);

        self.state.a_prev = a;
        self.state.t_frame += 1;
        self.done = self.state.t_frame >= self.end_frame;

        if let Some(log) = self.log.as_mut() {
            log.push(RolloutRecord {
                frame,
                q: self.state.q.clone(),
                action_clamped,
                targets,
                strikes: strikes.clone(),
                reward: breakdown,
            });
        }

        Ok(StepOutcome {
            observation: self.observe(),
            reward,
            breakdown,
            strikes,
            done: self.done,
        })
    }
}

/// JSON-lines rendering of a rollout log.
pub fn rollout_jsonl(records: &[RolloutRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drum::DrumId;
    use crate::rhythm::decompose;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn env_with(hits: &[(usize, DrumId)], lookahead: usize) -> DrumEnv {
        let track =
            DrumTrack::from_hits(50, hits.iter().map(|(f, d)| (*f, DrumSet::single(*d)))).unwrap();
        DrumEnv::new(
            track,
            DrumKitLayout::default(),
            SimConfig::default(),
            RewardWeights::default(),
            lookahead,
        )
        .unwrap()
    }

    #[test]
    fn observation_widths() {
        let mut env = env_with(&[(10, DrumId::SNARE), (20, DrumId::HI_HAT)], 20);
        let seg = Segment::whole(env.chain());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let obs = env.reset(&seg, InitMode::Start, &mut rng).unwrap();
        assert_eq!(obs.widths(), (18, 24, 6 * 21));
        let out = env.step(&[0.0; 6]).unwrap();
        assert_eq!(out.observation.widths(), (18, 24, 126));
    }

    #[test]
    fn start_and_msi_resets() {
        let hits: Vec<(usize, DrumId)> = (0..40).map(|i| (5 + 3 * i, DrumId::SNARE)).collect();
        let mut env = env_with(&hits, 4);
        let segs = decompose(env.chain(), 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        env.reset(&segs[1], InitMode::Start, &mut rng).unwrap();
        assert_eq!(env.state().t_frame, segs[1].frames.start);

        let starts = |seed| {
            let mut env = env_with(&hits, 4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10)
                .map(|_| {
                    env.reset(&segs[2], InitMode::MusicStateInit, &mut rng)
                        .unwrap();
                    env.state().t_frame
                })
                .collect::<Vec<_>>()
        };
        let a = starts(11);
        assert_eq!(a, starts(11));
        let chain = env.chain();
        assert!(a.iter().all(|f| chain.steps[segs[2].steps.clone()]
            .iter()
            .any(|s| s.frame == *f)));
    }

    #[test]
    fn zero_action_accrues_misses() {
        let mut env = env_with(&[(3, DrumId::SNARE), (8, DrumId::TOM_1)], 2);
        let seg = Segment::whole(env.chain());
        env.reset(&seg, InitMode::Start, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        let mut missed = 0.0;
        let mut steps = 0;
        while !env.is_done() {
            let frame = env.state().t_frame;
            let out = env.step(&[0.0; 6]).unwrap();
            assert!(out.strikes.is_empty());
            if env.track().at(frame).is_empty() {
                assert_eq!(out.breakdown.contact_total(), 0.0);
            } else {
                assert_eq!(out.breakdown.missed, -2.0);
            }
            missed += out.breakdown.missed;
            steps += 1;
        }
        assert_eq!(missed, -4.0);
        assert_eq!(steps, 9 + 10);
        assert!(matches!(env.step(&[0.0; 6]), Err(Error::Usage(_))));
    }

    #[test]
    fn fps_mismatch_rejected() {
        let track = DrumTrack::from_hits(100, [(3, DrumSet::single(DrumId::SNARE))]).unwrap();
        assert!(DrumEnv::new(
            track,
            DrumKitLayout::default(),
            SimConfig::default(),
            RewardWeights::default(),
            2
        )
        .is_err());
    }
}
