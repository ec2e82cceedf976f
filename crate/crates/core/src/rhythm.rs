//! The rhythmic contact chain: ordered timed contact steps built from a
//! [`DrumTrack`], their split into fixed-size segments, and the lookahead
//! window of upcoming drum targets.

use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::drum::{DrumSet, StickSet, NUM_DRUMS};
use crate::error::{Error, Result};
use crate::track::{DrumTrack, SCHEMA_VERSION};

/// Default number of contact steps per segment.
pub const DEFAULT_SEGMENT_STEPS: usize = 32;

/// Default lookahead, in frames.
pub const DEFAULT_LOOKAHEAD: usize = 20;

/// One timed contact: the drums to strike at `frame`, and which sticks may do it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactStep {
    pub frame: usize,
    pub time: f64,
    pub drums: DrumSet,
    pub sticks: StickSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhythmicContactChain {
    pub song_id: String,
    pub fps: u32,
    pub steps: Vec<ContactStep>,
}

impl RhythmicContactChain {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Inter-onset intervals in seconds between consecutive steps.
    pub fn iois(&self) -> Vec<f64> {
        let fps = f64::from(self.fps);
        self.steps
            .windows(2)
            .map(|w| (w[1].frame - w[0].frame) as f64 / fps)
            .collect()
    }

    /// Reconstruct a track holding exactly the chain's hits.
    pub fn to_track(&self, n_frames: usize) -> Result<DrumTrack> {
        DrumTrack::new(
            self.fps,
            n_frames,
            self.steps.iter().map(|s| (s.frame, s.drums)),
        )
    }

    /// Restrict the sticks allowed at step `index`.
    pub fn restrict_sticks(&mut self, index: usize, sticks: StickSet) -> Result<()> {
        if sticks.is_empty() {
            return Err(Error::input("stick set must not be empty"));
        }
        let step = self
            .steps
            .get_mut(index)
            .ok_or_else(|| Error::input(format!("no contact step {index}")))?;
        step.sticks = sticks;
        Ok(())
    }
}

/// One nonempty frame becomes one contact step; every step may use either stick.
pub fn build_chain(track: &DrumTrack, song_id: impl Into<String>) -> RhythmicContactChain {
    let steps = track
        .hits()
        .iter()
        .map(|(&frame, &drums)| ContactStep {
            frame,
            time: track.frame_time(frame),
            drums,
            sticks: StickSet::BOTH,
        })
        .collect();
    RhythmicContactChain {
        song_id: song_id.into(),
        fps: track.fps(),
        steps,
    }
}

/// A contiguous run of contact steps, `m` counting from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub m: usize,
    pub steps: Range<usize>,
    /// Frames owned by the segment. Segment 1 starts at frame 0 and each
    /// later segment starts where the previous one ended, so the ranges tile
    /// the song up to the last contact frame.
    pub frames: Range<usize>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The whole chain as a single segment.
    pub fn whole(chain: &RhythmicContactChain) -> Segment {
        let end = chain.steps.last().map_or(0, |s| s.frame + 1);
        Segment {
            m: 1,
            steps: 0..chain.len(),
            frames: 0..end,
        }
    }
}

/// Split the chain into `ceil(N / steps_per_segment)` segments; the last may be short.
pub fn decompose(chain: &RhythmicContactChain, steps_per_segment: usize) -> Result<Vec<Segment>> {
    if steps_per_segment < 1 {
        return Err(Error::input("segment size must be at least 1"));
    }
    let n = chain.len();
    let mut out = Vec::with_capacity(n.div_ceil(steps_per_segment));
    let mut frame_start = 0;
    for (i, start) in (0..n).step_by(steps_per_segment).enumerate() {
        let end = (start + steps_per_segment).min(n);
        let frame_end = chain.steps[end - 1].frame + 1;
        out.push(Segment {
            m: i + 1,
            steps: start..end,
            frames: frame_start..frame_end,
        });
        frame_start = frame_end;
    }
    Ok(out)
}

/// Uniformly sample a contact-step index inside the segment.
pub fn sample_init<R: Rng + ?Sized>(segment: &Segment, rng: &mut R) -> Result<usize> {
    if segment.is_empty() {
        return Err(Error::input("cannot sample from an empty segment"));
    }
    Ok(rng.gen_range(segment.steps.clone()))
}

/// One-hot targets for frames `t ..= t + lookahead`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalWindow {
    pub t: usize,
    pub lookahead: usize,
    pub rows: Vec<[f64; NUM_DRUMS]>,
}

impl GoalWindow {
    pub fn flatten(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }
}

pub fn goal_window(track: &DrumTrack, t: usize, lookahead: usize) -> GoalWindow {
    let rows = (t..=t + lookahead).map(|f| track.at(f).one_hot()).collect();
    GoalWindow { t, lookahead, rows }
}

#[derive(Serialize)]
struct ChainExport<'a> {
    schema_version: u32,
    song_id: &'a str,
    fps: u32,
    steps: &'a [ContactStep],
    segments: &'a [Segment],
}

/// JSON view of a chain and its segments for inspection.
pub fn export_json(chain: &RhythmicContactChain, segments: &[Segment]) -> String {
    serde_json::to_string_pretty(&ChainExport {
        schema_version: SCHEMA_VERSION,
        song_id: &chain.song_id,
        fps: chain.fps,
        steps: &chain.steps,
        segments,
    })
    .expect("chain serializes")
}
