use serde::{Deserialize, Serialize};

use crate::drum::{DrumId, Stick};
use crate::error::{Error, Result};
use crate::sim::StrikeEvent;
use crate::track::{DrumTrack, SCHEMA_VERSION};

/// Executed strikes together with the frame rate they were recorded at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrikeLog {
    #[serde(default)]
    pub schema_version: u32,
    pub fps: u32,
    pub strikes: Vec<StrikeEvent>,
}

impl StrikeLog {
    pub fn new(fps: u32, mut strikes: Vec<StrikeEvent>) -> StrikeLog {
        strikes.sort_by_key(|s| (s.frame, s.drum, s.stick));
        StrikeLog {
            schema_version: SCHEMA_VERSION,
            fps,
            strikes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub drum: DrumId,
    pub target_frame: usize,
    pub strike_frame: usize,
    pub stick: Stick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetHit {
    pub frame: usize,
    pub drum: DrumId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub tolerance: usize,
    pub pairs: Vec<MatchedPair>,
    pub unmatched_targets: Vec<TargetHit>,
    pub unmatched_strikes: Vec<StrikeEvent>,
}

/// One-to-one matching of target hits to strikes, drum by drum: each target,
/// in time order, takes the earliest unused strike within ±`tolerance` frames.
pub fn match_events(targets: &DrumTrack, log: &StrikeLog, tolerance: usize) -> Result<Matching> {
    if targets.fps() != log.fps {
        return Err(Error::FpsMismatch(targets.fps(), log.fps));
    }
    let mut pairs = Vec::new();
    let mut unmatched_targets = Vec::new();
    let mut unmatched_strikes = Vec::new();
    for drum in DrumId::ALL {
        let wanted = targets.frames_of(drum);
        let mut struck: Vec<&StrikeEvent> = log.strikes.iter().filter(|s| s.drum == drum).collect();
        struck.sort_by_key(|s| s.frame);
        let mut j = 0;
        for &t in &wanted {
            while j < struck.len() && struck[j].frame + tolerance < t {
                unmatched_strikes.push(*struck[j]);
                j += 1;
            }
            if j < struck.len() && struck[j].frame <= t + tolerance {
                pairs.push(MatchedPair {
                    drum,
                    target_frame: t,
                    strike_frame: struck[j].frame,
                    stick: struck[j].stick,
                });
                j += 1;
            } else {
                unmatched_targets.push(TargetHit { frame: t, drum });
            }
        }
        unmatched_strikes.extend(struck[j..].iter().map(|s| **s));
    }
    Ok(Matching {
        tolerance,
        pairs,
        unmatched_targets,
        unmatched_strikes,
    })
}
