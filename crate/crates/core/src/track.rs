//! Fixed-rate drum hit grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::drum::{DrumId, DrumSet};
use crate::error::{Error, Result};

pub const DEFAULT_FPS: u32 = 50;

/// Current version tag written into every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Time-indexed drum sequence: for each frame, the set of drums to strike.
///
/// Only frames with at least one hit are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrumTrack {
    fps: u32,
    n_frames: usize,
    hits: BTreeMap<usize, DrumSet>,
}

impl DrumTrack {
    pub fn empty(fps: u32) -> DrumTrack {
        DrumTrack {
            fps,
            n_frames: 0,
            hits: BTreeMap::new(),
        }
    }

    /// Build a track from frame/hit pairs. Empty sets are dropped; `n_frames`
    /// must exceed every frame index.
    pub fn new(
        fps: u32,
        n_frames: usize,
        hits: impl IntoIterator<Item = (usize, DrumSet)>,
    ) -> Result<DrumTrack> {
        if fps == 0 {
            return Err(Error::input("fps must be positive"));
        }
        let mut map: BTreeMap<usize, DrumSet> = BTreeMap::new();
        for (frame, set) in hits {
            if set.is_empty() {
                continue;
            }
            if frame >= n_frames {
                return Err(Error::input(format!(
                    "frame {frame} outside track of {n_frames} frames"
                )));
            }
            let slot = map.entry(frame).or_default();
            *slot = slot.union(set);
        }
        Ok(DrumTrack {
            fps,
            n_frames,
            hits: map,
        })
    }

    /// Track whose length is just enough to hold the given hits.
    pub fn from_hits(
        fps: u32,
        hits: impl IntoIterator<Item = (usize, DrumSet)>,
    ) -> Result<DrumTrack> {
        let hits: Vec<(usize, DrumSet)> = hits.into_iter().filter(|(_, s)| !s.is_empty()).collect();
        let n_frames = hits.iter().map(|(f, _)| f + 1).max().unwrap_or(0);
        DrumTrack::new(fps, n_frames, hits)
    }

    pub fn fps(&self) -> u32 {
        self.fps
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn duration_secs(&self) -> f64 {
        self.n_frames as f64 / f64::from(self.fps)
    }

    pub fn frame_time(&self, frame: usize) -> f64 {
        frame as f64 / f64::from(self.fps)
    }

    /// Drums due at `frame`; empty for silent or out-of-range frames.
    pub fn at(&self, frame: usize) -> DrumSet {
        self.hits.get(&frame).copied().unwrap_or_default()
    }

    pub fn hits(&self) -> &BTreeMap<usize, DrumSet> {
        &self.hits
    }

    /// Number of (frame, drum) hits.
    pub fn hit_count(&self) -> usize {
        self.hits.values().map(|s| s.len()).sum()
    }

    pub fn counts_per_drum(&self) -> [usize; crate::drum::NUM_DRUMS] {
        let mut counts = [0; crate::drum::NUM_DRUMS];
        for set in self.hits.values() {
            for d in set.iter() {
                counts[d.index()] += 1;
            }
        }
        counts
    }

    /// Frames at which `drum` is due, ascending.
    pub fn frames_of(&self, drum: DrumId) -> Vec<usize> {
        self.hits
            .iter()
            .filter(|(_, s)| s.contains(drum))
            .map(|(f, _)| *f)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TrackJson::from(self)).expect("track serializes")
    }

    pub fn from_json(text: &str) -> Result<DrumTrack> {
        let raw: TrackJson =
            serde_json::from_str(text).map_err(|e| Error::input(format!("track JSON: {e}")))?;
        DrumTrack::new(raw.fps, raw.n_frames, raw.frames)
    }
}

#[derive(Serialize, Deserialize)]
struct TrackJson {
    #[serde(default = "schema_version")]
    schema_version: u32,
    fps: u32,
    n_frames: usize,
    frames: Vec<(usize, DrumSet)>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

impl From<&DrumTrack> for TrackJson {
    fn from(track: &DrumTrack) -> Self {
        TrackJson {
            schema_version: SCHEMA_VERSION,
            fps: track.fps,
            n_frames: track.n_frames,
            frames: track.hits.iter().map(|(f, s)| (*f, *s)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_layout() {
        let track = DrumTrack::from_hits(
            50,
            [
                (5, [DrumId::HI_HAT, DrumId::CYMBAL_1].into_iter().collect()),
                (0, DrumSet::single(DrumId::SNARE)),
            ],
        )
        .unwrap();
        assert_eq!(
            track.to_json(),
            r#"{"schema_version":1,"fps":50,"n_frames":6,"frames":[[0,[1]],[5,[0,4]]]}"#
        );
        assert_eq!(DrumTrack::from_json(&track.to_json()).unwrap(), track);
    }

    #[test]
    fn rejects_frames_past_end() {
        assert!(DrumTrack::new(50, 3, [(3, DrumSet::single(DrumId::SNARE))]).is_err());
        assert!(DrumTrack::from_json(r#"{"fps":50,"n_frames":2,"frames":[[2,[1]]]}"#).is_err());
    }

    #[test]
    fn empty_sets_not_stored() {
        let t = DrumTrack::new(50, 4, [(1, DrumSet::EMPTY)]).unwrap();
        assert!(t.hits().is_empty());
        assert_eq!(t.n_frames(), 4);
    }
}
