//! MIDI ingestion: Standard MIDI File reading, percussion extraction,
//! articulation collapse and quantization onto a fixed-rate [`DrumTrack`].
//!
//! [`DrumTrack`]: crate::track::DrumTrack

mod ingest;
mod mapping;
pub mod smf;

pub use ingest::{collapse_articulations, extract_drum_events, quantize_to_track, CollapseMode};
pub use mapping::DrumMapping;

use serde::{Deserialize, Serialize};

/// Tempo assumed by the SMF format when no Set Tempo meta event is present.
pub const DEFAULT_TEMPO_US: u32 = 500_000;

/// General MIDI percussion channel (channel 10, zero-based).
pub const PERCUSSION_CHANNEL: u8 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoteKind {
    On,
    Off,
}

/// A channel note message at an absolute tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MidiEvent {
    pub tick: u64,
    pub channel: u8,
    pub kind: NoteKind,
    pub note: u8,
    pub velocity: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TempoEvent {
    pub tick: u64,
    pub us_per_quarter: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSigEvent {
    pub tick: u64,
    pub numerator: u8,
    /// Actual denominator (4 for x/4), not the SMF power-of-two exponent.
    pub denominator: u16,
}

/// All tracks of a Standard MIDI File merged into one absolute-tick stream.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MidiSong {
    pub ticks_per_quarter: u16,
    pub events: Vec<MidiEvent>,
    pub tempo_events: Vec<TempoEvent>,
    pub time_sig_events: Vec<TimeSigEvent>,
    /// Largest tick seen in any track, including End of Track.
    pub end_tick: u64,
}

/// A percussion note-on with its onset converted to seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoteOnEvent {
    pub note: u8,
    pub velocity: u8,
    pub onset: f64,
}

/// Piecewise-constant tempo map for tick to seconds conversion.
#[derive(Debug, Clone)]
pub struct TempoMap {
    ticks_per_quarter: f64,
    /// (start tick, seconds at start tick, µs per quarter) sorted by tick.
    segments: Vec<(u64, f64, u32)>,
}

impl TempoMap {
    pub fn new(song: &MidiSong) -> TempoMap {
        let tpq = f64::from(song.ticks_per_quarter.max(1));
        let mut changes: Vec<TempoEvent> = song.tempo_events.clone();
        changes.sort_by_key(|t| t.tick);
        let mut segments: Vec<(u64, f64, u32)> = vec![(0, 0.0, DEFAULT_TEMPO_US)];
        for change in changes {
            let &(start, secs, tempo) = segments.last().expect("nonempty");
            if change.tick == start {
                // later event at the same tick wins
                segments.last_mut().expect("nonempty").2 = change.us_per_quarter;
                continue;
            }
            let elapsed = (change.tick - start) as f64 * f64::from(tempo) * 1e-6 / tpq;
            segments.push((change.tick, secs + elapsed, change.us_per_quarter));
        }
        TempoMap {
            ticks_per_quarter: tpq,
            segments,
        }
    }

    pub fn seconds_at(&self, tick: u64) -> f64 {
        let idx = self.segments.partition_point(|s| s.0 <= tick) - 1;
        let (start, secs, tempo) = self.segments[idx];
        secs + (tick - start) as f64 * f64::from(tempo) * 1e-6 / self.ticks_per_quarter
    }

    /// Seconds spent under each tempo value up to `end_tick`, in order of
    /// first appearance.
    pub fn durations_until(&self, end_tick: u64) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        for (i, &(start, secs, tempo)) in self.segments.iter().enumerate() {
            let stop = self
                .segments
                .get(i + 1)
                .map_or(end_tick.max(start), |s| s.0);
            let dur = self.seconds_at(stop.max(start)) - secs;
            match out.iter_mut().find(|(t, _)| *t == tempo) {
                Some(entry) => entry.1 += dur,
                None => out.push((tempo, dur)),
            }
        }
        out
    }
}
