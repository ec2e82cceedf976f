use std::collections::BTreeMap;

use super::{DrumMapping, MidiSong, NoteKind, NoteOnEvent, TempoMap, PERCUSSION_CHANNEL};
use crate::drum::{DrumId, DrumSet};
use crate::error::{Error, Result};
use crate::track::DrumTrack;

/// What happens to minority articulations of a drum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CollapseMode {
    /// Keep only the most frequent note number per drum.
    #[default]
    Discard,
    /// Keep every mapped note; all articulations land on their drum.
    Remap,
}

/// Note-ons on the percussion channel, with onsets in seconds, sorted by onset.
///
/// Velocity-0 note-ons are note-offs and are skipped.
pub fn extract_drum_events(song: &MidiSong) -> Vec<NoteOnEvent> {
    let tempo = TempoMap::new(song);
    let mut out: Vec<NoteOnEvent> = song
        .events
        .iter()
        .filter(|e| e.channel == PERCUSSION_CHANNEL && e.kind == NoteKind::On && e.velocity > 0)
        .map(|e| NoteOnEvent {
            note: e.note,
            velocity: e.velocity,
            onset: tempo.seconds_at(e.tick),
        })
        .collect();
    out.sort_by(|a, b| a.onset.total_cmp(&b.onset));
    out
}

pub fn collapse_articulations(
    events: &[NoteOnEvent],
    mapping: &DrumMapping,
    mode: CollapseMode,
) -> Vec<NoteOnEvent> {
    let mapped = events.iter().filter(|e| mapping.drum_for(e.note).is_some());
    if mode == CollapseMode::Remap {
        return mapped.copied().collect();
    }

    let mut counts: BTreeMap<(DrumId, u8), usize> = BTreeMap::new();
    for e in events {
        if let Some(drum) = mapping.drum_for(e.note) {
            *counts.entry((drum, e.note)).or_default() += 1;
        }
    }
    // BTreeMap iterates notes ascending, so `>` keeps the lower note on ties.
    let mut winner: BTreeMap<DrumId, (u8, usize)> = BTreeMap::new();
    for ((drum, note), n) in counts {
        let best = winner.entry(drum).or_insert((note, n));
        if n > best.1 {
            *best = (note, n);
        }
    }
    mapped
        .filter(|e| {
            let drum = mapping.drum_for(e.note).expect("mapped");
            winner[&drum].0 == e.note
        })
        .copied()
        .collect()
}

/// Place each event on frame `round(onset * fps)`; coinciding same-drum
/// hits merge.
pub fn quantize_to_track(
    events: &[NoteOnEvent],
    mapping: &DrumMapping,
    fps: u32,
) -> Result<DrumTrack> {
    if fps == 0 {
        return Err(Error::input("fps must be positive"));
    }
    let mut hits: Vec<(usize, DrumSet)> = Vec::with_capacity(events.len());
    for e in events {
        if !(e.onset >= 0.0) || !e.onset.is_finite() {
            return Err(Error::input(format!(
                "onset {} must be finite and non-negative",
                e.onset
            )));
        }
        let Some(drum) = mapping.drum_for(e.note) else {
            continue;
        };
        let frame = (e.onset * f64::from(fps)).round() as usize;
        hits.push((frame, DrumSet::single(drum)));
    }
    DrumTrack::from_hits(fps, hits)
}
