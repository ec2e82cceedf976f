//! Synthetic drum songs: isochronous grooves and a seeded sweep that varies
//! timing irregularity, drum count and tempo independently.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drum::{DrumId, DrumSet};
use crate::error::Result;
use crate::midi::{MidiEvent, MidiSong, NoteKind, TempoEvent, PERCUSSION_CHANNEL};
use crate::track::DrumTrack;

const TICKS_PER_QUARTER: u16 = 480;

/// General MIDI note used to write each drum.
pub fn gm_note(drum: DrumId) -> u8 {
    [42, 38, 48, 45, 49, 51][drum.index()]
}

/// Hits every `interval_frames` from `start` for `count` hits, cycling through `drums`.
pub fn isochronous_track(
    fps: u32,
    start: usize,
    interval_frames: usize,
    count: usize,
    drums: &[DrumId],
) -> Result<DrumTrack> {
    DrumTrack::from_hits(
        fps,
        (0..count).map(|i| {
            (
                start + i * interval_frames,
                DrumSet::single(drums[i % drums.len()]),
            )
        }),
    )
}

/// A song at `bpm` with `per_beat` evenly spaced onsets per quarter note,
/// cycling through `drums`, starting after `lead_in_seconds`.
pub fn isochronous_song(
    bpm: f64,
    per_beat: u16,
    drums: &[DrumId],
    seconds: f64,
    lead_in_seconds: f64,
) -> MidiSong {
    let us_per_quarter = (60_000_000.0 / bpm).round() as u32;
    let beat_secs = f64::from(us_per_quarter) / 1e6;
    let step = u64::from(TICKS_PER_QUARTER / per_beat);
    let lead = (lead_in_seconds / beat_secs * f64::from(TICKS_PER_QUARTER)).round() as u64;
    let count = (seconds / beat_secs * f64::from(per_beat)).round() as usize;
    let mut events = Vec::with_capacity(2 * count);
    for i in 0..count {
        let tick = lead + i as u64 * step;
        let note = gm_note(drums[i % drums.len()]);
        events.push(MidiEvent {
            tick,
            channel: PERCUSSION_CHANNEL,
            kind: NoteKind::On,
            note,
            velocity: 96,
        });
        events.push(MidiEvent {
            tick: tick + step / 2,
            channel: PERCUSSION_CHANNEL,
            kind: NoteKind::Off,
            note,
            velocity: 0,
        });
    }
    MidiSong {
        ticks_per_quarter: TICKS_PER_QUARTER,
        end_tick: events.last().map_or(0, |e| e.tick),
        events,
        tempo_events: vec![TempoEvent {
            tick: 0,
            us_per_quarter,
        }],
        time_sig_events: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSpec {
    /// Tempo written to the file; onset times in seconds do not depend on it.
    pub bpm: f64,
    /// Long-to-short ratio of inter-onset intervals; 1 is isochronous.
    pub ratio: f64,
    /// Mean inter-onset interval, s.
    pub mean_ioi: f64,
    pub drums: Vec<DrumId>,
    pub seconds: f64,
    /// Silence before the first onset.
    pub lead_in_seconds: f64,
    pub seed: u64,
}

/// A percussion-channel song whose inter-onset intervals are short or long
/// at random, each onset hitting a drum drawn uniformly from `drums`.
pub fn pattern_song(spec: &PatternSpec) -> MidiSong {
    let tpq = f64::from(TICKS_PER_QUARTER);
    let short = 2.0 * spec.mean_ioi / (1.0 + spec.ratio);
    let long = short * spec.ratio;
    let us_per_quarter = (60_000_000.0 / spec.bpm).round() as u32;
    let secs_per_tick = f64::from(us_per_quarter) / 1e6 / tpq;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut events = Vec::new();
    let mut t = spec.lead_in_seconds;
    while t < spec.lead_in_seconds + spec.seconds {
        let drum = *spec.drums.choose(&mut rng).expect("at least one drum");
        let at = (t / secs_per_tick).round() as u64;
        let velocity = rng.gen_range(70..=110);
        for (kind, dt, vel) in [(NoteKind::On, 0, velocity), (NoteKind::Off, 30, 0)] {
            events.push(MidiEvent {
                tick: at + dt,
                channel: PERCUSSION_CHANNEL,
                kind,
                note: gm_note(drum),
                velocity: vel,
            });
        }
        t += if rng.gen_bool(0.5) { short } else { long };
    }
    events.sort_by_key(|e| (e.tick, e.kind == NoteKind::On));
    MidiSong {
        ticks_per_quarter: TICKS_PER_QUARTER,
        end_tick: events.last().map_or(0, |e| e.tick),
        events,
        tempo_events: vec![TempoEvent {
            tick: 0,
            us_per_quarter,
        }],
        time_sig_events: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSong {
    pub id: String,
    pub spec: PatternSpec,
    pub song: MidiSong,
}

/// Interval ratios giving four rhythmic-variability levels.
pub const SWEEP_RATIOS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

/// Tempi cycled so that tempo is balanced against the other factors.
pub const SWEEP_TEMPI: [f64; 4] = [100.0, 110.0, 120.0, 130.0];

/// Order in which drums join as the drum count grows.
pub const SWEEP_DRUM_ORDER: [DrumId; 6] = [
    DrumId::HI_HAT,
    DrumId::SNARE,
    DrumId::TOM_1,
    DrumId::TOM_2,
    DrumId::CYMBAL_1,
    DrumId::CYMBAL_2,
];

/// `n` songs: variability level `i % 4`, drum count `2 + (i / 4) % 5`, and a
/// tempo chosen from a Latin square over the variability levels. The mean
/// inter-onset interval is 0.25 s throughout.
pub fn sweep(n: usize, seconds: f64, seed: u64) -> Vec<SweepSong> {
    (0..n)
        .map(|i| {
            let level = i % 4;
            let n_drums = 2 + (i / 4) % 5;
            let bpm = SWEEP_TEMPI[(level + i / 4) % 4];
            let spec = PatternSpec {
                bpm,
                ratio: SWEEP_RATIOS[level],
                mean_ioi: 0.25,
                drums: SWEEP_DRUM_ORDER[..n_drums].to_vec(),
                seconds,
                lead_in_seconds: 1.0,
                seed: seed.wrapping_add(1 + i as u64),
            };
            SweepSong {
                id: format!("sweep-{i:02}"),
                song: pattern_song(&spec),
                spec,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::midi::{extract_drum_events, quantize_to_track, DrumMapping};

    #[test]
    fn isochronous_layout() {
        let t = isochronous_track(50, 10, 25, 4, &[DrumId::HI_HAT, DrumId::SNARE]).unwrap();
        assert_eq!(
            t.hits().keys().copied().collect::<Vec<_>>(),
            vec![10, 35, 60, 85]
        );
        assert_eq!(t.at(35), DrumSet::single(DrumId::SNARE));
    }

    #[test]
    fn isochronous_song_timing() {
        let song = isochronous_song(120.0, 2, &[DrumId::HI_HAT, DrumId::SNARE], 2.0, 1.0);
        let onsets: Vec<f64> = extract_drum_events(&song).iter().map(|e| e.onset).collect();
        assert_eq!(onsets.len(), 8);
        assert!((onsets[0] - 1.0).abs() < 1e-12);
        assert!((onsets[7] - 2.75).abs() < 1e-12);
    }

    #[test]
    fn pattern_uses_two_intervals() {
        let spec = PatternSpec {
            bpm: 120.0,
            ratio: 3.0,
            mean_ioi: 0.25,
            drums: vec![DrumId::SNARE],
            seconds: 4.0,
            lead_in_seconds: 1.0,
            seed: 1,
        };
        let song = pattern_song(&spec);
        let onsets: Vec<f64> = extract_drum_events(&song).iter().map(|e| e.onset).collect();
        assert!((onsets[0] - 1.0).abs() < 1e-9);
        for w in onsets.windows(2) {
            let ioi = w[1] - w[0];
            assert!(
                (ioi - 0.125).abs() < 1e-3 || (ioi - 0.375).abs() < 1e-3,
                "{ioi}"
            );
        }
        let track = quantize_to_track(
            &extract_drum_events(&song),
            &DrumMapping::general_midi(),
            50,
        )
        .unwrap();
        assert_eq!(track.hit_count(), onsets.len());
    }

    #[test]
    fn sweep_design() {
        let songs = sweep(24, 5.0, 7);
        assert_eq!(songs.len(), 24);
        for level in 0..4 {
            let tempi: Vec<f64> = songs
                .iter()
                .filter(|s| s.spec.ratio == SWEEP_RATIOS[level])
                .map(|s| s.spec.bpm)
                .collect();
            for bpm in SWEEP_TEMPI {
                assert!(tempi.contains(&bpm));
            }
        }
        assert_eq!(songs[23].spec.drums.len(), 2 + 5 % 5);
        assert_eq!(songs, sweep(24, 5.0, 7));
    }
}
