//! Song complexity metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::midi::{MidiSong, TempoMap, DEFAULT_TEMPO_US};
use crate::rhythm::RhythmicContactChain;
use crate::track::DrumTrack;

/// Per-song feature record. `None` marks a metric undefined for the song
/// (too few onsets, no hits, or no MIDI source for tempo/meter).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SongFeatures {
    pub bpm: Option<f64>,
    pub n_drums: usize,
    pub time_sig_changes: Option<usize>,
    pub npvi: Option<f64>,
    pub entropy: Option<f64>,
    pub polyphony_pct: Option<f64>,
}

/// Tempo that governs the most time, as BPM. Ties go to the tempo heard first.
pub fn compute_bpm(song: &MidiSong) -> f64 {
    let map = TempoMap::new(song);
    let mut best: Option<(u32, f64)> = None;
    for (tempo, dur) in map.durations_until(song.end_tick) {
        if best.is_none_or(|(_, d)| dur > d) {
            best = Some((tempo, dur));
        }
    }
    // With zero-length songs every duration is 0; fall back to the first tempo in effect.
    let tempo = match best {
        Some((t, d)) if d > 0.0 => t,
        _ => song
            .tempo_events
            .iter()
            .find(|t| t.tick == 0)
            .map_or(DEFAULT_TEMPO_US, |t| t.us_per_quarter),
    };
    60e6 / f64::from(tempo)
}

/// nPVI of a sequence of inter-onset intervals.
pub fn npvi_of(iois: &[f64]) -> Result<f64> {
    if iois.len() < 2 {
        return Err(Error::UndefinedMetric("npvi"));
    }
    let sum: f64 = iois
        .windows(2)
        .map(|w| (w[0] - w[1]).abs() / ((w[0] + w[1]) / 2.0))
        .sum();
    Ok(100.0 * sum / (iois.len() - 1) as f64)
}

/// nPVI over the chain's inter-onset intervals; needs at least three steps.
pub fn compute_npvi(chain: &RhythmicContactChain) -> Result<f64> {
    npvi_of(&chain.iois())
}

/// Shannon entropy of per-drum hit shares, normalized by log2 of the number
/// of drums actually used.
pub fn compute_entropy(track: &DrumTrack) -> Result<f64> {
    let counts = track.counts_per_drum();
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::UndefinedMetric("entropy"));
    }
    let used: Vec<f64> = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64)
        .collect();
    if used.len() == 1 {
        return Ok(0.0);
    }
    let total = total as f64;
    let h: f64 = used
        .iter()
        .map(|c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum();
    Ok(h / (used.len() as f64).log2())
}

pub fn count_time_sig_changes(song: &MidiSong) -> usize {
    song.time_sig_events
        .windows(2)
        .filter(|w| (w[0].numerator, w[0].denominator) != (w[1].numerator, w[1].denominator))
        .count()
}

pub fn count_drums(track: &DrumTrack) -> usize {
    track.counts_per_drum().iter().filter(|&&c| c > 0).count()
}

/// Percentage of hit frames that request three or more simultaneous drums.
pub fn compute_polyphony(track: &DrumTrack) -> Result<f64> {
    let hit_frames = track.hits().len();
    if hit_frames == 0 {
        return Err(Error::UndefinedMetric("polyphony"));
    }
    let dense = track.hits().values().filter(|s| s.len() >= 3).count();
    Ok(100.0 * dense as f64 / hit_frames as f64)
}

pub fn song_features(
    song: &MidiSong,
    track: &DrumTrack,
    chain: &RhythmicContactChain,
) -> SongFeatures {
    SongFeatures {
        bpm: Some(compute_bpm(song)),
        time_sig_changes: Some(count_time_sig_changes(song)),
        ..track_features(track, chain)
    }
}

/// Features computable without the MIDI source; tempo and meter stay `None`.
pub fn track_features(track: &DrumTrack, chain: &RhythmicContactChain) -> SongFeatures {
    SongFeatures {
        bpm: None,
        n_drums: count_drums(track),
        time_sig_changes: None,
        npvi: compute_npvi(chain).ok(),
        entropy: compute_entropy(track).ok(),
        polyphony_pct: compute_polyphony(track).ok(),
    }
}
