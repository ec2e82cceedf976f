//! Event-matched precision/recall/F1, rank correlation against song
//! features, and report documents for external plotting.

mod correlation;
mod matching;
mod score;

pub use correlation::{average_ranks, feature_correlations, spearman, Feature, FeatureCorrelation};
pub use matching::{match_events, MatchedPair, Matching, StrikeLog, TargetHit};
pub use score::{score, Counts, DrumScore, PerformanceScore};

use serde::{Deserialize, Serialize};

use crate::drum::DrumSet;
use crate::error::Result;
use crate::track::{DrumTrack, SCHEMA_VERSION};

/// Default matching tolerance in frames.
pub const DEFAULT_TOLERANCE: usize = 1;

/// Targets and strikes side by side for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitLogEntry {
    pub frame: usize,
    pub targets: DrumSet,
    pub strikes: DrumSet,
}

/// Every frame carrying a target or a strike, ascending.
pub fn aligned_hit_log(track: &DrumTrack, log: &StrikeLog) -> Vec<HitLogEntry> {
    let mut frames: std::collections::BTreeMap<usize, (DrumSet, DrumSet)> = track
        .hits()
        .iter()
        .map(|(&f, &s)| (f, (s, DrumSet::EMPTY)))
        .collect();
    for s in &log.strikes {
        frames.entry(s.frame).or_default().1.insert(s.drum);
    }
    frames
        .into_iter()
        .map(|(frame, (targets, strikes))| HitLogEntry {
            frame,
            targets,
            strikes,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchDiagnostics {
    pub tolerance: usize,
    pub matched: usize,
    pub unmatched_targets: Vec<TargetHit>,
    pub unmatched_strikes: Vec<crate::sim::StrikeEvent>,
    /// Mean signed strike-minus-target offset of matched pairs, in frames.
    pub mean_offset_frames: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub schema_version: u32,
    pub song: String,
    pub score: PerformanceScore,
    pub matching: MatchDiagnostics,
    pub hit_log: Vec<HitLogEntry>,
}

/// Match, score and assemble the full report for one performance.
pub fn evaluate(
    song: &str,
    track: &DrumTrack,
    log: &StrikeLog,
    tolerance: usize,
) -> Result<PerformanceReport> {
    let matching = match_events(track, log, tolerance)?;
    let score = score(&matching);
    let mean_offset_frames = (!matching.pairs.is_empty()).then(|| {
        matching
            .pairs
            .iter()
            .map(|p| p.strike_frame as f64 - p.target_frame as f64)
            .sum::<f64>()
            / matching.pairs.len() as f64
    });
    Ok(PerformanceReport {
        schema_version: SCHEMA_VERSION,
        song: song.to_string(),
        score,
        matching: MatchDiagnostics {
            tolerance,
            matched: matching.pairs.len(),
            unmatched_targets: matching.unmatched_targets,
            unmatched_strikes: matching.unmatched_strikes,
            mean_offset_frames,
        },
        hit_log: aligned_hit_log(track, log),
    })
}

/// Sample mean and standard deviation (n - 1 denominator; 0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drum::{DrumId, Stick};
    use crate::sim::StrikeEvent;

    #[test]
    fn report_for_one_dropped_strike() {
        let track =
            DrumTrack::from_hits(50, (0..4).map(|i| (10 * i, DrumSet::single(DrumId::SNARE))))
                .unwrap();
        let strikes = (0..3)
            .map(|i| StrikeEvent {
                frame: 10 * i,
                drum: DrumId::SNARE,
                stick: Stick::Left,
                impact_speed: 1.0,
            })
            .collect();
        let report = evaluate("s", &track, &StrikeLog::new(50, strikes), 1).unwrap();
        assert_eq!(report.score.overall.tp, 3);
        assert_eq!(report.score.overall.fn_, 1);
        assert_eq!(report.score.precision(), 1.0);
        assert_eq!(report.score.recall(), 0.75);
        assert!((report.score.f1() - 6.0 / 7.0).abs() < 1e-12);
        assert_eq!(report.hit_log.len(), 4);
        assert_eq!(report.hit_log[3].strikes, DrumSet::EMPTY);
        assert_eq!(report.matching.mean_offset_frames, Some(0.0));
    }

    #[test]
    fn mean_std_conventions() {
        assert_eq!(mean_std(&[0.9; 20]), (0.9, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
    }
}
