use serde::{Deserialize, Serialize};

use super::matching::Matching;
use crate::drum::{DrumId, NUM_DRUMS};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Counts {
    /// Ratios with degenerate denominators reported as 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Counts {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Counts {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrumScore {
    pub drum: DrumId,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceScore {
    #[serde(flatten)]
    pub overall: Counts,
    pub per_drum: Vec<DrumScore>,
}

impl PerformanceScore {
    pub fn f1(&self) -> f64 {
        self.overall.f1
    }

    pub fn precision(&self) -> f64 {
        self.overall.precision
    }

    pub fn recall(&self) -> f64 {
        self.overall.recall
    }
}

pub fn score(matching: &Matching) -> PerformanceScore {
    let mut tp = [0usize; NUM_DRUMS];
    let mut fp = [0usize; NUM_DRUMS];
    let mut fn_ = [0usize; NUM_DRUMS];
    for p in &matching.pairs {
        tp[p.drum.index()] += 1;
    }
    for s in &matching.unmatched_strikes {
        fp[s.drum.index()] += 1;
    }
    for t in &matching.unmatched_targets {
        fn_[t.drum.index()] += 1;
    }
    let per_drum = DrumId::ALL
        .iter()
        .map(|&d| DrumScore {
            drum: d,
            counts: Counts::from_counts(tp[d.index()], fp[d.index()], fn_[d.index()]),
        })
        .collect();
    PerformanceScore {
        overall: Counts::from_counts(tp.iter().sum(), fp.iter().sum(), fn_.iter().sum()),
        per_drum,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        let perfect = Counts::from_counts(5, 0, 0);
        assert_eq!(
            (perfect.precision, perfect.recall, perfect.f1),
            (1.0, 1.0, 1.0)
        );

        let extra = Counts::from_counts(4, 1, 0);
        assert!((extra.precision - 0.8).abs() < 1e-12);
        assert_eq!(extra.recall, 1.0);
        assert!((extra.f1 - 8.0 / 9.0).abs() < 1e-12);

        let silent = Counts::from_counts(0, 0, 7);
        assert_eq!(
            (silent.precision, silent.recall, silent.f1),
            (0.0, 0.0, 0.0)
        );
        assert_eq!(Counts::from_counts(0, 0, 0).f1, 0.0);
    }

    #[test]
    fn json_uses_fn_key() {
        let json = serde_json::to_value(Counts::from_counts(1, 2, 3)).unwrap();
        assert_eq!(json["fn"], 3);
    }
}
