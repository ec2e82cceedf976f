use serde::{Deserialize, Serialize};

use crate::complexity::SongFeatures;
use crate::error::{Error, Result};

/// 1-based ranks with tied values sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::UndefinedCorrelation(
            "need at least two observations".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite value".into()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
        .ok_or_else(|| Error::UndefinedCorrelation("a variable has constant ranks".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Npvi,
    NDrums,
    Polyphony,
    Entropy,
    Bpm,
    TimeSigChanges,
}

impl Feature {
    pub const ALL: [Feature; 6] = [
        Feature::Npvi,
        Feature::NDrums,
        Feature::Polyphony,
        Feature::Entropy,
        Feature::Bpm,
        Feature::TimeSigChanges,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Npvi => "npvi",
            Feature::NDrums => "n_drums",
            Feature::Polyphony => "polyphony",
            Feature::Entropy => "entropy",
            Feature::Bpm => "bpm",
            Feature::TimeSigChanges => "time_sig_changes",
        }
    }

    pub fn value(self, f: &SongFeatures) -> Option<f64> {
        match self {
            Feature::Npvi => f.npvi,
            Feature::NDrums => Some(f.n_drums as f64),
            Feature::Polyphony => f.polyphony_pct,
            Feature::Entropy => f.entropy,
            Feature::Bpm => f.bpm,
            Feature::TimeSigChanges => f.time_sig_changes.map(|c| c as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCorrelation {
    pub feature: Feature,
    /// `None` when the correlation is undefined for this feature.
    pub rho: Option<f64>,
    /// Songs where the feature was defined.
    pub n: usize,
    /// `(feature value, F1)` points used for the estimate.
    pub points: Vec<(f64, f64)>,
}

/// Rank correlation of each feature with F1, skipping songs where the feature is absent.
pub fn feature_correlations(
    features: &[SongFeatures],
    f1: &[f64],
) -> Result<Vec<FeatureCorrelation>> {
    if features.len() != f1.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            got: f1.len(),
        });
    }
    Ok(Feature::ALL
        .iter()
        .map(|&feature| {
            let points: Vec<(f64, f64)> = features
                .iter()
                .zip(f1)
                .filter_map(|(f, &s)| feature.value(f).map(|v| (v, s)))
                .collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
            FeatureCorrelation {
                feature,
                rho: spearman(&xs, &ys).ok(),
                n: points.len(),
                points,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(
            average_ranks(&[10.0, 30.0, 20.0, 20.0]),
            vec![1.0, 4.0, 2.5, 2.5]
        );
        assert_eq!(average_ranks(&[1.0, 1.0, 1.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[2.0, 1.0, 3.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    fn feat(npvi: f64, n_drums: usize) -> SongFeatures {
        SongFeatures {
            bpm: Some(120.0),
            n_drums,
            time_sig_changes: Some(0),
            npvi: Some(npvi),
            entropy: None,
            polyphony_pct: Some(0.0),
        }
    }

    #[test]
    fn per_feature_table() {
        let features = vec![feat(5.0, 2), feat(20.0, 3), feat(40.0, 5), feat(60.0, 4)];
        let f1 = [0.99, 0.95, 0.9, 0.8];
        let table = feature_correlations(&features, &f1).unwrap();
        let get = |f: Feature| table.iter().find(|c| c.feature == f).unwrap();
        assert!((get(Feature::Npvi).rho.unwrap() + 1.0).abs() < 1e-12);
        assert!((get(Feature::NDrums).rho.unwrap() + 0.8).abs() < 1e-12);
        assert_eq!(get(Feature::Bpm).rho, None);
        assert_eq!(get(Feature::Entropy).n, 0);
        assert_eq!(get(Feature::Entropy).rho, None);
    }
}
