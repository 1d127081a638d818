//! Binary classifier evaluation: ROC curve, trapezoidal AUC, confusion counts and F1.
//!
//! A sample is predicted positive when its score is at or above the threshold.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("scores and labels differ in length: {scores} vs {labels}")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("labels contain {positives} positive(s) and {negatives} negative(s); both classes are required")]
    DegenerateLabels { positives: usize, negatives: usize },
    #[error("label {label} at index {index} is not 0 or 1")]
    InvalidLabel { index: usize, label: u8 },
    #[error("score at index {index} is not a finite number")]
    NonFiniteScore { index: usize },
}

/// ROC points from (0,0) to (1,1). `thresholds[i]` is the cut-off that produces
/// `points[i]`; the leading (0,0) point has threshold +∞.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

fn check(scores: &[f64], labels: &[u8]) -> Result<(), MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(MetricsError::NonFiniteScore { index });
    }
    if let Some(index) = labels.iter().position(|l| *l > 1) {
        return Err(MetricsError::InvalidLabel {
            index,
            label: labels[index],
        });
    }
    Ok(())
}

/// Samples sorted by descending score, grouped by equal score:
/// (score, positives in group, negatives in group).
fn score_groups(scores: &[f64], labels: &[u8]) -> Vec<(f64, u64, u64)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut groups: Vec<(f64, u64, u64)> = Vec::new();
    for i in order {
        let (pos, neg) = if labels[i] == 1 { (1, 0) } else { (0, 1) };
        match groups.last_mut() {
            Some(g) if g.0 == scores[i] => {
                g.1 += pos;
                g.2 += neg;
            }
            _ => groups.push((scores[i], pos, neg)),
        }
    }
    groups
}

pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<RocCurve, MetricsError> {
    check(scores, labels)?;
    let positives = labels.iter().filter(|l| **l == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricsError::DegenerateLabels {
            positives,
            negatives,
        });
    }
    let (p, n) = (positives as f64, negatives as f64);
    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (0u64, 0u64);
    for (score, pos, neg) in score_groups(scores, labels) {
        tp += pos;
        fp += neg;
        points.push((fp as f64 / n, tp as f64 / p));
        thresholds.push(score);
    }
    Ok(RocCurve { points, thresholds })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

pub fn confusion(
    scores: &[f64],
    labels: &[u8],
    threshold: f64,
) -> Result<ConfusionCounts, MetricsError> {
    check(scores, labels)?;
    let mut c = ConfusionCounts::default();
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// `2·tp / (2·tp + fp + fn)`, 0 when the denominator is 0.
pub fn f1_score(counts: &ConfusionCounts) -> f64 {
    let denom = 2 * counts.tp + counts.fp + counts.fn_;
    if denom == 0 {
        0.0
    } else {
        (2 * counts.tp) as f64 / denom as f64
    }
}

/// Highest F1 over thresholds at the unique scores, and the (highest) threshold achieving it.
pub fn f1_max(scores: &[f64], labels: &[u8]) -> Result<(f64, f64), MetricsError> {
    check(scores, labels)?;
    let positives = labels.iter().filter(|l| **l == 1).count() as u64;
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut best = (0.0, f64::INFINITY);
    for (score, pos, neg) in score_groups(scores, labels) {
        tp += pos;
        fp += neg;
        let f1 = f1_score(&ConfusionCounts {
            tp,
            fp,
            tn: 0,
            fn_: positives - tp,
        });
        if f1 > best.0 {
            best = (f1, score);
        }
    }
    Ok(best)
}

pub const METRICS_FORMAT: &str = "claimlens-metrics";
pub const METRICS_VERSION: u32 = 1;

/// Machine-readable evaluation summary. ROC points are `[fpr, tpr, threshold]`
/// with a null threshold for the leading (0,0) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub format: String,
    pub version: u32,
    pub samples: usize,
    pub positives: usize,
    pub auc: f64,
    pub f1_at_half: f64,
    pub confusion_at_half: ConfusionCounts,
    pub f1_max: f64,
    pub threshold_at_f1_max: f64,
    pub roc: Vec<(f64, f64, Option<f64>)>,
}

pub fn evaluate_scores(scores: &[f64], labels: &[u8]) -> Result<MetricsReport, MetricsError> {
    let curve = roc_curve(scores, labels)?;
    let at_half = confusion(scores, labels, 0.5)?;
    let (best, best_threshold) = f1_max(scores, labels)?;
    Ok(MetricsReport {
        format: METRICS_FORMAT.to_string(),
        version: METRICS_VERSION,
        samples: scores.len(),
        positives: labels.iter().filter(|l| **l == 1).count(),
        auc: auc(&curve),
        f1_at_half: f1_score(&at_half),
        confusion_at_half: at_half,
        f1_max: best,
        threshold_at_f1_max: best_threshold,
        roc: curve
            .points
            .iter()
            .zip(&curve.thresholds)
            .map(|(&(x, y), &t)| (x, y, t.is_finite().then_some(t)))
            .collect(),
    })
}
