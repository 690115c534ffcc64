//! Confusion-matrix metrics: precision, recall, accuracy, F1, and the
//! Matthews Correlation Coefficient, plus percentage-point delta reports.

use serde::Serialize;

use crate::error::{Error, Result};

/// Binary confusion counts with "useful" as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fn_: u64, fp: u64, tn: u64) -> Self {
        ConfusionMatrix {
            true_positives: tp,
            false_negatives: fn_,
            false_positives: fp,
            true_negatives: tn,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }

    pub fn record(&mut self, actual: u8, predicted: u8) {
        match (actual, predicted) {
            (1, 1) => self.true_positives += 1,
            (0, 1) => self.false_positives += 1,
            (0, 0) => self.true_negatives += 1,
            _ => self.false_negatives += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.true_negatives += other.true_negatives;
        self.false_negatives += other.false_negatives;
    }
}

/// Matthews Correlation Coefficient. Any zero factor in the denominator
/// yields 0 by convention.
pub fn mcc(c: &ConfusionMatrix) -> f64 {
    let tp = c.true_positives as f64;
    let fp = c.false_positives as f64;
    let tn = c.true_negatives as f64;
    let fn_ = c.false_negatives as f64;
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if denom == 0.0 {
        return 0.0;
    }
    (tp * tn - fp * fn_) / denom.sqrt()
}

/// Metrics bundle, recomputable from the confusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalMetrics {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub mcc: f64,
    pub confusion: ConfusionMatrix,
}

impl EvalMetrics {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Self {
        let tp = confusion.true_positives as f64;
        let fp = confusion.false_positives as f64;
        let tn = confusion.true_negatives as f64;
        let fn_ = confusion.false_negatives as f64;
        let precision = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
        let recall = if tp + fn_ == 0.0 { 0.0 } else { tp / (tp + fn_) };
        let total = tp + fp + tn + fn_;
        let accuracy = if total == 0.0 { 0.0 } else { (tp + tn) / total };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EvalMetrics {
            precision,
            recall,
            accuracy,
            f1,
            mcc: mcc(&confusion),
            confusion,
        }
    }

    /// CSV values in the fixed column order `P,R,A,M,F1`.
    pub fn csv_values(&self) -> String {
        format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.precision, self.recall, self.accuracy, self.mcc, self.f1
        )
    }
}

/// Per-metric differences in percentage points: with-emoji minus without.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    pub dataset: String,
    pub mode: String,
    pub d_precision: f64,
    pub d_recall: f64,
    pub d_accuracy: f64,
    pub d_mcc: f64,
    pub d_f1: f64,
}

/// Build a delta report from two metric bundles computed on the same
/// dataset and fold assignment.
pub fn delta_report(
    with_emoji: &EvalMetrics,
    without_emoji: &EvalMetrics,
    with_tag: &str,
    without_tag: &str,
    mode: &str,
) -> Result<DeltaReport> {
    if with_tag != without_tag {
        return Err(Error::MismatchedTags {
            with_tag: with_tag.to_string(),
            without_tag: without_tag.to_string(),
        });
    }
    let pp = |w: f64, wo: f64| 100.0 * (w - wo);
    Ok(DeltaReport {
        dataset: with_tag.to_string(),
        mode: mode.to_string(),
        d_precision: pp(with_emoji.precision, without_emoji.precision),
        d_recall: pp(with_emoji.recall, without_emoji.recall),
        d_accuracy: pp(with_emoji.accuracy, without_emoji.accuracy),
        d_mcc: pp(with_emoji.mcc, without_emoji.mcc),
        d_f1: pp(with_emoji.f1, without_emoji.f1),
    })
}

impl DeltaReport {
    /// CSV row `dataset,mode,P,R,A,M,F1`, deltas rendered at one decimal
    /// place.
    pub fn csv_row(&self) -> String {
        // `+ 0.0` folds a negative zero into plain zero before rendering
        let f = |v: f64| format!("{:.1}", v + 0.0);
        format!(
            "{},{},{},{},{},{},{}",
            self.dataset,
            self.mode,
            f(self.d_precision),
            f(self.d_recall),
            f(self.d_accuracy),
            f(self.d_mcc),
            f(self.d_f1)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mcc_perfect_and_inverted() {
        assert_eq!(mcc(&ConfusionMatrix::new(50, 0, 0, 50)), 1.0);
        assert_eq!(mcc(&ConfusionMatrix::new(0, 50, 50, 0)), -1.0);
    }

    #[test]
    fn mcc_hand_example() {
        // tp=45, fn=5, fp=10, tn=40
        let got = mcc(&ConfusionMatrix::new(45, 5, 10, 40));
        let expected = (45.0 * 40.0 - 10.0 * 5.0) / (55.0f64 * 50.0 * 50.0 * 45.0).sqrt();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.7035).abs() < 5e-4);
    }

    #[test]
    fn mcc_zero_denominator_convention() {
        assert_eq!(mcc(&ConfusionMatrix::new(10, 0, 0, 0)), 0.0);
        assert_eq!(mcc(&ConfusionMatrix::default()), 0.0);
    }

    #[test]
    fn mcc_symmetry() {
        let a = ConfusionMatrix::new(12, 7, 3, 20);
        // swap tp<->tn and fp<->fn simultaneously
        let b = ConfusionMatrix::new(20, 3, 7, 12);
        assert!((mcc(&a) - mcc(&b)).abs() < 1e-12);
        // negating all predictions negates mcc: tp<->fn, tn<->fp
        let c = ConfusionMatrix::new(7, 12, 20, 3);
        assert!((mcc(&a) + mcc(&c)).abs() < 1e-12);
    }

    #[test]
    fn metrics_recompute_from_confusion() {
        let m = EvalMetrics::from_confusion(ConfusionMatrix::new(45, 5, 10, 40));
        assert!((m.precision - 45.0 / 55.0).abs() < 1e-12);
        assert!((m.recall - 45.0 / 50.0).abs() < 1e-12);
        assert!((m.accuracy - 85.0 / 100.0).abs() < 1e-12);
        let f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        assert!((m.f1 - f1).abs() < 1e-12);
        for v in [m.precision, m.recall, m.accuracy, m.f1] {
            assert!((0.0..=1.0).contains(&v));
        }
        assert!((-1.0..=1.0).contains(&m.mcc));
    }

    #[test]
    fn degenerate_metrics_use_zero_conventions() {
        let m = EvalMetrics::from_confusion(ConfusionMatrix::new(0, 5, 0, 5));
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.f1, 0.0);
    }

    #[test]
    fn delta_arithmetic_and_rendering() {
        let with = EvalMetrics {
            mcc: 0.60,
            ..EvalMetrics::from_confusion(ConfusionMatrix::new(50, 0, 0, 50))
        };
        let without = EvalMetrics {
            mcc: 0.03,
            ..with
        };
        let d = delta_report(&with, &without, "rh", "rh", "features").unwrap();
        assert!((d.d_mcc - 57.0).abs() < 1e-9);
        let row = d.csv_row();
        assert!(row.starts_with("rh,features,0.0,0.0,0.0,57.0,0.0"), "{row}");
    }

    #[test]
    fn identical_metrics_render_zero_deltas() {
        let m = EvalMetrics::from_confusion(ConfusionMatrix::new(30, 10, 5, 55));
        let d = delta_report(&m, &m, "cc", "cc", "embeddings").unwrap();
        assert_eq!(d.csv_row(), "cc,embeddings,0.0,0.0,0.0,0.0,0.0");
    }

    #[test]
    fn mismatched_tags_rejected() {
        let m = EvalMetrics::from_confusion(ConfusionMatrix::new(1, 1, 1, 1));
        assert!(matches!(
            delta_report(&m, &m, "a", "b", "features"),
            Err(Error::MismatchedTags { .. })
        ));
    }
}
