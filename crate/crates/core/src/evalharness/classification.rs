use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::average_ranks;

/// Default decision threshold on the fake probability.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    pub fn is_fake(self) -> bool {
        self == Label::Fake
    }

    /// Parses `0`/`1` or `real`/`fake` (case-insensitive).
    pub fn parse(s: &str) -> Option<Label> {
        match s.trim().to_ascii_lowercase().as_str() {
            "0" | "real" => Some(Label::Real),
            "1" | "fake" => Some(Label::Fake),
            _ => None,
        }
    }
}

/// One detector output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub item_id: String,
    pub label: Label,
    /// Detector's probability that the item is fake, in `[0,1]`.
    pub score: f64,
}

impl DetectionRecord {
    pub fn new(item_id: impl Into<String>, label: Label, score: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::param(format!("score {score} outside [0,1]")));
        }
        Ok(DetectionRecord {
            item_id: item_id.into(),
            label,
            score,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionMatrix {
    /// Counts predictions where `score >= threshold` means fake.
    pub fn at_threshold(records: &[DetectionRecord], threshold: f64) -> Self {
        let mut m = ConfusionMatrix::default();
        for r in records {
            match (r.label.is_fake(), r.score >= threshold) {
                (true, true) => m.tp += 1,
                (true, false) => m.fn_ += 1,
                (false, true) => m.fp += 1,
                (false, false) => m.tn += 1,
            }
        }
        m
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// Zero when nothing is predicted fake.
    pub fn precision(&self) -> f64 {
        let d = self.tp + self.fp;
        if d == 0 {
            0.0
        } else {
            self.tp as f64 / d as f64
        }
    }

    /// Zero when there are no fake items.
    pub fn recall(&self) -> f64 {
        let d = self.tp + self.fn_;
        if d == 0 {
            0.0
        } else {
            self.tp as f64 / d as f64
        }
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub acc: f64,
    pub auc: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub threshold: f64,
    pub n_pos: u64,
    pub n_neg: u64,
    pub confusion: ConfusionMatrix,
}

/// ROC AUC via the Mann–Whitney rank statistic; tied scores earn half credit.
pub fn roc_auc(records: &[DetectionRecord]) -> Result<f64> {
    let n_pos = records.iter().filter(|r| r.label.is_fake()).count();
    let n_neg = records.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Undefined(
            "AUC needs at least one real and one fake item".into(),
        ));
    }
    let scores: Vec<f64> = records.iter().map(|r| r.score).collect();
    let ranks = average_ranks(&scores);
    let rank_sum: f64 = records
        .iter()
        .zip(&ranks)
        .filter(|(r, _)| r.label.is_fake())
        .map(|(_, &rk)| rk)
        .sum();
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Accuracy, AUC, precision, recall and F1, predicting fake iff `score >= threshold`.
pub fn classification_metrics(records: &[DetectionRecord], threshold: f64) -> Result<ClassificationReport> {
    let auc = roc_auc(records)?;
    let cm = ConfusionMatrix::at_threshold(records, threshold);
    Ok(ClassificationReport {
        acc: cm.accuracy(),
        auc,
        precision: cm.precision(),
        recall: cm.recall(),
        f1: cm.f1(),
        threshold,
        n_pos: cm.tp + cm.fn_,
        n_neg: cm.tn + cm.fp,
        confusion: cm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(v: &[(u8, f64)]) -> Vec<DetectionRecord> {
        v.iter()
            .enumerate()
            .map(|(i, &(l, s))| {
                DetectionRecord::new(format!("r{i}"), if l == 1 { Label::Fake } else { Label::Real }, s).unwrap()
            })
            .collect()
    }

    #[test]
    fn separated_scores() {
        let r = recs(&[(0, 0.1), (0, 0.2), (1, 0.8), (1, 0.9)]);
        let rep = classification_metrics(&r, 0.5).unwrap();
        assert_eq!((rep.acc, rep.auc, rep.f1), (1.0, 1.0, 1.0));
        assert_eq!((rep.n_pos, rep.n_neg), (2, 2));
    }

    #[test]
    fn all_ties_give_half() {
        let r = recs(&[(0, 0.3), (1, 0.3), (1, 0.3), (0, 0.3), (0, 0.3)]);
        assert_eq!(roc_auc(&r).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_undefined() {
        let r = recs(&[(1, 0.3), (1, 0.6)]);
        assert!(matches!(classification_metrics(&r, 0.5), Err(Error::Undefined(_))));
    }

    #[test]
    fn six_record_hand_count() {
        // pos: .9 .6 .4 ; neg: .7 .3 .1
        // pairs won: .9 beats 3, .6 beats 2, .4 beats 2 -> 7/9
        let r = recs(&[(1, 0.9), (0, 0.7), (1, 0.6), (1, 0.4), (0, 0.3), (0, 0.1)]);
        let rep = classification_metrics(&r, 0.5).unwrap();
        assert!((rep.auc - 7.0 / 9.0).abs() < 1e-15);
        assert_eq!(rep.confusion, ConfusionMatrix { tp: 2, fp: 1, tn: 2, fn_: 1 });
        assert!((rep.acc - 4.0 / 6.0).abs() < 1e-15);
        assert!((rep.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((rep.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((rep.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_is_inclusive() {
        let r = recs(&[(1, 0.5), (0, 0.49)]);
        let rep = classification_metrics(&r, 0.5).unwrap();
        assert_eq!(rep.confusion.tp, 1);
    }

    #[test]
    fn no_predicted_positives() {
        let r = recs(&[(1, 0.1), (0, 0.2)]);
        let rep = classification_metrics(&r, 0.9).unwrap();
        assert_eq!((rep.precision, rep.recall, rep.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn label_parsing() {
        assert_eq!(Label::parse("1"), Some(Label::Fake));
        assert_eq!(Label::parse(" Real "), Some(Label::Real));
        assert_eq!(Label::parse("2"), None);
        assert!(DetectionRecord::new("a", Label::Real, 1.2).is_err());
    }
}
