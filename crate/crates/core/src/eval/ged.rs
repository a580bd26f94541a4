use std::collections::{BTreeMap, BTreeSet};

use super::f_beta;
use crate::corpus::GedRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassScore {
    pub label: String,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ClassScore {
    /// 0 when the class was never predicted.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// 0 when the class never occurs in gold.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f05(&self) -> f64 {
        f_beta(self.precision(), self.recall(), 0.5)
    }
}

fn ratio(num: usize, denom: usize) -> f64 {
    if denom == 0 {
        0.0
    } else {
        num as f64 / denom as f64
    }
}

/// Token-level detection scores. Macro averages are unweighted means over
/// every label that occurs in gold or predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct GedScore {
    pub per_class: Vec<ClassScore>,
    pub correct: usize,
    pub total: usize,
}

impl GedScore {
    fn macro_avg(&self, f: impl Fn(&ClassScore) -> f64) -> f64 {
        if self.per_class.is_empty() {
            return 1.0;
        }
        self.per_class.iter().map(f).sum::<f64>() / self.per_class.len() as f64
    }

    pub fn macro_precision(&self) -> f64 {
        self.macro_avg(ClassScore::precision)
    }

    pub fn macro_recall(&self) -> f64 {
        self.macro_avg(ClassScore::recall)
    }

    pub fn macro_f05(&self) -> f64 {
        self.macro_avg(ClassScore::f05)
    }

    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    pub fn class(&self, label: &str) -> Option<&ClassScore> {
        self.per_class.iter().find(|c| c.label == label)
    }
}

/// One-vs-rest counts per label. Gold `UNK` is an ordinary class, so
/// failing to predict it counts against the system.
pub fn ged_score(gold: &[GedRecord], predicted: &[GedRecord]) -> Result<GedScore> {
    if gold.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "sentence count mismatch: {} gold vs {} predicted",
            gold.len(),
            predicted.len()
        )));
    }
    let mut tp: BTreeMap<&str, usize> = BTreeMap::new();
    let mut fp: BTreeMap<&str, usize> = BTreeMap::new();
    let mut fn_: BTreeMap<&str, usize> = BTreeMap::new();
    let mut labels: BTreeSet<&str> = BTreeSet::new();
    let (mut correct, mut total) = (0, 0);
    for (i, (g, p)) in gold.iter().zip(predicted).enumerate() {
        if g.len() != p.len() {
            return Err(Error::invalid(format!(
                "sentence {}: {} gold labels vs {} predicted",
                i + 1,
                g.len(),
                p.len()
            )));
        }
        for (gl, pl) in g.labels().iter().zip(p.labels()) {
            let (gl, pl) = (gl.as_str(), pl.as_str());
            labels.insert(gl);
            labels.insert(pl);
            total += 1;
            if gl == pl {
                correct += 1;
                *tp.entry(gl).or_default() += 1;
            } else {
                *fn_.entry(gl).or_default() += 1;
                *fp.entry(pl).or_default() += 1;
            }
        }
    }
    let per_class = labels
        .into_iter()
        .map(|l| ClassScore {
            label: l.to_string(),
            tp: tp.get(l).copied().unwrap_or(0),
            fp: fp.get(l).copied().unwrap_or(0),
            fn_: fn_.get(l).copied().unwrap_or(0),
        })
        .collect();
    Ok(GedScore {
        per_class,
        correct,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ErrorTag;

    fn rec(labels: &[&str]) -> GedRecord {
        GedRecord::new(
            (0..labels.len()).map(|i| format!("t{i}")).collect(),
            labels.iter().map(|l| ErrorTag::new(*l).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity() {
        let g = vec![rec(&["C", "O", "C"]), rec(&["P"])];
        let s = ged_score(&g, &g).unwrap();
        assert_eq!(
            (s.macro_precision(), s.macro_recall(), s.macro_f05(), s.accuracy()),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn all_correct_prediction() {
        let mut gold = vec!["C"; 9];
        gold.push("O");
        let s = ged_score(&[rec(&gold)], &[rec(&["C"; 10])]).unwrap();
        assert!((s.accuracy() - 0.9).abs() < 1e-12);
        let o = s.class("O").unwrap();
        assert_eq!((o.precision(), o.recall()), (0.0, 0.0));
    }

    #[test]
    fn binary_confusion_matrix() {
        // E: TP=8 FP=2 FN=2; C: TP=88 FP=2 FN=2.
        let mut gold = Vec::new();
        let mut pred = Vec::new();
        for (g, p, n) in [("E", "E", 8), ("C", "E", 2), ("E", "C", 2), ("C", "C", 88)] {
            gold.extend(std::iter::repeat_n(g, n));
            pred.extend(std::iter::repeat_n(p, n));
        }
        let s = ged_score(&[rec(&gold)], &[rec(&pred)]).unwrap();
        let e = s.class("E").unwrap();
        assert_eq!((e.tp, e.fp, e.fn_), (8, 2, 2));
        assert!((e.precision() - 0.8).abs() < 1e-12);
        assert!((e.recall() - 0.8).abs() < 1e-12);
        assert!((e.f05() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_names_sentence() {
        let err = ged_score(&[rec(&["C"]), rec(&["C"])], &[rec(&["C"]), rec(&["C", "C"])]).unwrap_err();
        assert!(err.to_string().contains("sentence 2"), "{err}");
    }
}
