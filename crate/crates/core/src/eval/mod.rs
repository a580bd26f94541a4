//! GEC scoring (M² with a per-sentence time limit), GED scoring, and report
//! rendering.

mod ged;
pub mod m2;
pub mod report;

pub use ged::{ged_score, ClassScore, GedScore};
pub use m2::{m2_score, M2Options, M2Report};

/// Edit counts with precision, recall and F-scores.
///
/// Precision is 1 when nothing was proposed and recall is 1 when there is
/// nothing to find, so an empty system on an empty gold scores F = 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GecScore {
    pub correct: usize,
    pub proposed: usize,
    pub gold: usize,
}

impl GecScore {
    pub fn precision(&self) -> f64 {
        if self.proposed == 0 {
            1.0
        } else {
            self.correct as f64 / self.proposed as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.gold == 0 {
            1.0
        } else {
            self.correct as f64 / self.gold as f64
        }
    }

    pub fn f_beta(&self, beta: f64) -> f64 {
        f_beta(self.precision(), self.recall(), beta)
    }

    pub fn f1(&self) -> f64 {
        self.f_beta(1.0)
    }

    pub fn f05(&self) -> f64 {
        self.f_beta(0.5)
    }
}

/// `(1 + β²)PR / (β²P + R)`, 0 when the denominator is 0.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}
