use std::collections::BTreeSet;
use std::ops::AddAssign;

use super::{Alignment, OpKind};
use crate::error::{Error, Result};

/// A (source index, target index) alignment link.
pub type Link = (usize, usize);

/// Links implied by an alignment: the cross product of source and target
/// spans for keep, replace, merge and split; none for insert and delete.
pub fn alignment_links(alignment: &Alignment) -> BTreeSet<Link> {
    let mut links = BTreeSet::new();
    for op in alignment.ops() {
        if matches!(op.kind, OpKind::Insert | OpKind::Delete) {
            continue;
        }
        for s in op.source.clone() {
            for t in op.target.clone() {
                links.insert((s, t));
            }
        }
    }
    links
}

/// Parses `i-j` links separated by whitespace.
pub fn parse_links(line: &str) -> Result<BTreeSet<Link>> {
    line.split_whitespace()
        .map(|item| {
            let (s, t) = item
                .split_once('-')
                .ok_or_else(|| Error::invalid(format!("malformed link {item:?}")))?;
            let s = s
                .parse()
                .map_err(|_| Error::invalid(format!("malformed link {item:?}")))?;
            let t = t
                .parse()
                .map_err(|_| Error::invalid(format!("malformed link {item:?}")))?;
            Ok((s, t))
        })
        .collect()
}

/// Link counts; sums over sentences give corpus-level scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AlignmentScore {
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl AlignmentScore {
    /// 1 when nothing was predicted.
    pub fn precision(&self) -> f64 {
        if self.predicted == 0 {
            1.0
        } else {
            self.matched as f64 / self.predicted as f64
        }
    }

    /// 1 when there are no gold links.
    pub fn recall(&self) -> f64 {
        if self.gold == 0 {
            1.0
        } else {
            self.matched as f64 / self.gold as f64
        }
    }

    pub fn aer(&self) -> f64 {
        let denom = self.predicted + self.gold;
        if denom == 0 {
            0.0
        } else {
            1.0 - 2.0 * self.matched as f64 / denom as f64
        }
    }
}

impl AddAssign for AlignmentScore {
    fn add_assign(&mut self, rhs: Self) {
        self.matched += rhs.matched;
        self.predicted += rhs.predicted;
        self.gold += rhs.gold;
    }
}

pub fn alignment_eval(predicted: &Alignment, gold: &BTreeSet<Link>) -> AlignmentScore {
    let pred = alignment_links(predicted);
    AlignmentScore {
        matched: pred.intersection(gold).count(),
        predicted: pred.len(),
        gold: gold.len(),
    }
}
