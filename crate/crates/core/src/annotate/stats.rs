use std::collections::BTreeMap;

use super::taxonomy::{Granularity, LabelInventory, ERROR};
use super::AnnotatedPair;
use crate::align::OpKind;

/// Counts of tag combinations on replacement and split edits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagFrequencies {
    pub counts: BTreeMap<String, usize>,
}

impl TagFrequencies {
    /// Combinations seen more than `threshold` times.
    pub fn modeled(&self, threshold: usize) -> LabelInventory {
        LabelInventory::from_labels(
            self.counts
                .iter()
                .filter(|(_, &n)| n > threshold)
                .map(|(label, _)| label.clone()),
        )
    }

    /// Sorted by descending count, then label.
    pub fn ranked(&self) -> Vec<(&str, usize)> {
        let mut rows: Vec<(&str, usize)> = self.counts.iter().map(|(l, &n)| (l.as_str(), n)).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        rows
    }

    pub fn merge(&mut self, other: &TagFrequencies) {
        for (label, n) in &other.counts {
            *self.counts.entry(label.clone()).or_default() += n;
        }
    }
}

pub fn count_tag_frequencies<'a>(corpus: impl IntoIterator<Item = &'a AnnotatedPair>) -> TagFrequencies {
    let mut freq = TagFrequencies::default();
    for ann in corpus {
        for t in ann.edits() {
            if matches!(t.op.kind, OpKind::Replace | OpKind::Split) {
                *freq.counts.entry(t.label()).or_default() += 1;
            }
        }
    }
    freq
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRow {
    pub label: String,
    pub count: usize,
    pub percent: f64,
}

/// Per-class edit counts at one granularity.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub granularity: Granularity,
    pub total: usize,
    pub rows: Vec<DistributionRow>,
}

impl Distribution {
    pub fn share(&self, label: &str) -> f64 {
        self.rows.iter().find(|r| r.label == label).map_or(0.0, |r| r.percent)
    }

    /// `label<TAB>count<TAB>percent` rows with a header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("label\tcount\tpercent\n");
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{:.2}\n", r.label, r.count, r.percent));
        }
        out
    }
}

/// Share of each edit class over all non-keep edits, insertions included.
/// At 43 classes an edit's label is its full tag combination; coarser
/// granularities reduce it with the usual projection.
pub fn error_distribution<'a>(
    corpus: impl IntoIterator<Item = &'a AnnotatedPair>,
    granularity: Granularity,
) -> Distribution {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0;
    for ann in corpus {
        for t in ann.edits() {
            let label = match granularity {
                Granularity::Fine => t.label(),
                Granularity::Coarse => super::to_coarse(&t.label()),
                Granularity::Binary => ERROR.to_string(),
            };
            *counts.entry(label).or_default() += 1;
            total += 1;
        }
    }
    let mut rows: Vec<DistributionRow> = counts
        .into_iter()
        .map(|(label, count)| DistributionRow {
            label,
            count,
            percent: 100.0 * count as f64 / total as f64,
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then(a.label.cmp(&b.label)));
    Distribution {
        granularity,
        total,
        rows,
    }
}
