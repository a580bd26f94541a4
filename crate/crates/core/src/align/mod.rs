//! Token alignment of erroneous/corrected sentence pairs.
//!
//! Extraction runs in two stages. [`align_basic`] finds a globally minimal
//! one-token-at-most alignment (keep, replace, insert, delete) where each
//! token pair is priced by the weighted character distance of
//! [`token_distance`]. [`refine_merge_split`] then repeatedly fuses adjacent
//! operations into many-to-one merges or one-to-many splits whenever the
//! concatenated strings are cheaper to align than the separate pieces.

mod basic;
mod costs;
mod eval;
mod refine;

use std::fmt;
use std::ops::Range;

pub use basic::align_basic;
pub use costs::{
    token_distance, CostMatrix, ARABIC_CONFUSIONS, ARABIC_DIACRITICS, DEFAULT_CONFUSION_COST, DEFAULT_DIACRITIC_COST,
    DEFAULT_TOKEN_CONSTANT,
};
pub use eval::{alignment_eval, alignment_links, parse_links, AlignmentScore, Link};
pub use refine::refine_merge_split;

use crate::corpus::{M2Edit, SentencePair};
use crate::error::{Error, Result};

/// Float slack for comparing accumulated costs.
pub(crate) const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Keep,
    Replace,
    Insert,
    Delete,
    Merge,
    Split,
}

impl OpKind {
    pub fn letter(self) -> char {
        match self {
            OpKind::Keep => 'K',
            OpKind::Replace => 'R',
            OpKind::Insert => 'I',
            OpKind::Delete => 'D',
            OpKind::Merge => 'M',
            OpKind::Split => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            'K' => OpKind::Keep,
            'R' => OpKind::Replace,
            'I' => OpKind::Insert,
            'D' => OpKind::Delete,
            'M' => OpKind::Merge,
            'S' => OpKind::Split,
            _ => return None,
        })
    }

    /// Kind implied by span lengths; `texts_equal` decides keep vs replace.
    pub fn from_shape(source_len: usize, target_len: usize, texts_equal: bool) -> Option<Self> {
        Some(match (source_len, target_len) {
            (0, 1) => OpKind::Insert,
            (1, 0) => OpKind::Delete,
            (1, 1) if texts_equal => OpKind::Keep,
            (1, 1) => OpKind::Replace,
            (s, 1) if s >= 2 => OpKind::Merge,
            (1, t) if t >= 2 => OpKind::Split,
            _ => return None,
        })
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One operation linking a source token span to a target token span.
#[derive(Debug, Clone, PartialEq)]
pub struct EditOp {
    pub kind: OpKind,
    pub source: Range<usize>,
    pub target: Range<usize>,
    pub cost: f64,
}

impl EditOp {
    pub fn new(kind: OpKind, source: Range<usize>, target: Range<usize>, cost: f64) -> Self {
        EditOp {
            kind,
            source,
            target,
            cost,
        }
    }

    pub fn is_keep(&self) -> bool {
        self.kind == OpKind::Keep
    }

    pub fn source_text(&self, pair: &SentencePair) -> String {
        pair.source.join(self.source.clone())
    }

    pub fn target_text(&self, pair: &SentencePair) -> String {
        pair.target.join(self.target.clone())
    }
}

/// Ordered operations whose spans partition both sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    ops: Vec<EditOp>,
    total_cost: f64,
}

impl Alignment {
    pub fn new(ops: Vec<EditOp>) -> Self {
        let total_cost = ops.iter().map(|o| o.cost).sum();
        Alignment { ops, total_cost }
    }

    pub fn ops(&self) -> &[EditOp] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<EditOp> {
        self.ops
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    pub fn edits(&self) -> impl Iterator<Item = &EditOp> {
        self.ops.iter().filter(|o| !o.is_keep())
    }

    /// Checks span contiguity and the per-kind shape invariants.
    pub fn validate(&self, pair: &SentencePair) -> Result<()> {
        let (mut s, mut t) = (0, 0);
        for op in &self.ops {
            if op.source.start != s || op.target.start != t {
                return Err(Error::invalid(format!(
                    "op {} at {:?}/{:?} breaks partition (expected {s}/{t})",
                    op.kind, op.source, op.target
                )));
            }
            let equal = op.source.len() == 1
                && op.target.len() == 1
                && pair.source.tokens()[op.source.start].text() == pair.target.tokens()[op.target.start].text();
            let expected = OpKind::from_shape(op.source.len(), op.target.len(), equal);
            if expected != Some(op.kind) {
                return Err(Error::invalid(format!(
                    "op {} has shape {}x{}",
                    op.kind,
                    op.source.len(),
                    op.target.len()
                )));
            }
            if op.kind == OpKind::Keep && op.cost != 0.0 {
                return Err(Error::invalid("keep op with non-zero cost"));
            }
            if op.cost < 0.0 {
                return Err(Error::invalid("negative op cost"));
            }
            s = op.source.end;
            t = op.target.end;
        }
        if s != pair.source.len() || t != pair.target.len() {
            return Err(Error::invalid("alignment does not cover both sentences"));
        }
        Ok(())
    }

    /// Non-keep operations as M² edits typed by their op letter.
    pub fn to_m2_edits(&self, pair: &SentencePair) -> Vec<M2Edit> {
        self.edits()
            .map(|op| M2Edit {
                start: op.source.start,
                end: op.source.end,
                error_type: op.kind.letter().to_string(),
                correction: op.target_text(pair),
            })
            .collect()
    }
}

/// Basic alignment followed by merge/split refinement.
pub fn extract_edits(pair: &SentencePair, costs: &CostMatrix) -> Alignment {
    let basic = align_basic(pair, costs);
    refine_merge_split(pair, &basic, costs)
}

fn fmt_span(r: &Range<usize>) -> String {
    format!("{}-{}", r.start, r.end)
}

/// One op per line (`kind, source span, target span, cost, source text,
/// target text`, tab-separated, half-open spans), blank line after each
/// sentence.
pub fn write_alignment(pair: &SentencePair, alignment: &Alignment) -> String {
    let mut out = String::new();
    for op in alignment.ops() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.4}\t{}\t{}\n",
            op.kind,
            fmt_span(&op.source),
            fmt_span(&op.target),
            op.cost,
            op.source_text(pair),
            op.target_text(pair)
        ));
    }
    out.push('\n');
    out
}
