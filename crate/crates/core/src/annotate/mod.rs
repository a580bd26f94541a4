//! Error-type annotation of extracted edits and their projection to
//! per-token detection labels.

mod classify;
mod ged;
mod stats;
mod taxonomy;

use std::collections::BTreeSet;

pub use classify::{annotate_builtin, classify_builtin, ingest_annotations, is_punctuation, parse_tag_line};
pub use ged::{project_ged_labels, resolve_detections, Resolved};
pub use stats::{count_tag_frequencies, error_distribution, Distribution, DistributionRow, TagFrequencies};
pub use taxonomy::{
    class_of, combination_label, is_recognized, normalize_component, to_binary, to_coarse, Granularity, LabelInventory,
    TagClass, ARETA_TAGS, COARSE_LABELS, CORRECT, DELETE, ERROR, INSERT, MERGE, MERGE_B, MERGE_I, SPLIT,
    STRUCTURAL_LABELS, UNK,
};

use crate::align::{extract_edits, Alignment, CostMatrix, EditOp, OpKind};
use crate::corpus::{Annotation, M2Edit, M2Record, Sentence, SentencePair};
use crate::error::{Error, Result};

/// An edit operation with its set of error-tag components.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedEdit {
    pub op: EditOp,
    pub tags: BTreeSet<String>,
}

impl TypedEdit {
    pub fn new<I, S>(op: EditOp, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        TypedEdit {
            op,
            tags: tags.into_iter().map(|t| normalize_component(t.as_ref())).collect(),
        }
    }

    /// Canonical `+`-joined label of the tag set.
    pub fn label(&self) -> String {
        combination_label(&self.tags)
    }

    /// Components outside the known taxonomy, kept verbatim.
    pub fn unrecognized_tags(&self) -> Vec<&str> {
        self.tags
            .iter()
            .map(String::as_str)
            .filter(|t| !is_recognized(t))
            .collect()
    }
}

/// A sentence pair whose alignment ops all carry error tags.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedPair {
    pub pair: SentencePair,
    pub typed_edits: Vec<TypedEdit>,
}

impl AnnotatedPair {
    pub fn alignment(&self) -> Alignment {
        Alignment::new(self.typed_edits.iter().map(|t| t.op.clone()).collect())
    }

    /// Non-keep edits.
    pub fn edits(&self) -> impl Iterator<Item = &TypedEdit> {
        self.typed_edits.iter().filter(|t| !t.op.is_keep())
    }

    pub fn unrecognized_count(&self) -> usize {
        self.typed_edits.iter().map(|t| t.unrecognized_tags().len()).sum()
    }

    /// Non-keep edits as one annotator's M² edit list.
    pub fn to_annotation(&self, annotator: u32) -> Annotation {
        let edits = self
            .edits()
            .map(|t| M2Edit {
                start: t.op.source.start,
                end: t.op.source.end,
                error_type: t.label(),
                correction: t.op.target_text(&self.pair),
            })
            .collect();
        Annotation { annotator, edits }
    }

    pub fn to_m2_record(&self, annotator: u32) -> M2Record {
        M2Record {
            source_tokens: self.pair.source.words().map(str::to_string).collect(),
            annotations: vec![self.to_annotation(annotator)],
        }
    }

    /// Rebuilds an annotated pair from one annotator of an M² record.
    ///
    /// The target sentence is the source with the edits applied. Each edit
    /// becomes the op its shape implies; shapes with no single op (e.g.
    /// two tokens to two tokens) are re-aligned with [`extract_edits`] and
    /// every resulting non-keep op inherits the edit's tags. A record with no
    /// annotators is read as fully correct.
    pub fn from_m2(record: &M2Record, annotator: Option<u32>, id: &str, costs: &CostMatrix) -> Result<Self> {
        let annotation = match annotator {
            Some(a) => Some(
                record
                    .annotation(a)
                    .ok_or_else(|| Error::invalid(format!("sentence {id}: no annotator {a}")))?,
            ),
            None => record.annotations.first(),
        };
        let edits: &[M2Edit] = annotation.map(|a| a.edits.as_slice()).unwrap_or(&[]);
        let src: Vec<&str> = record.source_tokens.iter().map(String::as_str).collect();

        let mut tgt: Vec<String> = Vec::new();
        let mut typed = Vec::new();
        let mut pos = 0;
        let push_keeps = |upto: usize, pos: &mut usize, tgt: &mut Vec<String>, typed: &mut Vec<TypedEdit>| {
            while *pos < upto {
                let t = tgt.len();
                typed.push(TypedEdit::new(
                    EditOp::new(OpKind::Keep, *pos..*pos + 1, t..t + 1, 0.0),
                    [CORRECT],
                ));
                tgt.push(src[*pos].to_string());
                *pos += 1;
            }
        };
        for e in edits {
            push_keeps(e.start, &mut pos, &mut tgt, &mut typed);
            let corr: Vec<&str> = e.correction.split_whitespace().collect();
            let tags: Vec<String> = e.error_type.split('+').map(normalize_component).collect();
            let t0 = tgt.len();
            for (op, keep) in span_ops(&src[e.start..e.end], &corr, costs) {
                let op = EditOp::new(
                    op.kind,
                    op.source.start + e.start..op.source.end + e.start,
                    op.target.start + t0..op.target.end + t0,
                    op.cost,
                );
                let tags = if keep {
                    vec![CORRECT.to_string()]
                } else {
                    with_structural(op.kind, &tags)
                };
                typed.push(TypedEdit::new(op, tags));
            }
            tgt.extend(corr.iter().map(|w| w.to_string()));
            pos = e.end;
        }
        push_keeps(src.len(), &mut pos, &mut tgt, &mut typed);

        let source = Sentence::from_words(id, src.iter().copied())?;
        let target = Sentence::from_words(id, tgt.iter().map(String::as_str))?;
        let pair = SentencePair::new(source, target)?;
        Ok(AnnotatedPair {
            pair,
            typed_edits: typed,
        })
    }
}

/// Ops covering one M² edit, with local spans. The flag marks keeps.
fn span_ops(src: &[&str], tgt: &[&str], costs: &CostMatrix) -> Vec<(EditOp, bool)> {
    let text_equal = src.len() == 1 && tgt.len() == 1 && src[0] == tgt[0];
    let cost = |kind: OpKind| match kind {
        OpKind::Insert => costs.token_indel(tgt[0]),
        OpKind::Delete => costs.token_indel(src[0]),
        _ => costs.distance(&src.concat(), &tgt.concat()),
    };
    if let Some(kind) = OpKind::from_shape(src.len(), tgt.len(), text_equal) {
        let op = EditOp::new(
            kind,
            0..src.len(),
            0..tgt.len(),
            if text_equal { 0.0 } else { cost(kind) },
        );
        return vec![(op, kind == OpKind::Keep)];
    }
    if src.is_empty() {
        return tgt
            .iter()
            .enumerate()
            .map(|(j, w)| (EditOp::new(OpKind::Insert, 0..0, j..j + 1, costs.token_indel(w)), false))
            .collect();
    }
    if tgt.is_empty() {
        return src
            .iter()
            .enumerate()
            .map(|(i, w)| (EditOp::new(OpKind::Delete, i..i + 1, 0..0, costs.token_indel(w)), false))
            .collect();
    }
    let pair = SentencePair::new(
        Sentence::from_words("", src.iter().copied()).expect("M² tokens"),
        Sentence::from_words("", tgt.iter().copied()).expect("M² tokens"),
    )
    .expect("both sides non-empty");
    extract_edits(&pair, costs)
        .into_ops()
        .into_iter()
        .map(|op| {
            let keep = op.is_keep();
            (op, keep)
        })
        .collect()
}

/// Adds the structural component implied by the op kind.
pub(crate) fn with_structural(kind: OpKind, tags: &[String]) -> Vec<String> {
    let mut out: Vec<String> = tags
        .iter()
        .filter(|t| !t.is_empty() && t.as_str() != CORRECT)
        .cloned()
        .collect();
    let structural = match kind {
        OpKind::Merge => Some(MERGE),
        OpKind::Split => Some(SPLIT),
        OpKind::Delete => Some(DELETE),
        OpKind::Insert => Some(INSERT),
        OpKind::Keep => return vec![CORRECT.to_string()],
        OpKind::Replace => None,
    };
    if let Some(s) = structural {
        out.push(s.to_string());
    }
    if out.is_empty() {
        out.push(UNK.to_string());
    }
    out
}
