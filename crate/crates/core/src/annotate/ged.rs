use super::taxonomy::{Granularity, LabelInventory, CORRECT, DELETE, MERGE_B, MERGE_I, UNK};
use super::AnnotatedPair;
use crate::align::OpKind;
use crate::corpus::{ErrorTag, GedRecord, Sentence};
use crate::error::{Error, Result};

/// One label per source token.
///
/// Keeps are `C`; a merge labels its first source token `Merge-B` and the
/// rest `Merge-I`; deletions are `Delete`; replacements and splits repeat
/// their tag combination over the source span. Insertions cover no source
/// token and produce no label. Combinations missing from `inventory` become
/// `UNK` before projecting to the requested granularity.
pub fn project_ged_labels(ann: &AnnotatedPair, granularity: Granularity, inventory: &LabelInventory) -> GedRecord {
    let mut labels = Vec::with_capacity(ann.pair.source.len());
    for t in &ann.typed_edits {
        let op = &t.op;
        match op.kind {
            OpKind::Insert => {}
            OpKind::Keep => labels.push(CORRECT.to_string()),
            OpKind::Delete => labels.extend(op.source.clone().map(|_| DELETE.to_string())),
            OpKind::Merge => {
                labels.push(MERGE_B.to_string());
                labels.extend((1..op.source.len()).map(|_| MERGE_I.to_string()));
            }
            OpKind::Replace | OpKind::Split => {
                let combo = t.label();
                let fine = if inventory.is_modeled(&combo) && combo != CORRECT {
                    combo
                } else {
                    UNK.to_string()
                };
                labels.extend(op.source.clone().map(|_| fine.clone()));
            }
        }
    }
    let tokens = ann.pair.source.words().map(str::to_string).collect();
    let labels = labels
        .iter()
        .map(|l| ErrorTag::new(granularity.project(l)).expect("projected labels are non-empty"))
        .collect();
    GedRecord::new(tokens, labels).expect("ops partition the source sentence")
}

/// Source sentence after applying detected merges and deletions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    pub sentence: Sentence,
    /// `Merge-I` labels with no open merge, passed through unchanged.
    pub orphan_merge_inside: usize,
}

/// Drops tokens labeled `Delete` and concatenates each `Merge-B Merge-I*`
/// run into one token.
pub fn resolve_detections(source: &Sentence, labels: &GedRecord) -> Result<Resolved> {
    if labels.len() != source.len() {
        return Err(Error::invalid(format!(
            "sentence {}: {} tokens but {} labels",
            source.id(),
            source.len(),
            labels.len()
        )));
    }
    let mut out: Vec<String> = Vec::with_capacity(source.len());
    let mut orphans = 0;
    let mut in_merge = false;
    for (tok, label) in source.words().zip(labels.labels()) {
        match label.as_str() {
            DELETE => {
                in_merge = false;
            }
            MERGE_B => {
                out.push(tok.to_string());
                in_merge = true;
            }
            MERGE_I if in_merge => {
                out.last_mut().expect("merge run is open").push_str(tok);
            }
            MERGE_I => {
                orphans += 1;
                out.push(tok.to_string());
            }
            _ => {
                out.push(tok.to_string());
                in_merge = false;
            }
        }
    }
    let sentence = Sentence::from_words(source.id(), out.iter().map(String::as_str))?;
    Ok(Resolved {
        sentence,
        orphan_merge_inside: orphans,
    })
}
