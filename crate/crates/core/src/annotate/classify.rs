use std::collections::BTreeSet;

use super::taxonomy::{normalize_component, CORRECT, DELETE, INSERT, MERGE, SPLIT, UNK};
use super::{with_structural, AnnotatedPair, TypedEdit};
use crate::align::{Alignment, EditOp, OpKind, ARABIC_CONFUSIONS, ARABIC_DIACRITICS};
use crate::corpus::SentencePair;
use crate::error::{Error, Result};

const EXTRA_PUNCTUATION: &[char] = &[
    '\u{060C}', // ،
    '\u{061B}', // ؛
    '\u{061F}', // ؟
    '\u{066A}', '\u{066B}', '\u{066C}', '\u{066D}', '\u{06D4}', '«', '»', '\u{2018}', '\u{2019}', '\u{201C}',
    '\u{201D}', '\u{2013}', '\u{2014}', '\u{2026}', '\u{00A1}', '\u{00BF}',
];

pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || EXTRA_PUNCTUATION.contains(&c)
}

fn punctuation_only(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_punctuation)
}

/// Same core once edge punctuation is stripped from both sides.
fn edge_punctuation_change(a: &str, b: &str) -> bool {
    let core_a = a.trim_matches(is_punctuation);
    let core_b = b.trim_matches(is_punctuation);
    !core_a.is_empty() && core_a == core_b && a != b
}

/// Equal length after dropping diacritics, and every differing position is
/// a known orthographic confusion pair.
fn orthographic_only(a: &str, b: &str) -> bool {
    let strip = |s: &str| -> Vec<char> { s.chars().filter(|c| !ARABIC_DIACRITICS.contains(c)).collect() };
    let (a, b) = (strip(a), strip(b));
    a.len() == b.len()
        && a.iter()
            .zip(&b)
            .all(|(&x, &y)| x == y || ARABIC_CONFUSIONS.contains(&(x, y)) || ARABIC_CONFUSIONS.contains(&(y, x)))
}

/// Rule-based tags for one op: orthographic confusions, punctuation and the
/// structural kinds. Anything else is UNK.
pub fn classify_builtin(op: &EditOp, pair: &SentencePair) -> BTreeSet<String> {
    let set = |tags: &[&str]| tags.iter().map(|t| t.to_string()).collect();
    match op.kind {
        OpKind::Keep => set(&[CORRECT]),
        OpKind::Merge => set(&[MERGE]),
        OpKind::Split => set(&[SPLIT]),
        OpKind::Delete if punctuation_only(&op.source_text(pair)) => set(&[DELETE, "P"]),
        OpKind::Delete => set(&[DELETE]),
        OpKind::Insert if punctuation_only(&op.target_text(pair)) => set(&[INSERT, "P"]),
        OpKind::Insert => set(&[INSERT]),
        OpKind::Replace => {
            let src = op.source_text(pair);
            let tgt = op.target_text(pair);
            if (punctuation_only(&src) && punctuation_only(&tgt)) || edge_punctuation_change(&src, &tgt) {
                set(&["P"])
            } else if orthographic_only(&src, &tgt) {
                set(&["O"])
            } else {
                set(&[UNK])
            }
        }
    }
}

pub fn annotate_builtin(pair: &SentencePair, alignment: &Alignment) -> AnnotatedPair {
    let typed_edits = alignment
        .ops()
        .iter()
        .map(|op| TypedEdit {
            op: op.clone(),
            tags: classify_builtin(op, pair),
        })
        .collect();
    AnnotatedPair {
        pair: pair.clone(),
        typed_edits,
    }
}

/// Splits a whitespace-separated line of `+`-joined tag combinations.
pub fn parse_tag_line(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_string).collect()
}

/// Attaches externally produced tags (one `+`-joined combination per
/// non-keep op, in order) to an alignment. Structural components implied by
/// the op kind are added; unknown component strings are kept verbatim.
pub fn ingest_annotations(pair: &SentencePair, alignment: &Alignment, external: &[String]) -> Result<AnnotatedPair> {
    let expected = alignment.edits().count();
    if external.len() != expected {
        return Err(Error::invalid(format!(
            "sentence {}: expected {expected} tags for non-keep ops, got {}",
            pair.source.id(),
            external.len()
        )));
    }
    let mut tags = external.iter();
    let typed_edits = alignment
        .ops()
        .iter()
        .map(|op| {
            if op.is_keep() {
                return TypedEdit::new(op.clone(), [CORRECT]);
            }
            let components: Vec<String> = tags
                .next()
                .expect("length checked")
                .split('+')
                .map(normalize_component)
                .collect();
            TypedEdit::new(op.clone(), with_structural(op.kind, &components))
        })
        .collect();
    Ok(AnnotatedPair {
        pair: pair.clone(),
        typed_edits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{extract_edits, CostMatrix};

    fn tags_of(src: &str, tgt: &str) -> Vec<BTreeSet<String>> {
        let pair = SentencePair::from_text("1", src, tgt).unwrap();
        let a = extract_edits(&pair, &CostMatrix::arabic());
        a.edits().map(|op| classify_builtin(op, &pair)).collect()
    }

    fn set(tags: &[&str]) -> BTreeSet<String> {
        tags.iter().map(|t| t.to_string()).collect()
    }

    /// Positions where two strings differ, compared char by char.
    fn char_diff(a: &str, b: &str) -> Vec<(char, char)> {
        a.chars().zip(b.chars()).filter(|(x, y)| x != y).collect()
    }

    #[test]
    fn alif_hamza_is_orthographic() {
        let diff = char_diff("انا", "أنا");
        assert_eq!(diff, vec![('ا', 'أ')]);
        assert!(ARABIC_CONFUSIONS.contains(&('أ', 'ا')));
        assert_eq!(tags_of("انا", "أنا"), vec![set(&["O"])]);
        assert_eq!(tags_of("مدرسه", "مدرسة"), vec![set(&["O"])]);
        assert_eq!(tags_of("كتب", "كَتَبَ"), vec![set(&["O"])]);
    }

    #[test]
    fn morphology_is_unknown() {
        assert_eq!(tags_of("ذهب", "ذهبوا"), vec![set(&[UNK])]);
    }

    #[test]
    fn punctuation_rules() {
        assert_eq!(tags_of("كتاب", "كتاب،"), vec![set(&["P"])]);
        assert_eq!(tags_of("a ,", "a ."), vec![set(&["P"])]);
        assert_eq!(tags_of("a b", "a b ."), vec![set(&[INSERT, "P"])]);
    }

    #[test]
    fn structural_kinds() {
        assert_eq!(tags_of("عبد الله", "عبدالله"), vec![set(&[MERGE])]);
        assert_eq!(tags_of("ab", "a b"), vec![set(&[SPLIT])]);
        assert_eq!(tags_of("a xyz b", "a b"), vec![set(&[DELETE])]);
        let pair = SentencePair::from_text("1", "a", "a").unwrap();
        let a = extract_edits(&pair, &CostMatrix::unit());
        assert_eq!(classify_builtin(&a.ops()[0], &pair), set(&[CORRECT]));
    }

    #[test]
    fn ingest_merges_structural_tags() {
        let pair = SentencePair::from_text("1", "انا ذهبت", "أنا ذهبت").unwrap();
        let a = extract_edits(&pair, &CostMatrix::arabic());
        let ann = ingest_annotations(&pair, &a, &["O".into()]).unwrap();
        assert_eq!(ann.typed_edits[0].tags, set(&["O"]));
        assert_eq!(ann.typed_edits[1].tags, set(&[CORRECT]));

        let ann = ingest_annotations(&pair, &a, &["O+X".into()]).unwrap();
        assert_eq!(ann.typed_edits[0].tags, set(&["O", "X"]));

        let ann = ingest_annotations(&pair, &a, &["OH+Zzz".into()]).unwrap();
        assert_eq!(ann.unrecognized_count(), 1);
        assert!(ann.typed_edits[0].tags.contains("Zzz"));
    }

    #[test]
    fn ingest_length_mismatch() {
        let pair = SentencePair::from_text("1", "a b c", "x y z").unwrap();
        let a = extract_edits(&pair, &CostMatrix::unit());
        assert_eq!(a.edits().count(), 3);
        let err = ingest_annotations(&pair, &a, &["O".into(), "X".into()]).unwrap_err();
        assert!(err.to_string().contains("expected 3"), "{err}");
    }

    #[test]
    fn ingest_normalizes_areta_merge_code() {
        let pair = SentencePair::from_text("1", "عبد الله", "عبدالله").unwrap();
        let a = extract_edits(&pair, &CostMatrix::arabic());
        let ann = ingest_annotations(&pair, &a, &["MG".into()]).unwrap();
        assert_eq!(ann.typed_edits[0].tags, set(&[MERGE]));
    }
}
