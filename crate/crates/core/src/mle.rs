//! Bigram maximum-likelihood lookup corrector.
//!
//! Training counts how often each erroneous word (or merge phrase) was
//! corrected to each output given its error tag and the preceding source
//! word. Application picks the most frequent correction for the bigram
//! context, backs off to the word alone, and passes unseen words through.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::align::OpKind;
use crate::annotate::{project_ged_labels, AnnotatedPair, Granularity, LabelInventory, ERROR, MERGE_B, MERGE_I};
use crate::corpus::{GedRecord, Sentence};
use crate::error::{Error, Result};

/// Context symbol before the first word of a sentence.
pub const BOUNDARY: &str = "<s>";
/// Tag slot used when the model is trained without error tags.
pub const ANY_TAG: &str = "*";

const MAGIC: &str = "#argec-mle";
const VERSION: &str = "v1";

type Counts = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MleModel {
    tags: Option<Granularity>,
    bigram: BTreeMap<(String, String, String), Counts>,
    unigram: BTreeMap<(String, String), Counts>,
}

fn argmax(counts: &Counts) -> Option<(&str, u64)> {
    // BTreeMap iterates corrections in lexicographic order, so the first
    // maximum is the lexicographically smallest.
    let mut best: Option<(&str, u64)> = None;
    for (c, &n) in counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((c.as_str(), n));
        }
    }
    best
}

fn add_counts(into: &mut Counts, from: &Counts) {
    for (c, n) in from {
        *into.entry(c.clone()).or_default() += n;
    }
}

/// Where a lookup was answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Bigram,
    Unigram,
    PassThrough,
}

impl MleModel {
    /// Empty model. `tags` is the label granularity the model conditions
    /// on, or `None` to ignore error tags.
    pub fn new(tags: Option<Granularity>) -> Self {
        MleModel {
            tags,
            ..Default::default()
        }
    }

    pub fn tags(&self) -> Option<Granularity> {
        self.tags
    }

    pub fn is_empty(&self) -> bool {
        self.unigram.is_empty()
    }

    pub fn observe(&mut self, prev: &str, word: &str, tag: &str, correction: &str) {
        let tag = if self.tags.is_some() { tag } else { ANY_TAG };
        *self
            .bigram
            .entry((prev.to_string(), word.to_string(), tag.to_string()))
            .or_default()
            .entry(correction.to_string())
            .or_default() += 1;
        *self
            .unigram
            .entry((word.to_string(), tag.to_string()))
            .or_default()
            .entry(correction.to_string())
            .or_default() += 1;
    }

    /// Adds another model's counts. Both must condition on the same tags.
    pub fn merge(&mut self, other: &MleModel) -> Result<()> {
        if self.tags != other.tags {
            return Err(Error::invalid(
                "cannot merge models trained with different tag granularities",
            ));
        }
        for (k, v) in &other.bigram {
            add_counts(self.bigram.entry(k.clone()).or_default(), v);
        }
        for (k, v) in &other.unigram {
            add_counts(self.unigram.entry(k.clone()).or_default(), v);
        }
        Ok(())
    }

    /// Correction counts for a bigram context. A `None` tag sums over all
    /// tags observed for the context.
    pub fn bigram_counts(&self, prev: &str, word: &str, tag: Option<&str>) -> Option<Counts> {
        match self.effective_tag(tag) {
            Some(t) => self
                .bigram
                .get(&(prev.to_string(), word.to_string(), t.to_string()))
                .cloned(),
            None => {
                let lo = (prev.to_string(), word.to_string(), String::new());
                let mut sum = Counts::new();
                for ((p, w, _), counts) in self.bigram.range(lo..) {
                    if p != prev || w != word {
                        break;
                    }
                    add_counts(&mut sum, counts);
                }
                (!sum.is_empty()).then_some(sum)
            }
        }
    }

    pub fn unigram_counts(&self, word: &str, tag: Option<&str>) -> Option<Counts> {
        match self.effective_tag(tag) {
            Some(t) => self.unigram.get(&(word.to_string(), t.to_string())).cloned(),
            None => {
                let lo = (word.to_string(), String::new());
                let mut sum = Counts::new();
                for ((w, _), counts) in self.unigram.range(lo..) {
                    if w != word {
                        break;
                    }
                    add_counts(&mut sum, counts);
                }
                (!sum.is_empty()).then_some(sum)
            }
        }
    }

    fn effective_tag<'a>(&self, tag: Option<&'a str>) -> Option<&'a str> {
        if self.tags.is_none() {
            Some(ANY_TAG)
        } else {
            tag
        }
    }

    /// Estimated probability of `correction` in a bigram context.
    pub fn probability(&self, prev: &str, word: &str, tag: Option<&str>, correction: &str) -> f64 {
        self.bigram_counts(prev, word, tag).map_or(0.0, |counts| {
            let total: u64 = counts.values().sum();
            counts.get(correction).copied().unwrap_or(0) as f64 / total as f64
        })
    }

    /// Best correction for `word`: bigram context first, then the word
    /// alone. Ties go to the lexicographically smallest correction.
    pub fn lookup(&self, prev: &str, word: &str, tag: Option<&str>) -> (Option<String>, Source) {
        if let Some(counts) = self.bigram_counts(prev, word, tag) {
            return (argmax(&counts).map(|(c, _)| c.to_string()), Source::Bigram);
        }
        if let Some(counts) = self.unigram_counts(word, tag) {
            return (argmax(&counts).map(|(c, _)| c.to_string()), Source::Unigram);
        }
        (None, Source::PassThrough)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let tags = self.tags.map_or("none".to_string(), |g| g.to_string());
        writeln!(out, "{MAGIC}\t{VERSION}").unwrap();
        writeln!(out, "#tags\t{tags}").unwrap();
        for ((prev, word, tag), counts) in &self.bigram {
            for (c, n) in counts {
                writeln!(out, "B\t{prev}\t{word}\t{tag}\t{c}\t{n}").unwrap();
            }
        }
        for ((word, tag), counts) in &self.unigram {
            for (c, n) in counts {
                writeln!(out, "U\t{word}\t{tag}\t{c}\t{n}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str, context: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::format(context, Some(line), msg);
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l == format!("{MAGIC}\t{VERSION}") => {}
            _ => return Err(err(1, format!("missing {MAGIC} {VERSION} header"))),
        }
        let tags = match lines.next() {
            Some((_, l)) => match l.strip_prefix("#tags\t") {
                Some("none") => None,
                Some(g) => Some(g.parse::<Granularity>().map_err(|e| err(2, e.to_string()))?),
                None => return Err(err(2, "missing #tags line".into())),
            },
            None => return Err(err(2, "missing #tags line".into())),
        };
        let mut model = MleModel::new(tags);
        for (i, line) in lines {
            let lineno = i + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            let count = |s: &str| -> Result<u64> {
                match s.parse::<u64>() {
                    Ok(n) if n >= 1 => Ok(n),
                    _ => Err(err(lineno, format!("invalid count {s:?}"))),
                }
            };
            match fields.as_slice() {
                ["B", prev, word, tag, c, n] => {
                    let n = count(n)?;
                    *model
                        .bigram
                        .entry((prev.to_string(), word.to_string(), tag.to_string()))
                        .or_default()
                        .entry(c.to_string())
                        .or_default() += n;
                }
                ["U", word, tag, c, n] => {
                    let n = count(n)?;
                    *model
                        .unigram
                        .entry((word.to_string(), tag.to_string()))
                        .or_default()
                        .entry(c.to_string())
                        .or_default() += n;
                }
                _ => return Err(err(lineno, "malformed model line".into())),
            }
        }
        Ok(model)
    }
}

/// Counts every op with a source side, keeps included. Merges contribute
/// their space-joined source phrase as the word. Inserted words have no
/// source token of their own, so they are appended to the correction of the
/// preceding op (or prepended to the first one at sentence start). With a
/// tag granularity, each event is keyed by the detection label of its first
/// source token.
pub fn mle_train<'a>(
    corpus: impl IntoIterator<Item = &'a AnnotatedPair>,
    tags: Option<Granularity>,
    inventory: &LabelInventory,
) -> MleModel {
    let mut model = MleModel::new(tags);
    for ann in corpus {
        let labels = tags.map(|g| project_ged_labels(ann, g, inventory));
        let src = &ann.pair.source;
        let mut events: Vec<(&str, String, &str, Vec<String>)> = Vec::new();
        let mut leading: Vec<String> = Vec::new();
        for t in &ann.typed_edits {
            let op = &t.op;
            let target: Vec<String> = ann.pair.target.tokens()[op.target.clone()]
                .iter()
                .map(|tok| tok.text().to_string())
                .collect();
            if op.kind == OpKind::Insert {
                match events.last_mut() {
                    Some(e) => e.3.extend(target),
                    None => leading.extend(target),
                }
                continue;
            }
            let prev = if op.source.start == 0 {
                BOUNDARY
            } else {
                src.tokens()[op.source.start - 1].text()
            };
            let tag = labels
                .as_ref()
                .map_or(ANY_TAG, |l| l.labels()[op.source.start].as_str());
            let correction = std::mem::take(&mut leading).into_iter().chain(target).collect();
            events.push((prev, op.source_text(&ann.pair), tag, correction));
        }
        for (prev, word, tag, correction) in &events {
            model.observe(prev, word, tag, &correction.join(" "));
        }
    }
    model
}

/// Corrects `sentence` token by token, left to right.
///
/// Context is always the previous *source* token. When labels are given, a
/// `Merge-B Merge-I*` run (with binary labels, any run of `E`) is first
/// looked up as one phrase (longest prefix first, down to two tokens).
/// Corrections may expand to several words or to none.
pub fn mle_apply(model: &MleModel, sentence: &Sentence, labels: Option<&GedRecord>) -> Result<Sentence> {
    if let Some(l) = labels {
        if l.len() != sentence.len() {
            return Err(Error::invalid(format!(
                "sentence {}: {} tokens but {} labels",
                sentence.id(),
                sentence.len(),
                l.len()
            )));
        }
    }
    let words: Vec<&str> = sentence.words().collect();
    let label = |i: usize| labels.map(|l| l.labels()[i].as_str());
    let mut out: Vec<String> = Vec::with_capacity(words.len());
    let mut i = 0;
    while i < words.len() {
        let prev = if i == 0 { BOUNDARY } else { words[i - 1] };
        let mut consumed = 0;
        // Binary labels mark merge spans only as runs of errors.
        let continues = match label(i) {
            Some(MERGE_B) => Some(MERGE_I),
            Some(ERROR) if model.tags() == Some(Granularity::Binary) => Some(ERROR),
            _ => None,
        };
        if let Some(cont) = continues {
            let mut end = i + 1;
            while end < words.len() && label(end) == Some(cont) {
                end += 1;
            }
            for stop in (i + 2..=end).rev() {
                let phrase = words[i..stop].join(" ");
                if let (Some(c), _) = model.lookup(prev, &phrase, label(i)) {
                    out.extend(c.split_whitespace().map(str::to_string));
                    consumed = stop - i;
                    break;
                }
            }
        }
        if consumed == 0 {
            match model.lookup(prev, words[i], label(i)) {
                (Some(c), _) => out.extend(c.split_whitespace().map(str::to_string)),
                (None, _) => out.push(words[i].to_string()),
            }
            consumed = 1;
        }
        i += consumed;
    }
    Sentence::from_words(sentence.id(), out.iter().map(String::as_str))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{extract_edits, CostMatrix};
    use crate::annotate::{annotate_builtin, ingest_annotations};
    use crate::corpus::{ErrorTag, SentencePair};

    fn annotated(src: &str, tgt: &str) -> AnnotatedPair {
        let pair = SentencePair::from_text("1", src, tgt).unwrap();
        annotate_builtin(&pair, &extract_edits(&pair, &CostMatrix::arabic()))
    }

    #[test]
    fn single_edit_key() {
        let ann = annotated("قال انا", "قال أنا");
        let model = mle_train([&ann], Some(Granularity::Fine), &LabelInventory::all());
        let counts = model.bigram_counts("قال", "انا", Some("O")).unwrap();
        assert_eq!(counts.get("أنا"), Some(&1));
        assert_eq!(
            model.bigram_counts(BOUNDARY, "قال", Some("C")).unwrap().get("قال"),
            Some(&1)
        );
    }

    #[test]
    fn normalized_argmax() {
        let mut m = MleModel::new(None);
        for _ in 0..3 {
            m.observe("a", "w", "O", "x");
        }
        m.observe("a", "w", "O", "y");
        assert_eq!(m.probability("a", "w", None, "x"), 0.75);
        assert_eq!(m.lookup("a", "w", None), (Some("x".into()), Source::Bigram));
    }

    #[test]
    fn tie_breaks_lexicographically() {
        let mut m = MleModel::new(None);
        m.observe("a", "w", "*", "z");
        m.observe("a", "w", "*", "b");
        assert_eq!(m.lookup("a", "w", None).0.as_deref(), Some("b"));
    }

    #[test]
    fn bigram_wins_over_unigram() {
        // unigram argmax for "w" is "u" (2 vs 1) but context "p" saw only "b".
        let mut m = MleModel::new(None);
        m.observe("p", "w", "*", "b");
        m.observe("q", "w", "*", "u");
        m.observe("r", "w", "*", "u");
        assert_eq!(m.unigram_counts("w", None).unwrap().get("u"), Some(&2));
        assert_eq!(m.lookup("p", "w", None), (Some("b".into()), Source::Bigram));
        assert_eq!(m.lookup("z", "w", None), (Some("u".into()), Source::Unigram));
        assert_eq!(m.lookup("z", "unseen", None), (None, Source::PassThrough));
    }

    #[test]
    fn marginalizes_over_tags_without_labels() {
        let mut m = MleModel::new(Some(Granularity::Fine));
        m.observe("p", "w", "O", "x");
        m.observe("p", "w", "X", "y");
        m.observe("p", "w", "X", "y");
        assert_eq!(m.lookup("p", "w", None).0.as_deref(), Some("y"));
        assert_eq!(m.lookup("p", "w", Some("O")).0.as_deref(), Some("x"));
        assert_eq!(m.lookup("p", "w", Some("P")).0, None);
    }

    #[test]
    fn empty_sentence_and_empty_model() {
        let m = MleModel::new(None);
        let s = Sentence::from_text("1", "");
        assert!(mle_apply(&m, &s, None).unwrap().is_empty());
        let s = Sentence::from_text("1", "a b");
        assert_eq!(mle_apply(&m, &s, None).unwrap(), s);
    }

    #[test]
    fn merge_phrase_with_labels() {
        let ann = annotated("قال عبد الله", "قال عبدالله");
        let model = mle_train([&ann], Some(Granularity::Fine), &LabelInventory::all());
        let s = Sentence::from_text("1", "قال عبد الله");
        let labels = GedRecord::new(
            s.words().map(str::to_string).collect(),
            ["C", MERGE_B, MERGE_I]
                .iter()
                .map(|l| ErrorTag::new(*l).unwrap())
                .collect(),
        )
        .unwrap();
        assert_eq!(mle_apply(&model, &s, Some(&labels)).unwrap().to_string(), "قال عبدالله");
    }

    #[test]
    fn merge_phrase_from_binary_error_run() {
        let ann = annotated("قال عبد الله", "قال عبدالله");
        let model = mle_train([&ann], Some(Granularity::Binary), &LabelInventory::all());
        let s = Sentence::from_text("1", "قال عبد الله");
        let labels = project_ged_labels(&ann, Granularity::Binary, &LabelInventory::all());
        assert_eq!(labels.labels()[1].as_str(), ERROR);
        assert_eq!(mle_apply(&model, &s, Some(&labels)).unwrap().to_string(), "قال عبدالله");
    }

    #[test]
    fn insertions_attach_to_neighbouring_ops() {
        let ann = annotated("و قال انا", "و قال أنا .");
        let model = mle_train([&ann], None, &LabelInventory::all());
        assert_eq!(model.lookup("قال", "انا", None).0.as_deref(), Some("أنا ."));
        let lead = annotated("قال", "ثم قال");
        let model = mle_train([&lead], None, &LabelInventory::all());
        assert_eq!(model.lookup(BOUNDARY, "قال", None).0.as_deref(), Some("ثم قال"));
    }

    #[test]
    fn deletion_and_split_corrections() {
        let pair = SentencePair::from_text("1", "a xx bc", "a b c").unwrap();
        let a = extract_edits(&pair, &CostMatrix::unit());
        let tags: Vec<String> = a.edits().map(|_| "X".to_string()).collect();
        let ann = ingest_annotations(&pair, &a, &tags).unwrap();
        let model = mle_train([&ann], None, &LabelInventory::all());
        let out = mle_apply(&model, &pair.source, None).unwrap();
        assert_eq!(out, pair.target);
    }

    #[test]
    fn text_round_trip() {
        let ann = annotated("قال انا عبد الله", "قال أنا عبدالله");
        let model = mle_train([&ann], Some(Granularity::Coarse), &LabelInventory::all());
        let text = model.to_text();
        assert!(text.starts_with("#argec-mle\tv1\n#tags\t13\n"));
        assert_eq!(MleModel::from_text(&text, "m").unwrap(), model);
        assert!(MleModel::from_text("garbage", "m").is_err());
        assert!(MleModel::from_text("#argec-mle\tv1\n#tags\tnone\nB\ta\tb\n", "m").is_err());
    }
}
