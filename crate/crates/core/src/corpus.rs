//! Tokens, sentences and the three on-disk corpus formats: parallel text,
//! M² annotation files and two-column GED label files.

use std::fmt;
use std::fs;
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// A whitespace-free, NFC-normalized word with its position in the sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    text: String,
    index: usize,
}

impl Token {
    pub fn new(text: &str, index: usize) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::invalid("token text is empty"));
        }
        if text.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!("token {text:?} contains whitespace")));
        }
        Ok(Token {
            text: text.nfc().collect(),
            index,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    id: String,
    tokens: Vec<Token>,
}

impl Sentence {
    /// Splits `line` on whitespace. Never fails: whitespace splitting cannot
    /// produce empty or whitespace-bearing tokens.
    pub fn from_text(id: impl Into<String>, line: &str) -> Self {
        Self::from_words(id, line.split_whitespace()).expect("whitespace-split words are valid tokens")
    }

    pub fn from_words<'a, I>(id: impl Into<String>, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let tokens = words
            .into_iter()
            .enumerate()
            .map(|(i, w)| Token::new(w, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Sentence { id: id.into(), tokens })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(Token::text)
    }

    /// Space-joined token texts of `range`.
    pub fn join(&self, range: std::ops::Range<usize>) -> String {
        join_words(self.tokens[range].iter().map(Token::text))
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_words(self.words()))
    }
}

pub(crate) fn join_words<'a>(words: impl Iterator<Item = &'a str>) -> String {
    let mut out = String::new();
    for (i, w) in words.enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

/// An erroneous sentence and its correction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub source: Sentence,
    pub target: Sentence,
}

impl SentencePair {
    /// Rejects pairs where exactly one side is empty.
    pub fn new(source: Sentence, target: Sentence) -> Result<Self> {
        if source.is_empty() != target.is_empty() {
            return Err(Error::invalid(format!(
                "sentence pair {}: one side is empty",
                source.id()
            )));
        }
        Ok(SentencePair { source, target })
    }

    pub fn from_text(id: &str, source: &str, target: &str) -> Result<Self> {
        Self::new(Sentence::from_text(id, source), Sentence::from_text(id, target))
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn strip_cr(line: &str) -> &str {
    line.strip_suffix('\r').unwrap_or(line)
}

/// Reads one sentence per line. Empty lines are rejected.
pub fn read_sentences(path: &Path) -> Result<Vec<Sentence>> {
    let text = read_to_string(path)?;
    parse_sentences(&text, &path.display().to_string())
}

pub fn parse_sentences(text: &str, context: &str) -> Result<Vec<Sentence>> {
    text.lines()
        .map(strip_cr)
        .enumerate()
        .map(|(i, line)| {
            if line.trim().is_empty() {
                Err(Error::format(context, Some(i + 1), "empty line"))
            } else {
                Ok(Sentence::from_text((i + 1).to_string(), line))
            }
        })
        .collect()
}

pub fn read_parallel(source_path: &Path, target_path: &Path) -> Result<Vec<SentencePair>> {
    let src = read_to_string(source_path)?;
    let tgt = read_to_string(target_path)?;
    parse_parallel(&src, &tgt)
}

pub fn parse_parallel(source: &str, target: &str) -> Result<Vec<SentencePair>> {
    let src_lines: Vec<&str> = source.lines().map(strip_cr).collect();
    let tgt_lines: Vec<&str> = target.lines().map(strip_cr).collect();
    if src_lines.len() != tgt_lines.len() {
        return Err(Error::format(
            "",
            None,
            format!("line count mismatch {} vs {}", src_lines.len(), tgt_lines.len()),
        ));
    }
    src_lines
        .iter()
        .zip(&tgt_lines)
        .enumerate()
        .map(|(i, (s, t))| {
            let lineno = i + 1;
            if s.trim().is_empty() {
                return Err(Error::format("source", Some(lineno), "empty line"));
            }
            if t.trim().is_empty() {
                return Err(Error::format("target", Some(lineno), "empty line"));
            }
            let id = lineno.to_string();
            SentencePair::new(Sentence::from_text(id.clone(), s), Sentence::from_text(id, t))
        })
        .collect()
}

pub fn write_sentences<'a>(sentences: impl IntoIterator<Item = &'a Sentence>) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

/// One span edit of an M² annotation. `start == end` is an insertion
/// before `start`; an empty `correction` with `end > start` is a deletion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2Edit {
    pub start: usize,
    pub end: usize,
    pub error_type: String,
    pub correction: String,
}

impl M2Edit {
    pub fn new(start: usize, end: usize, error_type: impl Into<String>, correction: impl Into<String>) -> Result<Self> {
        if end < start {
            return Err(Error::invalid(format!("end < start ({end} < {start})")));
        }
        let correction = correction.into();
        if start == end && correction.is_empty() {
            return Err(Error::invalid(format!("empty insertion at {start}")));
        }
        Ok(M2Edit {
            start,
            end,
            error_type: error_type.into(),
            correction,
        })
    }

    pub fn is_deletion(&self) -> bool {
        self.correction.is_empty() && self.end > self.start
    }

    pub fn is_insertion(&self) -> bool {
        self.start == self.end
    }

    /// Alternative corrections separated by `||`.
    pub fn alternatives(&self) -> Vec<&str> {
        self.correction.split("||").map(str::trim).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub annotator: u32,
    pub edits: Vec<M2Edit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2Record {
    pub source_tokens: Vec<String>,
    pub annotations: Vec<Annotation>,
}

impl M2Record {
    pub fn new(source_tokens: Vec<String>, annotations: Vec<Annotation>) -> Result<Self> {
        let record = M2Record {
            source_tokens,
            annotations,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.source_tokens.len();
        let mut seen = Vec::new();
        for ann in &self.annotations {
            if seen.contains(&ann.annotator) {
                return Err(Error::invalid(format!("duplicate annotator {}", ann.annotator)));
            }
            seen.push(ann.annotator);
            let mut prev: Option<&M2Edit> = None;
            for e in &ann.edits {
                if e.end > n {
                    return Err(Error::invalid(format!(
                        "edit {}-{} exceeds sentence length {n}",
                        e.start, e.end
                    )));
                }
                if let Some(p) = prev {
                    if e.start < p.start || e.start < p.end {
                        return Err(Error::invalid(format!(
                            "annotator {}: edit {}-{} overlaps or precedes {}-{}",
                            ann.annotator, e.start, e.end, p.start, p.end
                        )));
                    }
                }
                prev = Some(e);
            }
        }
        Ok(())
    }

    pub fn source(&self) -> Sentence {
        Sentence::from_words("", self.source_tokens.iter().map(String::as_str))
            .expect("M² source tokens come from whitespace splitting")
    }

    pub fn annotation(&self, annotator: u32) -> Option<&Annotation> {
        self.annotations.iter().find(|a| a.annotator == annotator)
    }
}

const NOOP_TYPE: &str = "noop";
const NONE_FIELD: &str = "-NONE-";

pub fn read_m2(path: &Path) -> Result<Vec<M2Record>> {
    let text = read_to_string(path)?;
    parse_m2(&text, &path.display().to_string())
}

pub fn parse_m2(text: &str, context: &str) -> Result<Vec<M2Record>> {
    let mut records: Vec<M2Record> = Vec::new();
    let mut current: Option<M2Record> = None;
    let mut current_line = 0;

    let finish = |rec: M2Record, line: usize, records: &mut Vec<M2Record>| -> Result<()> {
        rec.validate()
            .map_err(|e| Error::format(context, Some(line), e.to_string()))?;
        records.push(rec);
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_cr(raw);
        if line.trim().is_empty() {
            if let Some(rec) = current.take() {
                finish(rec, current_line, &mut records)?;
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("S ").or(if line == "S" { Some("") } else { None }) {
            if let Some(rec) = current.take() {
                finish(rec, current_line, &mut records)?;
            }
            let tokens = rest.split_whitespace().map(|w| w.nfc().collect::<String>()).collect();
            current = Some(M2Record {
                source_tokens: tokens,
                annotations: Vec::new(),
            });
            current_line = lineno;
        } else if let Some(rest) = line.strip_prefix("A ") {
            let rec = current
                .as_mut()
                .ok_or_else(|| Error::format(context, Some(lineno), "A-line before any S-line"))?;
            parse_a_line(rest, rec, context, lineno)?;
        } else {
            return Err(Error::format(
                context,
                Some(lineno),
                format!("unrecognized line {:?}", truncate(line, 40)),
            ));
        }
    }
    if let Some(rec) = current.take() {
        finish(rec, current_line, &mut records)?;
    }
    Ok(records)
}

fn truncate(s: &str, n: usize) -> String {
    s.chars().take(n).collect()
}

fn parse_a_line(rest: &str, rec: &mut M2Record, context: &str, lineno: usize) -> Result<()> {
    let err = |msg: String| Error::format(context, Some(lineno), msg);
    let fields: Vec<&str> = rest.split("|||").collect();
    if fields.len() != 6 {
        return Err(err(format!("expected 6 |||-separated fields, found {}", fields.len())));
    }
    let mut offsets = fields[0].split_whitespace();
    let (Some(s), Some(e), None) = (offsets.next(), offsets.next(), offsets.next()) else {
        return Err(err(format!("malformed offsets {:?}", fields[0])));
    };
    let annotator: u32 = fields[5]
        .trim()
        .parse()
        .map_err(|_| err(format!("non-integer annotator id {:?}", fields[5])))?;
    let error_type = fields[1];

    let idx = match rec.annotations.iter().position(|a| a.annotator == annotator) {
        Some(idx) => idx,
        None => {
            rec.annotations.push(Annotation {
                annotator,
                edits: Vec::new(),
            });
            rec.annotations.len() - 1
        }
    };
    if error_type == NOOP_TYPE {
        return Ok(());
    }

    let parse_offset =
        |v: &str| -> Result<usize> { v.parse::<usize>().map_err(|_| err(format!("non-integer offset {v:?}"))) };
    let start = parse_offset(s)?;
    let end = parse_offset(e)?;
    if end < start {
        return Err(err("end < start".to_string()));
    }
    if end > rec.source_tokens.len() {
        return Err(err(format!(
            "offset {end} beyond sentence length {}",
            rec.source_tokens.len()
        )));
    }
    let correction = if fields[2] == NONE_FIELD {
        String::new()
    } else {
        fields[2].nfc().collect()
    };
    if start == end && correction.is_empty() {
        return Err(err("empty insertion".to_string()));
    }
    rec.annotations[idx].edits.push(M2Edit {
        start,
        end,
        error_type: error_type.to_string(),
        correction,
    });
    Ok(())
}

pub fn write_m2(records: &[M2Record]) -> String {
    let mut out = String::new();
    for rec in records {
        out.push('S');
        for tok in &rec.source_tokens {
            out.push(' ');
            out.push_str(tok);
        }
        out.push('\n');
        for ann in &rec.annotations {
            if ann.edits.is_empty() {
                out.push_str(&format!(
                    "A -1 -1|||{NOOP_TYPE}|||{NONE_FIELD}|||REQUIRED|||{NONE_FIELD}|||{}\n",
                    ann.annotator
                ));
            }
            for e in &ann.edits {
                out.push_str(&format!(
                    "A {} {}|||{}|||{}|||REQUIRED|||{NONE_FIELD}|||{}\n",
                    e.start, e.end, e.error_type, e.correction, ann.annotator
                ));
            }
        }
        out.push('\n');
    }
    out
}

/// Error-type label attached to one token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorTag(String);

impl ErrorTag {
    pub fn new(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!("invalid label {label:?}")));
        }
        Ok(ErrorTag(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_correct(&self) -> bool {
        self.0 == crate::annotate::CORRECT
    }
}

impl fmt::Display for ErrorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per-token labels of one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GedRecord {
    tokens: Vec<String>,
    labels: Vec<ErrorTag>,
}

impl GedRecord {
    pub fn new(tokens: Vec<String>, labels: Vec<ErrorTag>) -> Result<Self> {
        if tokens.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} tokens but {} labels",
                tokens.len(),
                labels.len()
            )));
        }
        Ok(GedRecord { tokens, labels })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn labels(&self) -> &[ErrorTag] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn map_labels(&self, f: impl Fn(&ErrorTag) -> ErrorTag) -> GedRecord {
        GedRecord {
            tokens: self.tokens.clone(),
            labels: self.labels.iter().map(f).collect(),
        }
    }
}

pub fn read_ged(path: &Path) -> Result<Vec<GedRecord>> {
    let text = read_to_string(path)?;
    parse_ged(&text, &path.display().to_string())
}

/// Each blank line terminates one record.
pub fn parse_ged(text: &str, context: &str) -> Result<Vec<GedRecord>> {
    let mut records = Vec::new();
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    let mut pending = false;
    for (i, raw) in text.lines().enumerate() {
        let line = strip_cr(raw);
        if line.is_empty() {
            records.push(GedRecord {
                tokens: std::mem::take(&mut tokens),
                labels: std::mem::take(&mut labels),
            });
            pending = false;
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(tok), Some(label), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::format(context, Some(i + 1), "expected token<TAB>label"));
        };
        if tok.is_empty() || tok.chars().any(char::is_whitespace) {
            return Err(Error::format(context, Some(i + 1), format!("invalid token {tok:?}")));
        }
        let label = ErrorTag::new(label).map_err(|e| Error::format(context, Some(i + 1), e.to_string()))?;
        tokens.push(tok.nfc().collect());
        labels.push(label);
        pending = true;
    }
    if pending {
        records.push(GedRecord { tokens, labels });
    }
    Ok(records)
}

pub fn write_ged(records: &[GedRecord]) -> String {
    let mut out = String::new();
    for rec in records {
        for (tok, label) in rec.tokens.iter().zip(&rec.labels) {
            out.push_str(tok);
            out.push('\t');
            out.push_str(label.as_str());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "S a b c\nA 1 2|||O|||x|||REQUIRED|||-NONE-|||0\n\n";

    #[test]
    fn parallel_basic_and_mismatch() {
        let pairs = parse_parallel("a b\n", "a b\n").unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].source.len(), 2);
        assert_eq!(pairs[0].target.len(), 2);
        assert_eq!(pairs[0].source.id(), "1");

        let err = parse_parallel("a\nb\nc\n", "a\nb\nc\nd\n").unwrap_err();
        assert!(err.to_string().contains("line count mismatch 3 vs 4"), "{err}");
    }

    #[test]
    fn parallel_crlf_matches_lf() {
        let lf = parse_parallel("a b\nc\n", "a b\nd\n").unwrap();
        let crlf = parse_parallel("a b\r\nc\r\n", "a b\r\nd\r\n").unwrap();
        assert_eq!(lf, crlf);
    }

    #[test]
    fn parallel_empty_line_reports_line_number() {
        let err = parse_parallel("a\n\n", "a\nb\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn tokens_are_nfc() {
        // alef + combining hamza above composes to U+0623
        let t = Token::new("\u{0627}\u{0654}", 0).unwrap();
        assert_eq!(t.text(), "\u{0623}");
        assert!(Token::new("a b", 0).is_err());
        assert!(Token::new("", 0).is_err());
    }

    #[test]
    fn m2_fixture() {
        let recs = parse_m2(FIXTURE, "t").unwrap();
        assert_eq!(recs.len(), 1);
        let ann = &recs[0].annotations[0];
        assert_eq!(ann.annotator, 0);
        assert_eq!(ann.edits, vec![M2Edit::new(1, 2, "O", "x").unwrap()]);
        assert_eq!(write_m2(&recs), FIXTURE);
    }

    #[test]
    fn m2_no_annotations_and_noop() {
        let recs = parse_m2("S a b\n\n", "t").unwrap();
        assert!(recs[0].annotations.is_empty());
        assert_eq!(write_m2(&recs), "S a b\n\n");

        let noop = "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||3\n\n";
        let recs = parse_m2(noop, "t").unwrap();
        assert_eq!(recs[0].annotations[0].annotator, 3);
        assert!(recs[0].annotations[0].edits.is_empty());
        assert_eq!(write_m2(&recs), noop);
    }

    #[test]
    fn m2_errors_carry_line_numbers() {
        let err = parse_m2("S a b\nA 2 1|||O|||x|||REQUIRED|||-NONE-|||0\n", "t").unwrap_err();
        assert_eq!(err.to_string(), "t: end < start at line 2");
        let err = parse_m2("A 0 1|||O|||x|||REQUIRED|||-NONE-|||0\n", "t").unwrap_err();
        assert!(err.to_string().contains("before any S-line at line 1"), "{err}");
        let err = parse_m2("S a\nA x 1|||O|||x|||REQUIRED|||-NONE-|||0\n", "t").unwrap_err();
        assert!(err.to_string().contains("non-integer offset"), "{err}");
    }

    #[test]
    fn m2_rejects_overlap() {
        let text = "S a b c\nA 0 2|||O|||x|||REQUIRED|||-NONE-|||0\nA 1 3|||O|||y|||REQUIRED|||-NONE-|||0\n\n";
        assert!(parse_m2(text, "t").is_err());
    }

    #[test]
    fn m2_none_correction_is_deletion() {
        let recs = parse_m2("S a b\nA 0 1|||D|||-NONE-|||REQUIRED|||-NONE-|||0\n\n", "t").unwrap();
        assert!(recs[0].annotations[0].edits[0].is_deletion());
    }

    #[test]
    fn m2_record_count_equals_s_lines() {
        let text = "S a\n\nS b c\nA 0 1|||P|||d|||REQUIRED|||-NONE-|||0\n\nS e\n\n";
        assert_eq!(parse_m2(text, "t").unwrap().len(), 3);
        assert_eq!(write_m2(&[]), "");
    }

    #[test]
    fn ged_format() {
        let rec = GedRecord::new(
            vec!["a".into(), "b".into()],
            vec![ErrorTag::new("C").unwrap(), ErrorTag::new("O").unwrap()],
        )
        .unwrap();
        let text = write_ged(std::slice::from_ref(&rec));
        assert_eq!(text, "a\tC\nb\tO\n\n");
        assert_eq!(parse_ged(&text, "t").unwrap(), vec![rec]);
        assert!(GedRecord::new(vec!["a".into()], vec![]).is_err());
    }
}
