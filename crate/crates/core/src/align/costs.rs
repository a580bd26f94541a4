//! Character-level cost table and weighted Levenshtein distance between tokens.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Tanween, short vowels, shadda, sukun and superscript alef.
pub const ARABIC_DIACRITICS: &[char] = &[
    '\u{064B}', '\u{064C}', '\u{064D}', '\u{064E}', '\u{064F}', '\u{0650}', '\u{0651}', '\u{0652}', '\u{0670}',
];

/// Letter pairs commonly confused in written Arabic: hamzated Alif forms
/// against bare Alif, Ya against Alif Maqsura, Ta Marbuta against Ha.
pub const ARABIC_CONFUSIONS: &[(char, char)] = &[
    ('\u{0623}', '\u{0627}'), // أ ا
    ('\u{0625}', '\u{0627}'), // إ ا
    ('\u{0622}', '\u{0627}'), // آ ا
    ('\u{0623}', '\u{0625}'), // أ إ
    ('\u{064A}', '\u{0649}'), // ي ى
    ('\u{0629}', '\u{0647}'), // ة ه
];

pub const DEFAULT_CONFUSION_COST: f64 = 0.25;
pub const DEFAULT_DIACRITIC_COST: f64 = 0.25;
pub const DEFAULT_TOKEN_CONSTANT: f64 = 0.1;

/// Substitution and insertion/deletion costs over characters, plus the
/// constant added to whole-token insertions and deletions.
///
/// Substitution costs are symmetric and zero on the diagonal by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    substitution: f64,
    indel: f64,
    token_constant: f64,
    pairs: HashMap<(char, char), f64>,
    indels: HashMap<char, f64>,
}

fn ordered(a: char, b: char) -> (char, char) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_cost(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what} must be a finite non-negative number, got {v}"
        )))
    }
}

impl CostMatrix {
    /// Unit substitution and indel costs with no special pairs.
    pub fn unit() -> Self {
        CostMatrix {
            substitution: 1.0,
            indel: 1.0,
            token_constant: DEFAULT_TOKEN_CONSTANT,
            pairs: HashMap::new(),
            indels: HashMap::new(),
        }
    }

    /// Unit costs with cheap orthographic confusions and diacritic edits.
    pub fn arabic() -> Self {
        let mut costs = Self::unit();
        for &(a, b) in ARABIC_CONFUSIONS {
            costs.pairs.insert(ordered(a, b), DEFAULT_CONFUSION_COST);
        }
        for &d in ARABIC_DIACRITICS {
            costs.indels.insert(d, DEFAULT_DIACRITIC_COST);
        }
        costs
    }

    pub fn with_substitution(mut self, cost: f64) -> Result<Self> {
        check_cost("substitution cost", cost)?;
        self.substitution = cost;
        Ok(self)
    }

    pub fn with_indel(mut self, cost: f64) -> Result<Self> {
        check_cost("indel cost", cost)?;
        self.indel = cost;
        Ok(self)
    }

    pub fn with_token_constant(mut self, cost: f64) -> Result<Self> {
        check_cost("token constant", cost)?;
        self.token_constant = cost;
        Ok(self)
    }

    pub fn with_pair(mut self, a: char, b: char, cost: f64) -> Result<Self> {
        check_cost("pair cost", cost)?;
        if a != b {
            self.pairs.insert(ordered(a, b), cost);
        }
        Ok(self)
    }

    pub fn with_char_indel(mut self, c: char, cost: f64) -> Result<Self> {
        check_cost("character indel cost", cost)?;
        self.indels.insert(c, cost);
        Ok(self)
    }

    /// Sets every confusion pair already in the table to `cost`.
    pub fn with_confusion_cost(mut self, cost: f64) -> Result<Self> {
        check_cost("confusion cost", cost)?;
        for v in self.pairs.values_mut() {
            *v = cost;
        }
        Ok(self)
    }

    /// Sets every character-specific indel override to `cost`.
    pub fn with_diacritic_cost(mut self, cost: f64) -> Result<Self> {
        check_cost("diacritic cost", cost)?;
        for v in self.indels.values_mut() {
            *v = cost;
        }
        Ok(self)
    }

    pub fn token_constant(&self) -> f64 {
        self.token_constant
    }

    pub fn sub(&self, a: char, b: char) -> f64 {
        if a == b {
            return 0.0;
        }
        self.pairs.get(&ordered(a, b)).copied().unwrap_or(self.substitution)
    }

    pub fn indel(&self, c: char) -> f64 {
        self.indels.get(&c).copied().unwrap_or(self.indel)
    }

    /// True when `a` and `b` form a reduced-cost confusion pair.
    pub fn is_confusion(&self, a: char, b: char) -> bool {
        a != b && self.pairs.contains_key(&ordered(a, b))
    }

    /// True when inserting or deleting `c` has a character-specific cost.
    pub fn has_indel_override(&self, c: char) -> bool {
        self.indels.contains_key(&c)
    }

    /// Cost of inserting or deleting the whole token `text`.
    pub fn token_indel(&self, text: &str) -> f64 {
        let chars: f64 = text.chars().map(|c| self.indel(c)).sum();
        let chars = if text.is_empty() { self.indel } else { chars };
        chars + self.token_constant
    }

    /// Weighted Levenshtein distance between two strings.
    pub fn distance(&self, a: &str, b: &str) -> f64 {
        token_distance(a, b, self)
    }
}

impl Default for CostMatrix {
    fn default() -> Self {
        Self::arabic()
    }
}

/// Minimal-cost character edit script between `a` and `b` under `costs`.
pub fn token_distance(a: &str, b: &str, costs: &CostMatrix) -> f64 {
    if a == b {
        return 0.0;
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();

    let mut prev: Vec<f64> = Vec::with_capacity(b.len() + 1);
    prev.push(0.0);
    for &cb in &b {
        let last = *prev.last().unwrap();
        prev.push(last + costs.indel(cb));
    }
    let mut cur = vec![0.0; b.len() + 1];
    for &ca in &a {
        cur[0] = prev[0] + costs.indel(ca);
        for (j, &cb) in b.iter().enumerate() {
            let diag = prev[j] + costs.sub(ca, cb);
            let del = prev[j + 1] + costs.indel(ca);
            let ins = cur[j] + costs.indel(cb);
            cur[j + 1] = diag.min(del).min(ins);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
