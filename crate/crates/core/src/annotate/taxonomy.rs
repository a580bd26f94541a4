//! Error-tag vocabulary and the 43 → 13 → 2 class projections.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const CORRECT: &str = "C";
pub const ERROR: &str = "E";
pub const UNK: &str = "UNK";
pub const MERGE: &str = "Merge";
pub const SPLIT: &str = "Split";
pub const DELETE: &str = "Delete";
pub const INSERT: &str = "Insert";
pub const MERGE_B: &str = "Merge-B";
pub const MERGE_I: &str = "Merge-I";

/// Labels that are always part of the fine-grained inventory regardless of
/// corpus frequency.
pub const STRUCTURAL_LABELS: &[&str] = &[CORRECT, MERGE_B, MERGE_I, DELETE, UNK];

/// The 13-class inventory.
pub const COARSE_LABELS: &[&str] = &[
    DELETE, MERGE_B, MERGE_I, "M", "M+O", "O", "O+X", "P", "S", "X", SPLIT, UNK, CORRECT,
];

/// Fine-grained component tags of the ARETA inventory (merge and split codes
/// are normalized to [`MERGE`] and [`SPLIT`]).
pub const ARETA_TAGS: &[&str] = &[
    "OA", "OC", "OD", "OG", "OH", "OM", "OR", "OT", "OW", "ON", "MI", "MT", "XC", "XF", "XG", "XM", "XN", "XT", "SF",
    "SW", "PC", "PM", "PT",
];

/// Main error class of a tag component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TagClass {
    Orthography,
    Morphology,
    Syntax,
    Semantics,
    Punctuation,
    Merge,
    Split,
    Delete,
    Insert,
    Unknown,
    Correct,
}

impl TagClass {
    fn main_letter(self) -> Option<&'static str> {
        Some(match self {
            TagClass::Orthography => "O",
            TagClass::Morphology => "M",
            TagClass::Syntax => "X",
            TagClass::Semantics => "S",
            TagClass::Punctuation => "P",
            _ => return None,
        })
    }
}

/// Maps external aliases onto canonical component names.
pub fn normalize_component(tag: &str) -> String {
    match tag {
        "MG" => MERGE.to_string(),
        "SP" => SPLIT.to_string(),
        other => other.to_string(),
    }
}

/// Class of a single component, or `None` for strings outside the taxonomy.
pub fn class_of(component: &str) -> Option<TagClass> {
    Some(match component {
        CORRECT => TagClass::Correct,
        UNK => TagClass::Unknown,
        MERGE | "MG" => TagClass::Merge,
        SPLIT | "SP" => TagClass::Split,
        DELETE => TagClass::Delete,
        INSERT => TagClass::Insert,
        "O" => TagClass::Orthography,
        "M" => TagClass::Morphology,
        "X" => TagClass::Syntax,
        "S" => TagClass::Semantics,
        "P" => TagClass::Punctuation,
        t if ARETA_TAGS.contains(&t) => match &t[..1] {
            "O" => TagClass::Orthography,
            "M" => TagClass::Morphology,
            "X" => TagClass::Syntax,
            "S" => TagClass::Semantics,
            _ => TagClass::Punctuation,
        },
        _ => return None,
    })
}

pub fn is_recognized(component: &str) -> bool {
    class_of(component).is_some()
}

/// Canonical label of a tag set: components sorted and joined with `+`.
pub fn combination_label<'a>(tags: impl IntoIterator<Item = &'a String>) -> String {
    let sorted: BTreeSet<&str> = tags.into_iter().map(String::as_str).collect();
    let mut out = String::new();
    for (i, t) in sorted.into_iter().enumerate() {
        if i > 0 {
            out.push('+');
        }
        out.push_str(t);
    }
    out
}

/// Tie-breaking order for compounds outside the 13-class inventory.
const PRECEDENCE: &[TagClass] = &[
    TagClass::Punctuation,
    TagClass::Orthography,
    TagClass::Morphology,
    TagClass::Syntax,
    TagClass::Semantics,
];

/// Reduces a fine-grained label to the 13-class inventory.
///
/// Structural labels pass through. Merge and split components dominate any
/// main classes they are combined with; insertions and deletions carrying a
/// main class reduce to that class. Otherwise the set of main classes is
/// looked up as a compound, falling back to the highest-precedence class
/// (P > O > M > X > S), then UNK.
pub fn to_coarse(label: &str) -> String {
    if STRUCTURAL_LABELS.contains(&label) || label == SPLIT || label == ERROR {
        return if label == ERROR {
            UNK.to_string()
        } else {
            label.to_string()
        };
    }
    let classes: BTreeSet<TagClass> = label.split('+').filter_map(class_of).collect();
    if classes.contains(&TagClass::Split) {
        return SPLIT.to_string();
    }
    if classes.contains(&TagClass::Merge) {
        return MERGE.to_string();
    }
    let main: Vec<&str> = classes.iter().filter_map(|c| c.main_letter()).collect();
    if !main.is_empty() {
        let mut sorted = main.clone();
        sorted.sort_unstable();
        let compound = sorted.join("+");
        if COARSE_LABELS.contains(&compound.as_str()) {
            return compound;
        }
        for class in PRECEDENCE {
            if classes.contains(class) {
                return class.main_letter().unwrap().to_string();
            }
        }
    }
    if classes.contains(&TagClass::Delete) {
        return DELETE.to_string();
    }
    if classes.contains(&TagClass::Insert) {
        return INSERT.to_string();
    }
    UNK.to_string()
}

pub fn to_binary(label: &str) -> String {
    if label == CORRECT {
        CORRECT.to_string()
    } else {
        ERROR.to_string()
    }
}

/// GED label granularity: 43-class, 13-class or binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Granularity {
    Fine,
    Coarse,
    Binary,
}

impl Granularity {
    pub fn class_count(self) -> u32 {
        match self {
            Granularity::Fine => 43,
            Granularity::Coarse => 13,
            Granularity::Binary => 2,
        }
    }

    /// Projects a fine-grained token label to this granularity. Edit-only
    /// classes (a bare merge or insertion tag on a token) become UNK.
    pub fn project(self, fine: &str) -> String {
        let coarse = || {
            let c = to_coarse(fine);
            if COARSE_LABELS.contains(&c.as_str()) {
                c
            } else {
                UNK.to_string()
            }
        };
        match self {
            Granularity::Fine => fine.to_string(),
            Granularity::Coarse => coarse(),
            Granularity::Binary => to_binary(&coarse()),
        }
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "43" => Ok(Granularity::Fine),
            "13" => Ok(Granularity::Coarse),
            "2" => Ok(Granularity::Binary),
            _ => Err(Error::invalid(format!("granularity must be 43, 13 or 2, got {s:?}"))),
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class_count())
    }
}

/// Fine-grained combinations that receive their own label; everything else
/// becomes UNK. `None` models every combination.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelInventory {
    modeled: Option<BTreeSet<String>>,
}

impl LabelInventory {
    pub fn all() -> Self {
        LabelInventory { modeled: None }
    }

    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        LabelInventory {
            modeled: Some(labels.into_iter().map(Into::into).collect()),
        }
    }

    pub fn is_modeled(&self, label: &str) -> bool {
        STRUCTURAL_LABELS.contains(&label) || self.modeled.as_ref().is_none_or(|m| m.contains(label))
    }

    /// Structural labels plus the modeled combinations, sorted.
    pub fn labels(&self) -> Option<Vec<String>> {
        self.modeled.as_ref().map(|m| {
            let mut all: BTreeSet<String> = m.clone();
            all.extend(STRUCTURAL_LABELS.iter().map(|s| s.to_string()));
            all.into_iter().collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compound_projection() {
        assert_eq!(to_coarse("O+X"), "O+X");
        assert_eq!(to_binary(&to_coarse("O+X")), "E");
        assert_eq!(to_coarse("OH+XC"), "O+X");
        assert_eq!(to_coarse("MI+OH"), "M+O");
        assert_eq!(to_coarse("OH"), "O");
    }

    #[test]
    fn precedence_for_unlisted_compounds() {
        assert_eq!(to_coarse("S+X"), "X");
        assert_eq!(to_coarse("O+P"), "P");
        assert_eq!(to_coarse("M+X"), "M");
        assert_eq!(to_coarse("M+O+X"), "O");
    }

    #[test]
    fn structural_pass_through() {
        for l in STRUCTURAL_LABELS {
            assert_eq!(to_coarse(l), *l);
        }
        assert_eq!(to_coarse(SPLIT), SPLIT);
        assert_eq!(to_coarse("Insert+P"), "P");
        assert_eq!(to_coarse("Delete"), "Delete");
        assert_eq!(to_coarse("bogus"), UNK);
    }

    #[test]
    fn coarse_is_idempotent_on_its_inventory() {
        for l in COARSE_LABELS {
            assert_eq!(to_coarse(l), *l);
        }
    }

    #[test]
    fn combination_is_sorted() {
        let tags: Vec<String> = vec!["X".into(), "O".into()];
        assert_eq!(combination_label(&tags), "O+X");
    }

    #[test]
    fn inventory() {
        let inv = LabelInventory::from_labels(["O"]);
        assert!(inv.is_modeled("O"));
        assert!(inv.is_modeled(MERGE_B));
        assert!(!inv.is_modeled("S+X"));
        assert!(LabelInventory::all().is_modeled("S+X"));
        assert!("7".parse::<Granularity>().is_err());
    }
}
