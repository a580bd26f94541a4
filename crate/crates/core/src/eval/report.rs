//! Plain-text and TSV rendering of score bundles.

use std::fmt::Write as _;

use super::{GedScore, M2Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Tsv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "table" | "text" => Ok(Format::Table),
            _ => Err(crate::Error::invalid(format!("unknown report format {s:?}"))),
        }
    }
}

const NO_PROPOSAL_NOTE: &str = "precision is 1 when no edits are proposed";

/// One block per named result, in the given order.
pub fn gec_report(results: &[(&str, &M2Report)], beta: f64, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Tsv => {
            out.push_str(
                "dataset\tcorrect\tproposed\tgold\tprecision\trecall\tf1\tf_beta\tbeta\ttimeouts\tsentences\n",
            );
            for (name, r) in results {
                let s = &r.score;
                writeln!(
                    out,
                    "{name}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{beta}\t{}\t{}",
                    s.correct,
                    s.proposed,
                    s.gold,
                    s.precision(),
                    s.recall(),
                    s.f1(),
                    s.f_beta(beta),
                    r.timeouts,
                    r.sentences
                )
                .unwrap();
            }
            out.push_str("dataset\tannotator\tchosen\n");
            for (name, r) in results {
                for (a, n) in &r.annotator_choices {
                    writeln!(out, "{name}\t{a}\t{n}").unwrap();
                }
            }
        }
        Format::Table => {
            for (i, (name, r)) in results.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let s = &r.score;
                writeln!(out, "== {name} ==").unwrap();
                writeln!(out, "Precision   : {:.4}", s.precision()).unwrap();
                writeln!(out, "Recall      : {:.4}", s.recall()).unwrap();
                writeln!(out, "F_{beta:<9} : {:.4}", s.f_beta(beta)).unwrap();
                writeln!(
                    out,
                    "Edits       : {} correct / {} proposed / {} gold",
                    s.correct, s.proposed, s.gold
                )
                .unwrap();
                writeln!(out, "Timeouts    : {} of {} sentences", r.timeouts, r.sentences).unwrap();
                if r.timeouts > 0 {
                    writeln!(
                        out,
                        "WARNING: {} sentence(s) hit the time limit and were scored as unchanged",
                        r.timeouts
                    )
                    .unwrap();
                }
                let hist: Vec<String> = r.annotator_choices.iter().map(|(a, n)| format!("{a}:{n}")).collect();
                writeln!(out, "Annotators  : {}", hist.join(" ")).unwrap();
                writeln!(out, "Note        : {NO_PROPOSAL_NOTE}").unwrap();
            }
        }
    }
    out
}

pub fn ged_report(results: &[(&str, &GedScore)], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Tsv => {
            out.push_str("dataset\tlabel\ttp\tfp\tfn\tprecision\trecall\tf0.5\n");
            for (name, s) in results {
                for c in &s.per_class {
                    writeln!(
                        out,
                        "{name}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}",
                        c.label,
                        c.tp,
                        c.fp,
                        c.fn_,
                        c.precision(),
                        c.recall(),
                        c.f05()
                    )
                    .unwrap();
                }
                writeln!(
                    out,
                    "{name}\tMACRO\t\t\t\t{:.4}\t{:.4}\t{:.4}",
                    s.macro_precision(),
                    s.macro_recall(),
                    s.macro_f05()
                )
                .unwrap();
                writeln!(
                    out,
                    "{name}\tACCURACY\t{}\t\t{}\t{:.4}\t\t",
                    s.correct,
                    s.total - s.correct,
                    s.accuracy()
                )
                .unwrap();
            }
        }
        Format::Table => {
            for (i, (name, s)) in results.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                writeln!(out, "== {name} ==").unwrap();
                writeln!(out, "{:<12} {:>7} {:>7} {:>7}", "label", "P", "R", "F0.5").unwrap();
                for c in &s.per_class {
                    writeln!(
                        out,
                        "{:<12} {:>7.1} {:>7.1} {:>7.1}",
                        c.label,
                        100.0 * c.precision(),
                        100.0 * c.recall(),
                        100.0 * c.f05()
                    )
                    .unwrap();
                }
                writeln!(
                    out,
                    "{:<12} {:>7.1} {:>7.1} {:>7.1}",
                    "Macro Avg",
                    100.0 * s.macro_precision(),
                    100.0 * s.macro_recall(),
                    100.0 * s.macro_f05()
                )
                .unwrap();
                writeln!(
                    out,
                    "Accuracy     {:.1} ({} / {})",
                    100.0 * s.accuracy(),
                    s.correct,
                    s.total
                )
                .unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{ged_score, GecScore};
    use std::collections::BTreeMap;

    fn report(correct: usize, proposed: usize, gold: usize, timeouts: usize) -> M2Report {
        M2Report {
            score: GecScore {
                correct,
                proposed,
                gold,
            },
            timeouts,
            sentences: 3,
            annotator_choices: BTreeMap::from([(0, 3)]),
        }
    }

    #[test]
    fn gec_tsv() {
        let r = report(2, 3, 4, 0);
        let text = gec_report(&[("dev", &r)], 0.5, Format::Tsv);
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "dev\t2\t3\t4\t0.6667\t0.5000\t0.5714\t0.6250\t0.5\t0\t3");
        assert!(text.ends_with("dev\t0\t3\n"));
    }

    #[test]
    fn gec_table_flags_timeouts() {
        let clean = gec_report(&[("a", &report(1, 1, 1, 0))], 0.5, Format::Table);
        assert!(!clean.contains("WARNING"));
        assert!(clean.contains(NO_PROPOSAL_NOTE));
        let slow = gec_report(
            &[("a", &report(0, 0, 1, 2)), ("b", &report(1, 1, 1, 0))],
            0.5,
            Format::Table,
        );
        assert!(slow.contains("WARNING: 2 sentence(s)"));
        assert!(slow.contains("== b =="));
    }

    #[test]
    fn empty_ged_report() {
        let s = ged_score(&[], &[]).unwrap();
        let text = ged_report(&[("x", &s)], Format::Tsv);
        assert!(text.contains("x\tMACRO\t\t\t\t1.0000\t1.0000\t1.0000"));
    }
}
