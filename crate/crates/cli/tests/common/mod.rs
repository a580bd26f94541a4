#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn argec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_argec"))
        .current_dir(dir)
        .env_remove("RUST_LOG")
        .args(args)
        .output()
        .expect("argec binary runs")
}

/// Runs `argec` and panics with its stderr unless it exits 0.
pub fn argec_ok(dir: &Path, args: &[&str]) -> Output {
    let out = argec(dir, args);
    assert!(
        out.status.success(),
        "argec {} failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Files written by [`run_pipeline`], in the order they are produced.
pub const PIPELINE_OUTPUTS: &[&str] = &[
    "align.txt",
    "align.m2",
    "annotated.m2",
    "tags.out",
    "ged43.tsv",
    "builtin.m2",
    "builtin43.tsv",
    "ged13.tsv",
    "ged2.tsv",
    "stats13.tsv",
    "freq.tsv",
    "preprocessed.txt",
    "model.txt",
    "corrected.txt",
    "m2.tsv",
    "ged13_score.tsv",
];

/// Every subcommand over the bundled fixture corpus, run inside `dir` with
/// relative paths so outputs do not depend on where `dir` lives.
pub fn run_pipeline(dir: &Path, extra: &[&str]) -> BTreeMap<String, Vec<u8>> {
    for f in ["src.txt", "tgt.txt", "tags.txt"] {
        std::fs::copy(fixtures().join(f), dir.join(f)).unwrap();
    }
    let steps: &[&[&str]] = &[
        &[
            "align",
            "--src",
            "src.txt",
            "--tgt",
            "tgt.txt",
            "--out",
            "align.txt",
            "--m2",
            "align.m2",
        ],
        &[
            "annotate",
            "--src",
            "src.txt",
            "--tgt",
            "tgt.txt",
            "--tags",
            "tags.txt",
            "--out",
            "annotated.m2",
            "--tags-out",
            "tags.out",
            "--ged",
            "ged43.tsv",
            "--threshold",
            "0",
        ],
        &[
            "annotate",
            "--src",
            "src.txt",
            "--tgt",
            "tgt.txt",
            "--out",
            "builtin.m2",
            "--ged",
            "builtin43.tsv",
        ],
        &[
            "project",
            "--m2",
            "annotated.m2",
            "--granularity",
            "13",
            "--threshold",
            "0",
            "--out",
            "ged13.tsv",
        ],
        &[
            "project",
            "--ged",
            "ged43.tsv",
            "--granularity",
            "2",
            "--out",
            "ged2.tsv",
        ],
        &[
            "stats",
            "--m2",
            "annotated.m2",
            "--granularity",
            "13",
            "--out",
            "stats13.tsv",
            "--frequencies",
            "freq.tsv",
        ],
        &[
            "preprocess",
            "--src",
            "src.txt",
            "--ged",
            "ged43.tsv",
            "--out",
            "preprocessed.txt",
        ],
        &[
            "mle-train",
            "--m2",
            "annotated.m2",
            "--tags",
            "13",
            "--threshold",
            "0",
            "--out",
            "model.txt",
        ],
        &[
            "mle-apply",
            "--model",
            "model.txt",
            "--input",
            "src.txt",
            "--ged",
            "ged13.tsv",
            "--out",
            "corrected.txt",
        ],
        &[
            "m2-score",
            "--gold",
            "annotated.m2",
            "--hyp",
            "corrected.txt",
            "--src",
            "src.txt",
            "--format",
            "tsv",
            "--out",
            "m2.tsv",
        ],
        &[
            "ged-score",
            "--gold",
            "ged43.tsv",
            "--pred",
            "builtin43.tsv",
            "--granularity",
            "13",
            "--format",
            "tsv",
            "--out",
            "ged13_score.tsv",
        ],
    ];
    for step in steps {
        let args: Vec<&str> = extra.iter().chain(step.iter()).copied().collect();
        argec_ok(dir, &args);
    }
    PIPELINE_OUTPUTS
        .iter()
        .map(|f| (f.to_string(), std::fs::read(dir.join(f)).unwrap()))
        .collect()
}
