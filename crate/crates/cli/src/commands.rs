use std::io::Write as _;
use std::path::{Path, PathBuf};

use argec_core::align::{extract_edits, write_alignment, CostMatrix};
use argec_core::annotate::{
    annotate_builtin, count_tag_frequencies, error_distribution, ingest_annotations, parse_tag_line,
    project_ged_labels, resolve_detections, AnnotatedPair, Granularity, LabelInventory,
};
use argec_core::config::Config;
use argec_core::corpus::{
    read_ged, read_m2, read_parallel, read_sentences, write_ged, write_m2, write_sentences, Annotation, ErrorTag,
    GedRecord, M2Record, SentencePair,
};
use argec_core::eval::ged_score;
use argec_core::eval::m2::{accumulate, check_inputs, score_sentence};
use argec_core::eval::report::{gec_report, ged_report};
use argec_core::mle::{mle_apply, mle_train, MleModel};
use argec_core::{Error, Result};
use log::{info, warn};
use rayon::prelude::*;

use crate::{Cli, Command, CorpusInput, LabelInput};

pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    if cfg.jobs > 0 {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    }

    match cli.command {
        Command::Align { src, tgt, out, m2 } => {
            let costs = cfg.costs()?;
            let pairs = read_parallel(&src, &tgt)?;
            let alignments: Vec<_> = pairs.par_iter().map(|p| extract_edits(p, &costs)).collect();
            let text: String = pairs
                .iter()
                .zip(&alignments)
                .map(|(p, a)| write_alignment(p, a))
                .collect();
            emit(out.as_deref(), &text)?;
            if let Some(path) = m2 {
                let records = pairs
                    .iter()
                    .zip(&alignments)
                    .map(|(p, a)| {
                        M2Record::new(
                            words(p),
                            vec![Annotation {
                                annotator: 0,
                                edits: a.to_m2_edits(p),
                            }],
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                write_file(&path, &write_m2(&records))?;
            }
        }

        Command::Annotate {
            src,
            tgt,
            out,
            tags,
            tags_out,
            ged,
            granularity,
            threshold,
        } => {
            set(&mut cfg.granularity, granularity);
            set(&mut cfg.threshold, threshold);
            let costs = cfg.costs()?;
            let pairs = read_parallel(&src, &tgt)?;
            let corpus = match tags {
                None => builtin_corpus(&pairs, &costs),
                Some(path) => {
                    let lines = read_lines(&path)?;
                    if lines.len() != pairs.len() {
                        return Err(Error::invalid(format!(
                            "{}: {} tag lines for {} sentence pairs",
                            path.display(),
                            lines.len(),
                            pairs.len()
                        )));
                    }
                    pairs
                        .par_iter()
                        .zip(lines.par_iter())
                        .map(|(p, line)| {
                            ingest_annotations(p, &extract_edits(p, &costs), &parse_tag_line(line))
                                .map_err(|e| Error::invalid(format!("sentence {}: {e}", p.source.id())))
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            };
            let unrecognized: usize = corpus.iter().map(AnnotatedPair::unrecognized_count).sum();
            if unrecognized > 0 {
                warn!("{unrecognized} unrecognized tag component(s) kept verbatim");
            }
            let records: Vec<M2Record> = corpus.iter().map(|a| a.to_m2_record(0)).collect();
            emit(out.as_deref(), &write_m2(&records))?;
            if let Some(path) = tags_out {
                let text: String = corpus
                    .iter()
                    .map(|a| a.edits().map(|t| t.label()).collect::<Vec<_>>().join(" ") + "\n")
                    .collect();
                write_file(&path, &text)?;
            }
            if let Some(path) = ged {
                let inventory = count_tag_frequencies(&corpus).modeled(cfg.threshold);
                write_file(&path, &write_ged(&project_all(&corpus, cfg.granularity, &inventory)))?;
            }
        }

        Command::Project {
            input,
            train,
            annotator,
            granularity,
            threshold,
            out,
        } => {
            set(&mut cfg.granularity, granularity);
            set(&mut cfg.threshold, threshold);
            let records = match input {
                LabelInput { m2: Some(path), .. } => {
                    let costs = cfg.costs()?;
                    let corpus = m2_corpus(&path, annotator, &costs)?;
                    let inventory = match train {
                        Some(train) => count_tag_frequencies(&m2_corpus(&train, annotator, &costs)?),
                        None => count_tag_frequencies(&corpus),
                    }
                    .modeled(cfg.threshold);
                    project_all(&corpus, cfg.granularity, &inventory)
                }
                LabelInput { ged: Some(path), .. } => {
                    let g = cfg.granularity;
                    read_ged(&path)?
                        .iter()
                        .map(|r| r.map_labels(|l| ErrorTag::new(g.project(l.as_str())).expect("non-empty label")))
                        .collect()
                }
                _ => unreachable!("clap requires exactly one input"),
            };
            emit(out.as_deref(), &write_ged(&records))?;
        }

        Command::Preprocess { src, ged, out } => {
            let sentences = read_sentences(&src)?;
            let labels = read_ged(&ged)?;
            if sentences.len() != labels.len() {
                return Err(Error::invalid(format!(
                    "{} sentences but {} label records",
                    sentences.len(),
                    labels.len()
                )));
            }
            let resolved = sentences
                .par_iter()
                .zip(labels.par_iter())
                .map(|(s, l)| resolve_detections(s, l))
                .collect::<Result<Vec<_>>>()?;
            let orphans: usize = resolved.iter().map(|r| r.orphan_merge_inside).sum();
            if orphans > 0 {
                warn!("{orphans} Merge-I label(s) without a preceding Merge-B passed through");
            }
            emit(out.as_deref(), &write_sentences(resolved.iter().map(|r| &r.sentence)))?;
        }

        Command::MleTrain {
            corpus,
            tags,
            threshold,
            out,
        } => {
            let tags = tags.0;
            set(&mut cfg.threshold, threshold);
            let costs = cfg.costs()?;
            let corpus = load_corpus(&corpus, &costs)?;
            let inventory = count_tag_frequencies(&corpus).modeled(cfg.threshold);
            let model = corpus
                .par_chunks(256)
                .map(|chunk| mle_train(chunk, tags, &inventory))
                .collect::<Vec<_>>()
                .into_iter()
                .try_fold(MleModel::new(tags), |mut acc, m| acc.merge(&m).map(|()| acc))?;
            info!("trained on {} sentence pairs", corpus.len());
            emit(out.as_deref(), &model.to_text())?;
        }

        Command::MleApply { model, input, ged, out } => {
            let text = std::fs::read_to_string(&model).map_err(|e| Error::io(&model, e))?;
            let model = MleModel::from_text(&text, &model.display().to_string())?;
            let sentences = read_sentences(&input)?;
            let labels = match ged {
                Some(path) => {
                    let labels = read_ged(&path)?;
                    if labels.len() != sentences.len() {
                        return Err(Error::invalid(format!(
                            "{} sentences but {} label records",
                            sentences.len(),
                            labels.len()
                        )));
                    }
                    Some(labels)
                }
                None => None,
            };
            let corrected = sentences
                .par_iter()
                .enumerate()
                .map(|(i, s)| mle_apply(&model, s, labels.as_ref().map(|l| &l[i])))
                .collect::<Result<Vec<_>>>()?;
            emit(out.as_deref(), &write_sentences(&corrected))?;
        }

        Command::M2Score {
            gold,
            hyp,
            src,
            beta,
            max_unchanged,
            timeout_secs,
            format,
            out,
        } => {
            if let Some(b) = beta {
                cfg.set("beta", &b.to_string()).map_err(Error::invalid)?;
            }
            set(&mut cfg.max_unchanged, max_unchanged);
            if let Some(t) = timeout_secs {
                cfg.set("timeout_secs", &t).map_err(Error::invalid)?;
            }
            let opts = cfg.m2_options();
            let gold_records = read_m2(&gold)?;
            let hyps = read_sentences(&hyp)?;
            let sources = src.as_deref().map(read_sentences).transpose()?;
            check_inputs(sources.as_deref(), &hyps, &gold_records)?;
            let evals: Vec<_> = hyps
                .par_iter()
                .zip(gold_records.par_iter())
                .map(|(h, g)| {
                    let h: Vec<String> = h.words().map(str::to_string).collect();
                    score_sentence(&h, g, &opts)
                })
                .collect();
            let report = accumulate(&evals, opts.beta);
            if report.timeouts > 0 {
                warn!("{} of {} sentences timed out", report.timeouts, report.sentences);
            }
            let name = hyp.display().to_string();
            emit(out.as_deref(), &gec_report(&[(&name, &report)], opts.beta, format))?;
        }

        Command::GedScore {
            gold,
            pred,
            granularity,
            format,
            out,
        } => {
            let project = |records: Vec<GedRecord>| -> Vec<GedRecord> {
                match granularity {
                    Some(g) => records
                        .iter()
                        .map(|r| r.map_labels(|l| ErrorTag::new(g.project(l.as_str())).expect("non-empty label")))
                        .collect(),
                    None => records,
                }
            };
            let score = ged_score(&project(read_ged(&gold)?), &project(read_ged(&pred)?))?;
            let name = pred.display().to_string();
            emit(out.as_deref(), &ged_report(&[(&name, &score)], format))?;
        }

        Command::Stats {
            corpus,
            granularity,
            frequencies,
            out,
        } => {
            set(&mut cfg.granularity, granularity);
            let corpus = load_corpus(&corpus, &cfg.costs()?)?;
            emit(out.as_deref(), &error_distribution(&corpus, cfg.granularity).to_tsv())?;
            if let Some(path) = frequencies {
                let freq = count_tag_frequencies(&corpus);
                let text: String = freq.ranked().iter().map(|(l, n)| format!("{l}\t{n}\n")).collect();
                write_file(&path, &text)?;
            }
        }
    }
    Ok(())
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn words(pair: &SentencePair) -> Vec<String> {
    pair.source.words().map(str::to_string).collect()
}

fn builtin_corpus(pairs: &[SentencePair], costs: &CostMatrix) -> Vec<AnnotatedPair> {
    pairs
        .par_iter()
        .map(|p| annotate_builtin(p, &extract_edits(p, costs)))
        .collect()
}

fn m2_corpus(path: &Path, annotator: Option<u32>, costs: &CostMatrix) -> Result<Vec<AnnotatedPair>> {
    read_m2(path)?
        .par_iter()
        .enumerate()
        .map(|(i, r)| AnnotatedPair::from_m2(r, annotator, &(i + 1).to_string(), costs))
        .collect()
}

fn load_corpus(input: &CorpusInput, costs: &CostMatrix) -> Result<Vec<AnnotatedPair>> {
    match input {
        CorpusInput {
            m2: Some(path),
            annotator,
            ..
        } => m2_corpus(path, *annotator, costs),
        CorpusInput {
            src: Some(src),
            tgt: Some(tgt),
            ..
        } => Ok(builtin_corpus(&read_parallel(src, tgt)?, costs)),
        _ => Err(Error::invalid("give either --m2 or both --src and --tgt")),
    }
}

fn project_all(corpus: &[AnnotatedPair], granularity: Granularity, inventory: &LabelInventory) -> Vec<GedRecord> {
    corpus
        .par_iter()
        .map(|a| project_ged_labels(a, granularity, inventory))
        .collect()
}

fn read_lines(path: &PathBuf) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}
