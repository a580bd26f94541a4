//! MaxMatch (M²) scoring of system hypotheses against gold span edits.
//!
//! For each sentence the token-level Levenshtein lattice between source and
//! hypothesis is built from every optimal backpointer. Adjacent lattice
//! edges are then chained into longer candidate edits as long as a chain
//! holds at most `max_unchanged` unchanged words. Among all paths through
//! the resulting graph the scorer picks the one with the most gold matches;
//! remaining ties prefer the lowest unmatched edge weight, then the fewest
//! proposed edits.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use super::GecScore;
use crate::corpus::{M2Edit, M2Record, Sentence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct M2Options {
    pub beta: f64,
    pub max_unchanged: usize,
    /// Lowercase tokens and corrections before comparing (a no-op for
    /// caseless scripts such as Arabic).
    pub ignore_case: bool,
    /// Per-sentence wall-clock budget; on expiry the hypothesis is replaced
    /// by the source.
    pub timeout: Option<Duration>,
}

impl Default for M2Options {
    fn default() -> Self {
        M2Options {
            beta: 0.5,
            max_unchanged: 2,
            ignore_case: true,
            timeout: Some(Duration::from_secs(30)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Noop,
    Sub,
    Del,
    Ins,
}

type Vertex = (usize, usize);

/// A candidate hypothesis edit between two lattice vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeEdit {
    pub from: Vertex,
    pub to: Vertex,
    /// Number of lattice edges chained into this edit.
    pub weight: usize,
    pub noop: bool,
}

impl LatticeEdit {
    pub fn is_insertion(&self) -> bool {
        self.from.0 == self.to.0
    }
}

/// Candidate edits between one source sentence and one hypothesis.
#[derive(Debug, Clone)]
pub struct EditLattice {
    pub source: Vec<String>,
    pub hypothesis: Vec<String>,
    pub vertices: Vec<Vertex>,
    pub edits: Vec<LatticeEdit>,
}

struct Deadline(Option<Instant>);

impl Deadline {
    fn new(start: Instant, limit: Option<Duration>) -> Self {
        Deadline(limit.map(|l| start + l))
    }

    fn expired(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Debug)]
struct TimedOut;

fn normalize(s: &str, ignore_case: bool) -> String {
    if ignore_case {
        s.to_lowercase()
    } else {
        s.to_string()
    }
}

impl EditLattice {
    pub fn build(source: &[String], hypothesis: &[String], opts: &M2Options) -> Self {
        Self::build_until(source, hypothesis, opts, &Deadline(None)).expect("no deadline")
    }

    fn build_until(
        source: &[String],
        hypothesis: &[String],
        opts: &M2Options,
        deadline: &Deadline,
    ) -> std::result::Result<Self, TimedOut> {
        let src: Vec<String> = source.iter().map(|t| normalize(t, opts.ignore_case)).collect();
        let hyp: Vec<String> = hypothesis.iter().map(|t| normalize(t, opts.ignore_case)).collect();
        let (n, m) = (src.len(), hyp.len());
        let w = m + 1;
        let mut dp = vec![0usize; (n + 1) * w];
        for (j, cell) in dp[..w].iter_mut().enumerate() {
            *cell = j;
        }
        for i in 1..=n {
            dp[i * w] = i;
            for j in 1..=m {
                let diag = dp[(i - 1) * w + j - 1] + usize::from(src[i - 1] != hyp[j - 1]);
                dp[i * w + j] = diag.min(dp[(i - 1) * w + j] + 1).min(dp[i * w + j - 1] + 1);
            }
        }

        // Walk optimal backpointers from the end to collect the lattice.
        let mut on_path = vec![false; (n + 1) * w];
        let mut base: Vec<(Vertex, Vertex, Step)> = Vec::new();
        let mut stack = vec![(n, m)];
        on_path[n * w + m] = true;
        while let Some((i, j)) = stack.pop() {
            let here = dp[i * w + j];
            let mut preds = Vec::with_capacity(3);
            if i > 0 && j > 0 {
                let same = src[i - 1] == hyp[j - 1];
                if dp[(i - 1) * w + j - 1] + usize::from(!same) == here {
                    preds.push(((i - 1, j - 1), if same { Step::Noop } else { Step::Sub }));
                }
            }
            if i > 0 && dp[(i - 1) * w + j] + 1 == here {
                preds.push(((i - 1, j), Step::Del));
            }
            if j > 0 && dp[i * w + j - 1] + 1 == here {
                preds.push(((i, j - 1), Step::Ins));
            }
            for (p, step) in preds {
                base.push((p, (i, j), step));
                if !on_path[p.0 * w + p.1] {
                    on_path[p.0 * w + p.1] = true;
                    stack.push(p);
                }
            }
        }
        if deadline.expired() {
            return Err(TimedOut);
        }

        let vertices: Vec<Vertex> = (0..=n)
            .flat_map(|i| (0..=m).map(move |j| (i, j)))
            .filter(|&(i, j)| on_path[i * w + j])
            .collect();
        let mut out_edges: BTreeMap<Vertex, Vec<(Vertex, Step)>> = BTreeMap::new();
        for &(from, to, step) in &base {
            out_edges.entry(from).or_default().push((to, step));
        }
        for list in out_edges.values_mut() {
            list.sort_by_key(|&(v, _)| v);
        }

        let k = opts.max_unchanged;
        let index: BTreeMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let cost_at = |v: Vertex| dp[v.0 * w + v.1];
        let mut edits = Vec::new();
        for &u in &vertices {
            if deadline.expired() {
                return Err(TimedOut);
            }
            // Single lattice edges are always candidates.
            let mut arcs: BTreeMap<Vertex, (usize, bool)> = BTreeMap::new();
            // reach[v][c]: fewest edges on a path u -> v holding c unchanged words.
            let mut reach: BTreeMap<usize, Vec<Option<usize>>> = BTreeMap::new();
            let relax = |reach: &mut BTreeMap<usize, Vec<Option<usize>>>, x: Vertex, c: usize, len: usize| {
                let slots = reach.entry(index[&x]).or_insert_with(|| vec![None; k + 1]);
                if slots[c].is_none_or(|l| len < l) {
                    slots[c] = Some(len);
                }
            };
            for &(x, step) in out_edges.get(&u).into_iter().flatten() {
                let noop = step == Step::Noop;
                arcs.insert(x, (1, noop));
                if usize::from(noop) <= k {
                    relax(&mut reach, x, usize::from(noop), 1);
                }
            }
            // Vertex order is topological, so each vertex is final when popped.
            while let Some((vi, slots)) = reach.pop_first() {
                let v = vertices[vi];
                for (c, len) in slots.iter().enumerate() {
                    let Some(len) = *len else { continue };
                    // Equal lattice cost at both ends means an unchanged-only chain.
                    if len > 1 && cost_at(v) != cost_at(u) {
                        let entry = arcs.entry(v).or_insert((len, false));
                        entry.0 = entry.0.min(len);
                    }
                    for &(x, step) in out_edges.get(&v).into_iter().flatten() {
                        let c2 = c + usize::from(step == Step::Noop);
                        if c2 <= k {
                            relax(&mut reach, x, c2, len + 1);
                        }
                    }
                }
            }
            edits.extend(arcs.into_iter().map(|(x, (weight, noop))| LatticeEdit {
                from: u,
                to: x,
                weight,
                noop,
            }));
        }
        edits.sort_by_key(|e| (e.from, e.to));

        Ok(EditLattice {
            source: source.to_vec(),
            hypothesis: hypothesis.to_vec(),
            vertices,
            edits,
        })
    }

    pub fn start(&self) -> Vertex {
        (0, 0)
    }

    pub fn end(&self) -> Vertex {
        (self.source.len(), self.hypothesis.len())
    }

    pub fn correction(&self, e: &LatticeEdit) -> String {
        self.hypothesis[e.from.1..e.to.1].join(" ")
    }

    /// True when the edit reproduces one of `gold`'s edits: same source
    /// span and one of its alternative corrections.
    pub fn matches(&self, e: &LatticeEdit, gold: &[M2Edit], ignore_case: bool) -> bool {
        if e.noop {
            return false;
        }
        let corr = normalize(&self.correction(e), ignore_case);
        gold.iter().any(|g| {
            g.start == e.from.0 && g.end == e.to.0 && g.alternatives().iter().any(|a| normalize(a, ignore_case) == corr)
        })
    }
}

/// Ranking key of a path; larger is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathKey {
    pub matched: usize,
    neg_weight: i64,
    neg_proposed: i64,
}

impl PathKey {
    pub const EMPTY: PathKey = PathKey {
        matched: 0,
        neg_weight: 0,
        neg_proposed: 0,
    };

    pub fn extend(self, edit: &LatticeEdit, matched: bool) -> PathKey {
        PathKey {
            matched: self.matched + usize::from(matched),
            neg_weight: self.neg_weight - if matched { 0 } else { edit.weight as i64 },
            neg_proposed: self.neg_proposed - i64::from(!edit.noop),
        }
    }

    pub fn proposed(&self) -> usize {
        (-self.neg_proposed) as usize
    }
}

/// Two insertions at the same source position are never chained; the single
/// combined insertion covers that case.
pub fn may_follow(prev: Option<&LatticeEdit>, next: &LatticeEdit) -> bool {
    !(prev.is_some_and(|p| p.is_insertion() && !p.noop) && next.is_insertion() && !next.noop)
}

/// Best path from start to end, as indices into `lattice.edits`.
pub fn best_edit_path(lattice: &EditLattice, gold: &[M2Edit], ignore_case: bool) -> (PathKey, Vec<usize>) {
    best_edit_path_until(lattice, gold, ignore_case, &Deadline(None)).expect("no deadline")
}

fn best_edit_path_until(
    lattice: &EditLattice,
    gold: &[M2Edit],
    ignore_case: bool,
    deadline: &Deadline,
) -> std::result::Result<(PathKey, Vec<usize>), TimedOut> {
    let matched: Vec<bool> = lattice
        .edits
        .iter()
        .map(|e| lattice.matches(e, gold, ignore_case))
        .collect();
    // State: (vertex, entered by a non-noop insertion).
    type State = (Vertex, bool);
    let mut best: BTreeMap<State, (PathKey, Option<(State, usize)>)> = BTreeMap::new();
    best.insert((lattice.start(), false), (PathKey::EMPTY, None));

    let mut out: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (idx, e) in lattice.edits.iter().enumerate() {
        out.entry(e.from).or_default().push(idx);
    }
    // Lexicographic vertex order is topological: edits never move backwards.
    for &v in &lattice.vertices {
        if deadline.expired() {
            return Err(TimedOut);
        }
        for flag in [false, true] {
            let Some(&(key, _)) = best.get(&(v, flag)) else {
                continue;
            };
            let Some(edges) = out.get(&v) else { continue };
            for &idx in edges {
                let e = &lattice.edits[idx];
                if flag && e.is_insertion() && !e.noop {
                    continue;
                }
                let next_state = (e.to, e.is_insertion() && !e.noop);
                let cand = key.extend(e, matched[idx]);
                let better = best.get(&next_state).is_none_or(|&(k, _)| cand > k);
                if better {
                    best.insert(next_state, (cand, Some(((v, flag), idx))));
                }
            }
        }
    }

    let end = lattice.end();
    let mut finals: Vec<State> = [(end, false), (end, true)]
        .into_iter()
        .filter(|s| best.contains_key(s))
        .collect();
    finals.sort_by(|a, b| best[b].0.cmp(&best[a].0).then(a.1.cmp(&b.1)));
    let mut state = finals[0];
    let key = best[&state].0;
    let mut path = Vec::new();
    while let Some((prev, idx)) = best[&state].1 {
        path.push(idx);
        state = prev;
    }
    path.reverse();
    Ok((key, path))
}

/// Per-annotator counts for one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatorCounts {
    pub annotator: u32,
    pub correct: usize,
    pub proposed: usize,
    pub gold: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceEval {
    pub per_annotator: Vec<AnnotatorCounts>,
    pub timed_out: bool,
}

fn annotator_sets(record: &M2Record) -> Vec<(u32, &[M2Edit])> {
    if record.annotations.is_empty() {
        vec![(0, &[][..])]
    } else {
        record
            .annotations
            .iter()
            .map(|a| (a.annotator, a.edits.as_slice()))
            .collect()
    }
}

/// Scores one hypothesis against every annotator of `record`.
pub fn score_sentence(hypothesis: &[String], record: &M2Record, opts: &M2Options) -> SentenceEval {
    let started = Instant::now();
    let deadline = Deadline::new(started, opts.timeout);
    let sets = annotator_sets(record);

    let attempt = || -> std::result::Result<Vec<AnnotatorCounts>, TimedOut> {
        if deadline.expired() {
            return Err(TimedOut);
        }
        let lattice = EditLattice::build_until(&record.source_tokens, hypothesis, opts, &deadline)?;
        sets.iter()
            .map(|&(annotator, gold)| {
                let (key, _) = best_edit_path_until(&lattice, gold, opts.ignore_case, &deadline)?;
                Ok(AnnotatorCounts {
                    annotator,
                    correct: key.matched,
                    proposed: key.proposed(),
                    gold: gold.len(),
                })
            })
            .collect()
    };

    match attempt() {
        Ok(per_annotator) => SentenceEval {
            per_annotator,
            timed_out: false,
        },
        Err(TimedOut) => SentenceEval {
            per_annotator: sets
                .iter()
                .map(|&(annotator, gold)| AnnotatorCounts {
                    annotator,
                    correct: 0,
                    proposed: 0,
                    gold: gold.len(),
                })
                .collect(),
            timed_out: true,
        },
    }
}

/// Corpus-level M² result.
#[derive(Debug, Clone, PartialEq)]
pub struct M2Report {
    pub score: GecScore,
    pub timeouts: usize,
    pub sentences: usize,
    /// How often each annotator was chosen.
    pub annotator_choices: BTreeMap<u32, usize>,
}

/// Ordered reduction over sentences. Per sentence the annotator is chosen
/// to maximize the running corpus F-score; ties prefer more correct edits,
/// then a smaller `proposed + beta² * gold`, then file order.
pub fn accumulate(evals: &[SentenceEval], beta: f64) -> M2Report {
    let mut total = GecScore::default();
    let mut choices = BTreeMap::new();
    let b2 = beta * beta;
    for ev in evals {
        let mut chosen: Option<(GecScore, u32)> = None;
        for c in &ev.per_annotator {
            let local = GecScore {
                correct: total.correct + c.correct,
                proposed: total.proposed + c.proposed,
                gold: total.gold + c.gold,
            };
            let better = match &chosen {
                None => true,
                Some((best, _)) => {
                    let (f, bf) = (local.f_beta(beta), best.f_beta(beta));
                    f > bf
                        || (f == bf && local.correct > best.correct)
                        || (f == bf
                            && local.correct == best.correct
                            && (local.proposed as f64 + b2 * local.gold as f64)
                                < (best.proposed as f64 + b2 * best.gold as f64))
                }
            };
            if better {
                chosen = Some((local, c.annotator));
            }
        }
        if let Some((local, annotator)) = chosen {
            total = local;
            *choices.entry(annotator).or_default() += 1;
        }
    }
    M2Report {
        score: total,
        timeouts: evals.iter().filter(|e| e.timed_out).count(),
        sentences: evals.len(),
        annotator_choices: choices,
    }
}

/// Checks that sources, hypotheses and gold records line up.
pub fn check_inputs(sources: Option<&[Sentence]>, hypotheses: &[Sentence], gold: &[M2Record]) -> Result<()> {
    if hypotheses.len() != gold.len() {
        return Err(Error::invalid(format!(
            "sentence count mismatch: {} hypotheses vs {} gold records",
            hypotheses.len(),
            gold.len()
        )));
    }
    if let Some(sources) = sources {
        if sources.len() != gold.len() {
            return Err(Error::invalid(format!(
                "sentence count mismatch: {} sources vs {} gold records",
                sources.len(),
                gold.len()
            )));
        }
        for (i, (s, g)) in sources.iter().zip(gold).enumerate() {
            if !s.words().eq(g.source_tokens.iter().map(String::as_str)) {
                return Err(Error::invalid(format!(
                    "sentence {}: source text differs from the gold S-line",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

pub fn m2_score(
    sources: Option<&[Sentence]>,
    hypotheses: &[Sentence],
    gold: &[M2Record],
    opts: &M2Options,
) -> Result<M2Report> {
    check_inputs(sources, hypotheses, gold)?;
    let evals: Vec<SentenceEval> = hypotheses
        .iter()
        .zip(gold)
        .map(|(h, g)| {
            let hyp: Vec<String> = h.words().map(str::to_string).collect();
            score_sentence(&hyp, g, opts)
        })
        .collect();
    Ok(accumulate(&evals, opts.beta))
}
