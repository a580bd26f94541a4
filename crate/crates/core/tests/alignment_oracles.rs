//! Alignment results checked against independent exhaustive searches.

use std::collections::HashMap;

use argec_core::align::{
    align_basic, extract_edits, refine_merge_split, token_distance, Alignment, CostMatrix, OpKind,
};
use argec_core::corpus::SentencePair;
use proptest::prelude::*;

const EPS: f64 = 1e-9;

/// Edit distance straight from the recursive definition, memoized.
fn distance_oracle(a: &[char], b: &[char], costs: &CostMatrix, memo: &mut HashMap<(usize, usize), f64>) -> f64 {
    if let Some(&d) = memo.get(&(a.len(), b.len())) {
        return d;
    }
    let d = match (a.split_last(), b.split_last()) {
        (None, None) => 0.0,
        (Some((&x, rest)), None) => distance_oracle(rest, b, costs, memo) + costs.indel(x),
        (None, Some((&y, rest))) => distance_oracle(a, rest, costs, memo) + costs.indel(y),
        (Some((&x, ra)), Some((&y, rb))) => {
            let sub = distance_oracle(ra, rb, costs, memo) + costs.sub(x, y);
            let del = distance_oracle(ra, b, costs, memo) + costs.indel(x);
            let ins = distance_oracle(a, rb, costs, memo) + costs.indel(y);
            sub.min(del).min(ins)
        }
    };
    memo.insert((a.len(), b.len()), d);
    d
}

fn oracle_distance(a: &str, b: &str, costs: &CostMatrix) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    distance_oracle(&a, &b, costs, &mut HashMap::new())
}

/// Cheapest of every explicitly enumerated keep/replace/insert/delete
/// sequence, each priced from scratch.
fn brute_force_basic(src: &[&str], tgt: &[&str], costs: &CostMatrix) -> f64 {
    fn walk(i: usize, j: usize, src: &[&str], tgt: &[&str], costs: &CostMatrix, acc: f64, best: &mut f64) {
        if i == src.len() && j == tgt.len() {
            *best = best.min(acc);
            return;
        }
        if i < src.len() && j < tgt.len() {
            let c = if src[i] == tgt[j] {
                0.0
            } else {
                oracle_distance(src[i], tgt[j], costs)
            };
            walk(i + 1, j + 1, src, tgt, costs, acc + c, best);
        }
        if i < src.len() {
            let c: f64 = src[i].chars().map(|ch| costs.indel(ch)).sum::<f64>() + costs.token_constant();
            walk(i + 1, j, src, tgt, costs, acc + c, best);
        }
        if j < tgt.len() {
            let c: f64 = tgt[j].chars().map(|ch| costs.indel(ch)).sum::<f64>() + costs.token_constant();
            walk(i, j + 1, src, tgt, costs, acc + c, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(0, 0, src, tgt, costs, 0.0, &mut best);
    best
}

fn words_strategy(max_tokens: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[abcdef]{1,4}", 0..=max_tokens)
}

fn pair(src: &[String], tgt: &[String]) -> Option<SentencePair> {
    SentencePair::from_text("p", &src.join(" "), &tgt.join(" ")).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn token_distance_matches_recursive_definition(a in "[abcdef]{0,6}", b in "[abcdef]{0,6}") {
        let unit = CostMatrix::unit();
        prop_assert!((token_distance(&a, &b, &unit) - oracle_distance(&a, &b, &unit)).abs() < EPS);
    }

    #[test]
    fn weighted_distance_matches_recursive_definition(a in "[اأإآيىةهب\u{064E}\u{0651}]{0,6}", b in "[اأإآيىةهب\u{064E}\u{0651}]{0,6}") {
        let costs = CostMatrix::arabic();
        prop_assert!((token_distance(&a, &b, &costs) - oracle_distance(&a, &b, &costs)).abs() < EPS);
    }

    #[test]
    fn distance_is_symmetric_and_satisfies_triangle(a in "[abc]{0,5}", b in "[abc]{0,5}", c in "[abc]{0,5}") {
        let unit = CostMatrix::unit();
        let d = |x: &str, y: &str| token_distance(x, y, &unit);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + EPS);
    }

    #[test]
    fn basic_alignment_is_optimal(src in words_strategy(5), tgt in words_strategy(5)) {
        let Some(p) = pair(&src, &tgt) else { return Ok(()) };
        let costs = CostMatrix::unit();
        let a = align_basic(&p, &costs);
        a.validate(&p).unwrap();
        let s: Vec<&str> = src.iter().map(String::as_str).collect();
        let t: Vec<&str> = tgt.iter().map(String::as_str).collect();
        prop_assert!((a.total_cost() - brute_force_basic(&s, &t, &costs)).abs() < EPS);
    }

    #[test]
    fn refinement_partitions_and_never_costs_more(src in words_strategy(5), tgt in words_strategy(5)) {
        let Some(p) = pair(&src, &tgt) else { return Ok(()) };
        let costs = CostMatrix::arabic();
        let basic = align_basic(&p, &costs);
        let refined = refine_merge_split(&p, &basic, &costs);
        refined.validate(&p).unwrap();
        prop_assert!(refined.total_cost() <= basic.total_cost() + EPS);
    }

    #[test]
    fn self_alignment_is_all_keep(src in words_strategy(8)) {
        let Some(p) = pair(&src, &src) else { return Ok(()) };
        let a = extract_edits(&p, &CostMatrix::arabic());
        prop_assert!(a.ops().iter().all(|o| o.kind == OpKind::Keep));
        prop_assert_eq!(a.total_cost(), 0.0);
    }
}

/// Cost used to rank alignments that may contain merges and splits: each
/// extra token joined into one op pays the whole-token constant.
fn ranked_cost(a: &Alignment, costs: &CostMatrix) -> f64 {
    a.ops()
        .iter()
        .map(|o| match o.kind {
            OpKind::Merge | OpKind::Split => {
                o.cost + (o.source.len() + o.target.len() - 2) as f64 * costs.token_constant()
            }
            _ => o.cost,
        })
        .sum()
}

/// Exhaustive optimum over every monotone segmentation into K/R/I/D/M/S ops.
fn best_with_merges(src: &[&str], tgt: &[&str], costs: &CostMatrix) -> f64 {
    let (n, m) = (src.len(), tgt.len());
    let mut best = vec![vec![f64::INFINITY; m + 1]; n + 1];
    best[n][m] = 0.0;
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            let mut b = f64::INFINITY;
            if i < n && j < m {
                b = b.min(oracle_distance(src[i], tgt[j], costs) + best[i + 1][j + 1]);
                for k in 2..=n - i {
                    let joined = src[i..i + k].concat();
                    let c = oracle_distance(&joined, tgt[j], costs) + (k - 1) as f64 * costs.token_constant();
                    b = b.min(c + best[i + k][j + 1]);
                }
                for k in 2..=m - j {
                    let joined = tgt[j..j + k].concat();
                    let c = oracle_distance(src[i], &joined, costs) + (k - 1) as f64 * costs.token_constant();
                    b = b.min(c + best[i + 1][j + k]);
                }
            }
            if i < n {
                b = b.min(costs.token_indel(src[i]) + best[i + 1][j]);
            }
            if j < m {
                b = b.min(costs.token_indel(tgt[j]) + best[i][j + 1]);
            }
            best[i][j] = b;
        }
    }
    best[0][0]
}

#[test]
fn merges_and_splits_reach_exhaustive_optimum() {
    let costs = CostMatrix::arabic();
    let fixtures = [
        (
            "يجب استخدام وسائل التواصل الاجتماعي بحكمه لان لها اثار سلبيه و ايجابيه",
            "يجب استخدام وسائل التواصل الاجتماعي بحكمة ، لأن لها آثارا سلبية وإيجابية .",
        ),
        ("ذهب عبد الله الى السوق", "ذهب عبدالله إلى السوق"),
        ("اشتريتكتابا جديدا من المكتبه", "اشتريت كتابا جديدا من المكتبة"),
        ("لا بد من ذلكالامر", "لابد من ذلك الأمر"),
    ];
    for (src, tgt) in fixtures {
        let p = SentencePair::from_text("f", src, tgt).unwrap();
        let a = extract_edits(&p, &costs);
        a.validate(&p).unwrap();
        let s: Vec<&str> = src.split_whitespace().collect();
        let t: Vec<&str> = tgt.split_whitespace().collect();
        let optimum = best_with_merges(&s, &t, &costs);
        assert!(
            (ranked_cost(&a, &costs) - optimum).abs() < EPS,
            "{src}: greedy {} vs exhaustive {optimum}",
            ranked_cost(&a, &costs)
        );
    }
}

#[test]
fn social_media_sentence_has_expected_ops() {
    let costs = CostMatrix::arabic();
    let p = SentencePair::from_text(
        "f",
        "يجب استخدام وسائل التواصل الاجتماعي بحكمه لان لها اثار سلبيه و ايجابيه",
        "يجب استخدام وسائل التواصل الاجتماعي بحكمة ، لأن لها آثارا سلبية وإيجابية .",
    )
    .unwrap();
    let kinds: String = extract_edits(&p, &costs)
        .ops()
        .iter()
        .map(|o| o.kind.letter())
        .collect();
    assert_eq!(kinds, "KKKKKRIRKRRMI");
}

/// Correct words plus a copy where some adjacent words are glued together
/// and some words are broken in two. Words start with distinct letters:
/// on runs of identical tokens ("a a a a aa" against "aa aa aa") the greedy
/// search can commit to a fusion that blocks the optimum.
fn spacing_family() -> impl Strategy<Value = (Vec<String>, Vec<String>)> {
    let words = prop::collection::vec("[abcdef]{1,3}", 1..=4).prop_map(|tails| {
        tails
            .iter()
            .zip(["w", "x", "y", "z"])
            .map(|(t, h)| format!("{h}{t}"))
            .collect::<Vec<_>>()
    });
    (words, prop::collection::vec(0u8..4, 4)).prop_map(|(words, actions)| {
        let mut erroneous: Vec<String> = Vec::new();
        let mut glue_next = false;
        for (w, a) in words.iter().zip(actions) {
            if glue_next {
                erroneous.last_mut().unwrap().push_str(w);
                glue_next = false;
                continue;
            }
            match a {
                0 => glue_next = true,
                1 => {
                    erroneous.push(w[..1].to_string());
                    erroneous.push(w[1..].to_string());
                    continue;
                }
                _ => {}
            }
            erroneous.push(w.clone());
        }
        (erroneous, words)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn spacing_errors_reach_exhaustive_optimum((src, tgt) in spacing_family()) {
        let costs = CostMatrix::arabic();
        let p = pair(&src, &tgt).unwrap();
        let a = extract_edits(&p, &costs);
        let s: Vec<&str> = src.iter().map(String::as_str).collect();
        let t: Vec<&str> = tgt.iter().map(String::as_str).collect();
        prop_assert!((ranked_cost(&a, &costs) - best_with_merges(&s, &t, &costs)).abs() < EPS);
    }
}
