use super::{Alignment, CostMatrix, EditOp, OpKind, EPS};
use crate::corpus::SentencePair;

/// Minimal-cost monotone alignment using keep, replace, insert and delete.
///
/// Replacing costs the weighted character distance of the two tokens;
/// inserting or deleting a token costs [`CostMatrix::token_indel`]. The
/// backtrace prefers a diagonal move, then a deletion, then an insertion.
pub fn align_basic(pair: &SentencePair, costs: &CostMatrix) -> Alignment {
    let src: Vec<&str> = pair.source.words().collect();
    let tgt: Vec<&str> = pair.target.words().collect();
    let (n, m) = (src.len(), tgt.len());
    let width = m + 1;

    let del: Vec<f64> = src.iter().map(|w| costs.token_indel(w)).collect();
    let ins: Vec<f64> = tgt.iter().map(|w| costs.token_indel(w)).collect();
    let mut sub = vec![0.0; n * m];
    for (i, s) in src.iter().enumerate() {
        for (j, t) in tgt.iter().enumerate() {
            sub[i * m + j] = costs.distance(s, t);
        }
    }

    let mut dp = vec![0.0; (n + 1) * width];
    for j in 1..=m {
        dp[j] = dp[j - 1] + ins[j - 1];
    }
    for i in 1..=n {
        dp[i * width] = dp[(i - 1) * width] + del[i - 1];
        for j in 1..=m {
            let diag = dp[(i - 1) * width + j - 1] + sub[(i - 1) * m + j - 1];
            let up = dp[(i - 1) * width + j] + del[i - 1];
            let left = dp[i * width + j - 1] + ins[j - 1];
            dp[i * width + j] = diag.min(up).min(left);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * width + j];
        if i > 0 && j > 0 {
            let c = sub[(i - 1) * m + j - 1];
            if (dp[(i - 1) * width + j - 1] + c - here).abs() <= EPS {
                let kind = if src[i - 1] == tgt[j - 1] {
                    OpKind::Keep
                } else {
                    OpKind::Replace
                };
                ops.push(EditOp::new(kind, i - 1..i, j - 1..j, c));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && (j == 0 || (dp[(i - 1) * width + j] + del[i - 1] - here).abs() <= EPS) {
            ops.push(EditOp::new(OpKind::Delete, i - 1..i, j..j, del[i - 1]));
            i -= 1;
            continue;
        }
        ops.push(EditOp::new(OpKind::Insert, i..i, j - 1..j, ins[j - 1]));
        j -= 1;
    }
    ops.reverse();
    Alignment::new(ops)
}
