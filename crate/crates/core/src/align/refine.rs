use std::collections::HashMap;

use super::{Alignment, CostMatrix, EditOp, OpKind, EPS};
use crate::corpus::SentencePair;

/// Longest token run a single merge or split may join.
pub const MAX_FUSED_TOKENS: usize = 6;

/// Extra price per additional token joined into a merge or split, the same
/// constant a whole-token insertion or deletion pays. Without it a merge
/// would win every tie against a replace next to a delete.
fn joined_penalty(source_len: usize, target_len: usize, costs: &CostMatrix) -> f64 {
    let extra = source_len.max(1) - 1 + target_len.max(1) - 1;
    extra as f64 * costs.token_constant()
}

fn ranking_cost(op: &EditOp, costs: &CostMatrix) -> f64 {
    match op.kind {
        OpKind::Merge | OpKind::Split => op.cost + joined_penalty(op.source.len(), op.target.len(), costs),
        _ => op.cost,
    }
}

/// Token grid where some merges and splits are fixed: tokens they cover can
/// only be consumed by them, and everything else is aligned one-to-one.
struct Grid<'a> {
    src: &'a [&'a str],
    tgt: &'a [&'a str],
    costs: &'a CostMatrix,
    sub: Vec<f64>,
    del: Vec<f64>,
    ins: Vec<f64>,
    blocked_src: Vec<bool>,
    blocked_tgt: Vec<bool>,
    fixed_from: HashMap<(usize, usize), usize>,
    fixed_to: HashMap<(usize, usize), usize>,
    fixed: &'a [EditOp],
    forward: Vec<f64>,
    backward: Vec<f64>,
}

impl<'a> Grid<'a> {
    fn new(src: &'a [&'a str], tgt: &'a [&'a str], costs: &'a CostMatrix, sub: Vec<f64>, fixed: &'a [EditOp]) -> Self {
        let mut blocked_src = vec![false; src.len()];
        let mut blocked_tgt = vec![false; tgt.len()];
        let mut fixed_from = HashMap::new();
        let mut fixed_to = HashMap::new();
        for (k, op) in fixed.iter().enumerate() {
            op.source.clone().for_each(|i| blocked_src[i] = true);
            op.target.clone().for_each(|j| blocked_tgt[j] = true);
            fixed_from.insert((op.source.start, op.target.start), k);
            fixed_to.insert((op.source.end, op.target.end), k);
        }
        let mut g = Grid {
            src,
            tgt,
            costs,
            sub,
            del: src.iter().map(|w| costs.token_indel(w)).collect(),
            ins: tgt.iter().map(|w| costs.token_indel(w)).collect(),
            blocked_src,
            blocked_tgt,
            fixed_from,
            fixed_to,
            fixed,
            forward: Vec::new(),
            backward: Vec::new(),
        };
        g.fill();
        g
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i * (self.tgt.len() + 1) + j
    }

    /// Moves leaving `(i, j)`: destination and ranking cost.
    fn moves(&self, i: usize, j: usize) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        let (n, m) = (self.src.len(), self.tgt.len());
        let free_s = i < n && !self.blocked_src[i];
        let free_t = j < m && !self.blocked_tgt[j];
        let diag = (free_s && free_t).then(|| ((i + 1, j + 1), self.sub[i * m + j]));
        let del = free_s.then(|| ((i + 1, j), self.del[i]));
        let ins = free_t.then(|| ((i, j + 1), self.ins[j]));
        let fused = self.fixed_from.get(&(i, j)).map(|&k| {
            let op = &self.fixed[k];
            ((op.source.end, op.target.end), ranking_cost(op, self.costs))
        });
        diag.into_iter().chain(del).chain(ins).chain(fused)
    }

    fn fill(&mut self) {
        let (n, m) = (self.src.len(), self.tgt.len());
        let size = (n + 1) * (m + 1);
        let mut forward = vec![f64::INFINITY; size];
        forward[0] = 0.0;
        for i in 0..=n {
            for j in 0..=m {
                let here = forward[self.at(i, j)];
                if here.is_infinite() {
                    continue;
                }
                for ((a, b), c) in self.moves(i, j) {
                    let k = self.at(a, b);
                    forward[k] = forward[k].min(here + c);
                }
            }
        }
        let mut backward = vec![f64::INFINITY; size];
        backward[size - 1] = 0.0;
        for i in (0..=n).rev() {
            for j in (0..=m).rev() {
                let best = self
                    .moves(i, j)
                    .map(|((a, b), c)| c + backward[self.at(a, b)])
                    .fold(backward[self.at(i, j)], f64::min);
                let k = self.at(i, j);
                backward[k] = best;
            }
        }
        self.forward = forward;
        self.backward = backward;
    }

    fn total(&self) -> f64 {
        self.forward[self.forward.len() - 1]
    }

    /// Optimal alignment through the fixed ops. Ties prefer, walking back
    /// from the end, a diagonal move, then a deletion, then an insertion.
    fn alignment(&self) -> Alignment {
        let f = |i: usize, j: usize| self.forward[self.at(i, j)];
        let (mut i, mut j) = (self.src.len(), self.tgt.len());
        let mut ops = Vec::new();
        while i > 0 || j > 0 {
            let here = f(i, j);
            if let Some(&k) = self.fixed_to.get(&(i, j)) {
                let op = self.fixed[k].clone();
                (i, j) = (op.source.start, op.target.start);
                ops.push(op);
                continue;
            }
            let m = self.tgt.len();
            let can_s = i > 0 && !self.blocked_src[i - 1];
            let can_t = j > 0 && !self.blocked_tgt[j - 1];
            if can_s && can_t {
                let c = self.sub[(i - 1) * m + j - 1];
                if (f(i - 1, j - 1) + c - here).abs() <= EPS {
                    let kind = if self.src[i - 1] == self.tgt[j - 1] {
                        OpKind::Keep
                    } else {
                        OpKind::Replace
                    };
                    ops.push(EditOp::new(kind, i - 1..i, j - 1..j, c));
                    (i, j) = (i - 1, j - 1);
                    continue;
                }
            }
            if can_s && (!can_t || (f(i - 1, j) + self.del[i - 1] - here).abs() <= EPS) {
                ops.push(EditOp::new(OpKind::Delete, i - 1..i, j..j, self.del[i - 1]));
                i -= 1;
                continue;
            }
            ops.push(EditOp::new(OpKind::Insert, i..i, j - 1..j, self.ins[j - 1]));
            j -= 1;
        }
        ops.reverse();
        Alignment::new(ops)
    }
}

struct Candidate {
    op: EditOp,
    total: f64,
}

/// Cheapest full alignment that adds one new merge or split to the grid.
/// Among equally cheap alignments the fusion that is itself cheapest wins,
/// then the leftmost, then the shorter.
fn best_candidate(
    grid: &Grid,
    bound: f64,
    fused_cost: &mut HashMap<(usize, usize, usize, usize), f64>,
) -> Option<Candidate> {
    let (n, m) = (grid.src.len(), grid.tgt.len());
    let costs = grid.costs;
    let mut best: Option<Candidate> = None;
    for i in 0..n {
        for j in 0..m {
            let before = grid.forward[grid.at(i, j)];
            if before.is_infinite() || grid.blocked_src[i] || grid.blocked_tgt[j] {
                continue;
            }
            let merges = (2..=MAX_FUSED_TOKENS.min(n - i)).map(|k| (i + k, j + 1));
            let splits = (2..=MAX_FUSED_TOKENS.min(m - j)).map(|k| (i + 1, j + k));
            for (ie, je) in merges.chain(splits) {
                if grid.blocked_src[i..ie].iter().any(|&b| b) || grid.blocked_tgt[j..je].iter().any(|&b| b) {
                    continue;
                }
                let penalty = joined_penalty(ie - i, je - j, costs);
                let floor = before + penalty + grid.backward[grid.at(ie, je)];
                let limit = best.as_ref().map_or(bound - EPS, |b| b.total + EPS);
                if floor >= limit {
                    continue;
                }
                let cost = *fused_cost
                    .entry((i, ie, j, je))
                    .or_insert_with(|| costs.distance(&grid.src[i..ie].concat(), &grid.tgt[j..je].concat()));
                let total = floor + cost;
                let better = match &best {
                    None => total < bound - EPS,
                    Some(b) => total < b.total - EPS || (total <= b.total + EPS && cost < b.op.cost - EPS),
                };
                if better {
                    let kind = if ie - i >= 2 { OpKind::Merge } else { OpKind::Split };
                    best = Some(Candidate {
                        op: EditOp::new(kind, i..ie, j..je, cost),
                        total,
                    });
                }
            }
        }
    }
    best
}

/// Greedily introduces merges (many source tokens to one target token) and
/// splits (one to many) while any of them lowers the overall cost.
///
/// A merge or split is priced as the distance between the separator-free
/// concatenations of its two sides. Each pass adds the single fusion that
/// gives the cheapest complete alignment, keeping earlier fusions and
/// realigning the remaining tokens one-to-one around them. An input with no
/// improving fusion is returned unchanged.
pub fn refine_merge_split(pair: &SentencePair, alignment: &Alignment, costs: &CostMatrix) -> Alignment {
    let src: Vec<&str> = pair.source.words().collect();
    let tgt: Vec<&str> = pair.target.words().collect();
    let m = tgt.len();
    let mut sub = vec![0.0; src.len() * m];
    for (i, s) in src.iter().enumerate() {
        for (j, t) in tgt.iter().enumerate() {
            sub[i * m + j] = costs.distance(s, t);
        }
    }
    let mut fixed: Vec<EditOp> = alignment
        .ops()
        .iter()
        .filter(|o| matches!(o.kind, OpKind::Merge | OpKind::Split))
        .cloned()
        .collect();
    let mut current = alignment.clone();
    let mut bound: f64 = alignment.ops().iter().map(|o| ranking_cost(o, costs)).sum();
    let mut fused_cost = HashMap::new();
    loop {
        let grid = Grid::new(&src, &tgt, costs, sub.clone(), &fixed);
        let Some(c) = best_candidate(&grid, bound, &mut fused_cost) else {
            break;
        };
        fixed.push(c.op);
        fixed.sort_by_key(|o| o.source.start);
        let grid = Grid::new(&src, &tgt, costs, sub.clone(), &fixed);
        debug_assert!((grid.total() - c.total).abs() < 1e-6);
        bound = grid.total();
        current = grid.alignment();
    }
    current
}
