//! Exhaustive search for weak degeneracy witnesses.
//!
//! States are bitmasks over at most 128 vertices. Failed states are
//! memoised by (remaining set, weights on the remaining set); the embedding
//! plays no part since the operations only see the abstract graph.

use std::collections::{BTreeSet, HashSet};

use crate::graph::{PlaneGraph, Vertex};
use crate::ops::{removes_all, Operation, OpSequence, WeightFn};

pub const MAX_VERTICES: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(OpSequence),
    ExhaustedNo,
    BudgetExceeded,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub node_budget: u64,
    /// Disables every pruning rule except the failed-state memo.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_budget: 1_000_000, prune: true }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub memo_hits: u64,
}

/// Decides whether `g` is weakly `f`-degenerate, pruning enabled.
pub fn exact_weakly_degenerate(g: &PlaneGraph, f: &WeightFn, node_budget: u64) -> SearchOutcome {
    exact_search(g, f, SearchOptions { node_budget, prune: true }).0
}

pub fn exact_search(g: &PlaneGraph, f: &WeightFn, opts: SearchOptions) -> (SearchOutcome, SearchStats) {
    let ids: Vec<Vertex> = g.vertices().collect();
    if ids.len() > MAX_VERTICES || ids.iter().any(|&v| !f.contains(v)) {
        // missing weights are undefined input; callers validate first
        return (SearchOutcome::BudgetExceeded, SearchStats::default());
    }
    let mut index = vec![usize::MAX; g.capacity()];
    for (i, &v) in ids.iter().enumerate() {
        index[v] = i;
    }
    let adj: Vec<u128> = ids
        .iter()
        .map(|&v| g.neighbors(v).iter().fold(0u128, |m, &w| m | (1u128 << index[w])))
        .collect();
    let mut s = Searcher {
        adj,
        opts,
        stats: SearchStats::default(),
        memo: HashSet::new(),
        aborted: false,
    };
    let full = if ids.len() == 128 { u128::MAX } else { (1u128 << ids.len()) - 1 };
    let vals: Vec<i64> = ids.iter().map(|&v| f[v]).collect();
    let mut path = Vec::new();
    let found = s.dfs(full, vals, &mut path);
    let outcome = if found {
        let seq: OpSequence = path
            .into_iter()
            .map(|op| match op {
                Op::Del(v) => Operation::Del(ids[v]),
                Op::Save(v, w) => Operation::DelSave(ids[v], ids[w]),
            })
            .collect();
        assert!(removes_all(g, f, &seq), "search produced an invalid witness");
        SearchOutcome::Found(seq)
    } else if s.aborted {
        SearchOutcome::BudgetExceeded
    } else {
        SearchOutcome::ExhaustedNo
    };
    (outcome, s.stats)
}

#[derive(Clone, Copy)]
enum Op {
    Del(usize),
    Save(usize, usize),
}

struct Searcher {
    adj: Vec<u128>,
    opts: SearchOptions,
    stats: SearchStats,
    memo: HashSet<(u128, Vec<i64>)>,
    aborted: bool,
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

impl Searcher {
    fn deg(&self, alive: u128, v: usize) -> i64 {
        (self.adj[v] & alive).count_ones() as i64
    }

    /// Removes `v` and decrements its neighbours except `saved`.
    fn remove(&self, alive: u128, f: &mut [i64], v: usize, saved: Option<usize>) -> u128 {
        let rest = alive & !(1u128 << v);
        for u in bits(self.adj[v] & rest) {
            if Some(u) != saved {
                f[u] -= 1;
            }
        }
        rest
    }

    fn dfs(&mut self, alive: u128, mut f: Vec<i64>, path: &mut Vec<Op>) -> bool {
        self.stats.nodes += 1;
        if self.stats.nodes > self.opts.node_budget {
            self.aborted = true;
            return false;
        }
        if alive == 0 {
            return true;
        }
        let mut alive = alive;
        // A vertex with f(v) >= deg(v) can always go last: removing the rest
        // of the graph never drives it negative.
        let mut deferred = Vec::new();
        if self.opts.prune {
            loop {
                let Some(v) = bits(alive).find(|&v| f[v] >= self.deg(alive, v)) else { break };
                deferred.push(v);
                alive &= !(1u128 << v);
            }
            if alive == 0 {
                path.extend(deferred.iter().rev().map(|&v| Op::Del(v)));
                return true;
            }
        }
        let key = (alive, bits(alive).map(|v| f[v]).collect::<Vec<_>>());
        if self.memo.contains(&key) {
            self.stats.memo_hits += 1;
            return false;
        }
        if bits(alive).any(|v| f[v] < 0) {
            self.memo.insert(key);
            return false;
        }
        let mut ops = Vec::new();
        for v in bits(alive) {
            let nb = self.adj[v] & alive & !(1u128 << v);
            let low: Vec<usize> = bits(nb).filter(|&u| f[u] < 1).collect();
            let del_ok = low.is_empty();
            let mut saves = Vec::new();
            for w in bits(nb) {
                if f[v] <= f[w] || low.iter().any(|&u| u != w) {
                    continue;
                }
                if self.opts.prune && del_ok && f[w] >= self.deg(alive, w) {
                    continue;
                }
                saves.push(Op::Save(v, w));
            }
            if del_ok && !(self.opts.prune && !saves.is_empty()) {
                ops.push(Op::Del(v));
            }
            ops.extend(saves);
        }
        // Del before DelSave, each by vertex id
        ops.sort_by_key(|op| match *op {
            Op::Del(v) => (0, v, 0),
            Op::Save(v, w) => (1, v, w),
        });
        let base = path.len();
        for op in ops {
            let (v, saved) = match op {
                Op::Del(v) => (v, None),
                Op::Save(v, w) => (v, Some(w)),
            };
            let mut g = f.clone();
            let rest = self.remove(alive, &mut g, v, saved);
            path.push(op);
            if self.dfs(rest, g, path) {
                for &d in deferred.iter().rev() {
                    path.push(Op::Del(d));
                }
                return true;
            }
            path.truncate(base);
            if self.aborted {
                return false;
            }
        }
        f.clear();
        self.memo.insert(key);
        false
    }
}

/// Least k such that every subgraph has a vertex of degree at most k.
pub fn classic_degeneracy(g: &PlaneGraph) -> usize {
    let mut deg: Vec<usize> = (0..g.capacity()).map(|v| if g.contains(v) { g.degree(v) } else { 0 }).collect();
    let mut alive: BTreeSet<Vertex> = g.vertices().collect();
    let mut best = 0;
    while let Some(&v) = alive.iter().min_by_key(|&&v| (deg[v], v)) {
        best = best.max(deg[v]);
        alive.remove(&v);
        for &w in g.neighbors(v) {
            if alive.contains(&w) {
                deg[w] -= 1;
            }
        }
    }
    best
}

/// Least d with `g` weakly d-degenerate, or `None` when the budget runs out.
pub fn weak_degeneracy_number(g: &PlaneGraph, node_budget: u64) -> Option<usize> {
    let top = classic_degeneracy(g);
    for d in 0..top {
        match exact_weakly_degenerate(g, &WeightFn::constant(g, d as i64), node_budget) {
            SearchOutcome::Found(_) => return Some(d),
            SearchOutcome::ExhaustedNo => {}
            SearchOutcome::BudgetExceeded => return None,
        }
    }
    Some(top)
}
