//! Del / DelSave, legality, sequence execution, availability and lifting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{PlaneGraph, Vertex};

/// Integer weights on vertices. Negative values are allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightFn(BTreeMap<Vertex, i64>);

impl WeightFn {
    pub fn new() -> Self {
        WeightFn(BTreeMap::new())
    }

    pub fn constant(g: &PlaneGraph, value: i64) -> Self {
        WeightFn(g.vertices().map(|v| (v, value)).collect())
    }

    pub fn get(&self, v: Vertex) -> Option<i64> {
        self.0.get(&v).copied()
    }

    pub fn set(&mut self, v: Vertex, value: i64) {
        self.0.insert(v, value);
    }

    pub fn remove(&mut self, v: Vertex) -> Option<i64> {
        self.0.remove(&v)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains_key(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, i64)> + '_ {
        self.0.iter().map(|(&v, &x)| (v, x))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy restricted to the vertices of `g`.
    pub fn restrict(&self, g: &PlaneGraph) -> WeightFn {
        WeightFn(self.0.iter().filter(|(v, _)| g.contains(**v)).map(|(&v, &x)| (v, x)).collect())
    }

    /// True when the domain is exactly V(g).
    pub fn covers_exactly(&self, g: &PlaneGraph) -> bool {
        self.0.len() == g.num_vertices() && g.vertices().all(|v| self.0.contains_key(&v))
    }

    /// Pointwise `self >= other` on the domain of `other`.
    pub fn dominates(&self, other: &WeightFn) -> bool {
        other.iter().all(|(v, x)| self.get(v).is_some_and(|y| y >= x))
    }
}

impl std::ops::Index<Vertex> for WeightFn {
    type Output = i64;
    fn index(&self, v: Vertex) -> &i64 {
        self.0.get(&v).unwrap_or_else(|| panic!("weight of vertex {v} is undefined"))
    }
}

impl FromIterator<(Vertex, i64)> for WeightFn {
    fn from_iter<I: IntoIterator<Item = (Vertex, i64)>>(iter: I) -> Self {
        WeightFn(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operation {
    Del(Vertex),
    DelSave(Vertex, Vertex),
}

impl Operation {
    /// The vertex this operation removes.
    pub fn vertex(&self) -> Vertex {
        match *self {
            Operation::Del(v) | Operation::DelSave(v, _) => v,
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operation::Del(v) => write!(f, "del {v}"),
            Operation::DelSave(v, w) => write!(f, "delsave {v} {w}"),
        }
    }
}

pub type OpSequence = Vec<Operation>;

/// Why a single operation is illegal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Illegal {
    #[error("neighbour {0} would drop below zero")]
    NegativeNeighbour(Vertex),
    #[error("vertex {0} already has a negative value")]
    NegativeVertex(Vertex),
    #[error("vertex {0} has no weight")]
    Undefined(Vertex),
    #[error("save requires f({v}) = {fv} > f({w}) = {fw}")]
    SaveInequality { v: Vertex, w: Vertex, fv: i64, fw: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} ({op}) is illegal: {reason}")]
pub struct SequenceError {
    pub index: usize,
    pub op: Operation,
    pub reason: Illegal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("operation {0} is illegal: {1}")]
    Illegal(Operation, Illegal),
    #[error("operation {0} removes no vertex")]
    Trivial(Operation),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("lifted weights must dominate the original weights")]
    NotDominating,
    #[error("weight function does not cover vertex {0}")]
    MissingWeight(Vertex),
    #[error("sequence does not remove every vertex")]
    Incomplete,
}

/// Adjacency-only simulator used to fold sequences without rebuilding
/// embeddings at every step.
#[derive(Debug, Clone)]
pub struct Simulator {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
    f: BTreeMap<Vertex, i64>,
    negative: BTreeSet<Vertex>,
}

impl Simulator {
    /// Starts from `g` minus `exclude`, with weights taken from `f`.
    pub fn new(g: &PlaneGraph, f: &WeightFn, exclude: &BTreeSet<Vertex>) -> Result<Self, OpError> {
        let mut adj = BTreeMap::new();
        let mut fm = BTreeMap::new();
        for v in g.vertices().filter(|v| !exclude.contains(v)) {
            adj.insert(v, g.neighbors(v).iter().copied().filter(|w| !exclude.contains(w)).collect());
            fm.insert(v, f.get(v).ok_or(OpError::MissingWeight(v))?);
        }
        let negative = fm.iter().filter(|(_, &x)| x < 0).map(|(&v, _)| v).collect();
        Ok(Simulator { adj, f: fm, negative })
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn value(&self, v: Vertex) -> Option<i64> {
        self.f.get(&v).copied()
    }

    pub fn remaining(&self) -> BTreeSet<Vertex> {
        self.adj.keys().copied().collect()
    }

    pub fn weights(&self) -> WeightFn {
        self.f.iter().map(|(&v, &x)| (v, x)).collect()
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    /// The vertex whose value is protected, if the op really saves one.
    fn saved(&self, op: Operation) -> Option<Vertex> {
        match op {
            Operation::DelSave(v, w) if self.adj.get(&v).is_some_and(|s| s.contains(&w)) => Some(w),
            _ => None,
        }
    }

    pub fn check(&self, op: Operation) -> Result<(), Illegal> {
        let v = op.vertex();
        let Some(nbrs) = self.adj.get(&v) else {
            return Ok(());
        };
        let saved = self.saved(op);
        if let Some(w) = saved {
            let (fv, fw) = (self.f[&v], self.f[&w]);
            if fv <= fw {
                return Err(Illegal::SaveInequality { v, w, fv, fw });
            }
        }
        // weights live in the naturals: a negative value anywhere blocks everything
        if let Some(&u) = self.negative.first() {
            return Err(Illegal::NegativeVertex(u));
        }
        for &u in nbrs {
            if Some(u) != saved && self.f[&u] - 1 < 0 {
                return Err(Illegal::NegativeNeighbour(u));
            }
        }
        Ok(())
    }

    /// Applies `op` regardless of legality.
    pub fn apply(&mut self, op: Operation) {
        let v = op.vertex();
        let saved = self.saved(op);
        let Some(nbrs) = self.adj.remove(&v) else {
            return;
        };
        self.f.remove(&v);
        self.negative.remove(&v);
        for u in nbrs {
            self.adj.get_mut(&u).expect("symmetric").remove(&v);
            if Some(u) != saved {
                let x = self.f.get_mut(&u).expect("weight");
                *x -= 1;
                if *x < 0 {
                    self.negative.insert(u);
                }
            }
        }
    }

    pub fn step(&mut self, op: Operation) -> Result<(), Illegal> {
        self.check(op)?;
        self.apply(op);
        Ok(())
    }

    pub fn run(&mut self, seq: &[Operation]) -> Result<(), SequenceError> {
        for (index, &op) in seq.iter().enumerate() {
            self.step(op).map_err(|reason| SequenceError { index, op, reason })?;
        }
        Ok(())
    }

    /// Availability of a legal op that removes a vertex.
    pub fn availability(&self, op: Operation) -> Result<i64, OpError> {
        if !self.contains(op.vertex()) {
            return Err(OpError::Trivial(op));
        }
        self.check(op).map_err(|e| OpError::Illegal(op, e))?;
        let v = op.vertex();
        Ok(match self.saved(op) {
            Some(w) => self.f[&v] - self.f[&w],
            None => self.f[&v] + 1,
        })
    }
}

fn apply_op(g: &PlaneGraph, f: &WeightFn, op: Operation) -> (PlaneGraph, WeightFn) {
    let v = op.vertex();
    if !g.contains(v) {
        return (g.clone(), f.clone());
    }
    let saved = match op {
        Operation::DelSave(_, w) if g.has_edge(v, w) => Some(w),
        _ => None,
    };
    let mut f2 = f.clone();
    f2.remove(v);
    for &u in g.neighbors(v) {
        if Some(u) != saved {
            if let Some(x) = f2.get(u) {
                f2.set(u, x - 1);
            }
        }
    }
    (g.remove_vertex(v), f2)
}

/// `Del(v)`; the identity when `v` is absent.
pub fn apply_del(g: &PlaneGraph, f: &WeightFn, v: Vertex) -> (PlaneGraph, WeightFn) {
    apply_op(g, f, Operation::Del(v))
}

/// `DelSave(v, w)`; behaves as `Del(v)` when `w` is not a neighbour of `v`.
pub fn apply_delsave(g: &PlaneGraph, f: &WeightFn, v: Vertex, w: Vertex) -> (PlaneGraph, WeightFn) {
    apply_op(g, f, Operation::DelSave(v, w))
}

pub fn apply(g: &PlaneGraph, f: &WeightFn, op: Operation) -> (PlaneGraph, WeightFn) {
    apply_op(g, f, op)
}

pub fn is_legal(g: &PlaneGraph, f: &WeightFn, op: Operation) -> bool {
    legality(g, f, op).is_ok()
}

pub fn legality(g: &PlaneGraph, f: &WeightFn, op: Operation) -> Result<(), Illegal> {
    match Simulator::new(g, f, &BTreeSet::new()) {
        Ok(sim) => sim.check(op),
        Err(OpError::MissingWeight(u)) => Err(Illegal::Undefined(u)),
        Err(_) => Err(Illegal::Undefined(op.vertex())),
    }
}

/// Folds `seq` from `(g, f)`, stopping at the first illegal step.
pub fn run_sequence(
    g: &PlaneGraph,
    f: &WeightFn,
    seq: &[Operation],
) -> Result<(PlaneGraph, WeightFn), OpError> {
    let mut sim = Simulator::new(g, f, &BTreeSet::new())?;
    sim.run(seq)?;
    let rest = sim.remaining();
    Ok((g.induced(&rest), sim.weights()))
}

/// True iff `seq` is legal from `(g, f)` and leaves no vertex.
pub fn removes_all(g: &PlaneGraph, f: &WeightFn, seq: &[Operation]) -> bool {
    match Simulator::new(g, f, &BTreeSet::new()) {
        Ok(mut sim) => sim.run(seq).is_ok() && sim.is_empty(),
        Err(_) => false,
    }
}

/// `f(v)+1` for Del, `f(v)-f(w)` for a real DelSave. Illegal ops and ops on
/// absent vertices are refused.
pub fn availability(g: &PlaneGraph, f: &WeightFn, op: Operation) -> Result<i64, OpError> {
    let sim = Simulator::new(g, f, &BTreeSet::new())?;
    sim.availability(op)
}

/// Geometric mean of availabilities kept exactly as `(product, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageAvailability {
    pub product: BigUint,
    pub n: usize,
    pub availabilities: Vec<i64>,
    log_sum: f64,
}

impl AverageAvailability {
    /// `product^(1/n)`, 1 for an empty sequence.
    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            1.0
        } else {
            (self.log_sum / self.n as f64).exp()
        }
    }
}

/// Availabilities along a legal sequence. Steps that remove nothing (absent
/// vertex) have no availability and are skipped.
pub fn average_availability(
    g: &PlaneGraph,
    f: &WeightFn,
    seq: &[Operation],
) -> Result<AverageAvailability, OpError> {
    let mut sim = Simulator::new(g, f, &BTreeSet::new())?;
    let mut product = BigUint::from(1u32);
    let mut availabilities = Vec::new();
    let mut log_sum = 0.0;
    for (index, &op) in seq.iter().enumerate() {
        sim.check(op).map_err(|reason| SequenceError { index, op, reason })?;
        if sim.contains(op.vertex()) {
            let a = sim.availability(op)?;
            product *= BigUint::from(a as u64);
            log_sum += (a as f64).ln();
            availabilities.push(a);
        }
        sim.apply(op);
    }
    Ok(AverageAvailability { product, n: availabilities.len(), availabilities, log_sum })
}

/// Rewrites a sequence legal for `f` into one legal for `f_up >= f` by turning
/// saves that became illegal into plain deletions.
pub fn lift_sequence(
    g: &PlaneGraph,
    f: &WeightFn,
    f_up: &WeightFn,
    seq: &[Operation],
) -> Result<OpSequence, OpError> {
    lift_on(g, f, f_up, seq, &BTreeSet::new())
}

/// `lift_sequence` on `g - exclude`.
pub(crate) fn lift_on(
    g: &PlaneGraph,
    f: &WeightFn,
    f_up: &WeightFn,
    seq: &[Operation],
    exclude: &BTreeSet<Vertex>,
) -> Result<OpSequence, OpError> {
    let mut low = Simulator::new(g, f, exclude)?;
    let mut high = Simulator::new(g, f_up, exclude)?;
    for v in low.remaining() {
        if high.value(v) < low.value(v) {
            return Err(OpError::NotDominating);
        }
    }
    let mut out = Vec::with_capacity(seq.len());
    for (index, &op) in seq.iter().enumerate() {
        low.step(op).map_err(|reason| SequenceError { index, op, reason })?;
        let lifted = match op {
            Operation::DelSave(v, _) if high.check(op).is_err() => Operation::Del(v),
            other => other,
        };
        high.step(lifted).map_err(|reason| SequenceError { index, op: lifted, reason })?;
        out.push(lifted);
    }
    Ok(out)
}
