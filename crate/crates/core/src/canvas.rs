//! Canvases: a plane graph with a precoloured boundary path `P`, two
//! independent boundary sets `A` and `B`, and weights `f`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{Girth, PlaneGraph, Vertex};
use crate::ops::WeightFn;
use crate::search::{exact_weakly_degenerate, SearchOutcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canvas {
    pub g: PlaneGraph,
    pub p: Vec<Vertex>,
    pub a: BTreeSet<Vertex>,
    pub b: BTreeSet<Vertex>,
    pub f: WeightFn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4a,
    C4b,
    C4c,
    C4d,
    C4e,
    /// Input that is not even shaped like a canvas (missing weights, unknown ids).
    Structure,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3 => "C3",
            Condition::C4a => "C4a",
            Condition::C4b => "C4b",
            Condition::C4c => "C4c",
            Condition::C4d => "C4d",
            Condition::C4e => "C4e",
            Condition::Structure => "structure",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub vertex: Option<Vertex>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.vertex {
            Some(v) => write!(f, "{} at {}: {}", self.condition, v, self.detail),
            None => write!(f, "{}: {}", self.condition, self.detail),
        }
    }
}

/// Exceptional configurations, with least witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExceptionType {
    /// A `B` vertex adjacent to all three vertices of `P`.
    X1 { v: Vertex },
    /// An `A` vertex adjacent to both ends of a 4-vertex `P`.
    X2 { v: Vertex },
    /// `v1` in `B` adjacent to `u1, u2`; `v2` in `A` adjacent to `u4, v1`.
    /// `reversed` means the pattern matched with `P` read backwards.
    X3 { v1: Vertex, v2: Vertex, reversed: bool },
}

impl fmt::Display for ExceptionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExceptionType::X1 { v } => write!(f, "X1 {v}"),
            ExceptionType::X2 { v } => write!(f, "X2 {v}"),
            ExceptionType::X3 { v1, v2, reversed } => {
                write!(f, "X3 {v1} {v2}{}", if *reversed { " reversed" } else { "" })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanvasError {
    #[error("not a canvas: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotACanvas(Vec<Violation>),
}

fn girth_ok_a3(g2: Girth, g3: Girth) -> bool {
    (g2.at_least(4) && g3.at_least(4)) || g2.at_least(5) || g3.at_least(5)
}

/// True when `p` read as a path is acceptable: at most 4 distinct vertices of
/// `g` inducing exactly that path, and a 4-path has internal girths that
/// are both at least 4 or one at least 5.
pub fn is_acceptable_path(g: &PlaneGraph, p: &[Vertex]) -> bool {
    if p.len() > 4 || !induces_path(g, p) {
        return false;
    }
    if p.len() == 4 {
        let gi = |v| g.girth_of_vertex(v).expect("present");
        return girth_ok_a3(gi(p[1]), gi(p[2]));
    }
    true
}

fn induces_path(g: &PlaneGraph, p: &[Vertex]) -> bool {
    let set: BTreeSet<Vertex> = p.iter().copied().collect();
    if set.len() != p.len() || p.iter().any(|&v| !g.contains(v)) {
        return false;
    }
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if g.has_edge(p[i], p[j]) != (j == i + 1) {
                return false;
            }
        }
    }
    true
}

/// Whether `p` closes up into a cycle (at least 3 vertices, ends adjacent).
pub fn is_cycle(g: &PlaneGraph, p: &[Vertex]) -> bool {
    p.len() >= 3 && g.contains(p[0]) && g.contains(p[p.len() - 1]) && g.has_edge(p[0], p[p.len() - 1])
}

/// Rotations and reflections of a cycle, each read as a spanning path.
pub fn cycle_spanning_paths(p: &[Vertex]) -> Vec<Vec<Vertex>> {
    let k = p.len();
    let mut out = Vec::new();
    for s in 0..k {
        out.push((0..k).map(|i| p[(s + i) % k]).collect());
        out.push((0..k).map(|i| p[(s + k - i) % k]).collect());
    }
    out
}

/// Acceptability for a path, or for a cycle via some spanning path. The
/// cycle's closing edge is ignored when checking that the spanning path is
/// induced, since otherwise no cycle could qualify.
pub fn is_acceptable(g: &PlaneGraph, p: &[Vertex]) -> bool {
    if !is_cycle(g, p) {
        return is_acceptable_path(g, p);
    }
    let k = p.len();
    if k > 4 {
        return false;
    }
    let set: BTreeSet<Vertex> = p.iter().copied().collect();
    if set.len() != k {
        return false;
    }
    // the cycle itself must be induced
    for i in 0..k {
        for j in i + 1..k {
            let consecutive = j == i + 1 || (i == 0 && j == k - 1);
            if g.has_edge(p[i], p[j]) != consecutive {
                return false;
            }
        }
    }
    if k == 3 {
        return true;
    }
    let gi = |v| g.girth_of_vertex(v).expect("present");
    cycle_spanning_paths(p).iter().any(|q| girth_ok_a3(gi(q[1]), gi(q[2])))
}

pub(crate) struct Shape {
    pub(crate) girths: Vec<Girth>,
    pub(crate) bd: BTreeSet<Vertex>,
    pub(crate) bedges: BTreeSet<(Vertex, Vertex)>,
}

impl Canvas {
    pub fn new(g: PlaneGraph, p: Vec<Vertex>, a: BTreeSet<Vertex>, b: BTreeSet<Vertex>, f: WeightFn) -> Self {
        Canvas { g, p, a, b, f }
    }

    pub fn p_set(&self) -> BTreeSet<Vertex> {
        self.p.iter().copied().collect()
    }

    pub fn p_is_cycle(&self) -> bool {
        is_cycle(&self.g, &self.p)
    }

    /// `G - P`.
    pub fn rest(&self) -> PlaneGraph {
        self.g.remove_vertices(&self.p_set())
    }

    /// `A` restricted to the graph and away from `P`.
    pub fn a_eff(&self) -> BTreeSet<Vertex> {
        let ps = self.p_set();
        self.a.iter().copied().filter(|&v| self.g.contains(v) && !ps.contains(&v)).collect()
    }

    /// `B` restricted to the graph, away from `P`, and to girth-3 vertices.
    /// A `B` vertex whose girth grew past 3 in a subgraph is dropped.
    pub fn b_eff(&self) -> BTreeSet<Vertex> {
        self.b_eff_with(&self.g.girths_up_to(4))
    }

    /// Girth classes and outer boundary of `g`, for reuse across checks.
    pub(crate) fn shape(&self) -> Shape {
        Shape { girths: self.g.girths_up_to(4), bd: self.g.boundary_vertices(), bedges: self.g.boundary_edges() }
    }

    pub(crate) fn b_eff_with(&self, girths: &[Girth]) -> BTreeSet<Vertex> {
        let ps = self.p_set();
        self.b
            .iter()
            .copied()
            .filter(|&v| self.g.contains(v) && !ps.contains(&v) && girths[v].is(3))
            .collect()
    }

    /// Smallest weight C4 allows on a vertex outside `P`.
    pub fn min_weight(&self, v: Vertex, girth: Girth, boundary: bool, a: &BTreeSet<Vertex>, b: &BTreeSet<Vertex>) -> i64 {
        if a.contains(&v) {
            1
        } else if b.contains(&v) {
            2
        } else if boundary {
            if girth.is(3) {
                3
            } else {
                2
            }
        } else {
            crate::local_girth::local_girth_value(girth)
        }
    }

    /// The pointwise least weights satisfying C4 on `G - P` (same as `f` on `P`).
    pub fn minimal_f(&self) -> WeightFn {
        self.minimal_f_with(&self.shape())
    }

    pub(crate) fn minimal_f_with(&self, shape: &Shape) -> WeightFn {
        let (girths, bd) = (&shape.girths, &shape.bd);
        let ps = self.p_set();
        let (a, b) = (self.a_eff(), self.b_eff_with(girths));
        let mut out = WeightFn::new();
        for v in self.g.vertices() {
            if ps.contains(&v) {
                if let Some(x) = self.f.get(v) {
                    out.set(v, x);
                }
            } else {
                out.set(v, self.min_weight(v, girths[v], bd.contains(&v), &a, &b));
            }
        }
        out
    }

    pub fn validate(&self) -> Vec<Violation> {
        self.validate_with(&self.shape())
    }

    pub(crate) fn validate_with(&self, shape: &Shape) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |condition, vertex, detail: String| out.push(Violation { condition, vertex, detail });
        for &v in &self.p {
            if !self.g.contains(v) {
                push(Condition::Structure, Some(v), "P vertex not in G".into());
            }
        }
        for v in self.g.vertices() {
            if !self.p.contains(&v) && !self.f.contains(v) {
                push(Condition::Structure, Some(v), "no weight".into());
            }
        }
        if !out.is_empty() {
            return out;
        }
        let (girths, bd, bedges) = (&shape.girths, &shape.bd, &shape.bedges);
        let ps = self.p_set();
        let mut push = |condition, vertex, detail: String| out.push(Violation { condition, vertex, detail });

        // C1
        for &v in &self.p {
            if !bd.contains(&v) {
                push(Condition::C1, Some(v), "P vertex not on the outer boundary".into());
            }
        }
        let k = self.p.len();
        let mut pedges: Vec<(Vertex, Vertex)> = self.p.windows(2).map(|w| (w[0], w[1])).collect();
        if self.p_is_cycle() {
            pedges.push((self.p[k - 1], self.p[0]));
        }
        for (x, y) in pedges {
            if self.g.has_edge(x, y) && !bedges.contains(&crate::graph::norm(x, y)) {
                push(Condition::C1, Some(x), format!("P edge {x}-{y} not on the outer boundary"));
            }
        }
        if !is_acceptable(&self.g, &self.p) {
            push(Condition::C1, self.p.first().copied(), "P is not acceptable".into());
        }

        // C2
        let a: BTreeSet<Vertex> = self.a.iter().copied().filter(|&v| self.g.contains(v)).collect();
        for &v in &a {
            if ps.contains(&v) {
                push(Condition::C2, Some(v), "A vertex on P".into());
            } else if !bd.contains(&v) {
                push(Condition::C2, Some(v), "A vertex not on the outer boundary".into());
            }
            if !girths[v].at_least(5) {
                push(Condition::C2, Some(v), format!("A vertex has girth {}", girths[v]));
            }
            if let Some(&w) = self.g.neighbors(v).iter().find(|w| a.contains(w) && **w > v) {
                push(Condition::C2, Some(v), format!("A is not independent: {v}-{w}"));
            }
        }

        // C3, on the girth-3 part of B
        let b = self.b_eff_with(girths);
        let b_raw: BTreeSet<Vertex> =
            self.b.iter().copied().filter(|&v| self.g.contains(v) && girths[v].is(3)).collect();
        for &v in &b_raw {
            if ps.contains(&v) {
                push(Condition::C3, Some(v), "B vertex on P".into());
            } else if !bd.contains(&v) {
                push(Condition::C3, Some(v), "B vertex not on the outer boundary".into());
            }
            if let Some(&w) = self.g.neighbors(v).iter().find(|w| b_raw.contains(w) && **w > v) {
                push(Condition::C3, Some(v), format!("B is not independent: {v}-{w}"));
            }
        }

        // C4
        for v in self.g.vertices().filter(|v| !ps.contains(v)) {
            let x = self.f[v];
            let gv = girths[v];
            if a.contains(&v) {
                if x != 1 {
                    push(Condition::C4a, Some(v), format!("A vertex has f={x}, needs 1"));
                }
            } else if b.contains(&v) {
                if x != 2 {
                    push(Condition::C4b, Some(v), format!("B vertex has f={x}, needs 2"));
                }
            } else if bd.contains(&v) {
                if gv.is(3) {
                    if x < 3 {
                        push(Condition::C4d, Some(v), format!("boundary girth-3 vertex has f={x}, needs >=3"));
                    }
                } else if x < 2 {
                    push(Condition::C4c, Some(v), format!("boundary vertex has f={x}, needs >=2"));
                }
            } else {
                let need = crate::local_girth::local_girth_value(gv);
                if x < need {
                    push(Condition::C4e, Some(v), format!("interior vertex of girth {gv} has f={x}, needs >={need}"));
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `f_K(v) = f(v) - |N(v) ∩ P|` on `G - P`. Values may be negative.
    pub fn f_k(&self) -> WeightFn {
        f_k_of(&self.g, &self.p, &self.f)
    }

    /// Exceptional type without checking the canvas conditions first.
    pub fn exception_unchecked(&self) -> Option<ExceptionType> {
        self.exception_with(None)
    }

    pub(crate) fn exception_with(&self, shape: Option<&Shape>) -> Option<ExceptionType> {
        let k = self.p.len();
        if self.p_is_cycle() || !(3..=4).contains(&k) {
            return None;
        }
        let a = self.a_eff();
        let b = match shape {
            Some(s) => self.b_eff_with(&s.girths),
            None => self.b_eff(),
        };
        let adj = |x: Vertex, y: Vertex| self.g.has_edge(x, y);
        if k == 3 {
            return b
                .iter()
                .find(|&&v| self.p.iter().all(|&u| adj(v, u)))
                .map(|&v| ExceptionType::X1 { v });
        }
        let p = &self.p;
        if let Some(&v) = a.iter().find(|&&v| adj(v, p[0]) && adj(v, p[3])) {
            return Some(ExceptionType::X2 { v });
        }
        for reversed in [false, true] {
            let q: Vec<Vertex> = if reversed { p.iter().rev().copied().collect() } else { p.clone() };
            for &v1 in &b {
                if !(adj(v1, q[0]) && adj(v1, q[1])) {
                    continue;
                }
                if let Some(&v2) = a.iter().find(|&&v2| adj(v2, q[3]) && adj(v2, v1)) {
                    return Some(ExceptionType::X3 { v1, v2, reversed });
                }
            }
        }
        None
    }

    pub fn classify_exception(&self) -> Result<Option<ExceptionType>, CanvasError> {
        let v = self.validate();
        if !v.is_empty() {
            return Err(CanvasError::NotACanvas(v));
        }
        Ok(self.exception_unchecked())
    }

    /// Exact decision of whether `G - P` is weakly `f_K`-degenerate.
    pub fn weakly_degenerate(&self, node_budget: u64) -> SearchOutcome {
        exact_weakly_degenerate(&self.rest(), &self.f_k(), node_budget)
    }
}

pub(crate) fn f_k_of(g: &PlaneGraph, p: &[Vertex], f: &WeightFn) -> WeightFn {
    let ps: BTreeSet<Vertex> = p.iter().copied().collect();
    g.vertices()
        .filter(|v| !ps.contains(v))
        .filter_map(|v| {
            let hits = g.neighbors(v).iter().filter(|w| ps.contains(w)).count() as i64;
            f.get(v).map(|x| (v, x - hits))
        })
        .collect()
}

pub fn validate_canvas(k: &Canvas) -> Vec<Violation> {
    k.validate()
}

pub fn canvas_fk(k: &Canvas) -> WeightFn {
    k.f_k()
}

pub fn classify_exception(k: &Canvas) -> Result<Option<ExceptionType>, CanvasError> {
    k.classify_exception()
}

pub fn canvas_weakly_degenerate(k: &Canvas, node_budget: u64) -> SearchOutcome {
    k.weakly_degenerate(node_budget)
}
