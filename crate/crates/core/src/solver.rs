//! Constructive solver: turns an unexceptional canvas into a legal sequence
//! of operations removing `G - P`.
//!
//! Every call normalises `f` to the least values the canvas conditions
//! allow, tries the reductions in a fixed order and checks each candidate
//! with the simulator before accepting it. A candidate that fails the check
//! is logged as a defect and the next reduction is tried; when nothing
//! works the exact search takes over. Sequences found for the normalised
//! weights are lifted back to the caller's weights.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::canvas::{Canvas, ExceptionType, Shape, Violation};
use crate::graph::{PlaneGraph, Vertex};
use crate::local_girth::local_girth_function;
use crate::ops::{lift_on, OpSequence, Operation, Simulator, WeightFn};
use crate::search::{exact_search, SearchOptions, SearchOutcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: &'static str,
    pub witnesses: Vec<Vertex>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}", self.step)?;
        for w in &self.witnesses {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanvasSolution {
    Removed(OpSequence),
    Exception(ExceptionType),
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("not a canvas: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotACanvas(Vec<Violation>),
    #[error("no reduction applies and the exact search gave up on a canvas with {} vertices: {reason}", .canvas.g.num_vertices())]
    Stuck { canvas: Box<Canvas>, reason: String },
    #[error("weight at vertex {0} is missing")]
    MissingWeight(Vertex),
    #[error("weight at vertex {v} is {got}, below the local girth value {need}")]
    BelowLocalGirth { v: Vertex, got: i64, need: i64 },
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Node budget for the exact search used when no reduction works.
    pub fallback_budget: u64,
    /// Reductions to leave out, by trace name. Only useful for exercising
    /// the later reductions, which the early ones usually pre-empt.
    pub skip: Vec<&'static str>,
    /// Keep a copy of every canvas the main boundary step is tried on.
    pub record_main: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { fallback_budget: 2_000_000, skip: Vec::new(), record_main: false }
    }
}

/// Recursion measure, compared lexicographically.
pub type Measure = (usize, usize, i64);

#[derive(Debug, Default)]
pub struct Solver {
    pub config: SolverConfig,
    pub trace: Vec<TraceStep>,
    /// Candidates that failed verification, and other recoverable surprises.
    pub defects: Vec<String>,
    /// Number of times the exact search had to stand in for the reductions.
    pub fallbacks: usize,
    /// Filled when `config.record_main` is set.
    pub main_canvases: Vec<Canvas>,
}

// ---------------------------------------------------------------------------
// Boundary decomposition and the path R

/// The outer cycle read from `P` onwards: `u_k ... u_1`, an optional `A`
/// vertex `v0`, then `v1 ... vt`, closing back at `u_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryDecomposition {
    pub p: Vec<Vertex>,
    pub v0: Option<Vertex>,
    pub pp: Vec<Vertex>,
    pub uk: Vertex,
    pub q2: Vec<Vertex>,
    pub q3: Vec<Vertex>,
}

impl BoundaryDecomposition {
    pub fn t(&self) -> usize {
        self.pp.len()
    }

    /// `v_i` for `0 <= i <= t+1`; index 0 is `v0` and `t+1` is `u_k`.
    pub fn v(&self, i: usize) -> Option<Vertex> {
        match i {
            0 => self.v0,
            i if i <= self.t() => Some(self.pp[i - 1]),
            i if i == self.t() + 1 => Some(self.uk),
            _ => None,
        }
    }

    pub fn index_of(&self, x: Vertex) -> Option<usize> {
        self.pp.iter().position(|&y| y == x).map(|i| i + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RCase {
    /// 1 through 8.
    pub case: u8,
    pub r: Vec<Vertex>,
    /// Largest index `i` with `v_i` in `R`.
    pub j: usize,
}

/// Weights, sets and graph left after removing `R`.
#[derive(Debug, Clone)]
pub struct TildeState {
    pub g: PlaneGraph,
    pub f: WeightFn,
    pub a: BTreeSet<Vertex>,
    pub b: BTreeSet<Vertex>,
    pub a_independent: bool,
    pub b_independent: bool,
}

impl TildeState {
    pub fn canvas(&self, p: &[Vertex]) -> Canvas {
        Canvas::new(self.g.clone(), p.to_vec(), self.a.clone(), self.b.clone(), self.f.clone())
    }
}

/// Rotates `walk` so that the vertices of `p` come first.
fn rotate_to_block(walk: &[Vertex], p: &BTreeSet<Vertex>) -> Option<Vec<Vertex>> {
    let n = walk.len();
    let k = p.len();
    if k == 0 || k >= n {
        return None;
    }
    (0..n)
        .find(|&i| (0..k).all(|j| p.contains(&walk[(i + j) % n])))
        .map(|i| (0..n).map(|j| walk[(i + j) % n]).collect())
}

fn simple_boundary(g: &PlaneGraph) -> Option<Vec<Vertex>> {
    match g.outer_boundary() {
        Ok(w) if w.is_simple_cycle() => Some(w.vertices),
        _ => None,
    }
}

/// Splits the outer cycle around `P`. `reversed` walks the other way round.
pub fn decompose_boundary(k: &Canvas, reversed: bool) -> Result<BoundaryDecomposition, String> {
    let mut walk = simple_boundary(&k.g).ok_or("outer boundary is not a cycle")?;
    if reversed {
        walk.reverse();
    }
    let ps = k.p_set();
    let s = rotate_to_block(&walk, &ps).ok_or("P is not a contiguous part of the boundary")?;
    let kk = ps.len();
    let p: Vec<Vertex> = s[..kk].to_vec();
    let rest = &s[kk..];
    let a = k.a_eff();
    let (v0, pp) = if a.contains(&rest[0]) { (Some(rest[0]), rest[1..].to_vec()) } else { (None, rest.to_vec()) };
    if pp.is_empty() {
        return Err("nothing left of the boundary after P".into());
    }
    let f = |x: Vertex| k.f[x];
    let mut i = 2; // index into pp of v3
    let mut q2 = Vec::new();
    while i < pp.len() && f(pp[i]) == 2 {
        q2.push(pp[i]);
        i += 1;
    }
    let mut q3 = Vec::new();
    while i < pp.len() && f(pp[i]) == 3 {
        q3.push(pp[i]);
        i += 1;
    }
    Ok(BoundaryDecomposition { uk: p[0], p, v0, pp, q2, q3 })
}

/// Picks the first of the eight cases that applies.
pub fn choose_r_case(k: &Canvas, d: &BoundaryDecomposition) -> RCase {
    let t = d.t();
    let f = |i: usize| k.f[d.v(i).expect("index within P''")];
    let run = |from: usize, len: usize| -> Vec<usize> { (from..from + len).collect() };
    let (case, idx): (u8, Vec<usize>) = if t <= 2 {
        (1, run(1, t))
    } else if f(1) == 3 && f(2) == 3 {
        (2, vec![1, 2])
    } else if f(1) == 3 && f(2) <= 2 && d.q3.len() >= 2 {
        (3, run(2, 1 + d.q2.len()))
    } else if f(1) == 3 && f(2) <= 2 {
        (4, run(2, 1 + d.q2.len() + d.q3.len()))
    } else if f(1) == 2 && f(2) == 3 && f(3) <= 2 {
        (5, vec![1, 2])
    } else if f(1) == 2 && f(2) == 3 && f(3) == 3 {
        (6, vec![1])
    } else if f(1) == 2 && f(2) <= 2 && d.q3.len() >= 2 {
        (7, run(1, 2 + d.q2.len()))
    } else {
        (8, run(1, 2 + d.q2.len() + d.q3.len()))
    };
    let j = *idx.last().expect("R is nonempty");
    RCase { case, r: idx.iter().map(|&i| d.v(i).expect("in P''")).collect(), j }
}

/// The operations removing `R`. A save aimed at a missing `v0` or at `u_k`
/// is emitted as a plain deletion.
pub fn removal_ops_for_r(d: &BoundaryDecomposition, rc: &RCase) -> OpSequence {
    let v = |i: usize| d.v(i).expect("index in range");
    let t = d.t();
    let save = |a: usize, b: usize| -> Operation {
        match d.v(b) {
            Some(w) if b >= 1 && b <= t => Operation::DelSave(v(a), w),
            Some(w) if b == 0 => Operation::DelSave(v(a), w),
            _ => Operation::Del(v(a)),
        }
    };
    let dels = |from: usize, to: usize| -> Vec<Operation> { (to..=from).rev().map(|i| Operation::Del(v(i))).collect() };
    let j = rc.j;
    let mut out = Vec::new();
    match rc.case {
        1 => {
            if t == 2 {
                out.push(Operation::Del(v(2)));
            }
            out.push(save(1, 0));
        }
        2 | 5 => {
            out.push(save(2, 3));
            out.push(save(1, 0));
        }
        3 => out.extend(dels(j, 2)),
        4 => {
            out.push(save(j, j + 1));
            if j > 2 {
                out.extend(dels(j - 1, 2));
            }
        }
        6 => out.push(save(1, 0)),
        7 => {
            out.extend(dels(j, 2));
            out.push(save(1, 0));
        }
        _ => {
            out.push(save(j, j + 1));
            if j > 2 {
                out.extend(dels(j - 1, 2));
            }
            out.push(save(1, 0));
        }
    }
    out
}

/// Simulates `prefix` on `(G - P, f_K)`.
fn simulate(k: &Canvas, prefix: &[Operation]) -> Option<Simulator> {
    let mut sim = Simulator::new(&k.g, &k.f_k(), &k.p_set()).ok()?;
    sim.run(prefix).ok()?;
    Some(sim)
}

enum SetRule {
    /// `A` from boundary vertices with value at most 1, `B` from boundary
    /// girth-3 vertices with value 2.
    Boundary,
    /// The same over every vertex outside the path.
    Everywhere,
    /// `A` as in `Boundary`, `B` empty.
    BoundaryNoB,
}

fn independent(g: &PlaneGraph, s: &BTreeSet<Vertex>) -> bool {
    s.iter().all(|&v| g.neighbors(v).iter().all(|w| !s.contains(w)))
}

/// Canvas on `g` with path `p` whose weights outside `p` are `value(v)`, and
/// `A`, `B` read off the weights by `rule`.
fn derived_canvas(g: PlaneGraph, p: Vec<Vertex>, value: impl Fn(Vertex) -> Option<i64>, rule: SetRule) -> Option<Canvas> {
    let ps: BTreeSet<Vertex> = p.iter().copied().collect();
    let mut f = WeightFn::new();
    for v in g.vertices() {
        if ps.contains(&v) {
            f.set(v, 0);
        } else {
            f.set(v, value(v)?);
        }
    }
    let girths = g.girths_up_to(4);
    let pool: BTreeSet<Vertex> = match rule {
        SetRule::Everywhere => g.vertices().collect(),
        _ => g.boundary_vertices(),
    };
    let pool: Vec<Vertex> = pool.into_iter().filter(|v| !ps.contains(v)).collect();
    let a: BTreeSet<Vertex> = pool.iter().copied().filter(|&v| f[v] <= 1).collect();
    let b: BTreeSet<Vertex> = match rule {
        SetRule::BoundaryNoB => BTreeSet::new(),
        _ => pool.iter().copied().filter(|&v| f[v] == 2 && girths[v].is(3)).collect(),
    };
    Some(Canvas::new(g, p, a, b, f))
}

/// Canvas left after running `prefix` from `(G - P, f_K)` with `P` kept.
fn after_prefix_canvas(k: &Canvas, prefix: &[Operation], rule: SetRule) -> Option<Canvas> {
    let sim = simulate(k, prefix)?;
    let ps = k.p_set();
    let keep: BTreeSet<Vertex> = sim.remaining().into_iter().chain(ps.iter().copied()).collect();
    let g = k.g.induced(&keep);
    let p = k.p.clone();
    derived_canvas(g.clone(), p, |v| sim.value(v).map(|x| x + g.neighbors(v).iter().filter(|w| ps.contains(w)).count() as i64), rule)
}

/// `K~` after removing `R` by `sigma_r`.
pub fn build_tilde(k: &Canvas, sigma_r: &[Operation]) -> Option<TildeState> {
    let c = after_prefix_canvas(k, sigma_r, SetRule::Boundary)?;
    Some(TildeState {
        a_independent: independent(&c.g, &c.a),
        b_independent: independent(&c.g, &c.b),
        g: c.g,
        f: c.f,
        a: c.a,
        b: c.b,
    })
}

/// Cycles of length `len` (3 to 5), each once, starting at its least vertex
/// with the smaller neighbour second, in lexicographic order.
fn cycles_of_length(g: &PlaneGraph, len: usize) -> Vec<Vec<Vertex>> {
    fn grow(g: &PlaneGraph, len: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        let last = *cur.last().expect("nonempty");
        for &y in g.neighbors(last) {
            if y <= cur[0] || cur.contains(&y) {
                continue;
            }
            cur.push(y);
            if cur.len() == len {
                if g.has_edge(y, cur[0]) && cur[1] < y {
                    out.push(cur.clone());
                }
            } else {
                grow(g, len, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for s in g.vertices() {
        let mut cur = vec![s];
        grow(g, len, &mut cur, &mut out);
    }
    out.sort();
    out
}

fn induces_path_in(g: &PlaneGraph, p: &[Vertex]) -> bool {
    (0..p.len()).all(|i| (i + 1..p.len()).all(|j| g.has_edge(p[i], p[j]) == (j == i + 1)))
}

fn measure(k: &Canvas) -> Measure {
    let ps = k.p_set();
    let sum = k.g.vertices().filter(|v| !ps.contains(v)).map(|v| k.f[v]).sum();
    (k.g.num_vertices(), k.g.num_vertices() - ps.iter().filter(|&&v| k.g.contains(v)).count(), sum)
}

fn normalize_with(k: &Canvas, shape: &Shape) -> Canvas {
    let mut out = k.clone();
    out.f = k.minimal_f_with(shape);
    out.a = k.a_eff();
    out.b = k.b_eff_with(&shape.girths);
    out
}

/// Child canvas of `k` on `g` with path `p`; vertices of `p` leave `A` and `B`.
fn child_of(k: &Canvas, g: PlaneGraph, p: Vec<Vertex>) -> Canvas {
    let a = k.a.iter().copied().filter(|v| !p.contains(v)).collect();
    let b = k.b.iter().copied().filter(|v| !p.contains(v)).collect();
    Canvas::new(g, p, a, b, k.f.clone())
}

fn has_low_weight(k: &Canvas) -> bool {
    let ps = k.p_set();
    k.g.vertices().any(|v| !ps.contains(&v) && k.f[v] >= k.g.degree(v) as i64)
}

fn ops_of(v: impl IntoIterator<Item = Vertex>) -> OpSequence {
    v.into_iter().map(Operation::Del).collect()
}

/// Runs `f` on a thread with a large stack when the graph is big; the
/// recursion depth grows with the number of vertices.
fn with_big_stack<T: Send + 'static>(n: usize, f: impl FnOnce() -> T + Send + 'static) -> T {
    if n <= 24 {
        return f();
    }
    std::thread::Builder::new()
        .stack_size(1 << 29)
        .spawn(f)
        .expect("spawn solver thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver { config, ..Default::default() }
    }

    /// Solves a canvas, or reports its exceptional type.
    pub fn solve_canvas(self, k: &Canvas) -> (Self, Result<CanvasSolution, SolveError>) {
        let k = k.clone();
        with_big_stack(k.g.num_vertices(), move || {
            let mut s = self;
            let r = s.solve_canvas_here(&k);
            (s, r)
        })
    }

    fn solve_canvas_here(&mut self, k: &Canvas) -> Result<CanvasSolution, SolveError> {
        let shape = k.shape();
        let violations = k.validate_with(&shape);
        if !violations.is_empty() {
            return Err(SolveError::NotACanvas(violations));
        }
        if let Some(x) = k.exception_with(Some(&shape)) {
            return Ok(CanvasSolution::Exception(x));
        }
        let seq = self.solve_normalized(k, normalize_with(k, &shape))?;
        let fk = k.f_k();
        let mut sim = Simulator::new(&k.g, &fk, &k.p_set()).map_err(|e| SolveError::Internal(e.to_string()))?;
        sim.run(&seq).map_err(|e| SolveError::Internal(format!("final check failed: {e}")))?;
        if !sim.is_empty() {
            return Err(SolveError::Internal("final sequence leaves vertices behind".into()));
        }
        Ok(CanvasSolution::Removed(seq))
    }

    /// Sequence legal from `(G - P, f_K)` for a valid unexceptional canvas,
    /// given its normalized form.
    fn solve_normalized(&mut self, k: &Canvas, norm: Canvas) -> Result<OpSequence, SolveError> {
        let ps = norm.p_set();
        if norm.g.vertices().all(|v| ps.contains(&v)) {
            return Ok(Vec::new());
        }
        let m = measure(&norm);
        let fk_norm = norm.f_k();
        type Reduction = fn(&mut Solver, &Canvas, Measure) -> Option<OpSequence>;
        let reductions: [(&'static str, Reduction); 14] = [
            ("components", Solver::r_components),
            ("empty-path", Solver::r_empty_path),
            ("cutvertex", Solver::r_cutvertex),
            ("low-weight", Solver::r_low_weight),
            ("short-cycle", Solver::r_short_cycle),
            ("five-cycle", Solver::r_five_cycle),
            ("one-chord", Solver::r_one_chord),
            ("boundary-only", Solver::r_boundary_only),
            ("b-augment", Solver::r_b_augment),
            ("a-augment", Solver::r_a_augment),
            ("extend-path", Solver::r_extend_path),
            ("two-chord", Solver::r_two_chord),
            ("three-chord", Solver::r_three_chord),
            ("main", Solver::r_main),
        ];
        for (name, red) in reductions {
            if self.config.skip.contains(&name) {
                continue;
            }
            let mark = self.trace.len();
            let Some(cand) = red(self, &norm, m) else {
                self.trace.truncate(mark);
                continue;
            };
            match self.verified(&norm, &fk_norm, &cand) {
                Ok(seq) => return Ok(self.lift(k, &norm, seq)),
                Err(e) => {
                    self.trace.truncate(mark);
                    let tag = if has_low_weight(&norm) { " (low-weight vertex present)" } else { "" };
                    self.defects.push(format!("{name} on {} vertices{tag}: {e}", norm.g.num_vertices()));
                }
            }
        }
        self.fallback(k, &norm)
    }

    fn fallback(&mut self, k: &Canvas, norm: &Canvas) -> Result<OpSequence, SolveError> {
        self.fallbacks += 1;
        let rest = norm.rest();
        let opts = SearchOptions { node_budget: self.config.fallback_budget, prune: true };
        match exact_search(&rest, &norm.f_k(), opts).0 {
            SearchOutcome::Found(seq) => {
                self.trace.push(TraceStep { step: "exact-search", witnesses: rest.vertices().collect() });
                let tag = if has_low_weight(norm) { " (low-weight vertex present)" } else { "" };
                self.defects.push(format!("exact search used on {} vertices{tag}", norm.g.num_vertices()));
                Ok(self.lift(k, norm, seq))
            }
            SearchOutcome::ExhaustedNo => Err(SolveError::Stuck {
                canvas: Box::new(k.clone()),
                reason: "exact search found no sequence".into(),
            }),
            SearchOutcome::BudgetExceeded => Err(SolveError::Stuck {
                canvas: Box::new(k.clone()),
                reason: "exact search budget exhausted".into(),
            }),
        }
    }

    /// Checks `seq` from `(G - P, f_K)`; saves whose target is gone become
    /// deletions and steps on absent vertices are dropped.
    fn verified(&self, k: &Canvas, fk: &WeightFn, seq: &[Operation]) -> Result<OpSequence, String> {
        let mut sim = Simulator::new(&k.g, fk, &k.p_set()).map_err(|e| e.to_string())?;
        let mut out = Vec::with_capacity(seq.len());
        for (i, &op) in seq.iter().enumerate() {
            let v = op.vertex();
            if !sim.contains(v) {
                continue;
            }
            let op = match op {
                Operation::DelSave(v, w) if !sim.neighbors(v).any(|x| x == w) => Operation::Del(v),
                other => other,
            };
            sim.step(op).map_err(|e| format!("step {i} ({op}): {e}"))?;
            out.push(op);
        }
        if !sim.is_empty() {
            return Err(format!("{} vertices left", sim.remaining().len()));
        }
        Ok(out)
    }

    fn lift(&mut self, k: &Canvas, norm: &Canvas, seq: OpSequence) -> OpSequence {
        let ps = k.p_set();
        if k.g.vertices().all(|v| ps.contains(&v) || k.f.get(v) == norm.f.get(v)) {
            return seq;
        }
        match lift_on(&k.g, &norm.f_k(), &k.f_k(), &seq, &ps) {
            Ok(s) => s,
            Err(e) => {
                self.defects.push(format!("lifting failed: {e}"));
                seq
            }
        }
    }

    /// Solves a child canvas, refusing invalid, exceptional or non-smaller ones.
    fn sub(&mut self, parent: Measure, child: Canvas) -> Option<OpSequence> {
        let shape = child.shape();
        if !child.validate_with(&shape).is_empty() || child.exception_with(Some(&shape)).is_some() {
            return None;
        }
        self.sub_shaped(parent, child, &shape)
    }

    /// `sub` for a child already known to be a valid unexceptional canvas.
    fn sub_checked(&mut self, parent: Measure, child: Canvas) -> Option<OpSequence> {
        let shape = child.shape();
        self.sub_shaped(parent, child, &shape)
    }

    fn sub_shaped(&mut self, parent: Measure, child: Canvas, shape: &Shape) -> Option<OpSequence> {
        let norm = normalize_with(&child, shape);
        if measure(&norm) >= parent {
            self.defects.push("child canvas is not smaller".into());
            return None;
        }
        match self.solve_normalized(&child, norm) {
            Ok(s) => Some(s),
            Err(e) => {
                self.defects.push(format!("child failed: {e}"));
                None
            }
        }
    }

    /// Cheap pre-check before spending time on a split's other side.
    fn acceptable_child(child: &Canvas) -> bool {
        let shape = child.shape();
        child.validate_with(&shape).is_empty() && child.exception_with(Some(&shape)).is_none()
    }

    fn step(&mut self, step: &'static str, witnesses: Vec<Vertex>) {
        self.trace.push(TraceStep { step, witnesses });
    }

    // -- reductions ---------------------------------------------------------

    fn r_components(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        let comps = k.g.components();
        if comps.len() < 2 {
            return None;
        }
        self.step("components", comps.iter().map(|c| c[0]).collect());
        let mut out = Vec::new();
        for comp in comps {
            let set: BTreeSet<Vertex> = comp.iter().copied().collect();
            let p: Vec<Vertex> = k.p.iter().copied().filter(|v| set.contains(v)).collect();
            let child = child_of(k, k.g.induced(&set), p);
            out.extend(self.sub(m, child)?);
        }
        Some(out)
    }

    fn r_empty_path(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        if !k.p.is_empty() {
            return None;
        }
        let u = *k.g.boundary_vertices().first()?;
        self.step("empty-path", vec![u]);
        let child = child_of(k, k.g.clone(), vec![u]);
        let mut out = vec![Operation::Del(u)];
        out.extend(self.sub(m, child)?);
        Some(out)
    }

    fn r_cutvertex(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        if k.g.num_vertices() < 3 {
            return None;
        }
        let u = k.g.find_cutvertex()?;
        let rest = k.g.remove_vertex(u);
        let ps = k.p_set();
        let comps = rest.components();
        let best = comps
            .iter()
            .max_by_key(|c| (c.iter().filter(|v| ps.contains(v)).count(), std::cmp::Reverse(c[0])))?;
        let s1: BTreeSet<Vertex> = best.iter().copied().chain([u]).collect();
        let s2: BTreeSet<Vertex> = k.g.vertices().filter(|v| *v == u || !s1.contains(v)).collect();
        let p1: Vec<Vertex> = k.p.iter().copied().filter(|v| s1.contains(v)).collect();
        let mut p2: Vec<Vertex> = k.p.iter().copied().filter(|v| s2.contains(v)).collect();
        if p2.is_empty() {
            p2 = vec![u];
        }
        self.step("cutvertex", vec![u]);
        let c1 = child_of(k, k.g.induced(&s1), p1);
        let c2 = child_of(k, k.g.induced(&s2), p2);
        if !Self::acceptable_child(&c2) {
            return None;
        }
        let mut out = self.sub(m, c1)?;
        out.extend(self.sub_checked(m, c2)?);
        Some(out)
    }

    fn r_low_weight(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        let ps = k.p_set();
        let v = k.g.vertices().find(|&v| !ps.contains(&v) && k.f[v] >= k.g.degree(v) as i64)?;
        self.step("low-weight", vec![v]);
        let child = child_of(k, k.g.remove_vertex(v), k.p.clone());
        let mut out = self.sub(m, child)?;
        out.push(Operation::Del(v));
        Some(out)
    }

    /// Splits off the interior `X` of cycle `h`: solve `G - X` first, then
    /// the canvas on `X` bounded by `h` minus the deleted vertex.
    fn empty_cycle(
        &mut self,
        k: &Canvas,
        m: Measure,
        step: &'static str,
        interior: &BTreeSet<Vertex>,
        path: Vec<Vertex>,
        deleted: Vertex,
    ) -> Option<OpSequence> {
        let inner: BTreeSet<Vertex> = interior.iter().copied().chain(path.iter().copied()).collect();
        let g2 = k.g.induced(&inner);
        let child = derived_canvas(
            g2,
            path.clone(),
            |v| Some(k.f[v] - i64::from(k.g.has_edge(v, deleted))),
            SetRule::BoundaryNoB,
        )?;
        if !Self::acceptable_child(&child) {
            return None;
        }
        let mut witnesses = path.clone();
        witnesses.push(deleted);
        self.step(step, witnesses);
        let outer = child_of(k, k.g.remove_vertices(interior), k.p.clone());
        let mut out = self.sub(m, outer)?;
        out.extend(self.sub_checked(m, child)?);
        Some(out)
    }

    fn r_short_cycle(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        let fm = k.g.face_map();
        for len in [3, 4] {
            for c in cycles_of_length(&k.g, len) {
                let x = k.g.cycle_interior_with(&fm, &c);
                if x.is_empty() {
                    continue;
                }
                let inner: BTreeSet<Vertex> = x.iter().copied().chain(c.iter().copied()).collect();
                let gi = k.g.induced(&inner);
                let mut order: Vec<usize> = (0..len).collect();
                order.sort_by_key(|&i| c[i]);
                for i in order {
                    let path: Vec<Vertex> = (1..len).map(|s| c[(i + s) % len]).collect();
                    if !induces_path_in(&gi, &path) {
                        continue;
                    }
                    if let Some(seq) = self.empty_cycle(k, m, "short-cycle", &x, path, c[i]) {
                        return Some(seq);
                    }
                }
            }
        }
        None
    }

    fn r_five_cycle(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        let girths = k.g.girths_up_to(4);
        let fm = k.g.face_map();
        for c in cycles_of_length(&k.g, 5) {
            let mut labelings = Vec::new();
            for s in 0..5 {
                for dir in [1usize, 4] {
                    let w: Vec<Vertex> = (0..5).map(|i| c[(s + dir * i) % 5]).collect();
                    let ok = girths[w[2]].at_least(5) || (girths[w[1]].is(4) && girths[w[2]].is(4));
                    if ok {
                        labelings.push(w);
                    }
                }
            }
            if labelings.is_empty() {
                continue;
            }
            let x = k.g.cycle_interior_with(&fm, &c);
            if x.is_empty() {
                continue;
            }
            labelings.sort_by_key(|w| (w[4], w.clone()));
            for w in labelings {
                let path = w[..4].to_vec();
                let inner: BTreeSet<Vertex> = x.iter().copied().chain(path.iter().copied()).collect();
                if !induces_path_in(&k.g.induced(&inner), &path) {
                    continue;
                }
                if let Some(seq) = self.empty_cycle(k, m, "five-cycle", &x, path, w[4]) {
                    return Some(seq);
                }
            }
        }
        None
    }

    fn internal_to_p(k: &Canvas, v: Vertex) -> bool {
        k.p.len() >= 3 && k.p[1..k.p.len() - 1].contains(&v)
    }

    fn r_one_chord(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        if k.p_is_cycle() {
            return None;
        }
        let chords = k.g.find_chords(1, Some(&k.p));
        if chords.is_empty() {
            return None;
        }
        let ps = k.p_set();
        for c in &chords {
            let (x, y) = (c.path[0], c.path[1]);
            if Self::internal_to_p(k, x) || Self::internal_to_p(k, y) {
                continue;
            }
            if !ps.iter().all(|&v| c.side1.contains(v)) {
                continue;
            }
            let c2 = child_of(k, c.side2.clone(), vec![x, y]);
            if !Self::acceptable_child(&c2) {
                continue;
            }
            self.step("one-chord", vec![x, y]);
            let c1 = child_of(k, c.side1.clone(), k.p.clone());
            let mut out = self.sub(m, c1)?;
            out.extend(self.sub_checked(m, c2)?);
            return Some(out);
        }
        // chords through an internal vertex of P, smallest far side first
        let mut inner: Vec<_> = chords
            .iter()
            .filter(|c| Self::internal_to_p(k, c.path[0]) || Self::internal_to_p(k, c.path[1]))
            .collect();
        inner.sort_by_key(|c| (c.side2.num_vertices(), c.path.clone()));
        for c in inner {
            let (u, v) = if Self::internal_to_p(k, c.path[0]) { (c.path[0], c.path[1]) } else { (c.path[1], c.path[0]) };
            if ps.contains(&v) {
                continue;
            }
            let p2: Vec<Vertex> = k.p.iter().copied().filter(|&x| c.side2.contains(x)).collect();
            if p2.len() != 2 || !p2.contains(&u) {
                continue;
            }
            let w = if p2[0] == u { p2[1] } else { p2[0] };
            let mut p1: Vec<Vertex> = k.p.iter().copied().filter(|&x| c.side1.contains(x)).collect();
            if p1.first() == Some(&u) {
                p1.reverse();
            }
            if p1.last() != Some(&u) {
                continue;
            }
            if !k.g.has_edge(v, w) {
                let c2 = child_of(k, c.side2.clone(), vec![v, u, w]);
                if !Self::acceptable_child(&c2) {
                    continue;
                }
                self.step("one-chord", vec![u, v]);
                let c1 = child_of(k, c.side1.clone(), p1);
                let mut out = self.sub(m, c1)?;
                out.extend(self.sub_checked(m, c2)?);
                return Some(out);
            }
            // the far side is the triangle uvw
            if c.side2.num_vertices() != 3 {
                continue;
            }
            p1.push(v);
            let c1 = child_of(k, c.side1.clone(), p1);
            if !Self::acceptable_child(&c1) {
                continue;
            }
            self.step("one-chord", vec![u, v]);
            let mut out = vec![Operation::Del(v)];
            out.extend(self.sub_checked(m, c1)?);
            return Some(out);
        }
        None
    }

    fn r_boundary_only(&mut self, k: &Canvas, _m: Measure) -> Option<OpSequence> {
        if k.p.is_empty() || k.p_is_cycle() {
            return None;
        }
        if k.g.num_vertices() == 2 {
            let ps = k.p_set();
            let rest: Vec<Vertex> = k.g.vertices().filter(|v| !ps.contains(v)).collect();
            self.step("boundary-only", rest.clone());
            return Some(ops_of(rest));
        }
        let walk = simple_boundary(&k.g)?;
        if walk.len() != k.g.num_vertices() {
            return None;
        }
        let s = rotate_to_block(&walk, &k.p_set())?;
        let rest = &s[k.p.len()..];
        let a = k.a_eff();
        let (u, w) = (rest[0], rest[rest.len() - 1]);
        let mut first: Vec<Vertex> = [u, w].into_iter().filter(|x| a.contains(x)).collect();
        first.sort();
        first.dedup();
        self.step("boundary-only", rest.to_vec());
        let mut out = ops_of(first.iter().copied());
        out.extend(ops_of(rest.iter().copied().filter(|x| !first.contains(x))));
        Some(out)
    }

    /// Lowers `f(y)` on the middle of three consecutive boundary vertices
    /// outside `P` that share a girth class, putting `y` into `A` or `B`.
    fn augment(&mut self, k: &Canvas, m: Measure, into_b: bool) -> Option<OpSequence> {
        let walk = simple_boundary(&k.g)?;
        let n = walk.len();
        let ps = k.p_set();
        let girths = k.g.girths_up_to(4);
        let (a, b) = (k.a_eff(), k.b_eff());
        let fits = |v: Vertex| {
            !ps.contains(&v)
                && if into_b { girths[v].is(3) && !b.contains(&v) } else { girths[v].at_least(5) && !a.contains(&v) }
        };
        let mut mids: Vec<Vertex> = (0..n)
            .filter(|&i| fits(walk[(i + n - 1) % n]) && fits(walk[i]) && fits(walk[(i + 1) % n]))
            .map(|i| walk[i])
            .collect();
        mids.sort();
        for y in mids {
            let mut child = k.clone();
            if into_b {
                child.f.set(y, 2);
                child.b.insert(y);
            } else {
                child.f.set(y, 1);
                child.a.insert(y);
            }
            if !Self::acceptable_child(&child) {
                continue;
            }
            self.step(if into_b { "b-augment" } else { "a-augment" }, vec![y]);
            let seq = self.sub_checked(m, child.clone())?;
            return lift_on(&k.g, &child.f_k(), &k.f_k(), &seq, &ps).ok();
        }
        None
    }

    fn r_b_augment(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        self.augment(k, m, true)
    }

    fn r_a_augment(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        self.augment(k, m, false)
    }

    fn r_extend_path(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        if k.p.is_empty() || k.p.len() > 2 {
            return None;
        }
        let walk = simple_boundary(&k.g)?;
        for reversed in [false, true] {
            let mut w = walk.clone();
            if reversed {
                w.reverse();
            }
            let Some(s) = rotate_to_block(&w, &k.p_set()) else { continue };
            let v = s[k.p.len()];
            let mut p: Vec<Vertex> = s[..k.p.len()].to_vec();
            p.push(v);
            let child = child_of(k, k.g.clone(), p);
            if !Self::acceptable_child(&child) {
                continue;
            }
            self.step("extend-path", vec![v]);
            let mut out = vec![Operation::Del(v)];
            out.extend(self.sub_checked(m, child)?);
            return Some(out);
        }
        None
    }

    fn chord_split(&mut self, k: &Canvas, m: Measure, t: usize, step: &'static str) -> Option<OpSequence> {
        if k.p_is_cycle() {
            return None;
        }
        let ps = k.p_set();
        let girths = k.g.girths_up_to(4);
        for c in k.g.find_chords(t, Some(&k.p)) {
            let (x, z) = (c.path[0], c.path[t]);
            if Self::internal_to_p(k, x) || Self::internal_to_p(k, z) {
                continue;
            }
            if t == 3 && !(girths[c.path[1]].at_least(5) || girths[c.path[2]].at_least(5)) {
                continue;
            }
            if !ps.iter().all(|&v| c.side1.contains(v)) {
                continue;
            }
            let c2 = child_of(k, c.side2.clone(), c.path.clone());
            if !Self::acceptable_child(&c2) {
                continue;
            }
            self.step(step, c.path.clone());
            let c1 = child_of(k, c.side1.clone(), k.p.clone());
            let mut out = self.sub(m, c1)?;
            out.extend(self.sub_checked(m, c2)?);
            return Some(out);
        }
        None
    }

    fn r_two_chord(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        self.chord_split(k, m, 2, "two-chord")
    }

    fn r_three_chord(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        self.chord_split(k, m, 3, "three-chord")
    }

    fn r_main(&mut self, k: &Canvas, m: Measure) -> Option<OpSequence> {
        if k.p.len() < 3 || k.p_is_cycle() {
            return None;
        }
        if self.config.record_main {
            self.main_canvases.push(k.clone());
        }
        for reversed in [false, true] {
            let Ok(d) = decompose_boundary(k, reversed) else { continue };
            let mark = self.trace.len();
            if let Some(seq) = self.main_oriented(k, m, &d) {
                return Some(seq);
            }
            self.trace.truncate(mark);
        }
        None
    }

    fn main_oriented(&mut self, k: &Canvas, m: Measure, d: &BoundaryDecomposition) -> Option<OpSequence> {
        let rc = choose_r_case(k, d);
        let f1 = k.f[d.pp[0]];
        if !(2..=3).contains(&f1) {
            self.defects.push(format!("main step: f(v1) = {f1}"));
        }
        let sigma = removal_ops_for_r(d, &rc);
        let tilde = build_tilde(k, &sigma)?;
        let kt = tilde.canvas(&k.p);
        if Self::acceptable_child(&kt) {
            let mut w = vec![rc.case as usize];
            w.extend(&rc.r);
            self.step("main", w);
            let mut out = sigma;
            out.extend(self.sub_checked(m, kt)?);
            return Some(out);
        }
        if !tilde.b_independent {
            if let Some(seq) = self.handle_b_edge(k, m, d) {
                return Some(seq);
            }
        }
        if !tilde.a_independent {
            if let Some(seq) = self.handle_a_edge(k, m, d, &rc, &sigma, &tilde) {
                return Some(seq);
            }
        }
        None
    }

    /// Two adjacent vertices of `B~`: remove `v3`, `v0`, `v1` and keep `v2`
    /// hanging off its last neighbour until the very end.
    pub fn handle_b_edge(&mut self, k: &Canvas, m: Measure, d: &BoundaryDecomposition) -> Option<OpSequence> {
        if d.t() < 3 {
            return None;
        }
        let v = |i| d.v(i).expect("index within range");
        let v4 = d.v(4).expect("t >= 3");
        let mut sigma = vec![Operation::DelSave(v(3), v4)];
        if let Some(v0) = d.v0 {
            sigma.push(Operation::Del(v0));
        }
        sigma.push(Operation::DelSave(v(1), v(2)));
        let sim = simulate(k, &sigma)?;
        let ps = k.p_set();
        let gone: BTreeSet<Vertex> = [d.v0, Some(v(1)), Some(v(2)), Some(v(3))].into_iter().flatten().collect();
        let g = k.g.remove_vertices(&gone);
        let gc = g.clone();
        let child = derived_canvas(
            g,
            k.p.clone(),
            |x| sim.value(x).map(|y| y + gc.neighbors(x).iter().filter(|w| ps.contains(w)).count() as i64),
            SetRule::Boundary,
        )?;
        if !Self::acceptable_child(&child) {
            return None;
        }
        self.step("b-edge", vec![v(1), v(2), v(3)]);
        let mut out = sigma;
        out.extend(self.sub_checked(m, child)?);
        out.push(Operation::Del(v(2)));
        Some(out)
    }

    /// Two adjacent vertices of `A~`: remove them together with `R`, and if
    /// that is still not enough, split along the path through the next
    /// offending edge.
    pub fn handle_a_edge(
        &mut self,
        k: &Canvas,
        m: Measure,
        d: &BoundaryDecomposition,
        rc: &RCase,
        sigma_r: &[Operation],
        tilde: &TildeState,
    ) -> Option<OpSequence> {
        if d.t() < 3 {
            return None;
        }
        let v = |i| d.v(i).expect("index within range");
        let g = &k.g;
        let mut pairs = Vec::new();
        for &a in &tilde.a {
            for &b in tilde.g.neighbors(a) {
                if tilde.a.contains(&b) && g.has_edge(a, v(1)) && g.has_edge(b, v(3)) {
                    pairs.push((a, b));
                }
            }
        }
        let &(w1, w2) = pairs.iter().min()?;
        let ps = k.p_set();
        let touches_p = |x: Vertex| g.neighbors(x).iter().any(|y| ps.contains(y));
        let (first, second) = if !touches_p(w1) && touches_p(w2) { (w2, w1) } else { (w1, w2) };
        let mut sigma = sigma_r.to_vec();
        sigma.push(Operation::Del(first));
        sigma.push(Operation::Del(second));
        let sim = simulate(k, &sigma)?;
        let keep: BTreeSet<Vertex> = sim.remaining().into_iter().chain(ps.iter().copied()).collect();
        let gh = g.induced(&keep);
        let ghc = gh.clone();
        let khat = derived_canvas(
            gh,
            k.p.clone(),
            |x| sim.value(x).map(|y| y + ghc.neighbors(x).iter().filter(|w| ps.contains(w)).count() as i64),
            SetRule::Everywhere,
        )?;
        if Self::acceptable_child(&khat) {
            self.step("a-edge", vec![w1, w2]);
            let mut out = sigma;
            out.extend(self.sub_checked(m, khat)?);
            return Some(out);
        }
        // split along Q
        let ridx: BTreeMap<Vertex, usize> = rc.r.iter().filter_map(|&x| d.index_of(x).map(|i| (x, i))).collect();
        let mut best: Option<(usize, Vertex, Vertex)> = None;
        for &a in &khat.a {
            for &b in khat.g.neighbors(a) {
                if !khat.a.contains(&b) {
                    continue;
                }
                let (w3, w4) = (a, b);
                if !(g.has_edge(w3, w1) || g.has_edge(w3, w2)) {
                    continue;
                }
                for &y in g.neighbors(w4) {
                    if let Some(&i) = ridx.get(&y) {
                        if i >= 4 && best.is_none_or(|bst| (i, w3, w4) < bst) {
                            best = Some((i, w3, w4));
                        }
                    }
                }
            }
        }
        let (i, w3, w4) = best?;
        let q: Vec<Vertex> =
            if g.has_edge(w3, w1) { vec![v(1), w1, w3, w4, v(i)] } else { vec![v(1), w1, w2, w3, w4, v(i)] };
        if q.len() == 6 && i == 4 {
            let prefix = vec![Operation::DelSave(v(1), d.v0.unwrap_or(v(1))), Operation::Del(v(2))];
            let child = after_prefix_canvas(k, &prefix, SetRule::Boundary)?;
            if !Self::acceptable_child(&child) {
                return None;
            }
            self.step("a-edge-short", vec![v(1), v(2)]);
            let mut out = prefix;
            out.extend(self.sub_checked(m, child)?);
            return Some(out);
        }
        let (sa, sb) = g.separate(&q)?;
        let (g1, g2) = if sa.contains(v(2)) { (sb, sa) } else { (sa, sb) };
        if !ps.iter().all(|&x| g1.contains(x)) {
            return None;
        }
        let qp: BTreeSet<Vertex> = (1..=i).map(v).collect();
        let g4 = g2.remove_vertices(&qp);
        let p4 = q[1..q.len() - 1].to_vec();
        let k4 = derived_canvas(
            g4,
            p4,
            |x| Some(k.f[x] - g.neighbors(x).iter().filter(|y| qp.contains(y)).count() as i64),
            SetRule::Everywhere,
        )?;
        if !Self::acceptable_child(&k4) {
            return None;
        }
        self.step("a-edge-split", q.clone());
        let c1 = child_of(k, g1, k.p.clone());
        let mut out = self.sub(m, c1)?;
        out.extend(ops_of((2..i).map(v)));
        out.extend(self.sub_checked(m, k4)?);
        Some(out)
    }
}

/// Solves a canvas with a fresh solver.
pub fn solve_canvas(k: &Canvas) -> Result<CanvasSolution, SolveError> {
    Solver::new(SolverConfig::default()).solve_canvas(k).1
}

/// Sequence removing all of `g` that is legal from the local girth function,
/// or from `f` when given (which must dominate it).
pub fn solve_planar_local_girth(g: &PlaneGraph, f: Option<&WeightFn>) -> Result<OpSequence, SolveError> {
    Solver::new(SolverConfig::default()).solve_planar(g, f).1
}

impl Solver {
    pub fn solve_planar(self, g: &PlaneGraph, f: Option<&WeightFn>) -> (Self, Result<OpSequence, SolveError>) {
        let g = g.clone();
        let f = f.cloned();
        with_big_stack(g.num_vertices(), move || {
            let mut s = self;
            let r = s.solve_planar_here(&g, f.as_ref());
            (s, r)
        })
    }

    fn solve_planar_here(&mut self, g: &PlaneGraph, f: Option<&WeightFn>) -> Result<OpSequence, SolveError> {
        let fmin = local_girth_function(g);
        if let Some(f) = f {
            for (v, need) in fmin.iter() {
                let got = f.get(v).ok_or(SolveError::MissingWeight(v))?;
                if got < need {
                    return Err(SolveError::BelowLocalGirth { v, got, need });
                }
            }
        }
        let mut seq = Vec::new();
        for comp in g.components() {
            let set: BTreeSet<Vertex> = comp.iter().copied().collect();
            let c = g.induced(&set);
            if comp.len() == 1 {
                seq.push(Operation::Del(comp[0]));
                continue;
            }
            let (a, b) = *c.boundary_edges().first().ok_or_else(|| SolveError::Internal("no boundary edge".into()))?;
            self.step("start", vec![a, b]);
            seq.push(Operation::Del(a));
            seq.push(Operation::Del(b));
            let k = Canvas::new(c, vec![a, b], BTreeSet::new(), BTreeSet::new(), fmin.clone());
            match self.solve_canvas_here(&k)? {
                CanvasSolution::Removed(s) => seq.extend(s),
                CanvasSolution::Exception(x) => {
                    return Err(SolveError::Internal(format!("starting canvas reported exception {x}")))
                }
            }
        }
        let empty = BTreeSet::new();
        let out = match f {
            Some(f) => lift_on(g, &fmin, f, &seq, &empty).map_err(|e| SolveError::Internal(e.to_string()))?,
            None => seq,
        };
        let fu = f.cloned().unwrap_or(fmin);
        let mut sim = Simulator::new(g, &fu, &empty).map_err(|e| SolveError::Internal(e.to_string()))?;
        sim.run(&out).map_err(|e| SolveError::Internal(format!("final check failed: {e}")))?;
        if !sim.is_empty() {
            return Err(SolveError::Internal("final sequence leaves vertices behind".into()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::generate_plane_graph;
    use crate::ops::removes_all;

    #[test]
    fn single_vertex() {
        let g = PlaneGraph::new(vec![vec![]], None).unwrap();
        assert_eq!(solve_planar_local_girth(&g, None).unwrap(), vec![Operation::Del(0)]);
    }

    #[test]
    fn random_graphs_are_removed() {
        for seed in 0..60 {
            for keep in [0.4, 0.7, 1.0] {
                let g = generate_plane_graph(seed, 5 + (seed as usize % 20), keep);
                let (s, r) = Solver::new(SolverConfig::default()).solve_planar(&g, None);
                let seq = r.unwrap_or_else(|e| panic!("seed {seed} keep {keep}: {e}"));
                assert!(removes_all(&g, &local_girth_function(&g), &seq));
                assert_eq!(s.fallbacks, 0, "seed {seed} keep {keep}: {:?}", s.defects);
            }
        }
    }
}
