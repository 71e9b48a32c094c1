//! Line-oriented text formats. `#` starts a comment anywhere on a line.
//!
//! ```text
//! planegraph 1
//! n 3
//! rot 0: 1 2
//! rot 1: 2 0
//! rot 2: 0 1
//! outer 0 1
//! ```
//!
//! Weights are `f <v> <value>` lines, sequences `del <v>` / `delsave <v> <w>`,
//! a canvas is a graph followed by `P`, `A`, `B` and weight lines, and an
//! assignment is `list <v>: <c...>` and `match <u> <v>: <cu>-<cv>, ...` lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::canvas::Canvas;
use crate::coloring::{from_lists, Color, CorrespondenceAssignment};
use crate::graph::{norm, Dart, PlaneGraph, Vertex};
use crate::ops::{OpSequence, Operation, WeightFn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is not tied to one line.
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn num<T: FromStr>(line: usize, s: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| err(line, format!("expected a number, found `{s}`")))
}

fn nums<T: FromStr>(line: usize, s: &str) -> Result<Vec<T>, ParseError> {
    s.split_whitespace().map(|t| num(line, t)).collect()
}

/// Splits `"<head>: <tail>"`.
fn colon(line: usize, s: &str) -> Result<(&str, &str), ParseError> {
    s.split_once(':').ok_or_else(|| err(line, "missing `:`"))
}

#[derive(Default)]
struct GraphParts {
    n: Option<usize>,
    rot: BTreeMap<Vertex, (usize, Vec<Vertex>)>,
    outer: Vec<(usize, Dart)>,
    header: bool,
}

impl GraphParts {
    /// Consumes the line if it belongs to the graph block.
    fn take(&mut self, line: usize, l: &str) -> Result<bool, ParseError> {
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let rest = rest.trim();
        match kw {
            "planegraph" => {
                if rest != "1" {
                    return Err(err(line, format!("unsupported format version `{rest}`")));
                }
                self.header = true;
            }
            "n" => self.n = Some(num(line, rest)?),
            "rot" => {
                let (v, nb) = colon(line, rest)?;
                let v: Vertex = num(line, v.trim())?;
                if self.rot.insert(v, (line, nums(line, nb)?)).is_some() {
                    return Err(err(line, format!("second rotation for vertex {v}")));
                }
            }
            "outer" => match nums::<Vertex>(line, rest)?.as_slice() {
                &[u, v] => self.outer.push((line, (u, v))),
                _ => return Err(err(line, "`outer` takes two vertices")),
            },
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn finish(self) -> Result<PlaneGraph, ParseError> {
        if !self.header {
            return Err(err(0, "missing `planegraph 1` header"));
        }
        let n = self.n.ok_or_else(|| err(0, "missing `n` line"))?;
        let mut rot: Vec<Option<Vec<Vertex>>> = vec![None; n];
        for (&v, (line, nb)) in &self.rot {
            if v >= n {
                return Err(err(*line, format!("vertex {v} is out of range (n = {n})")));
            }
            rot[v] = Some(nb.clone());
        }
        for (v, (line, nb)) in &self.rot {
            if let Some(&w) = nb.iter().find(|&&w| w >= n || rot[w].is_none()) {
                return Err(err(*line, format!("rotation of {v} mentions nonexistent vertex {w}")));
            }
        }
        for &(line, (u, v)) in &self.outer {
            if u >= n || rot[u].as_ref().is_none_or(|r| !r.contains(&v)) {
                return Err(err(line, format!("outer dart {u} {v} is not an edge")));
            }
        }
        let outer = self.outer.into_iter().map(|(_, d)| d).collect();
        PlaneGraph::from_parts(rot, outer).map_err(|e| err(0, e.to_string()))
    }
}

pub fn parse_graph(text: &str) -> Result<PlaneGraph, ParseError> {
    let mut parts = GraphParts::default();
    for (line, l) in lines(text) {
        if !parts.take(line, l)? {
            return Err(err(line, format!("unexpected `{l}` in a graph file")));
        }
    }
    parts.finish()
}

pub fn write_graph(g: &PlaneGraph) -> String {
    let mut s = String::from("planegraph 1\n");
    let _ = writeln!(s, "n {}", g.capacity());
    for v in g.vertices() {
        let nb: Vec<String> = g.neighbors(v).iter().map(|w| w.to_string()).collect();
        let _ = writeln!(s, "rot {v}: {}", nb.join(" "));
    }
    for &(u, v) in g.outer_darts() {
        let _ = writeln!(s, "outer {u} {v}");
    }
    s
}

fn weight_line(line: usize, rest: &str, f: &mut WeightFn) -> Result<(), ParseError> {
    match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
        [v, x] => {
            let v: Vertex = num(line, v)?;
            if f.contains(v) {
                return Err(err(line, format!("second weight for vertex {v}")));
            }
            f.set(v, num(line, x)?);
            Ok(())
        }
        _ => Err(err(line, "expected `f <vertex> <value>`")),
    }
}

pub fn parse_weights(text: &str) -> Result<WeightFn, ParseError> {
    let mut f = WeightFn::new();
    for (line, l) in lines(text) {
        match l.split_once(char::is_whitespace) {
            Some(("f", rest)) => weight_line(line, rest, &mut f)?,
            _ => return Err(err(line, format!("unexpected `{l}` in a weight file"))),
        }
    }
    Ok(f)
}

pub fn write_weights(f: &WeightFn) -> String {
    f.iter().map(|(v, x)| format!("f {v} {x}\n")).collect()
}

pub fn parse_sequence(text: &str) -> Result<OpSequence, ParseError> {
    lines(text)
        .map(|(line, l)| {
            let t: Vec<&str> = l.split_whitespace().collect();
            match t.as_slice() {
                ["del", v] => Ok(Operation::Del(num(line, v)?)),
                ["delsave", v, w] => Ok(Operation::DelSave(num(line, v)?, num(line, w)?)),
                _ => Err(err(line, format!("expected `del <v>` or `delsave <v> <w>`, found `{l}`"))),
            }
        })
        .collect()
}

pub fn write_sequence(seq: &[Operation]) -> String {
    seq.iter().map(|op| format!("{op}\n")).collect()
}

pub fn parse_canvas(text: &str) -> Result<Canvas, ParseError> {
    let mut parts = GraphParts::default();
    let (mut p, mut a, mut b) = (None, BTreeSet::new(), BTreeSet::new());
    let mut f = WeightFn::new();
    for (line, l) in lines(text) {
        if parts.take(line, l)? {
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match kw {
            "P" => {
                if p.is_some() {
                    return Err(err(line, "second `P` line"));
                }
                p = Some(nums(line, rest)?);
            }
            "A" => a.extend(nums::<Vertex>(line, rest)?),
            "B" => b.extend(nums::<Vertex>(line, rest)?),
            "f" => weight_line(line, rest, &mut f)?,
            _ => return Err(err(line, format!("unexpected `{l}` in a canvas file"))),
        }
    }
    let g = parts.finish()?;
    Ok(Canvas::new(g, p.unwrap_or_default(), a, b, f))
}

pub fn write_canvas(k: &Canvas) -> String {
    let join = |it: &mut dyn Iterator<Item = &Vertex>| it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    let mut s = write_graph(&k.g);
    let _ = writeln!(s, "P {}", join(&mut k.p.iter()));
    let _ = writeln!(s, "A {}", join(&mut k.a.iter()));
    let _ = writeln!(s, "B {}", join(&mut k.b.iter()));
    s.push_str(&write_weights(&k.f));
    s
}

/// Edges without a `match` line get the identity matching on common colours.
pub fn parse_assignment(text: &str, g: &PlaneGraph) -> Result<CorrespondenceAssignment, ParseError> {
    let mut lists: BTreeMap<Vertex, BTreeSet<Color>> = BTreeMap::new();
    let mut given: BTreeMap<(Vertex, Vertex), BTreeSet<(Color, Color)>> = BTreeMap::new();
    for (line, l) in lines(text) {
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let (head, tail) = colon(line, rest)?;
        match kw {
            "list" => {
                let v: Vertex = num(line, head.trim())?;
                if lists.insert(v, nums(line, tail)?.into_iter().collect()).is_some() {
                    return Err(err(line, format!("second list for vertex {v}")));
                }
            }
            "match" => {
                let (u, v) = match nums::<Vertex>(line, head)?.as_slice() {
                    &[u, v] => (u, v),
                    _ => return Err(err(line, "`match` takes two vertices")),
                };
                if !g.contains(u) || !g.has_edge(u, v) {
                    return Err(err(line, format!("{u}-{v} is not an edge")));
                }
                let mut pairs = BTreeSet::new();
                for item in tail.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    let (x, y) = item.split_once('-').ok_or_else(|| err(line, format!("bad pair `{item}`")))?;
                    let (x, y): (Color, Color) = (num(line, x.trim())?, num(line, y.trim())?);
                    pairs.insert(if u < v { (x, y) } else { (y, x) });
                }
                if given.insert(norm(u, v), pairs).is_some() {
                    return Err(err(line, format!("second matching for {u}-{v}")));
                }
            }
            _ => return Err(err(line, format!("unexpected `{kw}` in an assignment file"))),
        }
    }
    let mut ca = from_lists(g, &lists);
    ca.matchings.extend(given);
    Ok(ca)
}

pub fn write_assignment(ca: &CorrespondenceAssignment) -> String {
    let mut s = String::new();
    for (v, l) in &ca.lists {
        let cs: Vec<String> = l.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "list {v}: {}", cs.join(" "));
    }
    for ((u, v), m) in &ca.matchings {
        let ps: Vec<String> = m.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        let _ = writeln!(s, "match {u} {v}: {}", ps.join(", "));
    }
    s
}
