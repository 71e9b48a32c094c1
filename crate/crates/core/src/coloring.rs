//! Correspondence assignments, colourings read off an operation sequence,
//! and brute-force colouring counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{norm, PlaneGraph, Vertex};
use crate::ops::{average_availability, OpError, Operation, WeightFn};

pub type Color = u64;
pub type Coloring = BTreeMap<Vertex, Color>;

/// Lists per vertex and, per edge `(u, v)` with `u < v`, a matching given
/// as pairs `(colour at u, colour at v)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorrespondenceAssignment {
    pub lists: BTreeMap<Vertex, BTreeSet<Color>>,
    pub matchings: BTreeMap<(Vertex, Vertex), BTreeSet<(Color, Color)>>,
}

impl CorrespondenceAssignment {
    /// The colour at `v` matched to colour `c` at `u` along edge `uv`.
    pub fn partner(&self, u: Vertex, c: Color, v: Vertex) -> Option<Color> {
        let m = self.matchings.get(&norm(u, v))?;
        if u < v {
            m.iter().find(|p| p.0 == c).map(|p| p.1)
        } else {
            m.iter().find(|p| p.1 == c).map(|p| p.0)
        }
    }

    fn list(&self, v: Vertex) -> &BTreeSet<Color> {
        static EMPTY: BTreeSet<Color> = BTreeSet::new();
        self.lists.get(&v).unwrap_or(&EMPTY)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignmentViolation {
    MissingList(Vertex),
    MissingMatching(Vertex, Vertex),
    NotAnEdge(Vertex, Vertex),
    ColorNotInList { vertex: Vertex, color: Color },
    ColorMatchedTwice { vertex: Vertex, color: Color, other: Vertex },
}

impl fmt::Display for AssignmentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentViolation::MissingList(v) => write!(f, "vertex {v} has no list"),
            AssignmentViolation::MissingMatching(u, v) => write!(f, "edge {u}-{v} has no matching"),
            AssignmentViolation::NotAnEdge(u, v) => write!(f, "matching given for non-edge {u}-{v}"),
            AssignmentViolation::ColorNotInList { vertex, color } => {
                write!(f, "colour {color} is not in the list of {vertex}")
            }
            AssignmentViolation::ColorMatchedTwice { vertex, color, other } => {
                write!(f, "colour {color} at {vertex} is matched twice towards {other}")
            }
        }
    }
}

pub fn validate_assignment(g: &PlaneGraph, ca: &CorrespondenceAssignment) -> Vec<AssignmentViolation> {
    let mut out = Vec::new();
    for v in g.vertices() {
        if !ca.lists.contains_key(&v) {
            out.push(AssignmentViolation::MissingList(v));
        }
    }
    let edges: BTreeSet<(Vertex, Vertex)> = g.edges().into_iter().map(|(u, v)| norm(u, v)).collect();
    for &(u, v) in &edges {
        if !ca.matchings.contains_key(&(u, v)) {
            out.push(AssignmentViolation::MissingMatching(u, v));
        }
    }
    for (&(u, v), m) in &ca.matchings {
        if !edges.contains(&(u, v)) {
            out.push(AssignmentViolation::NotAnEdge(u, v));
            continue;
        }
        let (mut seen_u, mut seen_v) = (BTreeSet::new(), BTreeSet::new());
        for &(a, b) in m {
            for (x, c) in [(u, a), (v, b)] {
                if !ca.list(x).contains(&c) {
                    out.push(AssignmentViolation::ColorNotInList { vertex: x, color: c });
                }
            }
            if !seen_u.insert(a) {
                out.push(AssignmentViolation::ColorMatchedTwice { vertex: u, color: a, other: v });
            }
            if !seen_v.insert(b) {
                out.push(AssignmentViolation::ColorMatchedTwice { vertex: v, color: b, other: u });
            }
        }
    }
    out
}

/// Identity matchings on common colours, which turns list colouring into
/// correspondence colouring.
pub fn from_lists(g: &PlaneGraph, lists: &BTreeMap<Vertex, BTreeSet<Color>>) -> CorrespondenceAssignment {
    let empty = BTreeSet::new();
    let matchings = g
        .edges()
        .into_iter()
        .map(|(u, v)| {
            let (u, v) = norm(u, v);
            let lu = lists.get(&u).unwrap_or(&empty);
            let lv = lists.get(&v).unwrap_or(&empty);
            ((u, v), lu.intersection(lv).map(|&c| (c, c)).collect())
        })
        .collect();
    CorrespondenceAssignment { lists: lists.clone(), matchings }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColoringViolation {
    Uncolored(Vertex),
    NotInList(Vertex, Color),
    Conflict(Vertex, Vertex),
}

impl fmt::Display for ColoringViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringViolation::Uncolored(v) => write!(f, "vertex {v} is not coloured"),
            ColoringViolation::NotInList(v, c) => write!(f, "vertex {v} has colour {c} outside its list"),
            ColoringViolation::Conflict(u, v) => write!(f, "edge {u}-{v} joins matched colours"),
        }
    }
}

pub fn validate_coloring(g: &PlaneGraph, ca: &CorrespondenceAssignment, phi: &Coloring) -> Vec<ColoringViolation> {
    let mut out = Vec::new();
    for v in g.vertices() {
        match phi.get(&v) {
            None => out.push(ColoringViolation::Uncolored(v)),
            Some(&c) if !ca.list(v).contains(&c) => out.push(ColoringViolation::NotInList(v, c)),
            _ => {}
        }
    }
    for (u, v) in g.edges() {
        let (u, v) = norm(u, v);
        if let (Some(&a), Some(&b)) = (phi.get(&u), phi.get(&v)) {
            if ca.matchings.get(&(u, v)).is_some_and(|m| m.contains(&(a, b))) {
                out.push(ColoringViolation::Conflict(u, v));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Error)]
pub enum ColoringError {
    #[error("vertex {vertex} has {have} colours but needs {need}")]
    ListTooShort { vertex: Vertex, have: usize, need: usize },
    #[error("vertex {0} has no weight")]
    MissingWeight(Vertex),
    #[error(transparent)]
    Sequence(#[from] OpError),
    #[error("sequence leaves vertex {0} uncoloured")]
    Incomplete(Vertex),
    #[error("no colour available at step {index} for vertex {vertex}")]
    NoPick { index: usize, vertex: Vertex },
}

/// Colours vertices in the order the sequence removes them. Each vertex keeps
/// exactly `f(v)+1` available colours; a save picks a colour whose partner
/// at the saved neighbour is already unavailable there.
pub fn color_via_sequence(
    g: &PlaneGraph,
    ca: &CorrespondenceAssignment,
    f: &WeightFn,
    seq: &[Operation],
) -> Result<Coloring, ColoringError> {
    // legality is checked up front so the picks below can rely on it
    crate::ops::run_sequence(g, f, seq).map_err(ColoringError::Sequence)?;
    let mut avail: BTreeMap<Vertex, BTreeSet<Color>> = BTreeMap::new();
    for v in g.vertices() {
        let fv = f.get(v).ok_or(ColoringError::MissingWeight(v))?;
        let need = (fv + 1).max(0) as usize;
        let list = ca.list(v);
        if list.len() < need {
            return Err(ColoringError::ListTooShort { vertex: v, have: list.len(), need });
        }
        avail.insert(v, list.iter().take(need).copied().collect());
    }
    let mut phi = Coloring::new();
    for (index, &op) in seq.iter().enumerate() {
        let v = op.vertex();
        if phi.contains_key(&v) || !g.contains(v) {
            continue;
        }
        let saved = match op {
            Operation::DelSave(_, w) if g.has_edge(v, w) && !phi.contains_key(&w) => Some(w),
            _ => None,
        };
        let here = &avail[&v];
        let pick = match saved {
            None => here.first().copied(),
            Some(w) => here.iter().copied().find(|&c| ca.partner(v, c, w).is_none_or(|p| !avail[&w].contains(&p))),
        }
        .ok_or(ColoringError::NoPick { index, vertex: v })?;
        phi.insert(v, pick);
        for &u in g.neighbors(v) {
            if phi.contains_key(&u) || Some(u) == saved {
                continue;
            }
            let au = avail.get_mut(&u).expect("every vertex has a set");
            let matched = ca.partner(v, pick, u).filter(|p| au.contains(p));
            match matched {
                Some(p) => {
                    au.remove(&p);
                }
                None => {
                    au.pop_last();
                }
            }
        }
    }
    if let Some(v) = g.vertices().find(|v| !phi.contains_key(v)) {
        return Err(ColoringError::Incomplete(v));
    }
    Ok(phi)
}

/// Number of valid colourings, by exhaustive search.
pub fn count_colorings(g: &PlaneGraph, ca: &CorrespondenceAssignment) -> BigUint {
    fn go(
        g: &PlaneGraph,
        ca: &CorrespondenceAssignment,
        order: &[Vertex],
        i: usize,
        phi: &mut Coloring,
    ) -> BigUint {
        let Some(&v) = order.get(i) else { return BigUint::from(1u32) };
        let mut total = BigUint::from(0u32);
        for &c in ca.list(v) {
            let ok = g.neighbors(v).iter().all(|&u| match phi.get(&u) {
                Some(&cu) => ca.partner(u, cu, v) != Some(c),
                None => true,
            });
            if ok {
                phi.insert(v, c);
                total += go(g, ca, order, i + 1, phi);
                phi.remove(&v);
            }
        }
        total
    }
    let order: Vec<Vertex> = g.vertices().collect();
    go(g, ca, &order, 0, &mut Coloring::new())
}

/// Product of the availabilities along `seq`, which equals the mean
/// availability raised to the number of vertices.
pub fn coloring_count_lower_bound(g: &PlaneGraph, f: &WeightFn, seq: &[Operation]) -> Result<(BigUint, f64), OpError> {
    let avg = average_availability(g, f, seq)?;
    if !crate::ops::removes_all(g, f, seq) {
        return Err(OpError::Incomplete);
    }
    let mean = avg.mean();
    Ok((avg.product, mean))
}
