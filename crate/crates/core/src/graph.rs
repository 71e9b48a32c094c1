//! Plane graphs stored as rotation systems.
//!
//! Vertex ids are stable: deleting a vertex leaves a hole in the rotation
//! table instead of renumbering, so ids from a parent graph stay meaningful
//! in every subgraph the solver builds.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub type Vertex = usize;

/// Directed edge `(tail, head)`.
pub type Dart = (Vertex, Vertex);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("dart {0}->{1} is not in the graph")]
    NotADart(Vertex, Vertex),
    #[error("loop at vertex {0}")]
    Loop(Vertex),
    #[error("parallel edge {0}-{1}")]
    Parallel(Vertex, Vertex),
    #[error("rotation asymmetry: {1} is listed at {0} but not the reverse")]
    Asymmetric(Vertex, Vertex),
    #[error("component containing {vertex} violates Euler's formula: v={v} e={e} f={f}")]
    Euler { vertex: Vertex, v: usize, e: usize, f: usize },
    #[error("component containing {0} has no outer dart")]
    MissingOuter(Vertex),
    #[error("component containing {0} has more than one outer dart")]
    DuplicateOuter(Vertex),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("not a cycle: {0}")]
    NotACycle(String),
}

/// Per-vertex girth. `Infinite` sorts above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn class(self) -> GirthClass {
        girth_class(self)
    }

    pub fn is(self, g: usize) -> bool {
        self == Girth::Finite(g)
    }

    pub fn at_least(self, g: usize) -> bool {
        self >= Girth::Finite(g)
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GirthClass {
    Three,
    Four,
    AtLeastFive,
}

impl fmt::Display for GirthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GirthClass::Three => write!(f, "3"),
            GirthClass::Four => write!(f, "4"),
            GirthClass::AtLeastFive => write!(f, ">=5"),
        }
    }
}

pub fn girth_class(g: Girth) -> GirthClass {
    match g {
        Girth::Finite(3) => GirthClass::Three,
        Girth::Finite(4) => GirthClass::Four,
        _ => GirthClass::AtLeastFive,
    }
}

/// The closed outer face walk of a connected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryWalk {
    /// Tails of the darts of the walk, in walk order. A vertex may repeat
    /// when the graph has cutvertices.
    pub vertices: Vec<Vertex>,
    pub edges: BTreeSet<(Vertex, Vertex)>,
}

impl BoundaryWalk {
    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&norm(u, v))
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.vertices.iter().copied().collect()
    }

    /// True when the walk visits every vertex once and has at least 3 of them.
    pub fn is_simple_cycle(&self) -> bool {
        self.vertices.len() >= 3 && self.vertex_set().len() == self.vertices.len()
    }
}

/// A t-chord together with the two sides it separates.
#[derive(Debug, Clone)]
pub struct Chord {
    pub path: Vec<Vertex>,
    pub side1: PlaneGraph,
    pub side2: PlaneGraph,
}

impl Chord {
    pub fn order(&self) -> usize {
        self.path.len() - 1
    }
}

pub(crate) fn norm(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneGraph {
    rot: Vec<Option<Vec<Vertex>>>,
    outer: Vec<Dart>,
}

/// Dart orbits of a graph, indexed for quick lookup.
pub(crate) struct FaceMap {
    offset: Vec<usize>,
    face: Vec<usize>,
    pub faces: Vec<Vec<Dart>>,
}

impl FaceMap {
    fn build(g: &PlaneGraph) -> FaceMap {
        let mut offset = vec![0; g.rot.len() + 1];
        for v in 0..g.rot.len() {
            offset[v + 1] = offset[v] + g.degree(v);
        }
        let total = offset[g.rot.len()];
        let mut face = vec![usize::MAX; total];
        let mut faces = Vec::new();
        for u in g.vertices() {
            for (i, &v) in g.neighbors(u).iter().enumerate() {
                if face[offset[u] + i] != usize::MAX {
                    continue;
                }
                let id = faces.len();
                let mut walk = Vec::new();
                let mut d = (u, v);
                loop {
                    let slot = offset[d.0] + g.position(d.0, d.1).expect("dart");
                    face[slot] = id;
                    walk.push(d);
                    d = g.next_dart(d);
                    if d == (u, v) {
                        break;
                    }
                }
                faces.push(walk);
            }
        }
        FaceMap { offset, face, faces }
    }

    fn face_of(&self, g: &PlaneGraph, d: Dart) -> usize {
        self.face[self.offset[d.0] + g.position(d.0, d.1).expect("dart")]
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

impl PlaneGraph {
    /// Graph with no vertices.
    pub fn empty() -> Self {
        PlaneGraph { rot: Vec::new(), outer: Vec::new() }
    }

    /// Builds a graph on vertices `0..rot.len()`, all present.
    pub fn new(rot: Vec<Vec<Vertex>>, outer: Option<Dart>) -> Result<Self, GraphError> {
        let rot = rot.into_iter().map(Some).collect();
        Self::from_parts(rot, outer.into_iter().collect())
    }

    /// Builds a graph from a rotation table with holes, one outer dart per
    /// component that has at least one edge.
    pub fn from_parts(rot: Vec<Option<Vec<Vertex>>>, outer: Vec<Dart>) -> Result<Self, GraphError> {
        let g = PlaneGraph { rot, outer };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GraphError> {
        for v in self.vertices() {
            let mut seen = BTreeSet::new();
            for &w in self.neighbors(v) {
                if w == v {
                    return Err(GraphError::Loop(v));
                }
                if !self.contains(w) {
                    return Err(GraphError::UnknownVertex(w));
                }
                if !seen.insert(w) {
                    return Err(GraphError::Parallel(v, w));
                }
                if !self.neighbors(w).contains(&v) {
                    return Err(GraphError::Asymmetric(v, w));
                }
            }
        }
        for &(u, v) in &self.outer {
            if !self.contains(u) || self.position(u, v).is_none() {
                return Err(GraphError::NotADart(u, v));
            }
        }
        let fm = FaceMap::build(self);
        for comp in self.components() {
            let set: BTreeSet<Vertex> = comp.iter().copied().collect();
            let e: usize = comp.iter().map(|&v| self.degree(v)).sum::<usize>() / 2;
            let darts_here = self.outer.iter().filter(|d| set.contains(&d.0)).count();
            if e == 0 {
                if darts_here > 0 {
                    return Err(GraphError::DuplicateOuter(comp[0]));
                }
                continue;
            }
            match darts_here {
                0 => return Err(GraphError::MissingOuter(comp[0])),
                1 => {}
                _ => return Err(GraphError::DuplicateOuter(comp[0])),
            }
            let f = fm
                .faces
                .iter()
                .filter(|walk| set.contains(&walk[0].0))
                .count();
            if comp.len() + f != e + 2 {
                return Err(GraphError::Euler { vertex: comp[0], v: comp.len(), e, f });
            }
        }
        Ok(())
    }

    /// Size of the id space (one more than the largest id ever used).
    pub fn capacity(&self) -> usize {
        self.rot.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        matches!(self.rot.get(v), Some(Some(_)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.rot.iter().enumerate().filter(|(_, r)| r.is_some()).map(|(v, _)| v)
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.vertices().collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.rot.iter().filter(|r| r.is_some()).count()
    }

    pub fn num_edges(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.num_vertices() == 0
    }

    /// Clockwise rotation at `v`; empty for absent vertices.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        match self.rot.get(v) {
            Some(Some(r)) => r,
            _ => &[],
        }
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).contains(&v)
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for u in self.vertices() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn outer_darts(&self) -> &[Dart] {
        &self.outer
    }

    fn position(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.neighbors(u).iter().position(|&w| w == v)
    }

    /// Next dart of the face to the left of `d`: from `u->v` go to `v->w`
    /// where `w` precedes `u` in the rotation at `v`.
    pub fn next_dart(&self, d: Dart) -> Dart {
        let (u, v) = d;
        let r = self.neighbors(v);
        let i = self.position(v, u).expect("dart");
        (v, r[(i + r.len() - 1) % r.len()])
    }

    pub fn face_walk(&self, d: Dart) -> Result<Vec<Dart>, GraphError> {
        if !self.contains(d.0) || self.position(d.0, d.1).is_none() {
            return Err(GraphError::NotADart(d.0, d.1));
        }
        let mut walk = vec![d];
        let mut cur = self.next_dart(d);
        while cur != d {
            walk.push(cur);
            cur = self.next_dart(cur);
        }
        Ok(walk)
    }

    /// All faces as dart orbits.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        FaceMap::build(self).faces
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.rot.len()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in self.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    fn outer_dart_of(&self, v: Vertex) -> Option<Dart> {
        if self.degree(v) == 0 {
            return None;
        }
        let comp: BTreeSet<Vertex> = self.component_of(v).into_iter().collect();
        self.outer.iter().copied().find(|d| comp.contains(&d.0))
    }

    fn component_of(&self, s: Vertex) -> Vec<Vertex> {
        let mut seen = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in self.neighbors(x) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Outer face walk of a connected graph. A single vertex gives the walk
    /// `[v]`; the empty graph gives an empty walk.
    pub fn outer_boundary(&self) -> Result<BoundaryWalk, GraphError> {
        let comps = self.components();
        match comps.len() {
            0 => Ok(BoundaryWalk { vertices: Vec::new(), edges: BTreeSet::new() }),
            1 => Ok(self.component_boundary(comps[0][0])),
            _ => Err(GraphError::Disconnected),
        }
    }

    fn component_boundary(&self, v: Vertex) -> BoundaryWalk {
        match self.outer_dart_of(v) {
            None => BoundaryWalk { vertices: vec![v], edges: BTreeSet::new() },
            Some(d) => {
                let walk = self.face_walk(d).expect("outer dart");
                BoundaryWalk {
                    vertices: walk.iter().map(|d| d.0).collect(),
                    edges: walk.iter().map(|&(a, b)| norm(a, b)).collect(),
                }
            }
        }
    }

    /// Boundary vertices over all components.
    pub fn boundary_vertices(&self) -> BTreeSet<Vertex> {
        let mut out: BTreeSet<Vertex> = self.vertices().filter(|&v| self.degree(v) == 0).collect();
        for &d in &self.outer {
            out.extend(self.face_walk(d).expect("outer dart").into_iter().map(|d| d.0));
        }
        out
    }

    /// Boundary edges over all components, normalised `(min, max)`.
    pub fn boundary_edges(&self) -> BTreeSet<(Vertex, Vertex)> {
        let mut out = BTreeSet::new();
        for &d in &self.outer {
            out.extend(self.face_walk(d).expect("outer dart").into_iter().map(|(a, b)| norm(a, b)));
        }
        out
    }

    /// Subgraph induced by `keep`, with the embedding inherited and the outer
    /// face of each component set to the face containing the old outer face.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> PlaneGraph {
        let mut rot: Vec<Option<Vec<Vertex>>> = vec![None; self.rot.len()];
        for &v in keep {
            if self.contains(v) {
                rot[v] = Some(self.neighbors(v).iter().copied().filter(|w| keep.contains(w)).collect());
            }
        }
        let mut out = PlaneGraph { rot, outer: Vec::new() };
        let comps: Vec<Vec<Vertex>> =
            out.components().into_iter().filter(|c| out.degree(c[0]) > 0).collect();
        if comps.is_empty() {
            return out;
        }
        let mut label = vec![usize::MAX; self.rot.len()];
        for (i, comp) in comps.iter().enumerate() {
            for &v in comp {
                label[v] = i;
            }
        }
        // A kept dart of the old outer face still bounds the new outer face.
        let mut outer = vec![None; comps.len()];
        for &d in &self.outer {
            for (a, b) in self.face_walk(d).expect("outer dart") {
                if label[a] != usize::MAX && label[a] == label[b] && outer[label[a]].is_none() {
                    outer[label[a]] = Some((a, b));
                }
            }
        }
        let mut fm = None;
        for (i, comp) in comps.iter().enumerate() {
            if outer[i].is_some() {
                continue;
            }
            let fm = fm.get_or_insert_with(|| FaceMap::build(self));
            let mut uf = UnionFind::new(fm.faces.len());
            for (a, b) in self.edges() {
                if !(label[a] == i && label[b] == i) {
                    uf.union(fm.face_of(self, (a, b)), fm.face_of(self, (b, a)));
                }
            }
            let parent_outer = self.outer_dart_of(comp[0]).expect("parent component has edges");
            let target = uf.find(fm.face_of(self, parent_outer));
            let dart = comp
                .iter()
                .flat_map(|&u| out.neighbors(u).iter().map(move |&v| (u, v)))
                .find(|&d| uf.find(fm.face_of(self, d)) == target)
                .expect("outer face of a component touches one of its darts");
            outer[i] = Some(dart);
        }
        let outer = outer.into_iter().map(|d| d.expect("set above")).collect();
        out.outer = outer;
        out
    }

    pub fn remove_vertices(&self, gone: &BTreeSet<Vertex>) -> PlaneGraph {
        let keep: BTreeSet<Vertex> = self.vertices().filter(|v| !gone.contains(v)).collect();
        self.induced(&keep)
    }

    pub fn remove_vertex(&self, v: Vertex) -> PlaneGraph {
        self.remove_vertices(&BTreeSet::from([v]))
    }

    /// Length of a shortest cycle through `v`.
    pub fn girth_of_vertex(&self, v: Vertex) -> Result<Girth, GraphError> {
        if !self.contains(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        let mut dist = vec![usize::MAX; self.rot.len()];
        let mut branch = vec![usize::MAX; self.rot.len()];
        Ok(self.girth_with(v, usize::MAX - 1, &mut dist, &mut branch, &mut Vec::new()))
    }

    /// One BFS from `v`, labelling each vertex by the neighbour of `v` it
    /// hangs from. A shortest cycle through `v` closes along an edge joining
    /// two branches, or along an edge back to `v` from a deeper vertex.
    /// Cycles longer than `cap` are not looked for.
    fn girth_with(&self, v: Vertex, cap: usize, dist: &mut [usize], branch: &mut [usize], q: &mut Vec<Vertex>) -> Girth {
        q.clear();
        q.push(v);
        dist[v] = 0;
        branch[v] = v;
        let mut best = usize::MAX;
        let mut i = 0;
        while i < q.len() {
            let x = q[i];
            i += 1;
            if 2 * dist[x] + 1 >= best.min(cap + 1) {
                break;
            }
            for &y in self.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    branch[y] = if x == v { y } else { branch[x] };
                    q.push(y);
                } else if branch[y] != branch[x] && !(x == v && dist[y] == 1) && !(y == v && dist[x] == 1) {
                    best = best.min(dist[x] + dist[y] + 1);
                }
            }
        }
        for &u in q.iter() {
            dist[u] = usize::MAX;
            branch[u] = usize::MAX;
        }
        if best <= cap {
            Girth::Finite(best)
        } else {
            Girth::Infinite
        }
    }

    /// Girth of every vertex, indexed by id; absent ids read as `Infinite`.
    pub fn girths(&self) -> Vec<Girth> {
        self.girths_up_to(usize::MAX - 1)
    }

    /// Like [`girths`](Self::girths), but a vertex whose shortest cycle is
    /// longer than `cap` reads as `Infinite`. With `cap >= 4` the girth
    /// class of every vertex is still exact.
    pub fn girths_up_to(&self, cap: usize) -> Vec<Girth> {
        let mut out = vec![Girth::Infinite; self.rot.len()];
        let mut dist = vec![usize::MAX; self.rot.len()];
        let mut branch = vec![usize::MAX; self.rot.len()];
        let mut q = Vec::with_capacity(self.rot.len());
        for v in self.vertices() {
            out[v] = self.girth_with(v, cap, &mut dist, &mut branch, &mut q);
        }
        out
    }

    pub fn is_2_connected(&self) -> bool {
        self.num_vertices() >= 3 && self.is_connected() && self.find_cutvertex().is_none()
    }

    /// Least-id cutvertex of a connected graph, if any.
    pub fn find_cutvertex(&self) -> Option<Vertex> {
        let n = self.rot.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut cut = vec![false; n];
        let mut time = 0;
        for root in self.vertices() {
            if disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (vertex, parent, next neighbour index)
            let mut stack: Vec<(Vertex, Vertex, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            while let Some(&mut (x, parent, ref mut i)) = stack.last_mut() {
                if *i < self.degree(x) {
                    let y = self.neighbors(x)[*i];
                    *i += 1;
                    if disc[y] == usize::MAX {
                        disc[y] = time;
                        low[y] = time;
                        time += 1;
                        if x == root {
                            root_children += 1;
                        }
                        stack.push((y, x, 0));
                    } else if y != parent {
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[x]);
                        if parent != root && low[x] >= disc[parent] {
                            cut[parent] = true;
                        }
                    }
                }
            }
            if root_children >= 2 {
                cut[root] = true;
            }
        }
        (0..n).find(|&v| cut[v])
    }

    fn check_cycle(&self, c: &[Vertex]) -> Result<(), GraphError> {
        if c.len() < 3 {
            return Err(GraphError::NotACycle(format!("{c:?} is too short")));
        }
        let set: BTreeSet<Vertex> = c.iter().copied().collect();
        if set.len() != c.len() {
            return Err(GraphError::NotACycle(format!("{c:?} repeats a vertex")));
        }
        for i in 0..c.len() {
            let (a, b) = (c[i], c[(i + 1) % c.len()]);
            if !self.contains(a) {
                return Err(GraphError::UnknownVertex(a));
            }
            if !self.has_edge(a, b) {
                return Err(GraphError::NotACycle(format!("{a}-{b} is not an edge")));
            }
        }
        Ok(())
    }

    /// Vertices embedded strictly inside the cycle `c`.
    pub fn cycle_interior(&self, c: &[Vertex]) -> Result<BTreeSet<Vertex>, GraphError> {
        self.check_cycle(c)?;
        let fm = FaceMap::build(self);
        Ok(self.cycle_interior_with(&fm, c))
    }

    pub(crate) fn face_map(&self) -> FaceMap {
        FaceMap::build(self)
    }

    pub(crate) fn cycle_interior_with(&self, fm: &FaceMap, c: &[Vertex]) -> BTreeSet<Vertex> {
        let cyc: BTreeSet<(Vertex, Vertex)> =
            (0..c.len()).map(|i| norm(c[i], c[(i + 1) % c.len()])).collect();
        let mut uf = UnionFind::new(fm.faces.len());
        for (a, b) in self.edges() {
            if !cyc.contains(&(a, b)) {
                uf.union(fm.face_of(self, (a, b)), fm.face_of(self, (b, a)));
            }
        }
        let outer = uf.find(fm.face_of(self, self.outer_dart_of(c[0]).expect("cycle has edges")));
        let on_cycle: BTreeSet<Vertex> = c.iter().copied().collect();
        self.component_of(c[0])
            .into_iter()
            .filter(|v| !on_cycle.contains(v))
            .filter(|&v| {
                let w = self.neighbors(v)[0];
                uf.find(fm.face_of(self, (v, w))) != outer
            })
            .collect()
    }

    /// Splits a 2-connected graph along a path `h` whose ends are on the
    /// outer boundary and whose internal vertices are not. Returns the two
    /// sides as induced subgraphs, or `None` when `h` does not separate the
    /// graph into two sides with private vertices or is not induced.
    pub fn separate(&self, h: &[Vertex]) -> Option<(PlaneGraph, PlaneGraph)> {
        let fm = FaceMap::build(self);
        self.separate_with(&fm, h)
    }

    fn separate_with(&self, fm: &FaceMap, h: &[Vertex]) -> Option<(PlaneGraph, PlaneGraph)> {
        if h.len() < 2 {
            return None;
        }
        let hset: BTreeSet<Vertex> = h.iter().copied().collect();
        if hset.len() != h.len() {
            return None;
        }
        // H must be an induced path
        for (i, &a) in h.iter().enumerate() {
            for (j, &b) in h.iter().enumerate() {
                if i < j && (self.has_edge(a, b) != (j == i + 1)) {
                    return None;
                }
            }
        }
        let outer_dart = self.outer_dart_of(h[0])?;
        let outer_face = fm.face_of(self, outer_dart);
        let bedges: BTreeSet<(Vertex, Vertex)> =
            fm.faces[outer_face].iter().map(|&(a, b)| norm(a, b)).collect();
        let hedges: BTreeSet<(Vertex, Vertex)> = h.windows(2).map(|w| norm(w[0], w[1])).collect();
        let mut uf = UnionFind::new(fm.faces.len());
        for (a, b) in self.edges() {
            if !hedges.contains(&(a, b)) && !bedges.contains(&(a, b)) {
                uf.union(fm.face_of(self, (a, b)), fm.face_of(self, (b, a)));
            }
        }
        let comp: BTreeSet<Vertex> = self.component_of(h[0]).into_iter().collect();
        let mut classes: BTreeSet<usize> = BTreeSet::new();
        for (i, walk) in fm.faces.iter().enumerate() {
            if i != outer_face && comp.contains(&walk[0].0) {
                classes.insert(uf.find(i));
            }
        }
        let classes: Vec<usize> = classes.into_iter().collect();
        if classes.len() != 2 {
            return None;
        }
        let mut sides: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(), BTreeSet::new()];
        for (i, walk) in fm.faces.iter().enumerate() {
            if i == outer_face || !comp.contains(&walk[0].0) {
                continue;
            }
            let c = uf.find(i);
            let k = classes.iter().position(|&x| x == c).expect("class");
            sides[k].extend(walk.iter().map(|d| d.0));
        }
        let inter: BTreeSet<Vertex> = sides[0].intersection(&sides[1]).copied().collect();
        if inter != hset || sides[0].len() == hset.len() || sides[1].len() == hset.len() {
            return None;
        }
        Some((self.induced(&sides[0]), self.induced(&sides[1])))
    }

    /// All t-chords for t in {0,1,2,3}. Sides are ordered so that side1 holds
    /// at least as many vertices of `reference` as side2, ties going to the
    /// side with the smaller least private vertex. Paths are listed with the
    /// smaller endpoint first and sorted lexicographically.
    pub fn find_chords(&self, t: usize, reference: Option<&[Vertex]>) -> Vec<Chord> {
        let refset: BTreeSet<Vertex> = reference.unwrap_or(&[]).iter().copied().collect();
        let orient = |path: Vec<Vertex>, a: PlaneGraph, b: PlaneGraph| {
            let count = |g: &PlaneGraph| refset.iter().filter(|&&v| g.contains(v)).count();
            let hs: BTreeSet<Vertex> = path.iter().copied().collect();
            let least = |g: &PlaneGraph| g.vertices().find(|v| !hs.contains(v));
            let (ca, cb) = (count(&a), count(&b));
            if ca > cb || (ca == cb && least(&a) < least(&b)) {
                Chord { path, side1: a, side2: b }
            } else {
                Chord { path, side1: b, side2: a }
            }
        };
        let mut out = Vec::new();
        if t == 0 {
            if !self.is_connected() {
                return out;
            }
            for u in self.vertices() {
                let rest = self.remove_vertex(u);
                let comps = rest.components();
                if comps.len() < 2 {
                    continue;
                }
                let first: BTreeSet<Vertex> = comps[0].iter().copied().chain([u]).collect();
                let other: BTreeSet<Vertex> =
                    self.vertices().filter(|v| *v == u || !first.contains(v)).collect();
                out.push(orient(vec![u], self.induced(&first), self.induced(&other)));
            }
            return out;
        }
        if !self.is_connected() || t > 3 {
            return out;
        }
        let walk = match self.outer_boundary() {
            Ok(w) if w.is_simple_cycle() => w,
            _ => return out,
        };
        let bset = walk.vertex_set();
        let fm = FaceMap::build(self);
        let mut paths = Vec::new();
        let mut cur = Vec::new();
        for &s in &bset {
            cur.push(s);
            self.extend_chord_paths(t, &bset, &walk, &mut cur, &mut paths);
            cur.pop();
        }
        paths.sort();
        for path in paths {
            if let Some((a, b)) = self.separate_with(&fm, &path) {
                out.push(orient(path, a, b));
            }
        }
        out
    }

    fn extend_chord_paths(
        &self,
        t: usize,
        bset: &BTreeSet<Vertex>,
        walk: &BoundaryWalk,
        cur: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let last = *cur.last().expect("nonempty");
        for &y in self.neighbors(last) {
            if cur.contains(&y) {
                continue;
            }
            if cur.len() == t {
                if bset.contains(&y) && cur[0] < y && !(t == 1 && walk.contains_edge(cur[0], y)) {
                    let mut p = cur.clone();
                    p.push(y);
                    out.push(p);
                }
            } else if !bset.contains(&y) {
                cur.push(y);
                self.extend_chord_paths(t, bset, walk, cur, out);
                cur.pop();
            }
        }
    }
}
