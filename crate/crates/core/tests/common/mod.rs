//! Shared test support: exhaustive small plane maps, canvas families and
//! oracles written independently of the library code they check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use planar_wd::canvas::{is_acceptable, Canvas};
use planar_wd::coloring::{Color, CorrespondenceAssignment};
use planar_wd::generator::generate_plane_graph;
use planar_wd::graph::{Girth, PlaneGraph, Vertex};
use planar_wd::ops::{Operation, WeightFn};
use rand::seq::SliceRandom;
use rand::Rng;

type Rot = Vec<Vec<Vertex>>;

/// Successor dart on the face to the left, matching the library convention.
fn next(rot: &Rot, (u, v): (Vertex, Vertex)) -> (Vertex, Vertex) {
    let r = &rot[v];
    let i = r.iter().position(|&x| x == u).unwrap();
    (v, r[(i + r.len() - 1) % r.len()])
}

fn faces(rot: &Rot) -> Vec<Vec<(Vertex, Vertex)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for u in 0..rot.len() {
        for &v in &rot[u] {
            if seen.contains(&(u, v)) {
                continue;
            }
            let mut f = vec![(u, v)];
            seen.insert((u, v));
            let mut d = next(rot, (u, v));
            while d != (u, v) {
                seen.insert(d);
                f.push(d);
                d = next(rot, d);
            }
            out.push(f);
        }
    }
    out
}

/// Relabelling code of the map traversed from root dart `(u, v)`.
fn code_from(rot: &Rot, root: (Vertex, Vertex)) -> Vec<usize> {
    let n = rot.len();
    let mut label = vec![usize::MAX; n];
    let mut order = vec![root.0];
    let mut start = vec![root.1; n];
    label[root.0] = 0;
    let mut out = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        let r = &rot[u];
        let s = r.iter().position(|&x| x == start[u]).unwrap();
        out.push(r.len());
        for j in 0..r.len() {
            let w = r[(s + j) % r.len()];
            if label[w] == usize::MAX {
                label[w] = order.len();
                start[w] = u;
                order.push(w);
            }
            out.push(label[w]);
        }
        i += 1;
    }
    out
}

fn canonical(rot: &Rot, roots: impl Iterator<Item = (Vertex, Vertex)>) -> Vec<usize> {
    roots.map(|d| code_from(rot, d)).min().unwrap_or_default()
}

fn darts(rot: &Rot) -> Vec<(Vertex, Vertex)> {
    (0..rot.len()).flat_map(|u| rot[u].iter().map(move |&v| (u, v))).collect()
}

/// Corners of a face: for each dart `(p, a)` of the walk, inserting a new
/// neighbour of `a` right after `pred_a(p)` puts it inside this face.
fn insert_in_corner(rot: &mut Rot, a: Vertex, arrive_from: Vertex, x: Vertex) {
    if rot[a].is_empty() {
        rot[a].push(x);
        return;
    }
    let r = &rot[a];
    let i = r.iter().position(|&y| y == arrive_from).unwrap();
    // new neighbour goes just before `arrive_from`
    rot[a].insert(i, x);
}

/// Every simple connected plane map with at most `max_n` vertices, up to
/// orientation-preserving isomorphism, with every face in turn as the outer
/// face (again deduplicated).
pub fn plane_maps(max_n: usize) -> Vec<PlaneGraph> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut frontier: Vec<Rot> = vec![vec![vec![]]];
    let mut all: Vec<Rot> = vec![vec![vec![]]];
    seen.insert(vec![0]);
    while let Some(rot) = frontier.pop() {
        let n = rot.len();
        let mut children: Vec<Rot> = Vec::new();
        // pendant vertex in any corner
        if n < max_n {
            if n == 1 {
                children.push(vec![vec![1], vec![0]]);
            } else {
                for (p, a) in darts(&rot) {
                    let mut r = rot.clone();
                    r.push(vec![a]);
                    insert_in_corner(&mut r, a, p, n);
                    children.push(r);
                }
            }
        }
        // chord across a face
        for f in faces(&rot) {
            for i in 0..f.len() {
                for j in 0..f.len() {
                    let (p, a) = f[i];
                    let (q, b) = f[j];
                    if i == j || a == b || rot[a].contains(&b) {
                        continue;
                    }
                    let mut r = rot.clone();
                    insert_in_corner(&mut r, a, p, b);
                    insert_in_corner(&mut r, b, q, a);
                    children.push(r);
                }
            }
        }
        for r in children {
            if PlaneGraph::new(r.clone(), Some((0, r[0][0]))).is_err() {
                continue;
            }
            let code = canonical(&r, darts(&r).into_iter());
            if seen.insert(code) {
                all.push(r.clone());
                frontier.push(r);
            }
        }
    }
    let mut out = Vec::new();
    for rot in all {
        if rot.len() == 1 {
            out.push(PlaneGraph::new(rot, None).unwrap());
            continue;
        }
        let mut outer_seen = HashSet::new();
        for f in faces(&rot) {
            let code = canonical(&rot, f.iter().copied());
            if outer_seen.insert(code) {
                out.push(PlaneGraph::new(rot.clone(), Some(f[0])).unwrap());
            }
        }
    }
    out
}

/// Simple paths and short cycles in the outer boundary graph, usable as `P`.
fn boundary_paths(g: &PlaneGraph) -> Vec<Vec<Vertex>> {
    let bedges = g.boundary_edges();
    let badj = |u: Vertex| -> Vec<Vertex> {
        bedges.iter().filter_map(|&(a, b)| if a == u { Some(b) } else if b == u { Some(a) } else { None }).collect()
    };
    let mut out = vec![vec![]];
    fn grow(cur: &mut Vec<Vertex>, badj: &dyn Fn(Vertex) -> Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        out.push(cur.clone());
        if cur.len() == 4 {
            return;
        }
        for w in badj(*cur.last().unwrap()) {
            if !cur.contains(&w) {
                cur.push(w);
                grow(cur, badj, out);
                cur.pop();
            }
        }
    }
    for v in g.boundary_vertices() {
        grow(&mut vec![v], &badj, &mut out);
    }
    out.retain(|p| p.is_empty() || is_acceptable(g, p));
    out
}

fn independent_subsets(g: &PlaneGraph, pool: &[Vertex]) -> Vec<BTreeSet<Vertex>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << pool.len()) {
        let s: BTreeSet<Vertex> = (0..pool.len()).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]).collect();
        if s.iter().all(|&v| g.neighbors(v).iter().all(|w| !s.contains(w))) {
            out.push(s);
        }
    }
    out
}

/// Every valid canvas on `g` with minimal weights.
pub fn canvases_of(g: &PlaneGraph) -> Vec<Canvas> {
    let girths = g.girths();
    let bd = g.boundary_vertices();
    let mut out = Vec::new();
    for p in boundary_paths(g) {
        let free: Vec<Vertex> = bd.iter().copied().filter(|v| !p.contains(v)).collect();
        let a_pool: Vec<Vertex> = free.iter().copied().filter(|&v| girths[v].at_least(5)).collect();
        let b_pool: Vec<Vertex> = free.iter().copied().filter(|&v| girths[v].is(3)).collect();
        for a in independent_subsets(g, &a_pool) {
            for b in independent_subsets(g, &b_pool) {
                let mut k = Canvas::new(g.clone(), p.clone(), a.clone(), b, WeightFn::new());
                k.f = k.minimal_f();
                if k.is_valid() {
                    out.push(k);
                }
            }
        }
    }
    out
}

/// Random valid canvas on a generated graph, or `None` if the draw fails.
pub fn random_canvas(rng: &mut impl Rng, seed: u64, n: usize, keep: f64) -> Option<Canvas> {
    let g = generate_plane_graph(seed, n, keep);
    let paths = boundary_paths(&g);
    let p = paths.choose(rng)?.clone();
    let girths = g.girths();
    let (mut a, mut b) = (BTreeSet::new(), BTreeSet::new());
    for v in g.boundary_vertices() {
        if p.contains(&v) || !rng.gen_bool(0.4) {
            continue;
        }
        let set = if girths[v].at_least(5) { &mut a } else if girths[v].is(3) { &mut b } else { continue };
        if g.neighbors(v).iter().all(|w| !set.contains(w)) {
            set.insert(v);
        }
    }
    let mut k = Canvas::new(g, p, a, b, WeightFn::new());
    k.f = k.minimal_f();
    k.is_valid().then_some(k)
}

/// Shortest cycle through `v` by enumerating simple cycles.
pub fn brute_force_girth(g: &PlaneGraph, v: Vertex) -> Girth {
    fn walk(g: &PlaneGraph, s: Vertex, cur: Vertex, on: &mut Vec<Vertex>, best: &mut Option<usize>) {
        for &w in g.neighbors(cur) {
            if w == s && on.len() >= 3 {
                *best = Some(best.map_or(on.len(), |b| b.min(on.len())));
            } else if !on.contains(&w) && best.is_none_or(|b| on.len() + 1 < b) {
                on.push(w);
                walk(g, s, w, on, best);
                on.pop();
            }
        }
    }
    let mut best = None;
    walk(g, v, v, &mut vec![v], &mut best);
    match best {
        Some(k) => Girth::Finite(k),
        None => Girth::Infinite,
    }
}

/// Legality check written from the definitions, independent of the simulator.
pub fn oracle_removes_all(g: &PlaneGraph, f: &WeightFn, seq: &[Operation]) -> bool {
    oracle_run(g, f, seq).is_some_and(|left| left.is_empty())
}

/// Vertices left after `seq` if every step is legal.
pub fn oracle_run(g: &PlaneGraph, f: &WeightFn, seq: &[Operation]) -> Option<BTreeSet<Vertex>> {
    let mut alive: BTreeSet<Vertex> = g.vertices().collect();
    let mut val: BTreeMap<Vertex, i64> = alive.iter().map(|&v| (v, f[v])).collect();
    for &op in seq {
        if alive.iter().any(|v| val[v] < 0) {
            return None;
        }
        let (v, saved) = match op {
            Operation::Del(v) => (v, None),
            Operation::DelSave(v, w) => (v, Some(w)),
        };
        if !alive.contains(&v) {
            continue;
        }
        let nbrs: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|w| alive.contains(w)).collect();
        // a save aimed at a non-neighbour is a plain deletion
        let saved = saved.filter(|w| nbrs.contains(w));
        if let Some(w) = saved {
            if val[&v] <= val[&w] {
                return None;
            }
        }
        alive.remove(&v);
        for u in nbrs {
            if Some(u) != saved {
                *val.get_mut(&u).unwrap() -= 1;
            }
        }
        if alive.iter().any(|v| val[v] < 0) {
            return None;
        }
    }
    Some(alive)
}

/// Lists of exactly `f(v)+1` colours drawn from `0..palette`, with random
/// matchings on every edge.
pub fn random_assignment(rng: &mut impl Rng, g: &PlaneGraph, f: &WeightFn, palette: Color) -> CorrespondenceAssignment {
    let mut lists = BTreeMap::new();
    for v in g.vertices() {
        let mut all: Vec<Color> = (0..palette.max(f[v] as Color + 1)).collect();
        all.shuffle(rng);
        lists.insert(v, all.into_iter().take((f[v] + 1) as usize).collect::<BTreeSet<_>>());
    }
    let mut matchings = BTreeMap::new();
    for (u, v) in g.edges() {
        let (u, v) = (u.min(v), u.max(v));
        let mut lu: Vec<Color> = lists[&u].iter().copied().collect();
        let mut lv: Vec<Color> = lists[&v].iter().copied().collect();
        lu.shuffle(rng);
        lv.shuffle(rng);
        let k = rng.gen_range(0..=lu.len().min(lv.len()));
        matchings.insert((u, v), lu.into_iter().zip(lv).take(k).collect());
    }
    CorrespondenceAssignment { lists, matchings }
}

/// Triangulated disc made of concentric rings around a hub, the outer ring
/// being the boundary. Consecutive rings are joined by a zigzag strip, so
/// interior vertices have degree about 6 and boundary vertices about 4.
pub fn ring_disc(rng: &mut impl Rng) -> PlaneGraph {
    use std::f64::consts::TAU;
    let rings = rng.gen_range(1..=3);
    let mut lens = vec![rng.gen_range(5..=9usize)];
    for _ in 1..rings {
        let l = *lens.last().unwrap() as i64 + rng.gen_range(-1..=1);
        lens.push(l.max(5) as usize);
    }
    let mut angle: Vec<f64> = Vec::new();
    let mut radius: Vec<f64> = Vec::new();
    let mut ring_ids: Vec<Vec<Vertex>> = Vec::new();
    for (r, &l) in lens.iter().enumerate() {
        let off = if r == 0 { 0.0 } else { rng.gen_range(0.05..0.95) * TAU / l as f64 };
        let ids: Vec<Vertex> = (0..l).map(|i| {
            angle.push(off + TAU * i as f64 / l as f64);
            radius.push((rings - r) as f64);
            angle.len() - 1
        }).collect();
        ring_ids.push(ids);
    }
    let hub = angle.len();
    angle.push(0.0);
    radius.push(0.0);
    let mut edges: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    let mut add = |a: Vertex, b: Vertex| {
        edges.insert((a.min(b), a.max(b)));
    };
    for ring in &ring_ids {
        for i in 0..ring.len() {
            add(ring[i], ring[(i + 1) % ring.len()]);
        }
    }
    for w in ring_ids.windows(2) {
        let (outer, inner) = (&w[0], &w[1]);
        let (m, n) = (outer.len(), inner.len());
        // unwrapped angles so both sequences increase past a full turn
        let ta = |i: usize| angle[outer[i % m]] + TAU * (i / m) as f64;
        let tb = |j: usize| angle[inner[j % n]] + TAU * (j / n) as f64;
        let (mut i, mut j) = (0, 0);
        add(outer[0], inner[0]);
        while i < m || j < n {
            if j >= n || (i < m && ta(i + 1) < tb(j + 1)) {
                i += 1;
            } else {
                j += 1;
            }
            add(outer[i % m], inner[j % n]);
        }
    }
    for &v in ring_ids.last().unwrap() {
        add(v, hub);
    }
    let pos = |v: Vertex| (radius[v] * angle[v].cos(), radius[v] * angle[v].sin());
    let mut rot: Rot = vec![Vec::new(); hub + 1];
    for &(a, b) in &edges {
        rot[a].push(b);
        rot[b].push(a);
    }
    for (v, r) in rot.iter_mut().enumerate() {
        let (x, y) = pos(v);
        r.sort_by(|&p, &q| {
            let (px, py) = pos(p);
            let (qx, qy) = pos(q);
            (py - y).atan2(px - x).partial_cmp(&(qy - y).atan2(qx - x)).unwrap()
        });
    }
    let b = &ring_ids[0];
    for d in [(b[0], b[1]), (b[1], b[0])] {
        let g = PlaneGraph::new(rot.clone(), Some(d)).unwrap();
        if g.face_walk(d).unwrap().len() == b.len() {
            return g;
        }
    }
    unreachable!("outer ring bounds a face")
}

/// Exceptional type (1, 2 or 3) read straight off the definitions; `A` and
/// `B` are taken on `G - P`, and `B` only at girth-3 vertices.
pub fn oracle_exception_type(k: &Canvas) -> Option<u8> {
    let p = &k.p;
    let n = p.len();
    let is_cycle = n >= 3 && k.g.has_edge(p[0], p[n - 1]);
    if is_cycle || !(3..=4).contains(&n) {
        return None;
    }
    let girth = |v| brute_force_girth(&k.g, v);
    let a: Vec<Vertex> = k.a.iter().copied().filter(|&v| k.g.contains(v) && !p.contains(&v)).collect();
    let b: Vec<Vertex> =
        k.b.iter().copied().filter(|&v| k.g.contains(v) && !p.contains(&v) && girth(v) == Girth::Finite(3)).collect();
    let adj = |x, y| k.g.has_edge(x, y);
    if n == 3 {
        return b.iter().any(|&v| p.iter().all(|&u| adj(u, v))).then_some(1);
    }
    if a.iter().any(|&v| adj(v, p[0]) && adj(v, p[3])) {
        return Some(2);
    }
    let rev: Vec<Vertex> = p.iter().rev().copied().collect();
    for q in [p.clone(), rev] {
        for &v1 in &b {
            if adj(v1, q[0]) && adj(v1, q[1]) && a.iter().any(|&v2| adj(v2, q[3]) && adj(v2, v1)) {
                return Some(3);
            }
        }
    }
    None
}

/// A random legal sequence emptying `g` from `f`, preferring saves, or
/// `None` if a few greedy attempts all get stuck.
pub fn random_legal_sequence(rng: &mut impl Rng, g: &PlaneGraph, f: &WeightFn) -> Option<Vec<Operation>> {
    use planar_wd::ops::Simulator;
    'attempt: for _ in 0..20 {
        let mut sim = Simulator::new(g, f, &BTreeSet::new()).ok()?;
        let mut seq = Vec::new();
        while !sim.is_empty() {
            let mut saves = Vec::new();
            let mut dels = Vec::new();
            for v in sim.remaining() {
                if sim.check(Operation::Del(v)).is_ok() {
                    dels.push(Operation::Del(v));
                }
                for w in sim.neighbors(v).collect::<Vec<_>>() {
                    if sim.check(Operation::DelSave(v, w)).is_ok() {
                        saves.push(Operation::DelSave(v, w));
                    }
                }
            }
            let pool = if !saves.is_empty() && (dels.is_empty() || rng.gen_bool(0.7)) { &saves } else { &dels };
            let Some(&op) = pool.choose(rng) else { continue 'attempt };
            sim.apply(op);
            seq.push(op);
        }
        return Some(seq);
    }
    None
}
