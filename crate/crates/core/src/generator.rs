//! Seeded random plane graphs: grow a triangulation by face splitting, then
//! thin it out while keeping it connected.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{PlaneGraph, Vertex};

/// Inserts `x` right after `after` in the rotation of `at`.
fn insert_after(rot: &mut [Vec<Vertex>], at: Vertex, after: Vertex, x: Vertex) {
    let i = rot[at].iter().position(|&y| y == after).expect("rotation entry");
    rot[at].insert(i + 1, x);
}

/// Random triangulation on `n` vertices with each edge kept with
/// probability `keep`, subject to staying connected. Deterministic in `seed`.
pub fn generate_plane_graph(seed: u64, n: usize, keep: f64) -> PlaneGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n.max(1);
    if n < 3 {
        let rot = if n == 1 { vec![vec![]] } else { vec![vec![1], vec![0]] };
        let outer = (n == 2).then_some((0, 1));
        return PlaneGraph::new(rot, outer).expect("tiny graph");
    }
    let mut rot: Vec<Vec<Vertex>> = vec![vec![1, 2], vec![2, 0], vec![0, 1]];
    // the face of this dart stays outer while the triangulation grows
    let mut outer = (0usize, 1usize);
    for x in 3..n {
        let g = PlaneGraph::new(rot.clone(), Some(outer)).expect("valid triangulation");
        let outer_face = g.face_walk(outer).expect("outer dart");
        let faces: Vec<Vec<(Vertex, Vertex)>> =
            g.faces().into_iter().filter(|f| !f.contains(&outer_face[0])).collect();
        let f = faces.choose(&mut rng).expect("inner face");
        let (a, b, c) = (f[0].0, f[1].0, f[2].0);
        // darts a->b, b->c, c->a bound the face; x goes inside
        rot.push(vec![a, b, c]);
        insert_after(&mut rot, a, b, x);
        insert_after(&mut rot, b, c, x);
        insert_after(&mut rot, c, a, x);
    }
    let mut edges: Vec<(Vertex, Vertex)> =
        (0..n).flat_map(|u| rot[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v))).collect();
    edges.shuffle(&mut rng);
    for (u, v) in edges {
        if rng.gen::<f64>() < keep {
            continue;
        }
        let mut trial = rot.clone();
        trial[u].retain(|&y| y != v);
        trial[v].retain(|&y| y != u);
        if !connected(&trial) {
            continue;
        }
        // move the outer dart off the deleted edge, staying on the outer face
        if norm(outer) == norm((u, v)) {
            let g = PlaneGraph::new(rot.clone(), Some(outer)).expect("valid");
            let walk = g.face_walk(outer).expect("outer dart");
            match walk.iter().find(|&&d| norm(d) != norm((u, v))) {
                Some(&d) => outer = d,
                None => continue,
            }
        }
        rot = trial;
    }
    PlaneGraph::new(rot, Some(outer)).expect("generator keeps a valid embedding")
}

fn norm((u, v): (Vertex, Vertex)) -> (Vertex, Vertex) {
    (u.min(v), u.max(v))
}

fn connected(rot: &[Vec<Vertex>]) -> bool {
    let mut seen = vec![false; rot.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &rot[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Seeds producing graphs whose vertices all have girth at least five.
pub fn girth5_instances(start_seed: u64, n: usize, keep: f64, count: usize) -> Vec<(u64, PlaneGraph)> {
    let mut out = Vec::new();
    let mut seed = start_seed;
    while out.len() < count {
        let g = generate_plane_graph(seed, n, keep);
        if g.girths_up_to(4).iter().enumerate().all(|(v, gi)| !g.contains(v) || gi.at_least(5)) {
            out.push((seed, g));
        }
        seed += 1;
    }
    out
}
