//! Minimal weights and list sizes driven by per-vertex girth.

use std::collections::BTreeMap;

use crate::graph::{Girth, PlaneGraph, Vertex};
use crate::ops::WeightFn;

/// `max(7 - g, 2)`, with infinite girth giving 2.
pub fn local_girth_value(g: Girth) -> i64 {
    match g {
        Girth::Finite(k) if k < 5 => 7 - k as i64,
        _ => 2,
    }
}

pub fn local_girth_function(g: &PlaneGraph) -> WeightFn {
    let girths = g.girths_up_to(4);
    g.vertices().map(|v| (v, local_girth_value(girths[v]))).collect()
}

/// Smallest list sizes for a local girth list assignment: one more than the weight.
pub fn local_girth_list_sizes(g: &PlaneGraph) -> BTreeMap<Vertex, usize> {
    local_girth_function(g).iter().map(|(v, x)| (v, x as usize + 1)).collect()
}
