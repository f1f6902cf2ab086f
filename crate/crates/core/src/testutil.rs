//! Shared helpers for in-crate tests.

use crate::digraph::Digraph;
use crate::rng::Rng;

pub(crate) fn random_digraph(rng: &mut Rng, max_v: usize, max_e: usize) -> Digraph {
    let nv = 1 + rng.below_usize(max_v);
    let ne = rng.below_usize(max_e + 1);
    let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let edges = (0..ne)
        .map(|i| {
            (
                format!("e{i}"),
                format!("v{}", rng.below_usize(nv)),
                format!("v{}", rng.below_usize(nv)),
            )
        })
        .collect();
    Digraph::new(vertices, edges).unwrap()
}

/// A random digraph guaranteed connected (grown from a random tree).
#[allow(dead_code)]
pub(crate) fn random_connected_digraph(rng: &mut Rng, max_v: usize, extra_e: usize) -> Digraph {
    let nv = 1 + rng.below_usize(max_v);
    let vertices: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 1..nv {
        let parent = rng.below_usize(i);
        edges.push((format!("t{i}"), format!("v{parent}"), format!("v{i}")));
    }
    for j in 0..rng.below_usize(extra_e + 1) {
        edges.push((
            format!("x{j}"),
            format!("v{}", rng.below_usize(nv)),
            format!("v{}", rng.below_usize(nv)),
        ));
    }
    Digraph::new(vertices, edges).unwrap()
}
