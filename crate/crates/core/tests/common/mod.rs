#![allow(dead_code)]

use negsssp_core::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random multigraph with integer lengths; a `neg` fraction of edges draw
/// from `[lo, -1]`, the rest from `[0, hi]`.
pub fn random_graph(seed: u64, n: usize, m: usize, neg: f64, lo: i32, hi: i32) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<_> = (0..m)
        .map(|_| {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            let w = if rng.random_bool(neg) { rng.random_range(lo..=-1) } else { rng.random_range(0..=hi) };
            (u, v, w as f64)
        })
        .collect();
    Graph::new(n, triples).unwrap()
}

/// Random graph with lengths `w(u,v) + p(u) − p(v)` for nonnegative `w`,
/// so it has negative edges but no negative cycle.
pub fn feasible_graph(seed: u64, n: usize, m: usize, spread: i32) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p: Vec<i32> = (0..n).map(|_| rng.random_range(-spread..=spread)).collect();
    let triples: Vec<_> = (0..m)
        .map(|_| {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            let w = rng.random_range(0..=4) + p[u] - p[v];
            (u, v, w as f64)
        })
        .collect();
    Graph::new(n, triples).unwrap()
}
