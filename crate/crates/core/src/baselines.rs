//! Exact reference algorithms. They are slow on purpose: every one of them
//! is simple enough to check by eye, and tests compare the fast paths
//! against them.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{EdgeId, Graph, Length, NegCycleCert, VertexId, INF};
use crate::hopdist::{hop_distances, Direction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Vertex(VertexId),
    /// Super-source: every vertex starts at 0, giving `d(V,·)`.
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome {
    Distances { dist: Vec<Length>, parent: Vec<Option<EdgeId>> },
    Cycle(NegCycleCert),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub outcome: OracleOutcome,
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    TooManyNegativeVertices { k: usize, max: usize },
    TooManyVertices { n: usize, max: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooManyNegativeVertices { k, max } => {
                write!(f, "{k} negative vertices exceed the oracle limit {max}")
            }
            OracleError::TooManyVertices { n, max } => write!(f, "{n} vertices exceed the oracle limit {max}"),
        }
    }
}

impl core::error::Error for OracleError {}

/// Bellman-Ford-Moore with a FIFO queue of vertices whose label changed.
/// Every `n` scans the parent graph is checked for a cycle; a cycle there
/// is always negative, and one appears whenever a reachable negative cycle
/// exists. `rounds` counts those checkpoints plus the final pass.
pub fn bellman_ford_moore(g: &Graph, origin: Origin) -> OracleResult {
    let n = g.n();
    let mut dist = vec![INF; n];
    let mut parent: Vec<Option<EdgeId>> = vec![None; n];
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();
    match origin {
        Origin::Vertex(s) => {
            dist[s] = 0.0;
            queue.push_back(s);
            queued[s] = true;
        }
        Origin::All => {
            dist.iter_mut().for_each(|d| *d = 0.0);
            queue.extend(0..n);
            queued.iter_mut().for_each(|q| *q = true);
        }
    }
    let mut rounds = 1;
    let mut scans = 0;
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        for &e in g.out_edges(u) {
            let edge = g.edge(e);
            let cand = dist[u] + edge.len;
            if cand < dist[edge.head] {
                dist[edge.head] = cand;
                parent[edge.head] = Some(e);
                if !queued[edge.head] {
                    queued[edge.head] = true;
                    queue.push_back(edge.head);
                }
            }
        }
        scans += 1;
        if scans == n {
            scans = 0;
            rounds += 1;
            if let Some(cycle) = parent_cycle(g, &parent) {
                let cert = NegCycleCert::from_edges(g, cycle);
                debug_assert!(cert.total < 0.0);
                return OracleResult { outcome: OracleOutcome::Cycle(cert), rounds };
            }
        }
    }
    OracleResult { outcome: OracleOutcome::Distances { dist, parent }, rounds }
}

/// Reference answer with the solver's semantics: a negative cycle anywhere
/// in the graph wins, otherwise distances from `source`.
pub fn reference_sssp(g: &Graph, source: VertexId) -> OracleOutcome {
    match bellman_ford_moore(g, Origin::All).outcome {
        cycle @ OracleOutcome::Cycle(_) => cycle,
        OracleOutcome::Distances { .. } => bellman_ford_moore(g, Origin::Vertex(source)).outcome,
    }
}

/// Any cycle in the parent-pointer graph, as forward edge order.
fn parent_cycle(g: &Graph, parent: &[Option<EdgeId>]) -> Option<Vec<EdgeId>> {
    let n = g.n();
    let mut stamp = vec![usize::MAX; n];
    for root in 0..n {
        let mut v = root;
        while stamp[v] == usize::MAX {
            stamp[v] = root;
            match parent[v] {
                Some(e) => v = g.edge(e).tail,
                None => break,
            }
        }
        if stamp[v] == root && parent[v].is_some() {
            // v is on a cycle discovered during this walk
            let mut cycle = Vec::new();
            let mut u = v;
            loop {
                let e = parent[u].expect("cycle vertices have parents");
                cycle.push(e);
                u = g.edge(e).tail;
                if u == v {
                    break;
                }
            }
            cycle.reverse();
            return Some(cycle);
        }
    }
    None
}

/// Exact `d^j(S,·)` for `j = 0..=r` by Bellman-Ford over the product graph
/// (vertex, hops used). Independent of the Dijkstra hybrid in `hopdist`.
pub fn layered_hop_distances(g: &Graph, sources: &[VertexId], r: usize) -> Vec<Vec<Length>> {
    let n = g.n();
    let mut levels = Vec::with_capacity(r + 1);
    let mut cur = vec![INF; n];
    for &s in sources {
        cur[s] = 0.0;
    }
    for j in 0..=r {
        if j > 0 {
            let prev: &Vec<Length> = &levels[j - 1];
            cur = prev.clone();
            for &e in g.frozen_edges() {
                let edge = g.edge(e);
                cur[edge.head] = cur[edge.head].min(prev[edge.tail] + edge.len);
            }
        }
        // plain edges are nonnegative, so n rounds reach the fixpoint
        for _ in 0..n {
            let mut changed = false;
            for (e, edge) in g.edges().iter().enumerate() {
                if g.is_frozen(e) {
                    continue;
                }
                let cand = cur[edge.tail] + edge.len;
                if cand < cur[edge.head] {
                    cur[edge.head] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        levels.push(cur.clone());
    }
    levels
}

pub const PROPER_HOP_MAX_K: usize = 14;

/// Exact proper `h`-hop distance `ŝd^h(s,t)`: the shortest walk with exactly
/// `h` frozen edges whose tails are pairwise distinct.
///
/// Dynamic program over (set of used negative vertices, current vertex),
/// closing each state under the nonnegative plain edges.
pub fn brute_force_proper_hop(g: &Graph, s: VertexId, t: VertexId, h: usize) -> Result<Length, OracleError> {
    let tails = g.negative_vertices();
    let k = tails.len();
    if k > PROPER_HOP_MAX_K {
        return Err(OracleError::TooManyNegativeVertices { k, max: PROPER_HOP_MAX_K });
    }
    if h > k {
        return Ok(INF);
    }
    let n = g.n();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in tails.iter().enumerate() {
        index[v] = i;
    }
    let closure = |labels: &mut Vec<Length>| loop {
        let mut changed = false;
        for (e, edge) in g.edges().iter().enumerate() {
            if !g.is_frozen(e) && labels[edge.tail] + edge.len < labels[edge.head] {
                labels[edge.head] = labels[edge.tail] + edge.len;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    };
    let mut table: Vec<Option<Vec<Length>>> = vec![None; 1 << k];
    let mut start = vec![INF; n];
    start[s] = 0.0;
    closure(&mut start);
    table[0] = Some(start);
    let mut best = INF;
    // masks in order of popcount so every predecessor is final
    let mut masks: Vec<usize> = (0..1usize << k).filter(|m| m.count_ones() as usize <= h).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let Some(labels) = table[mask].take() else { continue };
        if mask.count_ones() as usize == h {
            best = best.min(labels[t]);
            continue;
        }
        for &e in g.frozen_edges() {
            let edge = g.edge(e);
            let bit = 1 << index[edge.tail];
            if mask & bit != 0 || labels[edge.tail] == INF {
                continue;
            }
            let next = table[mask | bit].get_or_insert_with(|| vec![INF; n]);
            next[edge.head] = next[edge.head].min(labels[edge.tail] + edge.len);
        }
        for next_mask in (0..k).map(|i| mask | (1 << i)).filter(|&m| m != mask) {
            if let Some(next) = table[next_mask].as_mut() {
                closure(next);
            }
        }
    }
    Ok(best)
}

pub const BETWEENNESS_MAX_N: usize = 200;

/// `counts[s][t]` = number of `v` with `d^r(s,v) + d^r(v,t) < 0`.
pub fn brute_force_betweenness(g: &Graph, r: usize) -> Result<Vec<Vec<usize>>, OracleError> {
    let n = g.n();
    if n > BETWEENNESS_MAX_N {
        return Err(OracleError::TooManyVertices { n, max: BETWEENNESS_MAX_N });
    }
    let fwd: Vec<Vec<Length>> = (0..n)
        .map(|s| hop_distances(g, &[s], r, Direction::Forward).map(|t| t.top().to_vec()))
        .collect::<Result<_, _>>()
        .expect("frozen set covers all negative edges");
    let rev: Vec<Vec<Length>> = (0..n)
        .map(|t| hop_distances(g, &[t], r, Direction::Reverse).map(|t| t.top().to_vec()))
        .collect::<Result<_, _>>()
        .expect("frozen set covers all negative edges");
    Ok((0..n)
        .map(|s| (0..n).map(|t| (0..n).filter(|&v| fwd[s][v] + rev[t][v] < 0.0).count()).collect())
        .collect())
}
