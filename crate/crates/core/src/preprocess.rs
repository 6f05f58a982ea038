//! Normal-form preprocessing.
//!
//! [`normalize`] splits every vertex `v` that has outgoing edges into
//! `v⁻ → v⁺` carrying `μ_v`, the minimum outgoing length, and reprices each
//! edge `(u,v)` as `(u⁺, v⁻)` with length `ℓ(u,v) − μ_u ≥ 0`. Afterwards every
//! negative edge is a split arc: the unique out-edge of its tail and the
//! unique in-edge of its head. [`bound_degrees`] then caps degrees with
//! zero-length chains that never separate a split arc.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{EdgeId, Graph, Length, NegCycleCert, VertexId};

/// Where an edge of a transformed graph came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeOrigin {
    Original(EdgeId),
    /// The `v⁻ → v⁺` arc of original vertex `v`.
    Split(VertexId),
    /// A zero-length degree chain link; the vertex is the one that was split.
    Chain(VertexId),
}

/// Maps a transformed graph back to the graph it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformMap {
    /// `(v⁻, v⁺)` for each original vertex; equal when `v` was not split.
    images: Vec<(VertexId, VertexId)>,
    edge_origin: Vec<EdgeOrigin>,
    new_n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LiftError {
    /// Contracting synthetic edges left nothing. Cannot happen for a genuine
    /// negative cycle.
    EmptyCycle,
    Rejected(crate::graph::CertRejection),
}

impl fmt::Display for LiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftError::EmptyCycle => f.write_str("lifted certificate is empty"),
            LiftError::Rejected(why) => write!(f, "lifted certificate rejected: {why}"),
        }
    }
}

impl core::error::Error for LiftError {}

impl TransformMap {
    pub fn identity(g: &Graph) -> Self {
        TransformMap {
            images: (0..g.n()).map(|v| (v, v)).collect(),
            edge_origin: (0..g.m()).map(EdgeOrigin::Original).collect(),
            new_n: g.n(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.new_n == self.images.len()
            && self.images.iter().enumerate().all(|(v, &(a, b))| a == v && b == v)
            && self.edge_origin.iter().enumerate().all(|(e, &o)| o == EdgeOrigin::Original(e))
    }

    pub fn original_n(&self) -> usize {
        self.images.len()
    }

    pub fn transformed_n(&self) -> usize {
        self.new_n
    }

    /// The vertex whose distances equal those of `v` (`v⁻`).
    pub fn image(&self, v: VertexId) -> VertexId {
        self.images[v].0
    }

    pub fn images(&self) -> &[(VertexId, VertexId)] {
        &self.images
    }

    pub fn edge_origin(&self, e: EdgeId) -> EdgeOrigin {
        self.edge_origin[e]
    }

    /// `self` followed by `next`, where `next` was applied to the output of
    /// `self`.
    pub fn then(&self, next: &TransformMap) -> TransformMap {
        let images = self.images.iter().map(|&(a, b)| (next.images[a].0, next.images[b].0)).collect();
        let edge_origin = next
            .edge_origin
            .iter()
            .map(|&o| match o {
                EdgeOrigin::Original(e) => self.edge_origin[e],
                other => other,
            })
            .collect();
        TransformMap { images, edge_origin, new_n: next.new_n }
    }

    pub fn lift_distances(&self, dist: &[Length]) -> Vec<Length> {
        self.images.iter().map(|&(minus, _)| dist[minus]).collect()
    }

    /// Drops synthetic edges and re-verifies the certificate on `original`.
    pub fn lift_cycle(&self, cert: &NegCycleCert, original: &Graph) -> Result<NegCycleCert, LiftError> {
        let edges: Vec<EdgeId> = cert
            .edges
            .iter()
            .filter_map(|&e| match self.edge_origin[e] {
                EdgeOrigin::Original(o) => Some(o),
                _ => None,
            })
            .collect();
        if edges.is_empty() {
            return Err(LiftError::EmptyCycle);
        }
        let lifted = NegCycleCert::from_edges(original, edges);
        original.verify_neg_cycle(&lifted).map_err(LiftError::Rejected)?;
        Ok(lifted)
    }

    /// Parent edges of a shortest-path tree on `transformed` mapped to
    /// original edges: for each original vertex, the first original edge met
    /// when walking up from its image.
    pub fn lift_tree(&self, transformed: &Graph, parent: &[Option<EdgeId>]) -> Vec<Option<EdgeId>> {
        self.images
            .iter()
            .map(|&(minus, _)| {
                let mut at = minus;
                loop {
                    let e = parent[at]?;
                    match self.edge_origin[e] {
                        EdgeOrigin::Original(o) => return Some(o),
                        _ => at = transformed.edge(e).tail,
                    }
                }
            })
            .collect()
    }
}

/// Vertex splitting. Vertices without outgoing edges keep a single image.
pub fn normalize(g: &Graph) -> (Graph, TransformMap) {
    let mut images = Vec::with_capacity(g.n());
    let mut mu = vec![0.0; g.n()];
    let mut next = 0;
    for (v, mu_v) in mu.iter_mut().enumerate() {
        if g.out_degree(v) == 0 {
            images.push((next, next));
            next += 1;
        } else {
            *mu_v = g.out_edges(v).iter().map(|&e| g.edge(e).len).fold(Length::INFINITY, f64::min);
            images.push((next, next + 1));
            next += 2;
        }
    }
    let mut triples = Vec::with_capacity(g.n() + g.m());
    let mut edge_origin = Vec::with_capacity(g.n() + g.m());
    for v in 0..g.n() {
        let (minus, plus) = images[v];
        if minus != plus {
            triples.push((minus, plus, mu[v]));
            edge_origin.push(EdgeOrigin::Split(v));
        }
    }
    for (e, edge) in g.edges().iter().enumerate() {
        triples.push((images[edge.tail].1, images[edge.head].0, edge.len - mu[edge.tail]));
        edge_origin.push(EdgeOrigin::Original(e));
    }
    let out = Graph::new(next, triples).expect("images are in range");
    (out, TransformMap { images, edge_origin, new_n: next })
}

/// `max(3, ⌈2m/n⌉)`.
pub fn default_degree_cap(g: &Graph) -> usize {
    let n = g.n().max(1);
    (2 * g.m()).div_ceil(n).max(3)
}

/// Splits vertices with in- or out-degree above `cap` into zero-length
/// chains. Original vertex and edge ids are kept; chain vertices and links
/// are appended.
pub fn bound_degrees(g: &Graph, cap: usize) -> (Graph, TransformMap) {
    assert!(cap >= 3, "degree cap must be at least 3");
    let mut tails: Vec<VertexId> = g.edges().iter().map(|e| e.tail).collect();
    let mut heads: Vec<VertexId> = g.edges().iter().map(|e| e.head).collect();
    let mut extra: Vec<(VertexId, VertexId)> = Vec::new();
    let mut chain_of: Vec<VertexId> = Vec::new();
    let mut n = g.n();

    for v in 0..g.n() {
        let out = g.out_edges(v);
        if out.len() > cap {
            let mut at = v;
            let mut rest = out;
            while rest.len() > cap {
                let (keep, tail) = rest.split_at(cap - 1);
                for &e in keep {
                    tails[e] = at;
                }
                extra.push((at, n));
                chain_of.push(v);
                at = n;
                n += 1;
                rest = tail;
            }
            for &e in rest {
                tails[e] = at;
            }
        }
        let inc = g.in_edges(v);
        if inc.len() > cap {
            let mut at = v;
            let mut rest = inc;
            while rest.len() > cap {
                let (keep, tail) = rest.split_at(cap - 1);
                for &e in keep {
                    heads[e] = at;
                }
                extra.push((n, at));
                chain_of.push(v);
                at = n;
                n += 1;
                rest = tail;
            }
            for &e in rest {
                heads[e] = at;
            }
        }
    }
    if extra.is_empty() {
        return (g.clone(), TransformMap::identity(g));
    }
    let triples = (0..g.m())
        .map(|e| (tails[e], heads[e], g.edge(e).len))
        .chain(extra.iter().map(|&(a, b)| (a, b, 0.0)));
    let out = Graph::new(n, triples).expect("chain vertices are in range");
    let edge_origin = (0..g.m())
        .map(EdgeOrigin::Original)
        .chain(chain_of.iter().map(|&v| EdgeOrigin::Chain(v)))
        .collect();
    let images = (0..g.n()).map(|v| (v, v)).collect();
    (out, TransformMap { images, edge_origin, new_n: n })
}

/// `normalize` followed by `bound_degrees` with the default cap.
pub fn preprocess(g: &Graph) -> (Graph, TransformMap) {
    let (split, first) = normalize(g);
    let cap = default_degree_cap(&split);
    let (bounded, second) = bound_degrees(&split, cap);
    (bounded, first.then(&second))
}

/// Checks the structural normal form: each negative edge is the only
/// out-edge of its tail and the only in-edge of its head, and there are at
/// most `n/2` of them.
pub fn is_normal_form(g: &Graph) -> bool {
    let mut count = 0;
    for edge in g.edges().iter().filter(|e| e.len < 0.0) {
        count += 1;
        if g.out_degree(edge.tail) != 1 || g.in_degree(edge.head) != 1 {
            return false;
        }
    }
    2 * count <= g.n()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{bellman_ford_moore, OracleOutcome, Origin};
    use crate::fixtures::{self, S, T};

    fn dist_from(g: &Graph, s: VertexId) -> Vec<Length> {
        match bellman_ford_moore(g, Origin::Vertex(s)).outcome {
            OracleOutcome::Distances { dist, .. } => dist,
            OracleOutcome::Cycle(_) => panic!("unexpected cycle"),
        }
    }

    #[test]
    fn split_reprices_out_edges() {
        let g = Graph::new(3, [(0, 1, -2.0), (0, 2, 3.0)]).unwrap();
        let (h, map) = normalize(&g);
        let (vm, vp) = map.images()[0];
        let (xm, _) = map.images()[1];
        let (ym, _) = map.images()[2];
        let arcs: Vec<_> = h.edges().iter().map(|e| (e.tail, e.head, e.len)).collect();
        assert!(arcs.contains(&(vm, vp, -2.0)));
        assert!(arcs.contains(&(vp, xm, 0.0)));
        assert!(arcs.contains(&(vp, ym, 5.0)));
        assert!(is_normal_form(&h));
    }

    #[test]
    fn nonnegative_graph_stays_nonnegative() {
        let g = Graph::new(3, [(0, 1, 2.0), (1, 2, 0.0), (2, 0, 4.0)]).unwrap();
        let (h, _) = normalize(&g);
        assert_eq!(h.negative_edge_count(), 0);
    }

    #[test]
    fn fixture_a_distance_survives_normalize() {
        let g = fixtures::a();
        let (h, map) = normalize(&g);
        let d = dist_from(&h, map.image(S));
        assert_eq!(d[map.image(T)], -2.0);
        assert_eq!(map.lift_distances(&d), dist_from(&g, S));
    }

    #[test]
    fn star_is_chained() {
        let g = Graph::new(11, (1..11).map(|v| (0, v, v as f64))).unwrap();
        let (h, map) = bound_degrees(&g, 3);
        assert!(h.n() > g.n());
        assert!((0..h.n()).all(|v| h.out_degree(v) <= 3 && h.in_degree(v) <= 3));
        for s in 0..g.n() {
            let d = dist_from(&h, map.image(s));
            assert_eq!(map.lift_distances(&d), dist_from(&g, s));
        }
    }

    #[test]
    fn in_star_is_chained() {
        let g = Graph::new(11, (1..11).map(|v| (v, 0, -(v as f64)))).unwrap();
        let (h, map) = bound_degrees(&g, 3);
        assert!((0..h.n()).all(|v| h.out_degree(v) <= 3 && h.in_degree(v) <= 3));
        for s in 0..g.n() {
            assert_eq!(map.lift_distances(&dist_from(&h, map.image(s))), dist_from(&g, s));
        }
    }

    #[test]
    fn small_graphs_unchanged() {
        let g = fixtures::a();
        let (h, map) = bound_degrees(&g, 3);
        assert_eq!(h, g);
        assert!(map.is_identity());
        let single = Graph::new(2, [(0, 1, 4.0)]).unwrap();
        assert_eq!(bound_degrees(&single, 3).0, single);
    }

    #[test]
    fn cycle_lifts_to_original() {
        let g = fixtures::b();
        let (h, map) = preprocess(&g);
        let OracleOutcome::Cycle(cert) = bellman_ford_moore(&h, Origin::All).outcome else { panic!() };
        let lifted = map.lift_cycle(&cert, &g).unwrap();
        assert_eq!(lifted.total, -2.0);
        assert_eq!(lifted.edges.len(), 3);

        let id = TransformMap::identity(&g);
        let OracleOutcome::Cycle(orig) = bellman_ford_moore(&g, Origin::All).outcome else { panic!() };
        assert_eq!(id.lift_cycle(&orig, &g).unwrap(), orig);
    }

    #[test]
    fn empty_lift_is_an_error() {
        let g = Graph::new(1, [(0, 0, -1.0)]).unwrap();
        let (h, map) = normalize(&g);
        let split_arc = (0..h.m()).find(|&e| matches!(map.edge_origin(e), EdgeOrigin::Split(_))).unwrap();
        let fake = NegCycleCert { edges: vec![split_arc], total: -1.0 };
        assert_eq!(map.lift_cycle(&fake, &g), Err(LiftError::EmptyCycle));
    }
}
