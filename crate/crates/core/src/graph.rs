//! Directed multigraph with real edge lengths and a designated (frozen)
//! negative-edge set.
//!
//! Lengths are `f64` compared exactly. `+∞` is only ever a distance label,
//! never an edge length.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Length = f64;

/// Distance sentinel for "unreachable".
pub const INF: Length = f64::INFINITY;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub len: Length,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    EndpointOutOfRange { edge: EdgeId, vertex: VertexId },
    NonFiniteLength { edge: EdgeId },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::EndpointOutOfRange { edge, vertex } => {
                write!(f, "edge {edge}: endpoint {vertex} out of range")
            }
            GraphError::NonFiniteLength { edge } => write!(f, "edge {edge}: length is not finite"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Immutable directed graph with CSR adjacency in both directions.
///
/// `frozen` is the hop-accounting set. At construction it equals the set of
/// negative edges; reweighting carries it over unchanged so an edge stays a
/// hop edge for the rest of an iteration even if its length turns
/// nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    out_start: Vec<usize>,
    out_list: Vec<EdgeId>,
    in_start: Vec<usize>,
    in_list: Vec<EdgeId>,
    frozen: Vec<bool>,
    frozen_list: Vec<EdgeId>,
}

fn csr(n: usize, edges: &[Edge], key: impl Fn(&Edge) -> VertexId) -> (Vec<usize>, Vec<EdgeId>) {
    let mut start = vec![0usize; n + 1];
    for e in edges {
        start[key(e) + 1] += 1;
    }
    for v in 0..n {
        start[v + 1] += start[v];
    }
    let mut fill = start.clone();
    let mut list = vec![0; edges.len()];
    for (id, e) in edges.iter().enumerate() {
        let slot = &mut fill[key(e)];
        list[*slot] = id;
        *slot += 1;
    }
    (start, list)
}

impl Graph {
    /// Builds a graph from `(tail, head, length)` triples. Edge ids follow
    /// input order; every negative edge is frozen.
    pub fn new<I>(n: usize, triples: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, Length)>,
    {
        let mut edges = Vec::new();
        for (id, (tail, head, len)) in triples.into_iter().enumerate() {
            for v in [tail, head] {
                if v >= n {
                    return Err(GraphError::EndpointOutOfRange { edge: id, vertex: v });
                }
            }
            if !len.is_finite() {
                return Err(GraphError::NonFiniteLength { edge: id });
            }
            edges.push(Edge { tail, head, len });
        }
        let frozen = edges.iter().map(|e| e.len < 0.0).collect();
        Ok(Self::assemble(n, edges, frozen))
    }

    fn assemble(n: usize, edges: Vec<Edge>, frozen: Vec<bool>) -> Self {
        let (out_start, out_list) = csr(n, &edges, |e| e.tail);
        let (in_start, in_list) = csr(n, &edges, |e| e.head);
        let frozen_list = (0..edges.len()).filter(|&e| frozen[e]).collect();
        Graph { n, edges, out_start, out_list, in_start, in_list, frozen, frozen_list }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_list[self.out_start[v]..self.out_start[v + 1]]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_list[self.in_start[v]..self.in_start[v + 1]]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_start[v + 1] - self.out_start[v]
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_start[v + 1] - self.in_start[v]
    }

    pub fn is_frozen(&self, e: EdgeId) -> bool {
        self.frozen[e]
    }

    /// Frozen edge ids in increasing order.
    pub fn frozen_edges(&self) -> &[EdgeId] {
        &self.frozen_list
    }

    /// Number of edges whose current length is negative.
    pub fn negative_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.len < 0.0).count()
    }

    /// Tails of frozen edges, sorted and deduplicated. In normal form these
    /// are exactly the negative vertices.
    pub fn negative_vertices(&self) -> Vec<VertexId> {
        let mut tails: Vec<VertexId> = self.frozen_list.iter().map(|&e| self.edges[e].tail).collect();
        tails.sort_unstable();
        tails.dedup();
        tails
    }

    /// Same topology and frozen set with new lengths.
    pub(crate) fn with_lengths(&self, lens: impl Iterator<Item = Length>) -> Graph {
        let mut g = self.clone();
        for (edge, len) in g.edges.iter_mut().zip(lens) {
            edge.len = len;
        }
        g
    }

    /// Resets the frozen set to the edges that are negative right now.
    pub fn refreeze(&self) -> Graph {
        let frozen = self.edges.iter().map(|e| e.len < 0.0).collect();
        Self::assemble(self.n, self.edges.clone(), frozen)
    }

    /// Replaces the frozen set. Every currently negative edge must be in it.
    pub fn with_frozen(&self, frozen: Vec<bool>) -> Graph {
        assert_eq!(frozen.len(), self.m());
        debug_assert!(self.edges.iter().zip(&frozen).all(|(e, &f)| f || e.len >= 0.0));
        Self::assemble(self.n, self.edges.clone(), frozen)
    }

    /// Every edge flipped; ids and frozen set preserved.
    pub fn reverse(&self) -> Graph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { tail: e.head, head: e.tail, len: e.len })
            .collect();
        Self::assemble(self.n, edges, self.frozen.clone())
    }

    /// Sums a walk's lengths and counts its frozen edges (with repetition).
    pub fn walk_length(&self, walk: &Walk) -> Result<WalkEval, WalkError> {
        let mut at = walk.start;
        if at >= self.n {
            return Err(WalkError::StartOutOfRange(at));
        }
        let mut length = 0.0;
        let mut hops = 0;
        for (pos, &e) in walk.edges.iter().enumerate() {
            let edge = self.edges.get(e).ok_or(WalkError::UnknownEdge { position: pos, edge: e })?;
            if edge.tail != at {
                return Err(WalkError::Disconnected { position: pos });
            }
            length += edge.len;
            hops += usize::from(self.frozen[e]);
            at = edge.head;
        }
        Ok(WalkEval { length, hops, end: at })
    }

    /// Accepts iff the certificate is a closed, connected edge sequence with
    /// exact negative total. Returns the recomputed total on success.
    pub fn verify_neg_cycle(&self, cert: &NegCycleCert) -> Result<Length, CertRejection> {
        let first = *cert.edges.first().ok_or(CertRejection::Empty)?;
        let Some(start) = self.edges.get(first) else {
            return Err(CertRejection::UnknownEdge { position: 0, edge: first });
        };
        let walk = Walk { start: start.tail, edges: cert.edges.clone() };
        let eval = self.walk_length(&walk).map_err(|err| match err {
            WalkError::UnknownEdge { position, edge } => CertRejection::UnknownEdge { position, edge },
            WalkError::Disconnected { position } => CertRejection::Disconnected { position },
            WalkError::StartOutOfRange(_) => unreachable!("start taken from an existing edge"),
        })?;
        if eval.end != walk.start {
            return Err(CertRejection::NotClosed);
        }
        if !(eval.length < 0.0) {
            return Err(CertRejection::NotNegative { total: eval.length });
        }
        if eval.length != cert.total {
            return Err(CertRejection::TotalMismatch { claimed: cert.total, actual: eval.length });
        }
        Ok(eval.length)
    }
}

/// Edge sequence starting at `start`. The empty walk sits at `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub start: VertexId,
    pub edges: Vec<EdgeId>,
}

impl Walk {
    pub fn empty(at: VertexId) -> Self {
        Walk { start: at, edges: Vec::new() }
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(mut self, other: &Walk) -> Walk {
        self.edges.extend_from_slice(&other.edges);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkEval {
    pub length: Length,
    pub hops: usize,
    pub end: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkError {
    StartOutOfRange(VertexId),
    UnknownEdge { position: usize, edge: EdgeId },
    Disconnected { position: usize },
}

impl fmt::Display for WalkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkError::StartOutOfRange(v) => write!(f, "walk start {v} out of range"),
            WalkError::UnknownEdge { position, edge } => {
                write!(f, "walk position {position}: unknown edge {edge}")
            }
            WalkError::Disconnected { position } => {
                write!(f, "walk position {position}: edge does not continue the walk")
            }
        }
    }
}

impl core::error::Error for WalkError {}

/// A closed walk of negative total length.
#[derive(Clone, Debug, PartialEq)]
pub struct NegCycleCert {
    pub edges: Vec<EdgeId>,
    pub total: Length,
}

impl NegCycleCert {
    /// Builds a certificate for `edges`, recomputing the total on `g`.
    pub fn from_edges(g: &Graph, edges: Vec<EdgeId>) -> Self {
        let total = edges.iter().map(|&e| g.edge(e).len).sum();
        NegCycleCert { edges, total }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertRejection {
    Empty,
    UnknownEdge { position: usize, edge: EdgeId },
    Disconnected { position: usize },
    NotClosed,
    NotNegative { total: Length },
    TotalMismatch { claimed: Length, actual: Length },
}

impl fmt::Display for CertRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertRejection::Empty => f.write_str("certificate has no edges"),
            CertRejection::UnknownEdge { position, edge } => {
                write!(f, "position {position}: unknown edge {edge}")
            }
            CertRejection::Disconnected { position } => write!(f, "position {position}: disconnected"),
            CertRejection::NotClosed => f.write_str("walk is not closed"),
            CertRejection::NotNegative { total } => write!(f, "total {total} is not negative"),
            CertRejection::TotalMismatch { claimed, actual } => {
                write!(f, "claimed total {claimed} but edges sum to {actual}")
            }
        }
    }
}

impl core::error::Error for CertRejection {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn single_negative_edge_is_frozen() {
        let g = Graph::new(2, [(0, 1, -1.0)]).unwrap();
        assert_eq!(g.frozen_edges(), &[0]);
        let g = Graph::new(1, []).unwrap();
        assert_eq!(g.m(), 0);
        assert!(g.frozen_edges().is_empty());
    }

    #[test]
    fn fixture_a_adjacency() {
        let g = fixtures::a();
        assert_eq!(g.frozen_edges(), &[1]);
        assert_eq!(g.out_edges(fixtures::S), &[0]);
        assert_eq!(g.in_edges(fixtures::T), &[2]);
        let e = g.edge(1);
        assert_eq!((e.tail, e.head, e.len), (fixtures::A, fixtures::B, -5.0));
    }

    #[test]
    fn rejects_bad_endpoint_with_edge_index() {
        let err = Graph::new(3, [(0, 1, 1.0), (1, 3, 2.0)]).unwrap_err();
        assert_eq!(err, GraphError::EndpointOutOfRange { edge: 1, vertex: 3 });
        assert_eq!(
            Graph::new(2, [(0, 1, f64::NAN)]).unwrap_err(),
            GraphError::NonFiniteLength { edge: 0 }
        );
    }

    #[test]
    fn walk_lengths() {
        let g = fixtures::a();
        let w = Walk { start: fixtures::S, edges: vec![0, 1, 2] };
        let eval = g.walk_length(&w).unwrap();
        assert_eq!((eval.length, eval.hops, eval.end), (-2.0, 1, fixtures::T));

        let eval = g.walk_length(&Walk::empty(2)).unwrap();
        assert_eq!((eval.length, eval.hops), (0.0, 0));

        let looped = Graph::new(1, [(0, 0, -3.0)]).unwrap();
        let eval = looped.walk_length(&Walk { start: 0, edges: vec![0, 0] }).unwrap();
        assert_eq!((eval.length, eval.hops), (-6.0, 2));

        let bad = Walk { start: fixtures::S, edges: vec![0, 2] };
        assert_eq!(g.walk_length(&bad).unwrap_err(), WalkError::Disconnected { position: 1 });
    }

    #[test]
    fn neg_cycle_verification() {
        let g = fixtures::b();
        let cert = NegCycleCert { edges: vec![0, 1, 2], total: -2.0 };
        assert_eq!(g.verify_neg_cycle(&cert), Ok(-2.0));

        let repriced = Graph::new(4, [(0, 1, 1.0), (1, 2, -5.0), (2, 0, 5.0), (2, 3, 2.0)]).unwrap();
        assert_eq!(repriced.verify_neg_cycle(&cert), Err(CertRejection::NotNegative { total: 1.0 }));

        let open = NegCycleCert { edges: vec![0, 1], total: -4.0 };
        assert_eq!(g.verify_neg_cycle(&open), Err(CertRejection::NotClosed));

        let lying = NegCycleCert { edges: vec![0, 1, 2], total: -3.0 };
        assert!(matches!(g.verify_neg_cycle(&lying), Err(CertRejection::TotalMismatch { .. })));

        let self_loop = Graph::new(1, [(0, 0, -1.0)]).unwrap();
        assert!(self_loop.verify_neg_cycle(&NegCycleCert::from_edges(&self_loop, vec![0])).is_ok());
    }

    #[test]
    fn reverse_is_an_involution() {
        let g = fixtures::a();
        let r = g.reverse();
        let flipped: Vec<_> = r.edges().iter().map(|e| (e.tail, e.head, e.len)).collect();
        assert_eq!(
            flipped,
            vec![(fixtures::A, fixtures::S, 1.0), (fixtures::B, fixtures::A, -5.0), (fixtures::T, fixtures::B, 2.0)]
        );
        assert_eq!(r.frozen_edges(), g.frozen_edges());
        assert_eq!(r.reverse(), g);
    }
}
