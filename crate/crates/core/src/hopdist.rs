//! Hop-limited distances `d^r(S,·)` and `d^r(·,S)`.
//!
//! A hop is a traversal of a frozen edge. Level `j+1` is obtained from level
//! `j` by relaxing every hop edge once and then running Dijkstra over the
//! nonnegative plain edges, seeded only with the vertices that improved.
//! Labels are kept for the current level only; a per-vertex parent log
//! records `(level, edge, value)` whenever a label improves, which is enough
//! to answer `d^j(v)` for any `j` and to extract witness walks.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::graph::{EdgeId, Graph, Length, NegCycleCert, VertexId, Walk, INF};
use crate::potentials::{Potential, Provenance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Distances from the sources.
    Forward,
    /// Distances to the sources, computed on the reversed graph.
    Reverse,
}

/// Role of an edge in a hop computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeClass {
    /// Ordinary edge; must be nonnegative.
    Plain,
    /// Counted as one hop per traversal.
    Hop,
    /// Not part of the graph for this computation.
    Skip,
}

#[derive(Clone, Debug, PartialEq)]
pub enum HopError {
    /// A plain edge has negative length, so Dijkstra would be wrong.
    NegativePlainEdge { edge: EdgeId, len: Length },
    SourceOutOfRange(VertexId),
}

impl fmt::Display for HopError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HopError::NegativePlainEdge { edge, len } => {
                write!(f, "edge {edge} has negative length {len} but is not a hop edge")
            }
            HopError::SourceOutOfRange(v) => write!(f, "source {v} out of range"),
        }
    }
}

impl core::error::Error for HopError {}

/// A graph together with an edge classification.
///
/// [`HopView::new`] uses the graph's frozen set as hop edges. Restricted
/// views implement `G_S`: only the frozen edges with tails in `S` are hops,
/// the remaining frozen edges are dropped.
#[derive(Clone, Debug)]
pub struct HopView<'g> {
    g: &'g Graph,
    class: Vec<EdgeClass>,
    hops: Vec<EdgeId>,
}

impl<'g> HopView<'g> {
    pub fn new(g: &'g Graph) -> Self {
        Self::from_fn(g, |e| if g.is_frozen(e) { EdgeClass::Hop } else { EdgeClass::Plain })
    }

    pub fn from_fn(g: &'g Graph, f: impl Fn(EdgeId) -> EdgeClass) -> Self {
        let class: Vec<EdgeClass> = (0..g.m()).map(f).collect();
        let hops = (0..g.m()).filter(|&e| class[e] == EdgeClass::Hop).collect();
        HopView { g, class, hops }
    }

    /// `G_S` for the negative-vertex set `s` (given as a membership mask).
    pub fn restricted(g: &'g Graph, in_s: &[bool]) -> Self {
        Self::from_fn(g, |e| {
            if !g.is_frozen(e) {
                EdgeClass::Plain
            } else if in_s[g.edge(e).tail] {
                EdgeClass::Hop
            } else {
                EdgeClass::Skip
            }
        })
    }

    /// Like [`HopView::restricted`], but frozen edges whose tail is in
    /// `settled` are treated as plain edges (they must be nonnegative).
    pub fn restricted_with_settled(g: &'g Graph, in_s: &[bool], settled: &[bool]) -> Self {
        Self::from_fn(g, |e| {
            let tail = g.edge(e).tail;
            if !g.is_frozen(e) || settled[tail] {
                EdgeClass::Plain
            } else if in_s[tail] {
                EdgeClass::Hop
            } else {
                EdgeClass::Skip
            }
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn class(&self, e: EdgeId) -> EdgeClass {
        self.class[e]
    }

    pub fn hop_edges(&self) -> &[EdgeId] {
        &self.hops
    }

    /// Sorted, deduplicated tails of hop edges.
    pub fn hop_tails(&self) -> Vec<VertexId> {
        let mut tails: Vec<VertexId> = self.hops.iter().map(|&e| self.g.edge(e).tail).collect();
        tails.sort_unstable();
        tails.dedup();
        tails
    }

    pub fn check(&self) -> Result<(), HopError> {
        for (e, edge) in self.g.edges().iter().enumerate() {
            if self.class[e] == EdgeClass::Plain && edge.len < 0.0 {
                return Err(HopError::NegativePlainEdge { edge: e, len: edge.len });
            }
        }
        Ok(())
    }

    /// Number of hop edges on `walk`.
    pub fn hops_on(&self, walk: &Walk) -> usize {
        walk.edges.iter().filter(|&&e| self.class[e] == EdgeClass::Hop).count()
    }
}

const NO_EDGE: u32 = u32::MAX;
const NO_ENTRY: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct LogEntry {
    level: u32,
    edge: u32,
    prev: u32,
    value: Length,
}

#[derive(Clone, Copy, PartialEq)]
struct Queued {
    dist: Length,
    vertex: VertexId,
}

impl Eq for Queued {}

impl Ord for Queued {
    // min-heap on (dist, vertex)
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Hop-indexed distance labels with witness extraction.
#[derive(Clone, Debug)]
pub struct DistTable {
    direction: Direction,
    levels: usize,
    top: Vec<Length>,
    heads: Vec<u32>,
    log: Vec<LogEntry>,
    hop_flags: Vec<bool>,
    tails: Vec<VertexId>,
    heads_of_edges: Vec<VertexId>,
    base: Length,
}

impl DistTable {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Highest level computed (`r`).
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Labels at level `r`.
    pub fn top(&self) -> &[Length] {
        &self.top
    }

    fn entry_at(&self, level: usize, v: VertexId) -> Option<&LogEntry> {
        let mut idx = self.heads[v];
        while idx != NO_ENTRY {
            let entry = &self.log[idx as usize];
            if entry.level as usize <= level {
                return Some(entry);
            }
            idx = entry.prev;
        }
        None
    }

    /// `d^level(v)`; levels above `r` report the level-`r` label.
    pub fn at(&self, level: usize, v: VertexId) -> Length {
        self.entry_at(level, v).map_or(self.base, |e| e.value)
    }

    pub fn level(&self, level: usize) -> Vec<Length> {
        (0..self.top.len()).map(|v| self.at(level, v)).collect()
    }

    /// True if `v`'s label dropped when going from level `level-1` to `level`.
    pub fn improved_at(&self, level: usize, v: VertexId) -> bool {
        self.entry_at(level, v).is_some_and(|e| e.level as usize == level)
    }

    pub fn witness(&self, v: VertexId) -> Option<Walk> {
        self.witness_at(self.levels, v)
    }

    /// A walk attaining `d^level(v)`: from a source to `v` when forward, from
    /// `v` to a source when reverse.
    pub fn witness_at(&self, level: usize, v: VertexId) -> Option<Walk> {
        let mut edges = Vec::new();
        let mut at = v;
        let mut lvl = level;
        loop {
            let Some(entry) = self.entry_at(lvl, at) else {
                if self.base == INF {
                    return None;
                }
                break;
            };
            if entry.edge == NO_EDGE {
                break;
            }
            let e = entry.edge as usize;
            edges.push(e);
            at = match self.direction {
                Direction::Forward => self.tails[e],
                Direction::Reverse => self.heads_of_edges[e],
            };
            lvl = entry.level as usize - usize::from(self.hop_flags[e]);
        }
        match self.direction {
            Direction::Forward => {
                edges.reverse();
                Some(Walk { start: at, edges })
            }
            Direction::Reverse => Some(Walk { start: v, edges }),
        }
    }
}

/// Incremental level-by-level computation.
pub(crate) struct HopRun<'v, 'g> {
    view: &'v HopView<'g>,
    direction: Direction,
    label: Vec<Length>,
    heads: Vec<u32>,
    log: Vec<LogEntry>,
    level: u32,
    heap: BinaryHeap<Queued>,
    changed: Vec<VertexId>,
    changed_stamp: Vec<u32>,
    base: Length,
}

impl<'v, 'g> HopRun<'v, 'g> {
    /// Level 0: Dijkstra over plain edges from the seeds.
    pub(crate) fn start(
        view: &'v HopView<'g>,
        seeds: &[(VertexId, Length)],
        direction: Direction,
    ) -> Result<Self, HopError> {
        view.check()?;
        let n = view.g.n();
        let mut run = HopRun {
            view,
            direction,
            label: vec![INF; n],
            heads: vec![NO_ENTRY; n],
            log: Vec::new(),
            level: 0,
            heap: BinaryHeap::new(),
            changed: Vec::new(),
            changed_stamp: vec![u32::MAX; n],
            base: INF,
        };
        for &(v, value) in seeds {
            if v >= n {
                return Err(HopError::SourceOutOfRange(v));
            }
            run.improve(v, value, NO_EDGE);
        }
        run.settle();
        Ok(run)
    }

    /// Every vertex starts at 0 without being queued, which is already closed
    /// under nonnegative plain edges. Labels are then `d^j(V,·)` and only
    /// vertices with negative labels are ever touched.
    pub(crate) fn start_floor(view: &'v HopView<'g>, frontier: Vec<VertexId>) -> Result<Self, HopError> {
        view.check()?;
        let n = view.g.n();
        Ok(HopRun {
            view,
            direction: Direction::Forward,
            label: vec![0.0; n],
            heads: vec![NO_ENTRY; n],
            log: Vec::new(),
            level: 0,
            heap: BinaryHeap::new(),
            changed: frontier,
            changed_stamp: vec![u32::MAX; n],
            base: 0.0,
        })
    }

    fn improve(&mut self, v: VertexId, value: Length, edge: u32) {
        if !(value < self.label[v]) {
            return;
        }
        self.label[v] = value;
        let head = self.heads[v];
        if head != NO_ENTRY && self.log[head as usize].level == self.level {
            let entry = &mut self.log[head as usize];
            entry.edge = edge;
            entry.value = value;
        } else {
            self.log.push(LogEntry { level: self.level, edge, prev: head, value });
            self.heads[v] = (self.log.len() - 1) as u32;
        }
        if self.changed_stamp[v] != self.level {
            self.changed_stamp[v] = self.level;
            self.changed.push(v);
        }
        self.heap.push(Queued { dist: value, vertex: v });
    }

    fn settle(&mut self) {
        let g = self.view.g;
        while let Some(Queued { dist, vertex }) = self.heap.pop() {
            if dist > self.label[vertex] {
                continue;
            }
            let adjacent = match self.direction {
                Direction::Forward => g.out_edges(vertex),
                Direction::Reverse => g.in_edges(vertex),
            };
            for &e in adjacent {
                if self.view.class[e] != EdgeClass::Plain {
                    continue;
                }
                let edge = g.edge(e);
                let next = match self.direction {
                    Direction::Forward => edge.head,
                    Direction::Reverse => edge.tail,
                };
                self.improve(next, dist + edge.len, e as u32);
            }
        }
    }

    /// Advances to the next level; returns the vertices whose label dropped.
    pub(crate) fn step(&mut self) -> &[VertexId] {
        let g = self.view.g;
        let frontier = core::mem::take(&mut self.changed);
        self.level += 1;
        let mut relax = Vec::new();
        for &x in &frontier {
            let value = self.label[x];
            let adjacent = match self.direction {
                Direction::Forward => g.out_edges(x),
                Direction::Reverse => g.in_edges(x),
            };
            for &e in adjacent {
                if self.view.class[e] == EdgeClass::Hop {
                    let edge = g.edge(e);
                    let y = match self.direction {
                        Direction::Forward => edge.head,
                        Direction::Reverse => edge.tail,
                    };
                    relax.push((y, value + edge.len, e as u32));
                }
            }
        }
        // candidates are computed from level-j labels before any level-(j+1)
        // update is applied
        for (y, value, e) in relax {
            self.improve(y, value, e);
        }
        self.settle();
        &self.changed
    }

    pub(crate) fn label(&self) -> &[Length] {
        &self.label
    }

    pub(crate) fn level(&self) -> usize {
        self.level as usize
    }

    pub(crate) fn finish(self) -> DistTable {
        let g = self.view.g;
        DistTable {
            direction: self.direction,
            levels: self.level as usize,
            top: self.label,
            heads: self.heads,
            log: self.log,
            hop_flags: self.view.class.iter().map(|&c| c == EdgeClass::Hop).collect(),
            tails: g.edges().iter().map(|e| e.tail).collect(),
            heads_of_edges: g.edges().iter().map(|e| e.head).collect(),
            base: self.base,
        }
    }
}

/// Labels and parent edges of a single Dijkstra pass.
#[derive(Clone, Debug, PartialEq)]
pub struct DijkstraLabels {
    pub dist: Vec<Length>,
    pub parent: Vec<Option<EdgeId>>,
}

/// Multi-source Dijkstra over the non-frozen edges of `g`. Seeds may carry
/// arbitrary (including negative) starting values.
pub fn dijkstra_pass(g: &Graph, seeds: &[(VertexId, Length)]) -> Result<DijkstraLabels, HopError> {
    let view = HopView::from_fn(g, |e| if g.is_frozen(e) { EdgeClass::Skip } else { EdgeClass::Plain });
    let table = HopRun::start(&view, seeds, Direction::Forward)?.finish();
    let parent = (0..g.n())
        .map(|v| table.entry_at(0, v).and_then(|e| (e.edge != NO_EDGE).then_some(e.edge as usize)))
        .collect();
    Ok(DijkstraLabels { dist: table.top, parent })
}

/// `d^j(S,·)` (forward) or `d^j(·,S)` (reverse) for `j = 0..=r`, hops
/// counted against the frozen set of `g`.
pub fn hop_distances(g: &Graph, sources: &[VertexId], r: usize, direction: Direction) -> Result<DistTable, HopError> {
    hop_distances_in(&HopView::new(g), sources, r, direction)
}

pub fn hop_distances_in(
    view: &HopView<'_>,
    sources: &[VertexId],
    r: usize,
    direction: Direction,
) -> Result<DistTable, HopError> {
    let seeds: Vec<_> = sources.iter().map(|&s| (s, 0.0)).collect();
    let mut run = HopRun::start(view, &seeds, direction)?;
    for _ in 0..r {
        if run.step().is_empty() {
            // fixpoint: all higher levels are identical
            let mut table = run.finish();
            table.levels = r;
            return Ok(table);
        }
    }
    Ok(run.finish())
}

#[derive(Clone, Debug, PartialEq)]
pub enum FixpointOutcome {
    /// Johnson potentials `min(0, d(N,·))`; every edge is nonnegative under them.
    Potential(Potential),
    Cycle(NegCycleCert),
    /// Still improving at level `r_cap + 1` without a repeated negative vertex.
    NotConverged { witness: Walk },
}

/// Johnson potentials from hop distances seeded at every frozen-edge tail,
/// stopping at the first level where no tail improves.
pub fn johnson_fixpoint(g: &Graph, r_cap: usize) -> Result<FixpointOutcome, HopError> {
    johnson_fixpoint_in(&HopView::new(g), r_cap)
}

pub fn johnson_fixpoint_in(view: &HopView<'_>, r_cap: usize) -> Result<FixpointOutcome, HopError> {
    let tails = view.hop_tails();
    let seeds: Vec<_> = tails.iter().map(|&s| (s, 0.0)).collect();
    let run = HopRun::start(view, &seeds, Direction::Forward)?;
    fixpoint_loop(view, run, &tails, r_cap)
}

/// Same outcome contract as [`johnson_fixpoint_in`], computing `d^j(V,·)`
/// directly so that only negatively labelled vertices are explored.
pub fn johnson_fixpoint_floor_in(view: &HopView<'_>, r_cap: usize) -> Result<FixpointOutcome, HopError> {
    let tails = view.hop_tails();
    let run = HopRun::start_floor(view, tails.clone())?;
    fixpoint_loop(view, run, &tails, r_cap)
}

fn fixpoint_loop(
    view: &HopView<'_>,
    mut run: HopRun<'_, '_>,
    tails: &[VertexId],
    r_cap: usize,
) -> Result<FixpointOutcome, HopError> {
    let mut is_tail = vec![false; view.graph().n()];
    for &t in tails {
        is_tail[t] = true;
    }
    loop {
        let improved_tail = run.step().iter().copied().filter(|&v| is_tail[v]).min();
        match improved_tail {
            None => {
                let values = run.label().iter().map(|&d| d.min(0.0)).collect();
                return Ok(FixpointOutcome::Potential(Potential::from_finite(values, Provenance::Johnson)));
            }
            Some(t) if run.level() > r_cap => {
                let table = run.finish();
                let witness = table.witness(t).expect("improved label has a witness");
                return Ok(match repeated_vertex_cycle(view, &witness) {
                    Some(cert) => FixpointOutcome::Cycle(cert),
                    None => FixpointOutcome::NotConverged { witness },
                });
            }
            Some(_) => {}
        }
    }
}

/// Tails of the hop edges along `walk`, with their positions, followed by
/// the walk's endpoint at position `walk.edges.len()`.
pub(crate) fn hop_sequence(view: &HopView<'_>, walk: &Walk) -> Vec<(usize, VertexId)> {
    let g = view.graph();
    let mut seq: Vec<(usize, VertexId)> = walk
        .edges
        .iter()
        .enumerate()
        .filter(|&(_, &e)| view.class(e) == EdgeClass::Hop)
        .map(|(pos, &e)| (pos, g.edge(e).tail))
        .collect();
    let end = g.walk_length(walk).map(|w| w.end).expect("witness walks are connected");
    seq.push((walk.edges.len(), end));
    seq
}

/// If a negative vertex occurs twice on an improving witness (counting the
/// endpoint), the closed subwalk between the occurrences is a negative cycle.
pub(crate) fn repeated_vertex_cycle(view: &HopView<'_>, walk: &Walk) -> Option<NegCycleCert> {
    let seq = hop_sequence(view, walk);
    let g = view.graph();
    for j in 1..seq.len() {
        for i in 0..j {
            if seq[i].1 == seq[j].1 {
                let cert = NegCycleCert::from_edges(g, walk.edges[seq[i].0..seq[j].0].to_vec());
                if cert.total < 0.0 {
                    return Some(cert);
                }
            }
        }
    }
    None
}

/// Vertices `v` with `d^r(U,v) < 0`.
pub fn negative_reach(g: &Graph, sources: &[VertexId], r: usize) -> Result<Vec<VertexId>, HopError> {
    let table = hop_distances(g, sources, r, Direction::Forward)?;
    Ok((0..g.n()).filter(|&v| table.top()[v] < 0.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, A, B, S, T};
    use crate::potentials::{is_valid, reweight};

    #[test]
    fn dijkstra_on_nonnegative_part() {
        let g = fixtures::a();
        let out = dijkstra_pass(&g, &[(S, 0.0)]).unwrap();
        assert_eq!(out.dist, vec![0.0, 1.0, INF, INF]);
        assert_eq!(out.parent, vec![None, Some(0), None, None]);

        let all: Vec<_> = (0..4).map(|v| (v, 0.0)).collect();
        assert_eq!(dijkstra_pass(&g, &all).unwrap().dist, vec![0.0; 4]);

        let out = dijkstra_pass(&g, &[(B, -5.0)]).unwrap();
        assert_eq!(out.dist, vec![INF, INF, -5.0, -3.0]);
    }

    #[test]
    fn dijkstra_rejects_negative_plain_edge() {
        let g = fixtures::a();
        let unfrozen = g.with_frozen(vec![false, true, false]);
        assert!(dijkstra_pass(&unfrozen, &[(S, 0.0)]).is_ok());
        let view = HopView::from_fn(&g, |_| EdgeClass::Plain);
        assert_eq!(
            HopRun::start(&view, &[(S, 0.0)], Direction::Forward).err(),
            Some(HopError::NegativePlainEdge { edge: 1, len: -5.0 })
        );
    }

    #[test]
    fn one_hop_on_fixture_a() {
        let g = fixtures::a();
        let table = hop_distances(&g, &[S], 1, Direction::Forward).unwrap();
        assert_eq!(table.at(0, T), INF);
        assert_eq!(table.at(1, T), -2.0);
        assert_eq!(table.top(), &[0.0, 1.0, -4.0, -2.0]);
        let w = table.witness(T).unwrap();
        assert_eq!(w, Walk { start: S, edges: vec![0, 1, 2] });
        assert!(table.improved_at(1, T));
        assert!(!table.improved_at(1, A));
    }

    #[test]
    fn zero_hops_is_plain_dijkstra() {
        let g = fixtures::a();
        let table = hop_distances(&g, &[S], 0, Direction::Forward).unwrap();
        assert_eq!(table.top(), dijkstra_pass(&g, &[(S, 0.0)]).unwrap().dist.as_slice());
    }

    #[test]
    fn reverse_direction_matches_reverse_view() {
        let g = fixtures::a();
        let rev = hop_distances(&g, &[T], 2, Direction::Reverse).unwrap();
        let fwd = hop_distances(&g.reverse(), &[T], 2, Direction::Forward).unwrap();
        assert_eq!(rev.top(), fwd.top());
        assert_eq!(rev.top(), &[-2.0, -3.0, 2.0, 0.0]);
        let w = rev.witness(S).unwrap();
        assert_eq!(w, Walk { start: S, edges: vec![0, 1, 2] });
        assert_eq!(g.walk_length(&w).unwrap().length, -2.0);
    }

    #[test]
    fn fixpoint_on_fixtures() {
        let g = fixtures::a();
        let FixpointOutcome::Potential(phi) = johnson_fixpoint(&g, 2).unwrap() else { panic!() };
        assert_eq!(phi.values(), &[0.0, 0.0, -5.0, -3.0]);
        assert_eq!(is_valid(&g, &phi), Ok(()));
        assert_eq!(reweight(&g, &phi).negative_edge_count(), 0);

        let g = fixtures::b();
        let FixpointOutcome::Cycle(cert) = johnson_fixpoint(&g, 3).unwrap() else { panic!() };
        assert_eq!(cert.total, -2.0);
        assert_eq!(g.verify_neg_cycle(&cert), Ok(-2.0));

        let g = Graph::new(3, [(0, 1, 2.0), (1, 2, 0.0)]).unwrap();
        let FixpointOutcome::Potential(phi) = johnson_fixpoint(&g, 0).unwrap() else { panic!() };
        assert!(phi.is_zero());
    }

    #[test]
    fn fixpoint_not_converged_without_repeat() {
        // the chain needs three hops; with r_cap = 1 the witness at level 2
        // has distinct negative vertices
        let g = fixtures::c();
        let FixpointOutcome::NotConverged { witness } = johnson_fixpoint(&g, 1).unwrap() else { panic!() };
        let view = HopView::new(&g);
        assert_eq!(view.hops_on(&witness), 2);
        assert!(matches!(johnson_fixpoint(&g, 3).unwrap(), FixpointOutcome::Potential(_)));
    }

    #[test]
    fn negative_reach_on_fixture_a() {
        let g = fixtures::a();
        assert_eq!(negative_reach(&g, &[A], 1).unwrap(), vec![B, T]);
        let plain = Graph::new(3, [(0, 1, 1.0), (1, 2, 0.0)]).unwrap();
        assert!(negative_reach(&plain, &[0], 3).unwrap().is_empty());

        let FixpointOutcome::Potential(phi) = johnson_fixpoint(&g, 1).unwrap() else { panic!() };
        let neutral = reweight(&g, &phi);
        assert!(negative_reach(&neutral, &[A], 1).unwrap().is_empty());
    }
}
