//! Structural primitives of the sandwich-based neutralization loop:
//! proper-hop resolution, sandwich sampling, sandwich-to-remote conversion,
//! remote-set neutralization and betweenness reduction.
//!
//! Every function takes the graph of the current iteration, whose frozen set
//! is the negative-vertex set `N` fixed at the start of the iteration. For a
//! subset `S ⊆ N`, `G_S` keeps the hop edges of `S` and drops the other
//! frozen edges.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::graph::{Graph, Length, NegCycleCert, VertexId, Walk, INF};
use crate::hopdist::{
    hop_distances, hop_sequence, johnson_fixpoint_floor_in, johnson_fixpoint_in, repeated_vertex_cycle,
    Direction, FixpointOutcome, HopError, HopRun, HopView,
};
use crate::potentials::{clamp_tight, reweight, Potential, Provenance};

#[derive(Clone, Debug, PartialEq)]
pub enum SandwichError {
    Hop(HopError),
    NotNegativeVertex(VertexId),
    ZeroHops,
    /// `d^h(s,u) + d^h(u,t) > 0` for a sandwich member.
    SandwichViolated { u: VertexId, sum: Length },
    /// A step whose correctness is proven produced an impossible result.
    Internal(&'static str),
}

impl fmt::Display for SandwichError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SandwichError::Hop(e) => write!(f, "{e}"),
            SandwichError::NotNegativeVertex(v) => write!(f, "vertex {v} is not a frozen negative vertex"),
            SandwichError::ZeroHops => f.write_str("hop parameter must be at least 1"),
            SandwichError::SandwichViolated { u, sum } => {
                write!(f, "sandwich member {u} has d(s,u) + d(u,t) = {sum} > 0")
            }
            SandwichError::Internal(what) => write!(f, "internal inconsistency: {what}"),
        }
    }
}

impl core::error::Error for SandwichError {}

impl From<HopError> for SandwichError {
    fn from(e: HopError) -> Self {
        SandwichError::Hop(e)
    }
}

/// Weak `h`-hop negative sandwich: `d^h(s,u) + d^h(u,t) ≤ 0` for every `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sandwich {
    pub s: VertexId,
    pub t: VertexId,
    pub u: Vec<VertexId>,
    pub h: usize,
}

/// A walk from `s` to `t` with exactly `h` hops through pairwise distinct
/// negative vertices and negative length, so `ŝd^h(s,t) < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProperPair {
    pub s: VertexId,
    pub t: VertexId,
    pub h: usize,
    pub witness: Walk,
    pub length: Length,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProperOutcome {
    Cycle(NegCycleCert),
    Pair(ProperPair),
    /// `d(V,·)` in `G_S`; neutralizes every edge of `S`.
    Potential(Potential),
}

fn membership(g: &Graph, set: &[VertexId]) -> Result<Vec<bool>, SandwichError> {
    let mut is_tail = vec![false; g.n()];
    for &e in g.frozen_edges() {
        is_tail[g.edge(e).tail] = true;
    }
    let mut mask = vec![false; g.n()];
    for &v in set {
        if v >= g.n() || !is_tail[v] {
            return Err(SandwichError::NotNegativeVertex(v));
        }
        mask[v] = true;
    }
    Ok(mask)
}

/// Computes `d^h(S,·)` and `d^{h+1}(S,·)` in `G_S`. Equal on `S` gives
/// Johnson potentials; otherwise the improving witness either repeats a
/// negative vertex (negative cycle) or its prefix through the first `h` hops
/// is a proper pair.
pub fn resolve_proper(g: &Graph, set: &[VertexId], h: usize) -> Result<ProperOutcome, SandwichError> {
    if h == 0 {
        return Err(SandwichError::ZeroHops);
    }
    let in_s = membership(g, set)?;
    let view = HopView::restricted(g, &in_s);
    let seeds: Vec<_> = set.iter().map(|&s| (s, 0.0)).collect();
    let mut run = HopRun::start(&view, &seeds, Direction::Forward)?;
    let mut improved: Option<VertexId> = None;
    for _ in 0..=h {
        improved = run.step().iter().copied().filter(|&v| in_s[v]).min();
    }
    let Some(t) = improved else {
        let values = run.label().iter().map(|&d| d.min(0.0)).collect();
        return Ok(ProperOutcome::Potential(Potential::from_finite(values, Provenance::ProperHop)));
    };
    let table = run.finish();
    let witness = table.witness(t).ok_or(SandwichError::Internal("improved label without witness"))?;
    if let Some(cert) = repeated_vertex_cycle(&view, &witness) {
        return Ok(ProperOutcome::Cycle(cert));
    }
    let seq = hop_sequence(&view, &witness);
    if seq.len() != h + 2 {
        return Err(SandwichError::Internal("improving witness does not have h+1 hops"));
    }
    let prefix = Walk { start: seq[0].1, edges: witness.edges[seq[0].0..seq[h].0].to_vec() };
    let length = g.walk_length(&prefix).map_err(|_| SandwichError::Internal("prefix disconnected"))?.length;
    if !(length < 0.0) {
        return Err(SandwichError::Internal("proper prefix is not negative"));
    }
    Ok(ProperOutcome::Pair(ProperPair { s: seq[0].1, t: seq[h].1, h, witness: prefix, length }))
}

/// `q = 2√(k/h)`; each negative vertex is sampled with probability `1/q`.
pub fn sampling_q(k: usize, h: usize) -> f64 {
    2.0 * libm::sqrt(k as f64 / h as f64)
}

/// Independent inclusion with probability `1/q`; everything when `q ≤ 1`.
pub fn sample_set<R: Rng + ?Sized>(negatives: &[VertexId], q: f64, rng: &mut R) -> Vec<VertexId> {
    if q <= 1.0 {
        return negatives.to_vec();
    }
    let p = 1.0 / q;
    negatives.iter().copied().filter(|_| rng.random_bool(p)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleOutcome {
    Cycle(NegCycleCert),
    Sandwich(Sandwich),
    /// The sampled set and `d(V,·)` in `G_S`.
    Neutralized { set: Vec<VertexId>, potential: Potential },
}

/// Samples `S ⊆ N`, resolves proper hops on it, and widens a proper pair
/// `(s,t)` to the sandwich `(s, B_{s,t}, t)` with
/// `B_{s,t} = {u ∈ N : d^h(s,u) + d^h(u,t) < 0}` in the full graph.
pub fn sample_sandwich<R: Rng + ?Sized>(g: &Graph, h: usize, rng: &mut R) -> Result<SampleOutcome, SandwichError> {
    if h == 0 {
        return Err(SandwichError::ZeroHops);
    }
    let negatives = g.negative_vertices();
    let set = sample_set(&negatives, sampling_q(negatives.len(), h), rng);
    match resolve_proper(g, &set, h)? {
        ProperOutcome::Cycle(cert) => Ok(SampleOutcome::Cycle(cert)),
        ProperOutcome::Potential(potential) => Ok(SampleOutcome::Neutralized { set, potential }),
        ProperOutcome::Pair(pair) => {
            let from_s = hop_distances(g, &[pair.s], h, Direction::Forward)?;
            let to_t = hop_distances(g, &[pair.t], h, Direction::Reverse)?;
            let u = negatives.into_iter().filter(|&u| from_s.top()[u] + to_t.top()[u] < 0.0).collect();
            Ok(SampleOutcome::Sandwich(Sandwich { s: pair.s, t: pair.t, u, h }))
        }
    }
}

/// Checks the weak sandwich inequality for every member.
pub fn audit_sandwich(g: &Graph, sw: &Sandwich) -> Result<(), SandwichError> {
    let from_s = hop_distances(g, &[sw.s], sw.h, Direction::Forward)?;
    let to_t = hop_distances(g, &[sw.t], sw.h, Direction::Reverse)?;
    for &u in &sw.u {
        let sum = from_s.top()[u] + to_t.top()[u];
        if !(sum <= 0.0) {
            return Err(SandwichError::SandwichViolated { u, sum });
        }
    }
    Ok(())
}

/// Potential making a sandwich's middle set remote, plus the vertices that
/// can still be negatively reached from it.
#[derive(Clone, Debug, PartialEq)]
pub struct RemoteConversion {
    pub potential: Potential,
    /// `{v : d^{r+h}(s,v) + d^{r+h}(v,t) < 0}` before reweighting. After
    /// reweighting, the negative `r`-hop reach of `U` lies inside it.
    pub between: Vec<VertexId>,
}

/// `φ(v) = max(d^{r+h}(s,v), −d^{r+h}(v,t))`, with `+∞` clamped to the
/// largest finite value.
pub fn sandwich_to_remote(g: &Graph, sw: &Sandwich, r: usize) -> Result<RemoteConversion, SandwichError> {
    audit_sandwich(g, sw)?;
    let radius = r + sw.h;
    let from_s = hop_distances(g, &[sw.s], radius, Direction::Forward)?;
    let to_t = hop_distances(g, &[sw.t], radius, Direction::Reverse)?;
    let (ds, dt) = (from_s.top(), to_t.top());
    let raw: Vec<Length> = (0..g.n()).map(|v| max_potential(ds[v], dt[v])).collect();
    let between = (0..g.n()).filter(|&v| ds[v] + dt[v] < 0.0).collect();
    Ok(RemoteConversion { potential: clamp_tight(&raw, Provenance::Sandwich), between })
}

/// `max(d(x,v), −d(v,y))` under infinity arithmetic; never `−∞`.
fn max_potential(from: Length, to: Length) -> Length {
    if from == INF {
        INF
    } else if to == INF {
        from
    } else {
        from.max(-to)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NeutralizeOutcome {
    Potential(Potential),
    Cycle(NegCycleCert),
}

/// Neutralizes every hop edge of `U`.
///
/// The reference path runs the Johnson fixpoint on `G_U` with `|U|` hops.
/// The fast path handles `U` in batches of at most `r`, computing `d(V,·)`
/// directly so only negatively labelled vertices are explored; already
/// neutralized batches become plain edges for the later ones.
pub fn neutralize_remote(g: &Graph, set: &[VertexId], r: usize, fast: bool) -> Result<NeutralizeOutcome, SandwichError> {
    let in_u = membership(g, set)?;
    if set.is_empty() {
        return Ok(NeutralizeOutcome::Potential(Potential::zero(g.n()).with_provenance(Provenance::Neutralize)));
    }
    if !fast {
        let view = HopView::restricted(g, &in_u);
        return Ok(match johnson_fixpoint_in(&view, set.len())? {
            FixpointOutcome::Potential(p) => NeutralizeOutcome::Potential(p.with_provenance(Provenance::Neutralize)),
            FixpointOutcome::Cycle(c) => NeutralizeOutcome::Cycle(c),
            FixpointOutcome::NotConverged { .. } => {
                return Err(SandwichError::Internal("fixpoint with |U| hops did not converge"))
            }
        });
    }
    let mut current = g.clone();
    let mut total = Potential::zero(g.n());
    let mut settled = vec![false; g.n()];
    for batch in set.chunks(r.max(1)) {
        let mut in_batch = vec![false; g.n()];
        for &v in batch {
            in_batch[v] = true;
        }
        let view = HopView::restricted_with_settled(&current, &in_batch, &settled);
        let phi = match johnson_fixpoint_floor_in(&view, batch.len())? {
            FixpointOutcome::Potential(p) => p,
            FixpointOutcome::Cycle(c) => return Ok(NeutralizeOutcome::Cycle(c)),
            FixpointOutcome::NotConverged { .. } => {
                return Err(SandwichError::Internal("batch fixpoint did not converge"))
            }
        };
        current = reweight(&current, &phi);
        total.accumulate(&phi);
        for &v in batch {
            settled[v] = true;
        }
    }
    Ok(NeutralizeOutcome::Potential(total.with_provenance(Provenance::Neutralize)))
}

/// Number of vertices `v` with `d^r(s,v) + d^r(v,t) < 0`.
pub fn betweenness_of_pair(g: &Graph, s: VertexId, t: VertexId, r: usize) -> Result<usize, HopError> {
    let from_s = hop_distances(g, &[s], r, Direction::Forward)?;
    let to_t = hop_distances(g, &[t], r, Direction::Reverse)?;
    Ok((0..g.n()).filter(|&v| from_s.top()[v] + to_t.top()[v] < 0.0).count())
}

/// Rounds used by [`reduce_betweenness`]: `⌈b · ln n⌉`, at least one.
pub fn betweenness_rounds(n: usize, b: usize) -> usize {
    let rounds = libm::ceil(b as f64 * libm::log(n.max(1) as f64));
    (rounds as usize).max(1)
}

/// Repeatedly picks a uniform random pivot `x` and applies
/// `φ_x(v) = max(d^r(x,v), −d^r(v,x))`, after which `x` is not negatively
/// `r`-between any pair. A negative closed walk through a pivot is returned
/// as a cycle.
pub fn reduce_betweenness<R: Rng + ?Sized>(
    g: &Graph,
    r: usize,
    b: usize,
    rng: &mut R,
) -> Result<NeutralizeOutcome, SandwichError> {
    let n = g.n();
    let mut total = Potential::zero(n);
    if n == 0 || g.frozen_edges().is_empty() {
        return Ok(NeutralizeOutcome::Potential(total.with_provenance(Provenance::Betweenness)));
    }
    let mut current = g.clone();
    for _ in 0..betweenness_rounds(n, b) {
        let x = rng.random_range(0..n);
        let from_x = hop_distances(&current, &[x], r, Direction::Forward)?;
        if from_x.top()[x] < 0.0 {
            let walk = from_x.witness(x).ok_or(SandwichError::Internal("negative label without witness"))?;
            return Ok(NeutralizeOutcome::Cycle(NegCycleCert::from_edges(&current, walk.edges)));
        }
        let to_x = hop_distances(&current, &[x], r, Direction::Reverse)?;
        let raw: Vec<Length> = (0..n).map(|v| max_potential(from_x.top()[v], to_x.top()[v])).collect();
        let phi = clamp_tight(&raw, Provenance::Betweenness);
        current = reweight(&current, &phi);
        total.accumulate(&phi);
    }
    Ok(NeutralizeOutcome::Potential(total.with_provenance(Provenance::Betweenness)))
}
