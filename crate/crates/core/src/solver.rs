//! The main Las Vegas loop: preprocess, then neutralize negative edges
//! iteration by iteration while accumulating a valid potential, then one
//! Dijkstra pass in the fully reweighted graph.
//!
//! Randomness only affects running time. Every random failure (a sample
//! without a proper pair, a sandwich whose remoteness audit fails) restarts
//! the iteration, and after `restart_cap` attempts a deterministic fallback
//! neutralizes one negative vertex.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sandwich::{
    neutralize_remote, reduce_betweenness, sample_sandwich, sandwich_to_remote, SandwichError, NeutralizeOutcome,
    SampleOutcome,
};
use crate::graph::{EdgeId, Graph, Length, NegCycleCert, VertexId, INF};
use crate::hopdist::{dijkstra_pass, johnson_fixpoint, negative_reach, FixpointOutcome, HopError};
use crate::potentials::{is_valid, reweight, Potential, Provenance};
use crate::preprocess::{preprocess, LiftError, TransformMap};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub seed: u64,
    pub h_min: usize,
    pub h_override: Option<usize>,
    /// Sampling attempts per iteration before the fallback.
    pub restart_cap: usize,
    /// Iterations with at most this many negative vertices use plain
    /// hop-limited Johnson.
    pub k_small: usize,
    /// Batched neutralization of remote sets.
    pub fast_neutralize: bool,
    /// Betweenness is reduced for `r = betweenness_factor · h`.
    pub betweenness_factor: usize,
    /// Ignore everything the source cannot reach, including negative cycles.
    pub source_reachable_only: bool,
    /// Check the sandwich containment property on every conversion.
    pub audit: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 0,
            h_min: 3,
            h_override: None,
            restart_cap: 20,
            k_small: 64,
            fast_neutralize: true,
            betweenness_factor: 2,
            source_reachable_only: false,
            audit: true,
        }
    }
}

impl SolveConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolveConfig { seed, ..Self::default() }
    }
}

/// How an iteration ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterationPath {
    BaseCase,
    /// The sampled set had no proper pair and was neutralized directly.
    Sampled,
    Sandwich,
    Fallback,
}

/// One applied iteration potential.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub iteration: usize,
    pub path: IterationPath,
    pub h: usize,
    pub restarts: usize,
    pub negative_before: usize,
    pub negative_after: usize,
    pub valid: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveMeta {
    pub seed: u64,
    pub iterations: usize,
    pub restarts: usize,
    pub fallbacks: usize,
    /// Negative edges removed by each iteration.
    pub neutralized: Vec<usize>,
    pub h_schedule: Vec<usize>,
    pub ledger: Vec<LedgerEntry>,
    pub remoteness_audits: usize,
    pub remoteness_failures: usize,
    pub containment_checks: usize,
    /// Vertices and edges after preprocessing.
    pub transformed_n: usize,
    pub transformed_m: usize,
    /// Negative vertices before the first iteration.
    pub initial_k: usize,
    /// Negative edges left in the reweighted graph when distances were
    /// extracted; zero on every distance answer.
    pub final_negative_edges: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    /// `dist[v]` is `+∞` when unreachable; `parent[v]` is the last edge of a
    /// shortest path.
    Distances { dist: Vec<Length>, parent: Vec<Option<EdgeId>> },
    NegativeCycle(NegCycleCert),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub outcome: SolveOutcome,
    pub meta: SolveMeta,
}

/// Only raised when an internal audit catches a bug.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    SourceOutOfRange(VertexId),
    Hop(HopError),
    Sandwich(SandwichError),
    Lift(LiftError),
    InvalidPotential { iteration: usize, edges: Vec<EdgeId> },
    NoProgress { iteration: usize, before: usize, after: usize },
    ContainmentViolated { iteration: usize, vertex: VertexId },
    NotConverged { iteration: usize },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::SourceOutOfRange(v) => write!(f, "source {v} out of range"),
            SolveError::Hop(e) => write!(f, "{e}"),
            SolveError::Sandwich(e) => write!(f, "{e}"),
            SolveError::Lift(e) => write!(f, "{e}"),
            SolveError::InvalidPotential { iteration, edges } => {
                write!(f, "iteration {iteration}: potential makes {} edges negative", edges.len())
            }
            SolveError::NoProgress { iteration, before, after } => {
                write!(f, "iteration {iteration}: negative edges went from {before} to {after}")
            }
            SolveError::ContainmentViolated { iteration, vertex } => {
                write!(f, "iteration {iteration}: vertex {vertex} reached outside the sandwich")
            }
            SolveError::NotConverged { iteration } => {
                write!(f, "iteration {iteration}: hop-limited Johnson did not converge")
            }
        }
    }
}

impl core::error::Error for SolveError {}

impl From<HopError> for SolveError {
    fn from(e: HopError) -> Self {
        SolveError::Hop(e)
    }
}

impl From<SandwichError> for SolveError {
    fn from(e: SandwichError) -> Self {
        SolveError::Sandwich(e)
    }
}

/// `max(h_min, ⌊k^{1/5} / (log₂ k)^{2/5}⌋)` unless overridden.
pub fn choose_h(k: usize, cfg: &SolveConfig) -> usize {
    if let Some(h) = cfg.h_override {
        return h.max(1);
    }
    if k <= 1 {
        return cfg.h_min.max(1);
    }
    let k = k as f64;
    let raw = libm::pow(k, 0.2) / libm::pow(libm::log2(k), 0.4);
    (libm::floor(raw) as usize).max(cfg.h_min).max(1)
}

/// Result of one iteration on a freshly frozen graph.
#[derive(Clone, Debug, PartialEq)]
pub enum IterationOutcome {
    Potential { phi: Potential, path: IterationPath, h: usize, restarts: usize },
    Cycle(NegCycleCert),
}

/// Counters an iteration adds to the run metadata.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IterationStats {
    pub remoteness_audits: usize,
    pub remoteness_failures: usize,
    pub containment_checks: usize,
}

/// Hop-limited Johnson with `k` hops. A walk improving at level `k+1` must
/// repeat a negative vertex, so the result is a potential or a cycle.
pub fn base_case_johnson(g: &Graph) -> Result<NeutralizeOutcome, SolveError> {
    let k = g.negative_vertices().len();
    match johnson_fixpoint(g, k)? {
        FixpointOutcome::Potential(p) => Ok(NeutralizeOutcome::Potential(p)),
        FixpointOutcome::Cycle(c) => Ok(NeutralizeOutcome::Cycle(c)),
        FixpointOutcome::NotConverged { .. } => Err(SolveError::NotConverged { iteration: 0 }),
    }
}

/// Neutralizes the lowest-indexed negative vertex `u` with edge `(u,u′)`:
/// `φ(v) = min(0, ℓ(e) + d⁰(u′,v))`, or the cycle `e` followed by a
/// nonnegative path back to `u`.
pub fn fallback_neutralize_one(g: &Graph) -> Result<NeutralizeOutcome, SolveError> {
    let Some(&e) = g.frozen_edges().iter().min_by_key(|&&e| (g.edge(e).tail, e)) else {
        return Ok(NeutralizeOutcome::Potential(Potential::zero(g.n()).with_provenance(Provenance::Fallback)));
    };
    let edge = *g.edge(e);
    let labels = dijkstra_pass(g, &[(edge.head, edge.len)])?;
    if labels.dist[edge.tail] < 0.0 {
        let mut path = Vec::new();
        let mut at = edge.tail;
        while at != edge.head {
            let p = labels.parent[at].ok_or(SolveError::Sandwich(SandwichError::Internal("broken parent chain")))?;
            path.push(p);
            at = g.edge(p).tail;
        }
        path.push(e);
        path.reverse();
        return Ok(NeutralizeOutcome::Cycle(NegCycleCert::from_edges(g, path)));
    }
    let values = labels.dist.iter().map(|&d| d.min(0.0)).collect();
    Ok(NeutralizeOutcome::Potential(Potential::new(values, Provenance::Fallback).expect("finite after min")))
}

/// One iteration on `g`, whose frozen set must be its current negative edges.
pub fn iterate_once<R: Rng + ?Sized>(
    g: &Graph,
    cfg: &SolveConfig,
    rng: &mut R,
    stats: &mut IterationStats,
) -> Result<IterationOutcome, SolveError> {
    let k = g.negative_vertices().len();
    let h = choose_h(k, cfg);
    if k <= cfg.k_small {
        return Ok(match base_case_johnson(g)? {
            NeutralizeOutcome::Potential(phi) => {
                IterationOutcome::Potential { phi, path: IterationPath::BaseCase, h: k, restarts: 0 }
            }
            NeutralizeOutcome::Cycle(c) => IterationOutcome::Cycle(c),
        });
    }
    let n = g.n();
    for attempt in 0..cfg.restart_cap.max(1) {
        let mut total = match reduce_betweenness(g, cfg.betweenness_factor.max(1) * h, h, rng)? {
            NeutralizeOutcome::Potential(p) => p,
            NeutralizeOutcome::Cycle(c) => return Ok(IterationOutcome::Cycle(c)),
        };
        let g1 = reweight(g, &total);
        let sw = match sample_sandwich(&g1, h, rng)? {
            SampleOutcome::Cycle(c) => return Ok(IterationOutcome::Cycle(c)),
            SampleOutcome::Neutralized { set, potential } => {
                if set.is_empty() {
                    continue;
                }
                total.accumulate(&potential);
                return Ok(IterationOutcome::Potential { phi: total, path: IterationPath::Sampled, h, restarts: attempt });
            }
            SampleOutcome::Sandwich(sw) => sw,
        };
        let conv = sandwich_to_remote(&g1, &sw, h)?;
        let g2 = reweight(&g1, &conv.potential);
        let reach = negative_reach(&g2, &sw.u, h)?;
        if cfg.audit {
            stats.containment_checks += 1;
            let mut inside = vec![false; n];
            for &v in &conv.between {
                inside[v] = true;
            }
            if let Some(&vertex) = reach.iter().find(|&&v| !inside[v]) {
                return Err(SolveError::ContainmentViolated { iteration: 0, vertex });
            }
        }
        stats.remoteness_audits += 1;
        if reach.len() * h > n {
            stats.remoteness_failures += 1;
            continue;
        }
        total.accumulate(&conv.potential);
        match neutralize_remote(&g2, &sw.u, h, cfg.fast_neutralize)? {
            NeutralizeOutcome::Potential(p) => total.accumulate(&p),
            NeutralizeOutcome::Cycle(c) => return Ok(IterationOutcome::Cycle(c)),
        }
        return Ok(IterationOutcome::Potential { phi: total, path: IterationPath::Sandwich, h, restarts: attempt });
    }
    Ok(match fallback_neutralize_one(g)? {
        NeutralizeOutcome::Potential(phi) => {
            IterationOutcome::Potential { phi, path: IterationPath::Fallback, h, restarts: cfg.restart_cap.max(1) }
        }
        NeutralizeOutcome::Cycle(c) => IterationOutcome::Cycle(c),
    })
}

/// Mutable state of a solve on the preprocessed graph.
#[derive(Clone, Debug)]
pub struct SolverState {
    /// Current reweighted graph, refrozen.
    pub graph: Graph,
    /// Accumulated potential relative to the preprocessed graph.
    pub phi: Potential,
    pub meta: SolveMeta,
}

impl SolverState {
    pub fn new(g: &Graph) -> Self {
        let graph = g.refreeze();
        let meta = SolveMeta {
            transformed_n: g.n(),
            transformed_m: g.m(),
            initial_k: graph.negative_vertices().len(),
            ..SolveMeta::default()
        };
        SolverState { phi: Potential::zero(g.n()), graph, meta }
    }

    pub fn negative_edges(&self) -> usize {
        self.graph.frozen_edges().len()
    }

    /// Runs one iteration and applies its potential after auditing it.
    /// Returns a cycle certificate on the current graph if one was found.
    pub fn step<R: Rng + ?Sized>(&mut self, cfg: &SolveConfig, rng: &mut R) -> Result<Option<NegCycleCert>, SolveError> {
        let iteration = self.meta.iterations;
        let mut stats = IterationStats::default();
        let outcome = iterate_once(&self.graph, cfg, rng, &mut stats).map_err(|e| match e {
            SolveError::ContainmentViolated { vertex, .. } => SolveError::ContainmentViolated { iteration, vertex },
            SolveError::NotConverged { .. } => SolveError::NotConverged { iteration },
            other => other,
        })?;
        self.meta.remoteness_audits += stats.remoteness_audits;
        self.meta.remoteness_failures += stats.remoteness_failures;
        self.meta.containment_checks += stats.containment_checks;
        let (phi, path, h, restarts) = match outcome {
            IterationOutcome::Cycle(c) => return Ok(Some(c)),
            IterationOutcome::Potential { phi, path, h, restarts } => (phi, path, h, restarts),
        };
        let before = self.negative_edges();
        let valid = is_valid(&self.graph, &phi);
        let next = reweight(&self.graph, &phi).refreeze();
        let after = next.frozen_edges().len();
        self.meta.ledger.push(LedgerEntry {
            iteration,
            path,
            h,
            restarts,
            negative_before: before,
            negative_after: after,
            valid: valid.is_ok(),
        });
        if let Err(edges) = valid {
            return Err(SolveError::InvalidPotential { iteration, edges });
        }
        if after >= before {
            return Err(SolveError::NoProgress { iteration, before, after });
        }
        self.meta.iterations += 1;
        self.meta.restarts += restarts.min(cfg.restart_cap);
        if path == IterationPath::Fallback {
            self.meta.fallbacks += 1;
        }
        self.meta.neutralized.push(before - after);
        self.meta.h_schedule.push(h);
        self.phi.accumulate(&phi);
        self.graph = next;
        Ok(None)
    }
}

/// Solves single-source shortest paths with arbitrary real lengths, or
/// returns a negative cycle certificate on `g0`.
pub fn solve_sssp(g0: &Graph, source: VertexId, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    if source >= g0.n() {
        return Err(SolveError::SourceOutOfRange(source));
    }
    if cfg.source_reachable_only {
        return solve_reachable(g0, source, cfg);
    }
    let (g, map) = preprocess(g0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = SolverState::new(&g);
    state.meta.seed = cfg.seed;
    while state.negative_edges() > 0 {
        if let Some(cert) = state.step(cfg, &mut rng)? {
            let lifted = map.lift_cycle(&cert, g0).map_err(SolveError::Lift)?;
            return Ok(SolveResult { outcome: SolveOutcome::NegativeCycle(lifted), meta: state.meta });
        }
    }
    state.meta.final_negative_edges = state.graph.negative_edge_count();
    Ok(SolveResult { outcome: extract(&g, &map, &state, source)?, meta: state.meta })
}

/// Dijkstra in the fully reweighted graph, un-telescoped and lifted.
fn extract(g: &Graph, map: &TransformMap, state: &SolverState, source: VertexId) -> Result<SolveOutcome, SolveError> {
    let s = map.image(source);
    let labels = dijkstra_pass(&state.graph, &[(s, 0.0)])?;
    let phi = state.phi.values();
    let dist: Vec<Length> = labels
        .dist
        .iter()
        .enumerate()
        .map(|(v, &d)| if d == INF { INF } else { d - phi[s] + phi[v] })
        .collect();
    Ok(SolveOutcome::Distances { dist: map.lift_distances(&dist), parent: map.lift_tree(g, &labels.parent) })
}

/// Restricts to the vertices reachable from `source` and maps results back.
fn solve_reachable(g0: &Graph, source: VertexId, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    let mut seen = vec![false; g0.n()];
    let mut stack = vec![source];
    seen[source] = true;
    while let Some(v) = stack.pop() {
        for &e in g0.out_edges(v) {
            let w = g0.edge(e).head;
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    let mut index = vec![usize::MAX; g0.n()];
    let kept: Vec<VertexId> = (0..g0.n()).filter(|&v| seen[v]).collect();
    for (i, &v) in kept.iter().enumerate() {
        index[v] = i;
    }
    let edges: Vec<EdgeId> = (0..g0.m()).filter(|&e| seen[g0.edge(e).tail]).collect();
    let sub = Graph::new(
        kept.len(),
        edges.iter().map(|&e| {
            let edge = g0.edge(e);
            (index[edge.tail], index[edge.head], edge.len)
        }),
    )
    .expect("restriction keeps endpoints in range");
    let inner = SolveConfig { source_reachable_only: false, ..cfg.clone() };
    let res = solve_sssp(&sub, index[source], &inner)?;
    let outcome = match res.outcome {
        SolveOutcome::NegativeCycle(c) => {
            SolveOutcome::NegativeCycle(NegCycleCert::from_edges(g0, c.edges.iter().map(|&e| edges[e]).collect()))
        }
        SolveOutcome::Distances { dist, parent } => {
            let mut full = vec![INF; g0.n()];
            let mut tree = vec![None; g0.n()];
            for (i, &v) in kept.iter().enumerate() {
                full[v] = dist[i];
                tree[v] = parent[i].map(|e| edges[e]);
            }
            SolveOutcome::Distances { dist: full, parent: tree }
        }
    };
    Ok(SolveResult { outcome, meta: res.meta })
}
