//! Seeded graph generators. Identical specs give identical graphs.

use negsssp_core::graph::{Graph, VertexId};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    Uniform,
    PlantedNegativeCycle,
    LayeredSandwich,
    Grid,
    /// Lengths `w + p(u) − p(v)` with `w ≥ 0`: negative edges, no negative cycle.
    Feasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    pub neg_fraction: f64,
    /// Inclusive weight range; negative draws use `[lo, -1]`, the rest `[0, hi]`.
    pub lo: i64,
    pub hi: i64,
    pub structure: Structure,
    pub seed: u64,
}

impl GenSpec {
    pub fn uniform(n: usize, m: usize, neg_fraction: f64, seed: u64) -> Self {
        GenSpec { n, m, neg_fraction, lo: -8, hi: 16, structure: Structure::Uniform, seed }
    }

    pub fn with_structure(self, structure: Structure) -> Self {
        GenSpec { structure, ..self }
    }
}

/// A planted sandwich `(s, U, t)` with `d¹(s,u) < 0` and `d¹(u,t) < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedSandwich {
    pub s: VertexId,
    pub t: VertexId,
    pub u: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub graph: Graph,
    pub sandwich: Option<PlantedSandwich>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("need at least {need} vertices, got {got}")]
    TooFewVertices { need: usize, got: usize },
    #[error("need at least {need} edges, got {got}")]
    TooFewEdges { need: usize, got: usize },
    #[error("weight range [{lo}, {hi}] cannot produce the requested signs")]
    WeightRange { lo: i64, hi: i64 },
    #[error("negative fraction {0} outside [0, 1]")]
    Fraction(f64),
}

struct Draw {
    rng: ChaCha8Rng,
    lo: i64,
    hi: i64,
    neg: f64,
}

impl Draw {
    fn weight(&mut self) -> f64 {
        let w = if self.neg > 0.0 && self.rng.random_bool(self.neg) {
            self.rng.random_range(self.lo..=-1)
        } else {
            self.rng.random_range(0..=self.hi)
        };
        w as f64
    }

    fn vertex(&mut self, n: usize) -> VertexId {
        self.rng.random_range(0..n)
    }

    /// Uniform arc without self-loops (when `n > 1`).
    fn arc(&mut self, n: usize) -> (VertexId, VertexId, f64) {
        let u = self.vertex(n);
        let mut v = self.vertex(n);
        while n > 1 && v == u {
            v = self.vertex(n);
        }
        (u, v, self.weight())
    }
}

pub fn generate(spec: &GenSpec) -> Result<Generated, GenError> {
    if !(0.0..=1.0).contains(&spec.neg_fraction) {
        return Err(GenError::Fraction(spec.neg_fraction));
    }
    if spec.hi < 0 || (spec.neg_fraction > 0.0 && spec.lo > -1) {
        return Err(GenError::WeightRange { lo: spec.lo, hi: spec.hi });
    }
    if spec.n == 0 {
        return Err(GenError::TooFewVertices { need: 1, got: 0 });
    }
    let mut d = Draw {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        lo: spec.lo,
        hi: spec.hi,
        neg: spec.neg_fraction,
    };
    let n = spec.n;
    let mut sandwich = None;
    let arcs: Vec<(VertexId, VertexId, f64)> = match spec.structure {
        Structure::Uniform => (0..spec.m).map(|_| d.arc(n)).collect(),
        Structure::PlantedNegativeCycle => {
            if n < 2 {
                return Err(GenError::TooFewVertices { need: 2, got: n });
            }
            if spec.lo > -1 {
                return Err(GenError::WeightRange { lo: spec.lo, hi: spec.hi });
            }
            let len = n.min(2 + d.rng.random_range(0..4));
            if spec.m < len {
                return Err(GenError::TooFewEdges { need: len, got: spec.m });
            }
            let cycle = sample(&mut d.rng, n, len).into_vec();
            let mut arcs: Vec<_> = (0..spec.m - len).map(|_| d.arc(n)).collect();
            // every cycle arc is nonpositive and one is at most -1
            for i in 0..len {
                let w = if i == 0 { d.rng.random_range(spec.lo..=-1) } else { d.rng.random_range(spec.lo..=0) };
                arcs.push((cycle[i], cycle[(i + 1) % len], w as f64));
            }
            arcs
        }
        Structure::LayeredSandwich => {
            if n < 3 {
                return Err(GenError::TooFewVertices { need: 3, got: n });
            }
            if spec.lo > -1 {
                return Err(GenError::WeightRange { lo: spec.lo, hi: spec.hi });
            }
            let width = ((n - 2) / 4).max(1);
            if spec.m < 2 * width {
                return Err(GenError::TooFewEdges { need: 2 * width, got: spec.m });
            }
            let (s, t) = (0, 1);
            let u: Vec<VertexId> = (2..2 + width).collect();
            let mut arcs = Vec::with_capacity(spec.m);
            for &x in &u {
                arcs.push((s, x, d.rng.random_range(spec.lo..=-1) as f64));
                arcs.push((x, t, d.rng.random_range(spec.lo..=-1) as f64));
            }
            arcs.extend((arcs.len()..spec.m).map(|_| d.arc(n)));
            sandwich = Some(PlantedSandwich { s, t, u });
            arcs
        }
        Structure::Grid => {
            // row-major grid, arcs in both directions between neighbours
            let width = (n as f64).sqrt().ceil() as usize;
            let mut arcs = Vec::new();
            for v in 0..n {
                if (v + 1) % width != 0 && v + 1 < n {
                    arcs.push((v, v + 1, d.weight()));
                    arcs.push((v + 1, v, d.weight()));
                }
                if v + width < n {
                    arcs.push((v, v + width, d.weight()));
                    arcs.push((v + width, v, d.weight()));
                }
            }
            arcs
        }
        Structure::Feasible => {
            let spread = spec.hi.max(1);
            let p: Vec<i64> = (0..n).map(|_| d.rng.random_range(-spread..=spread)).collect();
            (0..spec.m)
                .map(|_| {
                    let (u, v, _) = d.arc(n);
                    let w = d.rng.random_range(0..=spec.hi) + p[u] - p[v];
                    (u, v, w as f64)
                })
                .collect()
        }
    };
    let graph = Graph::new(n, arcs).expect("generated endpoints are in range");
    Ok(Generated { graph, sandwich })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::format_dimacs;
    use negsssp_core::baselines::{bellman_ford_moore, Origin, OracleOutcome};

    #[test]
    fn grid_is_deterministic() {
        let spec = GenSpec::uniform(4, 0, 0.2, 7).with_structure(Structure::Grid);
        let a = format_dimacs(&generate(&spec).unwrap().graph);
        let b = format_dimacs(&generate(&spec).unwrap().graph);
        assert_eq!(a, b);
        assert_eq!(generate(&spec).unwrap().graph.m(), 8);
    }

    #[test]
    fn planted_cycle_is_found() {
        for seed in 0..50 {
            let spec = GenSpec::uniform(20, 40, 0.1, seed).with_structure(Structure::PlantedNegativeCycle);
            let g = generate(&spec).unwrap().graph;
            assert!(matches!(bellman_ford_moore(&g, Origin::All).outcome, OracleOutcome::Cycle(_)));
        }
    }

    #[test]
    fn feasible_has_no_cycle() {
        for seed in 0..50 {
            let spec = GenSpec::uniform(30, 90, 0.0, seed).with_structure(Structure::Feasible);
            let g = generate(&spec).unwrap().graph;
            assert!(g.negative_edge_count() > 0);
            assert!(matches!(bellman_ford_moore(&g, Origin::All).outcome, OracleOutcome::Distances { .. }));
        }
    }

    #[test]
    fn rejects_infeasible_specs() {
        let bad = GenSpec::uniform(1, 5, 0.2, 0).with_structure(Structure::PlantedNegativeCycle);
        assert_eq!(generate(&bad), Err(GenError::TooFewVertices { need: 2, got: 1 }));
        let bad = GenSpec { lo: 0, ..GenSpec::uniform(5, 5, 0.2, 0) };
        assert!(matches!(generate(&bad), Err(GenError::WeightRange { .. })));
        let bad = GenSpec::uniform(10, 1, 0.2, 0).with_structure(Structure::LayeredSandwich);
        assert!(matches!(generate(&bad), Err(GenError::TooFewEdges { .. })));
        assert!(matches!(generate(&GenSpec::uniform(5, 5, 1.5, 0)), Err(GenError::Fraction(_))));
    }
}
