mod common;

use negsssp_core::baselines::{brute_force_betweenness, layered_hop_distances};
use negsssp_core::sandwich::betweenness_of_pair;
use negsssp_core::graph::{Graph, Walk, INF};
use negsssp_core::hopdist::{hop_distances, johnson_fixpoint, Direction, FixpointOutcome, HopView};
use negsssp_core::potentials::{is_valid, reweight};
use negsssp_core::solver::{solve_sssp, SolveConfig};
use proptest::prelude::*;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1usize..16, 0usize..40, any::<u64>(), 0.0f64..0.5)
        .prop_map(|(n, m, seed, neg)| common::random_graph(seed, n, m, neg, -8, 16))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hop_distances_match_layered_oracle(g in graph_strategy(), r in 0usize..5, s in any::<prop::sample::Index>()) {
        let s = s.index(g.n());
        let table = hop_distances(&g, &[s], r, Direction::Forward).unwrap();
        let layers = layered_hop_distances(&g, &[s], r);
        for (j, layer) in layers.iter().enumerate() {
            prop_assert_eq!(&table.level(j), layer);
        }
    }

    #[test]
    fn hop_levels_are_monotone(g in graph_strategy(), r in 1usize..6) {
        let table = hop_distances(&g, &[0], r, Direction::Forward).unwrap();
        for j in 1..=r {
            for v in 0..g.n() {
                prop_assert!(table.at(j, v) <= table.at(j - 1, v));
            }
        }
    }

    #[test]
    fn witnesses_attain_their_labels(g in graph_strategy(), r in 0usize..5) {
        let view = HopView::new(&g);
        for dir in [Direction::Forward, Direction::Reverse] {
            let table = hop_distances(&g, &[0], r, dir).unwrap();
            for v in 0..g.n() {
                let d = table.top()[v];
                let w = table.witness(v);
                prop_assert_eq!(d == INF, w.is_none());
                let Some(w) = w else { continue };
                let eval = g.walk_length(&w).unwrap();
                prop_assert!(eval.length <= d);
                prop_assert!(view.hops_on(&w) <= r);
                let (start, end) = match dir {
                    Direction::Forward => (0, v),
                    Direction::Reverse => (v, 0),
                };
                prop_assert_eq!((w.start, eval.end), (start, end));
            }
        }
    }

    #[test]
    fn walk_length_is_additive(g in graph_strategy(), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..12)) {
        // a random walk following out-edges from vertex 0
        let mut edges = Vec::new();
        let mut at = 0;
        for p in picks {
            let out = g.out_edges(at);
            if out.is_empty() {
                break;
            }
            let e = out[p.index(out.len())];
            edges.push(e);
            at = g.edge(e).head;
        }
        let cut = edges.len() / 2;
        let first = Walk { start: 0, edges: edges[..cut].to_vec() };
        let mid = g.walk_length(&first).unwrap();
        let second = Walk { start: mid.end, edges: edges[cut..].to_vec() };
        let whole = g.walk_length(&first.clone().concat(&second)).unwrap();
        prop_assert_eq!(whole.length, mid.length + g.walk_length(&second).unwrap().length);
    }

    #[test]
    fn johnson_fixpoint_potential_is_neutralizing(g in graph_strategy()) {
        match johnson_fixpoint(&g, g.n()).unwrap() {
            FixpointOutcome::Potential(phi) => {
                prop_assert!(is_valid(&g, &phi).is_ok());
                prop_assert_eq!(reweight(&g, &phi).negative_edge_count(), 0);
            }
            FixpointOutcome::Cycle(cert) => prop_assert!(g.verify_neg_cycle(&cert).is_ok()),
            FixpointOutcome::NotConverged { .. } => prop_assert!(false, "n hops always suffice"),
        }
    }

    #[test]
    fn solver_is_deterministic(g in graph_strategy(), seed in any::<u64>()) {
        let cfg = SolveConfig { seed, k_small: 0, ..SolveConfig::default() };
        prop_assert_eq!(solve_sssp(&g, 0, &cfg), solve_sssp(&g, 0, &cfg));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn pair_betweenness_matches_brute_force(g in graph_strategy(), r in 0usize..4) {
        let counts = brute_force_betweenness(&g, r).unwrap();
        for (s, row) in counts.iter().enumerate() {
            for (t, &count) in row.iter().enumerate() {
                prop_assert_eq!(count, betweenness_of_pair(&g, s, t, r).unwrap());
            }
        }
    }
}
