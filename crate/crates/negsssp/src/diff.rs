//! Differential testing of the solver against Bellman-Ford-Moore.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use negsssp_core::baselines::{reference_sssp, OracleOutcome};
use negsssp_core::graph::{Graph, VertexId};
use negsssp_core::solver::{solve_sssp, SolveConfig, SolveOutcome};
use rayon::prelude::*;

use crate::bench::{BenchReport, BenchRow};
use crate::io::read_dimacs;

/// Checks a solver answer against the oracle: same verdict, identical
/// distances, tight tree edges, and a certificate that verifies on `g`.
pub fn compare(g: &Graph, source: VertexId, got: &SolveOutcome) -> Result<(), String> {
    match (got, reference_sssp(g, source)) {
        (SolveOutcome::NegativeCycle(cert), OracleOutcome::Cycle(_)) => {
            g.verify_neg_cycle(cert).map(|_| ()).map_err(|e| format!("certificate rejected: {e}"))
        }
        (SolveOutcome::Distances { dist, parent }, OracleOutcome::Distances { dist: want, .. }) => {
            if let Some(v) = (0..g.n()).find(|&v| dist[v] != want[v]) {
                return Err(format!("vertex {}: solver {} oracle {}", v + 1, dist[v], want[v]));
            }
            for (v, p) in parent.iter().enumerate() {
                if let Some(e) = *p {
                    let edge = g.edge(e);
                    if edge.head != v || dist[edge.tail] + edge.len != dist[v] {
                        return Err(format!("tree edge {} into vertex {} is not tight", e + 1, v + 1));
                    }
                }
            }
            Ok(())
        }
        (SolveOutcome::NegativeCycle(_), OracleOutcome::Distances { .. }) => {
            Err("solver reports a cycle, oracle does not".into())
        }
        (SolveOutcome::Distances { .. }, OracleOutcome::Cycle(_)) => {
            Err("oracle finds a cycle, solver does not".into())
        }
    }
}

/// Solves `g` from `source` and compares with the oracle.
pub fn check_instance(name: &str, g: &Graph, source: VertexId, cfg: &SolveConfig) -> BenchRow {
    let row = BenchRow::new(name, "negsssp", cfg.seed, g.n(), g.m(), g.negative_vertices().len());
    let start = Instant::now();
    let res = match solve_sssp(g, source, cfg) {
        Ok(res) => res,
        Err(e) => return row.failed(format!("solver error: {e}")),
    };
    let mut row = row.with_meta(&res.meta);
    row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match compare(g, source, &res.outcome) {
        Ok(()) => row,
        Err(e) => row.failed(e),
    }
}

/// `.gr` files of `dir` in name order.
pub fn corpus_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|x| x == "gr"));
    files.sort();
    Ok(files)
}

/// Every (file, seed) pair from source vertex 0. Unreadable files become
/// failed rows and the run continues.
pub fn differential_run(dir: &Path, seeds: &[u64], cfg: &SolveConfig) -> std::io::Result<BenchReport> {
    let files = corpus_files(dir)?;
    let jobs: Vec<(&PathBuf, u64)> = files.iter().flat_map(|f| seeds.iter().map(move |&s| (f, s))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(path, seed)| {
            let name = path.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            match read_dimacs(path) {
                Ok(g) if g.n() == 0 => BenchRow::new(&name, "negsssp", seed, 0, g.m(), 0).failed("graph has no vertices"),
                Ok(g) => check_instance(&name, &g, 0, &SolveConfig { seed, ..cfg.clone() }),
                Err(e) => BenchRow::new(&name, "negsssp", seed, 0, 0, 0).failed(e),
            }
        })
        .collect();
    Ok(BenchReport::new(cfg, rows))
}
