//! Timing and report tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use negsssp_core::solver::{SolveConfig, SolveMeta};
use serde::{Deserialize, Serialize};

pub const BUILD_ID: &str = env!("NEGSSSP_BUILD");

/// One warm-up call, then the median wall time of `reps` timed calls.
pub fn median_time<T>(reps: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut last = f();
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        last = f();
        times.push(start.elapsed());
    }
    times.sort();
    (times[times.len() / 2], last)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub wall_ms: f64,
    pub iterations: usize,
    pub restarts: usize,
    /// Negative edges removed per iteration, bucketed by count.
    pub neutralized_histogram: BTreeMap<usize, usize>,
    pub agree: bool,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn new(instance: &str, algorithm: &str, seed: u64, n: usize, m: usize, k: usize) -> Self {
        BenchRow {
            instance: instance.to_string(),
            algorithm: algorithm.to_string(),
            seed,
            n,
            m,
            k,
            wall_ms: 0.0,
            iterations: 0,
            restarts: 0,
            neutralized_histogram: BTreeMap::new(),
            agree: true,
            error: None,
        }
    }

    pub fn with_meta(mut self, meta: &SolveMeta) -> Self {
        self.iterations = meta.iterations;
        self.restarts = meta.restarts;
        for &c in &meta.neutralized {
            *self.neutralized_histogram.entry(c).or_default() += 1;
        }
        self
    }

    pub fn failed(mut self, error: impl ToString) -> Self {
        self.agree = false;
        self.error = Some(error.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub build: String,
    pub config: ConfigSummary,
    pub rows: Vec<BenchRow>,
}

/// The solver settings that shape a run, for report metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub h_min: usize,
    pub h_override: Option<usize>,
    pub restart_cap: usize,
    pub k_small: usize,
    pub fast_neutralize: bool,
}

impl From<&SolveConfig> for ConfigSummary {
    fn from(cfg: &SolveConfig) -> Self {
        ConfigSummary {
            h_min: cfg.h_min,
            h_override: cfg.h_override,
            restart_cap: cfg.restart_cap,
            k_small: cfg.k_small,
            fast_neutralize: cfg.fast_neutralize,
        }
    }
}

impl BenchReport {
    pub fn new(cfg: &SolveConfig, rows: Vec<BenchRow>) -> Self {
        BenchReport { build: BUILD_ID.to_string(), config: cfg.into(), rows }
    }

    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(|r| r.agree)
    }

    /// Fixed column order, one row per line.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<28} {:<18} {:>6} {:>7} {:>8} {:>6} {:>10} {:>5} {:>8} {:>5}\n",
            "instance", "algorithm", "seed", "n", "m", "k", "wall_ms", "iters", "restarts", "agree"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<28} {:<18} {:>6} {:>7} {:>8} {:>6} {:>10.3} {:>5} {:>8} {:>5}{}",
                r.instance,
                r.algorithm,
                r.seed,
                r.n,
                r.m,
                r.k,
                r.wall_ms,
                r.iterations,
                r.restarts,
                if r.agree { "yes" } else { "NO" },
                r.error.as_deref().map(|e| format!("  {e}")).unwrap_or_default(),
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_five() {
        let mut calls = 0;
        let (_, last) = median_time(5, || {
            calls += 1;
            calls
        });
        assert_eq!(last, 6);
    }

    #[test]
    fn table_has_header_and_rows() {
        let row = BenchRow::new("a.gr", "negsssp", 1, 4, 3, 1).failed("boom");
        let report = BenchReport::new(&SolveConfig::default(), vec![row]);
        let table = report.table();
        assert!(table.starts_with("instance"));
        assert!(table.contains("NO  boom"));
        assert!(!report.all_agree());
        let json = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<BenchReport>(&json).unwrap(), report);
    }
}
