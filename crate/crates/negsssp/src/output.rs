//! JSON and text renderings of solver answers. Ids are 1-based.

use std::fmt::Write as _;

use negsssp_core::graph::{EdgeId, Length};
use negsssp_core::solver::{SolveMeta, SolveOutcome};
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::format_length;

#[derive(Serialize)]
struct MetaJson<'a> {
    seed: u64,
    iterations: usize,
    restarts: usize,
    fallbacks: usize,
    neutralized: &'a [usize],
    h_schedule: &'a [usize],
    build: &'a str,
}

fn dist_json(d: Length) -> Value {
    if d.is_finite() {
        json!(d)
    } else {
        Value::Null
    }
}

fn tree_json(parent: &[Option<EdgeId>]) -> Value {
    parent.iter().map(|p| p.map_or(Value::Null, |e| json!(e + 1))).collect()
}

/// `{distances, tree}` or `{cycle, total}`, plus `meta` when given.
pub fn outcome_json(outcome: &SolveOutcome, meta: Option<&SolveMeta>) -> Value {
    let mut out = match outcome {
        SolveOutcome::Distances { dist, parent } => json!({
            "distances": dist.iter().map(|&d| dist_json(d)).collect::<Vec<_>>(),
            "tree": tree_json(parent),
        }),
        SolveOutcome::NegativeCycle(cert) => json!({
            "cycle": cert.edges.iter().map(|e| e + 1).collect::<Vec<_>>(),
            "total": cert.total,
        }),
    };
    if let Some(meta) = meta {
        out["meta"] = serde_json::to_value(MetaJson {
            seed: meta.seed,
            iterations: meta.iterations,
            restarts: meta.restarts,
            fallbacks: meta.fallbacks,
            neutralized: &meta.neutralized,
            h_schedule: &meta.h_schedule,
            build: crate::bench::BUILD_ID,
        })
        .expect("plain data serializes");
    }
    out
}

/// `v dist parent` lines, or `cycle` followed by edge ids and the total.
pub fn outcome_text(outcome: &SolveOutcome) -> String {
    let mut out = String::new();
    match outcome {
        SolveOutcome::Distances { dist, parent } => {
            for (v, (&d, p)) in dist.iter().zip(parent).enumerate() {
                let d = if d.is_finite() { format_length(d) } else { "inf".to_string() };
                let p = p.map_or_else(|| "-".to_string(), |e| (e + 1).to_string());
                let _ = writeln!(out, "{} {d} {p}", v + 1);
            }
        }
        SolveOutcome::NegativeCycle(cert) => {
            let edges: Vec<String> = cert.edges.iter().map(|e| (e + 1).to_string()).collect();
            let _ = writeln!(out, "cycle {} total {}", edges.join(" "), format_length(cert.total));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use negsssp_core::NegCycleCert;

    #[test]
    fn json_schema() {
        let d = SolveOutcome::Distances { dist: vec![0.0, f64::INFINITY], parent: vec![None, None] };
        assert_eq!(outcome_json(&d, None), json!({"distances": [0.0, null], "tree": [null, null]}));
        let c = SolveOutcome::NegativeCycle(NegCycleCert { edges: vec![0, 2], total: -2.0 });
        let v = outcome_json(&c, Some(&SolveMeta::default()));
        assert_eq!(v["cycle"], json!([1, 3]));
        assert_eq!(v["meta"]["iterations"], json!(0));
    }

    #[test]
    fn text_form() {
        let d = SolveOutcome::Distances { dist: vec![0.0, -4.0, f64::INFINITY], parent: vec![None, Some(1), None] };
        assert_eq!(outcome_text(&d), "1 0 -\n2 -4 2\n3 inf -\n");
    }
}
