use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use negsssp::bench::{median_time, BenchReport, BenchRow};
use negsssp::diff::{compare, differential_run};
use negsssp::gen::{generate, GenSpec, Structure};
use negsssp::io::{
    format_dimacs, format_length, format_mapping, parse_potential, read_dimacs, FormatError, SandwichFile,
};
use negsssp::output::{outcome_json, outcome_text};
use negsssp_core::baselines::{reference_sssp, OracleOutcome};
use negsssp_core::sandwich::{audit_sandwich, betweenness_of_pair, SandwichError};
use negsssp_core::graph::{Graph, VertexId};
use negsssp_core::hopdist::{hop_distances, Direction};
use negsssp_core::potentials::{reweight, violations};
use negsssp_core::preprocess::{bound_degrees, default_degree_cap, normalize};
use negsssp_core::solver::{solve_sssp, SolveConfig, SolveOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "negsssp", version = negsssp::bench::BUILD_ID, about = "Shortest paths with negative edge lengths")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct SeedArg {
    /// Random seed; falls back to NEGSSSP_SEED, then 0.
    #[arg(long, env = "NEGSSSP_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[command(flatten)]
    seed: SeedArg,
    /// Fixed hop parameter instead of the schedule.
    #[arg(long)]
    h: Option<usize>,
    #[arg(long, default_value_t = 3)]
    h_min: usize,
    /// Iterations with at most this many negative vertices use plain Johnson.
    #[arg(long, default_value_t = 64)]
    k_small: usize,
    #[arg(long, default_value_t = 20)]
    restart_cap: usize,
    /// Neutralize remote sets with the unbatched reference procedure.
    #[arg(long)]
    slow_neutralize: bool,
    /// Only consider vertices reachable from the source.
    #[arg(long)]
    reachable_only: bool,
}

impl SolverArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            seed: self.seed.seed,
            h_min: self.h_min.max(1),
            h_override: self.h,
            restart_cap: self.restart_cap.max(1),
            k_small: self.k_small,
            fast_neutralize: !self.slow_neutralize,
            source_reachable_only: self.reachable_only,
            ..SolveConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Distances from a source, or a negative cycle.
    Solve {
        graph: PathBuf,
        /// Source vertex (1-based).
        #[arg(long, default_value_t = 1)]
        source: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        json: bool,
    },
    /// Bellman-Ford-Moore reference answer.
    Oracle {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        source: usize,
        #[arg(long)]
        json: bool,
    },
    /// Writes the normal form and a `orig minus plus` mapping file.
    Normalize {
        input: PathBuf,
        output: PathBuf,
        /// Mapping file; defaults to `<output>.map`.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Skip degree bounding.
        #[arg(long)]
        no_degree_bound: bool,
    },
    /// Hop-limited distances as `v level dist` lines.
    Hopdist {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        source: usize,
        #[arg(long)]
        hops: usize,
        #[arg(long)]
        reverse: bool,
    },
    /// Checks potentials, betweenness counts or sandwiches.
    #[command(args_conflicts_with_subcommands = true)]
    Audit {
        /// Potential file (`v value` lines) to validate against GRAPH.
        #[arg(long)]
        potential: Option<PathBuf>,
        graph: Option<PathBuf>,
        #[command(subcommand)]
        what: Option<AuditCmd>,
    },
    /// Generates a graph.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0.2)]
        neg: f64,
        #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
        lo: i64,
        #[arg(long, default_value_t = 16)]
        hi: i64,
        #[arg(long, value_enum, default_value_t = Structure::Uniform)]
        structure: Structure,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the planted sandwich (layered-sandwich only).
        #[arg(long)]
        sandwich: Option<PathBuf>,
    },
    /// Solver against oracle on every `.gr` file of a directory.
    Diff {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Writes the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Times solver and oracle on generated instances.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1024,4096")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        m_factor: usize,
        #[arg(long, default_value_t = 0.25)]
        neg: f64,
        #[arg(long, value_enum, default_value_t = Structure::Uniform)]
        structure: Structure,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AuditCmd {
    /// Exact betweenness counts of sampled pairs.
    Betweenness {
        graph: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Re-verifies a sandwich file (`s`, `t`, `h`, `U`).
    Sandwich { graph: PathBuf, sandwich: PathBuf },
}

/// Errors that mean bad input rather than a failed check.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn load(path: &Path) -> Result<Graph> {
    read_dimacs(path).with_context(|| format!("reading {}", path.display()))
}

fn source_index(g: &Graph, source: usize) -> Result<VertexId> {
    if source == 0 || source > g.n() {
        return Err(usage(format!("source {source} outside 1..={}", g.n())));
    }
    Ok(source - 1)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Solve { graph, source, solver, json } => {
            let g = load(&graph)?;
            let s = source_index(&g, source)?;
            let res = solve_sssp(&g, s, &solver.config())?;
            if json {
                println!("{}", outcome_json(&res.outcome, Some(&res.meta)));
            } else {
                print!("{}", outcome_text(&res.outcome));
            }
        }
        Cmd::Oracle { graph, source, json } => {
            let g = load(&graph)?;
            let s = source_index(&g, source)?;
            let outcome = match reference_sssp(&g, s) {
                OracleOutcome::Distances { dist, parent } => SolveOutcome::Distances { dist, parent },
                OracleOutcome::Cycle(cert) => SolveOutcome::NegativeCycle(cert),
            };
            if json {
                println!("{}", outcome_json(&outcome, None));
            } else {
                print!("{}", outcome_text(&outcome));
            }
        }
        Cmd::Normalize { input, output, map, no_degree_bound } => {
            let g = load(&input)?;
            let (split, first) = normalize(&g);
            let (out, tmap) = if no_degree_bound {
                (split, first)
            } else {
                let (bounded, second) = bound_degrees(&split, default_degree_cap(&split));
                (bounded, first.then(&second))
            };
            emit(Some(&output), &format_dimacs(&out))?;
            let map = map.unwrap_or_else(|| {
                let mut p = output.clone().into_os_string();
                p.push(".map");
                p.into()
            });
            emit(Some(&map), &format_mapping(&tmap))?;
        }
        Cmd::Hopdist { graph, source, hops, reverse } => {
            let g = load(&graph)?;
            let s = source_index(&g, source)?;
            let dir = if reverse { Direction::Reverse } else { Direction::Forward };
            let table = hop_distances(&g, &[s], hops, dir)?;
            let mut text = String::new();
            for level in 0..=hops {
                for v in 0..g.n() {
                    let d = table.at(level, v);
                    let d = if d.is_finite() { format_length(d) } else { "inf".into() };
                    text.push_str(&format!("{} {level} {d}\n", v + 1));
                }
            }
            emit(None, &text)?;
        }
        Cmd::Audit { potential, graph, what } => return audit(potential, graph, what),
        Cmd::Gen { n, m, neg, lo, hi, structure, seed, output, sandwich } => {
            let spec = GenSpec { n, m, neg_fraction: neg, lo, hi, structure, seed: seed.seed };
            let generated = generate(&spec).map_err(|e| usage(e.to_string()))?;
            emit(output.as_deref(), &format_dimacs(&generated.graph))?;
            if let Some(path) = sandwich {
                let Some(planted) = generated.sandwich else {
                    return Err(usage("only layered-sandwich graphs carry a sandwich"));
                };
                let file = SandwichFile {
                    s: planted.s + 1,
                    t: planted.t + 1,
                    h: 1,
                    u: planted.u.iter().map(|v| v + 1).collect(),
                };
                emit(Some(&path), &(serde_json::to_string_pretty(&file)? + "\n"))?;
            }
        }
        Cmd::Diff { dir, seeds, solver, report } => {
            let report_data = differential_run(&dir, &seeds, &solver.config())
                .with_context(|| format!("reading corpus {}", dir.display()))?;
            print!("{}", report_data.table());
            if let Some(path) = report {
                emit(Some(&path), &serde_json::to_string_pretty(&report_data)?)?;
            }
            if !report_data.all_agree() {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Bench { sizes, m_factor, neg, structure, reps, solver, report } => {
            let cfg = solver.config();
            let mut rows = Vec::new();
            for &n in &sizes {
                let spec = GenSpec { neg_fraction: neg, ..GenSpec::uniform(n, n * m_factor, neg, cfg.seed) }
                    .with_structure(structure);
                let g = generate(&spec).map_err(|e| usage(e.to_string()))?.graph;
                let name = format!("{structure:?}-{n}").to_lowercase();
                let k = g.negative_vertices().len();
                let (t_solve, res) = median_time(reps, || solve_sssp(&g, 0, &cfg));
                let res = res?;
                let mut row = BenchRow::new(&name, "negsssp", cfg.seed, g.n(), g.m(), k).with_meta(&res.meta);
                row.wall_ms = t_solve.as_secs_f64() * 1e3;
                if let Err(e) = compare(&g, 0, &res.outcome) {
                    row = row.failed(e);
                }
                let (t_oracle, _) = median_time(reps, || reference_sssp(&g, 0));
                let mut oracle = BenchRow::new(&name, "bellman-ford-moore", cfg.seed, g.n(), g.m(), k);
                oracle.wall_ms = t_oracle.as_secs_f64() * 1e3;
                rows.push(row);
                rows.push(oracle);
            }
            let report_data = BenchReport::new(&cfg, rows);
            print!("{}", report_data.table());
            if let Some(path) = report {
                emit(Some(&path), &serde_json::to_string_pretty(&report_data)?)?;
            }
            if !report_data.all_agree() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn audit(potential: Option<PathBuf>, graph: Option<PathBuf>, what: Option<AuditCmd>) -> Result<ExitCode> {
    match (potential, graph, what) {
        (Some(pot), Some(graph), None) => {
            let g = load(&graph)?;
            let text = fs::read_to_string(&pot).with_context(|| format!("reading {}", pot.display()))?;
            let phi = parse_potential(&text, g.n())?;
            let bad = violations(&g, &phi);
            let after = reweight(&g, &phi).negative_edge_count();
            println!("negative edges: {} before, {after} after", g.negative_edge_count());
            if bad.is_empty() {
                println!("valid");
                return Ok(ExitCode::SUCCESS);
            }
            for e in &bad {
                println!("violated edge {}: reduced length {}", e + 1, format_length(phi.reduced_length(&g, *e)));
            }
            Ok(ExitCode::from(1))
        }
        (None, None, Some(AuditCmd::Betweenness { graph, r, pairs, seed })) => {
            let g = load(&graph)?;
            if g.n() == 0 {
                return Err(usage("graph has no vertices"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.seed);
            for _ in 0..pairs {
                let (s, t) = (rng.random_range(0..g.n()), rng.random_range(0..g.n()));
                println!("{} {} {}", s + 1, t + 1, betweenness_of_pair(&g, s, t, r)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        (None, None, Some(AuditCmd::Sandwich { graph, sandwich })) => {
            let g = load(&graph)?;
            let text = fs::read_to_string(&sandwich).with_context(|| format!("reading {}", sandwich.display()))?;
            let file: SandwichFile = serde_json::from_str(&text).map_err(FormatError::from)?;
            let sw = file.to_sandwich(g.n())?;
            match audit_sandwich(&g, &sw) {
                Ok(()) => {
                    println!("sandwich holds for {} vertices", sw.u.len());
                    Ok(ExitCode::SUCCESS)
                }
                Err(SandwichError::SandwichViolated { u, sum }) => {
                    println!("violated at vertex {}: d(s,u) + d(u,t) = {}", u + 1, format_length(sum));
                    Ok(ExitCode::from(1))
                }
                Err(e) => bail!(e),
            }
        }
        _ => Err(usage("use `audit --potential F GRAPH`, `audit betweenness` or `audit sandwich`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let bad_input = e.is::<Usage>() || e.is::<FormatError>() || e.chain().any(|c| c.is::<FormatError>());
            ExitCode::from(if bad_input { 2 } else { 1 })
        }
    }
}
