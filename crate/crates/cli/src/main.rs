//! Command-line front door: parse instances, run the solver, the
//! kernelizer or the brute-force oracle, generate instances, and re-verify
//! previously produced reports.
//!
//! Exit codes: 0 for a yes-decision (or plain success), 1 for a no-decision
//! (or a failed verification), 2 for any error.

mod format;
mod verify;

use asapt_core::dp::{solve, SolveConfig};
use asapt_core::gen::{
    gen_connected_oriented, gen_forest_of_cliques, gen_ht, gen_tournament, BlockPlan, ForestPlan,
};
use asapt_core::kernel::{kernelize, KernelConfig, KernelOutcome};
use asapt_core::oracle::oracle_max_acyclic_capped;
use asapt_core::{decide_threshold, gamma, threshold_q, Instance};
use clap::{Args, Parser, Subcommand};
use format::{emit_instance, emit_report, parse_instance, parse_report, InstanceFile, Report};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "asapt",
    version,
    about = "Acyclic subgraphs above the Poljak-Turzik bound"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Override the parameter k from the instance file.
    #[arg(long)]
    k: Option<i64>,
    /// Largest vertex count the exact oracle accepts.
    #[arg(long, default_value_t = asapt_core::oracle::DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the instance and print a witness ordering.
    Solve {
        path: String,
        #[command(flatten)]
        common: CommonOpts,
        /// Worker threads for the ordering enumeration.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Reduce the instance to an equivalent one of size O(k^2), or answer
    /// YES outright.
    Kernelize {
        path: String,
        #[command(flatten)]
        common: CommonOpts,
        /// Skip the yes-shortcuts (debugging aid).
        #[arg(long)]
        no_shortcuts: bool,
    },
    /// Exact brute-force answer on a small instance.
    Oracle {
        path: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Re-check a report produced by solve/kernelize/oracle.
    Verify { instance: String, report: String },
    /// Write a generated instance to stdout.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// The tight family: t arc-disjoint directed 3-cycles along a path.
    Ht {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        k: i64,
    },
    /// Seeded random tournament.
    Tournament {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        k: i64,
    },
    /// Seeded connected oriented graph (spanning tree plus density extras).
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        k: i64,
    },
    /// Seeded forest of cliques. Blocks are comma separated, each `SIZE`
    /// (new component) or `SIZE@PARENT` (attach to earlier block PARENT).
    Forest {
        #[arg(long)]
        blocks: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        k: i64,
        /// Orient 3-blocks arbitrarily instead of as directed 3-cycles.
        #[arg(long)]
        free_triangles: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_instance(path: &str, k_override: Option<i64>) -> Result<InstanceFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let mut file = parse_instance(&text).map_err(|e| format!("{path}: {e}"))?;
    if let Some(k) = k_override {
        file.k = k;
    }
    Ok(file)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve { path, common, jobs } => {
            let file = read_instance(&path, common.k)?;
            let inst = Instance::new(file.graph.clone(), file.k).map_err(|e| e.to_string())?;
            let cfg = SolveConfig {
                oracle_cap: common.oracle_cap,
                jobs,
                ..SolveConfig::default()
            };
            let start = Instant::now();
            let res = solve(&inst, &cfg).map_err(|e| e.to_string())?;
            let mut report = Report {
                decision: Some(res.decision),
                instance: Some((file.graph.n(), file.graph.m(), file.k)),
                a_value: res.exact_value,
                gamma_q: Some(gamma(&file.graph).0),
                threshold_q: Some(threshold_q(&file.graph, file.k)),
                guaranteed_by_bound: res.guaranteed_by_bound,
                time_ms: Some(start.elapsed().as_secs_f64() * 1e3),
                ..Report::default()
            }
            .with_trace(&res.trace);
            if let Some(w) = &res.witness {
                report = report.with_witness(w);
            }
            print!("{}", emit_report(&report));
            Ok(ExitCode::from(if res.decision { 0 } else { 1 }))
        }
        Command::Kernelize {
            path,
            common,
            no_shortcuts,
        } => {
            let file = read_instance(&path, common.k)?;
            let inst = Instance::new(file.graph.clone(), file.k).map_err(|e| e.to_string())?;
            let cfg = KernelConfig {
                shortcuts: !no_shortcuts,
                oracle_cap: common.oracle_cap,
                ..KernelConfig::default()
            };
            let start = Instant::now();
            let outcome = kernelize(&inst, &cfg).map_err(|e| e.to_string())?;
            let base = Report {
                instance: Some((file.graph.n(), file.graph.m(), file.k)),
                gamma_q: Some(gamma(&file.graph).0),
                threshold_q: Some(threshold_q(&file.graph, file.k)),
                time_ms: Some(start.elapsed().as_secs_f64() * 1e3),
                ..Report::default()
            };
            match outcome {
                KernelOutcome::Yes { witness, trace, .. } => {
                    let mut report = Report {
                        decision: Some(true),
                        guaranteed_by_bound: witness.is_none(),
                        ..base
                    }
                    .with_trace(&trace);
                    if let Some(w) = &witness {
                        report = report.with_witness(w);
                    }
                    print!("{}", emit_report(&report));
                    Ok(ExitCode::from(0))
                }
                KernelOutcome::Kernel {
                    graph,
                    k,
                    trace,
                    report: size,
                } => {
                    let report = Report {
                        kernel: Some(InstanceFile {
                            graph: graph.clone(),
                            k,
                        }),
                        kernel_bounds: Some((size.vertex_bound, size.arc_bound)),
                        ..base
                    }
                    .with_trace(&trace);
                    print!("{}", emit_report(&report));
                    if !size.within_bounds() {
                        eprintln!(
                            "warning: kernel of {} vertices / {} arcs exceeds the size bounds \
                             ({} / {})",
                            size.n, size.m, size.vertex_bound, size.arc_bound
                        );
                    }
                    Ok(ExitCode::from(0))
                }
            }
        }
        Command::Oracle { path, common } => {
            let file = read_instance(&path, common.k)?;
            let start = Instant::now();
            let res = oracle_max_acyclic_capped(&file.graph, common.oracle_cap)
                .map_err(|e| e.to_string())?;
            let decision = decide_threshold(&file.graph, file.k, res.a).ok();
            let report = Report {
                decision,
                instance: Some((file.graph.n(), file.graph.m(), file.k)),
                a_value: Some(res.a),
                gamma_q: Some(gamma(&file.graph).0),
                threshold_q: decision.map(|_| threshold_q(&file.graph, file.k)),
                time_ms: Some(start.elapsed().as_secs_f64() * 1e3),
                ..Report::default()
            }
            .with_witness(&res.witness);
            print!("{}", emit_report(&report));
            Ok(ExitCode::from(match decision {
                Some(true) | None => 0,
                Some(false) => 1,
            }))
        }
        Command::Verify { instance, report } => {
            let file = read_instance(&instance, None)?;
            let text = std::fs::read_to_string(&report).map_err(|e| format!("{report}: {e}"))?;
            let parsed = parse_report(&text).map_err(|e| format!("{report}: {e}"))?;
            let problems = verify::check(&file, &parsed);
            if problems.is_empty() {
                println!("report verified");
                Ok(ExitCode::from(0))
            } else {
                for p in &problems {
                    println!("mismatch: {p}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Gen { what } => {
            let (graph, k) = match what {
                GenCommand::Ht { t, k } => {
                    if t == 0 {
                        return Err("t must be at least 1".into());
                    }
                    (gen_ht(t), k)
                }
                GenCommand::Tournament { n, seed, k } => {
                    if n == 0 {
                        return Err("n must be at least 1".into());
                    }
                    (gen_tournament(n, seed), k)
                }
                GenCommand::Random {
                    n,
                    density,
                    seed,
                    k,
                } => {
                    if n == 0 {
                        return Err("n must be at least 1".into());
                    }
                    if !(0.0..=1.0).contains(&density) {
                        return Err("density must lie in [0, 1]".into());
                    }
                    (gen_connected_oriented(n, density, seed), k)
                }
                GenCommand::Forest {
                    blocks,
                    seed,
                    k,
                    free_triangles,
                } => {
                    let plan = ForestPlan {
                        blocks: parse_forest_blocks(&blocks)?,
                        cyclic_triangles: !free_triangles,
                        single_two_block_per_component: false,
                    };
                    let forest = gen_forest_of_cliques(&plan, seed).map_err(|e| e.to_string())?;
                    (forest.graph, k)
                }
            };
            print!("{}", emit_instance(&graph, k));
            Ok(ExitCode::from(0))
        }
    }
}

fn parse_forest_blocks(spec: &str) -> Result<Vec<BlockPlan>, String> {
    spec.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (size, attach) = match tok.split_once('@') {
                Some((s, p)) => {
                    let parent = p
                        .parse::<usize>()
                        .map_err(|_| format!("bad parent index {p:?}"))?;
                    (s, Some(parent))
                }
                None => (tok, None),
            };
            let size = size
                .parse::<usize>()
                .map_err(|_| format!("bad block size {size:?}"))?;
            Ok(BlockPlan {
                size,
                attach_to: attach,
            })
        })
        .collect()
}
