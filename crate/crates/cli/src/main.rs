use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kpath_core::decomposition::io::{parse_td, write_td};
use kpath_core::decomposition::{compute_decomposition, stats, validate};
use kpath_core::graph::io::{parse_graph, parse_id_list, write_graph};
use kpath_core::graph::Graph;
use kpath_core::harness::{generate, run_suite, write_report_json, GeneratorSpec, GraphKind, SuiteConfig, SuiteMode};
use kpath_core::kernel::{kernelize_with, KernelConfig};
use kpath_core::linkage::{validate_solution, BruteForce, ExactSolver, LinkageInstance, LinkageOracle};
use kpath_core::modulator::{modulator_kernelize_with, ModulatorConfig, ModulatorInstance};
use kpath_core::separation::{DecompositionProvider, SeparationProvider, TrivialProvider};

#[derive(Parser)]
#[command(name = "kpath", version, about = "k-Path kernelization with an exact k-Linkage oracle")]
struct Cli {
    /// Seed for anything randomized.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Decide k-Path directly.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = OracleKind::Solver)]
        oracle: OracleKind,
    },
    /// Run the generic kernel.
    Kernelize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Tree decomposition in `.td` format; computed when absent.
        #[arg(long)]
        td: Option<PathBuf>,
        /// Use separator enumeration of this order instead of a decomposition.
        #[arg(long)]
        trivial_order: Option<usize>,
        #[arg(long, value_enum, default_value_t = OracleKind::Solver)]
        oracle: OracleKind,
        /// Override the size threshold.
        #[arg(long)]
        p_threshold: Option<usize>,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Run the treewidth-modulator kernel.
    Modkernel {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        modulator: PathBuf,
        #[arg(long)]
        eta: usize,
        #[arg(long, value_enum, default_value_t = OracleKind::Solver)]
        oracle: OracleKind,
        /// Override the component threshold.
        #[arg(long)]
        m_threshold: Option<usize>,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// k-Linkage utilities.
    Linkage {
        #[command(subcommand)]
        cmd: LinkageCmd,
    },
    /// Check a tree decomposition against a graph.
    ValidateTd {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        td: PathBuf,
    },
    /// Compute a tree decomposition.
    Decompose {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the kernels against brute force on random instances.
    Suite(SuiteArgs),
}

#[derive(Subcommand)]
enum LinkageCmd {
    /// Solve a JSON k-Linkage instance.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleKind::Solver)]
        oracle: OracleKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Bruteforce,
    Solver,
}

impl OracleKind {
    fn build(self) -> Box<dyn LinkageOracle> {
        match self {
            OracleKind::Bruteforce => Box::new(BruteForce { cap: 32 }),
            OracleKind::Solver => Box::new(ExactSolver::default()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    PartialKTree,
    Gnp,
    Grid,
    Theta,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = KindArg::PartialKTree)]
    kind: KindArg,
    #[arg(long, default_value_t = 2)]
    eta: usize,
    #[arg(long, default_value_t = 0.8)]
    keep: f64,
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    #[arg(long, default_value_t = 2)]
    rows: usize,
    #[arg(long, default_value_t = 3)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    ell: usize,
    #[arg(long, default_value_t = 0.3)]
    mod_prob: f64,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Graph output file; the modulator goes next to it with extension `.mod`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 500)]
    instances: usize,
    #[arg(long, default_value_t = 28)]
    max_n: usize,
    #[arg(long, default_value_t = 7)]
    max_k: usize,
    #[arg(long, default_value_t = 2)]
    max_eta: usize,
    #[arg(long, default_value_t = 4)]
    max_ell: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Modulator)]
    mode: ModeArg,
    #[arg(long)]
    m_threshold: Option<usize>,
    #[arg(long)]
    p_threshold: Option<usize>,
    /// Brute-force the answer after every reduction step.
    #[arg(long)]
    step_checks: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "reproducers")]
    repro_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Modulator,
    Generic,
    Both,
}

fn read(path: &FsPath) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &FsPath) -> Result<Graph> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(&text)?);
    }
    Ok(parse_graph(&text)?)
}

fn emit(report: &Value, stats_file: Option<&PathBuf>) -> Result<()> {
    let body = serde_json::to_string_pretty(report)?;
    if let Some(p) = stats_file {
        fs::write(p, &body).with_context(|| format!("writing {}", p.display()))?;
    }
    println!("{body}");
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Gen(a) => {
            let kind = match a.kind {
                KindArg::PartialKTree => GraphKind::PartialKTree { eta: a.eta, keep: a.keep },
                KindArg::Gnp => GraphKind::Gnp { p: a.p },
                KindArg::Grid => GraphKind::Grid { rows: a.rows },
                KindArg::Theta => GraphKind::Theta { paths: a.paths },
            };
            let spec = GeneratorSpec {
                n: a.n,
                kind,
                modulator_size: a.ell,
                modulator_edge_prob: a.mod_prob,
                seed: cli.seed,
                k: a.k,
            };
            let inst = generate(&spec)?;
            let (text, map) = write_graph(&inst.graph);
            let m_ids: Vec<u32> = inst.modulator.iter().map(|v| map[v]).collect();
            if let Some(out) = &a.out {
                fs::write(out, &text)?;
                let line: Vec<String> = m_ids.iter().map(u32::to_string).collect();
                fs::write(out.with_extension("mod"), line.join(" ") + "\n")?;
            }
            emit(
                &json!({
                    "spec": spec,
                    "vertices": inst.graph.num_vertices(),
                    "edges": inst.graph.num_edges(),
                    "eta": inst.eta,
                    "modulator": m_ids,
                    "graph": if a.out.is_none() { Value::String(text) } else { Value::Null },
                }),
                None,
            )?;
            Ok(true)
        }
        Cmd::Solve { graph, k, oracle } => {
            let g = load_graph(&graph)?;
            let inst = LinkageInstance::k_path(g, k);
            let sol = oracle.build().solve(&inst)?;
            let ok = sol.as_ref().is_none_or(|s| validate_solution(&inst, s));
            emit(&json!({ "answer": sol.is_some(), "path": sol.map(|s| s.paths), "valid": ok }), None)?;
            Ok(ok)
        }
        Cmd::Kernelize { graph, k, td, trivial_order, oracle, p_threshold, stats: stats_file } => {
            let g = load_graph(&graph)?;
            let mut provider: Box<dyn SeparationProvider> = match (trivial_order, td) {
                (Some(h), _) => Box::new(TrivialProvider { h }),
                (None, Some(p)) => Box::new(DecompositionProvider::new(&g, parse_td(&read(&p)?)?)?),
                (None, None) => Box::new(DecompositionProvider::new(&g, compute_decomposition(&g, None))?),
            };
            let cfg = KernelConfig { p_override: p_threshold, ..Default::default() };
            let oracle = oracle.build();
            let run = kernelize_with(&g, k, provider.as_mut(), oracle.as_ref(), &cfg)?;
            let pass = run.checks_pass();
            emit(
                &json!({
                    "answer": run.answer,
                    "witness": run.witness,
                    "oracle_calls": run.stats.calls,
                    "max_instance_vertices": run.stats.max_instance_vertices,
                    "reduction_steps": run.reduction_steps,
                    "final_graph_size": run.final_graph_size,
                    "bound_unverified": run.bound_unverified,
                    "bounds": { "p_threshold": run.p_threshold.to_string(), "h_hat": run.h_hat.to_string(), "h": run.h },
                    "bound_checks": run.bound_checks,
                }),
                stats_file.as_ref(),
            )?;
            Ok(pass)
        }
        Cmd::Modkernel { graph, k, modulator, eta, oracle, m_threshold, stats: stats_file } => {
            let g = load_graph(&graph)?;
            let m = parse_id_list(&read(&modulator)?)?.into_iter().collect();
            let inst = ModulatorInstance::new(g, k, m, eta)?;
            let cfg = ModulatorConfig { m_override: m_threshold, ..Default::default() };
            let oracle = oracle.build();
            let run = modulator_kernelize_with(&inst, oracle.as_ref(), &cfg)?;
            let pass = run.checks_pass();
            emit(
                &json!({
                    "answer": run.answer,
                    "witness": run.witness,
                    "oracle_calls": run.stats.calls,
                    "max_instance_vertices": run.stats.max_instance_vertices,
                    "reduction_steps": run.reduction_steps,
                    "final_graph_size": run.final_graph_size,
                    "final_size_bound": run.final_size_bound.to_string(),
                    "m_threshold": run.m_threshold.to_string(),
                    "m_used": run.m_used,
                    "rho": run.rho.to_string(),
                    "components_reduced": run.components_reduced,
                    "families_truncated": run.families_truncated,
                    "bound_unverified": run.bound_unverified,
                    "bound_checks": run.bound_checks,
                }),
                stats_file.as_ref(),
            )?;
            Ok(pass)
        }
        Cmd::Linkage { cmd: LinkageCmd::Solve { file, oracle } } => {
            let inst: LinkageInstance = serde_json::from_str(&read(&file)?)?;
            inst.check()?;
            match oracle.build().solve(&inst)? {
                None => {
                    println!("NO");
                    Ok(true)
                }
                Some(sol) => {
                    if !validate_solution(&inst, &sol) {
                        bail!("oracle returned an invalid solution");
                    }
                    println!("YES");
                    println!("{}", serde_json::to_string(&sol.paths)?);
                    Ok(true)
                }
            }
        }
        Cmd::ValidateTd { graph, td } => {
            let g = load_graph(&graph)?;
            let td = parse_td(&read(&td)?)?;
            let report = validate(&g, &td);
            let ok = report.is_valid();
            let st = if ok { Some(stats(&g, &td)?) } else { None };
            let violations: Vec<String> = report.violations.iter().map(|v| format!("{v:?}")).collect();
            emit(&json!({ "valid": ok, "violations": violations, "stats": st }), None)?;
            Ok(ok)
        }
        Cmd::Decompose { graph, out } => {
            let g = load_graph(&graph)?;
            let td = compute_decomposition(&g, None);
            let text = write_td(&td, g.num_vertices());
            match out {
                Some(p) => fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Cmd::Suite(a) => {
            let config = SuiteConfig {
                instances: a.instances,
                seed: cli.seed,
                max_n: a.max_n,
                max_k: a.max_k,
                max_eta: a.max_eta,
                max_ell: a.max_ell,
                mode: match a.mode {
                    ModeArg::Modulator => SuiteMode::Modulator,
                    ModeArg::Generic => SuiteMode::Generic,
                    ModeArg::Both => SuiteMode::Both,
                },
                m_override: a.m_threshold,
                p_override: a.p_threshold,
                step_checks: a.step_checks,
                threads: a.threads,
                reproducer_dir: Some(a.repro_dir),
            };
            let outcome = run_suite(&config)?;
            if let Some(p) = &a.out {
                write_report_json(p, &outcome)?;
            }
            let failed: Vec<usize> = outcome.reports.iter().filter(|r| !r.passed()).map(|r| r.index).collect();
            emit(
                &json!({
                    "instances": outcome.reports.len(),
                    "agreements": outcome.reports.iter().filter(|r| r.agreement).count(),
                    "failed": failed,
                    "reduction_steps": outcome.reports.iter().map(|r| r.reduction_steps).sum::<usize>(),
                    "oracle_calls": outcome.reports.iter().map(|r| r.stats.calls).sum::<u64>(),
                    "aborted": outcome.aborted,
                }),
                None,
            )?;
            Ok(outcome.all_pass())
        }
    }
}
