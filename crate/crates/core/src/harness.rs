//! Seeded instance generators and the cross-checking suite that runs the
//! kernels against brute force and audits every bound.

use std::path::{Path as FsPath, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundCheck;
use crate::decomposition::{compute_decomposition, compute_decomposition_with, DecompositionOptions, TreeDecomposition};
use crate::error::{invalid, Error, Result};
use crate::graph::io::write_graph;
use crate::graph::{brute_force_k_path, Graph, VertexId, VertexSet};
use crate::kernel::{kernelize_with, KernelConfig};
use crate::linkage::{ExactSolver, LinkageInstance, OracleStats, Request};
use crate::modulator::{modulator_kernelize_with, ModulatorConfig, ModulatorInstance};
use crate::separation::DecompositionProvider;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GraphKind {
    /// Random `eta`-tree with each edge kept with probability `keep`.
    PartialKTree { eta: usize, keep: f64 },
    Gnp { p: f64 },
    /// Row-major grid with `rows` rows, truncated to the vertex count.
    Grid { rows: usize },
    /// Two hubs joined by `paths` internally disjoint paths.
    Theta { paths: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// Total vertex count, modulator included.
    pub n: usize,
    pub kind: GraphKind,
    pub modulator_size: usize,
    pub modulator_edge_prob: f64,
    pub seed: u64,
    pub k: usize,
}

/// Build the instance described by `spec`. The part outside the modulator
/// uses ids `0..n-ell`, the modulator the last `ell` ids.
pub fn generate(spec: &GeneratorSpec) -> Result<ModulatorInstance> {
    if spec.n == 0 {
        return invalid("n must be at least 1");
    }
    if spec.modulator_size > spec.n {
        return invalid("modulator larger than the graph");
    }
    if !(0.0..=1.0).contains(&spec.modulator_edge_prob) {
        return invalid("modulator edge probability outside [0, 1]");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rest = spec.n - spec.modulator_size;
    let mut g = Graph::new();
    for _ in 0..spec.n {
        g.add_vertex();
    }
    let id = |i: usize| VertexId(i as u32);
    let mut known: Option<(usize, TreeDecomposition)> = None;
    match &spec.kind {
        GraphKind::PartialKTree { eta, keep } => {
            if !(0.0..=1.0).contains(keep) {
                return invalid("keep probability outside [0, 1]");
            }
            let (edges, td) = random_k_tree(&mut rng, rest, *eta);
            for (u, v) in edges {
                if rng.gen_bool(*keep) {
                    g.add_edge(id(u), id(v))?;
                }
            }
            known = Some((*eta, td));
        }
        GraphKind::Gnp { p } => {
            if !(0.0..=1.0).contains(p) {
                return invalid("edge probability outside [0, 1]");
            }
            for u in 0..rest {
                for v in u + 1..rest {
                    if rng.gen_bool(*p) {
                        g.add_edge(id(u), id(v))?;
                    }
                }
            }
        }
        GraphKind::Grid { rows } => {
            if *rows == 0 {
                return invalid("a grid needs at least one row");
            }
            let cols = rest.div_ceil(*rows);
            for i in 0..rest {
                let (r, c) = (i / cols, i % cols);
                if c + 1 < cols && i + 1 < rest {
                    g.add_edge(id(i), id(i + 1))?;
                }
                if r + 1 < *rows && i + cols < rest {
                    g.add_edge(id(i), id(i + cols))?;
                }
            }
        }
        GraphKind::Theta { paths } => {
            if *paths == 0 || rest < 2 {
                return invalid("a theta graph needs two hubs and one path");
            }
            let mut last = vec![0usize; *paths];
            for (j, v) in (2..rest).enumerate() {
                let lane = j % paths;
                g.add_edge(id(last[lane]), id(v))?;
                last[lane] = v;
            }
            for end in last {
                if !g.has_edge(id(end), id(1)) {
                    g.add_edge(id(end), id(1))?;
                }
            }
        }
    }
    let m_ids: Vec<usize> = (rest..spec.n).collect();
    for (i, &m) in m_ids.iter().enumerate() {
        for v in (0..rest).chain(m_ids[i + 1..].iter().copied()) {
            if rng.gen_bool(spec.modulator_edge_prob) {
                g.add_edge(id(m), id(v))?;
            }
        }
    }
    let modulator: VertexSet = m_ids.iter().map(|&i| id(i)).collect();
    match known {
        Some((eta, td)) => {
            let inst = ModulatorInstance::with_decomposition(g, spec.k, modulator, eta, td)?;
            let rest_vs = inst.rest();
            if rest_vs.len() <= crate::decomposition::DEFAULT_EXACT_CAP {
                let sub = inst.graph.induced_subgraph(&rest_vs)?;
                let c = compute_decomposition_with(&sub, Some(eta), &DecompositionOptions::default());
                if c.width > eta {
                    return Err(Error::InvalidInput(format!("generated width {} exceeds eta = {eta}", c.width)));
                }
            }
            Ok(inst)
        }
        None => {
            let rest_vs: VertexSet = (0..rest).map(id).collect();
            let sub = g.induced_subgraph(&rest_vs)?;
            let c = compute_decomposition_with(&sub, None, &DecompositionOptions::default());
            ModulatorInstance::with_decomposition(g, spec.k, modulator, c.width, c.td)
        }
    }
}

/// Edges of a random `eta`-tree on `n` vertices and its clique decomposition.
fn random_k_tree(rng: &mut ChaCha8Rng, n: usize, eta: usize) -> (Vec<(usize, usize)>, TreeDecomposition) {
    let mut edges = Vec::new();
    let base = n.min(eta + 1);
    for u in 0..base {
        for v in u + 1..base {
            edges.push((u, v));
        }
    }
    let vs = |xs: &[usize]| -> VertexSet { xs.iter().map(|&x| VertexId(x as u32)).collect() };
    let mut cliques: Vec<Vec<usize>> = vec![(0..base).collect()];
    let mut tree = Vec::new();
    for v in base..n {
        let host = rng.gen_range(0..cliques.len());
        let mut attach = cliques[host].clone();
        attach.remove(rng.gen_range(0..attach.len()));
        for &u in &attach {
            edges.push((u, v));
        }
        attach.push(v);
        cliques.push(attach);
        tree.push((host, cliques.len() - 1));
    }
    let bags = cliques.iter().map(|c| vs(c)).collect();
    let td = TreeDecomposition::from_parts(bags, &tree, 0).expect("clique tree is a tree");
    (edges, td)
}

/// A random k-Linkage instance on at most `max_n` vertices with at most three
/// requests and `k' <= max_k_prime`.
pub fn random_linkage_instance(seed: u64, max_n: usize, max_k_prime: usize) -> LinkageInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n.max(1));
    let p = rng.gen_range(0.2..0.7);
    let mut g = Graph::new();
    for _ in 0..n {
        g.add_vertex();
    }
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                g.add_edge(VertexId(u), VertexId(v)).expect("fresh edge");
            }
        }
    }
    let mut ids: Vec<VertexId> = g.vertices().collect();
    ids.shuffle(&mut rng);
    let terminals: Vec<VertexId> = ids[..rng.gen_range(0..=n.min(4))].to_vec();
    let r = rng.gen_range(0..=3);
    let mut requests: Vec<Request> = Vec::new();
    for _ in 0..r {
        let size = rng.gen_range(0..=terminals.len().min(2));
        let mut req: Request = terminals.choose_multiple(&mut rng, size).copied().collect();
        req.sort_unstable();
        requests.push(req);
    }
    let k_prime = rng.gen_range(0..=max_k_prime);
    LinkageInstance::new(g, k_prime, terminals.into_iter().collect(), requests).expect("well-formed by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteMode {
    Modulator,
    Generic,
    Both,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub instances: usize,
    pub seed: u64,
    pub max_n: usize,
    pub max_k: usize,
    pub max_eta: usize,
    pub max_ell: usize,
    pub mode: SuiteMode,
    /// Component threshold for the modulator kernel; the canonical one when absent.
    pub m_override: Option<usize>,
    /// Size threshold for the generic kernel; the canonical one when absent.
    pub p_override: Option<usize>,
    /// Re-solve by brute force after every reduction step.
    pub step_checks: bool,
    pub threads: Option<usize>,
    /// Where a minimized reproducer goes when an instance fails.
    pub reproducer_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            instances: 500,
            seed: 0,
            max_n: 28,
            max_k: 7,
            max_eta: 2,
            max_ell: 4,
            mode: SuiteMode::Modulator,
            m_override: None,
            p_override: None,
            step_checks: false,
            threads: None,
            reproducer_dir: None,
        }
    }
}

impl SuiteConfig {
    /// The spec of instance `i`, drawn from a stream seeded by `(seed, i)`.
    pub fn spec_for(&self, i: usize) -> GeneratorSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        let max_eta = self.max_eta.max(1);
        let ell = rng.gen_range(0..=self.max_ell);
        let n = rng.gen_range((ell + 2).min(self.max_n)..=self.max_n.max(1)).max(ell.max(1));
        let k = rng.gen_range(1..=self.max_k.max(1));
        let kind = match rng.gen_range(0..8) {
            0 => GraphKind::Grid { rows: rng.gen_range(1..=max_eta) },
            1 if max_eta >= 2 => GraphKind::Theta { paths: rng.gen_range(2..=5) },
            _ => GraphKind::PartialKTree { eta: rng.gen_range(1..=max_eta), keep: rng.gen_range(0.5..=1.0) },
        };
        GeneratorSpec { n, kind, modulator_size: ell, modulator_edge_prob: rng.gen_range(0.1..0.5), seed: rng.gen(), k }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub index: usize,
    pub spec: GeneratorSpec,
    pub eta: usize,
    pub answer: bool,
    pub brute_force_answer: bool,
    pub agreement: bool,
    /// Reduction steps after which the brute-force answer changed.
    pub step_violations: usize,
    pub reduction_steps: usize,
    pub final_graph_size: usize,
    pub bound_unverified: bool,
    pub stats: OracleStats,
    pub bound_checks: Vec<BoundCheck>,
    pub error: Option<String>,
    pub elapsed_ms: u128,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.agreement && self.step_violations == 0 && self.error.is_none() && self.bound_checks.iter().all(|c| c.pass)
    }
}

struct Outcome {
    answer: bool,
    truth: bool,
    step_violations: usize,
    reduction_steps: usize,
    final_graph_size: usize,
    bound_unverified: bool,
    stats: OracleStats,
    checks: Vec<BoundCheck>,
}

fn run_pipeline(inst: &ModulatorInstance, config: &SuiteConfig) -> Result<Outcome> {
    let k = inst.k;
    let truth = brute_force_k_path(&inst.graph, k)?.is_some();
    let oracle = ExactSolver::default();
    let mut out = Outcome {
        answer: truth,
        truth,
        step_violations: 0,
        reduction_steps: 0,
        final_graph_size: inst.graph.num_vertices(),
        bound_unverified: false,
        stats: OracleStats::default(),
        checks: Vec::new(),
    };
    let mut answers = Vec::new();
    if matches!(config.mode, SuiteMode::Modulator | SuiteMode::Both) {
        let cfg = ModulatorConfig { m_override: config.m_override, record_steps: config.step_checks, ..Default::default() };
        let run = modulator_kernelize_with(inst, &oracle, &cfg)?;
        for st in &run.steps {
            if let Some(after) = &st.graph_after {
                if brute_force_k_path(after, k)?.is_some() != truth {
                    out.step_violations += 1;
                }
            }
        }
        answers.push(run.answer);
        out.reduction_steps += run.reduction_steps;
        out.final_graph_size = run.final_graph_size;
        out.bound_unverified |= run.bound_unverified;
        out.stats.merge(&run.stats);
        out.checks.extend(run.bound_checks);
    }
    if matches!(config.mode, SuiteMode::Generic | SuiteMode::Both) {
        let td = compute_decomposition(&inst.graph, None);
        let mut sep = DecompositionProvider::new(&inst.graph, td)?;
        let cfg = KernelConfig { p_override: config.p_override, record_steps: config.step_checks, ..Default::default() };
        let run = kernelize_with(&inst.graph, k, &mut sep, &oracle, &cfg)?;
        for st in &run.steps {
            if let Some(after) = &st.graph_after {
                if brute_force_k_path(after, k)?.is_some() != truth {
                    out.step_violations += 1;
                }
            }
        }
        answers.push(run.answer);
        out.reduction_steps += run.reduction_steps;
        out.final_graph_size = out.final_graph_size.min(run.final_graph_size);
        out.bound_unverified |= run.bound_unverified;
        out.stats.merge(&run.stats);
        out.checks.extend(run.bound_checks.into_iter().map(|mut c| {
            c.name = format!("generic: {}", c.name);
            c
        }));
    }
    out.answer = if answers.iter().all(|&a| a == truth) { truth } else { !truth };
    Ok(out)
}

pub fn run_instance(index: usize, spec: &GeneratorSpec, config: &SuiteConfig) -> RunReport {
    let start = Instant::now();
    let result = generate(spec).and_then(|inst| run_pipeline(&inst, config).map(|o| (inst.eta, o)));
    let elapsed_ms = start.elapsed().as_millis();
    match result {
        Ok((eta, o)) => RunReport {
            index,
            spec: spec.clone(),
            eta,
            answer: o.answer,
            brute_force_answer: o.truth,
            agreement: o.answer == o.truth,
            step_violations: o.step_violations,
            reduction_steps: o.reduction_steps,
            final_graph_size: o.final_graph_size,
            bound_unverified: o.bound_unverified,
            stats: o.stats,
            bound_checks: o.checks,
            error: None,
            elapsed_ms,
        },
        Err(e) => RunReport {
            index,
            spec: spec.clone(),
            eta: 0,
            answer: false,
            brute_force_answer: false,
            agreement: false,
            step_violations: 0,
            reduction_steps: 0,
            final_graph_size: 0,
            bound_unverified: false,
            stats: OracleStats::default(),
            bound_checks: Vec::new(),
            error: Some(e.to_string()),
            elapsed_ms,
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Reproducer {
    pub index: usize,
    pub spec: GeneratorSpec,
    pub vertices: usize,
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub reports: Vec<RunReport>,
    /// Set when an instance disagreed with brute force and the suite stopped.
    pub aborted: Option<Reproducer>,
}

impl SuiteOutcome {
    pub fn all_pass(&self) -> bool {
        self.aborted.is_none() && self.reports.iter().all(RunReport::passed)
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let stop = AtomicBool::new(false);
    let mut reports: Vec<RunReport> = pool.install(|| {
        (0..config.instances)
            .into_par_iter()
            .filter_map(|i| {
                if stop.load(Ordering::Relaxed) {
                    return None;
                }
                let r = run_instance(i, &config.spec_for(i), config);
                if !r.agreement || r.step_violations > 0 {
                    stop.store(true, Ordering::Relaxed);
                }
                Some(r)
            })
            .collect()
    });
    reports.sort_by_key(|r| r.index);
    let failed = reports.iter().find(|r| !r.agreement || r.step_violations > 0);
    let aborted = match failed {
        None => None,
        Some(r) => Some(write_reproducer(r, config)?),
    };
    Ok(SuiteOutcome { reports, aborted })
}

fn fails(inst: &ModulatorInstance, config: &SuiteConfig) -> bool {
    match run_pipeline(inst, config) {
        Ok(o) => o.answer != o.truth || o.step_violations > 0,
        Err(Error::InvalidInput(_)) => false,
        Err(_) => true,
    }
}

/// Greedily delete vertices while the failure persists.
pub fn minimize(inst: &ModulatorInstance, config: &SuiteConfig) -> ModulatorInstance {
    let mut cur = inst.clone();
    let order: Vec<VertexId> = cur.graph.vertices().collect();
    for v in order {
        let mut g = cur.graph.clone();
        g.remove_vertex(v);
        let mut m = cur.modulator.clone();
        m.remove(&v);
        let mut keep = cur.rest();
        keep.remove(&v);
        let td = crate::decomposition::restrict(&cur.decomposition, &keep);
        let Ok(trial) = ModulatorInstance::with_decomposition(g, cur.k, m, cur.eta, td) else {
            continue;
        };
        if fails(&trial, config) {
            cur = trial;
        }
    }
    cur
}

fn write_reproducer(report: &RunReport, config: &SuiteConfig) -> Result<Reproducer> {
    let Ok(inst) = generate(&report.spec) else {
        return Ok(Reproducer { index: report.index, spec: report.spec.clone(), vertices: 0, files: Vec::new() });
    };
    let small = minimize(&inst, config);
    let mut files = Vec::new();
    if let Some(dir) = &config.reproducer_dir {
        std::fs::create_dir_all(dir)?;
        let stem = format!("repro-{}-{}", config.seed, report.index);
        let (text, map) = write_graph(&small.graph);
        let graph_file = dir.join(format!("{stem}.gr"));
        std::fs::write(&graph_file, text)?;
        let m_file = dir.join(format!("{stem}.mod"));
        let ids: Vec<String> = small.modulator.iter().map(|v| map[v].to_string()).collect();
        std::fs::write(&m_file, ids.join(" ") + "\n")?;
        let meta = dir.join(format!("{stem}.json"));
        let body = serde_json::json!({
            "suite_seed": config.seed,
            "index": report.index,
            "spec": report.spec,
            "k": small.k,
            "eta": small.eta,
            "report": report,
        });
        std::fs::write(&meta, serde_json::to_string_pretty(&body).map_err(|e| Error::Io(e.to_string()))?)?;
        files = vec![graph_file, m_file, meta];
    }
    Ok(Reproducer { index: report.index, spec: report.spec.clone(), vertices: small.graph.num_vertices(), files })
}

/// Serialized form used to check generator determinism.
pub fn serialize_instance(inst: &ModulatorInstance) -> String {
    let (text, _) = write_graph(&inst.graph);
    let m: Vec<String> = inst.modulator.iter().map(|v| (v.0 + 1).to_string()).collect();
    format!("{text}c modulator {}\n", m.join(" "))
}

pub fn write_report_json(path: &FsPath, outcome: &SuiteOutcome) -> Result<()> {
    let body = serde_json::to_string_pretty(outcome).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, body)?;
    Ok(())
}
