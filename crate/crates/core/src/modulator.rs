//! The kernel for graphs with a treewidth modulator `M`: mark short paths
//! through `G - M` between modulator vertices, close the marked bags under
//! lowest common ancestors, and shrink every large unmarked stretch of the
//! decomposition down to linkage witnesses.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    a1_bound, b2_bound, final_size_bound, m_threshold, rho, saturating_usize, serialize_count, BoundCheck,
};
use crate::decomposition::{
    binarize, compute_decomposition_with, edge_components, lca_closure, lowest_heavy_node, make_connected, raw_stats,
    restrict, validate, DecompositionOptions, EdgeComponent, NodeId, NodeSet, TreeDecomposition,
};
use crate::error::{invalid, not_applicable, Error, Result};
use crate::graph::{Graph, Path, VertexId, VertexSet};
use crate::linkage::{check_solution, solve_linkage, CountingOracle, LinkageInstance, LinkageOracle, OracleStats, Request};
use crate::reduction::{for_each_request_multiset, inducible_candidates, mark_witnesses, request_choices};
use crate::reduction::{CandidateInstance, ReductionOptions};
use crate::Count;

#[derive(Clone, Debug)]
pub struct ModulatorInstance {
    pub graph: Graph,
    pub k: usize,
    pub modulator: VertexSet,
    pub eta: usize,
    /// Decomposition of `G - M` of width at most `eta`.
    pub decomposition: TreeDecomposition,
}

impl ModulatorInstance {
    /// Checks `treewidth(G - M) <= eta` by computing a decomposition.
    pub fn new(graph: Graph, k: usize, modulator: VertexSet, eta: usize) -> Result<Self> {
        let rest = rest_graph(&graph, &modulator)?;
        let comp = compute_decomposition_with(&rest, Some(eta), &DecompositionOptions::default());
        if comp.width > eta {
            return invalid(format!(
                "G - M has {} width {} > eta = {eta}",
                if comp.exact { "treewidth" } else { "decomposition" },
                comp.width
            ));
        }
        Self::with_decomposition(graph, k, modulator, eta, comp.td)
    }

    pub fn with_decomposition(
        graph: Graph,
        k: usize,
        modulator: VertexSet,
        eta: usize,
        decomposition: TreeDecomposition,
    ) -> Result<Self> {
        if k == 0 {
            return invalid("k must be at least 1");
        }
        let rest = rest_graph(&graph, &modulator)?;
        let report = validate(&rest, &decomposition);
        if let Some(v) = report.violations.first() {
            return invalid(format!("not a decomposition of G - M: {v:?}"));
        }
        let width = raw_stats(&decomposition).width;
        if width > eta {
            return invalid(format!("decomposition width {width} exceeds eta = {eta}"));
        }
        Ok(Self { graph, k, modulator, eta, decomposition })
    }

    /// `ℓ = |M|`.
    pub fn ell(&self) -> usize {
        self.modulator.len()
    }

    pub fn rest(&self) -> VertexSet {
        self.graph.vertices().filter(|v| !self.modulator.contains(v)).collect()
    }
}

fn rest_graph(g: &Graph, m: &VertexSet) -> Result<Graph> {
    if let Some(v) = m.iter().find(|v| !g.contains(**v)) {
        return invalid(format!("modulator vertex {v} is not in the graph"));
    }
    let rest: VertexSet = g.vertices().filter(|v| !m.contains(v)).collect();
    g.induced_subgraph(&rest)
}

/// A path from `u` through `G - M`, either back into `M` at `v` or ending
/// outside `M`, with exactly `k_prime` vertices outside `M`. Vertices in
/// `forbidden` are avoided.
pub fn find_uvk_path(
    g: &Graph,
    m_set: &VertexSet,
    u: VertexId,
    v: Option<VertexId>,
    k_prime: usize,
    forbidden: &VertexSet,
) -> Result<Option<Path>> {
    if !m_set.contains(&u) || v.is_some_and(|v| !m_set.contains(&v)) {
        return invalid("path endpoints must lie in the modulator");
    }
    if v == Some(u) {
        return invalid("the two endpoints must differ");
    }
    if let Some(x) = forbidden.iter().find(|x| m_set.contains(x)) {
        return invalid(format!("forbidden vertex {x} lies in the modulator"));
    }
    if !g.contains(u) || v.is_some_and(|v| !g.contains(v)) {
        return invalid("path endpoint is not in the graph");
    }
    let mut keep: VertexSet = g.vertices().filter(|x| !m_set.contains(x) && !forbidden.contains(x)).collect();
    keep.insert(u);
    let mut request: Request = vec![u];
    if let Some(v) = v {
        keep.insert(v);
        request.push(v);
        request.sort_unstable();
    }
    let terminals: VertexSet = request.iter().copied().collect();
    let inst =
        LinkageInstance::new(g.induced_subgraph(&keep)?, k_prime + request.len(), terminals, vec![request])?;
    Ok(solve_linkage(&inst)?.map(|sol| {
        let p = sol.paths.into_iter().next().expect("one request, one path");
        if p.first() == Some(u) {
            p
        } else {
            p.reversed()
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathFamily {
    pub u: VertexId,
    pub v: Option<VertexId>,
    pub k_prime: usize,
    /// Internally disjoint, each starting at `u`.
    pub paths: Vec<Path>,
    /// The search stopped at `k + 1` paths.
    pub truncated: bool,
}

impl PathFamily {
    /// Vertices of the paths outside `M`.
    pub fn outside(&self, m_set: &VertexSet) -> VertexSet {
        self.paths.iter().flat_map(|p| p.0.iter().copied()).filter(|x| !m_set.contains(x)).collect()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PathFamilyIndex {
    pub families: Vec<PathFamily>,
    /// Vertices outside `M` on stored paths.
    pub a1: VertexSet,
}

impl PathFamilyIndex {
    pub fn get(&self, u: VertexId, v: Option<VertexId>, k_prime: usize) -> Option<&PathFamily> {
        let (u, v) = match v {
            Some(v) if v < u => (v, Some(u)),
            _ => (u, v),
        };
        self.families.iter().find(|f| f.u == u && f.v == v && f.k_prime == k_prime)
    }

    pub fn truncated_count(&self) -> usize {
        self.families.iter().filter(|f| f.truncated).count()
    }
}

fn build_family(inst: &ModulatorInstance, u: VertexId, v: Option<VertexId>, k_prime: usize) -> Result<PathFamily> {
    let m = &inst.modulator;
    let mut forbidden = VertexSet::new();
    let mut paths = Vec::new();
    while paths.len() < inst.k + 1 {
        let Some(p) = find_uvk_path(&inst.graph, m, u, v, k_prime, &forbidden)? else { break };
        forbidden.extend(p.0.iter().copied().filter(|x| !m.contains(x)));
        paths.push(p);
        if k_prime == 0 {
            // the edge uv or the lone vertex u: there is no second one
            break;
        }
    }
    let truncated = paths.len() == inst.k + 1;
    Ok(PathFamily { u, v, k_prime, paths, truncated })
}

/// Greedy families of up to `k + 1` internally disjoint paths for every pair of
/// modulator vertices with `0..=k-2` inner vertices and every single modulator
/// vertex with `0..=k-1` further vertices.
pub fn build_path_families(inst: &ModulatorInstance) -> Result<PathFamilyIndex> {
    let m: Vec<VertexId> = inst.modulator.iter().copied().collect();
    let mut keys = Vec::new();
    for (i, &u) in m.iter().enumerate() {
        for &v in &m[i + 1..] {
            for kp in 0..inst.k.saturating_sub(1) {
                keys.push((u, Some(v), kp));
            }
        }
        for kp in 0..inst.k {
            keys.push((u, None, kp));
        }
    }
    let families: Vec<PathFamily> =
        keys.par_iter().map(|&(u, v, kp)| build_family(inst, u, v, kp)).collect::<Result<_>>()?;
    let a1 = families.iter().flat_map(|f| f.outside(&inst.modulator)).collect();
    Ok(PathFamilyIndex { families, a1 })
}

/// Nodes `t(x)` for the vertices of `a1` (the shallowest bag holding `x`, ties
/// to the smaller node id), closed under lowest common ancestors, and the
/// vertices of their bags.
pub fn mark_decomposition(
    inst: &ModulatorInstance,
    td: &TreeDecomposition,
    a1: &VertexSet,
) -> Result<(NodeSet, VertexSet)> {
    if let Some(x) = a1.iter().find(|x| inst.modulator.contains(x) || !inst.graph.contains(**x)) {
        return invalid(format!("{x} is not a vertex of G - M"));
    }
    let occ = td.occurrences();
    let mut b1 = NodeSet::new();
    for x in a1 {
        let Some(nodes) = occ.get(x) else {
            return invalid(format!("{x} lies in no bag"));
        };
        b1.insert(*nodes.iter().min_by_key(|t| (td.depth(**t), t.0)).expect("occurrence lists are nonempty"));
    }
    let b2 = lca_closure(td, &b1)?;
    let a2 = td.bags_union(b2.iter().copied());
    Ok((b2, a2))
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentContext {
    pub component: EdgeComponent,
    pub t0: NodeId,
    pub d_nodes: NodeSet,
    pub v_d: VertexSet,
    pub s_d: VertexSet,
    /// `G[V_D ∪ M]`.
    #[serde(skip)]
    pub g_d: Graph,
}

impl ComponentContext {
    pub fn new(
        inst: &ModulatorInstance,
        td: &TreeDecomposition,
        b2: &NodeSet,
        component: EdgeComponent,
        m: usize,
    ) -> Result<Self> {
        let heavy = lowest_heavy_node(td, &component, m)?;
        let s_nodes = heavy.d.iter().copied().filter(|t| b2.contains(t) || *t == heavy.t0);
        let s_d = td.bags_union(s_nodes);
        let mut host = heavy.vertices.clone();
        host.extend(inst.modulator.iter().copied());
        let g_d = inst.graph.induced_subgraph(&host)?;
        Ok(Self { component, t0: heavy.t0, d_nodes: heavy.d, v_d: heavy.vertices, s_d, g_d })
    }

    /// `N(V_D \ S_D) ⊆ S_D ∪ M`, as the number of offending vertices.
    pub fn boundary_leaks(&self, g: &Graph, m_set: &VertexSet) -> Result<usize> {
        let inner: VertexSet = self.v_d.difference(&self.s_d).copied().collect();
        Ok(g.open_neighborhood(&inner)?.iter().filter(|x| !self.s_d.contains(x) && !m_set.contains(x)).count())
    }

    pub fn invariant_checks(&self, inst: &ModulatorInstance, m: usize) -> Result<Vec<BoundCheck>> {
        let eta = inst.eta;
        Ok(vec![
            BoundCheck::at_most_usize("|S_D| <= 2eta+2", self.s_d.len(), &Count::from(2 * eta + 2)),
            BoundCheck::at_most_usize("|V_D| <= 2m+eta+1", self.v_d.len(), &(Count::from(m) * 2u32 + eta + 1u32)),
            BoundCheck::at_most_usize(
                "N(V_D \\ S_D) outside S_D ∪ M",
                self.boundary_leaks(&inst.graph, &inst.modulator)?,
                &Count::zero(),
            ),
        ])
    }
}

/// Candidates for a component: the empty request at `k' = k`, and multisets of
/// at most `min(2|S_D|, 4 eta + 4)` requests `{s}` or `{s, x}` with `s ∈ S_D`,
/// `x ∈ S_D ∪ M`, for every `k'` in `0..=k`.
pub fn component_candidates(inst: &ModulatorInstance, ctx: &ComponentContext, only_inducible: bool) -> Vec<CandidateInstance> {
    let mut second = ctx.s_d.clone();
    second.extend(inst.modulator.iter().copied());
    let choices = request_choices(&ctx.s_d, &second);
    let max_r = (2 * ctx.s_d.len()).min(4 * inst.eta + 4);
    if only_inducible {
        return inducible_candidates(&choices, max_r, inst.k);
    }
    let mut per_k: Vec<Vec<Request>> = vec![vec![Vec::new()]];
    for_each_request_multiset(&choices, max_r, |_| true, |reqs| per_k.push(reqs.to_vec()));
    (0..=inst.k)
        .flat_map(|k_prime| per_k.iter().map(move |requests| CandidateInstance { k_prime, requests: requests.clone() }))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentReduction {
    #[serde(skip)]
    pub graph: Graph,
    pub deleted: VertexSet,
    /// Witness vertices (`A_3`).
    pub marked: VertexSet,
    pub stats: OracleStats,
    pub candidates: usize,
}

/// Query every candidate on `G_D` with terminals `S_D ∪ M` and delete the
/// vertices of `V_D` that are neither witnesses nor in `S_D`.
pub fn reduce_component(
    inst: &ModulatorInstance,
    ctx: &ComponentContext,
    m_threshold: usize,
    oracle: &dyn LinkageOracle,
    opts: &ReductionOptions,
) -> Result<ComponentReduction> {
    if ctx.v_d.len() <= m_threshold {
        return not_applicable(format!("|V_D| = {} does not exceed m = {m_threshold}", ctx.v_d.len()));
    }
    let candidates = component_candidates(inst, ctx, opts.skip_uninducible);
    let mut terminals = ctx.s_d.clone();
    terminals.extend(inst.modulator.iter().copied());
    let (marked, stats) = mark_witnesses(&ctx.g_d, &terminals, &candidates, oracle, opts.parallel)?;
    let deleted: VertexSet = ctx.v_d.iter().copied().filter(|x| !marked.contains(x) && !ctx.s_d.contains(x)).collect();
    let mut graph = inst.graph.clone();
    graph.remove_vertices(&deleted);
    Ok(ComponentReduction { graph, deleted, marked, stats, candidates: candidates.len() })
}

#[derive(Clone, Debug, Default)]
pub struct ModulatorConfig {
    /// Use this component threshold instead of the canonical `m`.
    pub m_override: Option<usize>,
    pub reduction: ReductionOptions,
    pub record_steps: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulatorStep {
    pub a1: usize,
    pub b2: usize,
    pub a2: usize,
    pub t0: NodeId,
    pub v_d: usize,
    pub s_d: usize,
    pub candidates: usize,
    pub oracle_calls: u64,
    pub deleted: VertexSet,
    #[serde(skip)]
    pub graph_after: Option<Graph>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulatorRun {
    pub answer: bool,
    pub witness: Option<Path>,
    pub stats: OracleStats,
    pub reduction_steps: usize,
    pub initial_graph_size: usize,
    pub final_graph_size: usize,
    pub k: usize,
    pub eta: usize,
    pub ell: usize,
    #[serde(serialize_with = "serialize_count")]
    pub m_threshold: Count,
    pub m_used: usize,
    #[serde(serialize_with = "serialize_count")]
    pub rho: Count,
    /// Size bound for the final graph, from the last marking round.
    #[serde(serialize_with = "serialize_count")]
    pub final_size_bound: Count,
    pub components_reduced: usize,
    /// Heavy components whose reduction deleted nothing (only below the canonical threshold).
    pub components_stuck: usize,
    pub families_truncated: usize,
    /// Heavy components were left, so the final size bound is not claimed.
    pub bound_unverified: bool,
    pub steps: Vec<ModulatorStep>,
    pub bound_checks: Vec<BoundCheck>,
    #[serde(skip)]
    pub final_graph: Graph,
}

impl ModulatorRun {
    pub fn checks_pass(&self) -> bool {
        self.bound_checks.iter().all(|c| c.pass)
    }
}

/// Keep, per check name, the first failure or else the last observation.
fn fold_checks(all: Vec<BoundCheck>) -> Vec<BoundCheck> {
    let mut order = Vec::new();
    let mut by_name: BTreeMap<String, BoundCheck> = BTreeMap::new();
    for c in all {
        match by_name.get(&c.name) {
            None => {
                order.push(c.name.clone());
                by_name.insert(c.name.clone(), c);
            }
            Some(prev) if prev.pass => {
                by_name.insert(c.name.clone(), c);
            }
            Some(_) => {}
        }
    }
    order.into_iter().map(|n| by_name.remove(&n).expect("recorded")).collect()
}

fn prepare(rest: &Graph, td: &TreeDecomposition) -> Result<TreeDecomposition> {
    let td = restrict(td, &rest.vertex_set());
    binarize(rest, &make_connected(rest, &td)?)
}

pub fn modulator_kernelize(inst: &ModulatorInstance, oracle: &dyn LinkageOracle) -> Result<ModulatorRun> {
    modulator_kernelize_with(inst, oracle, &ModulatorConfig::default())
}

pub fn modulator_kernelize_with(
    inst: &ModulatorInstance,
    oracle: &dyn LinkageOracle,
    config: &ModulatorConfig,
) -> Result<ModulatorRun> {
    let (k, eta, ell) = (inst.k, inst.eta, inst.ell());
    let m_canon = m_threshold(k as u64, eta as u64, ell as u64);
    let m = config.m_override.unwrap_or_else(|| saturating_usize(&m_canon));
    let m_count = config.m_override.map_or_else(|| m_canon.clone(), Count::from);
    let rho_val = rho(eta as i64, ell as i64)?;
    let calls_cap = Count::from(k + 1) * &rho_val;
    let instance_cap = &m_count * 2u32 + (eta + 1 + ell) as u32;
    let a1_cap = a1_bound(k as u64, ell as u64);

    let counting = CountingOracle::new(oracle);
    let mut cur = inst.clone();
    let mut checks = vec![
        BoundCheck::at_most_usize("|S_D| <= 2eta+2", 0, &Count::from(2 * eta + 2)),
        BoundCheck::at_most_usize("|V_D| <= 2m+eta+1", 0, &(&m_count * 2u32 + eta + 1u32)),
        BoundCheck::at_most_usize("N(V_D \\ S_D) outside S_D ∪ M", 0, &Count::zero()),
        BoundCheck::at_most_usize("component_calls <= (k+1) rho", 0, &calls_cap),
        BoundCheck::at_most_usize("component_instance <= 2m+eta+1+ell", 0, &instance_cap),
    ];
    let mut steps = Vec::new();
    let mut components_stuck;
    let mut families_truncated;
    let mut a2_last;
    let mut b2_last;
    loop {
        let rest = rest_graph(&cur.graph, &cur.modulator)?;
        cur.decomposition = prepare(&rest, &cur.decomposition)?;
        let families = build_path_families(&cur)?;
        families_truncated = families.truncated_count();
        let (b2, a2) = mark_decomposition(&cur, &cur.decomposition, &families.a1)?;
        a2_last = a2.len();
        b2_last = b2.len();
        checks.push(if ell == 0 {
            BoundCheck::at_most_usize("|A1| < (k+1)k ell^2", families.a1.len(), &a1_cap)
        } else {
            BoundCheck::at_most("|A1| < (k+1)k ell^2", &Count::from(families.a1.len()), &a1_cap, true)
        });
        checks.push(BoundCheck::at_most_usize("|B2| <= 2k(k+1)ell^2+1", b2.len(), &b2_bound(k as u64, ell as u64)));
        checks.push(BoundCheck::at_most_usize("|A2| <= (eta+1)|B2|", a2.len(), &Count::from((eta + 1) * b2.len())));

        components_stuck = 0;
        let mut progressed = false;
        let td = cur.decomposition.clone();
        for comp in edge_components(&td, &b2)? {
            if comp.vertices(&td).len() <= m {
                continue;
            }
            let ctx = ComponentContext::new(&cur, &td, &b2, comp, m)?;
            checks.extend(ctx.invariant_checks(&cur, m)?);
            let out = reduce_component(&cur, &ctx, m, &counting, &config.reduction)?;
            checks.push(BoundCheck::at_most_usize("component_calls <= (k+1) rho", out.stats.calls as usize, &calls_cap));
            checks.push(BoundCheck::at_most_usize(
                "component_instance <= 2m+eta+1+ell",
                out.stats.max_instance_vertices,
                &instance_cap,
            ));
            if out.deleted.is_empty() {
                components_stuck += 1;
                continue;
            }
            cur.graph = out.graph;
            steps.push(ModulatorStep {
                a1: families.a1.len(),
                b2: b2.len(),
                a2: a2.len(),
                t0: ctx.t0,
                v_d: ctx.v_d.len(),
                s_d: ctx.s_d.len(),
                candidates: out.candidates,
                oracle_calls: out.stats.calls,
                deleted: out.deleted,
                graph_after: config.record_steps.then(|| cur.graph.clone()),
            });
            progressed = true;
            break;
        }
        if !progressed {
            break;
        }
    }

    let inst_final = LinkageInstance::k_path(cur.graph.clone(), k);
    let (answer, witness) = match counting.solve(&inst_final)? {
        None => (false, None),
        Some(sol) => {
            check_solution(&inst_final, &sol)
                .map_err(|why| Error::OracleFault(format!("final witness is invalid: {why}")))?;
            (true, sol.paths.into_iter().next())
        }
    };

    let bound_unverified = components_stuck > 0;
    let final_bound = final_size_bound(k as u64, ell as u64, &m_count, a2_last);
    if !bound_unverified {
        checks.push(BoundCheck::at_most_usize("final_size <= final_size_bound", cur.graph.num_vertices(), &final_bound));
        // every component hangs below a marked node, at most two per node
        let by_marks = Count::from(2 * b2_last) * &m_count + Count::from(a2_last + ell);
        checks.push(BoundCheck::at_most_usize("final_size <= 2|B2| m + |A2| + ell", cur.graph.num_vertices(), &by_marks));
    }
    checks.push(BoundCheck::at_most_usize(
        "reduction_steps <= n",
        steps.len(),
        &Count::from(inst.graph.num_vertices()),
    ));
    let stats = counting.stats();

    Ok(ModulatorRun {
        answer,
        witness,
        stats,
        reduction_steps: steps.len(),
        initial_graph_size: inst.graph.num_vertices(),
        final_graph_size: cur.graph.num_vertices(),
        k,
        eta,
        ell,
        m_threshold: m_canon,
        m_used: m,
        rho: rho_val,
        final_size_bound: final_bound,
        components_reduced: steps.len(),
        components_stuck,
        families_truncated,
        bound_unverified,
        steps,
        bound_checks: fold_checks(checks),
        final_graph: cur.graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{brute_force_k_path, vset};
    use crate::linkage::ExactSolver;

    fn theta(paths: u32, inner: u32) -> Graph {
        // hubs 0 and 1 joined by `paths` paths with `inner` inner vertices each
        let mut edges = Vec::new();
        let mut next = 2;
        for _ in 0..paths {
            let mut prev = 0;
            for _ in 0..inner {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, 1));
        }
        Graph::from_edges(next, &edges).unwrap()
    }

    #[test]
    fn uvk_paths() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (2, 3), (3, 1)]).unwrap();
        let m = vset([0, 1]);
        let none = VertexSet::new();
        let edge = find_uvk_path(&g, &m, VertexId(0), Some(VertexId(1)), 0, &none).unwrap();
        assert_eq!(edge, Some(Path(vec![VertexId(0), VertexId(1)])));
        let two = find_uvk_path(&g, &m, VertexId(1), Some(VertexId(0)), 2, &none).unwrap().unwrap();
        assert_eq!(two.first(), Some(VertexId(1)));
        assert_eq!(two.len(), 4);
        let out = find_uvk_path(&g, &m, VertexId(0), None, 1, &none).unwrap();
        assert_eq!(out, Some(Path(vec![VertexId(0), VertexId(2)])));
        assert_eq!(find_uvk_path(&g, &m, VertexId(0), Some(VertexId(1)), 2, &vset([3])).unwrap(), None);
        assert!(find_uvk_path(&g, &m, VertexId(2), None, 1, &none).is_err());
    }

    #[test]
    fn theta_family_is_truncated() {
        let k = 3;
        let g = theta(k as u32 + 3, 1);
        let inst = ModulatorInstance::new(g, k, vset([0, 1]), 1).unwrap();
        let idx = build_path_families(&inst).unwrap();
        let fam = idx.get(VertexId(1), Some(VertexId(0)), 1).unwrap();
        assert_eq!(fam.paths.len(), k + 1);
        assert!(fam.truncated);
        assert!(idx.get(VertexId(0), Some(VertexId(1)), 0).unwrap().paths.is_empty());
    }

    #[test]
    fn isolated_modulator_vertex() {
        let g = Graph::from_edges(3, &[(1, 2)]).unwrap();
        let inst = ModulatorInstance::new(g, 3, vset([0]), 1).unwrap();
        let idx = build_path_families(&inst).unwrap();
        assert!(idx.a1.is_empty());
        assert!(idx.families.iter().filter(|f| f.k_prime > 0).all(|f| f.paths.is_empty()));
        let (b2, a2) = mark_decomposition(&inst, &inst.decomposition, &idx.a1).unwrap();
        assert_eq!(b2, NodeSet::from([inst.decomposition.root()]));
        assert_eq!(&a2, inst.decomposition.bag(inst.decomposition.root()));
    }

    #[test]
    fn rejects_wide_rest() {
        let mut edges = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                edges.push((a, b));
            }
        }
        let g = Graph::from_edges(5, &edges).unwrap();
        assert!(ModulatorInstance::new(g.clone(), 3, vset([4]), 2).is_err());
        assert!(ModulatorInstance::new(g, 3, vset([0]), 2).is_ok());
    }

    #[test]
    fn small_threshold_reductions_are_safe() {
        // hub 0 touches the start of a spine 1..=8; leaves hang off the far end
        let mut edges: Vec<(u32, u32)> = (2..9).map(|i| (i - 1, i)).collect();
        edges.push((0, 1));
        let mut next = 9;
        for s in 5..9 {
            for _ in 0..3 {
                edges.push((s, next));
                next += 1;
            }
        }
        edges.push((0, next - 1));
        let g = Graph::from_edges(next, &edges).unwrap();
        for k in [4, 7, 10, 11, 12] {
            let inst = ModulatorInstance::new(g.clone(), k, vset([0]), 1).unwrap();
            let cfg = ModulatorConfig { m_override: Some(5), record_steps: true, ..Default::default() };
            let run = modulator_kernelize_with(&inst, &ExactSolver::default(), &cfg).unwrap();
            let truth = brute_force_k_path(&g, k).unwrap().is_some();
            assert_eq!(run.answer, truth, "k = {k}");
            for st in &run.steps {
                assert_eq!(brute_force_k_path(st.graph_after.as_ref().unwrap(), k).unwrap().is_some(), truth);
            }
            if k == 4 {
                assert!(run.reduction_steps > 0);
            }
        }
    }

    #[test]
    fn canonical_threshold_is_one_call_at_desk_scale() {
        let g = theta(4, 2);
        let inst = ModulatorInstance::new(g.clone(), 5, vset([0, 1]), 1).unwrap();
        let run = modulator_kernelize(&inst, &ExactSolver::default()).unwrap();
        assert_eq!(run.stats.calls, 1);
        assert_eq!(run.answer, brute_force_k_path(&g, 5).unwrap().is_some());
        assert!(run.checks_pass(), "{:?}", run.bound_checks);
    }
}
