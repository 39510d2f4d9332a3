//! The generic Turing kernel: cut off a large side of a small separation, shrink
//! it with the reduction rule, repeat, then ask the oracle once about what is left.

use num_traits::One;
use serde::Serialize;

use crate::bounds::{h_hat, p_bound, saturating_usize, serialize_count, BoundCheck};
use crate::error::{Error, Result};
use crate::graph::{check_separation, Graph, Path, VertexSet};
use crate::linkage::{check_solution, CountingOracle, LinkageInstance, LinkageOracle, OracleStats};
use crate::reduction::{apply_reduction_with, GuardedRegion, ReductionOptions};
use crate::separation::{SeparationOutcome, SeparationProvider};
use crate::Count;

#[derive(Clone, Debug, Default)]
pub struct KernelConfig {
    /// Use this threshold instead of `k · p_bound(k, h, h)`. Turns off the
    /// region-size precondition of the reduction rule.
    pub p_override: Option<usize>,
    pub reduction: ReductionOptions,
    /// Keep a copy of the graph after every step.
    pub record_steps: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelStep {
    pub separation_order: usize,
    /// `|A'|` as returned by the provider.
    pub side_size: usize,
    pub region_size: usize,
    pub guard_size: usize,
    pub deleted: VertexSet,
    pub oracle_calls: u64,
    #[serde(skip)]
    pub graph_after: Option<Graph>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelRun {
    pub answer: bool,
    pub witness: Option<Path>,
    pub stats: OracleStats,
    pub reduction_steps: usize,
    pub initial_graph_size: usize,
    pub final_graph_size: usize,
    pub h: usize,
    #[serde(serialize_with = "serialize_count")]
    pub h_hat: Count,
    /// `k · p_bound(k, h, h)`.
    #[serde(serialize_with = "serialize_count")]
    pub p_threshold: Count,
    /// The threshold the loop actually ran with.
    pub p_used: usize,
    /// The loop stopped above the threshold, so the final call may exceed it.
    pub bound_unverified: bool,
    pub steps: Vec<KernelStep>,
    pub bound_checks: Vec<BoundCheck>,
    #[serde(skip)]
    pub final_graph: Graph,
}

impl KernelRun {
    pub fn checks_pass(&self) -> bool {
        self.bound_checks.iter().all(|c| c.pass)
    }
}

pub fn kernelize(
    g: &Graph,
    k: usize,
    sep: &mut dyn SeparationProvider,
    oracle: &dyn LinkageOracle,
) -> Result<KernelRun> {
    kernelize_with(g, k, sep, oracle, &KernelConfig::default())
}

pub fn kernelize_with(
    g: &Graph,
    k: usize,
    sep: &mut dyn SeparationProvider,
    oracle: &dyn LinkageOracle,
    config: &KernelConfig,
) -> Result<KernelRun> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let h = sep.order_bound();
    let hh = h_hat(h as u64);
    let p_threshold = p_bound(k as i64, h as i64, h as i64)? * Count::from(k);
    let p = config.p_override.unwrap_or_else(|| saturating_usize(&p_threshold));
    let mut ropts = config.reduction.clone();
    if config.p_override.is_some() {
        ropts.check_size = false;
    }
    // regions lose up to h vertices to the separator
    let p_req = p.saturating_add(h);
    let q = sep.size_cap(p_req);

    let counting = CountingOracle::new(oracle);
    let mut cur = g.clone();
    sep.graph_changed(&cur);
    let mut steps = Vec::new();
    let mut reduction_steps = 0;
    let mut reduction_max_instance = 0;
    let mut bound_unverified = false;
    let mut provider_path = None;

    while cur.num_vertices() > p {
        if cur.num_vertices() <= p_req {
            bound_unverified = true;
            break;
        }
        let s = match sep.find(&cur, k, p_req)? {
            SeparationOutcome::HasKPath(path) => {
                if path.len() != k || !path.is_valid_in(&cur) {
                    return Err(Error::Protocol("provider reported an invalid k-path".into()));
                }
                provider_path = Some(path);
                break;
            }
            SeparationOutcome::NotApplicable(_) => {
                bound_unverified = true;
                break;
            }
            SeparationOutcome::Found(s) => s,
        };
        if !check_separation(&cur, &s.side_a, &s.side_b) {
            return Err(Error::Protocol("provider returned a non-separation".into()));
        }
        if s.order() > h || s.side_a.len() <= p_req || s.side_a.len() > q {
            return Err(Error::Protocol(format!(
                "separation of order {} with |A| = {} violates order <= {h} and {p_req} < |A| <= {q}",
                s.order(),
                s.side_a.len()
            )));
        }
        let region = s.strict_a();
        let guard = cur.open_neighborhood(&region)?;
        let gr = GuardedRegion::new(&cur, region, guard, k)?;
        let before = counting.stats().calls;
        let out = match apply_reduction_with(&cur, &gr, &counting, &ropts) {
            Ok(out) => out,
            Err(Error::NotApplicable(_)) => {
                bound_unverified = true;
                break;
            }
            Err(e) => return Err(e),
        };
        if out.deleted.is_empty() {
            bound_unverified = true;
            break;
        }
        reduction_max_instance = reduction_max_instance.max(out.stats.max_instance_vertices);
        reduction_steps += 1;
        cur = out.graph;
        sep.graph_changed(&cur);
        steps.push(KernelStep {
            separation_order: s.order(),
            side_size: s.side_a.len(),
            region_size: gr.region.len(),
            guard_size: gr.guard.len(),
            deleted: out.deleted,
            oracle_calls: counting.stats().calls - before,
            graph_after: config.record_steps.then(|| cur.clone()),
        });
    }

    let (answer, witness) = match provider_path {
        Some(path) => (true, Some(path)),
        None => {
            let inst = LinkageInstance::k_path(cur.clone(), k);
            match counting.solve(&inst)? {
                None => (false, None),
                Some(sol) => {
                    check_solution(&inst, &sol)
                        .map_err(|why| Error::OracleFault(format!("final witness is invalid: {why}")))?;
                    (true, sol.paths.into_iter().next())
                }
            }
        }
    };

    let stats = counting.stats();
    let n = g.num_vertices();
    let mut bound_checks = vec![
        BoundCheck::at_most("p_threshold <= k^2 * h_hat", &p_threshold, &(Count::from(k * k) * &hh), false),
        BoundCheck::at_most_usize("reduction_steps <= n", reduction_steps, &Count::from(n)),
        BoundCheck::at_most(
            "oracle_calls <= p_bound(k,h,h) * n + 1",
            &Count::from(stats.calls),
            &(p_bound(k as i64, h as i64, h as i64)? * Count::from(n) + Count::one()),
            false,
        ),
        BoundCheck::at_most(
            "oracle_calls <= k * h_hat * n + 1",
            &Count::from(stats.calls),
            &(Count::from(k * n) * &hh + Count::one()),
            false,
        ),
        BoundCheck::at_most_usize("reduction_instance <= q(k, p)", reduction_max_instance, &Count::from(q)),
    ];
    if !bound_unverified {
        bound_checks.push(BoundCheck::at_most_usize(
            "oracle_max_instance <= max(q(k, p), p)",
            stats.max_instance_vertices,
            &Count::from(q.max(p)),
        ));
    }

    Ok(KernelRun {
        answer,
        witness,
        stats,
        reduction_steps,
        initial_graph_size: n,
        final_graph_size: cur.num_vertices(),
        h,
        h_hat: hh,
        p_threshold,
        p_used: p,
        bound_unverified,
        steps,
        bound_checks,
        final_graph: cur,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::compute_decomposition;
    use crate::graph::brute_force_k_path;
    use crate::linkage::{BruteForce, ExactSolver};
    use crate::separation::{DecompositionProvider, TrivialProvider};

    fn path_graph(n: u32) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn small_graph_is_one_call() {
        let g = path_graph(6);
        let run = kernelize(&g, 4, &mut TrivialProvider { h: 1 }, &ExactSolver::default()).unwrap();
        assert!(run.answer);
        assert_eq!(run.stats.calls, 1);
        assert_eq!(run.reduction_steps, 0);
        assert!(!run.bound_unverified);
        assert!(run.checks_pass());
        assert_eq!(run.h_hat, Count::from(2u32).pow(7));
    }

    #[test]
    fn overridden_threshold_reduces_and_stays_correct() {
        // caterpillar: spine 0..8 with three leaves on every odd spine vertex
        let mut edges: Vec<(u32, u32)> = (1..9).map(|i| (i - 1, i)).collect();
        let mut next = 9;
        for s in [1, 3, 5, 7] {
            for _ in 0..3 {
                edges.push((s, next));
                next += 1;
            }
        }
        let g = Graph::from_edges(next, &edges).unwrap();
        let mut reduced = 0;
        for k in [3, 6, 10, 11, 12] {
            let td = compute_decomposition(&g, None);
            let mut sep = DecompositionProvider::new(&g, td).unwrap();
            let cfg = KernelConfig { p_override: Some(4), record_steps: true, ..Default::default() };
            let run = kernelize_with(&g, k, &mut sep, &BruteForce::default(), &cfg).unwrap();
            let truth = brute_force_k_path(&g, k).unwrap().is_some();
            assert_eq!(run.answer, truth, "k = {k}");
            reduced += run.reduction_steps;
            for st in &run.steps {
                let after = st.graph_after.as_ref().unwrap();
                assert_eq!(brute_force_k_path(after, k).unwrap().is_some(), truth);
            }
            assert!(run.checks_pass(), "{:?}", run.bound_checks);
        }
        assert!(reduced > 0);
    }

    struct Bogus;
    impl SeparationProvider for Bogus {
        fn order_bound(&self) -> usize {
            1
        }
        fn size_cap(&self, p: usize) -> usize {
            10 * p
        }
        fn find(&mut self, g: &Graph, _k: usize, _p: usize) -> Result<SeparationOutcome> {
            // misses a vertex and lets edges cross
            let a: VertexSet = g.vertices().take(6).collect();
            let b: VertexSet = g.vertices().skip(7).collect();
            Ok(SeparationOutcome::Found(crate::graph::Separation::new(a, b)))
        }
    }

    #[test]
    fn invalid_separation_is_a_protocol_error() {
        let g = path_graph(12);
        let cfg = KernelConfig { p_override: Some(2), ..Default::default() };
        let err = kernelize_with(&g, 3, &mut Bogus, &BruteForce::default(), &cfg).unwrap_err();
        assert!(matches!(err, Error::Protocol(_)));
    }
}
