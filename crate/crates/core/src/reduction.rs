//! The reduction rule: a large region `A` with a small guard is shrunk to the
//! witnesses of every linkage instance a guarded k-path could induce on `N[A]`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::p_bound;
use crate::error::{invalid, not_applicable, Error, Result};
use crate::graph::{for_each_k_path, is_guarded, Graph, VertexId, VertexSet};
use crate::linkage::{check_solution, CountingOracle, LinkageInstance, LinkageOracle, OracleStats, Request};
use crate::Count;

/// Largest graph on which a guard can be certified by enumerating k-paths.
pub const GUARD_CHECK_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GuardedRegion {
    pub region: VertexSet,
    /// `N(A)`.
    pub boundary: VertexSet,
    pub guard: VertexSet,
    pub k: usize,
}

impl GuardedRegion {
    pub fn new(g: &Graph, region: VertexSet, guard: VertexSet, k: usize) -> Result<Self> {
        let boundary = g.open_neighborhood(&region)?;
        if let Some(z) = guard.iter().find(|z| !boundary.contains(z)) {
            return invalid(format!("guard vertex {z} is not in N(A)"));
        }
        Ok(Self { region, boundary, guard, k })
    }

    /// `ℓ = |N(A)|`.
    pub fn ell(&self) -> usize {
        self.boundary.len()
    }

    /// `h = |Z|`.
    pub fn h(&self) -> usize {
        self.guard.len()
    }

    pub fn max_requests(&self) -> usize {
        (2 * self.h()).max(1)
    }

    fn matches(&self, g: &Graph) -> Result<()> {
        if g.open_neighborhood(&self.region)? != self.boundary {
            return invalid("region boundary does not match the graph");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CandidateInstance {
    pub k_prime: usize,
    /// Sorted; each request sorted.
    pub requests: Vec<Request>,
}

/// Every admissible request: `{z}` or `{z, b}` with `z` in the guard and `b` on
/// the boundary.
pub fn request_choices(guard: &VertexSet, boundary: &VertexSet) -> Vec<Request> {
    let mut out: Vec<Request> = Vec::new();
    for &z in guard {
        out.push(vec![z]);
        for &b in boundary {
            if b != z {
                let mut r = vec![z, b];
                r.sort_unstable();
                out.push(r);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Visit multisets of `choices` of size `1..=max_r` as nondecreasing index
/// sequences. A prefix rejected by `keep` is neither visited nor extended, so
/// `keep` must be monotone under adding requests.
pub(crate) fn for_each_request_multiset<K, F>(choices: &[Request], max_r: usize, mut keep: K, mut visit: F)
where
    K: FnMut(&[Request]) -> bool,
    F: FnMut(&[Request]),
{
    fn go<K: FnMut(&[Request]) -> bool, F: FnMut(&[Request])>(
        choices: &[Request],
        max_r: usize,
        from: usize,
        cur: &mut Vec<Request>,
        keep: &mut K,
        visit: &mut F,
    ) {
        if cur.len() == max_r {
            return;
        }
        for i in from..choices.len() {
            cur.push(choices[i].clone());
            if keep(cur) {
                visit(cur);
                go(choices, max_r, i, cur, keep, visit);
            }
            cur.pop();
        }
    }
    go(choices, max_r, 0, &mut Vec::new(), &mut keep, &mut visit);
}

/// All candidates of the rule in canonical form: for each `k'` in `0..=k`, the
/// single empty request and every multiset of `1..=max(1, 2|Z|)` admissible
/// requests.
pub fn enumerate_candidates(gr: &GuardedRegion) -> Vec<CandidateInstance> {
    let choices = request_choices(&gr.guard, &gr.boundary);
    let mut per_k: Vec<Vec<Request>> = vec![Vec::new()];
    for_each_request_multiset(&choices, gr.max_requests(), |_| true, |reqs| per_k.push(reqs.to_vec()));
    let mut out = Vec::with_capacity((gr.k + 1) * per_k.len());
    for k_prime in 0..=gr.k {
        for reqs in &per_k {
            let requests = if reqs.is_empty() { vec![Vec::new()] } else { reqs.clone() };
            out.push(CandidateInstance { k_prime, requests });
        }
    }
    out
}

/// Necessary conditions for `reqs` to be the requests of the traverses of one
/// k-path, each traverse holding at least one vertex outside the terminals: a
/// terminal ends at most two traverses, at most two traverses end inside the
/// region, and the traverses hold at least `r + |∪R|` vertices. Monotone under
/// adding requests.
pub fn inducible(reqs: &[Request], k_prime: usize) -> bool {
    let mut uses: BTreeMap<VertexId, usize> = BTreeMap::new();
    for v in reqs.iter().flatten() {
        *uses.entry(*v).or_default() += 1;
    }
    uses.values().all(|&c| c <= 2)
        && reqs.iter().filter(|r| r.len() == 1).count() <= 2
        && reqs.len() + uses.len() <= k_prime
}

/// The candidates worth asking the oracle about: the empty request only for
/// `k' = k` (a k-path inside the region) and the inducible request multisets.
pub fn inducible_candidates(choices: &[Request], max_r: usize, k: usize) -> Vec<CandidateInstance> {
    let mut out = vec![CandidateInstance { k_prime: k, requests: vec![Vec::new()] }];
    for k_prime in 0..=k {
        for_each_request_multiset(
            choices,
            max_r,
            |reqs| inducible(reqs, k_prime),
            |reqs| out.push(CandidateInstance { k_prime, requests: reqs.to_vec() }),
        );
    }
    out
}

#[derive(Clone, Debug)]
pub struct ReductionOptions {
    /// Refuse to run unless `|A| > k · p_bound(k, ℓ, h)`.
    pub check_size: bool,
    /// Certify the guard by enumerating k-paths first (small graphs only).
    pub verify_guard: bool,
    /// Query only candidates some guarded k-path could induce.
    pub skip_uninducible: bool,
    pub parallel: bool,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self { check_size: true, verify_guard: false, skip_uninducible: true, parallel: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionOutcome {
    #[serde(skip)]
    pub graph: Graph,
    pub deleted: VertexSet,
    pub marked: VertexSet,
    pub stats: OracleStats,
    pub candidates: usize,
}

/// Ask the oracle about every candidate on `G[N[A]]` and return the union of the
/// witness paths. Shared by the generic rule and the modulator kernel.
pub(crate) fn mark_witnesses(
    host: &Graph,
    terminals: &VertexSet,
    candidates: &[CandidateInstance],
    oracle: &dyn LinkageOracle,
    parallel: bool,
) -> Result<(VertexSet, OracleStats)> {
    let counting = CountingOracle::new(oracle);
    let ask = |c: &CandidateInstance| -> Result<Option<VertexSet>> {
        let inst = LinkageInstance {
            graph: host.clone(),
            k_prime: c.k_prime,
            terminals: terminals.clone(),
            requests: c.requests.clone(),
        };
        match counting.solve(&inst)? {
            None => Ok(None),
            Some(sol) => match check_solution(&inst, &sol) {
                Ok(()) => Ok(Some(sol.vertices())),
                Err(why) => Err(Error::OracleFault(format!("oracle returned an invalid witness: {why}"))),
            },
        }
    };
    let answers: Vec<Option<VertexSet>> = if parallel {
        candidates.par_iter().map(ask).collect::<Result<_>>()?
    } else {
        candidates.iter().map(ask).collect::<Result<_>>()?
    };
    let marked = answers.into_iter().flatten().flatten().collect();
    Ok((marked, counting.stats()))
}

pub fn apply_reduction(g: &Graph, gr: &GuardedRegion, oracle: &dyn LinkageOracle) -> Result<ReductionOutcome> {
    apply_reduction_with(g, gr, oracle, &ReductionOptions::default())
}

pub fn apply_reduction_with(
    g: &Graph,
    gr: &GuardedRegion,
    oracle: &dyn LinkageOracle,
    opts: &ReductionOptions,
) -> Result<ReductionOutcome> {
    gr.matches(g)?;
    if opts.check_size {
        let need = p_bound(gr.k as i64, gr.ell() as i64, gr.h() as i64)? * Count::from(gr.k);
        if Count::from(gr.region.len()) <= need {
            return not_applicable(format!("|A| = {} does not exceed k·p = {need}", gr.region.len()));
        }
    }
    if opts.verify_guard && !guard_is_valid(g, gr)? {
        return invalid("guard is not a k-guard of the region");
    }
    let closed: VertexSet = gr.region.union(&gr.boundary).copied().collect();
    let host = g.induced_subgraph(&closed)?;
    let candidates = if opts.skip_uninducible {
        inducible_candidates(&request_choices(&gr.guard, &gr.boundary), gr.max_requests(), gr.k)
    } else {
        enumerate_candidates(gr)
    };
    let (marked, stats) = mark_witnesses(&host, &gr.boundary, &candidates, oracle, opts.parallel)?;
    let deleted: VertexSet = gr.region.difference(&marked).copied().collect();
    let mut graph = g.clone();
    graph.remove_vertices(&deleted);
    Ok(ReductionOutcome { graph, deleted, marked, stats, candidates: candidates.len() })
}

/// The guard condition by brute force: no k-path, or some k-path inside the
/// region or with every traverse anchored in the guard.
pub fn guard_is_valid(g: &Graph, gr: &GuardedRegion) -> Result<bool> {
    let mut any = false;
    let mut guarded = false;
    let mut err = None;
    for_each_k_path(g, gr.k, GUARD_CHECK_CAP, |p| {
        any = true;
        match is_guarded(g, p, &gr.region, &gr.guard) {
            Ok(true) => {
                guarded = true;
                false
            }
            Ok(false) => true,
            Err(e) => {
                err = Some(e);
                false
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(!any || guarded)
}
