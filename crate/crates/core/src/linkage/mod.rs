//! k-Linkage: paths satisfying terminal requests, disjoint away from terminals,
//! covering an exact number of vertices. Includes the exact solver used as the
//! kernel oracle, a brute-force reference and call accounting.

mod brute;
mod selfreduce;
mod solver;

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{Graph, Path, VertexId, VertexSet};

pub use brute::{brute_force_linkage, brute_force_linkage_capped, BRUTE_FORCE_CAP};
pub use selfreduce::{decision_to_witness, SelfReducingOracle, SelfReduction};
pub use solver::{solve_linkage, solve_linkage_with_budget, DEFAULT_BUDGET};

/// A set of at most two terminals, kept sorted.
pub type Request = Vec<VertexId>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkageInstance {
    pub graph: Graph,
    pub k_prime: usize,
    pub terminals: VertexSet,
    pub requests: Vec<Request>,
}

impl LinkageInstance {
    /// Builds and checks an instance. Requests are sorted internally.
    pub fn new(graph: Graph, k_prime: usize, terminals: VertexSet, requests: Vec<Request>) -> Result<Self> {
        let requests = requests
            .into_iter()
            .map(|mut r| {
                r.sort_unstable();
                r
            })
            .collect();
        let inst = Self { graph, k_prime, terminals, requests };
        inst.check()?;
        Ok(inst)
    }

    /// The instance asking for a k-path in `g`.
    pub fn k_path(g: Graph, k: usize) -> Self {
        Self { graph: g, k_prime: k, terminals: VertexSet::new(), requests: vec![Vec::new()] }
    }

    pub fn check(&self) -> Result<()> {
        if let Some(t) = self.terminals.iter().find(|t| !self.graph.contains(**t)) {
            return invalid(format!("terminal {t} is not a vertex"));
        }
        for (i, r) in self.requests.iter().enumerate() {
            if r.len() > 2 {
                return invalid(format!("request {i} has {} terminals", r.len()));
            }
            if r.len() == 2 && r[0] == r[1] {
                return invalid(format!("request {i} repeats a terminal"));
            }
            if let Some(t) = r.iter().find(|t| !self.terminals.contains(t)) {
                return invalid(format!("request {i} names {t}, which is not a terminal"));
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// Terminals named by some request.
    pub fn requested(&self) -> VertexSet {
        self.requests.iter().flatten().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkageSolution {
    pub paths: Vec<Path>,
}

impl LinkageSolution {
    pub fn vertices(&self) -> VertexSet {
        self.paths.iter().flat_map(|p| p.vertices().iter().copied()).collect()
    }
}

/// Why `sol` fails `inst`, or `Ok(())`.
pub fn check_solution(inst: &LinkageInstance, sol: &LinkageSolution) -> std::result::Result<(), String> {
    if sol.paths.len() != inst.requests.len() {
        return Err(format!("{} paths for {} requests", sol.paths.len(), inst.requests.len()));
    }
    let mut owner: std::collections::BTreeMap<VertexId, usize> = Default::default();
    for (i, (p, r)) in sol.paths.iter().zip(&inst.requests).enumerate() {
        if !p.is_valid_in(&inst.graph) {
            return Err(format!("path {i} is not a simple path of the graph"));
        }
        let on_path: VertexSet = p.vertices().iter().copied().filter(|v| inst.terminals.contains(v)).collect();
        let wanted: VertexSet = r.iter().copied().collect();
        if on_path != wanted {
            return Err(format!("path {i} meets terminals {on_path:?}, request is {wanted:?}"));
        }
        if let Some(t) = on_path.iter().find(|t| !p.is_endpoint(**t)) {
            return Err(format!("terminal {t} is internal to path {i}"));
        }
        for v in p.vertices().iter().filter(|v| !inst.terminals.contains(v)) {
            if let Some(j) = owner.insert(*v, i) {
                return Err(format!("non-terminal {v} lies on paths {j} and {i}"));
            }
        }
    }
    let union = sol.vertices().len();
    if union != inst.k_prime {
        return Err(format!("paths cover {union} vertices, k' = {}", inst.k_prime));
    }
    Ok(())
}

pub fn validate_solution(inst: &LinkageInstance, sol: &LinkageSolution) -> bool {
    check_solution(inst, sol).is_ok()
}

/// A witness-producing k-Linkage oracle.
pub trait LinkageOracle: Send + Sync {
    fn solve(&self, inst: &LinkageInstance) -> Result<Option<LinkageSolution>>;
}

impl<T: LinkageOracle + ?Sized> LinkageOracle for &T {
    fn solve(&self, inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
        (**self).solve(inst)
    }
}

impl<T: LinkageOracle + ?Sized> LinkageOracle for Box<T> {
    fn solve(&self, inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
        (**self).solve(inst)
    }
}

impl<T: LinkageOracle + ?Sized> LinkageOracle for Arc<T> {
    fn solve(&self, inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
        (**self).solve(inst)
    }
}

/// A yes/no k-Linkage oracle.
pub trait LinkageDecider: Send + Sync {
    fn decide(&self, inst: &LinkageInstance) -> Result<bool>;
}

impl<T: LinkageOracle + ?Sized> LinkageDecider for T {
    fn decide(&self, inst: &LinkageInstance) -> Result<bool> {
        Ok(self.solve(inst)?.is_some())
    }
}

/// The branch-and-bound solver as an oracle.
#[derive(Clone, Copy, Debug)]
pub struct ExactSolver {
    pub budget: u64,
}

impl Default for ExactSolver {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET }
    }
}

impl LinkageOracle for ExactSolver {
    fn solve(&self, inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
        solve_linkage_with_budget(inst, self.budget)
    }
}

/// Exhaustive enumeration as an oracle; refuses graphs above `cap` vertices.
#[derive(Clone, Copy, Debug)]
pub struct BruteForce {
    pub cap: usize,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self { cap: BRUTE_FORCE_CAP }
    }
}

impl LinkageOracle for BruteForce {
    fn solve(&self, inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
        brute_force_linkage_capped(inst, self.cap)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CallRecord {
    pub vertices: usize,
    pub k_prime: usize,
    pub requests: usize,
    pub answer: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    pub calls: u64,
    pub max_instance_vertices: usize,
    pub per_call_log: Vec<CallRecord>,
}

impl OracleStats {
    pub fn record(&mut self, rec: CallRecord) {
        self.calls += 1;
        self.max_instance_vertices = self.max_instance_vertices.max(rec.vertices);
        self.per_call_log.push(rec);
    }

    pub fn yes_answers(&self) -> usize {
        self.per_call_log.iter().filter(|c| c.answer).count()
    }

    pub fn merge(&mut self, other: &OracleStats) {
        for rec in &other.per_call_log {
            self.record(rec.clone());
        }
    }
}

/// Decorates an oracle with call accounting. Clones share the same counters.
#[derive(Clone, Debug)]
pub struct CountingOracle<O> {
    inner: O,
    stats: Arc<Mutex<OracleStats>>,
}

impl<O: LinkageOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, stats: Arc::default() }
    }

    pub fn stats(&self) -> OracleStats {
        self.stats.lock().expect("stats lock poisoned").clone()
    }

    pub fn reset(&self) -> OracleStats {
        std::mem::take(&mut *self.stats.lock().expect("stats lock poisoned"))
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: LinkageOracle> LinkageOracle for CountingOracle<O> {
    fn solve(&self, inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
        let out = self.inner.solve(inst)?;
        let rec = CallRecord {
            vertices: inst.num_vertices(),
            k_prime: inst.k_prime,
            requests: inst.requests.len(),
            answer: out.is_some(),
        };
        self.stats.lock().expect("stats lock poisoned").record(rec);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{vset, VertexId};

    fn path(ids: &[u32]) -> Path {
        Path(ids.iter().map(|&i| VertexId(i)).collect())
    }

    #[test]
    fn instance_checks() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(LinkageInstance::new(g.clone(), 2, vset([0]), vec![vec![VertexId(1)]]).is_err());
        assert!(LinkageInstance::new(g.clone(), 2, vset([7]), vec![]).is_err());
        let inst = LinkageInstance::new(g, 3, vset([0, 2]), vec![vec![VertexId(2), VertexId(0)]]).unwrap();
        assert_eq!(inst.requests[0], vec![VertexId(0), VertexId(2)]);
    }

    #[test]
    fn validation_catches_violations() {
        // 0 - 1 - 2 - 3 with terminals {0, 3}
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let shared =
            LinkageInstance::new(g.clone(), 3, vset([0, 3]), vec![vec![VertexId(0)], vec![VertexId(0)]]).unwrap();
        let bad = LinkageSolution { paths: vec![path(&[0, 1]), path(&[0, 1, 2])] };
        assert!(!validate_solution(&shared, &bad));

        // request {0, 2} answered with 0 as an internal vertex
        let g = Graph::from_edges(4, &[(0, 1), (0, 3), (3, 2)]).unwrap();
        let inst =
            LinkageInstance::new(g, 4, vset([0, 2]), vec![vec![VertexId(0), VertexId(2)]]).unwrap();
        let bad = LinkageSolution { paths: vec![path(&[1, 0, 3, 2])] };
        assert!(!validate_solution(&inst, &bad));
        let good = LinkageSolution { paths: vec![path(&[0, 3, 2])] };
        assert!(!validate_solution(&inst, &good), "covers 3, not 4");
        let inst3 = LinkageInstance { k_prime: 3, ..inst };
        assert!(validate_solution(&inst3, &good));
    }

    #[test]
    fn counting_oracle_accounts() {
        let oracle = CountingOracle::new(ExactSolver::default());
        for n in [5u32, 9, 7] {
            let g = Graph::from_edges(n, &[]).unwrap();
            oracle.solve(&LinkageInstance::k_path(g, 1)).unwrap();
        }
        let s = oracle.stats();
        assert_eq!(s.calls, 3);
        assert_eq!(s.max_instance_vertices, 9);
        assert_eq!(s.yes_answers(), 3);
        let shared = oracle.clone();
        shared.solve(&LinkageInstance::k_path(Graph::new(), 1)).unwrap();
        assert_eq!(oracle.stats().calls, 4);
    }

    #[test]
    fn json_round_trip_is_one_based() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let inst = LinkageInstance::new(g, 2, vset([0, 1]), vec![vec![VertexId(0), VertexId(1)]]).unwrap();
        let text = serde_json::to_string(&inst).unwrap();
        assert!(text.contains("\"terminals\":[1,2]"), "{text}");
        let back: LinkageInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, inst);
    }
}
