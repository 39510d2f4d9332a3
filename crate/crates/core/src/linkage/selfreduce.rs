use std::collections::BTreeMap;

use super::{check_solution, LinkageDecider, LinkageInstance, LinkageOracle, LinkageSolution, Request};
use crate::error::{Error, Result};
use crate::graph::{Path, VertexId, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfReduction {
    pub solution: Option<LinkageSolution>,
    pub decision_calls: usize,
}

/// Recover paths from a yes/no oracle.
///
/// Edges are dropped one at a time while the answer stays yes, then isolated
/// vertices outside the requests. Every solution of the resulting minimal graph
/// uses all of it, so the paths can be read off by cutting at terminals. Uses at
/// most `1 + |E| + |V|` decisions.
pub fn decision_to_witness(decider: &dyn LinkageDecider, inst: &LinkageInstance) -> Result<SelfReduction> {
    inst.check()?;
    let mut calls = 1;
    if !decider.decide(inst)? {
        return Ok(SelfReduction { solution: None, decision_calls: calls });
    }
    let mut cur = inst.clone();
    for (u, v) in inst.graph.edges() {
        cur.graph.remove_edge(u, v);
        calls += 1;
        if !decider.decide(&cur)? {
            cur.graph.add_edge(u, v)?;
        }
    }
    let requested = inst.requested();
    let isolated: Vec<VertexId> =
        cur.graph.vertices().filter(|v| cur.graph.degree(*v) == 0 && !requested.contains(v)).collect();
    for v in isolated {
        let mut trial = cur.clone();
        trial.graph.remove_vertex(v);
        trial.terminals.remove(&v);
        calls += 1;
        if decider.decide(&trial)? {
            cur = trial;
        }
    }
    let solution = read_off(&cur)?;
    if let Err(why) = check_solution(inst, &solution) {
        return Err(Error::OracleFault(format!("reconstructed paths are invalid: {why}")));
    }
    Ok(SelfReduction { solution: Some(solution), decision_calls: calls })
}

/// Cut a minimal yes-graph into segments at terminals and hand them to the
/// requests with matching terminal sets.
fn read_off(inst: &LinkageInstance) -> Result<LinkageSolution> {
    let g = &inst.graph;
    let is_term = |v: &VertexId| inst.terminals.contains(v);
    let mut segments: BTreeMap<Request, Vec<Path>> = BTreeMap::new();
    let mut push = |seq: Vec<VertexId>| {
        let mut key: Request = seq.iter().copied().filter(|v| is_term(v)).collect();
        key.sort_unstable();
        segments.entry(key).or_default().push(Path(seq));
    };

    // terminal-to-terminal edges
    for (u, v) in g.edges() {
        if is_term(&u) && is_term(&v) {
            push(vec![u, v]);
        }
    }
    // runs of non-terminals with whatever terminals hang off their ends
    let inner: VertexSet = g.vertices().filter(|v| !is_term(v)).collect();
    for comp in g.components_within(Some(&inner)) {
        let ends: Vec<VertexId> = comp
            .iter()
            .copied()
            .filter(|v| g.neighbors(*v).filter(|w| comp.contains(w)).count() <= 1)
            .collect();
        let Some(&start) = ends.first() else {
            return Err(Error::OracleFault("minimal graph contains a cycle of non-terminals".into()));
        };
        let mut seq = vec![start];
        let mut prev = None;
        let mut cur = start;
        while let Some(next) = g.neighbors(cur).find(|w| comp.contains(w) && Some(*w) != prev) {
            prev = Some(cur);
            cur = next;
            seq.push(cur);
        }
        if seq.len() != comp.len() {
            return Err(Error::OracleFault("non-terminal component is not a path".into()));
        }
        let first = seq[0];
        let last = *seq.last().unwrap();
        let head: Vec<VertexId> = g.neighbors(first).filter(|w| is_term(w)).collect();
        let tail: Vec<VertexId> = g.neighbors(last).filter(|w| is_term(w)).collect();
        let (head, tail) = if seq.len() == 1 {
            match head.as_slice() {
                [] => (None, None),
                [a] => (Some(*a), None),
                [a, b] => (Some(*a), Some(*b)),
                _ => return Err(Error::OracleFault("non-terminal touches three terminals".into())),
            }
        } else {
            if head.len() > 1 || tail.len() > 1 {
                return Err(Error::OracleFault("segment end touches two terminals".into()));
            }
            (head.first().copied(), tail.first().copied())
        };
        let mut full = Vec::with_capacity(seq.len() + 2);
        full.extend(head);
        full.extend(seq);
        full.extend(tail);
        push(full);
    }

    let mut paths = Vec::with_capacity(inst.requests.len());
    for r in &inst.requests {
        let path = match segments.get_mut(r).and_then(|v| v.pop()) {
            Some(p) => p,
            None => match r.as_slice() {
                [u] => Path(vec![*u]),
                [u, v] if g.has_edge(*u, *v) => Path(vec![*u, *v]),
                _ => return Err(Error::OracleFault(format!("no segment left for request {r:?}"))),
            },
        };
        paths.push(path);
    }
    if let Some((r, _)) = segments.iter().find(|(_, v)| !v.is_empty()) {
        return Err(Error::OracleFault(format!("unused segment with terminals {r:?}")));
    }
    Ok(LinkageSolution { paths })
}

/// A witness oracle built from a decision oracle by self-reduction.
pub struct SelfReducingOracle<D> {
    pub decider: D,
}

impl<D: LinkageDecider> LinkageOracle for SelfReducingOracle<D> {
    fn solve(&self, inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
        Ok(decision_to_witness(&self.decider, inst)?.solution)
    }
}
