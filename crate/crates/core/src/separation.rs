//! Separations `(A, B)` of small order with `p < |A|` bounded above, either read
//! off a tree decomposition or found by enumerating small separators.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::decomposition::{raw_stats, restrict, validate, NodeId, TreeDecomposition};
use crate::error::{invalid, not_applicable, Result};
use crate::graph::{Graph, Path, Separation, VertexId, VertexSet};
use crate::util::for_each_subset_up_to;

/// Largest number of separator candidates the trivial oracle will enumerate.
pub const TRIVIAL_SEPARATOR_BUDGET: u128 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationBranch {
    /// One-node decomposition: `(V, V)`.
    SingleBag,
    /// Every adhesion group below `t0` is light: `A = X(T_t0)`.
    WholeSubtree,
    /// One heavy adhesion group, assembled greedily.
    GreedyGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionSeparation {
    pub separation: Separation,
    pub branch: SeparationBranch,
    pub t0: NodeId,
    /// `w + p·a` with `w = width + 1` and `a = max(2, adhesion degree)`.
    pub cap: usize,
    /// Tree nodes touched while searching for `t0`.
    pub node_visits: usize,
}

/// A separation of order at most the adhesion with `p < |A| ≤ w + p·a`.
pub fn separation_from_decomposition(g: &Graph, td: &TreeDecomposition, p: usize) -> Result<DecompositionSeparation> {
    let report = validate(g, td);
    if let Some(v) = report.violations.first() {
        return invalid(format!("invalid tree decomposition: {v:?}"));
    }
    let n = g.num_vertices();
    if n <= p {
        return not_applicable(format!("graph has {n} ≤ p = {p} vertices"));
    }
    let st = raw_stats(td);
    let w = st.width + 1;
    let a = st.adhesion_degree.max(2);
    let cap = w + p * a;
    if td.len() == 1 {
        let all = g.vertex_set();
        return Ok(DecompositionSeparation {
            separation: Separation::new(all.clone(), all),
            branch: SeparationBranch::SingleBag,
            t0: td.root(),
            cap,
            node_visits: 1,
        });
    }

    // bottom-up subtree vertex sets until the first heavy node
    let mut below: BTreeMap<NodeId, VertexSet> = BTreeMap::new();
    let mut visits = 0;
    let mut t0 = None;
    for t in td.post_order() {
        visits += 1;
        let mut xs = td.bag(t).clone();
        for c in td.children(t) {
            xs.extend(below[c].iter().copied());
        }
        let heavy = xs.len() > p;
        below.insert(t, xs);
        if heavy {
            t0 = Some(t);
            break;
        }
    }
    let t0 = t0.expect("the root covers all vertices");

    let mut groups: BTreeMap<Vec<VertexId>, Vec<NodeId>> = BTreeMap::new();
    for &c in td.children(t0) {
        let adhesion: Vec<VertexId> = td.bag(t0).intersection(td.bag(c)).copied().collect();
        groups.entry(adhesion).or_default().push(c);
    }
    let heavy_group = groups.values().find(|kids| {
        let vs: VertexSet = kids.iter().flat_map(|c| below[c].iter().copied()).collect();
        vs.len() > p
    });

    let (separation, branch) = match heavy_group {
        None => {
            let side_a = below[&t0].clone();
            let inside: std::collections::BTreeSet<NodeId> = td.subtree_nodes(t0).into_iter().collect();
            let side_b = td.bags_union(td.node_ids().filter(|t| !inside.contains(t)));
            (Separation::new(side_a, side_b), SeparationBranch::WholeSubtree)
        }
        Some(kids) => {
            let mut kids = kids.clone();
            kids.sort_by_key(|c| (below[c].len(), c.0));
            let mut side_a = VertexSet::new();
            for c in kids {
                side_a.extend(below[&c].iter().copied());
                if side_a.len() > p {
                    break;
                }
            }
            let rest: VertexSet = g.vertex_set().difference(&side_a).copied().collect();
            let side_b = g.closed_neighborhood(&rest)?;
            (Separation::new(side_a, side_b), SeparationBranch::GreedyGroup)
        }
    };
    Ok(DecompositionSeparation { separation, branch, t0, cap, node_visits: visits })
}

fn binomial_prefix_sum(n: usize, h: usize) -> u128 {
    let mut total = 0u128;
    let mut term = 1u128;
    for i in 0..=h.min(n) {
        total = total.saturating_add(term);
        term = term.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    total
}

/// Try every separator `X` with `|X| ≤ h`, and assemble `A \ X` from whole
/// components of `G − X` so that `p < |A| ≤ q_cap`.
pub fn trivial_separation_oracle(g: &Graph, h: usize, p: usize, q_cap: usize) -> Result<Option<Separation>> {
    let n = g.num_vertices();
    let work = binomial_prefix_sum(n, h);
    if work > TRIVIAL_SEPARATOR_BUDGET {
        return not_applicable(format!("{work} separator candidates exceed the budget"));
    }
    let verts: Vec<VertexId> = g.vertices().collect();
    let mut found = None;
    for_each_subset_up_to(n, h, |idx| {
        let sep: VertexSet = idx.iter().map(|&i| verts[i]).collect();
        let rest: VertexSet = g.vertex_set().difference(&sep).copied().collect();
        let comps = g.components_within(Some(&rest));
        let lo = (p + 1).saturating_sub(sep.len());
        let Some(hi) = q_cap.checked_sub(sep.len()) else {
            return true;
        };
        if lo > hi {
            return true;
        }
        // subset sum over component sizes, remembering which component reached each total
        let total: usize = comps.iter().map(|c| c.len()).sum();
        let mut from: Vec<Option<(usize, usize)>> = vec![None; total + 1];
        let mut reach = vec![false; total + 1];
        reach[0] = true;
        for (ci, c) in comps.iter().enumerate() {
            for s in (c.len()..=total).rev() {
                if !reach[s] && reach[s - c.len()] {
                    reach[s] = true;
                    from[s] = Some((ci, s - c.len()));
                }
            }
        }
        let Some(target) = (lo..=hi.min(total)).find(|&s| reach[s]) else {
            return true;
        };
        let mut side_a = sep.clone();
        let mut s = target;
        while let Some((ci, prev)) = from[s] {
            side_a.extend(comps[ci].iter().copied());
            s = prev;
        }
        let strict_a: VertexSet = side_a.difference(&sep).copied().collect();
        let side_b: VertexSet = g.vertex_set().difference(&strict_a).copied().collect();
        found = Some(Separation::new(side_a, side_b));
        false
    });
    Ok(found)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparationOutcome {
    Found(Separation),
    /// The provider found a k-path on its own.
    HasKPath(Path),
    NotApplicable(String),
}

/// A source of separations for the kernel loop.
pub trait SeparationProvider {
    /// Largest order of a returned separation.
    fn order_bound(&self) -> usize;
    /// Upper bound on `|A|` for a request with threshold `p`.
    fn size_cap(&self, p: usize) -> usize;
    fn find(&mut self, g: &Graph, k: usize, p: usize) -> Result<SeparationOutcome>;
    /// Called after vertices have been deleted from the graph.
    fn graph_changed(&mut self, _g: &Graph) {}
}

/// Separations read off a fixed tree decomposition, restricted as vertices go.
/// Falls back to separator enumeration when the decomposition is a single bag.
#[derive(Clone, Debug)]
pub struct DecompositionProvider {
    td: TreeDecomposition,
    h: usize,
    w: usize,
    a: usize,
    pub fallback_trivial: bool,
}

impl DecompositionProvider {
    pub fn new(g: &Graph, td: TreeDecomposition) -> Result<Self> {
        let st = crate::decomposition::stats(g, &td)?;
        Ok(Self { h: st.adhesion.max(1), w: st.width + 1, a: st.adhesion_degree.max(2), td, fallback_trivial: true })
    }

    pub fn decomposition(&self) -> &TreeDecomposition {
        &self.td
    }
}

impl SeparationProvider for DecompositionProvider {
    fn order_bound(&self) -> usize {
        self.h
    }

    fn size_cap(&self, p: usize) -> usize {
        self.w + p * self.a
    }

    fn find(&mut self, g: &Graph, _k: usize, p: usize) -> Result<SeparationOutcome> {
        if g.num_vertices() <= p {
            return Ok(SeparationOutcome::NotApplicable(format!("graph has at most p = {p} vertices")));
        }
        let out = separation_from_decomposition(g, &self.td, p)?;
        if out.separation.order() <= self.h {
            return Ok(SeparationOutcome::Found(out.separation));
        }
        if self.fallback_trivial {
            if let Ok(Some(sep)) = trivial_separation_oracle(g, self.h, p, self.size_cap(p)) {
                return Ok(SeparationOutcome::Found(sep));
            }
        }
        Ok(SeparationOutcome::NotApplicable("decomposition too coarse".into()))
    }

    fn graph_changed(&mut self, g: &Graph) {
        self.td = restrict(&self.td, &g.vertex_set());
    }
}

/// Separator enumeration with `q(k, p) = 2p + h`.
#[derive(Clone, Copy, Debug)]
pub struct TrivialProvider {
    pub h: usize,
}

impl SeparationProvider for TrivialProvider {
    fn order_bound(&self) -> usize {
        self.h
    }

    fn size_cap(&self, p: usize) -> usize {
        2 * p + self.h
    }

    fn find(&mut self, g: &Graph, _k: usize, p: usize) -> Result<SeparationOutcome> {
        match trivial_separation_oracle(g, self.h, p, self.size_cap(p))? {
            Some(sep) => Ok(SeparationOutcome::Found(sep)),
            None => Ok(SeparationOutcome::NotApplicable("no separation of the requested size".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::compute_decomposition;
    use crate::graph::{check_separation, vset};

    fn path_graph(n: u32) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn assert_contract(g: &Graph, out: &DecompositionSeparation, p: usize, h: usize) {
        let s = &out.separation;
        assert!(check_separation(g, &s.side_a, &s.side_b));
        assert!(s.order() <= h.max(if out.branch == SeparationBranch::SingleBag { g.num_vertices() } else { 0 }));
        assert!(s.side_a.len() > p && s.side_a.len() <= out.cap);
    }

    #[test]
    fn path_decomposition() {
        let g = path_graph(6);
        let bags: Vec<_> = (0..5).map(|i| vset([i, i + 1])).collect();
        let edges: Vec<_> = (1..5).map(|i| (i - 1, i)).collect();
        let td = TreeDecomposition::from_parts(bags, &edges, 0).unwrap();
        let out = separation_from_decomposition(&g, &td, 2).unwrap();
        assert_contract(&g, &out, 2, 1);
        assert!((3..=4).contains(&out.separation.side_a.len()));
        assert!(out.separation.order() <= 1);
    }

    #[test]
    fn star_decomposition() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let bags = vec![vset([0]), vset([0, 1]), vset([0, 2]), vset([0, 3]), vset([0, 4]), vset([0, 5])];
        let td = TreeDecomposition::from_parts(bags, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)], 0).unwrap();
        // with p = 1 a single leaf bag is already heavy
        let leaf = separation_from_decomposition(&g, &td, 1).unwrap();
        assert_eq!(leaf.branch, SeparationBranch::WholeSubtree);
        assert_contract(&g, &leaf, 1, 1);
        let out = separation_from_decomposition(&g, &td, 2).unwrap();
        assert_eq!(out.branch, SeparationBranch::GreedyGroup);
        assert_contract(&g, &out, 2, 1);
        assert_eq!(out.separation.side_a.len(), 3);
    }

    #[test]
    fn single_bag() {
        let g = path_graph(4);
        let td = TreeDecomposition::single_bag(g.vertex_set());
        let out = separation_from_decomposition(&g, &td, 2).unwrap();
        assert_eq!(out.branch, SeparationBranch::SingleBag);
        assert_eq!(out.separation.side_a, g.vertex_set());
        assert!(out.separation.order() <= 4);
        assert!(separation_from_decomposition(&g, &td, 4).is_err());
    }

    #[test]
    fn computed_decompositions() {
        let g = Graph::from_edges(8, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (5, 6), (6, 7)]).unwrap();
        let td = compute_decomposition(&g, None);
        let st = raw_stats(&td);
        for p in 0..8 {
            let out = separation_from_decomposition(&g, &td, p).unwrap();
            assert_contract(&g, &out, p, st.adhesion);
        }
    }

    #[test]
    fn trivial_oracle_examples() {
        let mut k5 = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                k5.push((u, v));
            }
        }
        let k5 = Graph::from_edges(5, &k5).unwrap();
        assert_eq!(trivial_separation_oracle(&k5, 1, 1, 4).unwrap(), None);

        // triangles {0,1,2} and {2,3,4} sharing vertex 2
        let bow = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let sep = trivial_separation_oracle(&bow, 1, 2, 4).unwrap().unwrap();
        assert_eq!(sep.separator(), vset([2]));
        assert_eq!(sep.side_a.len(), 3);
        assert!(check_separation(&bow, &sep.side_a, &sep.side_b));
    }

    #[test]
    fn trivial_provider_cap() {
        let g = path_graph(200);
        assert!(trivial_separation_oracle(&g, 4, 10, 30).is_err());
    }
}
