//! Rooted tree decompositions, their statistics and transforms.

pub mod io;
mod marking;
mod transform;
mod treewidth;
mod unbreakable;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::graph::{Graph, VertexId, VertexSet};

pub use marking::{edge_components, lca_closure, lowest_heavy_node, EdgeComponent, HeavyNode};
pub use transform::{binarize, make_connected, restrict};
pub use treewidth::{
    compute_decomposition, compute_decomposition_with, ComputedDecomposition, DecompositionOptions,
    DEFAULT_EXACT_CAP,
};
pub use unbreakable::{check_unbreakable, UNBREAKABLE_CAP};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

pub type NodeSet = BTreeSet<NodeId>;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    bag: VertexSet,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
}

/// A rooted tree of bags. The tree shape is always a valid rooted tree; whether the
/// bags form a decomposition of a particular graph is checked by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    nodes: Vec<Node>,
    root: NodeId,
}

impl TreeDecomposition {
    pub fn single_bag(bag: VertexSet) -> Self {
        Self { nodes: vec![Node { bag, parent: None, children: Vec::new() }], root: NodeId(0) }
    }

    /// Build from bags and undirected tree edges (indices into `bags`), rooted at `root`.
    pub fn from_parts(bags: Vec<VertexSet>, edges: &[(usize, usize)], root: usize) -> Result<Self> {
        let n = bags.len();
        if n == 0 {
            return invalid("a decomposition needs at least one node");
        }
        if root >= n {
            return invalid(format!("root {root} out of range"));
        }
        if edges.len() != n - 1 {
            return invalid(format!("{} edges cannot form a tree on {n} nodes", edges.len()));
        }
        let mut nbrs = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return invalid(format!("bad tree edge {a}-{b}"));
            }
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        let mut nodes: Vec<Node> =
            bags.into_iter().map(|bag| Node { bag, parent: None, children: Vec::new() }).collect();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(t) = queue.pop_front() {
            for &c in &nbrs[t] {
                if !seen[c] {
                    seen[c] = true;
                    nodes[c].parent = Some(NodeId(t));
                    nodes[t].children.push(NodeId(c));
                    queue.push_back(c);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return invalid("tree edges do not connect all nodes");
        }
        Ok(Self { nodes, root: NodeId(root) })
    }

    /// Build from bags and a parent array (`None` exactly at the root).
    pub(crate) fn from_parents(bags: Vec<VertexSet>, parents: &[Option<usize>]) -> Result<Self> {
        let roots: Vec<usize> = (0..parents.len()).filter(|&i| parents[i].is_none()).collect();
        if roots.len() != 1 {
            return invalid("parent array must have exactly one root");
        }
        let edges: Vec<(usize, usize)> =
            parents.iter().enumerate().filter_map(|(i, p)| p.map(|p| (p, i))).collect();
        Self::from_parts(bags, &edges, roots[0])
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, t: NodeId) -> bool {
        t.0 < self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn bag(&self, t: NodeId) -> &VertexSet {
        &self.nodes[t.0].bag
    }

    pub fn parent(&self, t: NodeId) -> Option<NodeId> {
        self.nodes[t.0].parent
    }

    pub fn children(&self, t: NodeId) -> &[NodeId] {
        &self.nodes[t.0].children
    }

    /// Tree edges as `(parent, child)`.
    pub fn tree_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.node_ids().filter_map(|t| self.parent(t).map(|p| (p, t))).collect()
    }

    pub fn tree_neighbors(&self, t: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.parent(t).into_iter().chain(self.children(t).iter().copied())
    }

    pub fn depth(&self, mut t: NodeId) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent(t) {
            t = p;
            d += 1;
        }
        d
    }

    /// Nodes in post-order (children before parents, children in stored order).
    pub fn post_order(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                out.push(t);
            } else {
                stack.push((t, true));
                for &c in self.children(t).iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn subtree_nodes(&self, t: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![t];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.children(x).iter().copied());
        }
        out
    }

    /// `X(T_t)`: union of bags in the subtree rooted at `t`.
    pub fn subtree_vertices(&self, t: NodeId) -> VertexSet {
        self.bags_union(self.subtree_nodes(t))
    }

    pub fn bags_union<I: IntoIterator<Item = NodeId>>(&self, nodes: I) -> VertexSet {
        let mut out = VertexSet::new();
        for t in nodes {
            out.extend(self.bag(t).iter().copied());
        }
        out
    }

    pub fn is_ancestor(&self, anc: NodeId, mut t: NodeId) -> bool {
        loop {
            if t == anc {
                return true;
            }
            match self.parent(t) {
                Some(p) => t = p,
                None => return false,
            }
        }
    }

    pub fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let ancestors: HashSet<NodeId> = {
            let mut s = HashSet::new();
            let mut t = a;
            s.insert(t);
            while let Some(p) = self.parent(t) {
                s.insert(p);
                t = p;
            }
            s
        };
        let mut t = b;
        while !ancestors.contains(&t) {
            t = self.parent(t).expect("nodes share the root");
        }
        t
    }

    pub fn max_children(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).max().unwrap_or(0)
    }

    /// Occurrence map: for each vertex, the nodes whose bag contains it.
    pub fn occurrences(&self) -> BTreeMap<VertexId, Vec<NodeId>> {
        let mut occ: BTreeMap<VertexId, Vec<NodeId>> = BTreeMap::new();
        for t in self.node_ids() {
            for &v in self.bag(t) {
                occ.entry(v).or_default().push(t);
            }
        }
        occ
    }
}

/// One violated decomposition axiom, with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    UnknownVertex(VertexId),
    UncoveredVertex(VertexId),
    UncoveredEdge(VertexId, VertexId),
    DisconnectedOccurrences(VertexId),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check all three decomposition axioms of `td` against `g`.
pub fn validate(g: &Graph, td: &TreeDecomposition) -> ValidationReport {
    let mut violations = Vec::new();
    let occ = td.occurrences();
    for &v in occ.keys() {
        if !g.contains(v) {
            violations.push(Violation::UnknownVertex(v));
        }
    }
    for v in g.vertices() {
        if !occ.contains_key(&v) {
            violations.push(Violation::UncoveredVertex(v));
        }
    }
    for (u, v) in g.edges() {
        let covered = occ
            .get(&u)
            .is_some_and(|ts| ts.iter().any(|&t| td.bag(t).contains(&v)));
        if !covered {
            violations.push(Violation::UncoveredEdge(u, v));
        }
    }
    for (&v, ts) in &occ {
        // occurrences form a subtree iff exactly one of them has its parent outside
        let tops = ts
            .iter()
            .filter(|&&t| td.parent(t).is_none_or(|p| !td.bag(p).contains(&v)))
            .count();
        if tops != 1 {
            violations.push(Violation::DisconnectedOccurrences(v));
        }
    }
    ValidationReport { violations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionStats {
    /// Largest bag size minus one (0 for decompositions with only empty bags).
    pub width: usize,
    pub adhesion: usize,
    pub adhesion_degree: usize,
}

fn require_valid(g: &Graph, td: &TreeDecomposition) -> Result<()> {
    let report = validate(g, td);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => invalid(format!("invalid tree decomposition: {v:?}")),
    }
}

pub fn stats(g: &Graph, td: &TreeDecomposition) -> Result<DecompositionStats> {
    require_valid(g, td)?;
    Ok(raw_stats(td))
}

/// Statistics of the tree shape alone, without checking the axioms.
pub fn raw_stats(td: &TreeDecomposition) -> DecompositionStats {
    let width = td.node_ids().map(|t| td.bag(t).len()).max().unwrap_or(0).saturating_sub(1);
    let adhesion_of = |a: NodeId, b: NodeId| -> VertexSet { td.bag(a).intersection(td.bag(b)).copied().collect() };
    let adhesion = td
        .tree_edges()
        .into_iter()
        .map(|(p, c)| td.bag(p).intersection(td.bag(c)).count())
        .max()
        .unwrap_or(0);
    let adhesion_degree = td
        .node_ids()
        .map(|t| {
            td.tree_neighbors(t)
                .map(|u| adhesion_of(t, u))
                .collect::<BTreeSet<_>>()
                .len()
        })
        .max()
        .unwrap_or(0);
    DecompositionStats { width, adhesion, adhesion_degree }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vset;

    #[test]
    fn validate_examples() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let single = TreeDecomposition::single_bag(g.vertex_set());
        assert!(validate(&g, &single).is_valid());
        assert_eq!(stats(&g, &single).unwrap(), DecompositionStats { width: 2, adhesion: 0, adhesion_degree: 0 });

        let td = TreeDecomposition::from_parts(vec![vset([0, 1]), vset([1, 2])], &[(0, 1)], 0).unwrap();
        assert!(validate(&g, &td).is_valid());
        assert_eq!(stats(&g, &td).unwrap(), DecompositionStats { width: 1, adhesion: 1, adhesion_degree: 1 });

        let bad = TreeDecomposition::from_parts(vec![vset([0, 1]), vset([2])], &[(0, 1)], 0).unwrap();
        let report = validate(&g, &bad);
        assert_eq!(report.violations, vec![Violation::UncoveredEdge(VertexId(1), VertexId(2))]);
        assert!(stats(&g, &bad).is_err());
    }

    #[test]
    fn disconnected_occurrences_detected() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(
            vec![vset([0, 1]), vset([1, 2]), vset([0])],
            &[(0, 1), (1, 2)],
            0,
        )
        .unwrap();
        assert_eq!(validate(&g, &td).violations, vec![Violation::DisconnectedOccurrences(VertexId(0))]);
    }

    #[test]
    fn star_adhesion_degree_counts_distinct_sets() {
        // root {0,1,2,3}; leaves {0,4},{0,5},{0,6}
        let g = Graph::from_edges(7, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6)]).unwrap();
        let td = TreeDecomposition::from_parts(
            vec![vset([0, 1, 2, 3]), vset([0, 4]), vset([0, 5]), vset([0, 6])],
            &[(0, 1), (0, 2), (0, 3)],
            0,
        )
        .unwrap();
        assert_eq!(stats(&g, &td).unwrap().adhesion_degree, 1);
    }

    #[test]
    fn tree_shape_errors() {
        assert!(TreeDecomposition::from_parts(vec![], &[], 0).is_err());
        assert!(TreeDecomposition::from_parts(vec![vset([0]), vset([1])], &[], 0).is_err());
        assert!(TreeDecomposition::from_parts(vec![vset([0]), vset([1]), vset([2])], &[(0, 1), (0, 1)], 0).is_err());
    }

    #[test]
    fn lca_and_orders() {
        let td = TreeDecomposition::from_parts(
            vec![VertexSet::new(); 5],
            &[(0, 1), (0, 2), (1, 3), (1, 4)],
            0,
        )
        .unwrap();
        assert_eq!(td.lca(NodeId(3), NodeId(4)), NodeId(1));
        assert_eq!(td.lca(NodeId(3), NodeId(2)), NodeId(0));
        assert_eq!(td.lca(NodeId(1), NodeId(4)), NodeId(1));
        let po = td.post_order();
        assert_eq!(po.last(), Some(&NodeId(0)));
        assert_eq!(po.len(), 5);
        assert_eq!(td.depth(NodeId(4)), 2);
    }
}
