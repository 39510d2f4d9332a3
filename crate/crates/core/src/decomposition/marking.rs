use std::collections::BTreeMap;

use serde::Serialize;

use super::{NodeId, NodeSet, TreeDecomposition};
use crate::error::{invalid, not_applicable, Result};
use crate::graph::VertexSet;

/// `b1 ∪ {root} ∪ {lca(s, t) : s, t ∈ b1}`.
pub fn lca_closure(td: &TreeDecomposition, b1: &NodeSet) -> Result<NodeSet> {
    if let Some(t) = b1.iter().find(|t| !td.contains_node(**t)) {
        return invalid(format!("node {t:?} is not in the tree"));
    }
    let mut out = b1.clone();
    out.insert(td.root());
    let marked: Vec<NodeId> = b1.iter().copied().collect();
    for (i, &a) in marked.iter().enumerate() {
        for &b in &marked[i + 1..] {
            out.insert(td.lca(a, b));
        }
    }
    Ok(out)
}

fn is_lca_closed(td: &TreeDecomposition, set: &NodeSet) -> bool {
    let v: Vec<NodeId> = set.iter().copied().collect();
    v.iter()
        .enumerate()
        .all(|(i, &a)| v[i + 1..].iter().all(|&b| set.contains(&td.lca(a, b))))
}

/// A class of tree edges that are pairwise joined by paths avoiding marked
/// nodes as internal vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeComponent {
    /// Edges as `(parent, child)`.
    pub edges: Vec<(NodeId, NodeId)>,
    pub nodes: NodeSet,
    /// Marked nodes of the component.
    pub anchors: NodeSet,
    /// The node of the component closest to the root.
    pub top: NodeId,
}

impl EdgeComponent {
    /// Children of `t` reachable through an edge of this component.
    pub fn children_of(&self, td: &TreeDecomposition, t: NodeId) -> Vec<NodeId> {
        td.children(t)
            .iter()
            .copied()
            .filter(|c| self.edges.iter().any(|&(p, ch)| p == t && ch == *c))
            .collect()
    }

    pub fn vertices(&self, td: &TreeDecomposition) -> VertexSet {
        td.bags_union(self.nodes.iter().copied())
    }
}

/// Partition the tree edges into components with respect to the marked set `b2`,
/// which must contain the root and be closed under lowest common ancestors.
pub fn edge_components(td: &TreeDecomposition, b2: &NodeSet) -> Result<Vec<EdgeComponent>> {
    if !b2.contains(&td.root()) {
        return invalid("marked set must contain the root");
    }
    if let Some(t) = b2.iter().find(|t| !td.contains_node(**t)) {
        return invalid(format!("node {t:?} is not in the tree"));
    }
    if !is_lca_closed(td, b2) {
        return invalid("marked set is not closed under lowest common ancestors");
    }
    // every non-root node names its parent edge; union edges through unmarked nodes
    let mut uf: Vec<usize> = (0..td.len()).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut x = x;
        while uf[x] != r {
            let next = uf[x];
            uf[x] = r;
            x = next;
        }
        r
    }
    for t in td.node_ids() {
        if b2.contains(&t) {
            continue;
        }
        let mut incident: Vec<usize> = td.children(t).iter().map(|c| c.0).collect();
        if td.parent(t).is_some() {
            incident.push(t.0);
        }
        for w in incident.windows(2) {
            let (a, b) = (find(&mut uf, w[0]), find(&mut uf, w[1]));
            uf[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, Vec<(NodeId, NodeId)>> = BTreeMap::new();
    for (p, c) in td.tree_edges() {
        let r = find(&mut uf, c.0);
        groups.entry(r).or_default().push((p, c));
    }
    let mut out: Vec<EdgeComponent> = groups
        .into_values()
        .map(|edges| {
            let nodes: NodeSet = edges.iter().flat_map(|&(p, c)| [p, c]).collect();
            let anchors = nodes.iter().copied().filter(|t| b2.contains(t)).collect();
            let top = *nodes.iter().min_by_key(|t| (td.depth(**t), t.0)).unwrap();
            EdgeComponent { edges, nodes, anchors, top }
        })
        .collect();
    out.sort_by_key(|c| c.edges[0]);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeavyNode {
    pub t0: NodeId,
    /// Component nodes in the subtree of `t0`.
    pub d: NodeSet,
    /// `X(D)`.
    pub vertices: VertexSet,
}

/// Lowest node `t0` of `component` whose component-subtree bags hold more than
/// `m` vertices. Candidates are scanned in post-order, so the first hit is minimal.
pub fn lowest_heavy_node(td: &TreeDecomposition, component: &EdgeComponent, m: usize) -> Result<HeavyNode> {
    if component.vertices(td).len() <= m {
        return not_applicable(format!("component holds at most {m} vertices"));
    }
    let mut below: BTreeMap<NodeId, (NodeSet, VertexSet)> = BTreeMap::new();
    let mut stack = vec![(component.top, false)];
    while let Some((t, expanded)) = stack.pop() {
        let kids = component.children_of(td, t);
        if !expanded {
            stack.push((t, true));
            for &c in kids.iter().rev() {
                stack.push((c, false));
            }
            continue;
        }
        let mut d = NodeSet::from([t]);
        let mut xs = td.bag(t).clone();
        for c in kids {
            let (cd, cx) = below.remove(&c).expect("child visited first");
            d.extend(cd);
            xs.extend(cx);
        }
        if xs.len() > m {
            return Ok(HeavyNode { t0: t, d, vertices: xs });
        }
        below.insert(t, (d, xs));
    }
    unreachable!("the top node covers the whole component")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vset;

    fn nodes(ids: &[usize]) -> NodeSet {
        ids.iter().map(|&i| NodeId(i)).collect()
    }

    /// 0 - 1 - 2 - 3 - 4 as a rooted path.
    fn chain(bags: Vec<VertexSet>) -> TreeDecomposition {
        let edges: Vec<_> = (1..bags.len()).map(|i| (i - 1, i)).collect();
        TreeDecomposition::from_parts(bags, &edges, 0).unwrap()
    }

    #[test]
    fn closure_examples() {
        let td = TreeDecomposition::from_parts(vec![VertexSet::new(); 3], &[(0, 1), (0, 2)], 0).unwrap();
        assert_eq!(lca_closure(&td, &nodes(&[0])).unwrap(), nodes(&[0]));
        assert_eq!(lca_closure(&td, &nodes(&[1, 2])).unwrap(), nodes(&[0, 1, 2]));
        assert_eq!(lca_closure(&td, &NodeSet::new()).unwrap(), nodes(&[0]));
        assert!(lca_closure(&td, &nodes(&[9])).is_err());
    }

    #[test]
    fn components_examples() {
        let td = chain(vec![VertexSet::new(); 5]);
        let one = edge_components(&td, &nodes(&[0])).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].edges.len(), 4);
        assert_eq!(one[0].anchors, nodes(&[0]));

        let all = edge_components(&td, &nodes(&[0, 1, 2, 3, 4])).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|c| c.edges.len() == 1));

        // caterpillar: spine 0-1-2-3, legs 4 (on 1) and 5 (on 3)
        let cat = TreeDecomposition::from_parts(
            vec![VertexSet::new(); 6],
            &[(0, 1), (1, 2), (2, 3), (1, 4), (3, 5)],
            0,
        )
        .unwrap();
        let split = edge_components(&cat, &nodes(&[0, 2])).unwrap();
        assert_eq!(split.len(), 2);
        let sizes: Vec<usize> = split.iter().map(|c| c.edges.len()).collect();
        assert_eq!(sizes, vec![3, 2]);
        assert_eq!(split[1].top, NodeId(2));
        assert_eq!(split[1].anchors, nodes(&[2]));
        assert!(edge_components(&cat, &nodes(&[1])).is_err());
        assert!(edge_components(&cat, &nodes(&[0, 3, 4])).is_err());
    }

    #[test]
    fn heavy_node_on_chain_of_unit_bags() {
        let td = chain((0..6).map(|i| vset([i])).collect());
        let comp = edge_components(&td, &nodes(&[0])).unwrap().remove(0);
        let h = lowest_heavy_node(&td, &comp, 3).unwrap();
        // leaves are at the bottom: nodes 5,4,3,2 form the first set of size 4
        assert_eq!(h.t0, NodeId(2));
        assert_eq!(h.vertices.len(), 4);
        assert!(lowest_heavy_node(&td, &comp, 6).is_err());
    }

    #[test]
    fn heavy_node_binary_union() {
        // the marked root splits its child edges, so hang the fork below node 1
        let td = TreeDecomposition::from_parts(
            vec![vset([9]), vset([0]), vset([1, 2]), vset([3, 4])],
            &[(0, 1), (1, 2), (1, 3)],
            0,
        )
        .unwrap();
        let comp = edge_components(&td, &nodes(&[0])).unwrap().remove(0);
        let h = lowest_heavy_node(&td, &comp, 3).unwrap();
        assert_eq!(h.t0, NodeId(1));
        assert_eq!(h.d, nodes(&[1, 2, 3]));
        let only_top = lowest_heavy_node(&td, &comp, 5).unwrap();
        assert_eq!(only_top.t0, NodeId(0));
    }
}
