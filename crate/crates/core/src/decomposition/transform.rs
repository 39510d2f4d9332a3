use std::collections::VecDeque;

use super::{require_valid, Node, NodeId, TreeDecomposition};
use crate::error::Result;
use crate::graph::{Graph, VertexSet};

/// Mutable arena used while rewriting a decomposition.
struct Arena {
    nodes: Vec<Node>,
}

impl Arena {
    fn push(&mut self, bag: VertexSet, parent: Option<NodeId>) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node { bag, parent, children: Vec::new() });
        if let Some(p) = parent {
            self.nodes[p.0].children.push(id);
        }
        id
    }

    fn subtree(&self, t: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![t];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.nodes[x.0].children.iter().copied());
        }
        out
    }

    fn subtree_vertices(&self, t: NodeId) -> VertexSet {
        let mut out = VertexSet::new();
        for x in self.subtree(t) {
            out.extend(self.nodes[x.0].bag.iter().copied());
        }
        out
    }

    /// Copy the subtree of `t` under `parent`, intersecting every bag with `keep`.
    fn clone_restricted(&mut self, t: NodeId, keep: &VertexSet, parent: NodeId) -> NodeId {
        let bag = self.nodes[t.0].bag.intersection(keep).copied().collect();
        let new = self.push(bag, Some(parent));
        let children = self.nodes[t.0].children.clone();
        for c in children {
            self.clone_restricted(c, keep, new);
        }
        new
    }

    /// Keep only nodes reachable from `root`, renumbered in breadth-first order.
    fn finish(self, root: NodeId) -> TreeDecomposition {
        let mut order = Vec::new();
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            order.push(t);
            queue.extend(self.nodes[t.0].children.iter().copied());
        }
        let mut index = vec![usize::MAX; self.nodes.len()];
        for (i, t) in order.iter().enumerate() {
            index[t.0] = i;
        }
        let nodes = order
            .iter()
            .map(|t| {
                let n = &self.nodes[t.0];
                Node {
                    bag: n.bag.clone(),
                    parent: n.parent.filter(|_| *t != root).map(|p| NodeId(index[p.0])),
                    children: n.children.iter().map(|c| NodeId(index[c.0])).collect(),
                }
            })
            .collect();
        TreeDecomposition { nodes, root: NodeId(0) }
    }
}

/// Rewrite `td` so that below every node `t`, each child subtree adds a connected
/// set of new vertices that is adjacent to every vertex of the adhesion.
pub fn make_connected(g: &Graph, td: &TreeDecomposition) -> Result<TreeDecomposition> {
    require_valid(g, td)?;
    let mut arena = Arena { nodes: td.nodes.clone() };
    let root = td.root;
    let mut queue = VecDeque::from([root]);
    while let Some(t) = queue.pop_front() {
        let children = std::mem::take(&mut arena.nodes[t.0].children);
        let parent_bag = arena.nodes[t.0].bag.clone();
        for c in children {
            let below: VertexSet = arena.subtree_vertices(c).difference(&parent_bag).copied().collect();
            for comp in g.components_within(Some(&below)) {
                let mut keep = comp.clone();
                keep.extend(parent_bag.iter().copied());
                let copy = arena.clone_restricted(c, &keep, t);
                let adhesion: Vec<_> = arena.nodes[copy.0].bag.intersection(&parent_bag).copied().collect();
                let detached: Vec<_> = adhesion
                    .into_iter()
                    .filter(|&v| g.neighbors(v).all(|u| !comp.contains(&u)))
                    .collect();
                if !detached.is_empty() {
                    for x in arena.subtree(copy) {
                        for v in &detached {
                            arena.nodes[x.0].bag.remove(v);
                        }
                    }
                }
                queue.push_back(copy);
            }
        }
    }
    Ok(arena.finish(root))
}

/// Give every node at most two children by hanging surplus children off a
/// left-leaning chain of copies of the parent bag.
pub fn binarize(g: &Graph, td: &TreeDecomposition) -> Result<TreeDecomposition> {
    require_valid(g, td)?;
    let mut arena = Arena { nodes: td.nodes.clone() };
    for t in 0..td.len() {
        let t = NodeId(t);
        if arena.nodes[t.0].children.len() <= 2 {
            continue;
        }
        let mut rest = std::mem::take(&mut arena.nodes[t.0].children);
        let bag = arena.nodes[t.0].bag.clone();
        let mut cur = t;
        while rest.len() > 2 {
            let first = rest.remove(0);
            arena.nodes[first.0].parent = Some(cur);
            arena.nodes[cur.0].children.push(first);
            cur = arena.push(bag.clone(), Some(cur));
        }
        for c in rest {
            arena.nodes[c.0].parent = Some(cur);
            arena.nodes[cur.0].children.push(c);
        }
    }
    Ok(arena.finish(td.root))
}

/// Intersect every bag with `keep`. The result decomposes `g[keep]` whenever `td` decomposes `g`.
pub fn restrict(td: &TreeDecomposition, keep: &VertexSet) -> TreeDecomposition {
    let mut out = td.clone();
    for n in &mut out.nodes {
        n.bag.retain(|v| keep.contains(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{raw_stats, validate};
    use crate::graph::{vset, VertexId};

    #[test]
    fn connected_input_is_fixed_point() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(vec![vset([0, 1]), vset([1, 2])], &[(0, 1)], 0).unwrap();
        assert_eq!(make_connected(&g, &td).unwrap(), td);
    }

    #[test]
    fn splits_disconnected_child_subtree() {
        // s adjacent to x and y; one child bag holds both below the root {s}
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(vec![vset([0]), vset([0, 1, 2])], &[(0, 1)], 0).unwrap();
        let out = make_connected(&g, &td).unwrap();
        assert!(validate(&g, &out).is_valid());
        assert_eq!(out.children(out.root()).len(), 2);
        let mut child_bags: Vec<_> = out.children(out.root()).iter().map(|&c| out.bag(c).clone()).collect();
        child_bags.sort();
        assert_eq!(child_bags, vec![vset([0, 1]), vset([0, 2])]);
    }

    #[test]
    fn drops_adhesion_vertex_without_neighbor_below() {
        // root {0,1}, child {0,1,2}; 2 adjacent only to 0
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(vec![vset([0, 1]), vset([0, 1, 2])], &[(0, 1)], 0).unwrap();
        let out = make_connected(&g, &td).unwrap();
        let child = out.children(out.root())[0];
        assert_eq!(out.bag(child), &vset([0, 2]));
        assert!(!out.bag(child).contains(&VertexId(1)));
    }

    #[test]
    fn binarize_shapes() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let star = TreeDecomposition::from_parts(
            vec![vset([0]), vset([0, 1]), vset([0, 2]), vset([0, 3]), vset([0, 4])],
            &[(0, 1), (0, 2), (0, 3), (0, 4)],
            0,
        )
        .unwrap();
        let out = binarize(&g, &star).unwrap();
        assert!(validate(&g, &out).is_valid());
        assert!(out.max_children() <= 2);
        assert_eq!(raw_stats(&out).width, raw_stats(&star).width);
        assert_eq!(out.len(), 7);
        // copies carry the parent bag
        assert!(out.node_ids().filter(|&t| out.bag(t) == &vset([0])).count() == 3);

        let two = TreeDecomposition::from_parts(
            vec![vset([0]), vset([0, 1]), vset([0, 2])],
            &[(0, 1), (0, 2)],
            0,
        )
        .unwrap();
        let g2 = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(binarize(&g2, &two).unwrap(), two);
        let leaf = TreeDecomposition::single_bag(vset([0]));
        let g1 = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(binarize(&g1, &leaf).unwrap(), leaf);
    }

    #[test]
    fn binarize_can_raise_adhesion() {
        // K4 on 0..4 with a pendant vertex on each: every binary decomposition of
        // width 3 needs an edge whose adhesion holds two clique vertices.
        let g = Graph::from_edges(
            8,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (1, 5), (2, 6), (3, 7)],
        )
        .unwrap();
        let td = TreeDecomposition::from_parts(
            vec![vset([0, 1, 2, 3]), vset([0, 4]), vset([1, 5]), vset([2, 6]), vset([3, 7])],
            &[(0, 1), (0, 2), (0, 3), (0, 4)],
            0,
        )
        .unwrap();
        let out = binarize(&g, &td).unwrap();
        assert!(validate(&g, &out).is_valid());
        assert_eq!(raw_stats(&td).adhesion, 1);
        assert!(raw_stats(&out).adhesion > 1);
    }

    #[test]
    fn restrict_keeps_validity_on_induced_subgraph() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(vec![vset([0, 1]), vset([1, 2])], &[(0, 1)], 0).unwrap();
        let keep = vset([0, 2]);
        let sub = g.induced_subgraph(&keep).unwrap();
        assert!(validate(&sub, &restrict(&td, &keep)).is_valid());
    }
}
