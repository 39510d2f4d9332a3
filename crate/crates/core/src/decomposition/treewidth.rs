//! Tree decompositions from elimination orderings: an exact search for small
//! graphs and the min-fill heuristic above the cap.

use std::collections::HashSet;

use super::{NodeId, TreeDecomposition};
use crate::graph::{Dense, Graph, VertexSet};

/// Vertex count up to which [`compute_decomposition`] searches for an optimal ordering.
pub const DEFAULT_EXACT_CAP: usize = 30;

#[derive(Clone, Debug)]
pub struct DecompositionOptions {
    pub exact_cap: usize,
    /// Maximum number of distinct search states before giving up on exactness.
    pub state_budget: usize,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        Self { exact_cap: DEFAULT_EXACT_CAP, state_budget: 2_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct ComputedDecomposition {
    pub td: TreeDecomposition,
    pub width: usize,
    /// True when `width` is certified to be the treewidth.
    pub exact: bool,
}

/// Decompose `g` with default options. `width_hint`, when given, caps the widths
/// the exact search tries; it never makes the result invalid.
pub fn compute_decomposition(g: &Graph, width_hint: Option<usize>) -> TreeDecomposition {
    compute_decomposition_with(g, width_hint, &DecompositionOptions::default()).td
}

pub fn compute_decomposition_with(
    g: &Graph,
    width_hint: Option<usize>,
    opts: &DecompositionOptions,
) -> ComputedDecomposition {
    if g.is_empty() {
        return ComputedDecomposition { td: TreeDecomposition::single_bag(VertexSet::new()), width: 0, exact: true };
    }
    if g.num_vertices() > 128 {
        // beyond the bitmask representation: fall back to the trivial decomposition
        let width = g.num_vertices() - 1;
        return ComputedDecomposition { td: TreeDecomposition::single_bag(g.vertex_set()), width, exact: false };
    }
    let d = Dense::new(g);
    let adj = masks(&d);
    let heuristic = min_fill_order(&adj);
    let upper = order_width(&adj, &heuristic);
    let n = d.len();
    if n > opts.exact_cap || n > 64 {
        return finish(&d, &adj, &heuristic, upper, false);
    }
    let lower = degeneracy(&adj);
    let top = width_hint.map_or(upper, |h| h.min(upper));
    let mut search = ExactSearch { failed: HashSet::new(), states: 0, budget: opts.state_budget };
    for w in lower..top {
        match search.order_with_width(&adj, w) {
            Some(order) => return finish(&d, &adj, &order, w, true),
            None if search.states > search.budget => return finish(&d, &adj, &heuristic, upper, false),
            None => search.failed.clear(),
        }
    }
    // no width below `top` exists; `top == upper` makes the heuristic optimal
    let exact = top == upper;
    finish(&d, &adj, &heuristic, upper, exact)
}

fn full(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

fn masks(d: &Dense) -> Vec<u128> {
    d.adj
        .iter()
        .map(|nb| nb.iter().fold(0u128, |m, &u| m | (1u128 << u)))
        .collect()
}

fn eliminate(adj: &mut [u128], alive: u128, v: usize) {
    let nb = adj[v] & alive & !(1u128 << v);
    let mut rest = nb;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        adj[u] |= nb & !(1u128 << u);
        adj[u] &= !(1u128 << v);
    }
}

fn order_width(adj: &[u128], order: &[usize]) -> usize {
    let mut a = adj.to_vec();
    let mut alive: u128 = full(adj.len());
    let mut w = 0;
    for &v in order {
        w = w.max((a[v] & alive & !(1u128 << v)).count_ones() as usize);
        eliminate(&mut a, alive, v);
        alive &= !(1u128 << v);
    }
    w
}

fn min_fill_order(adj: &[u128]) -> Vec<usize> {
    let n = adj.len();
    let mut a = adj.to_vec();
    let mut alive: u128 = full(n);
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = (usize::MAX, usize::MAX, 0);
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nb = a[v] & alive & !(1u128 << v);
            let mut fill = 0;
            let mut it = nb;
            while it != 0 {
                let u = it.trailing_zeros() as usize;
                it &= it - 1;
                fill += (nb & !a[u] & !(1u128 << u)).count_ones() as usize;
            }
            let key = (fill / 2, nb.count_ones() as usize, v);
            if key < best {
                best = key;
            }
        }
        let v = best.2;
        order.push(v);
        eliminate(&mut a, alive, v);
        alive &= !(1u128 << v);
    }
    order
}

/// Largest minimum degree over all subgraphs, a lower bound on treewidth.
fn degeneracy(adj: &[u128]) -> usize {
    let n = adj.len();
    let mut alive: u128 = full(n);
    let mut best = 0;
    for _ in 0..n {
        let mut pick = (usize::MAX, 0);
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let deg = (adj[v] & alive).count_ones() as usize;
            if deg < pick.0 {
                pick = (deg, v);
            }
        }
        best = best.max(pick.0);
        alive &= !(1u128 << pick.1);
    }
    best
}

struct ExactSearch {
    failed: HashSet<u128>,
    states: usize,
    budget: usize,
}

impl ExactSearch {
    /// An elimination ordering of width at most `w`, if one exists.
    fn order_with_width(&mut self, adj: &[u128], w: usize) -> Option<Vec<usize>> {
        let n = adj.len();
        let alive: u128 = full(n);
        let mut order = Vec::with_capacity(n);
        if self.go(adj.to_vec(), alive, w, &mut order) {
            Some(order)
        } else {
            None
        }
    }

    fn go(&mut self, adj: Vec<u128>, alive: u128, w: usize, order: &mut Vec<usize>) -> bool {
        if alive.count_ones() as usize <= w + 1 {
            let mut rest = alive;
            while rest != 0 {
                order.push(rest.trailing_zeros() as usize);
                rest &= rest - 1;
            }
            return true;
        }
        if self.failed.contains(&alive) || self.states > self.budget {
            return false;
        }
        self.states += 1;
        let degree = |v: usize| (adj[v] & alive & !(1u128 << v)).count_ones() as usize;
        // a simplicial vertex of small degree can always be eliminated first
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nb = adj[v] & alive & !(1u128 << v);
            if degree(v) <= w && is_clique(&adj, nb) {
                let mut next = adj.clone();
                eliminate(&mut next, alive, v);
                order.push(v);
                if self.go(next, alive & !(1u128 << v), w, order) {
                    return true;
                }
                order.pop();
                self.failed.insert(alive);
                return false;
            }
        }
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if degree(v) > w {
                continue;
            }
            let mut next = adj.clone();
            eliminate(&mut next, alive, v);
            order.push(v);
            if self.go(next, alive & !(1u128 << v), w, order) {
                return true;
            }
            order.pop();
        }
        self.failed.insert(alive);
        false
    }
}

fn is_clique(adj: &[u128], set: u128) -> bool {
    let mut rest = set;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if (set & !(1u128 << u)) & !adj[u] != 0 {
            return false;
        }
    }
    true
}

/// Turn an elimination ordering into a rooted decomposition.
fn finish(d: &Dense, adj: &[u128], order: &[usize], width: usize, exact: bool) -> ComputedDecomposition {
    let n = d.len();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut a = adj.to_vec();
    let mut alive: u128 = full(n);
    let mut higher = vec![0u128; n];
    for &v in order {
        higher[v] = a[v] & alive & !(1u128 << v);
        eliminate(&mut a, alive, v);
        alive &= !(1u128 << v);
    }
    // bag of v = {v} ∪ higher[v]; parent = bag of the earliest-eliminated higher neighbour
    let last = *order.last().unwrap();
    let mut parents: Vec<Option<usize>> = vec![None; n];
    for &v in order {
        let h = higher[v];
        if h == 0 {
            if v != last {
                parents[v] = Some(last);
            }
            continue;
        }
        let mut rest = h;
        let mut first = usize::MAX;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if first == usize::MAX || pos[u] < pos[first] {
                first = u;
            }
        }
        parents[v] = Some(first);
    }
    let bags: Vec<VertexSet> = (0..n)
        .map(|v| {
            let mut bag = VertexSet::from([d.ids[v]]);
            let mut rest = higher[v];
            while rest != 0 {
                bag.insert(d.ids[rest.trailing_zeros() as usize]);
                rest &= rest - 1;
            }
            bag
        })
        .collect();
    let td = TreeDecomposition::from_parents(bags, &parents).expect("elimination forest is a tree");
    ComputedDecomposition { td: contract_subset_bags(&td), width, exact }
}

/// Merge every node whose bag is contained in its parent's bag into the parent.
fn contract_subset_bags(td: &TreeDecomposition) -> TreeDecomposition {
    let keep: Vec<bool> = td
        .node_ids()
        .map(|t| td.parent(t).is_none_or(|p| !td.bag(t).is_subset(td.bag(p))))
        .collect();
    let index: Vec<usize> = {
        let mut next = 0;
        keep.iter()
            .map(|&k| {
                let i = next;
                if k {
                    next += 1;
                }
                i
            })
            .collect()
    };
    let kept_ancestor = |mut t: NodeId| -> NodeId {
        while !keep[t.0] {
            t = td.parent(t).unwrap();
        }
        t
    };
    let mut bags = Vec::new();
    let mut parents = Vec::new();
    for t in td.node_ids().filter(|t| keep[t.0]) {
        bags.push(td.bag(t).clone());
        parents.push(td.parent(t).map(|p| index[kept_ancestor(p).0]));
    }
    TreeDecomposition::from_parents(bags, &parents).expect("contraction keeps a tree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{stats, validate};

    fn grid(r: u32, c: u32) -> Graph {
        let mut edges = Vec::new();
        for i in 0..r {
            for j in 0..c {
                let v = i * c + j;
                if j + 1 < c {
                    edges.push((v, v + 1));
                }
                if i + 1 < r {
                    edges.push((v, v + c));
                }
            }
        }
        Graph::from_edges(r * c, &edges).unwrap()
    }

    fn exact_width(g: &Graph) -> usize {
        let out = compute_decomposition_with(g, None, &DecompositionOptions::default());
        assert!(out.exact);
        assert!(validate(g, &out.td).is_valid());
        assert_eq!(stats(g, &out.td).unwrap().width, out.width);
        out.width
    }

    #[test]
    fn known_widths() {
        let tree = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)]).unwrap();
        assert_eq!(exact_width(&tree), 1);
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(exact_width(&k4), 3);
        assert_eq!(exact_width(&grid(3, 3)), 3);
        assert_eq!(exact_width(&grid(2, 5)), 2);
        let cycle = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(exact_width(&cycle), 2);
        let isolated = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(exact_width(&isolated), 0);
    }

    #[test]
    fn heuristic_above_cap_is_valid() {
        let g = grid(4, 9);
        let opts = DecompositionOptions { exact_cap: 10, ..Default::default() };
        let out = compute_decomposition_with(&g, None, &opts);
        assert!(!out.exact);
        assert!(validate(&g, &out.td).is_valid());
        assert!(out.width >= 4);
    }

    #[test]
    fn width_hint_never_breaks_validity() {
        let g = grid(3, 3);
        let td = compute_decomposition(&g, Some(1));
        assert!(validate(&g, &td).is_valid());
    }
}
