#![allow(dead_code)]

use std::collections::BTreeSet;

use kpath_core::decomposition::{compute_decomposition, NodeId, TreeDecomposition};
use kpath_core::harness::{generate, GeneratorSpec, GraphKind};
use kpath_core::{Graph, VertexId, VertexSet};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::new();
    for _ in 0..n {
        g.add_vertex();
    }
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                g.add_edge(VertexId(u), VertexId(v)).unwrap();
            }
        }
    }
    g
}

/// A graph together with a valid decomposition of it, drawn from a mix of
/// generated partial k-trees, grids, thetas and heuristic decompositions of
/// random graphs, sometimes padded with redundant leaves.
pub fn random_decomposition(rng: &mut ChaCha8Rng) -> (Graph, TreeDecomposition) {
    let (g, td) = match rng.gen_range(0..4) {
        0 | 1 => {
            let kind = match rng.gen_range(0..3) {
                0 => GraphKind::PartialKTree { eta: rng.gen_range(1..=3), keep: rng.gen_range(0.5..=1.0) },
                1 => GraphKind::Grid { rows: rng.gen_range(1..=3) },
                _ => GraphKind::Theta { paths: rng.gen_range(2..=5) },
            };
            let spec = GeneratorSpec {
                n: rng.gen_range(2..=22),
                kind,
                modulator_size: 0,
                modulator_edge_prob: 0.0,
                seed: rng.gen(),
                k: 1,
            };
            let inst = generate(&spec).unwrap();
            (inst.graph, inst.decomposition)
        }
        _ => {
            let n = rng.gen_range(1..=16);
            let p = rng.gen_range(0.05..0.5);
            let g = gnp(rng, n, p);
            let td = compute_decomposition(&g, None);
            (g, td)
        }
    };
    if rng.gen_bool(0.3) {
        let td = pad_leaves(rng, &td);
        return (g, td);
    }
    (g, td)
}

/// Hang a few leaves whose bags are subsets of their parent's bag.
pub fn pad_leaves(rng: &mut ChaCha8Rng, td: &TreeDecomposition) -> TreeDecomposition {
    let mut bags: Vec<VertexSet> = td.node_ids().map(|t| td.bag(t).clone()).collect();
    let mut edges: Vec<(usize, usize)> = td.tree_edges().into_iter().map(|(a, b)| (a.0, b.0)).collect();
    for _ in 0..rng.gen_range(1..=4) {
        let parent = rng.gen_range(0..bags.len());
        let sub: VertexSet = bags[parent].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        bags.push(sub);
        edges.push((parent, bags.len() - 1));
    }
    TreeDecomposition::from_parts(bags, &edges, td.root().0).unwrap()
}

/// Decomposition validity computed directly from the definition: every vertex
/// and edge covered, and the bags holding each vertex connected in the tree.
pub fn valid_by_definition(g: &Graph, td: &TreeDecomposition) -> bool {
    let nodes: Vec<NodeId> = td.node_ids().collect();
    for t in &nodes {
        if td.bag(*t).iter().any(|v| !g.contains(*v)) {
            return false;
        }
    }
    for v in g.vertices() {
        if !nodes.iter().any(|t| td.bag(*t).contains(&v)) {
            return false;
        }
    }
    for (u, v) in g.edges() {
        if !nodes.iter().any(|t| td.bag(*t).contains(&u) && td.bag(*t).contains(&v)) {
            return false;
        }
    }
    for v in g.vertices() {
        let holding: BTreeSet<NodeId> = nodes.iter().copied().filter(|t| td.bag(*t).contains(&v)).collect();
        let start = *holding.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for s in td.tree_neighbors(t) {
                if holding.contains(&s) && seen.insert(s) {
                    stack.push(s);
                }
            }
        }
        if seen.len() != holding.len() {
            return false;
        }
    }
    true
}

/// `(width, adhesion, adhesion degree)` computed from the bags.
pub fn shape(td: &TreeDecomposition) -> (usize, usize, usize) {
    let width = td.node_ids().map(|t| td.bag(t).len()).max().unwrap_or(0).saturating_sub(1);
    let mut adhesion = 0;
    let mut degree = 0;
    for t in td.node_ids() {
        let mut distinct: BTreeSet<Vec<VertexId>> = BTreeSet::new();
        for s in td.tree_neighbors(t) {
            let common: Vec<VertexId> = td.bag(t).intersection(td.bag(s)).copied().collect();
            adhesion = adhesion.max(common.len());
            distinct.insert(common);
        }
        degree = degree.max(distinct.len());
    }
    (width, adhesion, degree)
}

/// A graph containing a random simple path, with extra random edges.
pub fn graph_with_path(rng: &mut ChaCha8Rng, n: usize) -> (Graph, Vec<VertexId>) {
    let p = rng.gen_range(0.0..0.3);
    let mut g = gnp(rng, n, p);
    let mut order: Vec<VertexId> = g.vertices().collect();
    order.shuffle(rng);
    order.truncate(rng.gen_range(1..=n));
    for w in order.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            g.add_edge(w[0], w[1]).unwrap();
        }
    }
    (g, order)
}
