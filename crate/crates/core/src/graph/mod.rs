//! Undirected simple graphs with stable vertex identities.

mod dense;
pub mod io;
mod path;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub(crate) use dense::Dense;
pub use path::{is_guarded, traverses, Path};
pub use search::{brute_force_k_path, brute_force_k_path_capped, for_each_k_path, DEFAULT_K_PATH_CAP};

/// Opaque vertex identifier. Identifiers are assigned at creation and never reused.
///
/// In memory ids start at 0. Everything user-facing (files, JSON, `Display`) is
/// 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl Serialize for VertexId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0 + 1)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let id = u32::deserialize(d)?;
        if id == 0 {
            return Err(serde::de::Error::custom("vertex ids are 1-based"));
        }
        Ok(VertexId(id - 1))
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

pub type VertexSet = BTreeSet<VertexId>;

/// Build a vertex set from raw identifiers.
pub fn vset<I: IntoIterator<Item = u32>>(ids: I) -> VertexSet {
    ids.into_iter().map(VertexId).collect()
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<VertexId, VertexSet>,
    next_id: u32,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.adj.keys().collect::<Vec<_>>())
            .field("edges", &self.edges())
            .finish()
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// A graph on vertices `0..n` with the given edges.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_vertex();
        }
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v))?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.next_id);
        self.next_id += 1;
        self.adj.insert(id, VertexSet::new());
        id
    }

    /// Insert a vertex with a chosen identifier; the identifier must never have been used.
    pub fn insert_vertex(&mut self, id: VertexId) -> Result<()> {
        if id.0 < self.next_id {
            return invalid(format!("vertex id {id} already used"));
        }
        self.next_id = id.0 + 1;
        self.adj.insert(id, VertexSet::new());
        Ok(())
    }

    /// Add edge `uv`. Adding an existing edge is a no-op; self-loops are rejected.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        if u == v {
            return invalid(format!("self-loop at {u}"));
        }
        if !self.contains(u) || !self.contains(v) {
            return invalid(format!("edge {u}-{v} has an unknown endpoint"));
        }
        self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        let had = self.adj.get_mut(&u).is_some_and(|s| s.remove(&v));
        if had {
            self.adj.get_mut(&v).unwrap().remove(&u);
        }
        had
    }

    pub fn remove_vertex(&mut self, v: VertexId) -> bool {
        let Some(nbrs) = self.adj.remove(&v) else {
            return false;
        };
        for u in nbrs {
            self.adj.get_mut(&u).unwrap().remove(&v);
        }
        true
    }

    pub fn remove_vertices<'a, I: IntoIterator<Item = &'a VertexId>>(&mut self, vs: I) {
        for v in vs {
            self.remove_vertex(*v);
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.adj.keys().copied().collect()
    }

    /// Neighbors of `v`; empty for unknown vertices.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |s| s.len())
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.adj
            .iter()
            .flat_map(|(&u, nbrs)| nbrs.range(u..).map(move |&v| (u, v)))
            .collect()
    }

    /// Smallest identifier never handed out.
    pub fn next_id(&self) -> u32 {
        self.next_id
    }

    fn check_subset(&self, s: &VertexSet) -> Result<()> {
        match s.iter().find(|v| !self.contains(**v)) {
            Some(v) => invalid(format!("unknown vertex {v}")),
            None => Ok(()),
        }
    }

    /// `G[s]`, keeping identifiers.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<Graph> {
        self.check_subset(s)?;
        let adj = s
            .iter()
            .map(|&v| (v, self.adj[&v].intersection(s).copied().collect()))
            .collect();
        Ok(Graph { adj, next_id: self.next_id })
    }

    /// `N(s)`: vertices outside `s` adjacent to some vertex of `s`.
    pub fn open_neighborhood(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_subset(s)?;
        Ok(s.iter()
            .flat_map(|v| self.adj[v].iter().copied())
            .filter(|v| !s.contains(v))
            .collect())
    }

    /// `N[s] = s ∪ N(s)`.
    pub fn closed_neighborhood(&self, s: &VertexSet) -> Result<VertexSet> {
        let mut out = self.open_neighborhood(s)?;
        out.extend(s.iter().copied());
        Ok(out)
    }

    /// Connected components of `G[s]` (or of `G` when `s` is `None`), each sorted,
    /// listed by smallest member.
    pub fn components_within(&self, s: Option<&VertexSet>) -> Vec<VertexSet> {
        let inside = |v: &VertexId| s.is_none_or(|s| s.contains(v));
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for v in self.vertices().filter(|v| inside(v)) {
            if !seen.insert(v) {
                continue;
            }
            let mut comp = VertexSet::from([v]);
            let mut stack = vec![v];
            while let Some(x) = stack.pop() {
                for y in self.neighbors(x) {
                    if inside(&y) && seen.insert(y) {
                        comp.insert(y);
                        stack.push(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected_set(&self, s: &VertexSet) -> bool {
        self.components_within(Some(s)).len() <= 1
    }
}

/// A separation `(A, B)` of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub side_a: VertexSet,
    pub side_b: VertexSet,
}

impl Separation {
    pub fn new(side_a: VertexSet, side_b: VertexSet) -> Self {
        Self { side_a, side_b }
    }

    pub fn order(&self) -> usize {
        self.side_a.intersection(&self.side_b).count()
    }

    pub fn separator(&self) -> VertexSet {
        self.side_a.intersection(&self.side_b).copied().collect()
    }

    /// `A \ B`.
    pub fn strict_a(&self) -> VertexSet {
        self.side_a.difference(&self.side_b).copied().collect()
    }
}

/// True iff `a ∪ b = V(g)` and no edge joins `a \ b` to `b \ a`.
pub fn check_separation(g: &Graph, a: &VertexSet, b: &VertexSet) -> bool {
    if a.iter().chain(b.iter()).any(|v| !g.contains(*v)) {
        return false;
    }
    if g.vertices().any(|v| !a.contains(&v) && !b.contains(&v)) {
        return false;
    }
    a.iter()
        .filter(|v| !b.contains(v))
        .all(|&u| g.neighbors(u).all(|w| !(b.contains(&w) && !a.contains(&w))))
}
