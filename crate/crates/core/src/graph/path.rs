use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Graph, VertexId, VertexSet};
use crate::error::{invalid, Result};

/// A simple path, stored as its vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(pub Vec<VertexId>);

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Path(vertices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn first(&self) -> Option<VertexId> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<VertexId> {
        self.0.last().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.0.iter().copied().collect()
    }

    pub fn is_endpoint(&self, v: VertexId) -> bool {
        self.first() == Some(v) || self.last() == Some(v)
    }

    /// Vertices strictly between the two endpoints.
    pub fn internal(&self) -> &[VertexId] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    /// Nonempty, repetition-free, and consecutive vertices adjacent in `g`.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        if self.0.is_empty() || self.0.iter().any(|v| !g.contains(*v)) {
            return false;
        }
        let distinct: HashSet<_> = self.0.iter().collect();
        distinct.len() == self.0.len() && self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }
}

/// All `a`-traverses of `p`: maximal subpaths that contain a vertex of `a` and
/// whose internal vertices all lie in `a`, in order along `p`.
pub fn traverses(p: &Path, a: &VertexSet) -> Vec<Path> {
    let vs = p.vertices();
    let mut out = Vec::new();
    let mut i = 0;
    while i < vs.len() {
        if !a.contains(&vs[i]) {
            i += 1;
            continue;
        }
        // maximal run vs[i..j] inside a, extended by one vertex on each side if present
        let mut j = i;
        while j < vs.len() && a.contains(&vs[j]) {
            j += 1;
        }
        let start = i.saturating_sub(1);
        let end = if j < vs.len() { j + 1 } else { j };
        out.push(Path(vs[start..end].to_vec()));
        i = j;
    }
    out
}

/// True iff `p` lies inside `a` or every `a`-traverse of `p` has an endpoint in `z`.
pub fn is_guarded(g: &Graph, p: &Path, a: &VertexSet, z: &VertexSet) -> Result<bool> {
    let boundary = g.open_neighborhood(a)?;
    if let Some(v) = z.iter().find(|v| !boundary.contains(v)) {
        return invalid(format!("guard vertex {v} is not in N(A)"));
    }
    if p.vertices().iter().all(|v| a.contains(v)) {
        return Ok(true);
    }
    Ok(traverses(p, a)
        .iter()
        .all(|t| z.contains(&t.first().unwrap()) || z.contains(&t.last().unwrap())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vset;

    fn p(ids: &[u32]) -> Path {
        Path(ids.iter().map(|&i| VertexId(i)).collect())
    }

    #[test]
    fn traverse_examples() {
        let path = p(&[1, 2, 3, 4, 5]);
        assert_eq!(traverses(&path, &vset([1, 2, 3, 4, 5])), vec![path.clone()]);
        assert!(traverses(&path, &vset([9])).is_empty());
        assert_eq!(traverses(&path, &vset([2, 4])), vec![p(&[1, 2, 3]), p(&[3, 4, 5])]);
        assert_eq!(traverses(&path, &vset([1, 5])), vec![p(&[1, 2]), p(&[4, 5])]);
    }

    #[test]
    fn guard_examples() {
        // path 0-1-2-3-4, A = {1,2,3}
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let a = vset([1, 2, 3]);
        assert!(is_guarded(&g, &p(&[1, 2, 3]), &a, &VertexSet::new()).unwrap());
        assert!(!is_guarded(&g, &p(&[0, 1, 2, 3, 4]), &a, &VertexSet::new()).unwrap());
        assert!(is_guarded(&g, &p(&[0, 1, 2, 3, 4]), &a, &vset([0])).unwrap());
        assert!(is_guarded(&g, &p(&[4]), &vset([0, 1]), &VertexSet::new()).unwrap());
        assert!(is_guarded(&g, &p(&[0, 1]), &a, &vset([2])).is_err());
    }
}
