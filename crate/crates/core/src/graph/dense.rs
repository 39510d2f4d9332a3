use std::collections::HashMap;

use super::{Graph, VertexId};

/// Compact `0..n` relabelling of a graph for the search routines.
#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub ids: Vec<VertexId>,
    pub index: HashMap<VertexId, usize>,
    pub adj: Vec<Vec<usize>>,
}

impl Dense {
    pub fn new(g: &Graph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj = ids
            .iter()
            .map(|&v| g.neighbors(v).map(|u| index[&u]).collect())
            .collect();
        Self { ids, index, adj }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }
}
