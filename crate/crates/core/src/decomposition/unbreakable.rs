use crate::error::{not_applicable, Result};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::util::for_each_subset_up_to;

/// Largest graph [`check_unbreakable`] will enumerate separators of.
pub const UNBREAKABLE_CAP: usize = 24;

/// True iff for every separation `(A, B)` of order at most `h`, at most `q`
/// vertices of `x` lie in `A \ B` or at most `q` lie in `B \ A`.
pub fn check_unbreakable(g: &Graph, x: &VertexSet, q: usize, h: usize) -> Result<bool> {
    if g.num_vertices() > UNBREAKABLE_CAP {
        return not_applicable(format!(
            "{} vertices exceed the separator enumeration cap {UNBREAKABLE_CAP}",
            g.num_vertices()
        ));
    }
    let verts: Vec<VertexId> = g.vertices().collect();
    let mut breakable = false;
    for_each_subset_up_to(verts.len(), h, |idx| {
        let sep: VertexSet = idx.iter().map(|&i| verts[i]).collect();
        let rest: VertexSet = g.vertex_set().difference(&sep).copied().collect();
        // every component goes wholly to one side; look for a split with > q marked
        // vertices strictly on each side
        let weights: Vec<usize> = g
            .components_within(Some(&rest))
            .iter()
            .map(|c| c.intersection(x).count())
            .collect();
        let total: usize = weights.iter().sum();
        let mut reach = vec![false; total + 1];
        reach[0] = true;
        for w in weights {
            for s in (w..=total).rev() {
                if reach[s - w] {
                    reach[s] = true;
                }
            }
        }
        if (0..=total).any(|s| reach[s] && s > q && total - s > q) {
            breakable = true;
            return false;
        }
        true
    });
    Ok(!breakable)
}
