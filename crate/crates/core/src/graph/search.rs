use super::{Dense, Graph, Path};
use crate::error::{not_applicable, Result};

/// Default vertex cap of the reference k-path search.
pub const DEFAULT_K_PATH_CAP: usize = 32;

/// Exhaustive k-path search used as the reference answer in every safeness check.
pub fn brute_force_k_path(g: &Graph, k: usize) -> Result<Option<Path>> {
    brute_force_k_path_capped(g, k, DEFAULT_K_PATH_CAP)
}

pub fn brute_force_k_path_capped(g: &Graph, k: usize, cap: usize) -> Result<Option<Path>> {
    if g.num_vertices() > cap {
        return not_applicable(format!("{} vertices exceed the k-path search cap {cap}", g.num_vertices()));
    }
    if k == 0 || k > g.num_vertices() {
        return Ok(None);
    }
    let d = Dense::new(g);
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    // low-degree vertices are the likeliest path ends
    order.sort_by_key(|&v| d.adj[v].len());
    let mut used = vec![false; n];
    let mut stack = Vec::with_capacity(k);
    for &s in &order {
        used[s] = true;
        stack.push(s);
        if extend(&d, k, &mut used, &mut stack) {
            return Ok(Some(Path(stack.iter().map(|&i| d.ids[i]).collect())));
        }
        stack.pop();
        used[s] = false;
    }
    Ok(None)
}

fn extend(d: &Dense, k: usize, used: &mut [bool], stack: &mut Vec<usize>) -> bool {
    if stack.len() == k {
        return true;
    }
    let end = *stack.last().unwrap();
    if reachable_unused(d, end, used, k - stack.len()) < k - stack.len() {
        return false;
    }
    for &w in &d.adj[end] {
        if used[w] {
            continue;
        }
        used[w] = true;
        stack.push(w);
        if extend(d, k, used, stack) {
            return true;
        }
        stack.pop();
        used[w] = false;
    }
    false
}

/// Unused vertices reachable from `from` through unused vertices, counting at most `limit`.
fn reachable_unused(d: &Dense, from: usize, used: &[bool], limit: usize) -> usize {
    let mut seen = vec![false; d.len()];
    let mut queue = vec![from];
    let mut count = 0;
    seen[from] = true;
    while let Some(x) = queue.pop() {
        for &y in &d.adj[x] {
            if !used[y] && !seen[y] {
                seen[y] = true;
                count += 1;
                if count >= limit {
                    return count;
                }
                queue.push(y);
            }
        }
    }
    count
}

/// Visit every k-path of `g` once (in one orientation, first id below last id for
/// k ≥ 2). Stops when `f` returns `false`.
pub fn for_each_k_path<F: FnMut(&Path) -> bool>(g: &Graph, k: usize, cap: usize, mut f: F) -> Result<()> {
    if g.num_vertices() > cap {
        return not_applicable(format!("{} vertices exceed the k-path search cap {cap}", g.num_vertices()));
    }
    if k == 0 {
        return Ok(());
    }
    let d = Dense::new(g);
    let mut used = vec![false; d.len()];
    let mut stack = Vec::with_capacity(k);
    for s in 0..d.len() {
        used[s] = true;
        stack.push(s);
        let go_on = visit_all(&d, k, &mut used, &mut stack, &mut f);
        stack.pop();
        used[s] = false;
        if !go_on {
            break;
        }
    }
    Ok(())
}

fn visit_all<F: FnMut(&Path) -> bool>(d: &Dense, k: usize, used: &mut [bool], stack: &mut Vec<usize>, f: &mut F) -> bool {
    if stack.len() == k {
        if k >= 2 && stack[0] > stack[k - 1] {
            return true;
        }
        return f(&Path(stack.iter().map(|&i| d.ids[i]).collect()));
    }
    let end = *stack.last().unwrap();
    for &w in &d.adj[end] {
        if used[w] {
            continue;
        }
        used[w] = true;
        stack.push(w);
        let go_on = visit_all(d, k, used, stack, f);
        stack.pop();
        used[w] = false;
        if !go_on {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;

    /// Unpruned enumeration of all injective vertex sequences of length k.
    fn exists_by_enumeration(g: &Graph, k: usize) -> bool {
        fn go(g: &Graph, seq: &mut Vec<VertexId>, k: usize) -> bool {
            if seq.len() == k {
                return true;
            }
            let verts: Vec<_> = g.vertices().collect();
            for v in verts {
                if seq.contains(&v) {
                    continue;
                }
                if let Some(&last) = seq.last() {
                    if !g.has_edge(last, v) {
                        continue;
                    }
                }
                seq.push(v);
                if go(g, seq, k) {
                    return true;
                }
                seq.pop();
            }
            false
        }
        go(g, &mut Vec::new(), k)
    }

    #[test]
    fn examples() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = brute_force_k_path(&k3, 3).unwrap().unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.is_valid_in(&k3));
        let single = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(brute_force_k_path(&single, 1).unwrap(), Some(Path(vec![VertexId(0)])));
        let two = Graph::from_edges(2, &[]).unwrap();
        assert_eq!(brute_force_k_path(&two, 2).unwrap(), None);
    }

    #[test]
    fn k_path_enumeration_counts() {
        // a triangle has 3 two-vertex paths and 3 three-vertex paths
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        for (k, want) in [(1, 3), (2, 3), (3, 3), (4, 0)] {
            let mut count = 0;
            for_each_k_path(&g, k, 10, |p| {
                assert!(p.is_valid_in(&g) && p.len() == k);
                count += 1;
                true
            })
            .unwrap();
            assert_eq!(count, want, "k = {k}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::from_edges(40, &[]).unwrap();
        assert!(brute_force_k_path(&g, 2).is_err());
        assert!(brute_force_k_path_capped(&g, 2, 64).unwrap().is_none());
    }

    #[test]
    fn agrees_with_unpruned_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..150 {
            let n = rng.gen_range(1..=8u32);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            for k in 1..=n as usize {
                let found = brute_force_k_path(&g, k).unwrap();
                if let Some(p) = &found {
                    assert!(p.is_valid_in(&g) && p.len() == k);
                }
                assert_eq!(found.is_some(), exists_by_enumeration(&g, k));
            }
        }
    }
}
