use super::{LinkageInstance, LinkageSolution};
use crate::error::{not_applicable, Result};
use crate::graph::{Dense, Path};

pub const BRUTE_FORCE_CAP: usize = 16;

pub fn brute_force_linkage(inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
    brute_force_linkage_capped(inst, BRUTE_FORCE_CAP)
}

/// Lists every path satisfying each request, then tries all tuples. Shares no
/// code with the branch-and-bound solver so the two can check each other.
pub fn brute_force_linkage_capped(inst: &LinkageInstance, cap: usize) -> Result<Option<LinkageSolution>> {
    inst.check()?;
    let n = inst.num_vertices();
    if n > cap.min(32) {
        return not_applicable(format!("{n} vertices exceed the brute-force cap {cap}"));
    }
    if inst.requests.is_empty() {
        return Ok((inst.k_prime == 0).then(|| LinkageSolution { paths: Vec::new() }));
    }
    let d = Dense::new(&inst.graph);
    let term_mask: u32 = d
        .ids
        .iter()
        .enumerate()
        .filter(|(_, v)| inst.terminals.contains(v))
        .fold(0, |m, (i, _)| m | (1 << i));

    // every simple path on at most k' vertices, one orientation each
    let mut all: Vec<Vec<usize>> = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        stack.push(s);
        collect(&d, inst.k_prime, &mut stack, &mut all);
        stack.pop();
    }

    let options: Vec<Vec<(u32, &Vec<usize>)>> = inst
        .requests
        .iter()
        .map(|r| {
            let want: u32 = r.iter().fold(0, |m, v| m | (1 << d.index[v]));
            all.iter()
                .filter(|p| satisfies(p, want, term_mask))
                .map(|p| (p.iter().fold(0u32, |m, &x| m | (1 << x)), p))
                .collect()
        })
        .collect();

    let mut chosen = Vec::with_capacity(options.len());
    if pick(&options, term_mask, inst.k_prime, 0, 0, &mut chosen) {
        let paths = chosen.iter().map(|p: &&Vec<usize>| Path(p.iter().map(|&x| d.ids[x]).collect())).collect();
        return Ok(Some(LinkageSolution { paths }));
    }
    Ok(None)
}

fn collect(d: &Dense, max_len: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if stack.len() > max_len {
        return;
    }
    if stack.len() == 1 || stack[0] < *stack.last().unwrap() {
        out.push(stack.clone());
    }
    let end = *stack.last().unwrap();
    for &w in &d.adj[end] {
        if !stack.contains(&w) {
            stack.push(w);
            collect(d, max_len, stack, out);
            stack.pop();
        }
    }
}

fn satisfies(p: &[usize], want: u32, term_mask: u32) -> bool {
    let mut seen = 0u32;
    for (i, &x) in p.iter().enumerate() {
        if term_mask & (1 << x) != 0 {
            if i != 0 && i != p.len() - 1 {
                return false;
            }
            seen |= 1 << x;
        }
    }
    seen == want
}

fn pick<'a>(
    options: &[Vec<(u32, &'a Vec<usize>)>],
    term_mask: u32,
    k_prime: usize,
    inner_used: u32,
    union: u32,
    chosen: &mut Vec<&'a Vec<usize>>,
) -> bool {
    let i = chosen.len();
    if i == options.len() {
        return union.count_ones() as usize == k_prime;
    }
    for &(mask, p) in &options[i] {
        let inner = mask & !term_mask;
        if inner & inner_used != 0 {
            continue;
        }
        let next = union | mask;
        if next.count_ones() as usize > k_prime {
            continue;
        }
        chosen.push(p);
        if pick(options, term_mask, k_prime, inner_used | inner, next, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{vset, Graph, VertexId};

    #[test]
    fn reference_examples() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let zero = LinkageInstance::new(g.clone(), 0, vset([]), vec![]).unwrap();
        assert!(brute_force_linkage(&zero).unwrap().is_some());
        let one = LinkageInstance::new(g.clone(), 1, vset([]), vec![]).unwrap();
        assert!(brute_force_linkage(&one).unwrap().is_none());
        let edge = LinkageInstance::new(g, 2, vset([0, 1]), vec![vec![VertexId(0), VertexId(1)]]).unwrap();
        assert!(brute_force_linkage(&edge).unwrap().is_some());
        let big = LinkageInstance::k_path(Graph::from_edges(17, &[]).unwrap(), 1);
        assert!(brute_force_linkage(&big).is_err());
    }
}
