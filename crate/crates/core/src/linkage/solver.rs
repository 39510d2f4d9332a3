use std::collections::VecDeque;

use super::{LinkageInstance, LinkageSolution};
use crate::error::{Error, Result};
use crate::graph::{Dense, Path};

/// Node expansions allowed before the solver gives up with an error.
pub const DEFAULT_BUDGET: u64 = 500_000_000;

pub fn solve_linkage(inst: &LinkageInstance) -> Result<Option<LinkageSolution>> {
    solve_linkage_with_budget(inst, DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Pair(usize, usize),
    Single(usize),
    Empty,
}

/// Branch and bound over requests: two-terminal requests first, then
/// one-terminal, then empty ones. Each path is grown from its terminal, pruned by
/// distance to the far terminal and by how many free vertices are still
/// reachable. Exceeding `budget` expansions is an error, never a guess.
pub fn solve_linkage_with_budget(inst: &LinkageInstance, budget: u64) -> Result<Option<LinkageSolution>> {
    inst.check()?;
    let requested = inst.requested();
    if inst.requests.is_empty() {
        return Ok((inst.k_prime == 0).then(|| LinkageSolution { paths: Vec::new() }));
    }
    if inst.k_prime < requested.len() {
        return Ok(None);
    }
    let free = inst.k_prime - requested.len();
    let d = Dense::new(&inst.graph);
    let is_term: Vec<bool> = d.ids.iter().map(|v| inst.terminals.contains(v)).collect();
    if is_term.iter().filter(|t| !**t).count() < free {
        return Ok(None);
    }

    let mut order: Vec<usize> = (0..inst.requests.len()).collect();
    order.sort_by_key(|&i| {
        let r = &inst.requests[i];
        (2 - r.len(), r.clone())
    });
    let kinds: Vec<Kind> = order
        .iter()
        .map(|&i| match inst.requests[i].as_slice() {
            [u, v] => Kind::Pair(d.index[u], d.index[v]),
            [u] => Kind::Single(d.index[u]),
            _ => Kind::Empty,
        })
        .collect();
    let mut suffix_min = vec![0; kinds.len() + 1];
    for i in (0..kinds.len()).rev() {
        suffix_min[i] = suffix_min[i + 1] + usize::from(kinds[i] == Kind::Empty);
    }
    if free < suffix_min[0] {
        return Ok(None);
    }
    let same_as_prev: Vec<bool> = (0..kinds.len()).map(|i| i > 0 && kinds[i] == kinds[i - 1]).collect();

    let mut s = Search {
        d: &d,
        is_term,
        kinds,
        suffix_min,
        same_as_prev,
        used: vec![false; d.len()],
        paths: vec![Vec::new(); order.len()],
        keys: vec![0; order.len()],
        expansions: 0,
        budget,
    };
    if !s.place(0, free)? {
        return Ok(None);
    }
    let mut paths = vec![Path(Vec::new()); order.len()];
    for (pos, &orig) in order.iter().enumerate() {
        paths[orig] = Path(s.paths[pos].iter().map(|&x| d.ids[x]).collect());
    }
    Ok(Some(LinkageSolution { paths }))
}

struct Search<'a> {
    d: &'a Dense,
    is_term: Vec<bool>,
    kinds: Vec<Kind>,
    suffix_min: Vec<usize>,
    same_as_prev: Vec<bool>,
    used: Vec<bool>,
    paths: Vec<Vec<usize>>,
    /// Symmetry-breaking key per placed request: equal consecutive requests must
    /// have nondecreasing keys.
    keys: Vec<isize>,
    expansions: u64,
    budget: u64,
}

/// Per-request search limits.
#[derive(Clone, Copy)]
struct Goal {
    i: usize,
    rem: usize,
    max_c: usize,
    exact: bool,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.expansions += 1;
        if self.expansions > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn free(&self, x: usize) -> bool {
        !self.is_term[x] && !self.used[x]
    }

    fn key_ok(&self, i: usize, key: isize) -> bool {
        !self.same_as_prev[i] || key >= self.keys[i - 1]
    }

    /// Place requests `i..` using exactly `rem` more non-terminals.
    fn place(&mut self, i: usize, rem: usize) -> Result<bool> {
        if i == self.kinds.len() {
            return Ok(rem == 0);
        }
        if rem < self.suffix_min[i] {
            return Ok(false);
        }
        let exact = i + 1 == self.kinds.len();
        let goal = Goal { i, rem, max_c: rem - self.suffix_min[i + 1], exact };
        match self.kinds[i] {
            Kind::Pair(u, v) => {
                let dist = self.distances_to(v);
                self.paths[i] = vec![u];
                self.grow_pair(goal, v, 0, &dist)
            }
            Kind::Single(u) => {
                self.paths[i] = vec![u];
                self.grow_open(goal, 0)
            }
            Kind::Empty => {
                for start in 0..self.d.len() {
                    if !self.free(start) || !self.key_ok(i, start as isize) {
                        continue;
                    }
                    self.used[start] = true;
                    self.paths[i] = vec![start];
                    let found = self.grow_open(goal, 1)?;
                    self.used[start] = false;
                    if found {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Non-terminals needed to walk from each free vertex to `target`, counting the
    /// vertex itself; `usize::MAX` when unreachable.
    fn distances_to(&self, target: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.d.len()];
        let mut queue = VecDeque::new();
        for &x in &self.d.adj[target] {
            if self.free(x) {
                dist[x] = 1;
                queue.push_back(x);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &y in &self.d.adj[x] {
                if self.free(y) && dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    fn grow_pair(&mut self, goal: Goal, v: usize, c: usize, dist: &[usize]) -> Result<bool> {
        self.tick()?;
        let i = goal.i;
        let end = *self.paths[i].last().unwrap();
        if self.d.adj[end].contains(&v) && (!goal.exact || c == goal.max_c) {
            let key = self.paths[i].get(1).map_or(-1, |&x| x as isize);
            if self.key_ok(i, key) {
                self.keys[i] = key;
                self.paths[i].push(v);
                if self.place(i + 1, goal.rem - c)? {
                    return Ok(true);
                }
                self.paths[i].pop();
            }
        }
        if c == goal.max_c {
            return Ok(false);
        }
        for idx in 0..self.d.adj[end].len() {
            let w = self.d.adj[end][idx];
            if !self.free(w) || dist[w] == usize::MAX || c + dist[w] > goal.max_c {
                continue;
            }
            self.used[w] = true;
            self.paths[i].push(w);
            let found = self.grow_pair(goal, v, c + 1, dist)?;
            if found {
                return Ok(true);
            }
            self.paths[i].pop();
            self.used[w] = false;
        }
        Ok(false)
    }

    /// Grow a path whose far end is free (one-terminal and empty requests).
    fn grow_open(&mut self, goal: Goal, c: usize) -> Result<bool> {
        self.tick()?;
        let i = goal.i;
        let path = &self.paths[i];
        let end = *path.last().unwrap();
        let is_empty_req = self.kinds[i] == Kind::Empty;
        if (!goal.exact || c == goal.max_c) && (!is_empty_req || path.len() == 1 || path[0] < end) {
            let key = if is_empty_req { path[0] as isize } else { path.get(1).map_or(-1, |&x| x as isize) };
            if self.key_ok(i, key) {
                self.keys[i] = key;
                if self.place(i + 1, goal.rem - c)? {
                    return Ok(true);
                }
            }
        }
        if c == goal.max_c {
            return Ok(false);
        }
        if goal.exact && self.reachable_free(end, goal.max_c - c) < goal.max_c - c {
            return Ok(false);
        }
        for idx in 0..self.d.adj[end].len() {
            let w = self.d.adj[end][idx];
            if !self.free(w) {
                continue;
            }
            self.used[w] = true;
            self.paths[i].push(w);
            let found = self.grow_open(goal, c + 1)?;
            if found {
                return Ok(true);
            }
            self.paths[i].pop();
            self.used[w] = false;
        }
        Ok(false)
    }

    /// Free vertices reachable from `from` through free vertices, up to `limit`.
    fn reachable_free(&self, from: usize, limit: usize) -> usize {
        let mut seen = vec![false; self.d.len()];
        let mut stack = vec![from];
        let mut count = 0;
        seen[from] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.d.adj[x] {
                if !seen[y] && self.free(y) {
                    seen[y] = true;
                    count += 1;
                    if count >= limit {
                        return count;
                    }
                    stack.push(y);
                }
            }
        }
        count
    }
}
