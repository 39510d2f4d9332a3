//! PACE-2017 style decomposition files:
//! `s td <bags> <width+1> <n>`, `b <id> <v...>` lines, then tree edges `<a> <b>`.
//! Bag and vertex ids are 1-based. The root is bag 1 unless a `c root <id>`
//! comment says otherwise.

use std::fmt::Write as _;

use super::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::io::parse_id;
use crate::graph::VertexSet;

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn num(field: &str, line: usize) -> Result<usize> {
    field.parse().map_err(|_| Error::Parse { line, msg: format!("bad number `{field}`") })
}

pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let mut header: Option<usize> = None;
    let mut root = 1usize;
    let mut bags: Vec<Option<VertexSet>> = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            ["c", "root", id] => root = num(id, line_no)?,
            ["c", ..] => {}
            ["s", "td", nb, _, _] => {
                let nb = num(nb, line_no)?;
                bags = vec![None; nb];
                header = Some(nb);
            }
            ["b", id, rest @ ..] => {
                let Some(nb) = header else { return err(line_no, "bag before header") };
                let id = num(id, line_no)?;
                if id == 0 || id > nb {
                    return err(line_no, format!("bag id {id} out of range"));
                }
                if bags[id - 1].is_some() {
                    return err(line_no, format!("bag {id} defined twice"));
                }
                let bag = rest.iter().map(|f| parse_id(f, line_no)).collect::<Result<VertexSet>>()?;
                bags[id - 1] = Some(bag);
            }
            [a, b] => {
                if header.is_none() {
                    return err(line_no, "edge before header");
                }
                let (a, b) = (num(a, line_no)?, num(b, line_no)?);
                if a == 0 || b == 0 {
                    return err(line_no, "bag ids are 1-based");
                }
                edges.push((a - 1, b - 1));
            }
            _ => return err(line_no, format!("unrecognised line `{raw}`")),
        }
    }
    if header.is_none() {
        return err(0, "missing `s td` header");
    }
    let bags: Vec<VertexSet> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or(Error::Parse { line: 0, msg: format!("bag {} missing", i + 1) }))
        .collect::<Result<_>>()?;
    if root == 0 || root > bags.len() {
        return err(0, format!("root bag {root} out of range"));
    }
    TreeDecomposition::from_parts(bags, &edges, root - 1)
}

/// Serialise with bag ids in node order; the root is announced with `c root`.
pub fn write_td(td: &TreeDecomposition, num_vertices: usize) -> String {
    let max_bag = td.node_ids().map(|t| td.bag(t).len()).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "c root {}", td.root().0 + 1);
    let _ = writeln!(out, "s td {} {} {}", td.len(), max_bag, num_vertices);
    for t in td.node_ids() {
        let _ = write!(out, "b {}", t.0 + 1);
        for v in td.bag(t) {
            let _ = write!(out, " {}", v.0 + 1);
        }
        out.push('\n');
    }
    for (p, c) in td.tree_edges() {
        let _ = writeln!(out, "{} {}", p.0 + 1, c.0 + 1);
    }
    out
}
