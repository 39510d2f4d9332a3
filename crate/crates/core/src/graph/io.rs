//! Graph file formats.
//!
//! Text: a `p <n> <m>` header, then `m` lines `<u> <v>` with 1-based vertex ids;
//! lines starting with `c` are comments. Vertex `i` of the file is
//! `VertexId(i - 1)` in memory.
//!
//! JSON: `{"vertices": [..], "edges": [[u, v], ..]}`, also 1-based.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Graph, VertexId};
use crate::error::{Error, Result};

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut g: Option<Graph> = None;
    let mut expected_edges = 0usize;
    let mut seen_edges = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "p" {
            if g.is_some() {
                return parse_err(lineno, "duplicate header");
            }
            // accept both `p n m` and the PACE-style `p <tag> n m`
            let nums: Vec<&str> = fields[1..].iter().copied().filter(|f| f.parse::<u64>().is_ok()).collect();
            if nums.len() != 2 {
                return parse_err(lineno, "expected `p <n> <m>`");
            }
            let n: u32 = nums[0].parse().map_err(|_| Error::Parse { line: lineno, msg: "bad n".into() })?;
            expected_edges = nums[1].parse().map_err(|_| Error::Parse { line: lineno, msg: "bad m".into() })?;
            g = Some(Graph::from_edges(n, &[])?);
            continue;
        }
        let Some(graph) = g.as_mut() else {
            return parse_err(lineno, "edge before header");
        };
        if fields.len() != 2 {
            return parse_err(lineno, "expected `<u> <v>`");
        }
        let u = parse_id(fields[0], lineno)?;
        let v = parse_id(fields[1], lineno)?;
        graph
            .add_edge(u, v)
            .or_else(|e| parse_err(lineno, e.to_string()))?;
        seen_edges += 1;
    }
    let Some(g) = g else {
        return parse_err(0, "missing header");
    };
    if seen_edges != expected_edges {
        return parse_err(0, format!("header announced {expected_edges} edges, found {seen_edges}"));
    }
    Ok(g)
}

pub(crate) fn parse_id(field: &str, line: usize) -> Result<VertexId> {
    match field.parse::<u32>() {
        Ok(0) | Err(_) => parse_err(line, format!("bad vertex id `{field}`")),
        Ok(x) => Ok(VertexId(x - 1)),
    }
}

/// Write `g` in text form. Vertices are numbered `1..=n` in ascending id order;
/// when identifiers have gaps the returned map gives the file id of each vertex.
pub fn write_graph(g: &Graph) -> (String, BTreeMap<VertexId, u32>) {
    let map: BTreeMap<VertexId, u32> = g.vertices().zip(1u32..).collect();
    let mut out = String::new();
    let _ = writeln!(out, "p {} {}", g.num_vertices(), g.num_edges());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", map[&u], map[&v]);
    }
    (out, map)
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<u32>,
    edges: Vec<[u32; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            vertices: self.vertices().map(|v| v.0 + 1).collect(),
            edges: self.edges().into_iter().map(|(u, v)| [u.0 + 1, v.0 + 1]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = GraphRepr::deserialize(d)?;
        let mut ids = repr.vertices.clone();
        ids.sort_unstable();
        let mut g = Graph::new();
        for id in ids {
            if id == 0 {
                return Err(D::Error::custom("vertex ids are 1-based"));
            }
            g.insert_vertex(VertexId(id - 1)).map_err(D::Error::custom)?;
        }
        for [u, v] in repr.edges {
            if u == 0 || v == 0 {
                return Err(D::Error::custom("vertex ids are 1-based"));
            }
            g.add_edge(VertexId(u - 1), VertexId(v - 1)).map_err(D::Error::custom)?;
        }
        Ok(g)
    }
}

/// A whitespace-separated list of 1-based vertex ids (`c` comment lines allowed).
pub fn parse_id_list(text: &str) -> Result<Vec<VertexId>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('c') {
            continue;
        }
        for f in line.split_whitespace() {
            out.push(parse_id(f, i + 1)?);
        }
    }
    Ok(out)
}
