//! Weighted undirected graphs and the G-set edge-list format.
//!
//! The text format is a header line `n m` followed by `m` lines `u v w`,
//! with 1-indexed vertex ids and integer weights. Vertices are 0-indexed in
//! memory.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Largest accepted absolute edge weight. Keeps every incident weight sum,
/// and therefore every move gain and objective value, well inside `i64`.
pub const MAX_ABS_WEIGHT: i64 = i32::MAX as i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: i64,
}

/// Immutable weighted undirected graph.
///
/// Adjacency is stored in compressed rows sorted by neighbor id, so an edge
/// weight lookup is a binary search in the shorter row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, i64)>,
    max_degree: usize,
    max_abs_incident_weight: i64,
    max_abs_weight: i64,
    total_weight: i64,
}

/// Summary statistics recomputed from the edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub density: f64,
    /// `(min, max)` edge weight, `None` for an edgeless graph.
    pub weight_range: Option<(i64, i64)>,
    pub max_degree: usize,
    pub max_abs_incident_weight: i64,
}

impl Graph {
    /// Builds a graph from 0-indexed edges, rejecting self-loops, duplicate
    /// pairs, out-of-range ids and oversized weights.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if let Some(msg) = check_edge(n, u, v, w, &mut seen) {
                return Err(Error::InvalidGraph(format!("{msg} for edge ({u}, {v})")));
            }
            list.push(Edge { u, v, w });
        }
        Ok(Self::build(n, list))
    }

    fn build(n: usize, edges: Vec<Edge>) -> Self {
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![(0usize, 0i64); 2 * edges.len()];
        for e in &edges {
            adjacency[fill[e.u]] = (e.v, e.w);
            fill[e.u] += 1;
            adjacency[fill[e.v]] = (e.u, e.w);
            fill[e.v] += 1;
        }
        for v in 0..n {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable_by_key(|&(u, _)| u);
        }

        let max_degree = degree.iter().copied().max().unwrap_or(0);
        let max_abs_incident_weight = (0..n)
            .map(|v| {
                adjacency[offsets[v]..offsets[v + 1]]
                    .iter()
                    .map(|&(_, w)| w.abs())
                    .sum::<i64>()
            })
            .max()
            .unwrap_or(0);
        let max_abs_weight = edges.iter().map(|e| e.w.abs()).max().unwrap_or(0);
        let total_weight = edges.iter().map(|e| e.w).sum();

        Graph {
            n,
            edges,
            offsets,
            adjacency,
            max_degree,
            max_abs_incident_weight,
            max_abs_weight,
            total_weight,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor id.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(usize, i64)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Weight of edge `{u, v}`, or 0 when the vertices are not adjacent.
    pub fn weight(&self, u: usize, v: usize) -> i64 {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        let row = self.neighbors(a);
        match row.binary_search_by_key(&b, |&(x, _)| x) {
            Ok(i) => row[i].1,
            Err(_) => 0,
        }
    }

    /// Maximum vertex degree `d`.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `W`: maximum over vertices of the sum of absolute incident weights.
    /// Every single-transfer gain lies in `[-W, W]`.
    pub fn max_abs_incident_weight(&self) -> i64 {
        self.max_abs_incident_weight
    }

    /// Largest absolute edge weight.
    pub fn max_abs_weight(&self) -> i64 {
        self.max_abs_weight
    }

    /// Sum of all edge weights (the objective when every edge is cut).
    pub fn total_weight(&self) -> i64 {
        self.total_weight
    }

    pub fn stats(&self) -> GraphStats {
        let n = self.n;
        let m = self.m();
        let density = if n >= 2 {
            2.0 * m as f64 / (n as f64 * (n as f64 - 1.0))
        } else {
            0.0
        };
        let weight_range = self
            .edges
            .iter()
            .fold(None, |acc: Option<(i64, i64)>, e| match acc {
                None => Some((e.w, e.w)),
                Some((lo, hi)) => Some((lo.min(e.w), hi.max(e.w))),
            });
        GraphStats {
            n,
            m,
            density,
            weight_range,
            max_degree: self.max_degree,
            max_abs_incident_weight: self.max_abs_incident_weight,
        }
    }

    /// Serializes to the edge-list format accepted by [`parse_instance`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 * (self.m() + 1));
        let _ = writeln!(out, "{} {}", self.n, self.m());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w);
        }
        out
    }
}

fn check_edge(
    n: usize,
    u: usize,
    v: usize,
    w: i64,
    seen: &mut HashSet<(usize, usize)>,
) -> Option<&'static str> {
    if u >= n || v >= n {
        return Some("vertex id out of range");
    }
    if u == v {
        return Some("self-loop");
    }
    if w.abs() > MAX_ABS_WEIGHT {
        return Some("edge weight out of range");
    }
    if !seen.insert((u.min(v), u.max(v))) {
        return Some("duplicate edge");
    }
    None
}

fn parse_int<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} '{tok}'"),
    })
}

/// Parses a graph in G-set edge-list format. Blank lines are ignored.
pub fn parse_instance(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let mut toks = header.split_whitespace();
    let n: usize = parse_int(toks.next(), header_line, "vertex count in header")?;
    let m: usize = parse_int(toks.next(), header_line, "edge count in header")?;
    if toks.next().is_some() {
        return Err(Error::Parse {
            line: header_line,
            message: "malformed header".into(),
        });
    }

    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    let mut last_line = header_line;
    for (line, content) in lines {
        last_line = line;
        if edges.len() == m {
            return Err(Error::Parse {
                line,
                message: format!("edge count mismatch: header declares {m} edges"),
            });
        }
        let mut toks = content.split_whitespace();
        let u: i64 = parse_int(toks.next(), line, "vertex id")?;
        let v: i64 = parse_int(toks.next(), line, "vertex id")?;
        let w: i64 = parse_int(toks.next(), line, "edge weight")?;
        if toks.next().is_some() {
            return Err(Error::Parse {
                line,
                message: "trailing tokens".into(),
            });
        }
        let in_range = |x: i64| x >= 1 && x as u64 <= n as u64;
        if !in_range(u) || !in_range(v) {
            return Err(Error::Parse {
                line,
                message: "vertex id out of range".into(),
            });
        }
        let (u, v) = (u as usize - 1, v as usize - 1);
        if let Some(msg) = check_edge(n, u, v, w, &mut seen) {
            return Err(Error::Parse {
                line,
                message: msg.into(),
            });
        }
        edges.push(Edge { u, v, w });
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: last_line,
            message: format!(
                "edge count mismatch: header declares {m} edges, found {}",
                edges.len()
            ),
        });
    }
    Ok(Graph::build(n, edges))
}
