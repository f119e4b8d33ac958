//! Simple undirected graphs with dense 0-based vertex ids.
//!
//! Graphs are immutable after construction and safe to share across threads.
//! Edges are stored with the smaller endpoint first; that normalized pair is
//! the edge's identity everywhere in the crate (weights, responsibility plans,
//! matching projections).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

/// Dense 0-based vertex id.
pub type Vertex = usize;
/// Index into [`Graph::edges`].
pub type EdgeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: expected {expected}")]
    Malformed { line: usize, expected: &'static str },
    #[error("line {line}: vertex {v} out of range (n = {n})")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("expected {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("edge {u} {v} is already present")]
    EdgePresent { u: Vertex, v: Vertex },
    #[error("self-loops are not allowed (vertex {0})")]
    LoopRejected(Vertex),
    #[error("vertex {v} out of range (n = {n})")]
    BadVertex { v: usize, n: usize },
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph from an edge list. Endpoint order within a pair does
    /// not matter; self-loops and duplicate edges are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, GraphError> {
        let mut g = Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        };
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            let (u, v) = (u.min(v), u.max(v));
            if v >= n {
                return Err(GraphError::BadVertex { v, n });
            }
            if u == v {
                return Err(GraphError::LoopRejected(u));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::EdgePresent { u, v });
            }
            g.edges.push((u, v));
            g.adj[u].push(v);
            g.adj[v].push(u);
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    /// Parses the text graph format: a header line `n m`, then exactly `m`
    /// lines `u v`. Lines starting with `c` are comments. Line numbers in
    /// errors are 1-based and count comment lines.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut g: Option<Graph> = None;
        let mut seen = BTreeSet::new();
        let mut found = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let mut it = trimmed.split_ascii_whitespace();
            let a = it.next();
            let b = it.next();
            let (a, b) = match (a, b, it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(GraphError::Malformed {
                        line,
                        expected: "two whitespace-separated integers",
                    })
                }
            };
            let parse = |s: &str| -> Result<usize, GraphError> {
                s.parse().map_err(|_| GraphError::Malformed {
                    line,
                    expected: "two whitespace-separated integers",
                })
            };
            let (x, y) = (parse(a)?, parse(b)?);
            match header {
                None => {
                    header = Some((x, y));
                    g = Some(Graph {
                        n: x,
                        edges: Vec::with_capacity(y),
                        adj: vec![Vec::new(); x],
                    });
                }
                Some((n, m)) => {
                    let g = g.as_mut().expect("graph allocated with header");
                    if found == m {
                        return Err(GraphError::EdgeCountMismatch {
                            expected: m,
                            found: m + 1,
                        });
                    }
                    let (u, v) = (x.min(y), x.max(y));
                    if v >= n {
                        return Err(GraphError::VertexOutOfRange { line, v, n });
                    }
                    if u == v {
                        return Err(GraphError::SelfLoop { line, v: u });
                    }
                    if !seen.insert((u, v)) {
                        return Err(GraphError::DuplicateEdge { line, u, v });
                    }
                    g.edges.push((u, v));
                    g.adj[u].push(v);
                    g.adj[v].push(u);
                    found += 1;
                }
            }
        }
        let (_, m) = header.ok_or(GraphError::Malformed {
            line: 1,
            expected: "a header line `n m`",
        })?;
        if found != m {
            return Err(GraphError::EdgeCountMismatch { expected: m, found });
        }
        let mut g = g.expect("graph allocated with header");
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    /// Canonical serialization; `parse(g.to_text())` round-trips exactly, and
    /// `to_text` of a parsed canonical file reproduces it byte for byte.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized pairs, in storage order (`EdgeId` indexes this).
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        let key = (u.min(v), u.max(v));
        self.edges.iter().position(|&e| e == key)
    }

    /// A copy of the graph with edge `s t` appended; `self` is unchanged.
    pub fn with_edge(&self, s: Vertex, t: Vertex) -> Result<Self, GraphError> {
        if s >= self.n || t >= self.n {
            return Err(GraphError::BadVertex { v: s.max(t), n: self.n });
        }
        if s == t {
            return Err(GraphError::LoopRejected(s));
        }
        if self.has_edge(s, t) {
            return Err(GraphError::EdgePresent { u: s.min(t), v: s.max(t) });
        }
        let mut g = self.clone();
        g.edges.push((s.min(t), s.max(t)));
        g.adj[s].push(t);
        g.adj[t].push(s);
        g.adj[s].sort_unstable();
        g.adj[t].sort_unstable();
        Ok(g)
    }

    /// Connected components via BFS in ascending vertex order; component ids
    /// are assigned in order of first discovery.
    pub fn connected_components(&self) -> VertexPartition {
        let mut component_id = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = Vec::new();
        for start in 0..self.n {
            if component_id[start] != usize::MAX {
                continue;
            }
            component_id[start] = count;
            queue.push(start);
            while let Some(v) = queue.pop() {
                for &w in &self.adj[v] {
                    if component_id[w] == usize::MAX {
                        component_id[w] = count;
                        queue.push(w);
                    }
                }
            }
            count += 1;
        }
        VertexPartition {
            component_id,
            component_count: count,
        }
    }
}

/// Partition of the vertex set into connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    pub component_id: Vec<usize>,
    pub component_count: usize,
}

impl VertexPartition {
    pub fn same_component(&self, u: Vertex, v: Vertex) -> bool {
        self.component_id[u] == self.component_id[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_triangle() {
        let g = Graph::parse("3 3\n0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (0, 2)]);
    }

    #[test]
    fn parse_isolated_vertices() {
        let g = Graph::parse("2 0\n").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_rejects_self_loop() {
        assert_eq!(
            Graph::parse("2 1\n0 0\n"),
            Err(GraphError::SelfLoop { line: 2, v: 0 })
        );
    }

    #[test]
    fn parse_rejects_duplicate_and_out_of_range() {
        assert_eq!(
            Graph::parse("3 2\n0 1\n1 0\n"),
            Err(GraphError::DuplicateEdge { line: 3, u: 0, v: 1 })
        );
        assert_eq!(
            Graph::parse("2 1\n0 5\n"),
            Err(GraphError::VertexOutOfRange { line: 2, v: 5, n: 2 })
        );
    }

    #[test]
    fn parse_rejects_edge_count_mismatch() {
        assert!(matches!(
            Graph::parse("3 2\n0 1\n"),
            Err(GraphError::EdgeCountMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            Graph::parse("3 1\n0 1\n1 2\n"),
            Err(GraphError::EdgeCountMismatch { .. })
        ));
    }

    #[test]
    fn parse_skips_comments_and_counts_lines() {
        let g = Graph::parse("c a comment\n3 1\nc another\n0 2\n").unwrap();
        assert_eq!(g.edges(), &[(0, 2)]);
    }

    #[test]
    fn roundtrip_canonical() {
        let text = "4 3\n0 1\n1 2\n2 3\n";
        let g = Graph::parse(text).unwrap();
        assert_eq!(g.to_text(), text);
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn components_examples() {
        let k3 = Graph::parse("3 3\n0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(k3.connected_components().component_count, 1);

        let two_triangles =
            Graph::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let p = two_triangles.connected_components();
        assert_eq!(p.component_count, 2);
        assert!(p.same_component(0, 2));
        assert!(!p.same_component(0, 3));

        let edgeless = Graph::new(3, []).unwrap();
        assert_eq!(edgeless.connected_components().component_count, 3);
    }

    #[test]
    fn with_edge_examples() {
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let tri = path.with_edge(0, 2).unwrap();
        assert_eq!(tri.vertex_count(), path.vertex_count());
        assert_eq!(tri.edge_count(), path.edge_count() + 1);
        assert_eq!(path.edge_count(), 2);
        assert!(tri.has_edge(0, 2));

        let e2 = Graph::new(2, []).unwrap().with_edge(0, 1).unwrap();
        assert_eq!(e2.edges(), &[(0, 1)]);

        let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            k3.with_edge(1, 0),
            Err(GraphError::EdgePresent { u: 0, v: 1 })
        );
        assert_eq!(k3.with_edge(1, 1), Err(GraphError::LoopRejected(1)));
    }

    // component_count == n - #spanning-forest-edges, checked against a
    // union-find reimplementation.
    #[test]
    fn components_match_union_find() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.random_range(1..=50usize);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_bool(0.08) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, edges.iter().copied()).unwrap();
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(parent: &mut Vec<usize>, x: usize) -> usize {
                if parent[x] != x {
                    let r = find(parent, parent[x]);
                    parent[x] = r;
                }
                parent[x]
            }
            let mut merged = 0;
            for &(u, v) in &edges {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                    merged += 1;
                }
            }
            let p = g.connected_components();
            assert_eq!(p.component_count, n - merged);
            for u in 0..n {
                for v in 0..n {
                    let same = find(&mut parent, u) == find(&mut parent, v);
                    assert_eq!(p.same_component(u, v), same);
                }
            }
        }
    }
}
