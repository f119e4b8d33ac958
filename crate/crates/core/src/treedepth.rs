//! Elimination forests and the per-leaf responsibility plan.
//!
//! An elimination forest of a graph is a rooted forest on the same vertex set
//! in which every graph edge joins an ancestor-descendant pair. Its depth (the
//! maximum number of vertices on a root-to-leaf path) is the parameter the
//! counting recursion is exponential in.
//!
//! Children are kept in ascending vertex-id order, which fixes the left-most
//! leaf of every vertex and makes all runs reproducible.

use thiserror::Error;

use crate::graph::{EdgeId, Graph, Vertex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForestError {
    #[error("parent array has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vertex {v} has parent {p} out of range (n = {n})")]
    ParentOutOfRange { v: Vertex, p: usize, n: usize },
    #[error("parent pointers contain a cycle through vertex {0}")]
    Cycle(Vertex),
    #[error("edge {u} {v} joins vertices that are not in ancestor-descendant relation")]
    EdgeNotNested { u: Vertex, v: Vertex },
    #[error("forest entry {0:?} is not an integer or -1")]
    BadToken(String),
}

/// A validated elimination forest.
///
/// `level[v]` is the number of vertices on the path from the root of `v`'s
/// tree down to `v` (roots have level 1); `depth` is the maximum level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationForest {
    parent: Vec<Option<Vertex>>,
    children: Vec<Vec<Vertex>>,
    roots: Vec<Vertex>,
    level: Vec<usize>,
    depth: usize,
}

impl EliminationForest {
    /// Validates a parent array against a graph: the pointers must form a
    /// forest over `0..n`, and every edge of `g` must join an
    /// ancestor-descendant pair.
    pub fn from_parents(g: &Graph, parents: &[Option<Vertex>]) -> Result<Self, ForestError> {
        let n = g.vertex_count();
        if parents.len() != n {
            return Err(ForestError::LengthMismatch {
                expected: n,
                found: parents.len(),
            });
        }
        for (v, &p) in parents.iter().enumerate() {
            if let Some(p) = p {
                if p >= n {
                    return Err(ForestError::ParentOutOfRange { v, p, n });
                }
            }
        }
        // Levels by walking up with memoization; a walk longer than n vertices
        // or one that re-enters an in-progress chain is a cycle.
        let mut level = vec![0usize; n];
        for start in 0..n {
            if level[start] != 0 {
                continue;
            }
            let mut chain = vec![start];
            let mut cur = start;
            loop {
                if parents[cur] == Some(cur) {
                    return Err(ForestError::Cycle(cur));
                }
                match parents[cur] {
                    None => break,
                    Some(p) if level[p] != 0 => {
                        cur = p;
                        break;
                    }
                    Some(p) => {
                        if chain.len() > n {
                            return Err(ForestError::Cycle(p));
                        }
                        chain.push(p);
                        cur = p;
                    }
                }
            }
            let mut base = if parents[*chain.last().unwrap()].is_none() {
                0
            } else {
                level[cur]
            };
            for &v in chain.iter().rev() {
                if level[v] != 0 {
                    // Re-entered the chain itself: cycle.
                    return Err(ForestError::Cycle(v));
                }
                base += 1;
                level[v] = base;
            }
        }

        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (v, &p) in parents.iter().enumerate() {
            match p {
                Some(p) => children[p].push(v),
                None => roots.push(v),
            }
        }
        // Vertex order is ascending already; keep it explicit.
        for list in &mut children {
            debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
        }

        let forest = EliminationForest {
            parent: parents.to_vec(),
            children,
            roots,
            depth: level.iter().copied().max().unwrap_or(0),
            level,
        };
        for &(u, v) in g.edges() {
            if !forest.comparable(u, v) {
                return Err(ForestError::EdgeNotNested { u, v });
            }
        }
        Ok(forest)
    }

    /// Depth-first elimination forest: vertices and neighbors are visited in
    /// ascending id order, so the result is deterministic. Every non-tree edge
    /// of an undirected DFS joins an ancestor-descendant pair, which makes the
    /// tree a valid elimination forest.
    pub fn dfs_forest(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut parents: Vec<Option<Vertex>> = vec![None; n];
        let mut visited = vec![false; n];
        // Stack entries: (vertex, next neighbor position).
        let mut stack: Vec<(Vertex, usize)> = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            stack.push((start, 0));
            while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
                let nbrs = g.neighbors(v);
                match nbrs[*pos..].iter().find(|&&w| !visited[w]) {
                    Some(&w) => {
                        *pos = g.neighbors(v).binary_search(&w).unwrap() + 1;
                        visited[w] = true;
                        parents[w] = Some(v);
                        stack.push((w, 0));
                    }
                    None => {
                        stack.pop();
                    }
                }
            }
        }
        Self::from_parents(g, &parents).expect("a DFS tree is a valid elimination forest")
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<Vertex>] {
        &self.parent
    }

    /// Children of `v` in ascending id order.
    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    pub fn roots(&self) -> &[Vertex] {
        &self.roots
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        self.children[v].is_empty()
    }

    /// Number of vertices on the root-to-`v` path, root included.
    pub fn level(&self, v: Vertex) -> usize {
        self.level[v]
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// True iff one endpoint is an ancestor of the other (ancestorship is
    /// reflexive).
    pub fn comparable(&self, u: Vertex, v: Vertex) -> bool {
        self.is_ancestor(u, v) || self.is_ancestor(v, u)
    }

    /// True iff `a` is an ancestor of `d` (every vertex is its own ancestor).
    pub fn is_ancestor(&self, a: Vertex, d: Vertex) -> bool {
        let mut cur = d;
        while self.level[cur] > self.level[a] {
            cur = match self.parent[cur] {
                Some(p) => p,
                None => return false,
            };
        }
        cur == a
    }

    /// Ancestors of `v` including `v`, in root-to-`v` order.
    pub fn tail_inclusive(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.level[v]);
        let mut cur = Some(v);
        while let Some(x) = cur {
            out.push(x);
            cur = self.parent[x];
        }
        out.reverse();
        out
    }

    /// Strict ancestors of `v`, in root-to-parent order.
    pub fn tail_exclusive(&self, v: Vertex) -> Vec<Vertex> {
        let mut t = self.tail_inclusive(v);
        t.pop();
        t
    }

    /// Descendants of `v` including `v`, ascending by id.
    pub fn subtree(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// The forest with `s` promoted to the unique root: `s` is removed from
    /// its position (its children are spliced onto its former parent, or
    /// promoted to roots), then every remaining root becomes a child of `s`.
    ///
    /// The result is valid for the same graph, is valid for the graph with any
    /// edge `s x` added, and its depth grows by at most one.
    pub fn rerooted(&self, s: Vertex) -> Self {
        let n = self.parent.len();
        let mut parents = self.parent.clone();
        for &c in &self.children[s] {
            parents[c] = self.parent[s];
        }
        parents[s] = None;
        for v in 0..n {
            if v != s && parents[v].is_none() {
                parents[v] = Some(s);
            }
        }
        // Splicing preserves all ancestor relations among other vertices and
        // s becomes everyone's ancestor, so validity only needs re-deriving
        // the structure, not re-checking edges.
        let mut level = vec![0usize; n];
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (v, &p) in parents.iter().enumerate() {
            match p {
                Some(p) => children[p].push(v),
                None => roots.push(v),
            }
        }
        let mut stack: Vec<(Vertex, usize)> = roots.iter().map(|&r| (r, 1)).collect();
        while let Some((v, lv)) = stack.pop() {
            level[v] = lv;
            for &c in &children[v] {
                stack.push((c, lv + 1));
            }
        }
        EliminationForest {
            parent: parents,
            children,
            roots,
            depth: level.iter().copied().max().unwrap_or(0),
            level,
        }
    }

    /// Parses the forest file format: whitespace-separated integers, entry
    /// `i` being the parent of vertex `i`, or `-1` for a root.
    pub fn parse_parents(text: &str) -> Result<Vec<Option<Vertex>>, ForestError> {
        let mut out = Vec::new();
        for tok in text.split_ascii_whitespace() {
            if tok == "-1" {
                out.push(None);
            } else {
                match tok.parse::<usize>() {
                    Ok(p) => out.push(Some(p)),
                    Err(_) => return Err(ForestError::BadToken(tok.to_string())),
                }
            }
        }
        Ok(out)
    }

    /// Serializes to the forest file format (one line, `-1` for roots).
    pub fn parents_to_text(&self) -> String {
        let toks: Vec<String> = self
            .parent
            .iter()
            .map(|p| match p {
                Some(p) => p.to_string(),
                None => "-1".to_string(),
            })
            .collect();
        format!("{}\n", toks.join(" "))
    }
}

/// Per-leaf responsibility sets driving the counting recursion.
///
/// Every vertex `v` is owned by the leaf `owner(v)` reached from `v` by
/// iterating first children; every edge is owned by the owner of its deeper
/// endpoint. The owned vertex sets partition `V`, the owned edge sets
/// partition `E`, and both endpoints of an edge owned by leaf `u` lie on the
/// root-to-`u` path.
#[derive(Clone, Debug)]
pub struct LeafPlan {
    owner: Vec<Vertex>,
    owned_vertices: Vec<Vec<Vertex>>,
    owned_edges: Vec<Vec<EdgeId>>,
    deeper: Vec<Vertex>,
}

impl LeafPlan {
    pub fn new(g: &Graph, t: &EliminationForest) -> Self {
        let n = g.vertex_count();
        let mut owner = vec![usize::MAX; n];
        // Resolve owner by chasing first children, path-compressing along the
        // way (first-child chains are short but this keeps it linear).
        for v in 0..n {
            if owner[v] != usize::MAX {
                continue;
            }
            let mut chain = vec![v];
            let mut cur = v;
            while !t.is_leaf(cur) {
                cur = t.children(cur)[0];
                if owner[cur] != usize::MAX {
                    cur = owner[cur];
                    break;
                }
                chain.push(cur);
            }
            for x in chain {
                owner[x] = cur;
            }
        }
        let mut owned_vertices = vec![Vec::new(); n];
        for v in 0..n {
            owned_vertices[owner[v]].push(v);
        }
        let mut owned_edges = vec![Vec::new(); n];
        let mut deeper = Vec::with_capacity(g.edge_count());
        for (e, &(x, y)) in g.edges().iter().enumerate() {
            let d = if t.is_ancestor(x, y) { y } else { x };
            debug_assert!(t.comparable(x, y));
            deeper.push(d);
            owned_edges[owner[d]].push(e);
        }
        LeafPlan {
            owner,
            owned_vertices,
            owned_edges,
            deeper,
        }
    }

    /// The leaf responsible for vertex `v` (the left-most leaf below `v`).
    pub fn owner_leaf(&self, v: Vertex) -> Vertex {
        self.owner[v]
    }

    /// Vertices owned by leaf `u`; empty for non-leaves.
    pub fn owned_vertices(&self, u: Vertex) -> &[Vertex] {
        &self.owned_vertices[u]
    }

    /// Edges owned by leaf `u` (those whose deeper endpoint is owned by `u`).
    pub fn owned_edges(&self, u: Vertex) -> &[EdgeId] {
        &self.owned_edges[u]
    }

    /// The endpoint of `e` that is a descendant of the other.
    pub fn deeper_endpoint(&self, e: EdgeId) -> Vertex {
        self.deeper[e]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parents(v: &[i64]) -> Vec<Option<Vertex>> {
        v.iter().map(|&x| if x < 0 { None } else { Some(x as usize) }).collect()
    }

    #[test]
    fn validate_path_rooted_at_middle() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let t = EliminationForest::from_parents(&g, &parents(&[1, -1, 1])).unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.roots(), &[1]);
        assert_eq!(t.children(1), &[0, 2]);
    }

    #[test]
    fn validate_rejects_sibling_edge() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let err = EliminationForest::from_parents(&g, &parents(&[-1, 0, 0, 0])).unwrap_err();
        assert_eq!(err, ForestError::EdgeNotNested { u: 1, v: 2 });
    }

    #[test]
    fn validate_chain_over_k3() {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = EliminationForest::from_parents(&g, &parents(&[1, 2, -1])).unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(t.roots(), &[2]);
    }

    #[test]
    fn validate_rejects_cycle_and_bad_length() {
        let g = Graph::new(3, []).unwrap();
        assert!(matches!(
            EliminationForest::from_parents(&g, &parents(&[1, 2, 0])),
            Err(ForestError::Cycle(_))
        ));
        assert!(matches!(
            EliminationForest::from_parents(&g, &parents(&[2, 2, 2])),
            Err(ForestError::Cycle(2))
        ));
        assert!(matches!(
            EliminationForest::from_parents(&g, &parents(&[-1, 0])),
            Err(ForestError::LengthMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn dfs_forest_examples() {
        let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = EliminationForest::dfs_forest(&k3);
        assert_eq!(t.depth(), 3);

        let edgeless = Graph::new(3, []).unwrap();
        let t = EliminationForest::dfs_forest(&edgeless);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.roots(), &[0, 1, 2]);

        let c4 = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let t = EliminationForest::dfs_forest(&c4);
        assert_eq!(t.depth(), 4);
    }

    #[test]
    fn leaf_plan_star() {
        // Root 0 with children 1 (= left-most) and 2.
        let g = Graph::new(3, [(0, 1), (0, 2)]).unwrap();
        let t = EliminationForest::from_parents(&g, &parents(&[-1, 0, 0])).unwrap();
        let plan = LeafPlan::new(&g, &t);
        assert_eq!(plan.owner_leaf(0), 1);
        assert_eq!(plan.owned_vertices(1), &[0, 1]);
        assert_eq!(plan.owned_vertices(2), &[2]);
        assert_eq!(plan.owned_edges(1), &[g.edge_index(0, 1).unwrap()]);
        assert_eq!(plan.owned_edges(2), &[g.edge_index(0, 2).unwrap()]);
    }

    #[test]
    fn leaf_plan_chain_and_single() {
        let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = EliminationForest::from_parents(&k3, &parents(&[-1, 0, 1])).unwrap();
        let plan = LeafPlan::new(&k3, &t);
        assert_eq!(plan.owned_vertices(2), &[0, 1, 2]);
        assert_eq!(plan.owned_edges(2).len(), 3);

        let single = Graph::new(1, []).unwrap();
        let t = EliminationForest::from_parents(&single, &parents(&[-1])).unwrap();
        let plan = LeafPlan::new(&single, &t);
        assert_eq!(plan.owner_leaf(0), 0);
        assert_eq!(plan.owned_vertices(0), &[0]);
        assert!(plan.owned_edges(0).is_empty());
    }

    #[test]
    fn reroot_examples() {
        // Path a-b-c rooted at b; rerooting at c gives c -> b -> a, depth 3.
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let t = EliminationForest::from_parents(&g, &parents(&[1, -1, 1])).unwrap();
        let t2 = t.rerooted(2);
        assert_eq!(t2.roots(), &[2]);
        assert_eq!(t2.parent(1), Some(2));
        assert_eq!(t2.parent(0), Some(1));
        assert_eq!(t2.depth(), 3);

        // Two isolated roots; rerooting at 0 gives 0 -> 1, depth 2.
        let g = Graph::new(2, []).unwrap();
        let t = EliminationForest::from_parents(&g, &parents(&[-1, -1])).unwrap();
        let t2 = t.rerooted(0);
        assert_eq!(t2.parent(1), Some(0));
        assert_eq!(t2.depth(), 2);

        // Rerooting at an existing root keeps the shape.
        let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = EliminationForest::from_parents(&k3, &parents(&[-1, 0, 1])).unwrap();
        let t2 = t.rerooted(0);
        assert_eq!(t2.parents(), t.parents());
        assert_eq!(t2.depth(), 3);
    }

    #[test]
    fn forest_text_roundtrip() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let t = EliminationForest::from_parents(&g, &parents(&[1, -1, 1])).unwrap();
        let text = t.parents_to_text();
        assert_eq!(text, "1 -1 1\n");
        let back = EliminationForest::parse_parents(&text).unwrap();
        assert_eq!(back, t.parents());
        assert!(EliminationForest::parse_parents("0 x").is_err());
    }

    mod properties {
        use super::*;
        use rand::{Rng, SeedableRng};

        fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges).unwrap()
        }

        #[test]
        fn dfs_forest_always_validates() {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
            for _ in 0..200 {
                let n = rng.random_range(1..=8usize);
                let p = rng.random_range(0.0..1.0);
                let g = random_graph(&mut rng, n, p);
                let t = EliminationForest::dfs_forest(&g);
                assert!(EliminationForest::from_parents(&g, t.parents()).is_ok());
                // Depth equals the longest root-to-leaf path, recomputed.
                let recomputed = (0..n).map(|v| t.tail_inclusive(v).len()).max().unwrap_or(0);
                assert_eq!(t.depth(), recomputed);
            }
        }

        #[test]
        fn leaf_plan_partitions() {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
            for _ in 0..200 {
                let n = rng.random_range(1..=8usize);
                let p = rng.random_range(0.0..1.0);
                let g = random_graph(&mut rng, n, p);
                let t = EliminationForest::dfs_forest(&g);
                let plan = LeafPlan::new(&g, &t);
                let mut vertex_seen = vec![0usize; n];
                let mut edge_seen = vec![0usize; g.edge_count()];
                for u in 0..n {
                    if !t.is_leaf(u) {
                        assert!(plan.owned_vertices(u).is_empty());
                        assert!(plan.owned_edges(u).is_empty());
                        continue;
                    }
                    for &v in plan.owned_vertices(u) {
                        vertex_seen[v] += 1;
                        // owner is reached by iterating first children.
                        let mut cur = v;
                        while !t.is_leaf(cur) {
                            cur = t.children(cur)[0];
                        }
                        assert_eq!(cur, u);
                    }
                    for &e in plan.owned_edges(u) {
                        edge_seen[e] += 1;
                        let (x, y) = g.edge(e);
                        assert!(t.is_ancestor(x, u) && t.is_ancestor(y, u));
                    }
                }
                assert!(vertex_seen.iter().all(|&c| c == 1));
                assert!(edge_seen.iter().all(|&c| c == 1));
            }
        }

        #[test]
        fn reroot_validates_for_augmented_graph() {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
            for _ in 0..200 {
                let n = rng.random_range(1..=8usize);
                let p = rng.random_range(0.0..1.0);
                let g = random_graph(&mut rng, n, p);
                let t = EliminationForest::dfs_forest(&g);
                let s = rng.random_range(0..n);
                let t2 = t.rerooted(s);
                assert!(t2.depth() <= t.depth() + 1);
                assert!(EliminationForest::from_parents(&g, t2.parents()).is_ok());
                for x in 0..n {
                    if x == s || g.has_edge(s, x) {
                        continue;
                    }
                    let g2 = g.with_edge(s, x).unwrap();
                    assert!(EliminationForest::from_parents(&g2, t2.parents()).is_ok());
                }
            }
        }
    }
}
