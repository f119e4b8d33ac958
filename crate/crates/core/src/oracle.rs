//! Brute-force ground truth for everything the counter computes.
//!
//! These routines are deliberately naive and stay independent of the counting
//! recursion: partial cycle covers are enumerated as explicit cycle families,
//! cuts by explicit masks, and matchings of the doubled graph by backtracking.
//! Hard size guards make accidental use on large instances loud.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::counter::{CounterError, Label, TailAssignment};
use crate::graph::{EdgeId, Graph, Vertex};
use crate::poly::{Degrees, ExactInt, TruncatedPoly3};
use crate::treedepth::{EliminationForest, LeafPlan};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the brute-force oracle: {what} = {value}, limit {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("expected {expected} edge weights, found {found}")]
    WeightCountMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Assignment(#[from] CounterError),
}

/// The doubled graph: two copies of every vertex, joined by a pairing edge;
/// four copy edges per base edge. Simple perfect matchings of this graph
/// project to partial cycle covers of the base graph.
#[derive(Clone, Debug)]
pub struct AuxGraph {
    base_n: usize,
    edges: Vec<AuxEdge>,
}

/// An edge of the doubled graph. `base` is the projected base edge for copy
/// edges and `None` for pairing edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxEdge {
    pub a: usize,
    pub b: usize,
    pub base: Option<EdgeId>,
}

impl AuxGraph {
    pub fn build(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut edges = Vec::with_capacity(n + 4 * g.edge_count());
        for v in 0..n {
            edges.push(AuxEdge {
                a: Self::copy(v, 0),
                b: Self::copy(v, 1),
                base: None,
            });
        }
        for (e, &(x, y)) in g.edges().iter().enumerate() {
            for s in 0..2 {
                for t in 0..2 {
                    edges.push(AuxEdge {
                        a: Self::copy(x, s),
                        b: Self::copy(y, t),
                        base: Some(e),
                    });
                }
            }
        }
        AuxGraph { base_n: n, edges }
    }

    /// Copy `side` (0 or 1) of base vertex `v`.
    pub fn copy(v: Vertex, side: usize) -> usize {
        2 * v + side
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.base_n
    }

    pub fn edges(&self) -> &[AuxEdge] {
        &self.edges
    }

    pub fn pairing_edge_count(&self) -> usize {
        self.base_n
    }

    pub fn copy_edge_count(&self) -> usize {
        self.edges.len() - self.base_n
    }

    /// Edge weight under the base weight function: pairing edges weigh 0.
    pub fn weight(&self, idx: usize, weights: &[u64]) -> u64 {
        match self.edges[idx].base {
            Some(e) => weights[e],
            None => 0,
        }
    }
}

fn check_weights(g: &Graph, weights: &[u64]) -> Result<(), OracleError> {
    if weights.len() != g.edge_count() {
        return Err(OracleError::WeightCountMismatch {
            expected: g.edge_count(),
            found: weights.len(),
        });
    }
    Ok(())
}

/// Number of cuts of `0..n` consistent with the edge set, by explicit
/// enumeration of all `2^n` masks.
pub fn count_consistent_cuts_naive(n: usize, edges: &[(Vertex, Vertex)]) -> u128 {
    assert!(n <= 20, "naive cut enumeration is limited to n <= 20");
    let mut count = 0u128;
    for mask in 0u32..(1u32 << n) {
        if edges
            .iter()
            .all(|&(x, y)| (mask >> x) & 1 == (mask >> y) & 1)
        {
            count += 1;
        }
    }
    count
}

/// Number of cuts of `0..n` consistent with the edge set, via connected
/// components: each component sits wholly on one side, vertices not touched
/// by any edge are free.
pub fn count_consistent_cuts(n: usize, edges: &[(Vertex, Vertex)]) -> u128 {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut cur = x;
        while parent[cur] != r {
            let next = parent[cur];
            parent[cur] = r;
            cur = next;
        }
        r
    }
    let mut touched = vec![false; n];
    for &(x, y) in edges {
        touched[x] = true;
        touched[y] = true;
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        if rx != ry {
            parent[rx] = ry;
        }
    }
    let touched_count = touched.iter().filter(|&&t| t).count();
    let components = (0..n)
        .filter(|&v| touched[v] && find(&mut parent, v) == v)
        .count();
    1u128 << (n - touched_count + components)
}

/// Is there a family of at most `k` vertex-disjoint cycles covering exactly
/// `target` vertices? Enumerates cycle families directly: each cycle is
/// grown from its minimum vertex over larger unused vertices.
pub fn brute_pcc(g: &Graph, k: usize, target: usize) -> Result<bool, OracleError> {
    let n = g.vertex_count();
    if n > 12 {
        return Err(OracleError::TooLarge {
            what: "vertex count",
            value: n,
            limit: 12,
        });
    }
    fn close_or_extend(
        g: &Graph,
        origin: Vertex,
        cur: Vertex,
        used: &mut Vec<bool>,
        len: usize,
        budget: usize,
        covered_after: &mut dyn FnMut(&mut Vec<bool>, usize) -> bool,
    ) -> bool {
        for &w in g.neighbors(cur) {
            if w == origin && len >= 3 && covered_after(used, len) {
                return true;
            }
            if w > origin && !used[w] && len < budget {
                used[w] = true;
                let found =
                    close_or_extend(g, origin, w, used, len + 1, budget, covered_after);
                used[w] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    fn family(g: &Graph, start: Vertex, used: &mut Vec<bool>, covered: usize, cycles: usize, k: usize, target: usize) -> bool {
        if covered == target {
            return true;
        }
        if cycles == k || covered + 3 > target {
            return false;
        }
        for v in start..g.vertex_count() {
            if used[v] {
                continue;
            }
            used[v] = true;
            let budget = target - covered;
            let mut on_close = |used: &mut Vec<bool>, len: usize| {
                family(g, v + 1, used, covered + len, cycles + 1, k, target)
            };
            let found = close_or_extend(g, v, v, used, 1, budget, &mut on_close);
            used[v] = false;
            if found {
                return true;
            }
        }
        false
    }
    let mut used = vec![false; n];
    Ok(family(g, 0, &mut used, 0, 0, k, target))
}

/// Exact number of (relaxed solution, consistent cut) pairs at weight `w`:
/// edge sets of size `target` with all degrees in {0, 2}, each counted once
/// per consistent cut, cuts enumerated explicitly.
pub fn brute_count_cw(
    g: &Graph,
    weights: &[u64],
    w: u64,
    target: usize,
) -> Result<u128, OracleError> {
    let n = g.vertex_count();
    let m = g.edge_count();
    if n > 10 {
        return Err(OracleError::TooLarge { what: "vertex count", value: n, limit: 10 });
    }
    if m > 24 {
        return Err(OracleError::TooLarge { what: "edge count", value: m, limit: 24 });
    }
    check_weights(g, weights)?;
    fn rec(
        g: &Graph,
        weights: &[u64],
        w: u64,
        target: usize,
        idx: usize,
        chosen: Vec<EdgeId>,
        deg: &mut Vec<u8>,
        weight_sum: u64,
        total: &mut u128,
    ) {
        let m = g.edge_count();
        if chosen.len() == target {
            if weight_sum == w && deg.iter().all(|&d| d == 0 || d == 2) {
                let pairs: Vec<(Vertex, Vertex)> = chosen.iter().map(|&e| g.edge(e)).collect();
                *total += count_consistent_cuts_naive(g.vertex_count(), &pairs);
            }
            return;
        }
        if idx == m || chosen.len() + (m - idx) < target {
            return;
        }
        let (x, y) = g.edge(idx);
        if deg[x] < 2 && deg[y] < 2 {
            deg[x] += 1;
            deg[y] += 1;
            let mut with = chosen.clone();
            with.push(idx);
            rec(g, weights, w, target, idx + 1, with, deg, weight_sum + weights[idx], total);
            deg[x] -= 1;
            deg[y] -= 1;
        }
        rec(g, weights, w, target, idx + 1, chosen, deg, weight_sum, total);
    }
    let mut total = 0u128;
    let mut deg = vec![0u8; n];
    rec(g, weights, w, target, 0, Vec::new(), &mut deg, 0, &mut total);
    Ok(total)
}

/// Visits every simple perfect matching of the doubled graph of `g`. The
/// visitor receives, for each matching edge, its projected base edge
/// (`None` for pairing edges).
pub fn for_each_simple_perfect_matching(
    g: &Graph,
    mut visit: impl FnMut(&[Option<EdgeId>]),
) -> Result<(), OracleError> {
    let n = g.vertex_count();
    if n > 8 {
        return Err(OracleError::TooLarge { what: "vertex count", value: n, limit: 8 });
    }
    let aux = AuxGraph::build(g);
    let nn = aux.vertex_count();
    // Adjacency over aux vertices.
    let mut adj: Vec<Vec<(usize, Option<EdgeId>)>> = vec![Vec::new(); nn];
    for ae in aux.edges() {
        adj[ae.a].push((ae.b, ae.base));
        adj[ae.b].push((ae.a, ae.base));
    }
    fn rec(
        nn: usize,
        adj: &[Vec<(usize, Option<EdgeId>)>],
        matched: &mut Vec<bool>,
        copy_used: &mut Vec<bool>,
        picked: &mut Vec<Option<EdgeId>>,
        visit: &mut dyn FnMut(&[Option<EdgeId>]),
    ) {
        let a = match (0..nn).find(|&v| !matched[v]) {
            Some(a) => a,
            None => {
                visit(picked);
                return;
            }
        };
        matched[a] = true;
        for &(b, base) in &adj[a] {
            if matched[b] {
                continue;
            }
            if let Some(e) = base {
                if copy_used[e] {
                    continue;
                }
                copy_used[e] = true;
            }
            matched[b] = true;
            picked.push(base);
            rec(nn, adj, matched, copy_used, picked, visit);
            picked.pop();
            matched[b] = false;
            if let Some(e) = base {
                copy_used[e] = false;
            }
        }
        matched[a] = false;
    }
    let mut matched = vec![false; nn];
    let mut copy_used = vec![false; g.edge_count()];
    let mut picked = Vec::with_capacity(n);
    rec(nn, &adj, &mut matched, &mut copy_used, &mut picked, &mut visit);
    Ok(())
}

/// For every `(weight, base edges used)` class, the number of (simple perfect
/// matching, consistent cut) pairs of the doubled graph.
pub fn brute_count_mw_table(
    g: &Graph,
    weights: &[u64],
) -> Result<BTreeMap<(u64, usize), u128>, OracleError> {
    check_weights(g, weights)?;
    let n = g.vertex_count();
    let mut table: BTreeMap<(u64, usize), u128> = BTreeMap::new();
    for_each_simple_perfect_matching(g, |pm| {
        let mut weight = 0u64;
        let mut projected: Vec<(Vertex, Vertex)> = Vec::new();
        for base in pm.iter().flatten() {
            weight += weights[*base];
            projected.push(g.edge(*base));
        }
        let cuts = count_consistent_cuts(n, &projected);
        *table.entry((weight, projected.len())).or_insert(0) += cuts;
    })?;
    Ok(table)
}

/// The number of (simple perfect matching, consistent cut) pairs at weight
/// `w` with exactly `target` base edges used.
pub fn brute_count_mw(
    g: &Graph,
    weights: &[u64],
    w: u64,
    target: usize,
) -> Result<u128, OracleError> {
    Ok(brute_count_mw_table(g, weights)?
        .get(&(w, target))
        .copied()
        .unwrap_or(0))
}

/// Which node-level family to count: labels on the full tail with the
/// subtree strictly below (`Inclusive`), or labels on the strict tail with
/// the node inside the subtree (`Exclusive`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeMode {
    Inclusive,
    Exclusive,
}

/// Counts compatible (edge set, cut) pairs at node `u` by exhaustive
/// enumeration, as a polynomial over the exact ring. See
/// [`brute_node_poly_one_copy`] for the copy convention of 1-labels.
pub fn brute_node_poly(
    g: &Graph,
    t: &EliminationForest,
    plan: &LeafPlan,
    u: Vertex,
    f: &TailAssignment,
    mode: NodeMode,
    caps: Degrees,
    weights: &[u64],
) -> Result<TruncatedPoly3<ExactInt>, OracleError> {
    brute_node_poly_one_copy(g, t, plan, u, f, mode, caps, weights, 1)
}

/// Like [`brute_node_poly`], but 1-labels protect the given copy (0 or 1)
/// instead of copy 1. Counting with either convention must agree; that
/// symmetry is what justifies the factor 2 in the exclusive combination.
#[allow(clippy::too_many_arguments)]
pub fn brute_node_poly_one_copy(
    g: &Graph,
    t: &EliminationForest,
    plan: &LeafPlan,
    u: Vertex,
    f: &TailAssignment,
    mode: NodeMode,
    caps: Degrees,
    weights: &[u64],
    protected_copy: usize,
) -> Result<TruncatedPoly3<ExactInt>, OracleError> {
    let n = g.vertex_count();
    if n > 6 {
        return Err(OracleError::TooLarge { what: "vertex count", value: n, limit: 6 });
    }
    check_weights(g, weights)?;
    assert!(protected_copy <= 1);

    // Domain check: f must label exactly the tail (strict for Exclusive).
    let expected = match mode {
        NodeMode::Inclusive => t.tail_inclusive(u),
        NodeMode::Exclusive => t.tail_exclusive(u),
    };
    let found: Vec<Vertex> = f.entries().iter().map(|&(v, _)| v).collect();
    if expected != found {
        return Err(CounterError::BadDomain { u }.into());
    }

    let in_subtree: Vec<bool> = (0..n).map(|v| t.is_ancestor(u, v)).collect();
    // Vertices whose configuration is enumerated here (no label): the subtree,
    // without u itself in the inclusive case.
    let enumerated: Vec<bool> = (0..n)
        .map(|v| in_subtree[v] && (mode == NodeMode::Exclusive || v != u))
        .collect();
    // Cut sides are assigned to enumerated vertices and to labeled vertices
    // owned by a leaf inside the subtree; every other vertex either has its
    // side forced by its label or carries no selected edges.
    let in_cut_domain: Vec<bool> = (0..n)
        .map(|v| enumerated[v] || in_subtree[plan.owner_leaf(v)])
        .collect();

    // The responsibility region: pairing edges of owned vertices, copy edges
    // of owned base edges, over all leaves inside the subtree.
    let pairing_vertices: Vec<Vertex> =
        (0..n).filter(|&v| in_subtree[plan.owner_leaf(v)]).collect();
    let base_edges: Vec<EdgeId> = (0..g.edge_count())
        .filter(|&e| in_subtree[plan.owner_leaf(plan.deeper_endpoint(e))])
        .collect();
    if base_edges.len() > 8 {
        return Err(OracleError::TooLarge {
            what: "owned base edges",
            value: base_edges.len(),
            limit: 8,
        });
    }

    let label_of = |v: Vertex| -> Option<Label> { f.label(v) };
    // Is copy `c` of vertex `v` allowed to carry selected edges?
    let copy_open = |v: Vertex, c: usize| -> bool {
        match label_of(v) {
            None => true,
            Some(Label::Zero) => false,
            Some(Label::OneL) | Some(Label::OneR) => c != protected_copy,
            Some(Label::TwoL) | Some(Label::TwoR) => true,
        }
    };
    let forced_left = |v: Vertex| -> Option<bool> {
        match label_of(v)? {
            Label::Zero => None,
            Label::OneL | Label::TwoL => Some(true),
            Label::OneR | Label::TwoR => Some(false),
        }
    };

    #[derive(Default)]
    struct Acc {
        terms: BTreeMap<(usize, usize, usize), i128>,
    }
    struct State {
        touched: Vec<u8>,          // per aux vertex: selected edges incident
        copy_pairs: Vec<(Vertex, Vertex)>, // projected selected copy edges
        weight: u64,
        total_edges: usize,
        cover_edges: usize,
    }

    let mut acc = Acc::default();
    let mut state = State {
        touched: vec![0; 2 * n],
        copy_pairs: Vec::new(),
        weight: 0,
        total_edges: 0,
        cover_edges: 0,
    };

    // Group choices: pairing edge of each owned vertex in or out; for each
    // owned base edge one of its four copies or nothing.
    enum Group {
        Pairing(Vertex),
        Base(EdgeId),
    }
    let groups: Vec<Group> = pairing_vertices
        .iter()
        .map(|&v| Group::Pairing(v))
        .chain(base_edges.iter().map(|&e| Group::Base(e)))
        .collect();

    fn finish(
        n: usize,
        enumerated: &[bool],
        in_cut_domain: &[bool],
        forced_left: &dyn Fn(Vertex) -> Option<bool>,
        state: &State,
        acc: &mut Acc,
    ) {
        // Coverage: both copies of every enumerated vertex must be touched.
        for v in 0..n {
            if enumerated[v] && (state.touched[2 * v] == 0 || state.touched[2 * v + 1] == 0) {
                return;
            }
        }
        // Count side assignments: components of the projected copy edges must
        // be monochromatic and agree with forced sides; anything free in the
        // cut domain doubles the count.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            r
        }
        let mut e1_touched = vec![false; n];
        for &(x, y) in &state.copy_pairs {
            e1_touched[x] = true;
            e1_touched[y] = true;
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            if rx != ry {
                parent[rx] = ry;
            }
        }
        let mut ways = 1i128;
        // Component side counts.
        let mut comp_forced: BTreeMap<usize, (bool, bool)> = BTreeMap::new(); // (sawL, sawR)
        for v in 0..n {
            if !e1_touched[v] {
                continue;
            }
            let r = find(&mut parent, v);
            let entry = comp_forced.entry(r).or_insert((false, false));
            match forced_left(v) {
                Some(true) => entry.0 = true,
                Some(false) => entry.1 = true,
                None => {}
            }
        }
        for (_, (saw_l, saw_r)) in comp_forced {
            match (saw_l, saw_r) {
                (true, true) => return, // crossing edge, inconsistent
                (false, false) => ways *= 2,
                _ => {}
            }
        }
        for v in 0..n {
            if in_cut_domain[v] && !e1_touched[v] && forced_left(v).is_none() {
                ways *= 2;
            }
        }
        *acc.terms
            .entry((state.weight as usize, state.total_edges, state.cover_edges))
            .or_insert(0) += ways;
    }

    fn rec(
        g: &Graph,
        groups: &[Group],
        idx: usize,
        copy_open: &dyn Fn(Vertex, usize) -> bool,
        forced_left: &dyn Fn(Vertex) -> Option<bool>,
        enumerated: &[bool],
        in_cut_domain: &[bool],
        weights: &[u64],
        state: &mut State,
        acc: &mut Acc,
    ) {
        let n = g.vertex_count();
        if idx == groups.len() {
            finish(n, enumerated, in_cut_domain, forced_left, state, acc);
            return;
        }
        // Skip the group entirely.
        rec(g, groups, idx + 1, copy_open, forced_left, enumerated, in_cut_domain, weights, state, acc);
        match groups[idx] {
            Group::Pairing(v) => {
                if copy_open(v, 0) && copy_open(v, 1) {
                    state.touched[2 * v] += 1;
                    state.touched[2 * v + 1] += 1;
                    state.total_edges += 1;
                    rec(g, groups, idx + 1, copy_open, forced_left, enumerated, in_cut_domain, weights, state, acc);
                    state.total_edges -= 1;
                    state.touched[2 * v] -= 1;
                    state.touched[2 * v + 1] -= 1;
                }
            }
            Group::Base(e) => {
                let (x, y) = g.edge(e);
                for s in 0..2 {
                    for tt in 0..2 {
                        if copy_open(x, s) && copy_open(y, tt) {
                            state.touched[2 * x + s] += 1;
                            state.touched[2 * y + tt] += 1;
                            state.copy_pairs.push((x, y));
                            state.weight += weights[e];
                            state.total_edges += 1;
                            state.cover_edges += 1;
                            rec(g, groups, idx + 1, copy_open, forced_left, enumerated, in_cut_domain, weights, state, acc);
                            state.cover_edges -= 1;
                            state.total_edges -= 1;
                            state.weight -= weights[e];
                            state.copy_pairs.pop();
                            state.touched[2 * x + s] -= 1;
                            state.touched[2 * y + tt] -= 1;
                        }
                    }
                }
            }
        }
    }

    rec(
        g, &groups, 0, &copy_open, &forced_left, &enumerated, &in_cut_domain, weights, &mut state,
        &mut acc,
    );

    let mut out = TruncatedPoly3::zero(ExactInt, caps);
    for ((a, b, c), v) in acc.terms {
        let mono = TruncatedPoly3::monomial(ExactInt, caps, a, b, c, v);
        out = out.add(&mono).expect("uniform caps");
    }
    Ok(out)
}
