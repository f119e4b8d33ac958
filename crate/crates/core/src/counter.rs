//! The counting recursion over an elimination forest.
//!
//! For a node `u` and an assignment of the five labels to the vertices on the
//! path from the root down to `u`, the recursion computes a truncated
//! polynomial whose `(weight, edges, cover)` coefficient counts the pairs
//! (edge set, cut side choice) that are compatible with the labels inside the
//! responsibility region of `u`. Labels say, for each path vertex, how many of
//! its two copies in the doubled graph may be touched by selected edges (0, 1,
//! or 2) and which side of the cut it sits on (L or R).
//!
//! * [`compute_exclusive`] branches over the five labels of `u` itself and
//!   combines the results by inclusion-exclusion.
//! * [`compute_inclusive`] multiplies the children's exclusive polynomials,
//!   or evaluates the closed-form product at a leaf.
//! * [`forest_poly`] multiplies the roots' exclusive polynomials; its
//!   coefficient at `(w, n, l)` counts, in the ring, the simple perfect
//!   matchings of the doubled graph of weight `w` using `l` base edges,
//!   paired with consistent cuts.
//!
//! The leaf product charges each vertex's private factors (the option of
//!   matching its two copies to each other, and the free side choice when
//! labeled 0) at exactly one leaf: the owner leaf from the [`LeafPlan`].
//! Charging them at every leaf on the tail would double-count whenever a
//! vertex has several leaves below it.
//!
//! Everything is plain recursion: no tables are kept, and the number of live
//! polynomial buffers stays proportional to the forest depth. Call counters
//! and the peak number of live buffers are recorded on the context.

use std::cell::Cell;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, Vertex};
use crate::poly::{CoefficientRing, Degrees, TruncatedPoly3};
use crate::treedepth::{EliminationForest, LeafPlan};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CounterError {
    #[error("expected {expected} edge weights, found {found}")]
    WeightCountMismatch { expected: usize, found: usize },
    #[error("vertex {0} is not labeled on the current tail")]
    NotOnTail(Vertex),
    #[error("vertex {0} is not a leaf of the forest")]
    NotALeaf(Vertex),
    #[error("assignment must label exactly the tail of vertex {u} in root-to-node order")]
    BadDomain { u: Vertex },
    #[error("vertex {v} out of range (n = {n})")]
    BadVertex { v: Vertex, n: usize },
    #[error("vertex {0} is already labeled")]
    AlreadyLabeled(Vertex),
}

/// Cut side of a labeled vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The five vertex states of the recursion.
///
/// The digit is the number of copies of the vertex that selected edges may
/// touch; the subscript is the forced cut side. `Zero` leaves the side free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Zero,
    OneL,
    OneR,
    TwoL,
    TwoR,
}

impl Label {
    /// Branch order of the recursion; fixed for reproducible instrumentation.
    pub const ALL: [Label; 5] = [Label::Zero, Label::OneL, Label::OneR, Label::TwoL, Label::TwoR];

    /// `(touchable copies, forced side)`, or `None` for `Zero`.
    pub fn copies_and_side(self) -> Option<(u8, Side)> {
        match self {
            Label::Zero => None,
            Label::OneL => Some((1, Side::Left)),
            Label::OneR => Some((1, Side::Right)),
            Label::TwoL => Some((2, Side::Left)),
            Label::TwoR => Some((2, Side::Right)),
        }
    }
}

/// Edge-selection coefficient for an edge whose endpoints carry the given
/// labels: the number of selectable copies of the edge, or `None` when the
/// edge cannot be selected (a `Zero` endpoint, or mixed cut sides).
pub fn edge_choices(a: Label, b: Label) -> Option<i64> {
    let (ca, sa) = a.copies_and_side()?;
    let (cb, sb) = b.copies_and_side()?;
    if sa == sb {
        Some(ca as i64 * cb as i64)
    } else {
        None
    }
}

/// Labels along the current root-to-node path, with O(1) lookup by vertex.
#[derive(Clone, Debug)]
pub struct TailAssignment {
    entries: Vec<(Vertex, Label)>,
    label_of: Vec<Option<Label>>,
}

impl TailAssignment {
    pub fn new(n: usize) -> Self {
        TailAssignment {
            entries: Vec::new(),
            label_of: vec![None; n],
        }
    }

    pub fn from_pairs(n: usize, pairs: &[(Vertex, Label)]) -> Result<Self, CounterError> {
        let mut t = Self::new(n);
        for &(v, l) in pairs {
            t.push(v, l)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, v: Vertex, label: Label) -> Result<(), CounterError> {
        if v >= self.label_of.len() {
            return Err(CounterError::BadVertex { v, n: self.label_of.len() });
        }
        if self.label_of[v].is_some() {
            return Err(CounterError::AlreadyLabeled(v));
        }
        self.entries.push((v, label));
        self.label_of[v] = Some(label);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<(Vertex, Label)> {
        let (v, l) = self.entries.pop()?;
        self.label_of[v] = None;
        Some((v, l))
    }

    pub fn label(&self, v: Vertex) -> Option<Label> {
        self.label_of.get(v).copied().flatten()
    }

    pub fn entries(&self) -> &[(Vertex, Label)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Instrumentation snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterStats {
    pub exclusive_calls: u64,
    pub inclusive_calls: u64,
    /// High-water mark of simultaneously live polynomial buffers.
    pub peak_live_polys: u32,
    pub depth: usize,
    /// `2 n 5^d`, the upper bound on total recursive calls (saturating).
    pub call_bound: u64,
}

pub fn call_bound(n: usize, depth: usize) -> u64 {
    let mut b = (2 * n) as u64;
    for _ in 0..depth {
        b = b.saturating_mul(5);
    }
    b
}

/// Everything one counting run needs: the instance, the per-leaf plan, edge
/// weights, the coefficient ring and degree caps, plus mutable counters.
///
/// A context is used by one task at a time; separate contexts over the same
/// graph and forest may run concurrently.
pub struct CountContext<'a, R: CoefficientRing> {
    graph: &'a Graph,
    forest: &'a EliminationForest,
    plan: &'a LeafPlan,
    weights: Vec<u64>,
    ring: R,
    caps: Degrees,
    exclusive_calls: Cell<u64>,
    inclusive_calls: Cell<u64>,
    live_polys: Cell<u32>,
    peak_polys: Cell<u32>,
}

impl<'a, R: CoefficientRing> CountContext<'a, R> {
    pub fn new(
        graph: &'a Graph,
        forest: &'a EliminationForest,
        plan: &'a LeafPlan,
        weights: Vec<u64>,
        ring: R,
        caps: Degrees,
    ) -> Result<Self, CounterError> {
        if weights.len() != graph.edge_count() {
            return Err(CounterError::WeightCountMismatch {
                expected: graph.edge_count(),
                found: weights.len(),
            });
        }
        Ok(CountContext {
            graph,
            forest,
            plan,
            weights,
            ring,
            caps,
            exclusive_calls: Cell::new(0),
            inclusive_calls: Cell::new(0),
            live_polys: Cell::new(0),
            peak_polys: Cell::new(0),
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn forest(&self) -> &EliminationForest {
        self.forest
    }

    pub fn plan(&self) -> &LeafPlan {
        self.plan
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn caps(&self) -> Degrees {
        self.caps
    }

    pub fn weight(&self, e: EdgeId) -> u64 {
        self.weights[e]
    }

    pub fn stats(&self) -> CounterStats {
        CounterStats {
            exclusive_calls: self.exclusive_calls.get(),
            inclusive_calls: self.inclusive_calls.get(),
            peak_live_polys: self.peak_polys.get(),
            depth: self.forest.depth(),
            call_bound: call_bound(self.graph.vertex_count(), self.forest.depth()),
        }
    }

    pub fn reset_stats(&self) {
        self.exclusive_calls.set(0);
        self.inclusive_calls.set(0);
        self.live_polys.set(0);
        self.peak_polys.set(0);
    }

    fn track(&self, poly: TruncatedPoly3<R>) -> Tracked<'_, R> {
        let live = self.live_polys.get() + 1;
        self.live_polys.set(live);
        if live > self.peak_polys.get() {
            self.peak_polys.set(live);
        }
        Tracked {
            poly: Some(poly),
            live: &self.live_polys,
        }
    }

    fn fresh(&self) -> Tracked<'_, R> {
        self.track(TruncatedPoly3::zero(self.ring.clone(), self.caps))
    }
}

/// RAII guard counting a polynomial buffer as live.
struct Tracked<'c, R: CoefficientRing> {
    poly: Option<TruncatedPoly3<R>>,
    live: &'c Cell<u32>,
}

impl<R: CoefficientRing> Tracked<'_, R> {
    fn get(&self) -> &TruncatedPoly3<R> {
        self.poly.as_ref().expect("tracked polynomial present")
    }

    fn get_mut(&mut self) -> &mut TruncatedPoly3<R> {
        self.poly.as_mut().expect("tracked polynomial present")
    }

    fn into_poly(mut self) -> TruncatedPoly3<R> {
        self.poly.take().expect("tracked polynomial present")
    }
}

impl<R: CoefficientRing> Drop for Tracked<'_, R> {
    fn drop(&mut self) {
        self.live.set(self.live.get() - 1);
    }
}

/// The closed-form product at leaf `u`: one factor per owned edge (the choice
/// of one of its copies, when the endpoint labels allow any) and one factor
/// per owned vertex (the copy-pairing option for 2-labels, the free side for
/// 0-labels).
fn leaf_product_into<R: CoefficientRing>(
    ctx: &CountContext<'_, R>,
    tail: &TailAssignment,
    u: Vertex,
    out: &mut TruncatedPoly3<R>,
) {
    out.clear();
    out.set_one();
    let ring = ctx.ring.clone();
    let mut zeros = 0u32;
    let mut pair_options = 0u32;
    for &x in ctx.plan.owned_vertices(u) {
        match tail.label(x).expect("owned vertices lie on the tail") {
            Label::Zero => zeros += 1,
            Label::TwoL | Label::TwoR => pair_options += 1,
            Label::OneL | Label::OneR => {}
        }
    }
    if zeros > 0 {
        out.scale_in_place(&ring.pow2(zeros));
    }
    let one = ring.one();
    for _ in 0..pair_options {
        out.mul_one_plus_monomial(0, 1, 0, &one);
    }
    for &e in ctx.plan.owned_edges(u) {
        let (x, y) = ctx.graph.edge(e);
        let lx = tail.label(x).expect("edge endpoints lie on the tail");
        let ly = tail.label(y).expect("edge endpoints lie on the tail");
        if let Some(choices) = edge_choices(lx, ly) {
            out.mul_one_plus_monomial(ctx.weights[e] as usize, 1, 1, &ring.from_i64(choices));
        }
    }
}

struct Engine<'e, 'a, R: CoefficientRing> {
    ctx: &'e CountContext<'a, R>,
    tail: TailAssignment,
    scratch: Option<Tracked<'e, R>>,
    branch_scratch: Option<Tracked<'e, R>>,
}

impl<'e, R: CoefficientRing> Engine<'e, '_, R> {
    /// acc += coeff * P(u, tail) ; branch over the label of `u`.
    fn exclusive_into(&mut self, u: Vertex, coeff: &R::Elem, acc: &mut Tracked<'e, R>) {
        self.ctx.exclusive_calls.set(self.ctx.exclusive_calls.get() + 1);
        if self.ctx.forest.is_leaf(u) {
            return self.exclusive_leaf_into(u, coeff, acc);
        }
        let minus_two = self.ctx.ring.from_i64(-2);
        for s in Label::ALL {
            let c = match s {
                Label::OneL | Label::OneR => self.ctx.ring.mul(coeff, &minus_two),
                _ => coeff.clone(),
            };
            self.tail.entries.push((u, s));
            self.tail.label_of[u] = Some(s);
            self.inclusive_into(u, &c, acc);
            self.tail.entries.pop();
            self.tail.label_of[u] = None;
        }
    }

    /// The five leaf evaluations of one exclusive call share every factor
    /// that does not involve the leaf's own label: build that shared product
    /// once, then finish each branch with the leaf's own vertex factor and
    /// the factors of its incident owned edges.
    fn exclusive_leaf_into(&mut self, u: Vertex, coeff: &R::Elem, acc: &mut Tracked<'e, R>) {
        self.ctx.inclusive_calls.set(self.ctx.inclusive_calls.get() + 5);
        let ctx = self.ctx;
        let ring = ctx.ring.clone();
        let mut shared = match self.scratch.take() {
            Some(s) => s,
            None => ctx.fresh(),
        };
        let mut branch = match self.branch_scratch.take() {
            Some(s) => s,
            None => ctx.fresh(),
        };
        {
            let p = shared.get_mut();
            p.clear();
            p.set_one();
            let mut zeros = 0u32;
            let mut pair_options = 0u32;
            for &x in ctx.plan.owned_vertices(u) {
                if x == u {
                    continue;
                }
                match self.tail.label(x).expect("owned vertices lie on the tail") {
                    Label::Zero => zeros += 1,
                    Label::TwoL | Label::TwoR => pair_options += 1,
                    Label::OneL | Label::OneR => {}
                }
            }
            if zeros > 0 {
                p.scale_in_place(&ring.pow2(zeros));
            }
            let one = ring.one();
            for _ in 0..pair_options {
                p.mul_one_plus_monomial(0, 1, 0, &one);
            }
            for &e in ctx.plan.owned_edges(u) {
                let (x, y) = ctx.graph.edge(e);
                if x == u || y == u {
                    continue;
                }
                let lx = self.tail.label(x).expect("edge endpoints lie on the tail");
                let ly = self.tail.label(y).expect("edge endpoints lie on the tail");
                if let Some(choices) = edge_choices(lx, ly) {
                    p.mul_one_plus_monomial(ctx.weights[e] as usize, 1, 1, &ring.from_i64(choices));
                }
            }
        }
        let minus_two = ring.from_i64(-2);
        let two = ring.from_i64(2);
        for s in Label::ALL {
            let c = match s {
                Label::OneL | Label::OneR => ring.mul(coeff, &minus_two),
                _ => coeff.clone(),
            };
            if s == Label::Zero {
                // The leaf's vertex factor is the constant 2 and a 0-label
                // shuts off every incident edge.
                let c2 = ring.mul(&c, &two);
                acc.get_mut().add_assign_scaled(shared.get(), &c2);
                continue;
            }
            let p = branch.get_mut();
            p.clone_contents_from(shared.get());
            if matches!(s, Label::TwoL | Label::TwoR) {
                p.mul_one_plus_monomial(0, 1, 0, &ring.one());
            }
            for &e in ctx.plan.owned_edges(u) {
                let (x, y) = ctx.graph.edge(e);
                let other = if x == u {
                    y
                } else if y == u {
                    x
                } else {
                    continue;
                };
                let lo = self.tail.label(other).expect("edge endpoints lie on the tail");
                if let Some(choices) = edge_choices(lo, s) {
                    p.mul_one_plus_monomial(ctx.weights[e] as usize, 1, 1, &ring.from_i64(choices));
                }
            }
            acc.get_mut().add_assign_scaled(p, &c);
        }
        self.scratch = Some(shared);
        self.branch_scratch = Some(branch);
    }

    /// acc += coeff * P[u, tail] ; leaf product or child product.
    fn inclusive_into(&mut self, u: Vertex, coeff: &R::Elem, acc: &mut Tracked<'e, R>) {
        self.ctx.inclusive_calls.set(self.ctx.inclusive_calls.get() + 1);
        let kids = self.ctx.forest.children(u);
        match kids.len() {
            0 => {
                let mut scratch = match self.scratch.take() {
                    Some(s) => s,
                    None => self.ctx.fresh(),
                };
                leaf_product_into(self.ctx, &self.tail, u, scratch.get_mut());
                acc.get_mut().add_assign_scaled(scratch.get(), coeff);
                self.scratch = Some(scratch);
            }
            // A single child's sum folds straight into the same accumulator;
            // no buffer is needed at this level.
            1 => self.exclusive_into(kids[0], coeff, acc),
            _ => {
                let one = self.ctx.ring.one();
                let mut prod = self.ctx.fresh();
                self.exclusive_into(kids[0], &one, &mut prod);
                for &v in &kids[1..] {
                    let mut factor = self.ctx.fresh();
                    self.exclusive_into(v, &one, &mut factor);
                    let res = prod.get().mul(factor.get()).expect("uniform ring and caps");
                    prod = self.ctx.track(res);
                }
                acc.get_mut().add_assign_scaled(prod.get(), coeff);
            }
        }
    }
}

fn check_domain<R: CoefficientRing>(
    ctx: &CountContext<'_, R>,
    u: Vertex,
    f: &TailAssignment,
    inclusive: bool,
) -> Result<(), CounterError> {
    let expected = if inclusive {
        ctx.forest.tail_inclusive(u)
    } else {
        ctx.forest.tail_exclusive(u)
    };
    let found: Vec<Vertex> = f.entries().iter().map(|&(v, _)| v).collect();
    if expected == found {
        Ok(())
    } else {
        Err(CounterError::BadDomain { u })
    }
}

/// The factor contributed by edge `e` under the labels of its endpoints:
/// `1 + (choices) * weight^w edges cover` when selectable, `1` otherwise.
pub fn edge_factor<R: CoefficientRing>(
    ctx: &CountContext<'_, R>,
    e: EdgeId,
    f: &TailAssignment,
) -> Result<TruncatedPoly3<R>, CounterError> {
    let (x, y) = ctx.graph.edge(e);
    let lx = f.label(x).ok_or(CounterError::NotOnTail(x))?;
    let ly = f.label(y).ok_or(CounterError::NotOnTail(y))?;
    let mut p = TruncatedPoly3::one(ctx.ring.clone(), ctx.caps);
    if let Some(choices) = edge_choices(lx, ly) {
        p.mul_one_plus_monomial(ctx.weights[e] as usize, 1, 1, &ctx.ring.from_i64(choices));
    }
    Ok(p)
}

/// The factor contributed by vertex `x` under its label: `1 + edges` for
/// 2-labels (the copies of `x` may be matched to each other), the constant 2
/// for `Zero` (both cut sides are open), `1` for 1-labels.
pub fn vertex_factor<R: CoefficientRing>(
    ctx: &CountContext<'_, R>,
    x: Vertex,
    f: &TailAssignment,
) -> Result<TruncatedPoly3<R>, CounterError> {
    let label = f.label(x).ok_or(CounterError::NotOnTail(x))?;
    let ring = ctx.ring.clone();
    let caps = ctx.caps;
    Ok(match label {
        Label::TwoL | Label::TwoR => {
            let mut p = TruncatedPoly3::one(ring.clone(), caps);
            p.mul_one_plus_monomial(0, 1, 0, &ring.one());
            p
        }
        Label::Zero => TruncatedPoly3::monomial(ring.clone(), caps, 0, 0, 0, ring.from_i64(2)),
        Label::OneL | Label::OneR => TruncatedPoly3::one(ring, caps),
    })
}

/// The closed-form polynomial at leaf `u`: the product of [`edge_factor`]s of
/// the edges owned by `u` and [`vertex_factor`]s of the vertices owned by `u`.
pub fn leaf_poly<R: CoefficientRing>(
    ctx: &CountContext<'_, R>,
    u: Vertex,
    f: &TailAssignment,
) -> Result<TruncatedPoly3<R>, CounterError> {
    if !ctx.forest.is_leaf(u) {
        return Err(CounterError::NotALeaf(u));
    }
    check_domain(ctx, u, f, true)?;
    let mut out = TruncatedPoly3::zero(ctx.ring.clone(), ctx.caps);
    leaf_product_into(ctx, f, u, &mut out);
    Ok(out)
}

/// P[u, f]: the leaf product at leaves, otherwise the product over children
/// of their exclusive polynomials. `f` must label exactly the root-to-`u`
/// path, `u` included.
pub fn compute_inclusive<R: CoefficientRing>(
    ctx: &CountContext<'_, R>,
    u: Vertex,
    f: &TailAssignment,
) -> Result<TruncatedPoly3<R>, CounterError> {
    check_domain(ctx, u, f, true)?;
    let mut engine = Engine {
        ctx,
        tail: f.clone(),
        scratch: None,
        branch_scratch: None,
    };
    let mut acc = ctx.fresh();
    let one = ctx.ring.one();
    engine.inclusive_into(u, &one, &mut acc);
    Ok(acc.into_poly())
}

/// P(u, f): the five-label inclusion-exclusion combination
/// `P[2L] + P[2R] - 2 P[1L] - 2 P[1R] + P[0]` of the inclusive polynomials
/// of `u`. `f` must label exactly the strict ancestors of `u`.
pub fn compute_exclusive<R: CoefficientRing>(
    ctx: &CountContext<'_, R>,
    u: Vertex,
    f: &TailAssignment,
) -> Result<TruncatedPoly3<R>, CounterError> {
    check_domain(ctx, u, f, false)?;
    let mut engine = Engine {
        ctx,
        tail: f.clone(),
        scratch: None,
        branch_scratch: None,
    };
    let mut acc = ctx.fresh();
    let one = ctx.ring.one();
    engine.exclusive_into(u, &one, &mut acc);
    Ok(acc.into_poly())
}

/// The product of the exclusive polynomials of all roots. For every weight
/// `w`, the coefficient at `(w, n, l)` is the ring image of the number of
/// (simple perfect matching of the doubled graph, consistent cut) pairs with
/// total weight `w` and `l` selected base edges.
pub fn forest_poly<R: CoefficientRing>(ctx: &CountContext<'_, R>) -> TruncatedPoly3<R> {
    let one = ctx.ring.one();
    let roots = ctx.forest.roots();
    if roots.is_empty() {
        return TruncatedPoly3::one(ctx.ring.clone(), ctx.caps);
    }
    let mut engine = Engine {
        ctx,
        tail: TailAssignment::new(ctx.graph.vertex_count()),
        scratch: None,
        branch_scratch: None,
    };
    let mut prod = ctx.fresh();
    engine.exclusive_into(roots[0], &one, &mut prod);
    for &r in &roots[1..] {
        let mut factor = ctx.fresh();
        engine.exclusive_into(r, &one, &mut factor);
        let res = prod.get().mul(factor.get()).expect("uniform ring and caps");
        prod = ctx.track(res);
    }
    prod.into_poly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::poly::ExactInt;

    type Poly = TruncatedPoly3<ExactInt>;

    fn caps(w: usize, e: usize, c: usize) -> Degrees {
        Degrees::new(w, e, c)
    }

    fn poly_from(ring: ExactInt, caps: Degrees, terms: &[(usize, usize, usize, i128)]) -> Poly {
        let mut p = TruncatedPoly3::zero(ring, caps);
        for &(a, b, c, v) in terms {
            p = p.add(&TruncatedPoly3::monomial(ring, caps, a, b, c, v)).unwrap();
        }
        p
    }

    struct Fixture {
        graph: Graph,
        forest: EliminationForest,
    }

    impl Fixture {
        fn new(n: usize, edges: &[(usize, usize)], parents: &[i64]) -> Self {
            let graph = Graph::new(n, edges.iter().copied()).unwrap();
            let parents: Vec<Option<usize>> = parents
                .iter()
                .map(|&p| if p < 0 { None } else { Some(p as usize) })
                .collect();
            let forest = EliminationForest::from_parents(&graph, &parents).unwrap();
            Fixture { graph, forest }
        }
    }

    fn ctx_of<'a>(
        fx: &'a Fixture,
        plan: &'a LeafPlan,
        weights: Vec<u64>,
        caps: Degrees,
    ) -> CountContext<'a, ExactInt> {
        CountContext::new(&fx.graph, &fx.forest, plan, weights, ExactInt, caps).unwrap()
    }

    #[test]
    fn edge_factor_examples() {
        let fx = Fixture::new(2, &[(0, 1)], &[-1, 0]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let cp = caps(8, 3, 3);

        let ctx = ctx_of(&fx, &plan, vec![7], cp);
        let f = TailAssignment::from_pairs(2, &[(0, Label::TwoL), (1, Label::TwoL)]).unwrap();
        let p = edge_factor(&ctx, 0, &f).unwrap();
        assert_eq!(p, poly_from(ExactInt, cp, &[(0, 0, 0, 1), (7, 1, 1, 4)]));

        let ctx = ctx_of(&fx, &plan, vec![1], cp);
        let f = TailAssignment::from_pairs(2, &[(0, Label::OneL), (1, Label::TwoL)]).unwrap();
        let p = edge_factor(&ctx, 0, &f).unwrap();
        assert_eq!(p, poly_from(ExactInt, cp, &[(0, 0, 0, 1), (1, 1, 1, 2)]));

        let f = TailAssignment::from_pairs(2, &[(0, Label::TwoL), (1, Label::TwoR)]).unwrap();
        let p = edge_factor(&ctx, 0, &f).unwrap();
        assert_eq!(p, Poly::one(ExactInt, cp));

        let f = TailAssignment::from_pairs(2, &[(0, Label::TwoL)]).unwrap();
        assert_eq!(edge_factor(&ctx, 0, &f), Err(CounterError::NotOnTail(1)));
    }

    #[test]
    fn vertex_factor_examples() {
        let fx = Fixture::new(1, &[], &[-1]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let cp = caps(2, 2, 2);
        let ctx = ctx_of(&fx, &plan, vec![], cp);

        let f = TailAssignment::from_pairs(1, &[(0, Label::TwoL)]).unwrap();
        assert_eq!(
            vertex_factor(&ctx, 0, &f).unwrap(),
            poly_from(ExactInt, cp, &[(0, 0, 0, 1), (0, 1, 0, 1)])
        );
        let f = TailAssignment::from_pairs(1, &[(0, Label::Zero)]).unwrap();
        assert_eq!(
            vertex_factor(&ctx, 0, &f).unwrap(),
            poly_from(ExactInt, cp, &[(0, 0, 0, 2)])
        );
        let f = TailAssignment::from_pairs(1, &[(0, Label::OneR)]).unwrap();
        assert_eq!(vertex_factor(&ctx, 0, &f).unwrap(), Poly::one(ExactInt, cp));
    }

    #[test]
    fn leaf_poly_examples() {
        // Single vertex, label 2L: only the copy-pairing option.
        let fx = Fixture::new(1, &[], &[-1]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let cp = caps(4, 4, 4);
        let ctx = ctx_of(&fx, &plan, vec![], cp);
        let f = TailAssignment::from_pairs(1, &[(0, Label::TwoL)]).unwrap();
        assert_eq!(
            leaf_poly(&ctx, 0, &f).unwrap(),
            poly_from(ExactInt, cp, &[(0, 0, 0, 1), (0, 1, 0, 1)])
        );

        // Single edge a-b with b the leaf owning everything:
        // (1 + 2 w e c)(1 + e).
        let fx = Fixture::new(2, &[(0, 1)], &[-1, 0]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let ctx = ctx_of(&fx, &plan, vec![1], cp);
        let f = TailAssignment::from_pairs(2, &[(0, Label::OneL), (1, Label::TwoL)]).unwrap();
        assert_eq!(
            leaf_poly(&ctx, 1, &f).unwrap(),
            poly_from(
                ExactInt,
                cp,
                &[(0, 0, 0, 1), (0, 1, 0, 1), (1, 1, 1, 2), (1, 2, 1, 2)]
            )
        );

        // Star leaf v2: the center is owned elsewhere, so only v2's own
        // factor appears; the 0-labeled center forbids the edge.
        let fx = Fixture::new(3, &[(0, 1), (0, 2)], &[-1, 0, 0]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let ctx = ctx_of(&fx, &plan, vec![1, 1], cp);
        let f = TailAssignment::from_pairs(3, &[(0, Label::Zero), (2, Label::TwoL)]).unwrap();
        assert_eq!(
            leaf_poly(&ctx, 2, &f).unwrap(),
            poly_from(ExactInt, cp, &[(0, 0, 0, 1), (0, 1, 0, 1)])
        );

        // Not a leaf.
        let f = TailAssignment::from_pairs(3, &[(0, Label::Zero)]).unwrap();
        assert_eq!(leaf_poly(&ctx, 0, &f), Err(CounterError::NotALeaf(0)));
    }

    #[test]
    fn exclusive_examples() {
        // Single vertex, empty assignment: 2 edges-degree-1 coefficient.
        let fx = Fixture::new(1, &[], &[-1]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let cp = caps(4, 4, 4);
        let ctx = ctx_of(&fx, &plan, vec![], cp);
        let f = TailAssignment::new(1);
        assert_eq!(
            compute_exclusive(&ctx, 0, &f).unwrap(),
            poly_from(ExactInt, cp, &[(0, 1, 0, 2)])
        );
        let s = ctx.stats();
        assert_eq!(s.exclusive_calls, 1);
        assert_eq!(s.inclusive_calls, 5);
        assert!(s.exclusive_calls + s.inclusive_calls <= s.call_bound);

        // Star child v1 under a 0-labeled center: 4 edges-degree-1.
        let fx = Fixture::new(3, &[(0, 1), (0, 2)], &[-1, 0, 0]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let ctx = ctx_of(&fx, &plan, vec![1, 1], cp);
        let f = TailAssignment::from_pairs(3, &[(0, Label::Zero)]).unwrap();
        assert_eq!(
            compute_exclusive(&ctx, 1, &f).unwrap(),
            poly_from(ExactInt, cp, &[(0, 1, 0, 4)])
        );

        // Star child v1 under a 2L-labeled center, zero weights:
        // 2e + 2e^2 + 4e^2c + 4e^3c.
        let ctx = ctx_of(&fx, &plan, vec![0, 0], cp);
        let f = TailAssignment::from_pairs(3, &[(0, Label::TwoL)]).unwrap();
        assert_eq!(
            compute_exclusive(&ctx, 1, &f).unwrap(),
            poly_from(
                ExactInt,
                cp,
                &[(0, 1, 0, 2), (0, 2, 0, 2), (0, 2, 1, 4), (0, 3, 1, 4)]
            )
        );

        // Domain must be the exclusive tail.
        let f = TailAssignment::new(3);
        assert_eq!(
            compute_exclusive(&ctx, 1, &f),
            Err(CounterError::BadDomain { u: 1 })
        );
    }

    #[test]
    fn inclusive_examples() {
        // Leaf case delegates to the leaf product.
        let fx = Fixture::new(1, &[], &[-1]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let cp = caps(4, 4, 4);
        let ctx = ctx_of(&fx, &plan, vec![], cp);
        let f = TailAssignment::from_pairs(1, &[(0, Label::Zero)]).unwrap();
        assert_eq!(
            compute_inclusive(&ctx, 0, &f).unwrap(),
            poly_from(ExactInt, cp, &[(0, 0, 0, 2)])
        );

        // Star root with label 0: product of the children, 8 e^2.
        let fx = Fixture::new(3, &[(0, 1), (0, 2)], &[-1, 0, 0]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let ctx = ctx_of(&fx, &plan, vec![1, 1], cp);
        let f = TailAssignment::from_pairs(3, &[(0, Label::Zero)]).unwrap();
        assert_eq!(
            compute_inclusive(&ctx, 0, &f).unwrap(),
            poly_from(ExactInt, cp, &[(0, 2, 0, 8)])
        );

        // One child: the inclusive value is the child's exclusive value.
        let fx = Fixture::new(2, &[(0, 1)], &[-1, 0]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let ctx = ctx_of(&fx, &plan, vec![1], cp);
        let f0 = TailAssignment::from_pairs(2, &[(0, Label::Zero)]).unwrap();
        let inc = compute_inclusive(&ctx, 0, &f0).unwrap();
        let exc = compute_exclusive(&ctx, 1, &f0).unwrap();
        assert_eq!(inc, exc);
    }

    #[test]
    fn forest_poly_examples() {
        // Single vertex: coefficient 2 at (0, 1, 0).
        let fx = Fixture::new(1, &[], &[-1]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let cp = caps(2, 2, 2);
        let ctx = ctx_of(&fx, &plan, vec![], cp);
        assert_eq!(forest_poly(&ctx).coeff(0, 1, 0).unwrap(), 2);

        // Two isolated vertices: (2e)^2 = 4e^2.
        let fx = Fixture::new(2, &[], &[-1, -1]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let ctx = ctx_of(&fx, &plan, vec![], cp);
        let p = forest_poly(&ctx);
        assert_eq!(p, poly_from(ExactInt, cp, &[(0, 2, 0, 4)]));

        // K3 with unit weights: coefficient 16 at (3, 3, 3).
        let fx = Fixture::new(3, &[(0, 1), (1, 2), (0, 2)], &[-1, 0, 1]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let cp = caps(9, 3, 3);
        let ctx = ctx_of(&fx, &plan, vec![1, 1, 1], cp);
        let p = forest_poly(&ctx);
        assert_eq!(p.coeff(3, 3, 3).unwrap(), 16);
    }

    #[test]
    fn stats_are_deterministic() {
        let fx = Fixture::new(3, &[(0, 1), (1, 2), (0, 2)], &[-1, 0, 1]);
        let plan = LeafPlan::new(&fx.graph, &fx.forest);
        let cp = caps(9, 3, 3);
        let ctx1 = ctx_of(&fx, &plan, vec![1, 1, 1], cp);
        forest_poly(&ctx1);
        let ctx2 = ctx_of(&fx, &plan, vec![1, 1, 1], cp);
        forest_poly(&ctx2);
        assert_eq!(ctx1.stats(), ctx2.stats());
        assert!(ctx1.stats().peak_live_polys <= fx.forest.depth() as u32 + 2);
        ctx1.reset_stats();
        assert_eq!(ctx1.stats().exclusive_calls, 0);
    }
}
