//! Problem layer: random weights, the divisibility decision rule, error
//! amplification by repetition, and the reductions from the six named
//! problems to Partial Cycle Cover.
//!
//! One counting run works in the ring of residues mod `2^(n+k+1)` with degree
//! caps `(N l, n, l)`, where `N = 2m` bounds the sampled edge weights. The
//! instance is a YES iff for some weight `a` the count of (matching, cut)
//! pairs is nonzero in that ring: every such count is `2^l` times the count
//! of (cycle family, cut) pairs, and disconnected families contribute
//! multiples of `2^(n-l+k+1)`, so a nonzero residue certifies a family with
//! at most `k` cycles. A YES is therefore always correct. Conversely, random
//! weights isolate a solution, when one exists, with probability at least
//! 1/2 per run, and an isolated solution leaves its weight class indivisible
//! by `2^(n-l+k+1)`; `T` independent runs miss with probability at most
//! `2^-T`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::counter::{forest_poly, CountContext, CounterError};
use crate::graph::{Graph, GraphError};
use crate::poly::{CoefficientRing, Degrees, Mod2Pow, Mod2PowWide};
use crate::treedepth::{EliminationForest, ForestError, LeafPlan};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DriverError {
    #[error("cannot sample weights for an empty edge set")]
    EmptyEdgeSet,
    #[error("target vertex count {target} outside the valid range 3..={n}")]
    TargetRange { target: usize, n: usize },
    #[error("cycle budget must be at least 1")]
    BudgetRange,
    #[error("expected {expected} edge weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("weight {0} outside the declared range")]
    WeightRange(u64),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Counter(#[from] CounterError),
}

/// The problem to decide. Budgets and targets are in vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    HamiltonianCycle,
    HamiltonianPath,
    LongCycle { target: usize },
    LongPath { target: usize },
    MinCycleCover { budget: usize },
    PartialCycleCover { budget: usize, target: usize },
}

/// Seed and repetition policy. The false-negative probability after `T`
/// repetitions is at most `2^-T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub seed: u64,
    pub repetitions: u32,
    /// Collect per-run statistics (they are always cheap; this only gates
    /// whether callers receive them).
    pub stats: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 0,
            repetitions: 20,
            stats: false,
        }
    }
}

/// Edge weights in `1..=limit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFn {
    values: Vec<u64>,
    limit: u64,
}

impl WeightFn {
    /// Independent uniform weights in `1..=2m`; deterministic per generator
    /// state.
    pub fn sample(g: &Graph, rng: &mut impl Rng) -> Result<Self, DriverError> {
        let m = g.edge_count();
        if m == 0 {
            return Err(DriverError::EmptyEdgeSet);
        }
        let limit = 2 * m as u64;
        let values = (0..m).map(|_| rng.random_range(1..=limit)).collect();
        Ok(WeightFn { values, limit })
    }

    /// Constant weights, for tests and ad-hoc oracle checks.
    pub fn constant(g: &Graph, w: u64) -> Result<Self, DriverError> {
        if w == 0 {
            return Err(DriverError::WeightRange(0));
        }
        let limit = (2 * g.edge_count() as u64).max(w);
        Ok(WeightFn {
            values: vec![w; g.edge_count()],
            limit,
        })
    }

    /// Explicit weights with the declared limit `N`.
    pub fn from_values(values: Vec<u64>, limit: u64) -> Result<Self, DriverError> {
        if let Some(&bad) = values.iter().find(|&&v| v == 0 || v > limit) {
            return Err(DriverError::WeightRange(bad));
        }
        Ok(WeightFn { values, limit })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// The sampling range bound `N`.
    pub fn limit(&self) -> u64 {
        self.limit
    }
}

/// Per-counting-run instrumentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunStats {
    pub depth: usize,
    pub call_bound: u64,
    pub exclusive_calls: u64,
    pub inclusive_calls: u64,
    pub peak_polys: u32,
}

/// The generator stream for repetition `run` of a seed.
fn weight_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&run.to_le_bytes());
    bytes[16..32].copy_from_slice(b"tdcover weights ");
    ChaCha8Rng::from_seed(bytes)
}

/// Deterministic per-subcall seed derivation (splitmix64 of seed xor tag).
fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

fn count_run<R: CoefficientRing>(
    g: &Graph,
    t: &EliminationForest,
    plan: &LeafPlan,
    weights: &WeightFn,
    ring: R,
    caps: Degrees,
    target: usize,
) -> Result<(bool, RunStats), DriverError> {
    let ctx = CountContext::new(g, t, plan, weights.values().to_vec(), ring, caps)?;
    let poly = forest_poly(&ctx);
    let n = g.vertex_count();
    let ring = ctx.ring();
    let mut found = false;
    for a in target..=caps.weight {
        let c = poly.coeff(a, n, target).expect("scan stays inside the caps");
        if !ring.is_zero(&c) {
            found = true;
            break;
        }
    }
    let s = ctx.stats();
    Ok((
        found,
        RunStats {
            depth: s.depth,
            call_bound: s.call_bound,
            exclusive_calls: s.exclusive_calls,
            inclusive_calls: s.inclusive_calls,
            peak_polys: s.peak_live_polys,
        },
    ))
}

fn decide_once_with_plan(
    g: &Graph,
    t: &EliminationForest,
    plan: &LeafPlan,
    budget: usize,
    target: usize,
    weights: &WeightFn,
) -> Result<(bool, RunStats), DriverError> {
    let n = g.vertex_count();
    if !(3..=n).contains(&target) {
        return Err(DriverError::TargetRange { target, n });
    }
    if budget == 0 {
        return Err(DriverError::BudgetRange);
    }
    if weights.values().len() != g.edge_count() {
        return Err(DriverError::WeightCount {
            expected: g.edge_count(),
            found: weights.values().len(),
        });
    }
    let modulus_bits = (n + budget + 1) as u32;
    let caps = Degrees::new(weights.limit() as usize * target, n, target);
    if modulus_bits <= 64 {
        count_run(g, t, plan, weights, Mod2Pow::new(modulus_bits), caps, target)
    } else {
        count_run(g, t, plan, weights, Mod2PowWide::new(modulus_bits), caps, target)
    }
}

/// One counting run: true iff some weight class of (matching, cut) pairs is
/// nonzero mod `2^(n+budget+1)`. Never a false positive; detects an existing
/// solution with probability at least 1/2 over the weights.
pub fn decide_pcc_once(
    g: &Graph,
    t: &EliminationForest,
    budget: usize,
    target: usize,
    weights: &WeightFn,
) -> Result<bool, DriverError> {
    let plan = LeafPlan::new(g, t);
    Ok(decide_once_with_plan(g, t, &plan, budget, target, weights)?.0)
}

/// Full decision with repetitions and trivial-case handling; false negatives
/// with probability at most `2^-repetitions`.
pub fn decide_pcc(
    g: &Graph,
    t: &EliminationForest,
    budget: usize,
    target: usize,
    config: SolveConfig,
) -> Result<bool, DriverError> {
    Ok(decide_pcc_with_stats(g, t, budget, target, config)?.0)
}

/// As [`decide_pcc`], also returning the per-run statistics of every counting
/// run executed (none for trivially decided instances).
pub fn decide_pcc_with_stats(
    g: &Graph,
    t: &EliminationForest,
    budget: usize,
    target: usize,
    config: SolveConfig,
) -> Result<(bool, Vec<RunStats>), DriverError> {
    let n = g.vertex_count();
    let mut runs = Vec::new();
    if target == 0 {
        return Ok((true, runs)); // the empty family covers exactly 0 vertices
    }
    if target <= 2 || target > n || budget == 0 || g.edge_count() == 0 {
        return Ok((false, runs));
    }
    // More than target/3 disjoint cycles cannot cover `target` vertices, so a
    // larger budget decides identically and would only widen the modulus.
    let effective_budget = budget.min(target / 3).max(1);
    let plan = LeafPlan::new(g, t);
    for run in 0..config.repetitions.max(1) {
        let mut rng = weight_rng(config.seed, run as u64);
        let weights = WeightFn::sample(g, &mut rng)?;
        let (found, stats) =
            decide_once_with_plan(g, t, &plan, effective_budget, target, &weights)?;
        runs.push(stats);
        if found {
            return Ok((true, runs));
        }
    }
    Ok((false, runs))
}

/// One batched counting run for every `(budget, target)` pair with
/// `budget <= budget_max`: the counting recursion does not depend on either
/// parameter, only the coefficient read and the modulus do, and residues mod
/// a smaller power of two are masks of residues mod a larger one. The run
/// draws the weights of repetition `run` of `seed`, exactly as the
/// corresponding repetition of [`decide_pcc`] would.
///
/// Returns `answers[budget][target]`; trivial pairs (`target == 0`, tiny or
/// oversized targets, zero budgets, edgeless graphs) are decided exactly. A
/// `false` entry for a nontrivial pair means this single run did not certify
/// it; per-run semantics match one repetition of [`decide_pcc`]. Only usable
/// while the largest modulus fits one word; intended for harnesses that
/// sweep parameter grids.
pub fn decide_pcc_batch_step(
    g: &Graph,
    t: &EliminationForest,
    budget_max: usize,
    seed: u64,
    run: u32,
) -> Result<Vec<Vec<bool>>, DriverError> {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut answers = vec![vec![false; n + 1]; budget_max + 1];
    for row in answers.iter_mut() {
        row[0] = true;
    }
    if m == 0 || budget_max == 0 || n < 3 {
        return Ok(answers);
    }
    let top_bits = (n + budget_max.min(n / 3).max(1) + 1) as u32;
    assert!(top_bits <= 64, "batched decisions need a single-word modulus");
    let ring = Mod2Pow::new(top_bits);
    let plan = LeafPlan::new(g, t);
    let mut rng = weight_rng(seed, run as u64);
    let weights = WeightFn::sample(g, &mut rng)?;
    let caps = Degrees::new(weights.limit() as usize * n, n, n);
    let ctx = CountContext::new(g, t, &plan, weights.values().to_vec(), ring, caps)?;
    let poly = forest_poly(&ctx);
    for budget in 1..=budget_max {
        for target in 3..=n {
            let effective = budget.min(target / 3).max(1);
            let bits = (n + effective + 1) as u32;
            let mask = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
            for a in target..=(weights.limit() as usize * target) {
                let c = poly.coeff(a, n, target).expect("scan stays inside the caps");
                if c & mask != 0 {
                    answers[budget][target] = true;
                    break;
                }
            }
        }
    }
    Ok(answers)
}

/// Batched [`decide_pcc`] over every `(budget, target)` pair with
/// `budget <= budget_max`: the OR of `repetitions` batch steps. Per-pair
/// semantics (including the per-pair false-negative bound) match
/// [`decide_pcc`].
pub fn decide_pcc_batch(
    g: &Graph,
    t: &EliminationForest,
    budget_max: usize,
    config: SolveConfig,
) -> Result<Vec<Vec<bool>>, DriverError> {
    let n = g.vertex_count();
    let mut answers = vec![vec![false; n + 1]; budget_max + 1];
    for run in 0..config.repetitions.max(1) {
        let step = decide_pcc_batch_step(g, t, budget_max, config.seed, run)?;
        let mut all_true = true;
        for (row, step_row) in answers.iter_mut().zip(step) {
            for (cell, found) in row.iter_mut().zip(step_row) {
                *cell |= found;
                all_true &= *cell;
            }
        }
        if all_true {
            break;
        }
    }
    Ok(answers)
}

fn long_path_with_stats(
    g: &Graph,
    t: &EliminationForest,
    target: usize,
    config: SolveConfig,
) -> Result<(bool, Vec<RunStats>), DriverError> {
    let n = g.vertex_count();
    let m = g.edge_count();
    if target == 1 {
        return Ok((n >= 1, Vec::new()));
    }
    if target == 2 {
        return Ok((m >= 1, Vec::new()));
    }
    // A path whose endpoints are adjacent already closes into a cycle in g,
    // so the unaugmented instance is checked too; otherwise close the path
    // with a fresh edge s-x and look for a cycle through it.
    let mut subcalls: Vec<(Graph, EliminationForest)> = vec![(g.clone(), t.clone())];
    for s in 0..n {
        for x in (s + 1)..n {
            if !g.has_edge(s, x) {
                subcalls.push((g.with_edge(s, x)?, t.rerooted(s)));
            }
        }
    }
    let reps = ceil_log2(2 * subcalls.len() as u64) + config.repetitions.max(1);
    let mut all_runs = Vec::new();
    for (j, (gj, tj)) in subcalls.iter().enumerate() {
        let sub = SolveConfig {
            seed: derive_seed(config.seed, j as u64),
            repetitions: reps,
            stats: config.stats,
        };
        let (found, mut runs) = decide_pcc_with_stats(gj, tj, 1, target, sub)?;
        all_runs.append(&mut runs);
        if found {
            return Ok((true, all_runs));
        }
    }
    Ok((false, all_runs))
}

/// Decides the given problem. With no forest supplied, a DFS elimination
/// forest is built; a supplied forest is re-validated against the graph.
/// Never a false positive; false negatives with probability at most
/// `2^-repetitions`.
pub fn solve(
    kind: ProblemKind,
    g: &Graph,
    forest: Option<&EliminationForest>,
    config: SolveConfig,
) -> Result<bool, DriverError> {
    Ok(solve_with_stats(kind, g, forest, config)?.0)
}

/// As [`solve`], also returning the statistics of every counting run.
pub fn solve_with_stats(
    kind: ProblemKind,
    g: &Graph,
    forest: Option<&EliminationForest>,
    config: SolveConfig,
) -> Result<(bool, Vec<RunStats>), DriverError> {
    let owned;
    let t: &EliminationForest = match forest {
        Some(t) => {
            owned = EliminationForest::from_parents(g, t.parents())?;
            &owned
        }
        None => {
            owned = EliminationForest::dfs_forest(g);
            &owned
        }
    };
    let n = g.vertex_count();
    match kind {
        ProblemKind::HamiltonianCycle => decide_pcc_with_stats(g, t, 1, n, config),
        ProblemKind::MinCycleCover { budget } => decide_pcc_with_stats(g, t, budget, n, config),
        ProblemKind::LongCycle { target } => decide_pcc_with_stats(g, t, 1, target, config),
        ProblemKind::PartialCycleCover { budget, target } => {
            decide_pcc_with_stats(g, t, budget, target, config)
        }
        ProblemKind::LongPath { target } => long_path_with_stats(g, t, target, config),
        ProblemKind::HamiltonianPath => long_path_with_stats(g, t, n, config),
    }
}
