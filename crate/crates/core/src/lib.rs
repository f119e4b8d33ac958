//! Decision procedures for Hamiltonian Cycle, Hamiltonian Path, Long Cycle,
//! Long Path, Min Cycle Cover and Partial Cycle Cover on graphs supplied with
//! a shallow elimination forest.
//!
//! The solver runs in time proportional to `5^d` (for forest depth `d`) times
//! a polynomial, and in polynomial space. It is a randomized Monte Carlo
//! procedure with one-sided error: a YES answer is always correct, a NO answer
//! is wrong with probability at most `2^-T` over `T` repetitions.
//!
//! The pipeline, bottom to top:
//!
//! * [`graph`]: simple undirected graphs, parsing, components.
//! * [`treedepth`]: elimination forests, validation, DFS construction, and
//!   the per-leaf responsibility plan driving the counting recursion.
//! * [`poly`]: truncated trivariate polynomials over pluggable coefficient
//!   rings (residues mod `2^M`, or exact integers for testing).
//! * [`counter`]: the five-label inclusion-exclusion recursion over the
//!   forest whose root coefficients count (matching, cut) pairs.
//! * [`driver`]: random weights, the divisibility decision rule, repetition,
//!   and the reductions from the six named problems.
//! * [`oracle`]: independent brute-force ground truth for everything the
//!   counter computes, usable at desk scale only.
//! * [`cli`]: the command-line front end.

#![forbid(unsafe_code)]

pub mod cli;
pub mod counter;
pub mod driver;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod poly;
pub mod treedepth;
