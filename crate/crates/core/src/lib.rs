//! Exact one-in-three satisfiability.
//!
//! A positive formula is a set of triples over `p1..pr`, satisfied when each
//! triple has exactly one true variable. Every clause is also the linear
//! equation `p + p' + p'' = 1`, so eliminating over the rationals leaves a
//! small 0/1 kernel in the free variables whose admissible points are in
//! bijection with the models. Two eliminations are provided: Gauss-Jordan
//! ([`linsys`]) and left-hand-side substitution ([`subst`]); [`kernel`]
//! extracts and counts. CNF and general XSAT inputs reach the positive form
//! through [`reduce`], and [`oracle`] brute-forces small instances.

pub mod bench;
pub mod error;
pub mod formula;
pub mod generator;
pub mod io;
pub mod kernel;
pub mod linsys;
pub mod oracle;
pub mod reduce;
pub mod subst;
pub mod verify;

pub use error::{Error, Result};
pub use formula::{
    eval_cnf, eval_xsat, kappa, validate, Assignment, CnfFormula, Literal, Triple, Violation,
    XsatFormula,
};
pub use kernel::{
    count_kernel, extract_kernel, kernel_from_subst, solve, CountOptions, KernelCount,
    KernelInstance, Method, SolveOutcome, SolveReport,
};
pub use linsys::{encode_sys, gauss_jordan, rank_of, LinearSystem, RrefResult};
pub use oracle::{naive_count, naive_count_cnf};
pub use reduce::{reduce_cnf_to_xsat, reduce_cnf_to_xsat_with, reduce_xsat_to_positive, Gadget};
pub use subst::{substitute, LinearConstraint, SubstitutionState};
