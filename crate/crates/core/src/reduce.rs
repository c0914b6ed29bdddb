//! 3-CNF → one-in-three → positive one-in-three.
//!
//! Both reductions allocate fresh variables contiguously above the source
//! formula's largest index, clause by clause, in the order the gadget lists
//! them. The [`ReductionTrace`] records which fresh indices each source
//! clause received.

use crate::error::Result;
use crate::formula::{CnfFormula, Literal, Triple, XsatFormula};

/// Which gadget replaces a disjunction `p ∨ p′ ∨ p″`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Gadget {
    /// `{¬p,a,b}, {p′,b,c}, {¬p″,c,d}`: four fresh variables, three clauses.
    /// Preserves satisfiability but not the model count: `p=p″=1, p′=0`
    /// extends in two ways.
    #[default]
    Verbatim,
    /// The verbatim gadget plus `{a,c,e}`, which rules out `a=c=1` and pins
    /// the extension down. Five fresh variables, four clauses, exactly one
    /// extension per model.
    Parsimonious,
}

impl Gadget {
    pub fn fresh_per_clause(self) -> u32 {
        match self {
            Gadget::Verbatim => 4,
            Gadget::Parsimonious => 5,
        }
    }

    pub fn clauses_per_clause(self) -> usize {
        match self {
            Gadget::Verbatim => 3,
            Gadget::Parsimonious => 4,
        }
    }
}

/// Fresh variables introduced for one source clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetRecord {
    /// 0-based index of the source clause.
    pub source_clause: usize,
    pub fresh: Vec<u32>,
}

/// Size accounting for one reduction step.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ReductionTrace {
    pub gadgets: Vec<GadgetRecord>,
    /// (variables, clauses) before the step.
    pub before: (u32, usize),
    /// (variables, clauses) after the step.
    pub after: (u32, usize),
}

impl ReductionTrace {
    /// `vars − clauses` after the step, as a signed integer.
    pub fn margin_after(&self) -> i64 {
        self.after.0 as i64 - self.after.1 as i64
    }

    pub fn fresh_vars(&self) -> u32 {
        self.after.0 - self.before.0
    }
}

/// 3-CNF to XSAT with the three-clause gadget.
pub fn reduce_cnf_to_xsat(f: &CnfFormula) -> Result<(XsatFormula, ReductionTrace)> {
    reduce_cnf_to_xsat_with(f, Gadget::Verbatim)
}

pub fn reduce_cnf_to_xsat_with(
    f: &CnfFormula,
    gadget: Gadget,
) -> Result<(XsatFormula, ReductionTrace)> {
    let mut next = f.num_vars() + 1;
    let mut clauses = Vec::with_capacity(f.num_clauses() * gadget.clauses_per_clause());
    let mut gadgets = Vec::with_capacity(f.num_clauses());
    for (i, c) in f.clauses().iter().enumerate() {
        let fresh: Vec<u32> = (next..next + gadget.fresh_per_clause()).collect();
        next += gadget.fresh_per_clause();
        let [a, b, cc, d] = [fresh[0], fresh[1], fresh[2], fresh[3]];
        let (p, p1, p2) = (c[0], c[1], c[2]);
        clauses.push(Triple::new(p.negate(), Literal::Pos(a), Literal::Pos(b)));
        clauses.push(Triple::new(p1, Literal::Pos(b), Literal::Pos(cc)));
        clauses.push(Triple::new(p2.negate(), Literal::Pos(cc), Literal::Pos(d)));
        if gadget == Gadget::Parsimonious {
            clauses.push(Triple::pos(a, cc, fresh[4]));
        }
        gadgets.push(GadgetRecord {
            source_clause: i,
            fresh,
        });
    }
    let num_vars = next - 1;
    let trace = ReductionTrace {
        gadgets,
        before: (f.num_vars(), f.num_clauses()),
        after: (num_vars, clauses.len()),
    };
    Ok((XsatFormula::new(num_vars, clauses, false), trace))
}

/// Removes negations: each `¬p` is replaced by a fresh `p̂` tied to `p`
/// through `{p̂, p, ⊥}`. Negation-free clauses, with or without ⊥, are
/// copied unchanged.
pub fn reduce_xsat_to_positive(f: &XsatFormula) -> (XsatFormula, ReductionTrace) {
    let mut next = f.num_vars() + 1;
    let mut clauses = Vec::with_capacity(f.num_clauses());
    let mut gadgets = Vec::new();
    for (i, c) in f.clauses().iter().enumerate() {
        if c.is_positive() {
            clauses.push(*c);
            continue;
        }
        let mut head = Vec::with_capacity(3);
        let mut ties = Vec::new();
        let mut fresh = Vec::new();
        for lit in c.lits() {
            match *lit {
                Literal::Neg(v) => {
                    let hat = next;
                    next += 1;
                    fresh.push(hat);
                    head.push(Literal::Pos(hat));
                    ties.push(Triple::new(
                        Literal::Pos(hat),
                        Literal::Pos(v),
                        Literal::Bottom,
                    ));
                }
                other => head.push(other),
            }
        }
        clauses.push(Triple::new(head[0], head[1], head[2]));
        clauses.extend(ties);
        gadgets.push(GadgetRecord {
            source_clause: i,
            fresh,
        });
    }
    let num_vars = next - 1;
    let trace = ReductionTrace {
        gadgets,
        before: (f.num_vars(), f.num_clauses()),
        after: (num_vars, clauses.len()),
    };
    (XsatFormula::new(num_vars, clauses, true), trace)
}

/// Both counts come from exhaustive enumeration; parsimony means equality.
pub fn check_parsimony(src_count: u64, dst_count: u64) -> bool {
    src_count == dst_count
}
