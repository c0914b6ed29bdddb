//! Formulas, literals and assignments.
//!
//! An [`XsatFormula`] is a set of three-literal clauses read under
//! exactly-one semantics; a [`CnfFormula`] is an ordinary 3-CNF read under
//! at-least-one semantics. Variables are 1-based. The constant ⊥ is a
//! literal kind of its own and never counts as a variable.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// A literal of a one-in-three clause.
///
/// The derived ordering (positive < negative < ⊥, then by index) is the
/// canonical storage order inside a [`Triple`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Pos(u32),
    Neg(u32),
    Bottom,
}

impl Literal {
    pub fn var(self) -> Option<u32> {
        match self {
            Literal::Pos(v) | Literal::Neg(v) => Some(v),
            Literal::Bottom => None,
        }
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Literal::Neg(_))
    }

    pub fn negate(self) -> Literal {
        match self {
            Literal::Pos(v) => Literal::Neg(v),
            Literal::Neg(v) => Literal::Pos(v),
            Literal::Bottom => Literal::Bottom,
        }
    }

    /// Truth value under `a`. ⊥ is always false.
    pub fn eval(self, a: &Assignment) -> bool {
        match self {
            Literal::Pos(v) => a.get(v),
            Literal::Neg(v) => !a.get(v),
            Literal::Bottom => false,
        }
    }

    /// Signed DIMACS-style integer; ⊥ has none.
    pub fn to_dimacs(self) -> Option<i64> {
        match self {
            Literal::Pos(v) => Some(v as i64),
            Literal::Neg(v) => Some(-(v as i64)),
            Literal::Bottom => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(v) => write!(f, "p{v}"),
            Literal::Neg(v) => write!(f, "¬p{v}"),
            Literal::Bottom => write!(f, "⊥"),
        }
    }
}

/// Three literals in canonical (sorted) order.
///
/// Construction never fails; well-formedness (no repeats, no complementary
/// pair) is checked by [`validate`] so that malformed clauses can still be
/// reported with their position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple([Literal; 3]);

impl Triple {
    pub fn new(a: Literal, b: Literal, c: Literal) -> Self {
        let mut lits = [a, b, c];
        lits.sort();
        Triple(lits)
    }

    /// Shorthand for an all-positive triple.
    pub fn pos(a: u32, b: u32, c: u32) -> Self {
        Triple::new(Literal::Pos(a), Literal::Pos(b), Literal::Pos(c))
    }

    pub fn lits(&self) -> &[Literal; 3] {
        &self.0
    }

    /// Variable indices of the non-⊥ literals, in canonical order.
    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().filter_map(|l| l.var())
    }

    pub fn negations(&self) -> usize {
        self.0.iter().filter(|l| l.is_negative()).count()
    }

    pub fn is_positive(&self) -> bool {
        self.negations() == 0
    }

    pub fn true_count(&self, a: &Assignment) -> usize {
        self.0.iter().filter(|l| l.eval(a)).count()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.0[0], self.0[1], self.0[2])
    }
}

/// A fixed-length 0/1 vector; bit `v - 1` holds variable `v`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    /// Bits from `0`/`1` integers, e.g. `Assignment::from_bits(&[0, 1, 0, 0])`.
    pub fn from_bits(bits: &[u8]) -> Self {
        Assignment(bits.iter().map(|&b| b != 0).collect())
    }

    /// Low `n` bits of `mask`, variable 1 in bit 0.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Assignment((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value of variable `v` (1-based).
    pub fn get(&self, v: u32) -> bool {
        self.0[v as usize - 1]
    }

    pub fn set(&mut self, v: u32, value: bool) {
        self.0[v as usize - 1] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.0.iter().map(|&b| if b { "1" } else { "0" }).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A one-in-three formula over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XsatFormula {
    num_vars: u32,
    clauses: Vec<Triple>,
    positive: bool,
}

impl XsatFormula {
    /// Builds a formula without checking its invariants; see [`XsatFormula::checked`].
    pub fn new(num_vars: u32, clauses: Vec<Triple>, positive: bool) -> Self {
        XsatFormula {
            num_vars,
            clauses,
            positive,
        }
    }

    /// Builds a formula and rejects it unless [`validate`] finds nothing.
    pub fn checked(num_vars: u32, clauses: Vec<Triple>, positive: bool) -> Result<Self> {
        let f = XsatFormula::new(num_vars, clauses, positive);
        let violations = validate(&f);
        if violations.is_empty() {
            Ok(f)
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Positive formula from index triples, e.g. `[[1, 2, 3], [2, 3, 4]]`.
    pub fn positive_from(num_vars: u32, triples: &[[u32; 3]]) -> Self {
        let clauses = triples
            .iter()
            .map(|t| Triple::pos(t[0], t[1], t[2]))
            .collect();
        XsatFormula::new(num_vars, clauses, true)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Triple] {
        &self.clauses
    }

    /// The declared format flag (xsat+ vs xsat).
    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// True when no clause carries a negation, regardless of the flag.
    pub fn is_negation_free(&self) -> bool {
        self.clauses.iter().all(Triple::is_positive)
    }

    /// Same clauses minus the one at `idx`.
    pub fn without_clause(&self, idx: usize) -> Self {
        let mut clauses = self.clauses.clone();
        clauses.remove(idx);
        XsatFormula::new(self.num_vars, clauses, self.positive)
    }
}

/// A 3-CNF formula under ordinary disjunctive semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for (i, c) in clauses.iter().enumerate() {
            for lit in c {
                match lit.var() {
                    None => {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("clause {} contains ⊥", i + 1),
                        })
                    }
                    Some(v) if v == 0 || v > num_vars => {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("clause {}: index {v} out of range 1..={num_vars}", i + 1),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// From signed DIMACS integers.
    pub fn from_dimacs(num_vars: u32, clauses: &[[i64; 3]]) -> Result<Self> {
        let lits = clauses.iter().map(|c| c.map(dimacs_literal)).collect();
        CnfFormula::new(num_vars, lits)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }
}

pub(crate) fn dimacs_literal(x: i64) -> Literal {
    if x < 0 {
        Literal::Neg(x.unsigned_abs() as u32)
    } else {
        Literal::Pos(x as u32)
    }
}

/// True iff every clause has exactly one true literal under `a`.
pub fn eval_xsat(f: &XsatFormula, a: &Assignment) -> Result<bool> {
    check_len(f.num_vars, a)?;
    Ok(f.clauses.iter().all(|c| c.true_count(a) == 1))
}

/// True iff every clause has at least one true literal under `a`.
pub fn eval_cnf(f: &CnfFormula, a: &Assignment) -> Result<bool> {
    check_len(f.num_vars, a)?;
    Ok(f.clauses.iter().all(|c| c.iter().any(|l| l.eval(a))))
}

fn check_len(num_vars: u32, a: &Assignment) -> Result<()> {
    if a.len() != num_vars as usize {
        return Err(Error::Dimension {
            expected: num_vars as usize,
            got: a.len(),
        });
    }
    Ok(())
}

/// Clause density k/r as an exact rational.
pub fn kappa(f: &XsatFormula) -> Result<BigRational> {
    if f.num_vars == 0 {
        return Err(Error::EmptyFormula);
    }
    Ok(BigRational::new(
        BigInt::from(f.clauses.len()),
        BigInt::from(f.num_vars),
    ))
}

/// One broken formula invariant. Clause numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyFormula,
    VarOutOfRange { clause: usize, var: u32 },
    RepeatedLiteral { clause: usize },
    ComplementaryPair { clause: usize, var: u32 },
    NegationInPositive { clause: usize },
    DuplicateClause { first: usize, second: usize },
    UncoveredVariable { var: u32 },
    DensityBelowOneThird { vars: u32, clauses: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyFormula => write!(f, "empty clause set"),
            Violation::VarOutOfRange { clause, var } => {
                write!(f, "clause {clause}: variable {var} out of range")
            }
            Violation::RepeatedLiteral { clause } => write!(f, "clause {clause}: repeated literal"),
            Violation::ComplementaryPair { clause, var } => {
                write!(f, "clause {clause}: p{var} and its negation")
            }
            Violation::NegationInPositive { clause } => {
                write!(f, "clause {clause}: negation in positive formula")
            }
            Violation::DuplicateClause { first, second } => {
                write!(f, "duplicate-clause: {second} repeats {first}")
            }
            Violation::UncoveredVariable { var } => write!(f, "variable {var} occurs in no clause"),
            Violation::DensityBelowOneThird { vars, clauses } => {
                write!(
                    f,
                    "density-below-one-third: {clauses} clauses over {vars} variables"
                )
            }
        }
    }
}

/// Lists every invariant the formula breaks; empty means well-formed.
pub fn validate(f: &XsatFormula) -> Vec<Violation> {
    let mut out = Vec::new();
    if f.clauses.is_empty() {
        out.push(Violation::EmptyFormula);
    }
    let mut covered = vec![false; f.num_vars as usize + 1];
    let mut seen: HashMap<Triple, usize> = HashMap::new();
    for (i, c) in f.clauses.iter().enumerate() {
        let clause = i + 1;
        let lits = c.lits();
        for v in c.vars() {
            if v == 0 || v > f.num_vars {
                out.push(Violation::VarOutOfRange { clause, var: v });
            } else {
                covered[v as usize] = true;
            }
        }
        if lits[0] == lits[1] || lits[1] == lits[2] {
            out.push(Violation::RepeatedLiteral { clause });
        }
        for a in 0..3 {
            for b in a + 1..3 {
                if lits[a] != Literal::Bottom && lits[a].negate() == lits[b] {
                    out.push(Violation::ComplementaryPair {
                        clause,
                        var: lits[a].var().unwrap_or(0),
                    });
                }
            }
        }
        if f.positive && !c.is_positive() {
            out.push(Violation::NegationInPositive { clause });
        }
        if let Some(&first) = seen.get(c) {
            out.push(Violation::DuplicateClause {
                first,
                second: clause,
            });
        } else {
            seen.insert(*c, clause);
        }
    }
    for v in 1..=f.num_vars {
        if !covered[v as usize] {
            out.push(Violation::UncoveredVariable { var: v });
        }
    }
    if f.positive && 3 * f.clauses.len() < f.num_vars as usize {
        out.push(Violation::DensityBelowOneThird {
            vars: f.num_vars,
            clauses: f.clauses.len(),
        });
    }
    out
}
