//! The method of substitution.
//!
//! Every positive clause `{n, m, s}` (lowest, middle, highest variable)
//! becomes the constraint `n = 1 − m − s`. Constraints are sorted by their
//! left-hand variable and swept with `i` and `j` both descending: whenever
//! the left-hand variable of `c_j` occurs in the body of `c_i`, it is
//! replaced by `c_j`'s right-hand side and like terms are combined.
//!
//! Bodies carry signed integer coefficients; chained substitution both
//! repeats and cancels variables. Separately, each constraint tracks its
//! *expansion*: how many variable occurrences the substitution wrote into
//! it before any cancellation.
//!
//! Constraints that share a left-hand variable are kept side by side. The
//! kernel later turns the second and subsequent ones into filters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::formula::{Literal, Triple, Violation, XsatFormula};

/// `lhs = constant − Σ coeff·var`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub lhs: u32,
    pub constant: BigInt,
    pub body: BTreeMap<u32, BigInt>,
    /// Occurrence count of body variables, with multiplicity and without
    /// cancellation.
    pub expansion: u128,
    /// 1-based index of the clause this constraint came from.
    pub source: usize,
}

impl LinearConstraint {
    /// Value of the left-hand side once the body variables are fixed.
    pub fn eval_rhs(&self, value: impl Fn(u32) -> i64) -> BigInt {
        let mut acc = self.constant.clone();
        for (&v, c) in &self.body {
            acc -= c * value(v);
        }
        acc
    }

    fn replace(&mut self, var: u32, def: &LinearConstraint) {
        let Some(b) = self.body.remove(&var) else {
            return;
        };
        self.constant -= &b * &def.constant;
        for (&w, d) in &def.body {
            let entry = self.body.entry(w).or_insert_with(BigInt::zero);
            *entry -= &b * d;
            if entry.is_zero() {
                self.body.remove(&w);
            }
        }
        let multiplicity = b.abs().to_u128().unwrap_or(u128::MAX);
        let grown = multiplicity.saturating_mul(def.expansion.saturating_sub(1));
        self.expansion = self.expansion.saturating_add(grown);
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}: p{} = {}", self.source, self.lhs, self.constant)?;
        for (v, c) in &self.body {
            let neg = -c;
            let sign = if neg.is_negative() { "-" } else { "+" };
            let mag = neg.abs();
            if mag.is_one() {
                write!(f, " {sign} p{v}")?;
            } else {
                write!(f, " {sign} {mag}·p{v}")?;
            }
        }
        Ok(())
    }
}

/// `n(c) = 1 − m(c) − s(c)`; ⊥ is dropped.
pub fn normalize_clause(t: &Triple) -> Result<LinearConstraint> {
    normalize_at(t, 1)
}

fn normalize_at(t: &Triple, source: usize) -> Result<LinearConstraint> {
    if !t.is_positive() {
        return Err(Error::Encoding { clause: source });
    }
    let mut vars: Vec<u32> = t.vars().collect();
    let Some(&lhs) = vars.first() else {
        return Err(Error::DegenerateClause { clause: source });
    };
    vars.dedup();
    if vars.len() != t.vars().count() {
        return Err(Error::Invalid(vec![Violation::RepeatedLiteral {
            clause: source,
        }]));
    }
    debug_assert!(t
        .lits()
        .iter()
        .all(|l| matches!(l, Literal::Pos(_) | Literal::Bottom)));
    let body: BTreeMap<u32, BigInt> = vars[1..].iter().map(|&v| (v, BigInt::one())).collect();
    Ok(LinearConstraint {
        lhs,
        constant: BigInt::one(),
        expansion: body.len() as u128,
        body,
        source,
    })
}

/// Constraint list plus the induced independent (`N`, left-hand) and
/// dependent (`N̄`) variable sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionState {
    num_vars: u32,
    constraints: Vec<LinearConstraint>,
    independent: BTreeSet<u32>,
    dependent: BTreeSet<u32>,
    inconsistent: bool,
}

/// Work done by one call to [`substitute_with_stats`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SubstitutionStats {
    pub substitutions: usize,
    pub sweeps: usize,
}

impl SubstitutionState {
    /// Normalizes every clause and sorts by left-hand variable (stable, so
    /// ties keep clause order).
    pub fn from_formula(f: &XsatFormula) -> Result<Self> {
        let mut constraints = f
            .clauses()
            .iter()
            .enumerate()
            .map(|(i, t)| normalize_at(t, i + 1))
            .collect::<Result<Vec<_>>>()?;
        constraints.sort_by_key(|c| c.lhs);
        Ok(SubstitutionState::assemble(f.num_vars(), constraints))
    }

    fn assemble(num_vars: u32, constraints: Vec<LinearConstraint>) -> Self {
        let independent: BTreeSet<u32> = constraints.iter().map(|c| c.lhs).collect();
        let dependent = (1..=num_vars)
            .filter(|v| !independent.contains(v))
            .collect();
        let mut inconsistent = false;
        for (a, ca) in constraints.iter().enumerate() {
            for cb in &constraints[a + 1..] {
                if ca.lhs == cb.lhs && ca.body == cb.body && ca.constant != cb.constant {
                    inconsistent = true;
                }
            }
        }
        SubstitutionState {
            num_vars,
            constraints,
            independent,
            dependent,
            inconsistent,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// `N`: left-hand variables.
    pub fn independent(&self) -> &BTreeSet<u32> {
        &self.independent
    }

    /// `N̄`: every other variable.
    pub fn dependent(&self) -> &BTreeSet<u32> {
        &self.dependent
    }

    /// Two constraints define the same variable by the same body with
    /// different constants.
    pub fn inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// No body mentions any left-hand variable.
    pub fn is_fixpoint(&self) -> bool {
        self.constraints
            .iter()
            .all(|c| c.body.keys().all(|v| !self.independent.contains(v)))
    }
}

impl fmt::Display for SubstitutionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn substitute(state: &SubstitutionState) -> Result<SubstitutionState> {
    substitute_with_stats(state).map(|(s, _)| s)
}

pub fn substitute_with_stats(
    state: &SubstitutionState,
) -> Result<(SubstitutionState, SubstitutionStats)> {
    let mut cons = state.constraints.clone();
    let k = cons.len();
    let mut stats = SubstitutionStats::default();
    let max_sweeps = k.max(1);
    loop {
        if stats.sweeps == max_sweeps {
            return Err(Error::NotFixpoint);
        }
        stats.sweeps += 1;
        let mut changed = false;
        for i in (0..k).rev() {
            for j in (0..k).rev() {
                if j == i {
                    continue;
                }
                let var = cons[j].lhs;
                if !cons[i].body.contains_key(&var) {
                    continue;
                }
                let def = cons[j].clone();
                cons[i].replace(var, &def);
                stats.substitutions += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    debug_assert!(stats.substitutions <= k * k);
    let out = SubstitutionState::assemble(state.num_vars, cons);
    debug_assert!(out.is_fixpoint());
    Ok((out, stats))
}

/// `(|N|, |N̄|)` of a fixpoint state.
pub fn rank_of_subst(state: &SubstitutionState) -> Result<(usize, usize)> {
    if !state.is_fixpoint() {
        return Err(Error::NotFixpoint);
    }
    Ok((state.independent.len(), state.dependent.len()))
}

/// `|n(i)|` per constraint, in processing order (last constraint first).
pub fn expansion_profile(state: &SubstitutionState) -> Vec<u128> {
    state
        .constraints
        .iter()
        .rev()
        .map(|c| c.expansion)
        .collect()
}

/// Distinct body variables with nonzero coefficient, in processing order.
pub fn body_sizes(state: &SubstitutionState) -> Vec<usize> {
    state
        .constraints
        .iter()
        .rev()
        .map(|c| c.body.len())
        .collect()
}

/// Substitution fixpoint of a positive formula.
pub fn run(f: &XsatFormula) -> Result<SubstitutionState> {
    substitute(&SubstitutionState::from_formula(f)?)
}
