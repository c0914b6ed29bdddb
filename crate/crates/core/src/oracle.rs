//! Ground-truth counting by exhaustive enumeration over all 2^r assignments.
//!
//! No pruning and no propagation: every assignment is visited. The fast
//! variants walk a Gray code and re-evaluate only the clauses touching the
//! flipped variable; the `reference_*` variants are plain double loops kept
//! to cross-check the fast ones.

use crate::error::{Error, Result};
use crate::formula::{eval_cnf, eval_xsat, Assignment, CnfFormula, Literal, XsatFormula};

/// Hard cap on the number of enumerated variables.
pub const ORACLE_MAX_VARS: u32 = 24;

fn check_cap(r: u32) -> Result<()> {
    if r > ORACLE_MAX_VARS {
        return Err(Error::Capacity {
            what: "oracle enumeration",
            needed: r as usize,
            cap: ORACLE_MAX_VARS as usize,
            hint: " variables",
        });
    }
    Ok(())
}

/// Number of assignments with exactly one true literal per clause.
/// Works with negated literals and ⊥.
pub fn naive_count(f: &XsatFormula) -> Result<u64> {
    check_cap(f.num_vars())?;
    let clauses: Vec<&[Literal]> = f.clauses().iter().map(|t| &t.lits()[..]).collect();
    Ok(gray_count(f.num_vars(), &clauses, |n| n == 1))
}

/// Number of assignments satisfying every disjunction.
pub fn naive_count_cnf(f: &CnfFormula) -> Result<u64> {
    check_cap(f.num_vars())?;
    let clauses: Vec<&[Literal]> = f.clauses().iter().map(|c| &c[..]).collect();
    Ok(gray_count(f.num_vars(), &clauses, |n| n >= 1))
}

/// Straightforward loop over every mask and every clause.
pub fn reference_count(f: &XsatFormula) -> Result<u64> {
    check_cap(f.num_vars())?;
    let r = f.num_vars() as usize;
    let mut n = 0;
    for mask in 0..1u64 << r {
        if eval_xsat(f, &Assignment::from_mask(mask, r))? {
            n += 1;
        }
    }
    Ok(n)
}

pub fn reference_count_cnf(f: &CnfFormula) -> Result<u64> {
    check_cap(f.num_vars())?;
    let r = f.num_vars() as usize;
    let mut n = 0;
    for mask in 0..1u64 << r {
        if eval_cnf(f, &Assignment::from_mask(mask, r))? {
            n += 1;
        }
    }
    Ok(n)
}

/// Every satisfying assignment, in mask order.
pub fn naive_solutions(f: &XsatFormula) -> Result<Vec<Assignment>> {
    check_cap(f.num_vars())?;
    let r = f.num_vars() as usize;
    let mut out = Vec::new();
    for mask in 0..1u64 << r {
        let a = Assignment::from_mask(mask, r);
        if eval_xsat(f, &a)? {
            out.push(a);
        }
    }
    Ok(out)
}

fn gray_count(num_vars: u32, clauses: &[&[Literal]], accept: impl Fn(i32) -> bool) -> u64 {
    let r = num_vars as usize;
    // occurrences[v]: (clause, change in true-literal count when v goes 0 -> 1)
    let mut occurrences: Vec<Vec<(usize, i32)>> = vec![Vec::new(); r];
    let mut true_lits: Vec<i32> = vec![0; clauses.len()];
    for (ci, c) in clauses.iter().enumerate() {
        for lit in c.iter() {
            match *lit {
                Literal::Pos(v) => occurrences[v as usize - 1].push((ci, 1)),
                Literal::Neg(v) => {
                    occurrences[v as usize - 1].push((ci, -1));
                    true_lits[ci] += 1;
                }
                Literal::Bottom => {}
            }
        }
    }
    let mut good = true_lits.iter().filter(|&&n| accept(n)).count();
    let total = clauses.len();
    let mut bits = vec![false; r];
    let mut count = u64::from(good == total);
    for step in 1..1u64 << r {
        let v = step.trailing_zeros() as usize;
        bits[v] = !bits[v];
        let dir = if bits[v] { 1 } else { -1 };
        for &(ci, delta) in &occurrences[v] {
            let before = accept(true_lits[ci]);
            true_lits[ci] += dir * delta;
            let after = accept(true_lits[ci]);
            match (before, after) {
                (true, false) => good -= 1,
                (false, true) => good += 1,
                _ => {}
            }
        }
        if good == total {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Triple;

    #[test]
    fn xsat_examples() {
        let f = XsatFormula::positive_from(4, &[[1, 2, 3], [2, 3, 4]]);
        assert_eq!(naive_count(&f).unwrap(), 3);
        let sols = naive_solutions(&f).unwrap();
        assert!(sols.contains(&Assignment::from_bits(&[1, 0, 0, 1])));
        assert!(sols.contains(&Assignment::from_bits(&[0, 1, 0, 0])));
        assert!(sols.contains(&Assignment::from_bits(&[0, 0, 1, 0])));

        let unsat = XsatFormula::positive_from(4, &[[1, 2, 3], [2, 3, 4], [1, 2, 4], [1, 3, 4]]);
        assert_eq!(naive_count(&unsat).unwrap(), 0);

        let single = XsatFormula::positive_from(3, &[[1, 2, 3]]);
        assert_eq!(naive_count(&single).unwrap(), 3);
    }

    #[test]
    fn cnf_examples() {
        let f = CnfFormula::from_dimacs(3, &[[1, 2, 3]]).unwrap();
        assert_eq!(naive_count_cnf(&f).unwrap(), 7);
        let empty = CnfFormula::new(2, vec![]).unwrap();
        assert_eq!(naive_count_cnf(&empty).unwrap(), 4);
        let contra = CnfFormula::from_dimacs(1, &[[1, 1, 1], [-1, -1, -1]]).unwrap();
        assert_eq!(naive_count_cnf(&contra).unwrap(), 0);
    }

    #[test]
    fn negations_and_bottom_match_reference() {
        let f = XsatFormula::new(
            4,
            vec![
                Triple::new(Literal::Neg(1), Literal::Pos(2), Literal::Bottom),
                Triple::new(Literal::Neg(2), Literal::Neg(3), Literal::Pos(4)),
                Triple::new(Literal::Pos(1), Literal::Neg(4), Literal::Pos(3)),
            ],
            false,
        );
        assert_eq!(naive_count(&f).unwrap(), reference_count(&f).unwrap());
    }

    #[test]
    fn cap_enforced() {
        let f = XsatFormula::positive_from(25, &[[1, 2, 3]]);
        assert!(matches!(naive_count(&f), Err(Error::Capacity { .. })));
    }
}
