//! Exact-rational linear system of a positive formula and its reduced row
//! echelon form.
//!
//! Each clause `{p, p′, p″}` becomes the row `p + p′ + p″ = 1`; ⊥ contributes
//! nothing. Columns are variables in index order, followed by the
//! right-hand side. Pivoting is deterministic: leftmost column with a
//! nonzero entry at or below the current row, smallest such row.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formula::{Literal, XsatFormula};

pub type Rational = BigRational;

/// Dense augmented matrix `[A | b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    rows: Vec<Vec<Rational>>,
    num_vars: usize,
    /// Column `c` holds variable `var_of_col[c]`.
    var_of_col: Vec<u32>,
}

impl LinearSystem {
    pub fn from_rows(num_vars: usize, rows: Vec<Vec<Rational>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == num_vars + 1));
        LinearSystem {
            rows,
            num_vars,
            var_of_col: (1..=num_vars as u32).collect(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.rows[row][col]
    }

    pub fn rhs(&self, row: usize) -> &Rational {
        &self.rows[row][self.num_vars]
    }

    pub fn var_of_col(&self, col: usize) -> u32 {
        self.var_of_col[col]
    }

    /// True when `x` (one value per variable) satisfies every row.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|row| {
            let lhs: Rational = row[..self.num_vars].iter().zip(x).map(|(a, b)| a * b).sum();
            lhs == row[self.num_vars]
        })
    }
}

/// Result of Gauss-Jordan elimination. Zero rows are dropped from `matrix`.
#[derive(Clone, Debug)]
pub struct RrefResult {
    pub pivot_cols: Vec<usize>,
    pub free_cols: Vec<usize>,
    pub rank: usize,
    pub nullity: usize,
    pub matrix: LinearSystem,
    pub inconsistent: bool,
}

pub fn encode_sys(f: &XsatFormula) -> Result<LinearSystem> {
    let r = f.num_vars() as usize;
    let mut rows = Vec::with_capacity(f.num_clauses());
    for (i, c) in f.clauses().iter().enumerate() {
        let mut row = vec![Rational::zero(); r + 1];
        for lit in c.lits() {
            match *lit {
                Literal::Pos(v) => row[v as usize - 1] += Rational::one(),
                Literal::Neg(_) => return Err(Error::Encoding { clause: i + 1 }),
                Literal::Bottom => {}
            }
        }
        row[r] = Rational::one();
        rows.push(row);
    }
    Ok(LinearSystem::from_rows(r, rows))
}

pub fn gauss_jordan(sys: &LinearSystem) -> RrefResult {
    let n = sys.num_vars;
    let mut m = sys.rows.clone();
    let mut pivot_cols = Vec::new();
    let mut free_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            free_cols.push(col);
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        if !inv.is_one() {
            for x in m[row][col..].iter_mut() {
                *x *= &inv;
            }
        }
        let (above, rest) = m.split_at_mut(row);
        let (pivot_row, below) = rest.split_first_mut().expect("pivot row");
        for other in above.iter_mut().chain(below.iter_mut()) {
            if other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (x, p) in other[col..].iter_mut().zip(&pivot_row[col..]) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let rank = row;
    let inconsistent = m[rank..].iter().any(|r| !r[n].is_zero());
    m.truncate(rank);
    RrefResult {
        pivot_cols,
        free_cols,
        rank,
        nullity: n - rank,
        matrix: LinearSystem {
            rows: m,
            num_vars: n,
            var_of_col: sys.var_of_col.clone(),
        },
        inconsistent,
    }
}

/// Rank and nullity of the formula's linear system.
pub fn rank_of(f: &XsatFormula) -> Result<(usize, usize)> {
    let rref = gauss_jordan(&encode_sys(f)?);
    Ok((rref.rank, rref.nullity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Triple;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    fn worked_example() -> XsatFormula {
        XsatFormula::positive_from(6, &[[1, 2, 3], [4, 5, 6], [2, 5, 6], [1, 2, 5]])
    }

    #[test]
    fn encode_rows() {
        let f = XsatFormula::positive_from(3, &[[1, 2, 3]]);
        assert_eq!(encode_sys(&f).unwrap().rows(), &[ints(&[1, 1, 1, 1])]);

        let f = XsatFormula::new(
            2,
            vec![Triple::new(
                Literal::Pos(1),
                Literal::Pos(2),
                Literal::Bottom,
            )],
            true,
        );
        assert_eq!(encode_sys(&f).unwrap().rows(), &[ints(&[1, 1, 1])]);

        let s = encode_sys(&worked_example()).unwrap();
        assert_eq!((s.num_rows(), s.num_vars() + 1), (4, 7));
        assert_eq!(s.rows()[3], ints(&[1, 1, 0, 0, 1, 0, 1]));
    }

    #[test]
    fn encode_rejects_negation() {
        let f = XsatFormula::new(
            3,
            vec![Triple::new(
                Literal::Neg(1),
                Literal::Pos(2),
                Literal::Pos(3),
            )],
            false,
        );
        assert!(matches!(encode_sys(&f), Err(Error::Encoding { clause: 1 })));
    }

    #[test]
    fn partition_is_already_reduced() {
        let f = XsatFormula::positive_from(6, &[[1, 2, 3], [4, 5, 6]]);
        let sys = encode_sys(&f).unwrap();
        let rref = gauss_jordan(&sys);
        assert_eq!((rref.rank, rref.nullity), (2, 4));
        assert_eq!(rref.matrix.rows(), sys.rows());
        assert_eq!(rref.pivot_cols, vec![0, 3]);
        assert_eq!(rref.free_cols, vec![1, 2, 4, 5]);
        assert!(!rref.inconsistent);
    }

    #[test]
    fn worked_example_has_full_row_rank() {
        // Hand elimination: r1 - r4 = e3 - e5 and r2 - r3 = e4 - e2 leave
        // four independent rows, so rank 4, nullity 2.
        let rref = gauss_jordan(&encode_sys(&worked_example()).unwrap());
        assert_eq!((rref.rank, rref.nullity), (4, 2));
        assert_eq!(rref.pivot_cols, vec![0, 1, 2, 3]);
        assert_eq!(rref.free_cols, vec![4, 5]);
        // p1 = p6, p2 = 1 - p5 - p6, p3 = p5, p4 = 1 - p5 - p6
        assert_eq!(
            rref.matrix.rows(),
            &[
                ints(&[1, 0, 0, 0, 0, -1, 0]),
                ints(&[0, 1, 0, 0, 1, 1, 1]),
                ints(&[0, 0, 1, 0, -1, 0, 0]),
                ints(&[0, 0, 0, 1, 1, 1, 1]),
            ]
        );
    }

    #[test]
    fn unsat_example_is_rationally_consistent() {
        let f = XsatFormula::positive_from(4, &[[1, 2, 3], [2, 3, 4], [1, 2, 4], [1, 3, 4]]);
        let sys = encode_sys(&f).unwrap();
        let rref = gauss_jordan(&sys);
        assert_eq!((rref.rank, rref.nullity), (4, 0));
        assert!(!rref.inconsistent);
        let third = vec![q(1, 3); 4];
        assert!(sys.satisfied_by(&third));
        for r in 0..4 {
            assert_eq!(rref.matrix.rhs(r), &q(1, 3));
        }
    }

    #[test]
    fn inconsistent_rows_flagged() {
        // x + y = 1 and x + y = 2
        let sys = LinearSystem::from_rows(2, vec![ints(&[1, 1, 1]), ints(&[1, 1, 2])]);
        let rref = gauss_jordan(&sys);
        assert!(rref.inconsistent);
        assert_eq!(rref.rank, 1);
        assert_eq!(rref.matrix.num_rows(), 1);
    }

    #[test]
    fn redundant_rows_dropped() {
        let sys = LinearSystem::from_rows(3, vec![ints(&[1, 1, 1, 1]), ints(&[2, 2, 2, 2])]);
        let rref = gauss_jordan(&sys);
        assert_eq!(rref.rank, 1);
        assert!(!rref.inconsistent);
        assert_eq!(rref.matrix.num_rows(), 1);
    }

    #[test]
    fn rank_of_examples() {
        let part = XsatFormula::positive_from(6, &[[1, 2, 3], [4, 5, 6]]);
        assert_eq!(rank_of(&part).unwrap(), (2, 4));
        assert_eq!(rank_of(&worked_example()).unwrap(), (4, 2));
        let single = XsatFormula::positive_from(3, &[[1, 2, 3]]);
        assert_eq!(rank_of(&single).unwrap(), (1, 2));
    }
}
