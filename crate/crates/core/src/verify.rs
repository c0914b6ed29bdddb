//! Randomized cross-checking of both elimination methods against the oracle,
//! with greedy shrinking of any disagreement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bench::clauses_for;
use crate::error::Result;
use crate::formula::{Literal, Triple, XsatFormula};
use crate::generator::{gen_random, Family, GenSpec, SplitMix64};
use crate::kernel::{
    count_kernel, extract_kernel, kernel_from_subst, CountOptions, KernelInstance,
};
use crate::linsys::{encode_sys, gauss_jordan};
use crate::oracle::naive_count;
use crate::subst;

pub const VERIFY_KAPPAS: [(i32, i32); 4] = [(1, 3), (1, 2), (2, 3), (1, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub r_min: u32,
    pub r_max: u32,
    pub seed: u64,
    /// Perturb one coefficient of the Gauss kernel before counting.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 100,
            r_min: 6,
            r_max: 18,
            seed: 1,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counts {
    pub oracle: u64,
    pub gauss: u128,
    pub subst: u128,
}

impl Counts {
    pub fn agree(&self) -> bool {
        self.gauss == self.oracle as u128 && self.subst == self.oracle as u128
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Disagreement {
    pub trial: usize,
    pub spec: GenSpec,
    pub original: XsatFormula,
    pub counts: Counts,
    /// Smallest clause subset found that still disagrees.
    pub minimized: XsatFormula,
    pub minimized_counts: Counts,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOutcome {
    pub trials_run: usize,
    pub disagreement: Option<Disagreement>,
}

/// Adds one to the first nonzero kernel coefficient (or to a right-hand side
/// when every coefficient is zero).
pub fn perturb(kern: &mut KernelInstance) -> bool {
    for row in &mut kern.rows {
        if let Some(c) = row.coeffs.iter_mut().find(|c| !c.is_zero()) {
            *c += BigRational::one();
            return true;
        }
    }
    match kern.rows.first_mut() {
        Some(row) => {
            row.rhs += BigRational::from_integer(BigInt::one());
            true
        }
        None => false,
    }
}

pub fn count_all(f: &XsatFormula, fault: bool) -> Result<Counts> {
    let opts = CountOptions {
        max_free: 63,
        ..CountOptions::default()
    };
    let mut gk = extract_kernel(&gauss_jordan(&encode_sys(f)?));
    if fault {
        perturb(&mut gk);
    }
    let sk = kernel_from_subst(&subst::run(f)?)?;
    Ok(Counts {
        oracle: naive_count(f)?,
        gauss: count_kernel(&gk, &opts)?.count,
        subst: count_kernel(&sk, &opts)?.count,
    })
}

/// Renumbers the variables that occur in some clause to `1..=r'`, dropping
/// the rest.
pub fn compact(f: &XsatFormula) -> XsatFormula {
    let mut used: Vec<u32> = f.clauses().iter().flat_map(|t| t.vars()).collect();
    used.sort_unstable();
    used.dedup();
    let new_of = |v: u32| used.binary_search(&v).map(|i| i as u32 + 1).unwrap_or(0);
    let clauses = f
        .clauses()
        .iter()
        .map(|t| {
            let [a, b, c] = t.lits().map(|l| match l {
                Literal::Pos(v) => Literal::Pos(new_of(v)),
                Literal::Neg(v) => Literal::Neg(new_of(v)),
                Literal::Bottom => Literal::Bottom,
            });
            Triple::new(a, b, c)
        })
        .collect();
    XsatFormula::new(used.len() as u32, clauses, f.is_positive())
}

/// Drops clauses one at a time while the counts still disagree, until no
/// single removal keeps the disagreement. Variables left uncovered are
/// dropped too, so every candidate is itself a valid instance.
pub fn minimize(f: &XsatFormula, fault: bool) -> Result<(XsatFormula, Counts)> {
    let mut cur = f.clone();
    let mut counts = count_all(&cur, fault)?;
    loop {
        let mut shrunk = false;
        let mut i = 0;
        while i < cur.num_clauses() && cur.num_clauses() > 1 {
            let cand = compact(&cur.without_clause(i));
            let c = count_all(&cand, fault)?;
            if !c.agree() {
                cur = cand;
                counts = c;
                shrunk = true;
            } else {
                i += 1;
            }
        }
        if !shrunk {
            return Ok((cur, counts));
        }
    }
}

pub fn trial_spec(cfg: &VerifyConfig, trial: usize) -> GenSpec {
    let seed = cfg.seed ^ trial as u64;
    let mut rng = SplitMix64::new(seed);
    let span = cfg.r_max.saturating_sub(cfg.r_min) as u64 + 1;
    let r = cfg.r_min + rng.below(span) as u32;
    let (n, d) = VERIFY_KAPPAS[rng.below(VERIFY_KAPPAS.len() as u64) as usize];
    let k = clauses_for(r, &BigRational::new(n.into(), d.into()));
    GenSpec {
        r,
        k,
        seed,
        family: Family::Random,
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyOutcome> {
    for trial in 0..cfg.trials {
        let spec = trial_spec(cfg, trial);
        let f = gen_random(&spec)?;
        let counts = count_all(&f, cfg.inject_fault)?;
        if !counts.agree() {
            let (minimized, minimized_counts) = minimize(&f, cfg.inject_fault)?;
            return Ok(VerifyOutcome {
                trials_run: trial + 1,
                disagreement: Some(Disagreement {
                    trial,
                    spec,
                    original: f,
                    counts,
                    minimized,
                    minimized_counts,
                }),
            });
        }
    }
    Ok(VerifyOutcome {
        trials_run: cfg.trials,
        disagreement: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_agrees() {
        let out = run_verify(&VerifyConfig {
            trials: 25,
            r_max: 12,
            ..VerifyConfig::default()
        })
        .unwrap();
        assert_eq!(out.trials_run, 25);
        assert!(out.disagreement.is_none());
    }

    #[test]
    fn zero_trials() {
        let out = run_verify(&VerifyConfig {
            trials: 0,
            ..VerifyConfig::default()
        })
        .unwrap();
        assert_eq!(out.trials_run, 0);
        assert!(out.disagreement.is_none());
    }

    #[test]
    fn injected_fault_is_caught_and_shrunk() {
        let out = run_verify(&VerifyConfig {
            trials: 20,
            r_max: 12,
            inject_fault: true,
            ..VerifyConfig::default()
        })
        .unwrap();
        let d = out.disagreement.expect("fault must be detected");
        assert!(!d.counts.agree());
        assert!(!d.minimized_counts.agree());
        assert!(d.minimized.num_clauses() <= d.original.num_clauses());
        assert!(crate::formula::validate(&d.minimized).is_empty());
        if d.minimized.num_clauses() > 1 {
            for i in 0..d.minimized.num_clauses() {
                let smaller = compact(&d.minimized.without_clause(i));
                assert!(count_all(&smaller, true).unwrap().agree());
            }
        }
    }

    #[test]
    fn compaction_renumbers_covered_vars() {
        let f = XsatFormula::positive_from(9, &[[2, 5, 9], [5, 7, 9]]);
        assert_eq!(
            compact(&f),
            XsatFormula::positive_from(4, &[[1, 2, 4], [2, 3, 4]])
        );
    }

    #[test]
    fn trial_specs_in_range() {
        let cfg = VerifyConfig::default();
        for t in 0..200 {
            let s = trial_spec(&cfg, t);
            assert!((6..=18).contains(&s.r));
            assert!(3 * s.k >= s.r as usize && s.k <= s.r as usize);
        }
    }
}
