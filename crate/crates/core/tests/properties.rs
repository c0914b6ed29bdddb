use proptest::prelude::*;

use xsat_core::generator::{gen_random, Family, GenSpec, SplitMix64};
use xsat_core::io::{parse_dimacs_cnf, parse_xsat, write_dimacs_cnf, write_xsat};
use xsat_core::kernel::count_kernel_reference;
use xsat_core::oracle::{naive_solutions, reference_count};
use xsat_core::subst::{self, rank_of_subst, substitute_with_stats};
use xsat_core::*;

fn spec_strategy(r_max: u32) -> impl Strategy<Value = GenSpec> {
    (6u32..=r_max, 0usize..4, any::<u64>()).prop_map(|(r, kappa, seed)| {
        // κ ∈ {1/3, 1/2, 2/3, 1}
        let k = match kappa {
            0 => (r as usize).div_ceil(3),
            1 => (r as usize).div_ceil(2),
            2 => (2 * r as usize).div_ceil(3),
            _ => r as usize,
        };
        GenSpec {
            r,
            k,
            seed,
            family: Family::Random,
        }
    })
}

fn formula(r_max: u32) -> impl Strategy<Value = XsatFormula> {
    spec_strategy(r_max).prop_map(|s| gen_random(&s).unwrap())
}

/// Random 3-CNF over `n` variables, three distinct variables per clause.
fn small_cnf() -> impl Strategy<Value = CnfFormula> {
    (3u32..=4, 1usize..=3, any::<u64>()).prop_map(|(n, k, seed)| random_cnf(n, k, seed))
}

fn random_cnf(n: u32, k: usize, seed: u64) -> CnfFormula {
    let mut rng = SplitMix64::new(seed);
    let clauses: Vec<[i64; 3]> = (0..k)
        .map(|_| {
            let mut vars = Vec::new();
            while vars.len() < 3 {
                let v = rng.below(n as u64) as i64 + 1;
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            let mut c = [0i64; 3];
            for (slot, v) in c.iter_mut().zip(vars) {
                *slot = if rng.next_u64() & 1 == 1 { -v } else { v };
            }
            c
        })
        .collect();
    CnfFormula::from_dimacs(n, &clauses).unwrap()
}

fn both_counts(f: &XsatFormula) -> (u128, u128) {
    let g = solve(f, Method::Gauss, &CountOptions::default()).unwrap();
    let s = solve(f, Method::Subst, &CountOptions::default()).unwrap();
    (g.report.count, s.report.count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_axioms(f in formula(16)) {
        let rref = gauss_jordan(&encode_sys(&f).unwrap());
        let r = f.num_vars() as usize;
        prop_assert_eq!(rref.rank + rref.nullity, r);
        prop_assert!(rref.rank <= f.num_clauses().min(r));
        prop_assert!(!rref.inconsistent || rref.rank <= f.num_clauses());
        prop_assert_eq!(rref.pivot_cols.len(), rref.rank);
        prop_assert_eq!(rref.free_cols.len(), rref.nullity);
        // substitution never finds more independent variables than the rank
        let state = subst::run(&f).unwrap();
        let (n, nbar) = rank_of_subst(&state).unwrap();
        prop_assert_eq!(n + nbar, r);
        prop_assert!(n <= rref.rank);
    }

    #[test]
    fn elimination_keeps_every_model(f in formula(14)) {
        let rref = gauss_jordan(&encode_sys(&f).unwrap());
        let state = subst::run(&f).unwrap();
        for m in naive_solutions(&f).unwrap() {
            let x: Vec<_> = m
                .bits()
                .iter()
                .map(|&b| num_rational::BigRational::from_integer((b as i64).into()))
                .collect();
            prop_assert!(rref.matrix.satisfied_by(&x));
            for c in state.constraints() {
                let rhs = c.eval_rhs(|v| m.get(v) as i64);
                prop_assert_eq!(rhs, num_bigint::BigInt::from(m.get(c.lhs) as i64));
            }
        }
    }

    #[test]
    fn substitution_is_idempotent_and_fast(f in formula(18)) {
        let init = SubstitutionState::from_formula(&f).unwrap();
        let (once, stats) = substitute_with_stats(&init).unwrap();
        let k = f.num_clauses();
        prop_assert!(stats.substitutions <= k * k);
        prop_assert!(stats.sweeps <= 2);
        prop_assert!(once.is_fixpoint());
        let (twice, again) = substitute_with_stats(&once).unwrap();
        prop_assert_eq!(&twice, &once);
        prop_assert_eq!(again.substitutions, 0);
    }

    #[test]
    fn counts_match_brute_force(f in formula(16)) {
        let expect = naive_count(&f).unwrap() as u128;
        prop_assert_eq!(reference_count(&f).unwrap() as u128, expect);
        prop_assert_eq!(both_counts(&f), (expect, expect));
    }

    #[test]
    fn fast_and_reference_kernel_counts_agree(f in formula(14), jobs in 1usize..4) {
        for kern in [
            extract_kernel(&gauss_jordan(&encode_sys(&f).unwrap())),
            kernel_from_subst(&subst::run(&f).unwrap()).unwrap(),
        ] {
            let opts = CountOptions { jobs, ..CountOptions::default() };
            prop_assert_eq!(
                count_kernel(&kern, &opts).unwrap().count,
                count_kernel_reference(&kern).unwrap()
            );
        }
    }

    #[test]
    fn witnesses_are_exactly_the_models(f in formula(14)) {
        let opts = CountOptions {
            witness_cap: Some(1 << 14),
            ..CountOptions::default()
        };
        let models = naive_solutions(&f).unwrap();
        for method in [Method::Gauss, Method::Subst] {
            let out = solve(&f, method, &opts).unwrap();
            let ws = out.witnesses.unwrap();
            for w in &ws {
                prop_assert!(eval_xsat(&f, w).unwrap());
            }
            let mut sorted = models.clone();
            sorted.sort();
            prop_assert_eq!(&ws, &sorted);
        }
    }

    #[test]
    fn generator_is_valid_and_deterministic(spec in spec_strategy(30)) {
        let f = gen_random(&spec).unwrap();
        prop_assert!(validate(&f).is_empty());
        prop_assert_eq!(f.num_vars(), spec.r);
        prop_assert_eq!(f.num_clauses(), spec.k);
        prop_assert_eq!(gen_random(&spec).unwrap(), f);
    }

    #[test]
    fn text_round_trips(f in formula(20), cnf in small_cnf()) {
        prop_assert_eq!(parse_xsat(&write_xsat(&f)).unwrap(), f);
        prop_assert_eq!(parse_dimacs_cnf(&write_dimacs_cnf(&cnf)).unwrap(), cnf);
    }

    #[test]
    fn parser_rejects_what_validation_rejects(
        r in 1u32..7,
        rows in prop::collection::vec((0i64..9, 0i64..9, 0i64..9), 1..6),
    ) {
        let mut text = format!("p xsat+ {r} {}\n", rows.len());
        for (a, b, c) in &rows {
            text.push_str(&format!("{a} {b} {c} 0\n"));
        }
        // zeros inside a clause are malformed; everything else must validate
        if let Ok(f) = parse_xsat(&text) {
            prop_assert!(validate(&f).is_empty());
        }
    }

    #[test]
    fn parsimonious_chain_preserves_counts(cnf in small_cnf()) {
        let (x, t1) = reduce_cnf_to_xsat_with(&cnf, Gadget::Parsimonious).unwrap();
        let (p, t2) = reduce_xsat_to_positive(&x);
        // only variables the CNF itself never mentions may stay uncovered
        let n0 = cnf.num_vars();
        let only_unused = validate(&p)
            .iter()
            .all(|v| matches!(v, Violation::UncoveredVariable { var } if *var <= n0));
        prop_assert!(only_unused);
        prop_assert!(p.is_positive());
        let src = naive_count_cnf(&cnf).unwrap();
        prop_assert_eq!(naive_count(&x).unwrap(), src);
        if p.num_vars() <= xsat_core::oracle::ORACLE_MAX_VARS {
            prop_assert_eq!(naive_count(&p).unwrap(), src);
        }
        prop_assert_eq!(both_counts(&p), (src as u128, src as u128));
        let (n, k) = (cnf.num_vars() as i64, cnf.num_clauses() as i64);
        prop_assert_eq!(t1.margin_after(), n + k);
        prop_assert_eq!(t2.margin_after(), n + k);
    }

    #[test]
    fn verbatim_chain_size_accounting(cnf in small_cnf()) {
        let (x, t1) = reduce_cnf_to_xsat(&cnf).unwrap();
        let (p, t2) = reduce_xsat_to_positive(&x);
        let (n, k) = (cnf.num_vars(), cnf.num_clauses());
        prop_assert_eq!(t1.after, (n + 4 * k as u32, 3 * k));
        prop_assert!(t2.after.1 <= 4 * t1.after.1);
        prop_assert_eq!(t1.margin_after(), (n + k as u32) as i64);
        prop_assert_eq!(t2.margin_after(), t1.margin_after());
        // never undercounts: every CNF model extends at least once
        prop_assert!(naive_count(&p).unwrap() >= naive_count_cnf(&cnf).unwrap());
    }

    #[test]
    fn adding_a_clause_never_adds_models(f in formula(14), extra in (1u32..=14, 1u32..=14, 1u32..=14)) {
        let (a, b, c) = extra;
        let r = f.num_vars();
        prop_assume!(a != b && b != c && a != c && a.max(b).max(c) <= r);
        let t = Triple::pos(a, b, c);
        prop_assume!(!f.clauses().contains(&t));
        let mut clauses = f.clauses().to_vec();
        clauses.push(t);
        let g = XsatFormula::new(r, clauses, true);
        prop_assert!(naive_count(&g).unwrap() <= naive_count(&f).unwrap());
    }
}
