//! 0/1 kernel extraction and counting.
//!
//! After elimination every pivot variable is an affine function of the free
//! variables: `pivot = rhs − Σ coeff_i·s_i`. A free assignment `s ∈ {0,1}^d`
//! extends to a model iff every such residual lands in `{0, 1}`, and then it
//! extends in exactly one way, so counting admissible `s` counts models.
//!
//! Enumeration walks `{0,1}^d` in Gray-code order. Each row keeps its
//! residual and only the rows touching the flipped bit are updated, so a
//! step costs the number of nonzeros in one column, not `d · rows`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{Assignment, XsatFormula};
use crate::linsys::{encode_sys, gauss_jordan, Rational, RrefResult};
use crate::subst::{self, SubstitutionState};

pub const DEFAULT_MAX_FREE: usize = 30;
pub const DEFAULT_WITNESS_CAP: usize = 1000;

/// One kernel row: `pivot = rhs − Σ coeffs[i]·s_i`.
///
/// A row without a pivot is a filter: its residual must be exactly 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelRow {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    pub pivot: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelInstance {
    pub num_vars: u32,
    /// Free variables in ascending order; `coeffs[i]` belongs to `free_vars[i]`.
    pub free_vars: Vec<u32>,
    pub rows: Vec<KernelRow>,
}

impl KernelInstance {
    pub fn width(&self) -> usize {
        self.free_vars.len()
    }

    pub fn num_filters(&self) -> usize {
        self.rows.iter().filter(|r| r.pivot.is_none()).count()
    }

    /// Residual of `row` under the free assignment `mask`, computed directly.
    pub fn residual(&self, row: &KernelRow, mask: u64) -> Rational {
        let mut acc = row.rhs.clone();
        for (i, c) in row.coeffs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc -= c;
            }
        }
        acc
    }
}

pub fn extract_kernel(rref: &RrefResult) -> KernelInstance {
    let sys = &rref.matrix;
    let free_vars: Vec<u32> = rref.free_cols.iter().map(|&c| sys.var_of_col(c)).collect();
    let mut rows: Vec<KernelRow> = rref
        .pivot_cols
        .iter()
        .enumerate()
        .map(|(r, &pc)| KernelRow {
            coeffs: rref
                .free_cols
                .iter()
                .map(|&c| sys.entry(r, c).clone())
                .collect(),
            rhs: sys.rhs(r).clone(),
            pivot: Some(sys.var_of_col(pc)),
        })
        .collect();
    if rref.inconsistent {
        rows.push(KernelRow {
            coeffs: vec![Rational::zero(); free_vars.len()],
            rhs: Rational::one(),
            pivot: None,
        });
    }
    KernelInstance {
        num_vars: sys.num_vars() as u32,
        free_vars,
        rows,
    }
}

/// Kernel of a substitution fixpoint. The first constraint for each
/// left-hand variable is its pivot row; later ones become filters equal to
/// their difference with it.
pub fn kernel_from_subst(state: &SubstitutionState) -> Result<KernelInstance> {
    if !state.is_fixpoint() {
        return Err(Error::NotFixpoint);
    }
    let free_vars: Vec<u32> = state.dependent().iter().copied().collect();
    let col_of = |v: u32| free_vars.binary_search(&v).expect("body var is free");
    let to_row = |c: &subst::LinearConstraint| {
        let mut coeffs = vec![Rational::zero(); free_vars.len()];
        for (&v, b) in &c.body {
            coeffs[col_of(v)] = Rational::from_integer(b.clone());
        }
        (coeffs, Rational::from_integer(c.constant.clone()))
    };
    let mut primary: Vec<(u32, usize)> = Vec::new();
    let mut rows: Vec<KernelRow> = Vec::new();
    for c in state.constraints() {
        let (coeffs, rhs) = to_row(c);
        match primary.iter().find(|(v, _)| *v == c.lhs) {
            None => {
                primary.push((c.lhs, rows.len()));
                rows.push(KernelRow {
                    coeffs,
                    rhs,
                    pivot: Some(c.lhs),
                });
            }
            Some(&(_, p)) => {
                let base = &rows[p];
                let coeffs = coeffs
                    .iter()
                    .zip(&base.coeffs)
                    .map(|(a, b)| a - b)
                    .collect();
                let rhs = &rhs - &base.rhs;
                rows.push(KernelRow {
                    coeffs,
                    rhs,
                    pivot: None,
                });
            }
        }
    }
    Ok(KernelInstance {
        num_vars: state.num_vars(),
        free_vars,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountOptions {
    pub max_free: usize,
    /// Collect witnesses, returned only if the count does not exceed this cap.
    pub witness_cap: Option<usize>,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            max_free: DEFAULT_MAX_FREE,
            witness_cap: None,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelCount {
    pub count: u128,
    /// Sorted; `None` if not requested or the count exceeded the cap.
    pub witnesses: Option<Vec<Assignment>>,
}

pub fn count_kernel(kern: &KernelInstance, opts: &CountOptions) -> Result<KernelCount> {
    let d = kern.width();
    if d > opts.max_free || d > 63 {
        return Err(Error::Capacity {
            what: "kernel enumeration",
            needed: d,
            cap: opts.max_free.min(63),
            hint: " free variables; raise --max-free or measure with `xsat bench`",
        });
    }
    let cap = opts.witness_cap;
    let (count, witnesses) = match IntKernel::new(kern) {
        Some(ik) => ik.count(opts.jobs.max(1), cap),
        None => reference_enumerate(kern, cap),
    };
    let witnesses = match cap {
        Some(cap) if count <= cap as u128 => {
            let mut w = witnesses;
            w.sort();
            Some(w)
        }
        _ => None,
    };
    Ok(KernelCount { count, witnesses })
}

/// Direct rational evaluation of every free assignment. Independent of the
/// Gray-code path; used as its cross-check and when coefficients overflow.
pub fn count_kernel_reference(kern: &KernelInstance) -> Result<u128> {
    if kern.width() > 63 {
        return Err(Error::Capacity {
            what: "kernel enumeration",
            needed: kern.width(),
            cap: 63,
            hint: " free variables",
        });
    }
    Ok(reference_enumerate(kern, None).0)
}

fn reference_enumerate(kern: &KernelInstance, cap: Option<usize>) -> (u128, Vec<Assignment>) {
    let d = kern.width();
    let mut count = 0u128;
    let mut witnesses = Vec::new();
    let zero = Rational::zero();
    let one = Rational::one();
    'outer: for mask in 0..1u64 << d {
        let mut values = Vec::new();
        for row in &kern.rows {
            let res = kern.residual(row, mask);
            let ok = match row.pivot {
                Some(_) => res == zero || res == one,
                None => res == zero,
            };
            if !ok {
                continue 'outer;
            }
            if let Some(p) = row.pivot {
                values.push((p, res == one));
            }
        }
        count += 1;
        if cap.is_some_and(|c| witnesses.len() <= c) {
            let mut a = Assignment::zeros(kern.num_vars as usize);
            for (i, &v) in kern.free_vars.iter().enumerate() {
                a.set(v, mask >> i & 1 == 1);
            }
            for (p, b) in values {
                a.set(p, b);
            }
            witnesses.push(a);
        }
    }
    (count, witnesses)
}

/// Kernel with every row scaled to integers: `residual·scale` is tracked
/// and must land on `0` or `scale` (`0` for filters).
struct IntKernel<'a> {
    kern: &'a KernelInstance,
    /// (scaled rhs, scale, is pivot row)
    rows: Vec<(i64, i64, bool)>,
    /// columns[i]: (row, scaled coefficient) for nonzero entries of free var i
    columns: Vec<Vec<(usize, i64)>>,
}

const MAG_LIMIT: i128 = 1 << 61;

impl<'a> IntKernel<'a> {
    fn new(kern: &'a KernelInstance) -> Option<Self> {
        let d = kern.width();
        let mut rows = Vec::with_capacity(kern.rows.len());
        let mut columns = vec![Vec::new(); d];
        for (ri, row) in kern.rows.iter().enumerate() {
            let mut scale = BigInt::one();
            for x in row.coeffs.iter().chain(std::iter::once(&row.rhs)) {
                scale = scale.lcm(x.denom());
            }
            let scaled = |x: &Rational| (x * &scale).to_integer();
            let rhs = scaled(&row.rhs);
            let mut magnitude = rhs.abs() + &scale;
            for (i, c) in row.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let a = scaled(c);
                magnitude += a.abs();
                columns[i].push((ri, a.to_i64()?));
            }
            if magnitude.to_i128()? >= MAG_LIMIT {
                return None;
            }
            rows.push((rhs.to_i64()?, scale.to_i64()?, row.pivot.is_some()));
        }
        Some(IntKernel {
            kern,
            rows,
            columns,
        })
    }

    fn count(&self, jobs: usize, cap: Option<usize>) -> (u128, Vec<Assignment>) {
        let d = self.columns.len();
        let mut prefix_bits = 0;
        if jobs > 1 {
            while prefix_bits < d && (1usize << prefix_bits) < jobs * 4 {
                prefix_bits += 1;
            }
        }
        if prefix_bits == 0 {
            return self.count_chunk(d, 0, cap);
        }
        let inner = d - prefix_bits;
        let run = || {
            (0..1u64 << prefix_bits)
                .into_par_iter()
                .map(|p| self.count_chunk(inner, p << inner, cap))
                .collect::<Vec<_>>()
        };
        let parts = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        };
        let mut count = 0u128;
        let mut witnesses = Vec::new();
        for (c, w) in parts {
            count += c;
            witnesses.extend(w);
        }
        (count, witnesses)
    }

    /// Gray-code walk over the low `inner` bits with the high bits fixed to
    /// those of `base`.
    fn count_chunk(&self, inner: usize, base: u64, cap: Option<usize>) -> (u128, Vec<Assignment>) {
        let ok = |res: i64, scale: i64, pivot: bool| res == 0 || (pivot && res == scale);
        let mut residual: Vec<i64> = self.rows.iter().map(|r| r.0).collect();
        for (i, col) in self.columns.iter().enumerate() {
            if base >> i & 1 == 1 {
                for &(r, a) in col {
                    residual[r] -= a;
                }
            }
        }
        let mut bad = self
            .rows
            .iter()
            .zip(&residual)
            .filter(|((_, s, p), &res)| !ok(res, *s, *p))
            .count();
        let mut mask = base;
        let mut count = 0u128;
        let mut witnesses = Vec::new();
        let record = |mask: u64, residual: &[i64], witnesses: &mut Vec<Assignment>| {
            if cap.is_some_and(|c| witnesses.len() <= c) {
                witnesses.push(self.witness(mask, residual));
            }
        };
        if bad == 0 {
            count += 1;
            record(mask, &residual, &mut witnesses);
        }
        for step in 1..1u64 << inner {
            let bit = step.trailing_zeros() as usize;
            mask ^= 1 << bit;
            let setting = mask >> bit & 1 == 1;
            for &(r, a) in &self.columns[bit] {
                let (_, scale, pivot) = self.rows[r];
                let before = ok(residual[r], scale, pivot);
                if setting {
                    residual[r] -= a;
                } else {
                    residual[r] += a;
                }
                let after = ok(residual[r], scale, pivot);
                if before && !after {
                    bad += 1;
                } else if !before && after {
                    bad -= 1;
                }
            }
            if bad == 0 {
                count += 1;
                record(mask, &residual, &mut witnesses);
            }
        }
        (count, witnesses)
    }

    fn witness(&self, mask: u64, residual: &[i64]) -> Assignment {
        let kern = self.kern;
        let mut a = Assignment::zeros(kern.num_vars as usize);
        for (i, &v) in kern.free_vars.iter().enumerate() {
            a.set(v, mask >> i & 1 == 1);
        }
        for (row, (&res, &(_, scale, _))) in kern.rows.iter().zip(residual.iter().zip(&self.rows)) {
            if let Some(p) = row.pivot {
                a.set(p, res == scale);
            }
        }
        a
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Method {
    #[default]
    Gauss,
    Subst,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Gauss => "gauss",
            Method::Subst => "subst",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gauss" => Ok(Method::Gauss),
            "subst" => Ok(Method::Subst),
            other => Err(format!(
                "unknown method `{other}` (expected gauss or subst)"
            )),
        }
    }
}

/// Per-phase wall time in microseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseTimes {
    pub encode_us: u128,
    pub eliminate_us: u128,
    pub enumerate_us: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub sat: bool,
    pub count: u128,
    pub rank: usize,
    pub nullity: usize,
    pub kernel_vars: usize,
    pub kernel_clauses: usize,
    /// `r·log₂(Σ|n(i)|)` over the substitution fixpoint.
    pub repr_size_bits: f64,
    pub method: Method,
    pub elapsed_ms: u128,
    pub phases: PhaseTimes,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub report: SolveReport,
    pub witnesses: Option<Vec<Assignment>>,
    pub kernel: KernelInstance,
}

/// Encode, eliminate (or substitute), extract the kernel and count.
///
/// The formula must be negation-free; uncovered variables are allowed and
/// end up as free kernel columns.
pub fn solve(f: &XsatFormula, method: Method, opts: &CountOptions) -> Result<SolveOutcome> {
    if let Some(i) = f.clauses().iter().position(|c| !c.is_positive()) {
        return Err(Error::Encoding { clause: i + 1 });
    }
    let start = Instant::now();
    let mut phases = PhaseTimes::default();
    let (kernel, rank, nullity, inconsistent, profile) = match method {
        Method::Gauss => {
            let t = Instant::now();
            let sys = encode_sys(f)?;
            phases.encode_us = t.elapsed().as_micros();
            let t = Instant::now();
            let rref = gauss_jordan(&sys);
            let kernel = extract_kernel(&rref);
            phases.eliminate_us = t.elapsed().as_micros();
            let profile = subst::expansion_profile(&subst::run(f)?);
            (kernel, rref.rank, rref.nullity, rref.inconsistent, profile)
        }
        Method::Subst => {
            let t = Instant::now();
            let init = SubstitutionState::from_formula(f)?;
            phases.encode_us = t.elapsed().as_micros();
            let t = Instant::now();
            let state = subst::substitute(&init)?;
            let (rank, nullity) = subst::rank_of_subst(&state)?;
            let kernel = kernel_from_subst(&state)?;
            phases.eliminate_us = t.elapsed().as_micros();
            let profile = subst::expansion_profile(&state);
            (kernel, rank, nullity, state.inconsistent(), profile)
        }
    };
    let t = Instant::now();
    let counted = if inconsistent {
        KernelCount {
            count: 0,
            witnesses: opts.witness_cap.map(|_| Vec::new()),
        }
    } else {
        count_kernel(&kernel, opts)?
    };
    phases.enumerate_us = t.elapsed().as_micros();
    let report = SolveReport {
        sat: counted.count > 0,
        count: counted.count,
        rank,
        nullity,
        kernel_vars: kernel.width(),
        kernel_clauses: kernel.rows.len(),
        repr_size_bits: repr_size(&kernel, &profile),
        method,
        elapsed_ms: start.elapsed().as_millis(),
        phases,
    };
    Ok(SolveOutcome {
        report,
        witnesses: counted.witnesses,
        kernel,
    })
}

/// `r·log₂(Σ|n(i)|)`; zero for an empty (or all-zero) profile.
pub fn repr_size(kern: &KernelInstance, profile: &[u128]) -> f64 {
    let total: u128 = profile.iter().fold(0u128, |a, &b| a.saturating_add(b));
    if total == 0 {
        return 0.0;
    }
    kern.num_vars as f64 * (total as f64).log2()
}

/// `(r·log₂(2r/3), r²·log₂(1.62))`.
pub fn repr_bounds(r: u32) -> (f64, f64) {
    let r = r as f64;
    (r * (2.0 * r / 3.0).log2(), r * r * 1.62f64.log2())
}

/// Exact comparison of `r·log₂(total)` against both bounds:
/// `total ≥ 2r/3 ⇔ 3·total ≥ 2r` and `total ≤ 1.62^r ⇔ total·100^r ≤ 162^r`.
pub fn repr_within_bounds(r: u32, total: u128) -> (bool, bool) {
    let lo = 3 * total >= 2 * r as u128;
    let hi = BigInt::from(total) * BigInt::from(100u32).pow(r) <= BigInt::from(162u32).pow(r);
    (lo, hi)
}
