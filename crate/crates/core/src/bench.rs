//! Benchmark sweeps over random ensembles and the enumeration-scaling check.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::{Triple, XsatFormula};
use crate::generator::{gen_random, Family, GenSpec};
use crate::kernel::{
    count_kernel, extract_kernel, repr_bounds, repr_size, repr_within_bounds, solve, CountOptions,
    Method,
};
use crate::linsys::{encode_sys, gauss_jordan};
use crate::subst;

/// Acceptance band for the slope of log₂(enumeration time) against nullity.
pub const SLOPE_BAND: (f64, f64) = (0.7, 1.3);

/// Clause count for density `kappa` at `r` variables: `⌈κr⌉`, raised to
/// `⌈r/3⌉` and capped at `r`.
pub fn clauses_for(r: u32, kappa: &BigRational) -> usize {
    let want = (kappa * BigInt::from(r)).ceil().to_integer();
    let want = want.to_usize().unwrap_or(usize::MAX);
    let floor = (r as usize).div_ceil(3);
    want.max(floor).min(r as usize)
}

pub fn parse_kappa(s: &str) -> std::result::Result<BigRational, String> {
    let bad = || format!("bad density `{s}` (use n/d or a decimal)");
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    Ok(BigRational::new(n, BigInt::from(10).pow(frac.len() as u32)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub r_min: u32,
    pub r_max: u32,
    pub kappas: Vec<BigRational>,
    pub per_cell: usize,
    pub seed: u64,
    pub jobs: usize,
    pub max_free: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let q = |n: i32, d: i32| BigRational::new(n.into(), d.into());
        BenchConfig {
            r_min: 9,
            r_max: 30,
            kappas: vec![q(1, 3), q(1, 2), q(2, 3), q(1, 1)],
            per_cell: 3,
            seed: 1,
            jobs: 1,
            max_free: 24,
        }
    }
}

impl BenchConfig {
    pub fn echo(&self) -> String {
        let kappas: Vec<String> = self.kappas.iter().map(|k| k.to_string()).collect();
        format!(
            "r-range={}..{} kappa={} per-cell={} seed={} max-free={}",
            self.r_min,
            self.r_max,
            kappas.join(","),
            self.per_cell,
            self.seed,
            self.max_free
        )
    }

    /// Every (spec, κ) the sweep visits, in record order.
    pub fn specs(&self) -> Vec<(GenSpec, BigRational)> {
        let mut out = Vec::new();
        let mut index = 0u64;
        for r in self.r_min..=self.r_max {
            for kappa in &self.kappas {
                let k = clauses_for(r, kappa);
                for _ in 0..self.per_cell {
                    out.push((
                        GenSpec {
                            r,
                            k,
                            seed: self.seed ^ index,
                            family: Family::Random,
                        },
                        kappa.clone(),
                    ));
                    index += 1;
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub spec: GenSpec,
    pub rank: usize,
    pub nullity: usize,
    /// Rank induced by substitution, `|N|`.
    pub rank_subst: usize,
    pub kappa: BigRational,
    pub kernel_width: usize,
    pub count: u128,
    pub repr_size_bits: f64,
    pub bound_lo: f64,
    pub bound_hi: f64,
    /// Exact integer check of `bound_lo ≤ repr_size_bits ≤ bound_hi`.
    pub bounds_ok: bool,
    pub encode_us: u128,
    pub eliminate_us: u128,
    pub enumerate_us: u128,
}

impl BenchRow {
    pub fn record(&self) -> String {
        format!(
            "{} kappa={} rank={} nullity={} rank_subst={} kernel_width={} count={} repr_size_bits={:.4} bound_lo={:.4} bound_hi={:.4} bounds_ok={} encode_us={} eliminate_us={} enumerate_us={}",
            self.spec,
            self.kappa,
            self.rank,
            self.nullity,
            self.rank_subst,
            self.kernel_width,
            self.count,
            self.repr_size_bits,
            self.bound_lo,
            self.bound_hi,
            self.bounds_ok,
            self.encode_us,
            self.eliminate_us,
            self.enumerate_us
        )
    }
}

#[derive(Clone, Debug)]
pub enum CellResult {
    Row(BenchRow),
    Skipped { spec: GenSpec, reason: String },
}

impl CellResult {
    pub fn record(&self) -> String {
        match self {
            CellResult::Row(row) => row.record(),
            CellResult::Skipped { spec, reason } => format!("{spec} skipped reason=\"{reason}\""),
        }
    }
}

pub fn bench_one(spec: &GenSpec, kappa: &BigRational, max_free: usize) -> CellResult {
    let skip = |reason: String| CellResult::Skipped {
        spec: *spec,
        reason,
    };
    let f = match gen_random(spec) {
        Ok(f) => f,
        Err(e) => return skip(e.to_string()),
    };
    let opts = CountOptions {
        max_free,
        ..CountOptions::default()
    };
    let out = match solve(&f, Method::Gauss, &opts) {
        Ok(o) => o,
        Err(e) => return skip(e.to_string()),
    };
    let state = match subst::run(&f) {
        Ok(s) => s,
        Err(e) => return skip(e.to_string()),
    };
    let profile = subst::expansion_profile(&state);
    let total = profile.iter().sum::<u128>();
    let (lo_ok, hi_ok) = repr_within_bounds(f.num_vars(), total);
    let (bound_lo, bound_hi) = repr_bounds(f.num_vars());
    let rep = out.report;
    CellResult::Row(BenchRow {
        spec: *spec,
        rank: rep.rank,
        nullity: rep.nullity,
        rank_subst: state.independent().len(),
        kappa: kappa.clone(),
        kernel_width: rep.kernel_vars,
        count: rep.count,
        repr_size_bits: repr_size(&out.kernel, &profile),
        bound_lo,
        bound_hi,
        bounds_ok: lo_ok && hi_ok,
        encode_us: rep.phases.encode_us,
        eliminate_us: rep.phases.eliminate_us,
        enumerate_us: rep.phases.enumerate_us,
    })
}

/// Runs every cell, up to `jobs` at a time; results come back in spec order.
pub fn run_bench(cfg: &BenchConfig) -> Vec<CellResult> {
    let specs = cfg.specs();
    let run = || {
        specs
            .par_iter()
            .map(|(spec, kappa)| bench_one(spec, kappa, cfg.max_free))
            .collect::<Vec<_>>()
    };
    if cfg.jobs <= 1 {
        return specs
            .iter()
            .map(|(spec, kappa)| bench_one(spec, kappa, cfg.max_free))
            .collect();
    }
    match rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

/// Least-squares slope of `y` on `x`; `None` for fewer than two distinct `x`.
pub fn regression_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchSummary {
    pub rows: usize,
    pub skipped: usize,
    pub bound_violations: usize,
    /// Instances where substitution rank `|N|` differs from the rank.
    pub rank_disagreements: usize,
    pub nullity_ratio_min: f64,
    pub nullity_ratio_mean: f64,
    pub nullity_ratio_max: f64,
    /// Slope over rows with nullity ≥ `MIN_SLOPE_NULLITY` and nonzero time.
    pub slope: Option<f64>,
}

pub const MIN_SLOPE_NULLITY: usize = 8;

impl BenchSummary {
    pub fn slope_ok(&self) -> Option<bool> {
        self.slope
            .map(|s| (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&s))
    }

    pub fn record(&self) -> String {
        let mut s = format!(
            "summary rows={} skipped={} bound_violations={} rank_disagreements={} nullity_ratio_min={:.4} nullity_ratio_mean={:.4} nullity_ratio_max={:.4}",
            self.rows,
            self.skipped,
            self.bound_violations,
            self.rank_disagreements,
            self.nullity_ratio_min,
            self.nullity_ratio_mean,
            self.nullity_ratio_max
        );
        match self.slope {
            Some(sl) => {
                let _ = write!(s, " ensemble_slope={sl:.4}");
            }
            None => s.push_str(" ensemble_slope=insufficient-data"),
        }
        s
    }
}

pub fn summarize(results: &[CellResult]) -> BenchSummary {
    let rows: Vec<&BenchRow> = results
        .iter()
        .filter_map(|r| match r {
            CellResult::Row(row) => Some(row),
            CellResult::Skipped { .. } => None,
        })
        .collect();
    let ratios: Vec<f64> = rows
        .iter()
        .map(|r| r.nullity as f64 / r.spec.r as f64)
        .collect();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.nullity >= MIN_SLOPE_NULLITY && r.enumerate_us > 0)
        .map(|r| (r.nullity as f64, (r.enumerate_us as f64).log2()))
        .collect();
    let mean = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    BenchSummary {
        rows: rows.len(),
        skipped: results.len() - rows.len(),
        bound_violations: rows.iter().filter(|r| !r.bounds_ok).count(),
        rank_disagreements: rows.iter().filter(|r| r.rank != r.rank_subst).count(),
        nullity_ratio_min: ratios.iter().copied().reduce(f64::min).unwrap_or(0.0),
        nullity_ratio_mean: mean,
        nullity_ratio_max: ratios.iter().copied().fold(0.0, f64::max),
        slope: regression_slope(&points),
    }
}

/// `rank` clauses whose rank is exactly `rank` and nullity exactly
/// `nullity`: clause `i` owns the private variable `i + 1`, and its two other
/// slots cycle through the `nullity` shared variables.
pub fn fixed_rank_family(rank: u32, nullity: u32) -> Result<XsatFormula> {
    if rank == 0 || nullity < 2 || nullity > 2 * rank {
        return Err(Error::Spec(format!(
            "fixed-rank family needs 2 <= nullity <= 2·rank, got rank={rank} nullity={nullity}"
        )));
    }
    let shared = |slot: u32| rank + 1 + slot % nullity;
    let clauses = (0..rank)
        .map(|i| Triple::pos(i + 1, shared(2 * i), shared(2 * i + 1)))
        .collect();
    Ok(XsatFormula::new(rank + nullity, clauses, true))
}

/// Fastest of `reps` kernel counts for `f` (Gauss path, one thread).
pub fn time_enumeration(f: &XsatFormula, reps: usize) -> Result<(Duration, u128)> {
    let kern = extract_kernel(&gauss_jordan(&encode_sys(f)?));
    let opts = CountOptions {
        max_free: 63,
        ..CountOptions::default()
    };
    let mut best = Duration::MAX;
    let mut count = 0;
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        count = count_kernel(&kern, &opts)?.count;
        best = best.min(t.elapsed());
    }
    Ok((best, count))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingResult {
    /// (nullity, seconds)
    pub points: Vec<(u32, f64)>,
    pub slope: Option<f64>,
}

impl ScalingResult {
    pub fn slope_ok(&self) -> bool {
        self.slope
            .is_some_and(|s| (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&s))
    }
}

/// Times the kernel count over [`fixed_rank_family`] at each nullity and
/// fits log₂(time) against nullity.
pub fn scaling_check(rank: u32, nullities: impl IntoIterator<Item = u32>) -> Result<ScalingResult> {
    let mut points = Vec::new();
    for d in nullities {
        let f = fixed_rank_family(rank, d)?;
        // more repetitions where a single run is short
        let reps = (1usize << 22u32.saturating_sub(d).min(8)).clamp(3, 64);
        let (t, _) = time_enumeration(&f, reps)?;
        points.push((d, t.as_secs_f64()));
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(d, t)| (d as f64, t.max(1e-9).log2()))
        .collect();
    Ok(ScalingResult {
        slope: regression_slope(&xy),
        points,
    })
}

/// `x/y` for readable records.
pub fn ratio(x: u64, y: u64) -> BigRational {
    let g = x.gcd(&y).max(1);
    BigRational::new(BigInt::from(x / g), BigInt::from(y / g))
}
