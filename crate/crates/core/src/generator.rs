//! Seeded instance generation.
//!
//! Randomness comes from SplitMix64 (state += 0x9E3779B97F4A7C15, then the
//! usual xor-shift-multiply finalizer), so a seed yields the same formula on
//! every platform and every build.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::formula::{Triple, XsatFormula};

/// SplitMix64.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` (multiply-shift; bias below 2^-32 for n < 2^32).
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Random,
    Partition,
    FibChain,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Random => "random",
            Family::Partition => "partition",
            Family::FibChain => "fib-chain",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "random" => Ok(Family::Random),
            "partition" => Ok(Family::Partition),
            "fib-chain" => Ok(Family::FibChain),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub r: u32,
    pub k: usize,
    pub seed: u64,
    pub family: Family,
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "family={} r={} k={} seed={}",
            self.family, self.r, self.k, self.seed
        )
    }
}

pub const MAX_REJECTIONS: u32 = 1_000_000;

pub fn generate(spec: &GenSpec) -> Result<XsatFormula> {
    match spec.family {
        Family::Random => gen_random(spec),
        Family::Partition => gen_partition(spec.r),
        Family::FibChain => gen_fib_chain(spec.k),
    }
}

/// Rejection sampling is used while the chance that `k` uniform triples
/// cover every variable is at least `1 / MIN_COVER_ODDS`.
pub const MIN_COVER_ODDS: u64 = 10_000;

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Number of `k`-sets of distinct triples over `r` variables that cover all
/// of them, and the number of all `k`-sets (inclusion–exclusion over the
/// uncovered variables).
pub fn covering_sets(r: u32, k: usize) -> (BigUint, BigUint) {
    let r = r as u64;
    let k = k as u64;
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    for j in 0..=r {
        let term = binomial(r, j) * binomial(binomial(r - j, 3).to_u64().unwrap_or(u64::MAX), k);
        if j % 2 == 0 {
            plus += term;
        } else {
            minus += term;
        }
    }
    (
        plus - minus,
        binomial(binomial(r, 3).to_u64().unwrap_or(u64::MAX), k),
    )
}

/// `k` distinct positive triples covering all `r` variables.
///
/// When covering sets are common this is exact rejection sampling, uniform
/// among covering sets. Near `3k = r` they are too rare for that, and the
/// set is built cover-first instead: a random permutation cut into triples
/// (the last one topped up with random variables), then uniform distinct
/// triples for the rest. Which path runs depends only on `(r, k)`.
pub fn gen_random(spec: &GenSpec) -> Result<XsatFormula> {
    let (r, k) = (spec.r, spec.k);
    if r < 3 {
        return Err(Error::Spec(format!("r = {r} < 3")));
    }
    if 3 * k < r as usize {
        return Err(Error::Spec(format!(
            "{k} triples cover at most {} < {r} variables",
            3 * k
        )));
    }
    if k > r as usize {
        return Err(Error::Spec(format!("k = {k} exceeds r = {r}")));
    }
    let mut rng = SplitMix64::new(spec.seed);
    if 3 * k == r as usize {
        // every covering set is a perfect partition
        return Ok(random_partition(r, &mut rng));
    }
    let (good, all) = covering_sets(r, k);
    if good * MIN_COVER_ODDS < all {
        return Ok(cover_first(r, k, &mut rng));
    }
    for _ in 0..MAX_REJECTIONS {
        let clauses = distinct_triples(r, k, &mut rng);
        let mut covered = vec![false; r as usize + 1];
        for t in &clauses {
            for v in t.vars() {
                covered[v as usize] = true;
            }
        }
        if covered[1..].iter().all(|&c| c) {
            return Ok(XsatFormula::new(r, clauses, true));
        }
    }
    Err(Error::Spec(format!(
        "no covering sample for r={r} k={k} after {MAX_REJECTIONS} tries"
    )))
}

fn random_triple(r: u32, rng: &mut SplitMix64) -> Triple {
    loop {
        let a = rng.below(r as u64) as u32 + 1;
        let b = rng.below(r as u64) as u32 + 1;
        let c = rng.below(r as u64) as u32 + 1;
        if a != b && b != c && a != c {
            return Triple::pos(a, b, c);
        }
    }
}

fn distinct_triples(r: u32, k: usize, rng: &mut SplitMix64) -> Vec<Triple> {
    let mut seen = HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let t = random_triple(r, rng);
        if seen.insert(t) {
            out.push(t);
        }
    }
    out
}

fn cover_first(r: u32, k: usize, rng: &mut SplitMix64) -> XsatFormula {
    let mut vars: Vec<u32> = (1..=r).collect();
    shuffle(&mut vars, rng);
    let mut seen = HashSet::with_capacity(k);
    let mut clauses = Vec::with_capacity(k);
    for chunk in vars.chunks(3) {
        let mut t = chunk.to_vec();
        while t.len() < 3 {
            let v = rng.below(r as u64) as u32 + 1;
            if !t.contains(&v) {
                t.push(v);
            }
        }
        let t = Triple::pos(t[0], t[1], t[2]);
        seen.insert(t);
        clauses.push(t);
    }
    while clauses.len() < k {
        let t = random_triple(r, rng);
        if seen.insert(t) {
            clauses.push(t);
        }
    }
    XsatFormula::new(r, clauses, true)
}

fn shuffle(vars: &mut [u32], rng: &mut SplitMix64) {
    for i in (1..vars.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        vars.swap(i, j);
    }
}

fn random_partition(r: u32, rng: &mut SplitMix64) -> XsatFormula {
    let mut vars: Vec<u32> = (1..=r).collect();
    shuffle(&mut vars, rng);
    let clauses = vars
        .chunks_exact(3)
        .map(|c| Triple::pos(c[0], c[1], c[2]))
        .collect();
    XsatFormula::new(r, clauses, true)
}

/// `{1,2,3}, {4,5,6}, …`: the unique clause set at density exactly 1/3.
pub fn gen_partition(r: u32) -> Result<XsatFormula> {
    if r == 0 || !r.is_multiple_of(3) {
        return Err(Error::Spec(format!(
            "partition needs r divisible by 3, got {r}"
        )));
    }
    let clauses = (0..r / 3)
        .map(|i| Triple::pos(3 * i + 1, 3 * i + 2, 3 * i + 3))
        .collect();
    Ok(XsatFormula::new(r, clauses, true))
}

/// Worst case for substitution growth: clause `i` is `{i, i+1, i+2}` for
/// `i < k` and clause `k` is `{k, k+2, k+3}`, so both body variables of
/// every earlier clause are left-hand variables of the next two. Expansion
/// sizes, last constraint first, run 2, 3, 5, 8, ….
pub fn gen_fib_chain(k: usize) -> Result<XsatFormula> {
    if k < 2 {
        return Err(Error::Spec(format!("fib chain needs k >= 2, got {k}")));
    }
    let k32 = k as u32;
    let mut clauses: Vec<Triple> = (1..k32).map(|i| Triple::pos(i, i + 1, i + 2)).collect();
    clauses.push(Triple::pos(k32, k32 + 2, k32 + 3));
    Ok(XsatFormula::new(k32 + 3, clauses, true))
}
