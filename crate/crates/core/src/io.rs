//! Text formats.
//!
//! DIMACS CNF (3 literals per clause), the XSAT format
//!
//! ```text
//! c comment
//! p xsat+ 4 2
//! 1 2 3 0
//! 2 3 B 0
//! ```
//!
//! where `B` is the constant ⊥ and `p xsat` additionally admits negative
//! literals, the 0-1 kernel format (`p ipe <d> <rows>`), and the single-line
//! solve record.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::formula::{dimacs_literal, validate, CnfFormula, Literal, Triple, XsatFormula};
use crate::kernel::{KernelInstance, KernelRow, SolveReport};
use crate::linsys::Rational;

/// What the `p` line of an input announces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Cnf,
    Xsat,
    XsatPositive,
}

/// Format of the first `p` line, if any.
pub fn detect_format(text: &str) -> Option<InputFormat> {
    let line = text.lines().map(str::trim).find(|l| l.starts_with('p'))?;
    match line.split_whitespace().nth(1)? {
        "cnf" => Some(InputFormat::Cnf),
        "xsat" => Some(InputFormat::Xsat),
        "xsat+" => Some(InputFormat::XsatPositive),
        _ => None,
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn is_comment(l: &str) -> bool {
    l.is_empty() || l.starts_with('c') || l.starts_with('%')
}

fn parse_header(line_no: usize, line: &str, tags: &[&str]) -> Result<(String, u32, usize)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "p" || !tags.contains(&toks[1]) {
        return Err(parse_err(
            line_no,
            format!(
                "malformed header `{line}`, expected `p {} <vars> <clauses>`",
                tags.join("|")
            ),
        ));
    }
    let vars = toks[2]
        .parse()
        .map_err(|_| parse_err(line_no, format!("bad variable count `{}`", toks[2])))?;
    let clauses = toks[3]
        .parse()
        .map_err(|_| parse_err(line_no, format!("bad clause count `{}`", toks[3])))?;
    Ok((toks[1].to_string(), vars, clauses))
}

pub fn parse_dimacs_cnf(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<[Literal; 3]> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut start_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if is_comment(line) {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "second header"));
            }
            let (_, v, c) = parse_header(line_no, line, &["cnf"])?;
            header = Some((v, c));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(parse_err(line_no, "clause before header"));
        };
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad literal `{tok}`")))?;
            if current.is_empty() {
                start_line = line_no;
            }
            if x == 0 {
                if current.len() != 3 {
                    return Err(parse_err(
                        start_line,
                        format!("clause width {}, expected 3", current.len()),
                    ));
                }
                clauses.push([
                    dimacs_literal(current[0]),
                    dimacs_literal(current[1]),
                    dimacs_literal(current[2]),
                ]);
                current.clear();
                continue;
            }
            if x.unsigned_abs() > num_vars as u64 {
                return Err(parse_err(
                    line_no,
                    format!("index {} > {num_vars}", x.unsigned_abs()),
                ));
            }
            current.push(x);
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(parse_err(0, "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(parse_err(start_line, "unterminated clause"));
    }
    if clauses.len() != num_clauses {
        return Err(parse_err(
            0,
            format!(
                "header announces {num_clauses} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    CnfFormula::new(num_vars, clauses)
}

/// Parses and validates an XSAT instance. One clause per line.
pub fn parse_xsat(text: &str) -> Result<XsatFormula> {
    let mut header: Option<(bool, u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut clause_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if is_comment(line) {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "second header"));
            }
            let (tag, v, c) = parse_header(line_no, line, &["xsat", "xsat+"])?;
            header = Some((tag == "xsat+", v, c));
            continue;
        }
        let Some((positive, num_vars, _)) = header else {
            return Err(parse_err(line_no, "clause before header"));
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 || toks[3] != "0" {
            return Err(parse_err(
                line_no,
                "expected exactly three literals followed by 0",
            ));
        }
        let mut lits = [Literal::Bottom; 3];
        for (slot, tok) in lits.iter_mut().zip(&toks[..3]) {
            *slot = if *tok == "B" {
                Literal::Bottom
            } else {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad literal `{tok}`")))?;
                if x == 0 {
                    return Err(parse_err(line_no, "literal 0 inside clause"));
                }
                if x < 0 && positive {
                    return Err(parse_err(line_no, "negation in positive format"));
                }
                if x.unsigned_abs() > num_vars as u64 {
                    return Err(parse_err(
                        line_no,
                        format!("index {} > {num_vars}", x.unsigned_abs()),
                    ));
                }
                dimacs_literal(x)
            };
        }
        clauses.push(Triple::new(lits[0], lits[1], lits[2]));
        clause_lines.push(line_no);
    }
    let Some((positive, num_vars, num_clauses)) = header else {
        return Err(parse_err(0, "missing `p xsat` header"));
    };
    if clauses.len() != num_clauses {
        return Err(parse_err(
            0,
            format!(
                "header announces {num_clauses} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    let f = XsatFormula::new(num_vars, clauses, positive);
    let violations = validate(&f);
    if let Some(first) = violations.first() {
        let line = match first {
            crate::formula::Violation::DuplicateClause { second, .. } => clause_lines[second - 1],
            crate::formula::Violation::RepeatedLiteral { clause }
            | crate::formula::Violation::ComplementaryPair { clause, .. } => {
                clause_lines[clause - 1]
            }
            _ => 0,
        };
        return Err(parse_err(line, first.to_string()));
    }
    Ok(f)
}

pub fn write_xsat(f: &XsatFormula) -> String {
    let mut out = String::new();
    let tag = if f.is_positive() { "xsat+" } else { "xsat" };
    let _ = writeln!(out, "p {tag} {} {}", f.num_vars(), f.num_clauses());
    for c in f.clauses() {
        for lit in c.lits() {
            match lit.to_dimacs() {
                Some(x) => {
                    let _ = write!(out, "{x} ");
                }
                None => out.push_str("B "),
            }
        }
        out.push_str("0\n");
    }
    out
}

pub fn write_dimacs_cnf(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars(), f.num_clauses());
    for c in f.clauses() {
        for lit in c {
            let _ = write!(out, "{} ", lit.to_dimacs().unwrap_or(0));
        }
        out.push_str("0\n");
    }
    out
}

/// `sat=… count=… rank=… nullity=… kernel_vars=… kernel_clauses=…
/// repr_size_bits=… method=… elapsed_ms=…`, newline-terminated.
pub fn emit_report(rep: &SolveReport) -> String {
    format!(
        "sat={} count={} rank={} nullity={} kernel_vars={} kernel_clauses={} repr_size_bits={:.4} method={} elapsed_ms={}\n",
        rep.sat,
        rep.count,
        rep.rank,
        rep.nullity,
        rep.kernel_vars,
        rep.kernel_clauses,
        rep.repr_size_bits,
        rep.method,
        rep.elapsed_ms
    )
}

fn fmt_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_rational(tok: &str, line: usize) -> Result<Rational> {
    let bad = || parse_err(line, format!("bad rational `{tok}`"));
    match tok.split_once('/') {
        None => Ok(Rational::from_integer(
            tok.parse::<BigInt>().map_err(|_| bad())?,
        )),
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// The kernel as a 0-1 equality program. Two comment lines carry the free
/// variables and each row's pivot (0 for a filter row).
pub fn write_kernel(k: &KernelInstance) -> String {
    let mut out = String::new();
    let free: Vec<String> = k.free_vars.iter().map(u32::to_string).collect();
    let pivots: Vec<String> = k
        .rows
        .iter()
        .map(|r| r.pivot.unwrap_or(0).to_string())
        .collect();
    let _ = writeln!(out, "c vars {}", k.num_vars);
    let _ = writeln!(out, "c free {}", free.join(" "));
    let _ = writeln!(out, "c pivots {}", pivots.join(" "));
    let _ = writeln!(out, "p ipe {} {}", k.width(), k.rows.len());
    for row in &k.rows {
        let mut line: Vec<String> = row.coeffs.iter().map(fmt_rational).collect();
        line.push("=".into());
        line.push(fmt_rational(&row.rhs));
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn parse_kernel(text: &str) -> Result<KernelInstance> {
    let mut num_vars = None;
    let mut free_vars = None;
    let mut pivots: Option<Vec<u32>> = None;
    let mut dims: Option<(usize, usize)> = None;
    let mut rows = Vec::new();
    let ints = |s: &str, line| -> Result<Vec<u32>> {
        s.split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| parse_err(line, format!("bad index `{t}`")))
            })
            .collect()
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("c vars") {
            num_vars = ints(rest, line_no)?.first().copied();
        } else if let Some(rest) = line.strip_prefix("c free") {
            free_vars = Some(ints(rest, line_no)?);
        } else if let Some(rest) = line.strip_prefix("c pivots") {
            pivots = Some(ints(rest, line_no)?);
        } else if line.starts_with('c') {
            continue;
        } else if line.starts_with('p') {
            let (_, d, n) = parse_header(line_no, line, &["ipe"])?;
            dims = Some((d as usize, n));
        } else {
            let Some((d, _)) = dims else {
                return Err(parse_err(line_no, "row before header"));
            };
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| parse_err(line_no, "missing `=`"))?;
            let coeffs = lhs
                .split_whitespace()
                .map(|t| parse_rational(t, line_no))
                .collect::<Result<Vec<_>>>()?;
            if coeffs.len() != d {
                return Err(parse_err(
                    line_no,
                    format!("{} coefficients, expected {d}", coeffs.len()),
                ));
            }
            let rhs = parse_rational(rhs.trim(), line_no)?;
            rows.push((coeffs, rhs));
        }
    }
    let (d, n) = dims.ok_or_else(|| parse_err(0, "missing `p ipe` header"))?;
    if rows.len() != n {
        return Err(parse_err(
            0,
            format!("header announces {n} rows, found {}", rows.len()),
        ));
    }
    let free_vars = free_vars.unwrap_or_else(|| (1..=d as u32).collect());
    let pivots = pivots.unwrap_or_else(|| (0..n).map(|j| (d + j + 1) as u32).collect());
    if free_vars.len() != d || pivots.len() != n {
        return Err(parse_err(0, "comment metadata does not match header"));
    }
    let num_vars = num_vars.unwrap_or((d + n) as u32);
    let rows = rows
        .into_iter()
        .zip(pivots)
        .map(|((coeffs, rhs), p)| KernelRow {
            coeffs,
            rhs,
            pivot: (p != 0).then_some(p),
        })
        .collect();
    Ok(KernelInstance {
        num_vars,
        free_vars,
        rows,
    })
}
