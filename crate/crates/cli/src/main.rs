//! `xsat`: exact one-in-three SAT solving and counting from the command line.
//!
//! Exit codes: 10 satisfiable, 20 unsatisfiable, 0 success in count-only
//! modes, 1 input or usage error, 2 capacity exceeded, 3 verify found a
//! disagreement, 4 bench fixed-rank slope outside its band.

use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use xsat_core::bench::{self, parse_kappa, BenchConfig, CellResult, SLOPE_BAND};
use xsat_core::generator::{generate, Family, GenSpec};
use xsat_core::io::{
    detect_format, emit_report, parse_dimacs_cnf, parse_xsat, write_kernel, write_xsat, InputFormat,
};
use xsat_core::verify::{run_verify, VerifyConfig};
use xsat_core::{
    reduce_cnf_to_xsat_with, reduce_xsat_to_positive, solve, CountOptions, Error, Gadget, Method,
    XsatFormula,
};

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_INPUT: u8 = 1;
const EXIT_CAPACITY: u8 = 2;
const EXIT_DISAGREE: u8 = 3;
const EXIT_SLOPE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "xsat",
    version,
    about = "Exact one-in-three SAT solver and model counter"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide an instance (exit 10/20), or count with --count (exit 0).
    Solve(SolveArgs),
    /// Print the model count only.
    Count(InputArgs),
    /// Print the 0/1 kernel left after elimination.
    Kernel(InputArgs),
    /// Rewrite CNF or XSAT input as positive XSAT.
    Reduce(ReduceArgs),
    /// Generate an instance.
    Gen(GenArgs),
    /// Sweep random ensembles and record one line per instance.
    Bench(BenchArgs),
    /// Cross-check both methods against brute force on random instances.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gauss,
    Subst,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gauss => Method::Gauss,
            MethodArg::Subst => Method::Subst,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetArg {
    /// Three clauses per CNF clause; may overcount models.
    Verbatim,
    /// Adds one clause and one variable per CNF clause; preserves counts.
    Parsimonious,
}

impl From<GadgetArg> for Gadget {
    fn from(g: GadgetArg) -> Self {
        match g {
            GadgetArg::Verbatim => Gadget::Verbatim,
            GadgetArg::Parsimonious => Gadget::Parsimonious,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Input file (`p cnf`, `p xsat` or `p xsat+`); `-` reads stdin.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "gauss")]
    method: MethodArg,
    /// Refuse kernels with more free variables than this.
    #[arg(long, default_value_t = xsat_core::kernel::DEFAULT_MAX_FREE)]
    max_free: usize,
    /// Gadget used when the input is CNF.
    #[arg(long, value_enum, default_value = "parsimonious")]
    gadget: GadgetArg,
    #[arg(long, env = "XSAT_JOBS", default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Count models and exit 0 instead of 10/20.
    #[arg(long)]
    count: bool,
    /// Print up to N models, projected onto the input variables.
    #[arg(long, value_name = "N")]
    witnesses: Option<usize>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "parsimonious")]
    gadget: GadgetArg,
    /// Stop after the CNF step and keep negations.
    #[arg(long)]
    keep_negations: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Random,
    Partition,
    FibChain,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "random")]
    family: FamilyArg,
    /// Variables (ignored by fib-chain).
    #[arg(long, default_value_t = 12)]
    r: u32,
    /// Clauses (ignored by partition).
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Inclusive variable range, `A..B`.
    #[arg(long, default_value = "9..24", value_parser = parse_range)]
    r_range: (u32, u32),
    /// Comma-separated densities k/r, as fractions or decimals.
    #[arg(long, default_value = "1/3,1/2,2/3,1", value_delimiter = ',', value_parser = parse_kappa)]
    kappa: Vec<num_rational::BigRational>,
    #[arg(long, default_value_t = 3)]
    per_cell: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 24)]
    max_free: usize,
    /// Append records here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, env = "XSAT_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Skip timing the fixed-rank family over nullities 12..=22.
    #[arg(long)]
    no_scaling: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 6)]
    r_min: u32,
    #[arg(long, default_value_t = 18)]
    r_max: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Corrupt one kernel coefficient to exercise the checker.
    #[arg(long)]
    inject_fault: bool,
    /// Where to write the minimized repro on disagreement.
    #[arg(long)]
    repro_dir: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad bound `{a}`"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad bound `{b}`"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Count(a) => cmd_count(a),
        Cmd::Kernel(a) => cmd_kernel(a),
        Cmd::Reduce(a) => cmd_reduce(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Verify(a) => cmd_verify(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let capacity = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::Capacity { .. })));
            ExitCode::from(if capacity { EXIT_CAPACITY } else { EXIT_INPUT })
        }
    }
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::Read::read_to_string(&mut io::stdin(), &mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Positive formula plus the number of variables the user wrote.
fn load_positive(path: &Path, gadget: Gadget) -> anyhow::Result<(XsatFormula, u32)> {
    let text = read_input(path)?;
    let fmt = detect_format(&text).context("no `p cnf|xsat|xsat+` header found")?;
    Ok(match fmt {
        InputFormat::Cnf => {
            let cnf = parse_dimacs_cnf(&text)?;
            let (x, t1) = reduce_cnf_to_xsat_with(&cnf, gadget)?;
            let (p, t2) = reduce_xsat_to_positive(&x);
            eprintln!(
                "c reduced cnf {} vars {} clauses -> xsat {} / {} -> xsat+ {} / {}",
                t1.before.0, t1.before.1, t1.after.0, t1.after.1, t2.after.0, t2.after.1
            );
            (p, cnf.num_vars())
        }
        InputFormat::Xsat => {
            let x = parse_xsat(&text)?;
            let n = x.num_vars();
            let (p, t) = reduce_xsat_to_positive(&x);
            if t.fresh_vars() > 0 {
                eprintln!("c positivized with {} fresh variables", t.fresh_vars());
            }
            (p, n)
        }
        InputFormat::XsatPositive => {
            let p = parse_xsat(&text)?;
            let n = p.num_vars();
            (p, n)
        }
    })
}

fn options(a: &InputArgs, witness_cap: Option<usize>) -> CountOptions {
    CountOptions {
        max_free: a.max_free,
        witness_cap,
        jobs: a.jobs.max(1),
    }
}

fn cmd_solve(a: SolveArgs) -> anyhow::Result<u8> {
    let (f, source_vars) = load_positive(&a.input.input, a.input.gadget.into())?;
    let out = solve(&f, a.input.method.into(), &options(&a.input, a.witnesses))?;
    let mut stdout = io::stdout().lock();
    stdout.write_all(emit_report(&out.report).as_bytes())?;
    if let (Some(n), Some(ws)) = (a.witnesses, &out.witnesses) {
        // gadget variables can make several models project to one
        let projected: BTreeSet<Vec<bool>> = ws
            .iter()
            .map(|w| w.bits()[..source_vars as usize].to_vec())
            .collect();
        for bits in projected.into_iter().take(n) {
            let line: Vec<&str> = bits.iter().map(|&b| if b { "1" } else { "0" }).collect();
            writeln!(stdout, "v {}", line.join(" "))?;
        }
    } else if a.witnesses.is_some() {
        eprintln!("c more models than the witness cap; none listed");
    }
    Ok(if a.count {
        0
    } else if out.report.sat {
        EXIT_SAT
    } else {
        EXIT_UNSAT
    })
}

fn cmd_count(a: InputArgs) -> anyhow::Result<u8> {
    let (f, _) = load_positive(&a.input, a.gadget.into())?;
    let out = solve(&f, a.method.into(), &options(&a, None))?;
    println!("{}", out.report.count);
    Ok(0)
}

fn cmd_kernel(a: InputArgs) -> anyhow::Result<u8> {
    let (f, _) = load_positive(&a.input, a.gadget.into())?;
    // capacity does not apply; nothing is enumerated
    let kern = match Method::from(a.method) {
        Method::Gauss => {
            xsat_core::extract_kernel(&xsat_core::gauss_jordan(&xsat_core::encode_sys(&f)?))
        }
        Method::Subst => xsat_core::kernel_from_subst(&xsat_core::subst::run(&f)?)?,
    };
    print!("{}", write_kernel(&kern));
    Ok(0)
}

fn write_out(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn cmd_reduce(a: ReduceArgs) -> anyhow::Result<u8> {
    let text = read_input(&a.input)?;
    let fmt = detect_format(&text).context("no `p cnf|xsat|xsat+` header found")?;
    let x = match fmt {
        InputFormat::Cnf => {
            let (x, t) = reduce_cnf_to_xsat_with(&parse_dimacs_cnf(&text)?, a.gadget.into())?;
            eprintln!(
                "c cnf {} vars {} clauses -> xsat {} vars {} clauses",
                t.before.0, t.before.1, t.after.0, t.after.1
            );
            x
        }
        InputFormat::Xsat | InputFormat::XsatPositive => parse_xsat(&text)?,
    };
    let f = if a.keep_negations {
        x
    } else {
        let (p, t) = reduce_xsat_to_positive(&x);
        eprintln!(
            "c xsat {} vars {} clauses -> xsat+ {} vars {} clauses",
            t.before.0, t.before.1, t.after.0, t.after.1
        );
        p
    };
    write_out(a.out.as_deref(), &write_xsat(&f))?;
    Ok(0)
}

fn cmd_gen(a: GenArgs) -> anyhow::Result<u8> {
    let spec = GenSpec {
        r: a.r,
        k: a.k,
        seed: a.seed,
        family: match a.family {
            FamilyArg::Random => Family::Random,
            FamilyArg::Partition => Family::Partition,
            FamilyArg::FibChain => Family::FibChain,
        },
    };
    let f = generate(&spec)?;
    write_out(a.out.as_deref(), &format!("c {spec}\n{}", write_xsat(&f)))?;
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<u8> {
    let cfg = BenchConfig {
        r_min: a.r_range.0,
        r_max: a.r_range.1,
        kappas: a.kappa,
        per_cell: a.per_cell,
        seed: a.seed,
        jobs: a.jobs.max(1),
        max_free: a.max_free,
    };
    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .with_context(|| format!("opening {}", p.display()))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    writeln!(w, "c bench {}", cfg.echo())?;
    let results = bench::run_bench(&cfg);
    for r in &results {
        if let CellResult::Skipped { .. } = r {
            eprintln!("c {}", r.record());
        }
        writeln!(w, "{}", r.record())?;
    }
    let summary = bench::summarize(&results);
    writeln!(w, "{}", summary.record())?;
    let mut code = 0;
    if summary.bound_violations > 0 {
        eprintln!(
            "c {} instances outside the size bounds",
            summary.bound_violations
        );
    }
    if summary.slope_ok() == Some(false) {
        // small random kernels are dominated by fixed costs
        eprintln!("c ensemble slope is informational; see the fixed-rank line");
    }
    if !a.no_scaling {
        let s = bench::scaling_check(11, 12..=22)?;
        for (d, t) in &s.points {
            writeln!(w, "scaling rank=11 nullity={d} enumerate_s={t:.6e}")?;
        }
        writeln!(
            w,
            "scaling slope={:.4} band={}..{} slope_ok={}",
            s.slope.unwrap_or(f64::NAN),
            SLOPE_BAND.0,
            SLOPE_BAND.1,
            s.slope_ok()
        )?;
        if !s.slope_ok() {
            eprintln!("c fixed-rank slope outside its band");
            code = EXIT_SLOPE;
        }
    }
    w.flush()?;
    Ok(code)
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<u8> {
    if a.r_min < 3 || a.r_min > a.r_max {
        bail!("need 3 <= r-min <= r-max");
    }
    let cfg = VerifyConfig {
        trials: a.trials,
        r_min: a.r_min,
        r_max: a.r_max,
        seed: a.seed,
        inject_fault: a.inject_fault,
    };
    println!(
        "c verify trials={} r-min={} r-max={} seed={} inject-fault={}",
        cfg.trials, cfg.r_min, cfg.r_max, cfg.seed, cfg.inject_fault
    );
    if cfg.trials == 0 {
        eprintln!("warning: 0 trials, nothing checked");
        return Ok(0);
    }
    let out = run_verify(&cfg)?;
    let Some(d) = out.disagreement else {
        println!("agree trials={}", out.trials_run);
        return Ok(0);
    };
    let dir = a.repro_dir.unwrap_or_else(std::env::temp_dir);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("xsat-repro-seed{}-trial{}.xsat", cfg.seed, d.trial));
    let c = d.minimized_counts;
    let text = format!(
        "c {}\nc oracle={} gauss={} subst={} inject-fault={}\n{}",
        d.spec,
        c.oracle,
        c.gauss,
        c.subst,
        cfg.inject_fault,
        write_xsat(&d.minimized)
    );
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!(
        "disagree trial={} {} oracle={} gauss={} subst={} clauses={}->{} repro={}",
        d.trial,
        d.spec,
        d.counts.oracle,
        d.counts.gauss,
        d.counts.subst,
        d.original.num_clauses(),
        d.minimized.num_clauses(),
        path.display()
    );
    Ok(EXIT_DISAGREE)
}
