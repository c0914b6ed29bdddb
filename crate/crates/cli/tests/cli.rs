use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const WORKED: &str =
    "c six variables, four clauses\np xsat+ 6 4\n1 2 3 0\n4 5 6 0\n2 5 6 0\n1 2 5 0\n";
const UNSAT: &str = "p xsat+ 4 4\n1 2 3 0\n2 3 4 0\n1 2 4 0\n1 3 4 0\n";

fn xsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xsat"))
        .args(args)
        .env_remove("XSAT_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn count_mode_prints_record_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = file(dir.path(), "w.xsat", WORKED);
    let o = xsat(&["solve", "--input", s(&f), "--count", "--method", "subst"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(
        line.starts_with("sat=true count=3 rank=3 nullity=3 kernel_vars=3 kernel_clauses=4 repr_size_bits=19.9316 method=subst elapsed_ms="),
        "{line}"
    );
}

#[test]
fn decision_mode_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sat = file(dir.path(), "w.xsat", WORKED);
    let unsat = file(dir.path(), "u.xsat", UNSAT);
    assert_eq!(xsat(&["solve", "--input", s(&sat)]).status.code(), Some(10));
    let o = xsat(&["solve", "--input", s(&unsat)]);
    assert_eq!(o.status.code(), Some(20));
    assert!(stdout(&o).starts_with("sat=false count=0 "));
    assert_eq!(
        xsat(&["solve", "--input", s(&unsat), "--method", "subst"])
            .status
            .code(),
        Some(20)
    );
}

#[test]
fn witnesses_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let f = file(dir.path(), "w.xsat", WORKED);
    let o = xsat(&["solve", "--input", s(&f), "--witnesses", "10"]);
    let out = stdout(&o);
    let models: Vec<&str> = out.lines().filter(|l| l.starts_with("v ")).collect();
    assert_eq!(models, ["v 0 0 1 0 1 0", "v 0 1 0 1 0 0", "v 1 0 0 0 0 1"]);
}

#[test]
fn capacity_exit() {
    let dir = tempfile::tempdir().unwrap();
    let f = file(dir.path(), "w.xsat", WORKED);
    let o = xsat(&[
        "solve",
        "--input",
        s(&f),
        "--method",
        "subst",
        "--max-free",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap is 2"));
}

#[test]
fn parse_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("bad.xsat", "p xsat+ 3 1\n1 2 0\n"),
        ("neg.xsat", "p xsat+ 3 1\n-1 2 3 0\n"),
        ("none.txt", "1 2 3 0\n"),
        ("count.cnf", "p cnf 3 2\n1 2 3 0\n"),
    ] {
        let f = file(dir.path(), name, text);
        let o = xsat(&["solve", "--input", s(&f)]);
        assert_eq!(o.status.code(), Some(1), "{name}");
    }
    assert_eq!(
        xsat(&["solve", "--input", "/nonexistent/x"]).status.code(),
        Some(1)
    );
}

#[test]
fn cnf_input_is_counted_through_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    // (x1 ∨ ¬x2 ∨ x3) ∧ (¬x1 ∨ x2 ∨ x3): 6 of 8 assignments
    let f = file(dir.path(), "a.cnf", "p cnf 3 2\n1 -2 3 0\n-1 2 3 0\n");
    let o = xsat(&["count", "--input", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "6");
    let o = xsat(&["count", "--input", s(&f), "--method", "subst"]);
    assert_eq!(stdout(&o).trim(), "6");
    // the verbatim gadget overcounts
    let o = xsat(&["count", "--input", s(&f), "--gadget", "verbatim"]);
    assert_ne!(stdout(&o).trim(), "6");
    let o = xsat(&["solve", "--input", s(&f), "--witnesses", "100"]);
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("v ")).count(),
        6
    );
}

#[test]
fn kernel_text() {
    let dir = tempfile::tempdir().unwrap();
    let f = file(dir.path(), "w.xsat", WORKED);
    let o = xsat(&["kernel", "--input", s(&f)]);
    assert_eq!(
        stdout(&o),
        "c vars 6\nc free 5 6\nc pivots 1 2 3 4\np ipe 2 4\n0 -1 = 0\n1 1 = 1\n-1 0 = 0\n1 1 = 1\n"
    );
}

#[test]
fn reduce_then_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = file(dir.path(), "a.cnf", "p cnf 4 2\n1 -2 3 0\n-1 2 4 0\n");
    let out = dir.path().join("a.xsat");
    let o = xsat(&["reduce", "--input", s(&cnf), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("p xsat+ "), "{text}");
    let o = xsat(&["count", "--input", s(&out)]);
    // 16 assignments minus the 2 + 2 falsifying each clause, none shared
    assert_eq!(stdout(&o).trim(), "12");
}

#[test]
fn gen_is_reproducible_and_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let a = xsat(&["gen", "--r", "15", "--k", "8", "--seed", "7"]);
    let b = xsat(&["gen", "--r", "15", "--k", "8", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(
        text.starts_with("c family=random r=15 k=8 seed=7\np xsat+ 15 8\n"),
        "{text}"
    );
    let f = file(dir.path(), "g.xsat", &text);
    assert_eq!(
        xsat(&["solve", "--input", s(&f), "--count"]).status.code(),
        Some(0)
    );
    let p = xsat(&["gen", "--family", "partition", "--r", "9"]);
    let f = file(dir.path(), "p.xsat", &stdout(&p));
    assert_eq!(stdout(&xsat(&["count", "--input", s(&f)])).trim(), "27");
    assert_eq!(
        xsat(&["gen", "--r", "9", "--k", "2"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_agrees_and_catches_faults() {
    let dir = tempfile::tempdir().unwrap();
    let o = xsat(&["verify", "--trials", "200", "--r-max", "18", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("agree trials=200"));

    let o = xsat(&["verify", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));

    let o = xsat(&[
        "verify",
        "--trials",
        "20",
        "--inject-fault",
        "--repro-dir",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    let repro = out
        .split_whitespace()
        .find_map(|t| t.strip_prefix("repro="))
        .expect("repro path printed");
    let text = fs::read_to_string(repro).unwrap();
    assert!(text.contains("inject-fault=true"));
    // the repro is a valid instance on its own
    let f = file(dir.path(), "again.xsat", &text);
    assert_eq!(
        xsat(&["solve", "--input", s(&f), "--count"]).status.code(),
        Some(0)
    );
}

#[test]
fn bench_appends_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.txt");
    let args = [
        "bench",
        "--r-range",
        "9..12",
        "--kappa",
        "1/3,1",
        "--per-cell",
        "2",
        "--no-scaling",
        "--jobs",
        "3",
        "--out",
        s(&out),
    ];
    assert_eq!(xsat(&args).status.code(), Some(0));
    assert_eq!(xsat(&args).status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    // everything but the timings repeats across runs
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("family="))
        .map(|l| &l[..l.find(" encode_us=").unwrap()])
        .collect();
    assert_eq!(rows.len(), 2 * 4 * 2 * 2);
    assert_eq!(rows[..16], rows[16..]);
    assert!(rows.iter().all(|r| r.contains("bounds_ok=true")));
    assert_eq!(
        text.lines().filter(|l| l.starts_with("summary ")).count(),
        2
    );
    assert!(text.starts_with("c bench r-range=9..12 kappa=1/3,1 per-cell=2 seed=1"));
}

#[test]
fn bench_partition_cell() {
    let o = xsat(&[
        "bench",
        "--r-range",
        "15..15",
        "--kappa",
        "1/3",
        "--per-cell",
        "1",
        "--no-scaling",
    ]);
    let out = stdout(&o);
    let row = out.lines().find(|l| l.starts_with("family=")).unwrap();
    assert!(
        row.contains(" nullity=10 ") && row.contains(" kernel_width=10 "),
        "{row}"
    );
}

#[test]
fn bench_logs_capacity_skips() {
    let o = xsat(&[
        "bench",
        "--r-range",
        "15..15",
        "--kappa",
        "1/3",
        "--per-cell",
        "1",
        "--max-free",
        "4",
        "--no-scaling",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("skipped reason="));
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped"));
}
