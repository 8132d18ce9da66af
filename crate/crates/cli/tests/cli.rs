use std::fs;
use std::process::{Command, Output};

use elliptic_order::catalog::CatalogEntry;
use elliptic_order::verify::{IdentityCheck, SlepianReport, VerificationReport};
use elliptic_order::wire::parse_json;
use elliptic_order::{OrderReport, Verdict};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elliptic-order")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn spec(mu: &[f64], sigma: &[[f64; 3]], gen: &str) -> String {
    let n = mu.len();
    let rows: Vec<String> = sigma.iter().map(|r| format!("{:?}", &r[..n])).collect();
    format!(r#"{{"dim": {n}, "location": {mu:?}, "dispersion": [{}], "generator": {gen}}}"#, rows.join(", "))
}

const NORMAL: &str = r#"{"type": "normal"}"#;

fn equi(rho: f64) -> String {
    spec(
        &[0.0, 0.0, 0.0],
        &[[1.0, rho, rho], [rho, 1.0, rho], [rho, rho, 1.0]],
        NORMAL,
    )
}

fn identity2(mu: [f64; 2], off: f64) -> String {
    spec(&mu, &[[1.0, off, 0.0], [off, 1.0, 0.0]], NORMAL)
}

#[test]
fn check_exit_codes_follow_verdicts() {
    let x = identity2([0.0, 0.0], 0.0);
    let out = run(&["check", &x, &identity2([1.0, 1.0], 0.0), "st"]);
    assert_eq!(code(&out), 0);
    let report: OrderReport = parse_json(&stdout(&out)).unwrap();
    assert_eq!(report.verdict, Verdict::Holds);

    assert_eq!(code(&run(&["check", &x, &identity2([-1.0, 0.0], 0.0), "st"])), 1);
    // Copositive, not PSD, no positive kernel.
    assert_eq!(code(&run(&["check", &x, &identity2([0.0, 0.0], 0.5), "icx"])), 2);
}

#[test]
fn errors_exit_three_with_a_diagnostic() {
    let x = identity2([0.0, 0.0], 0.0);
    let t = spec(&[0.0, 0.0], &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], r#"{"type": "student_t", "nu": 5}"#);
    for args in [
        vec!["check", &x, &t, "st"],
        vec!["check", &x, &x, "nope"],
        vec!["check", "/no/such/file.json", &x, "st"],
        vec!["check", r#"{"dim": 1}"#, &x, "st"],
        vec!["catalog", "sm", "1"],
        vec!["check"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 3, "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn parse_errors_name_the_path() {
    let bad = r#"{"dim": 2, "location": [0, "a"], "dispersion": [[1, 0], [0, 1]], "generator": {"type": "normal"}}"#;
    let out = run(&["check", bad, bad, "st"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("location[1]"));
}

#[test]
fn specs_load_from_files_and_reports_go_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let px = dir.path().join("x.json");
    let py = dir.path().join("y.json");
    fs::write(&px, equi(0.2)).unwrap();
    fs::write(&py, equi(0.5)).unwrap();
    let report = dir.path().join("report.json");
    let out = run(&[
        "check",
        px.to_str().unwrap(),
        py.to_str().unwrap(),
        "sm",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let r: OrderReport = parse_json(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r.verdict, Verdict::Holds);
}

#[test]
fn verify_agrees_on_supermodular_pair_and_its_reverse() {
    let (x, y) = (equi(0.2), equi(0.5));
    let out = run(&["verify", &x, &y, "sm"]);
    assert_eq!(code(&out), 0);
    let r: VerificationReport = parse_json(&stdout(&out)).unwrap();
    assert_eq!(r.verdict, Some(Verdict::Holds));
    assert!(r.consistent);
    assert!(r.estimates.len() >= 5);

    let out = run(&["verify", &y, &x, "sm"]);
    assert_eq!(code(&out), 0);
    let r: VerificationReport = parse_json(&stdout(&out)).unwrap();
    assert_eq!(r.verdict, Some(Verdict::Fails));
    assert!(r.violations.contains(&"cross".to_string()));
    assert!(r.swapped.unwrap().consistent);
}

#[test]
fn verify_identical_specs_gives_zero_differences() {
    let x = equi(0.3);
    let out = run(&["verify", &x, &x, "cx", "--samples", "5000"]);
    assert_eq!(code(&out), 0);
    let r: VerificationReport = parse_json(&stdout(&out)).unwrap();
    assert!(r.consistent);
    for e in &r.estimates {
        let m = e.estimate.unwrap();
        assert_eq!((m.value, m.std_error), (0.0, 0.0), "{}", e.function);
    }
}

#[test]
fn identity_on_cross_moment_is_consistent() {
    let out = run(&[
        "identity",
        &identity2([0.0, 0.0], 0.0),
        &identity2([0.0, 0.0], 0.5),
        "cross",
    ]);
    assert_eq!(code(&out), 0);
    let r: IdentityCheck = parse_json(&stdout(&out)).unwrap();
    assert!(r.consistent);
    assert_eq!(r.lambda_nodes, 8);
    assert!((r.lhs.value - 0.5).abs() <= 3.0 * r.lhs.std_error);
}

#[test]
fn slepian_grid_is_monotone() {
    let out = run(&["slepian", "equicorrelated", NORMAL, "3", "0,0.3,0.6"]);
    assert_eq!(code(&out), 0);
    let r: SlepianReport = parse_json(&stdout(&out)).unwrap();
    assert!(r.monotone);
    assert_eq!(r.points.len(), 3);
    assert_eq!(r.a, vec![0.0; 3]);

    let out = run(&["slepian", "ar1", NORMAL, "2", "0.2", "--a", "0.5,-0.5", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("rho,upper,upper_se,lower,lower_se\n0.2,"));
    assert_eq!(text.lines().count(), 2);

    assert_eq!(code(&run(&["slepian", "equi", NORMAL, "3", "0,-0.9"])), 3);
}

#[test]
fn catalog_lists_supermodular_members() {
    let out = run(&["catalog", "sm", "3"]);
    assert_eq!(code(&out), 0);
    let entries: Vec<CatalogEntry> = parse_json(&stdout(&out)).unwrap();
    assert!(entries.len() >= 5);
    assert!(entries.iter().any(|e| e.id == "cross"));

    let csv = stdout(&run(&["catalog", "st", "2", "--format", "csv"]));
    assert!(csv.starts_with("id,arity,classes,growth,description\n"));
    assert!(csv.lines().count() > 5);
}

#[test]
fn csv_rows_of_verification() {
    let x = identity2([0.0, 0.0], 0.0);
    let out = run(&["verify", &x, &identity2([0.0, 0.0], 0.5), "sm", "--format", "csv", "--samples", "5000"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("claim,function,estimate,std_error,flag"));
    assert!(lines.all(|l| l.starts_with("sm,")));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let (x, y) = (equi(0.2), equi(0.5));
    let a = run(&["verify", &x, &y, "dcx", "--seed", "7", "--samples", "20000"]);
    let b = run(&["verify", &x, &y, "dcx", "--seed", "7", "--samples", "20000"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["verify", &x, &y, "dcx", "--seed", "8", "--samples", "20000"]);
    assert_ne!(a.stdout, c.stdout);

    let s1 = run(&["slepian", "equi", NORMAL, "3", "0,0.5", "--samples", "10000"]);
    let s2 = run(&["slepian", "equi", NORMAL, "3", "0,0.5", "--samples", "10000"]);
    assert_eq!(s1.stdout, s2.stdout);
}
