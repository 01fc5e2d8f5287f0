use std::fs;
use std::path::Path;

use ncqm::cli::{main_with_args, VerificationReport, EXIT_FAILURE, EXIT_IO, EXIT_OK, EXIT_USAGE};

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn run(config: &str, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec!["ncqm", "run", "--config", config, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    main_with_args(args)
}

fn report(out: &Path) -> VerificationReport {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn row_at(csv: &str, x: f64, y: f64) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .find(|r| r[0] == x && r[1] == y)
        .expect("grid node present")
}

const UNIT_GRID: &str = r#""grid":{"xmin":-3,"xmax":3,"ymin":-3,"ymax":3,"nx":7,"ny":7}"#;

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"profile":{{"theta":0.1,"alpha":0.5,"f_poly":[0,1],"gauge":"phi"}},{UNIT_GRID},"tasks":["omega0","omega2","jacobi","roundtrip"]}}"#
        ),
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&cfg, &a, &[]), EXIT_OK);
    assert_eq!(run(&cfg, &b, &[]), EXIT_OK);
    for name in ["omega0.csv", "omega2.csv", "report.json", "report.txt"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let csv = fs::read_to_string(a.join("omega0.csv")).unwrap();
    assert!(csv.starts_with("x,y,w12,w13,w14,w23,w24,w34\n"));
    let row = row_at(&csv, 1.0, 2.0);
    assert!((row[2] - 0.08).abs() < 1e-15);
    assert!((row[7] - 0.09375).abs() < 1e-15);
    assert!(report(&a).all_pass());
}

#[test]
fn chi_gauge_has_commuting_momenta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"profile":{{"theta":0.1,"alpha":0.5,"gauge":"chi"}},{UNIT_GRID},"tasks":["omega0"]}}"#),
    );
    assert_eq!(run(&cfg, dir.path(), &[]), EXIT_OK);
    let csv = fs::read_to_string(dir.path().join("omega0.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0.0000000000000000e0")));
}

#[test]
fn global_profile_has_no_correction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        write_config(dir.path(), r#"{"profile":{"theta":0.1,"alpha":0,"gauge":"phi"},"tasks":["omega2","jacobi"]}"#);
    assert_eq!(run(&cfg, dir.path(), &[]), EXIT_OK);
    let csv = fs::read_to_string(dir.path().join("omega2.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.split(',').skip(2).all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
    let r = report(dir.path());
    for rec in r.records.iter().filter(|r| r.task.starts_with("jacobi")) {
        assert_eq!(rec.max_residual, Some(0.0));
    }
}

#[test]
fn profile_crossing_zero_fails_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"profile":{"theta":-0.5,"alpha":0.5,"gauge":"phi"}}"#);
    assert_eq!(run(&cfg, dir.path(), &["--tasks", "omega0,jacobi"]), EXIT_FAILURE);
    let r = report(dir.path());
    let positivity = r.records.iter().find(|r| r.task == "profile_positivity").unwrap();
    assert!(!positivity.pass);
    assert!(positivity.error.as_deref().unwrap().contains("vanishes"));
}

#[test]
fn usage_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(missing.to_str().unwrap(), dir.path(), &[]), EXIT_IO);

    let bad = write_config(
        dir.path(),
        r#"{"profile":{"theta":0.1,"alpha":0.5,"gauge":"phi"},"grid":{"xmin":1,"xmax":0,"ymin":0,"ymax":1,"nx":3,"ny":3}}"#,
    );
    assert_eq!(run(&bad, dir.path(), &[]), EXIT_USAGE);

    let good =
        write_config(dir.path(), r#"{"profile":{"theta":0.1,"alpha":0.5,"gauge":"phi"},"tasks":["counterexample"]}"#);
    assert_eq!(run(&good, dir.path(), &["--jet-order", "2"]), EXIT_USAGE);
    assert_eq!(run(&good, dir.path(), &["--tasks", "omega9"]), EXIT_USAGE);

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    assert_eq!(run(&good, &blocker.join("sub"), &[]), EXIT_IO);

    assert_eq!(main_with_args(["ncqm", "bogus"]), EXIT_USAGE);
}

#[test]
fn standalone_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ce");
    assert_eq!(main_with_args(["ncqm", "counterexample", "--out", out.to_str().unwrap()]), EXIT_OK);
    assert!(report(&out).all_pass());
    assert_eq!(main_with_args(["ncqm", "lsz-check"]), EXIT_OK);

    let cfg =
        write_config(dir.path(), &format!(r#"{{"profile":{{"theta":0.1,"alpha":0.5,"gauge":"phi"}},{UNIT_GRID}}}"#));
    let pout = dir.path().join("profile");
    assert_eq!(main_with_args(["ncqm", "profile", "--config", &cfg, "--out", pout.to_str().unwrap()]), EXIT_OK);
    let csv = fs::read_to_string(pout.join("profile.csv")).unwrap();
    assert!(csv.starts_with("x,y,d,bx,by\n"));
    let row = row_at(&csv, 1.0, 2.0);
    assert!((row[2] - 0.8).abs() < 1e-15);
    assert!((row[3] + 1.25).abs() < 1e-14 && (row[4] - 0.625).abs() < 1e-14);
}

/// With theta = 1e-8 the phi-gauge momentum bracket (3 theta alpha^2 / 16) r^4 d reaches
/// 1.52e-7 at the corners of [-3, 3]^2 for alpha = 0.5, above the 1e-7 bound, so the
/// default run reports exactly that one failure.
#[test]
fn default_run_reports_only_the_commutative_limit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"profile":{"theta":0.1,"alpha":0.5,"f_poly":[0,1],"gauge":"phi"}}"#);
    assert_eq!(run(&cfg, dir.path(), &[]), EXIT_FAILURE);
    let failed: Vec<_> = report(dir.path()).records.into_iter().filter(|r| !r.pass).map(|r| r.task).collect();
    assert_eq!(failed, vec!["limit_commutative".to_string()]);
}
