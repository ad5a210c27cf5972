use std::path::Path;
use std::process::{Command, Output};

fn escqkd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_escqkd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn frame_verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(dir.path(), &["frame-verify", "trine"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("mean overlap^2 = 0.25"));
    assert!(s.contains("V_1 = 4.5"));
    assert!(s.contains("V_2 = 3.375"));

    let o = escqkd(dir.path(), &["frame-verify", "bb84", "--out", "bb84.txt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not equiangular"));
    let text = std::fs::read_to_string(dir.path().join("bb84.txt")).unwrap();
    let frame = escqkd::frames::Frame::from_text("bb84", &text).unwrap();
    assert_eq!(frame, escqkd::frames::make_bb84());

    let o = escqkd(dir.path(), &["frame-verify", "simplex:4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Welch value (n-d)/(d(n-1)) = 0.0625"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frame-verify", "square"][..],
        &["frame-verify", "simplex:1"],
        &["rates", "--out", "x.csv", "--frobnicate"],
        &["rates", "--protocol", "six-state", "--out", "x.csv"],
        &["rates", "--q-points", "0", "--out", "x.csv"],
        &["clone-opt", "--cooling", "1.5"],
        &[],
    ] {
        assert_eq!(escqkd(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn io_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(dir.path(), &["rates", "--out", "missing/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rates_zero_q_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(
        dir.path(),
        &[
            "rates",
            "--protocol",
            "trine",
            "--attack",
            "intercept-resend",
            "--out",
            "r.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("r.csv"));
    assert_eq!(rows.len(), 101);
    let first: Vec<f64> = rows[0][2..].iter().map(|x| x.parse().unwrap()).collect();
    assert_eq!(&first[..2], &[0.0, 0.0]);
    assert!((first[2] - 0.584963).abs() < 1e-6);
    assert!((first[3] - 0.584963).abs() < 1e-6);
    assert!(stdout(&o).contains("lower-bound tolerable error: 0.088"));
}

#[test]
fn rates_two_point_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(
        dir.path(),
        &["rates", "--protocol", "bb84", "--q-points", "2", "--out", "r.csv"],
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("r.csv"));
    let qs: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(qs, ["0", "1"]);
    assert_eq!(rows[1][3], "0.125");
}

#[test]
fn cloning_never_crosses_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(
        dir.path(),
        &["rates", "--attack", "clone", "--cloner", "paper", "--out", "c.csv"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lower bound: no zero crossing"));
}

#[test]
fn dump_dist_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(
        dir.path(),
        &["dump-dist", "--protocol", "bb84", "--q", "0.5", "--out", "d.csv"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(text.starts_with("a,b,e,p\n"));
    assert_eq!(text.lines().count(), 1 + 4 * 4 * 5);
}

#[test]
fn clone_opt_degenerate_budget_reports_penalty() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(
        dir.path(),
        &["clone-opt", "--steps", "1", "--restarts", "1", "--out", "u.txt"],
    );
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    assert!(stdout(&o).contains("symmetry penalty:"));
    let u = escqkd::attacks::CloneUnitary::from_text(&std::fs::read_to_string(dir.path().join("u.txt")).unwrap());
    assert!(u.unwrap().unitarity_residual() < 1e-10);
}

#[test]
fn clone_opt_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(dir.path(), &["clone-opt", "--protocol", "trine", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let diff: f64 = s
        .lines()
        .find_map(|l| l.split("optimized - reference = ").nth(1))
        .map(|t| t.trim_end_matches(')').parse().unwrap())
        .expect("comparison line");
    assert!(diff.abs() < 1e-3);
}

#[test]
fn fig1_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = escqkd(dir.path(), &["fig1", "--out", "plots"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("trine lower-bound tolerable error: 0.08"));
    assert!(s.contains("dominance: trine >= bb84 on both bounds"));
    for (file, intercept) in [
        ("trine_intercept-resend.csv", 0.584963),
        ("bb84_intercept-resend.csv", 0.5),
    ] {
        let rows = csv_rows(&dir.path().join("plots").join(file));
        let lower: f64 = rows[0][4].parse().unwrap();
        assert!((lower - intercept).abs() < 1e-6, "{file}");
    }
    let script = std::fs::read_to_string(dir.path().join("plots/fig1.gp")).unwrap();
    assert!(script.contains("plot "));
}
