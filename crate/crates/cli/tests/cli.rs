use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pfcft(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfcft"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn plan_file(dir: &Path, args: &[&str]) -> String {
    let o = pfcft(dir, args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read_to_string(dir.join("p.plan")).unwrap()
}

#[test]
fn plan_writes_file_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfcft(dir.path(), &["plan", "--n", "15", "--l", "4", "--restarts", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("15 = 3 x 5"), "{out}");
    assert!(out.contains("mult=20"), "{out}");
    let text = fs::read_to_string(dir.path().join("pfcft-15.plan")).unwrap();
    assert!(text.starts_with("pfcft N=15 field=GF(2^4) factors=3x5"));
}

#[test]
fn plan_rejects_non_divisor() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfcft(dir.path(), &["plan", "--n", "16", "--l", "4"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not divide"));
}

#[test]
fn forced_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let text = plan_file(
        dir.path(),
        &["plan", "--n", "255", "--l", "8", "--factors", "3,85", "--restarts", "1", "-o", "p.plan"],
    );
    assert!(text.starts_with("pfcft N=255 field=GF(2^8) factors=3x85"));
}

#[test]
fn transform_zero_and_delta() {
    let dir = tempfile::tempdir().unwrap();
    plan_file(dir.path(), &["plan", "--n", "63", "--l", "6", "--restarts", "1", "-o", "p.plan"]);
    fs::write(dir.path().join("zero.txt"), "0\n".repeat(63)).unwrap();
    let o = pfcft(dir.path(), &["transform", "--plan", "p.plan", "--input", "zero.txt"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n".repeat(63));
    let delta = format!("1\n{}", "0\n".repeat(62));
    fs::write(dir.path().join("delta.txt"), delta).unwrap();
    let o = pfcft(dir.path(), &["transform", "--plan", "p.plan", "--input", "delta.txt", "-o", "out.txt"]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("out.txt")).unwrap(), "1\n".repeat(63));
    fs::write(dir.path().join("short.txt"), "1\n2\n").unwrap();
    let o = pfcft(dir.path(), &["transform", "--plan", "p.plan", "--input", "short.txt"]);
    assert!(!o.status.success());
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfcft(dir.path(), &["verify", "--n", "63", "--l", "6", "--trials", "50", "--restarts", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("113/113 vectors agree"));
}

#[test]
fn verify_flags_a_corrupted_plan() {
    let dir = tempfile::tempdir().unwrap();
    let text = plan_file(dir.path(), &["plan", "--n", "15", "--l", "4", "--restarts", "1", "-o", "p.plan"]);
    // rewire the first two-input step of the first post-stage program
    let mut in_post = false;
    let mut done = false;
    let damaged: Vec<String> = text
        .lines()
        .map(|line| {
            if line == "post" {
                in_post = true;
            }
            if in_post && !done && line.starts_with("t0 = x") {
                done = true;
                let (lhs, rhs) = line.split_once(" ^ ").unwrap();
                let used = [lhs.rsplit(' ').next().unwrap(), rhs];
                let other = ["x0", "x1", "x2"].into_iter().find(|x| !used.contains(x)).unwrap();
                return format!("{lhs} ^ {other}");
            }
            line.to_string()
        })
        .collect();
    assert!(done);
    fs::write(dir.path().join("bad.plan"), damaged.join("\n")).unwrap();
    let o = pfcft(dir.path(), &["verify", "--plan", "bad.plan", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("mismatch"));

    fs::write(dir.path().join("torn.plan"), &text[..text.len() / 3]).unwrap();
    let o = pfcft(dir.path(), &["verify", "--plan", "torn.plan"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn formula_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfcft(dir.path(), &["tables", "--mode", "formula"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = |label: &str| {
        out.lines()
            .find(|l| l.starts_with(label))
            .map(|l| l.split_whitespace().skip(3).take(3).collect::<Vec<_>>().join(" "))
            .unwrap()
    };
    assert_eq!(row("511 = 7x73"), "1446 12238 36820");
    assert_eq!(row("2047 = 23x89"), "15204 77770 397054");
    assert_eq!(row("15 = 3x5"), "20 81 221");
}

#[test]
fn achieved_tables_print_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfcft(
        dir.path(),
        &["tables", "--mode", "achieved", "--l-min", "4", "--l-max", "4", "--restarts", "2"],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("Δadd"));
    assert!(out.lines().any(|l| l.starts_with("15 = 3x5")));
}

#[test]
fn cosets_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfcft(dir.path(), &["cosets", "--n", "15"]);
    assert_eq!(stdout(&o), "{0}\n{1,2,4,8}\n{3,6,12,9}\n{5,10}\n{7,14,13,11}\n");
    let o = pfcft(dir.path(), &["decompose", "--n", "31"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("31 = 31"));
    let o = pfcft(dir.path(), &["decompose", "--n", "1023"]);
    assert!(stdout(&o).lines().next().unwrap().starts_with("1023 = 31 x 33"));
    assert!(stdout(&o).lines().next().unwrap().contains("total=108724"));
    let o = pfcft(dir.path(), &["decompose", "--n", "63", "--source", "achieved", "--restarts", "1"]);
    assert!(stdout(&o).starts_with("63 = 7 x 9"));
}

#[test]
fn bench_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfcft(dir.path(), &["bench", "--n", "15", "--l", "4", "--iters", "10", "--restarts", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("field ops  20 mult"), "{out}");
    assert!(out.contains("per transform"));
}

#[test]
fn deterministic_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["plan", "--n", "255", "--l", "8", "--factors", "15x17", "--seed", "9", "--restarts", "3", "-o", "p.plan"];
    let a = plan_file(dir.path(), &args);
    let b = plan_file(dir.path(), &args);
    assert_eq!(a, b);
}
