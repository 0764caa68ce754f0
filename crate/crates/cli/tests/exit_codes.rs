use std::process::Command;

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cavity-grover"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn empty_argv_prints_help() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty() || !out.stderr.is_empty());
}

#[test]
fn usage_error_is_2() {
    assert_eq!(run(&["search", "--kmax", "many"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn domain_error_is_3() {
    let out = run(&["timing", "--mu", "5", "--iterations", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mu"));
}

#[test]
fn io_error_is_4() {
    let out = run(&["trajectory", "--out", "/nonexistent/dir/plan.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn csv_goes_to_stdout() {
    let out = run(&["timing", "--mu", "0.1", "--iterations", "17"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("mu,iterations,t0_us,total_ms,cavity_decay_ms,atom_lifetime_ms")
    );
    assert!(lines.next().unwrap().starts_with("0.1,17,"));
}

#[test]
fn json_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plan.json");
    let out = run(&[
        "trajectory",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.trim_start().starts_with('[') && text.contains("\"coupling_factor\""));
}
