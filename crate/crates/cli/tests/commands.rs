use std::process::Command;

fn charsum(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_charsum"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn eval_prints_the_brute_force_value() {
    let (code, out, _) = charsum(&[
        "eval", "--p", "5", "--m", "2", "--f", "x^2", "--g", "1", "--chi", "20",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("|S| brute       5.000000000"), "{out}");
}

#[test]
fn eval_json_is_one_row() {
    let (code, out, _) = charsum(&[
        "eval", "--p", "7", "--m", "1", "--f", "x", "--g", "x", "--chi", "3", "--json",
    ]);
    assert_eq!(code, 0);
    let row: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert!((row["brute_abs"].as_f64().unwrap() - 7f64.sqrt()).abs() < 1e-9);
    assert_eq!(row["ok_bounds"], true);
}

#[test]
fn bound_reports_best_at_least_the_sum() {
    let (code, out, _) = charsum(&[
        "bound", "--p", "3", "--m", "3", "--f", "x^3", "--g", "1", "--chi", "18", "--json",
    ]);
    assert_eq!(code, 0);
    let rep: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert!(rep["best"].as_f64().unwrap() >= 9.0);
    assert_eq!(rep["classification"], "NON_DEGENERATE");
}

#[test]
fn reduce_shows_the_sigma_two_step() {
    let (code, out, _) = charsum(&[
        "reduce", "--p", "5", "--m", "4", "--f", "x^2", "--g", "1", "--chi", "100",
    ]);
    assert_eq!(code, 0);
    assert!(
        out.contains("σ=2") && out.contains("S(x^2)") && out.contains("mod 5^2"),
        "{out}"
    );
}

#[test]
fn parse_errors_exit_with_two() {
    let (code, _, err) = charsum(&["eval", "--p", "5", "--m", "2", "--f", "x^^2"]);
    assert_eq!(code, 2);
    assert!(
        err.contains("position 2") && err.contains("  x^^2\n    ^"),
        "{err}"
    );
    let (code, _, _) = charsum(&["eval", "--p", "6", "--m", "2", "--f", "x"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_writes_artifacts_and_exit_codes() {
    let dir = std::env::temp_dir().join(format!("charsum-cli-{}", std::process::id()));
    let cfg = dir.join("campaign.cfg");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(&cfg, "primes = 3\nm = 1..2\nfamilies = monomial, laurent\n").unwrap();
    let out = dir.join("out");
    let (code, stdout, _) = charsum(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("violations 0"));
    let csv = std::fs::read_to_string(out.join("cases.csv")).unwrap();
    assert!(csv.starts_with("# charsum cases schema v1\nid,"));
    let blocked = dir.join("blocked");
    std::fs::write(&blocked, "").unwrap();
    let (code, _, _) = charsum(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        blocked.join("x").to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    let (code, stdout, _) = charsum(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "tol_eval=1e-300",
    ]);
    assert_eq!(code, 1, "{stdout}");
    std::fs::write(&cfg, "primes = 3\nbogus = 1\n").unwrap();
    let (code, _, err) = charsum(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn selftest_passes() {
    let (code, out, _) = charsum(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("violations 0"));
}
