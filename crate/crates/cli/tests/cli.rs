use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn iccr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iccr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = iccr(&[
        "run",
        "--n",
        "16",
        "--depth",
        "32",
        "--p",
        "0.2",
        "--seed",
        "7",
        "--out",
        arg(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,m1,m1_err,m2,m2_err,m3,m3_err,nullity_density,nullity_err,lnF,lnF_err,n_meas"
    );
    assert_eq!(lines.count(), 33);
}

#[test]
fn run_is_deterministic_on_stdout() {
    let args = [
        "run",
        "--n",
        "10",
        "--depth",
        "6",
        "--p",
        "0.3",
        "--seed",
        "1",
        "--trajectories",
        "3",
    ];
    let a = iccr(&args);
    let b = iccr(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(iccr(&["run", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(
        iccr(&["run", "--config", "/nonexistent/iccr.cfg"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        iccr(&["run", "--n", "8", "--p", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        iccr(&["run", "--boundary", "twisted"]).status.code(),
        Some(1)
    );
    assert_eq!(iccr(&["--help"]).status.code(), Some(0));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(
        &cfg,
        "# small run\nn_qubits = 8\ndepth = 4\nmeas_rate = 0.2\nsre_orders = 2\nseed = 3\n",
    )
    .unwrap();
    let from_file = iccr(&["run", "--config", arg(&cfg)]);
    assert!(
        from_file.status.success(),
        "{}",
        String::from_utf8_lossy(&from_file.stderr)
    );
    let text = String::from_utf8(from_file.stdout).unwrap();
    assert!(text.starts_with("t,m2,m2_err,nullity_density"));
    assert_eq!(text.lines().count(), 6);

    let overridden = iccr(&[
        "run",
        "--config",
        arg(&cfg),
        "--depth",
        "2",
        "--orders",
        "1,2",
    ]);
    let text = String::from_utf8(overridden.stdout).unwrap();
    assert!(text.starts_with("t,m1,m1_err,m2,m2_err,"));
    assert_eq!(text.lines().count(), 4);

    fs::write(&cfg, "n_qubits = 8\nmeasurement_rate = 0.2\n").unwrap();
    assert_eq!(iccr(&["run", "--config", arg(&cfg)]).status.code(), Some(1));
}

#[test]
fn log_iterations_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("steps.jsonl");
    let o = iccr(&[
        "run",
        "--n",
        "12",
        "--depth",
        "8",
        "--p",
        "0.3",
        "--trajectories",
        "2",
        "--log-iterations",
        arg(&log),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&log).unwrap();
    assert!(text.lines().count() > 0);
    for line in text.lines() {
        assert!(line.starts_with('{') && line.ends_with('}'), "{line}");
        assert!(line.contains("\"trajectory\""));
        assert!(line.contains("\"branch\""));
    }
}

#[test]
fn sweep_writes_one_file_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = iccr(&[
        "sweep",
        "--n",
        "8,12",
        "--p",
        "0.05:0.30:0.05",
        "--depth",
        "4",
        "--out-dir",
        arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for n in [8, 12] {
        for p in ["0.05", "0.1", "0.15", "0.2", "0.25", "0.3"] {
            let path = dir.path().join(format!("n{n}_p{p}.csv"));
            assert!(path.exists(), "missing {}", path.display());
        }
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 12);
}

#[test]
fn validate_status_matches_verdicts() {
    let o = iccr(&[
        "validate",
        "--max-n",
        "4",
        "--circuits",
        "20",
        "--variational-circuits",
        "10",
        "--trials",
        "10",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let all_pass = lines.iter().all(|l| l.starts_with("[PASS]"));
    assert!(lines
        .iter()
        .all(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")));
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 2 }));
    assert_eq!(iccr(&["validate", "--max-n", "0"]).status.code(), Some(1));
}

#[test]
fn bench_reports_slope() {
    let o = iccr(&["bench", "--n", "8,16", "--depth", "4"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("log-log slope"));
}
