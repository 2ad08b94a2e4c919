//! End-to-end checks of the binary: exit-status contract, output format,
//! config merging, and worker-count determinism.

use std::path::Path;
use std::process::Command;

fn eville() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eville"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    // precondition violation: eps = 0
    let out = eville()
        .args(["bound", "l1", "--eps", "0", "--gamma", "1e6", "--K", "1", "--r-of-k", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // missing required flag
    let out = eville().args(["bound", "l1", "--eps", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unknown rule spec
    let dir = tempfile::tempdir().unwrap();
    let out = eville()
        .args(["simulate", "--family", "rademacher", "--rule", "nonsense"])
        .args(["--horizon", "10", "--paths", "200"])
        .arg("--out")
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // conflicting flags: both --family and --r-of-k
    let out = eville()
        .args(["bound", "l1", "--eps", "0.5", "--gamma", "1e6", "--K", "1"])
        .args(["--family", "rademacher", "--r-of-k", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // clap-level unknown flag
    let out = eville().args(["simulate", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_4() {
    let out = eville()
        .args(["oracle", "two-coin", "--n", "1", "--trunc", "60"])
        .args(["--out", "/nonexistent-dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn negative_control_exits_3() {
    // A witness whose asserted tail bounds are deliberately false: under
    // rademacher, M_1 = exp(1/4)/sqrt(2) ~ 0.908, so level rules at 0.3,
    // 0.4, 0.5 all fire at t = 1 and the witness is 3 from then on. Every
    // stopped mean is exactly 3 > 1: the checker must flag it and exit 3.
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("neg.csv");
    let out = eville()
        .args(["verify", "eprocess", "--process", "witness:levels=0.3,0.4,0.5"])
        .args(["--family", "rademacher"])
        .args(["--horizon", "50", "--paths", "300", "--seed", "7"])
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    let text = read(&out_path);
    assert!(text.contains("true"), "some row must be flagged:\n{text}");
}

#[test]
fn output_begins_with_reproduction_header() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("o.csv");
    eville()
        .args(["oracle", "binary-pn", "--m", "5", "--n", "2", "--seed", "77"])
        .arg("--out")
        .arg(&out_path)
        .status()
        .unwrap();
    let text = read(&out_path);
    let first = text.lines().next().unwrap();
    assert_eq!(first, format!("# eville {} seed=77", env!("CARGO_PKG_VERSION")));
    assert_eq!(text.lines().nth(1).unwrap(), "value,error_bound,method");
    assert_eq!(text.lines().nth(2).unwrap(), "0.5,0,two-atom case analysis");
}

#[test]
fn jsonl_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("o.jsonl");
    eville()
        .args(["oracle", "two-coin", "--n", "1", "--trunc", "60", "--json"])
        .arg("--out")
        .arg(&out_path)
        .status()
        .unwrap();
    let text = read(&out_path);
    let row: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert!((row["value"].as_f64().unwrap() - 0.7112119049133976).abs() < 1e-12);
    assert_eq!(row["method"], "poisson-binomial dp");
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("job.json");
    std::fs::write(
        &cfg_path,
        r#"{"n": 1, "trunc": 40, "seed": 5}"#,
    )
    .unwrap();
    let out_path = dir.path().join("o.csv");
    // --trunc on the command line wins over the file's 40
    let out = eville()
        .args(["oracle", "two-coin", "--trunc", "60"])
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = read(&out_path);
    assert!(text.lines().next().unwrap().ends_with("seed=5"));
    assert!(text.contains("0.7112119049133976"));

    // unknown keys in the file are rejected
    std::fs::write(&cfg_path, r#"{"bogus": 1}"#).unwrap();
    let out = eville()
        .args(["oracle", "two-coin", "--n", "1", "--trunc", "60"])
        .arg("--config")
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_output_files_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for workers in ["1", "7"] {
        let out_path = dir.path().join(format!("w{workers}.csv"));
        let status = eville()
            .args(["mu-star", "--family", "truncated-cauchy-grid:a=1,10"])
            .args(["--rule", "abs-mean-above:threshold=1,start=5"])
            .args(["--horizon", "300", "--paths", "2000", "--seed", "11"])
            .args(["--workers", workers])
            .arg("--out")
            .arg(&out_path)
            .status()
            .unwrap();
        assert!(status.success());
        bytes.push(std::fs::read(&out_path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1], "outputs differ across worker counts");
}

#[test]
fn slln_schedule_then_run_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sched_path = dir.path().join("toy.csv");
    // a toy (uncertified) schedule file
    std::fs::write(&sched_path, "n,k_n\n1,1\n2,2\n3,4\n").unwrap();
    let out_path = dir.path().join("run.csv");
    let out = eville()
        .args(["slln", "run"])
        .arg("--schedule")
        .arg(&sched_path)
        .args(["--family", "gaussian:mu=0,sigma=1"])
        .args(["--horizon", "200", "--paths", "150", "--seed", "3"])
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = read(&out_path);
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "family,path_index,terminal_witness,certified"
    );
    // toy entries cannot re-certify against the gaussian grid
    assert!(text.lines().nth(2).unwrap().ends_with("false"));
    assert_eq!(text.lines().count(), 2 + 150);

    // and a certified schedule emitted by the schedule command re-verifies
    let cert_path = dir.path().join("cert.csv");
    let status = eville()
        .args(["slln", "schedule", "--family", "rademacher", "--n-max", "2"])
        .arg("--out")
        .arg(&cert_path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&cert_path);
    assert!(text.contains("661231600128,true"));
}
