use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_banditstream"))
}

#[test]
fn run_then_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let status = bin()
        .args([
            "run",
            "--num-arms",
            "12",
            "--horizon-rule",
            "500K",
            "--seeds",
            "0..4",
            "--algos",
        ])
        .arg("uniform-exploration,bucket-loglog")
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
    let cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(cfg["config"]["standout"]["standout_sigma"], 0.1);
    assert_eq!(cfg["config"]["approx_threshold"], 100_000);

    let md = dir.path().join("table.md");
    let status = bin()
        .arg("table")
        .arg("--in")
        .arg(out.join("results.csv"))
        .arg("--out")
        .arg(&md)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let text = std::fs::read_to_string(md).unwrap();
    assert!(
        text.contains("| uniform | 12 | 6000 | uniform-exploration | 5 |"),
        "{text}"
    );
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let ok = bin()
            .args([
                "run",
                "--instance",
                "standout,trap",
                "--num-arms",
                "16",
                "--seeds",
                "0..3",
                "--out",
            ])
            .arg(&out)
            .output()
            .unwrap()
            .status;
        assert!(ok.success());
        files.push(std::fs::read(out.join("results.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["run", "--num-arms", "10", "--horizon-rule", "0.5K", "--out"])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"instances":["uniform"],"num_arms":[4],"horizons":[],"algorithms":["bucket-log"]}"#,
    )
    .unwrap();
    let status = bin()
        .arg("run")
        .arg("--config")
        .arg(&bad)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));

    let status = bin()
        .args(["run", "--num-arms", "10", "--out"])
        .arg(dir.path())
        .env("BANDITSTREAM_THREADS", "zero")
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn json_config_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"instances":["lower_bound_hard"],"num_arms":[8],"horizons":[{{"coefficient":1000,"power":1}}],
               "algorithms":["uniform-exploration","asp-logstar"],"seeds":{{"start":0,"end":2}},"output":{:?}}}"#,
            out
        ),
    )
    .unwrap();
    let status = bin()
        .env("BANDITSTREAM_THREADS", "2")
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert_eq!(
        std::fs::read_to_string(out.join("results.csv"))
            .unwrap()
            .lines()
            .count(),
        7
    );
}

#[test]
fn verify_passes() {
    let out = bin().arg("verify").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.lines().all(|l| l.starts_with("[PASS]")), "{text}");
}
