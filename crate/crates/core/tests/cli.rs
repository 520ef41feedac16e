use std::fs;
use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pure-explore"))
}

const CONFIG: &str = r#"{"env":{"kind":"double_chain","length":2,"horizon":2},
  "algorithm":"rf_express","epsilons":[2.0],"delta":0.1,"num_seeds":2,"bonus_scale":0.1}"#;

#[test]
fn run_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let status = cli()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = fs::read_to_string(out.join("diagnostics/e0_s1.csv")).unwrap();
    assert!(csv.starts_with("t,stop_stat,max_w1,coverage\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema"], 1);

    let audit = cli().args(["audit", "--out"]).arg(&out).output().unwrap();
    assert_eq!(audit.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&audit.stdout).contains("runs checked: 2"));
}

#[test]
fn flags_override_config_and_cap_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, CONFIG).unwrap();
    let status = cli()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .args([
            "--seeds",
            "1",
            "--cap",
            "50",
            "--bonus-scale",
            "1",
            "--epsilons",
            "1,2",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, CONFIG.replace("[2.0]", "[]")).unwrap();
    assert_eq!(
        cli()
            .args(["run", "--config"])
            .arg(&cfg)
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
    assert_eq!(
        cli()
            .args(["run", "--config", "/no/such/file.json"])
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
    assert_eq!(
        cli()
            .args(["bound", "--states", "2"])
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
}

#[test]
fn bound_prints_both_calculators() {
    let out = cli()
        .args([
            "bound",
            "--states",
            "2",
            "--actions",
            "2",
            "--horizon",
            "2",
            "--epsilon",
            "1",
            "--delta",
            "0.1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("reward_free=2.9741196209e11"), "{text}");
    assert!(text.contains("best_policy=3.0164092575e20"), "{text}");
}
