use std::fs;
use std::process::Command;

fn mrviol() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mrviol"))
}

#[test]
fn invalid_config_exits_nonzero_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let cases: [&[&str]; 5] = [
        &["lg-scan", "--shots", "0"],
        &["lg-scan", "--reps", "1"],
        &["qndm-run", "--dlambda", "-1"],
        &["qndm-run", "--omega-tau", "0:1:5"],
        &["compare", "--noise", "/nonexistent/noise.toml"],
    ];
    for args in cases {
        let o = mrviol().args(args).arg("--out-dir").arg(&out).output().unwrap();
        assert!(!o.status.success(), "{args:?} succeeded");
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}: no diagnostic");
        assert!(!out.exists(), "{args:?} left {}", out.display());
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "shots = 10\nbogus = 1\n").unwrap();
    let out = tmp.path().join("o");
    let o = mrviol().args(["lg-scan", "--config"]).arg(&cfg).arg("--out-dir").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    assert!(!out.exists());
}

#[test]
fn config_file_and_flags_combine() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    let out = tmp.path().join("o");
    fs::write(&cfg, "omega_tau = 1.0\nshots = 20\ndelta_lambda = 1.0\nlambda_max = 20.0\nseed = 3\n").unwrap();
    let o = mrviol()
        .args(["qndm-run", "--shots", "40", "--workers", "2", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["shots"], 40);
    assert_eq!(json["config"]["seed"], 3);
    assert_eq!(json["config"]["omega_tau"], "1");
    assert_eq!(json["qndm"]["n_lambda_points"], 21);
    assert_eq!(json["resources"]["n_qndm"], 2 * 20 * 40);
}

#[test]
fn unknown_mode_is_a_usage_error() {
    let o = mrviol().arg("scan-everything").output().unwrap();
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}
