use std::path::Path;
use std::process::Command;

fn pli_lab(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pli-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("PLI_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn runs_are_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for exp in ["scalar-profile", "high-gain", "dt-sweep", "pli", "prox", "flow"] {
        let args = [exp, "--seed", "3"];
        assert!(pli_lab(&args, d1.path()).status.success(), "{exp}");
        assert!(pli_lab(&args, d2.path()).status.success(), "{exp}");
    }
    for name in [
        "scalar_profile.csv",
        "highgain.csv",
        "dt_sweep.csv",
        "pli.csv",
        "pli.json",
        "prox.csv",
        "flow.csv",
    ] {
        assert_eq!(read(&d1.path().join(name)), read(&d2.path().join(name)), "{name}");
    }
}

#[test]
fn manifest_lists_outputs_with_hashes() {
    let d = tempfile::tempdir().unwrap();
    assert!(pli_lab(&["dt_sweep", "hs=1,0.1"], d.path()).status.success());
    let m: serde_json::Value = serde_json::from_str(&read(&d.path().join("manifest.json"))).unwrap();
    assert_eq!(m["config"]["params"]["hs"], serde_json::json!([1.0, 0.1]));
    for o in m["outputs"].as_array().unwrap() {
        assert_eq!(o["sha256"].as_str().unwrap().len(), 64);
        assert!(d.path().join(o["path"].as_str().unwrap()).exists());
    }
    let csv = read(&d.path().join("dt_sweep.csv"));
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("h,kd_min,md_min\n"));
}

#[test]
fn config_file_and_flag_precedence() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("c.json");
    std::fs::write(&cfg, r#"{"n": 5, "kmax": 3.0, "seed": 11}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    assert!(pli_lab(&["scalar_profile", "--config", cfg, "--kmax", "4"], d.path())
        .status
        .success());
    let m: serde_json::Value = serde_json::from_str(&read(&d.path().join("manifest.json"))).unwrap();
    assert_eq!(m["config"]["params"]["kmax"], serde_json::json!(4.0));
    assert_eq!(m["config"]["params"]["n"], serde_json::json!(5));
    assert_eq!(m["config"]["seed"], serde_json::json!(11));
}

#[test]
fn invalid_config_exits_2() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        &["flow", "--nope", "1"][..],
        &["flow", "--side", "up"],
        &["no-such-experiment"],
        &["flow", "--k0", "0.5"],
    ] {
        let out = pli_lab(args, d.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"], "config");
    }
    assert!(d.path().join("error.json").exists());
}
