//! End-to-end CLI tests: exit codes, golden CSV header, determinism,
//! manifest integrity and SVG validity.

use std::fs;
use std::path::Path;
use std::process::Command;

fn mcflab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mcflab"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn circle_config(out_dir: &Path) -> String {
    format!(
        r#"{{
  "geometry": {{"kind": "circle", "params": {{"r0": 1.0}}, "m": 128, "n": 1}},
  "flow": {{"t_cap": 0.02, "c_stab": 0.5, "record_stride": 16}},
  "monitors": {{"alphas": [2, 3], "quantities": ["A", "H"]}},
  "output": {{"dir": "{}"}}
}}"#,
        out_dir.display()
    )
}

#[test]
fn golden_csv_header() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &circle_config(&out));
    let status = mcflab().arg("run").arg(&cfg).status().unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("steps.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "step,t,dt,max_A2,max_H2,min_kappa,min_H,area,acc_A_2,acc_A_3,acc_H_2,acc_H_3"
    );
}

#[test]
fn reruns_are_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    let cfg_a = tmp.path().join("a.json");
    let cfg_b = tmp.path().join("b.json");
    fs::write(&cfg_a, circle_config(&out_a)).unwrap();
    fs::write(&cfg_b, circle_config(&out_b)).unwrap();
    assert!(mcflab().arg("run").arg(&cfg_a).status().unwrap().success());
    assert!(mcflab().arg("run").arg(&cfg_b).status().unwrap().success());
    let a = fs::read(out_a.join("steps.csv")).unwrap();
    let b = fs::read(out_b.join("steps.csv")).unwrap();
    assert_eq!(a, b, "steps.csv must be byte-identical across reruns");

    // the manifests agree on the content hash
    let ma: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("manifest.json")).unwrap()).unwrap();
    let mb: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(ma["csv_sha256"], mb["csv_sha256"]);
}

#[test]
fn manifest_lists_existing_artifacts_with_matching_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &circle_config(&out));
    assert!(mcflab().arg("run").arg(&cfg).status().unwrap().success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    for artifact in manifest["artifacts"].as_array().unwrap() {
        let path = out.join(artifact.as_str().unwrap());
        assert!(path.exists(), "missing artifact {}", path.display());
    }
    // recompute the hash of steps.csv
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(fs::read(out.join("steps.csv")).unwrap());
    let hex = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    assert_eq!(manifest["csv_sha256"].as_str().unwrap(), hex);
    assert_eq!(manifest["stop_reason"].as_str().unwrap(), "ReachedTCap");
    assert_eq!(
        manifest["config"]["geometry"]["kind"].as_str().unwrap(),
        "circle"
    );
}

#[test]
fn blowup_run_exits_zero_with_stop_reason() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(
        tmp.path(),
        &format!(
            r#"{{
  "geometry": {{"kind": "analytic_sphere", "params": {{"r0": 1.0}}, "n": 2}},
  "flow": {{"t_cap": 0.3}},
  "monitors": {{"alphas": [4], "quantities": ["A", "H"]}},
  "output": {{"dir": "{}"}}
}}"#,
            out.display()
        ),
    );
    let status = mcflab().arg("run").arg(&cfg).status().unwrap();
    assert!(status.success(), "blow-up is a physics outcome, not a crash");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let stop = manifest["stop_reason"].as_str().unwrap();
    assert!(
        stop == "CurvatureBlowup" || stop == "StepUnderflow",
        "T = 0.25 < t_cap, expected blow-up stop, got {stop}"
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["extension"]["blowup_consistent"], true);
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    // missing geometry.kind
    let cfg = write_config(
        tmp.path(),
        r#"{"geometry": {"params": {"r0": 1.0}, "m": 64, "n": 1},
            "flow": {"t_cap": 0.01}, "output": {"dir": "x"}}"#,
    );
    let status = mcflab().arg("run").arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // nonexistent file
    let status = mcflab().arg("run").arg("/no/such/file.json").status().unwrap();
    assert_eq!(status.code(), Some(2));

    // invalid c_stab
    let cfg = write_config(
        tmp.path(),
        r#"{"geometry": {"kind": "circle", "params": {"r0": 1.0}, "m": 64, "n": 1},
            "flow": {"t_cap": 0.01, "c_stab": 2.0}, "output": {"dir": "x"}}"#,
    );
    assert_eq!(mcflab().arg("run").arg(&cfg).status().unwrap().code(), Some(2));

    // unknown verify suite
    let status = mcflab().arg("verify").arg("nonsense").arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // bad oracle parameters
    let status = mcflab()
        .args(["oracle", "--n", "1", "--r0", "1.0", "--alpha", "2", "--t-end", "0.9"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2), "t_end beyond T must be rejected");
}

#[test]
fn env_var_overrides_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let ignored = tmp.path().join("ignored");
    let actual = tmp.path().join("actual");
    let cfg = write_config(tmp.path(), &circle_config(&ignored));
    let status = mcflab()
        .arg("run")
        .arg(&cfg)
        .env("MCFLAB_OUT", &actual)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(actual.join("steps.csv").exists());
    assert!(!ignored.exists());
}

#[test]
fn svg_plots_are_valid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &circle_config(&out));
    assert!(mcflab().arg("run").arg(&cfg).status().unwrap().success());
    for name in ["radius_vs_time.svg", "accumulators.svg"] {
        let svg = fs::read_to_string(out.join("plots").join(name)).unwrap();
        assert!(svg.starts_with("<svg "), "{name} must open with an svg tag");
        assert!(svg.contains("xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.contains("version=\"1.1\""));
        assert!(svg.contains("width=\"640\"") && svg.contains("height=\"480\""));
        assert!(svg.contains("<polyline"), "{name} needs at least one polyline");
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn oracle_json_output() {
    let out = mcflab()
        .args(["oracle", "--n", "1", "--r0", "1.0", "--alpha", "2", "--t-end", "0.375", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["radius"].as_f64().unwrap() - 0.5).abs() < 1e-14);
    assert!((v["mean_curvature"].as_f64().unwrap() - 2.0).abs() < 1e-14);
    assert!(v["quadrature_rel_err"].as_f64().unwrap() < 1e-8);

    // divergent marker
    let out = mcflab()
        .args(["oracle", "--n", "3", "--r0", "1.0", "--alpha", "5", "--t-end", "0.16666666666666666", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["norm"].as_str().unwrap(), "inf");
    assert!(v["quadrature_rel_err"].is_null());
}

#[test]
fn verify_moser_suite_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "{}");
    let out_dir = tmp.path().join("verify_out");
    let status = mcflab()
        .args(["verify", "moser"])
        .arg(&cfg)
        .env("MCFLAB_OUT", &out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["suite"], "moser");
    assert!(report["checks"].as_array().unwrap().len() == 10);
}
