use std::path::PathBuf;
use std::process::{Command, Output};

fn gkred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkred"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs")
}

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_appendix_json_is_green() {
    let o = gkred(&["verify", "appendix", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "report/v1");
    assert_eq!(v["command"], "verify appendix");
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    for c in checks {
        assert_eq!(c["status"], "pass", "{c}");
        if c["kind"] == "exact" {
            assert!(c.get("tolerance").is_none());
        }
    }
}

#[test]
fn verify_gk_text_lists_every_check() {
    let o = gkred(&["verify", "gk", "--points", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("report/v1 verify gk"));
    assert!(s.contains("PASS gk.hamiltonian "));
    assert!(s.contains(" 0 failed"));
}

#[test]
fn json_reports_are_reproducible() {
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["runtime_ms"] = 0.into();
        for c in v["checks"].as_array_mut().unwrap() {
            c["runtime_ms"] = 0.into();
        }
        v
    };
    let args = ["verify", "reduction", "--points", "3", "--seed", "11", "--format", "json"];
    assert_eq!(strip(gkred(&args)), strip(gkred(&args)));
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("gkred-cli-test-{}.txt", std::process::id()));
    let o = gkred(&["type-locus", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, stdout(&o));
    assert!(written.contains("locus / det(z; lambda f; g) ="));
}

#[test]
fn bracket_of_sections() {
    let o = gkred(&["bracket", "E0", "z0*dz1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[E0, z0*dz1] = (1)*dz1");

    let o = gkred(&["bracket", "z0*Eb1", "Fb0 + 2*dz1", "--project"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("V+ part"));
}

#[test]
fn malformed_section_exits_2() {
    let o = gkred(&["bracket", "z0*", "E0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
}

#[test]
fn nonintegrable_deformation_is_refused() {
    let o = gkred(&["--config", "configs/nonintegrable.toml", "verify", "gk"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Maurer-Cartan"));
}

#[test]
fn nonintegrable_deformation_fails_when_allowed() {
    let o = gkred(&["--config", "configs/nonintegrable.toml", "--allow-nonintegrable", "verify", "gk", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    let by_name = |n: &str| checks.iter().find(|c| c["name"] == n).unwrap().clone();
    assert_eq!(by_name("gk.mc.config")["status"], "fail");
    let skipped = by_name("gk.holomorphy");
    assert_eq!(skipped["status"], "skipped");
    assert!(skipped["reason"].as_str().unwrap().contains("not integrable"));
}

#[test]
fn unknown_config_key_exits_2() {
    let path = std::env::temp_dir().join(format!("gkred-cli-bad-{}.toml", std::process::id()));
    std::fs::write(&path, "n = 3\ncolour = \"blue\"\n").unwrap();
    let o = gkred(&["--config", path.to_str().unwrap(), "verify", "appendix"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(2));
}
