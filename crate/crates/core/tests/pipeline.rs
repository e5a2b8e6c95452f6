//! End-to-end runs of the library pipeline.

use std::path::Path;

use gkred::pipeline::{run, Overrides, Report, RunConfig, Status, Suite};

fn small(seed: u64) -> Overrides {
    Overrides { seed: Some(seed), points: Some(4), ..Overrides::default() }
}

fn config_file(name: &str, ov: &Overrides) -> gkred::Result<RunConfig> {
    RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name), ov)
}

#[test]
fn shipped_configs_load() {
    let cp2 = config_file("cp2.toml", &small(7)).unwrap();
    let default = RunConfig::from_toml("", &small(7)).unwrap();
    assert_eq!(cp2.n, default.n);
    assert_eq!(cp2.lambda, default.lambda);
    assert!(config_file("solution_i.toml", &small(7)).is_ok());
}

#[test]
fn gk_suite_is_deterministic() {
    let a = run(Suite::Gk, RunConfig::from_toml("", &small(5)).unwrap()).unwrap();
    let b = run(Suite::Gk, RunConfig::from_toml("", &small(5)).unwrap()).unwrap();
    assert_eq!(a.without_timing(), b.without_timing());
    assert!(a.all_pass());
}

#[test]
fn solution_i_passes_gk_suite() {
    let r = run(Suite::Gk, config_file("solution_i.toml", &small(2)).unwrap()).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
}

#[test]
fn report_survives_json() {
    let r = run(Suite::Appendix, RunConfig::from_toml("", &small(1)).unwrap()).unwrap();
    let back: Report = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert_eq!(r.counts().1, 0);
}

#[test]
fn nonintegrable_needs_permission() {
    let ov = small(3);
    assert!(run(Suite::Gk, config_file("nonintegrable.toml", &ov).unwrap()).is_err());
    let allowed = Overrides { allow_nonintegrable: true, ..small(3) };
    let r = run(Suite::Gk, config_file("nonintegrable.toml", &allowed).unwrap()).unwrap();
    assert!(!r.all_pass());
    assert!(r.checks.iter().any(|c| c.status == Status::Skipped && c.reason.is_some()));
}
