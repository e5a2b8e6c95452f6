//! Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned
//! here and applied to the raw residuals, independently of the tolerances
//! the report itself used.

use std::time::{Duration, Instant};

use gkred::algebra::Scalar;
use gkred::gk::{mc_residual, Deformation};
use gkred::identities;
use gkred::pipeline::{run, Kind, Overrides, Report, RunConfig, Status, Suite};

const SEED: u64 = 7;
const POINTS: usize = 20;
const APPENDIX_BUDGET: Duration = Duration::from_secs(30);
const VERIFY_ALL_BUDGET: Duration = Duration::from_secs(600);
const H_TOL: f64 = 1e-8;
const CURVATURE_TOL: f64 = 1e-7;
const KAHLER_TOL: f64 = 1e-9;
const RELATIVE_TOL: f64 = 1e-8;
const HOLOMORPHY_TOL: f64 = 1e-9;
const BISMUT_TOL: f64 = 1e-9;
const HAMILTONIAN_TOL: f64 = 1e-9;
const CONTROL_FLOOR: f64 = 1e-3;
const PROPERTY_CASES: usize = 200;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn config() -> RunConfig {
    let ov = Overrides {
        seed: Some(SEED),
        points: Some(POINTS),
        tol: Some(1e-9),
        lambda: Some("1/10".into()),
        allow_nonintegrable: false,
    };
    RunConfig::from_toml("", &ov).expect("default configuration")
}

/// Exact check present and passing.
fn exact(r: &Report, name: &str) -> Result<(), String> {
    let c = r.get(name).ok_or_else(|| format!("{name} missing"))?;
    if c.kind != Kind::Exact || c.tolerance.is_some() {
        return Err(format!("{name} is not an exact check"));
    }
    match c.status {
        Status::Pass => Ok(()),
        _ => Err(format!("{name}: {}", c.residual)),
    }
}

/// Numeric residual of a check, compared with a pinned tolerance.
fn below(r: &Report, name: &str, tol: f64) -> Result<f64, String> {
    let c = r.get(name).ok_or_else(|| format!("{name} missing"))?;
    let v = c.residual.as_f64().ok_or_else(|| format!("{name}: no residual ({:?})", c.reason))?;
    if c.witnesses.is_empty() || c.seed.is_none() {
        return Err(format!("{name}: no witness or seed recorded"));
    }
    if v < tol {
        Ok(v)
    } else {
        Err(format!("{name}: {v:e} >= {tol:e}"))
    }
}

fn above(r: &Report, name: &str, floor: f64) -> Result<f64, String> {
    let c = r.get(name).ok_or_else(|| format!("{name} missing"))?;
    let v = c.residual.as_f64().ok_or_else(|| format!("{name}: no residual"))?;
    if v > floor {
        Ok(v)
    } else {
        Err(format!("{name}: {v:e} <= {floor:e}"))
    }
}

fn collect(parts: Vec<Result<String, String>>) -> Outcome {
    let errs: Vec<_> = parts.iter().filter_map(|p| p.as_ref().err().cloned()).collect();
    if errs.is_empty() {
        let shown: Vec<String> = parts.into_iter().map(|p| p.unwrap()).filter(|s| !s.is_empty()).collect();
        outcome(true, if shown.is_empty() { "exact".into() } else { shown.join(", ") })
    } else {
        outcome(false, errs.join("; "))
    }
}

fn main() {
    let t = Instant::now();
    let appendix = run(Suite::Appendix, config()).expect("appendix suite runs");
    let appendix_time = t.elapsed();

    let t = Instant::now();
    let all = run(Suite::All, config()).expect("verify all runs");
    let all_time = t.elapsed();
    assert_eq!(all.points, POINTS);

    let mut results: Vec<(&str, Outcome)> = Vec::new();

    results.push((
        "appendix brackets equal their closed forms",
        collect(vec![
            exact(&appendix, "appendix.bracket_closed_form.A1B1").map(|_| String::new()),
            exact(&appendix, "appendix.bracket_closed_form.A2B1").map(|_| String::new()),
            if appendix_time < APPENDIX_BUDGET {
                Ok(format!("{:.2} s", appendix_time.as_secs_f64()))
            } else {
                Err(format!("took {:.1} s", appendix_time.as_secs_f64()))
            },
        ]),
    ));

    results.push((
        "d mu contractions vanish for all four pairs",
        collect(
            ["A1B1", "A2B1", "A1B2", "A2B2"]
                .iter()
                .map(|p| exact(&all, &format!("appendix.dmu_contraction.{p}")).map(|_| String::new()))
                .collect(),
        ),
    ));

    results.push(("integrability of both solutions, control rejected", {
        let l = Scalar::from_ratio(1, 10);
        let i = mc_residual(&Deformation::solution_i(l.clone())).is_zero();
        let ii = mc_residual(&Deformation::solution_ii(l.clone())).is_zero();
        let bad = !mc_residual(&Deformation::nonintegrable_control(l)).is_zero();
        let rep = collect(vec![
            exact(&all, "gk.mc.solution_i").map(|_| String::new()),
            exact(&all, "gk.mc.solution_ii").map(|_| String::new()),
            exact(&all, "gk.mc.negative_control").map(|_| String::new()),
        ]);
        outcome(i && ii && bad && rep.ok, format!("solution i {i}, solution ii {ii}, control nonzero {bad}, report {}", rep.detail))
    }));

    results.push((
        "type locus: three lines and the cubic formula",
        collect(vec![
            exact(&all, "gk.type_locus.three_lines").map(|_| String::new()),
            exact(&all, "gk.type_locus.random").map(|_| String::new()),
        ]),
    ));

    results.push((
        "reduced 3-form: both expressions agree",
        collect(vec![
            below(&all, "reduction.undeformed.h_tilde", H_TOL).map(|v| format!("undeformed {v:.1e}")),
            below(&all, "reduction.deformed.h_tilde", H_TOL).map(|v| format!("deformed {v:.1e}")),
        ]),
    ));

    results.push((
        "closed-form reduced curvature matches direct curvature",
        collect(vec![
            below(&all, "reduction.undeformed.curvature_closed_vs_direct", CURVATURE_TOL).map(|v| format!("undeformed {v:.1e}")),
            below(&all, "reduction.deformed.curvature_closed_vs_direct", CURVATURE_TOL).map(|v| format!("deformed {v:.1e}")),
            below(&all, "reduction.undeformed.kahler_symmetry", KAHLER_TOL).map(|v| format!("symmetry {v:.1e}")),
            below(&all, "reduction.undeformed.h_tilde_zero", KAHLER_TOL).map(|v| format!("H~ {v:.1e}")),
        ]),
    ));

    results.push((
        "relative curvature formulas agree, mixed (0,1) pairs vanish",
        collect(vec![
            below(&all, "reduction.undeformed.relative_curvature", RELATIVE_TOL).map(|v| format!("undeformed {v:.1e}")),
            below(&all, "reduction.deformed.relative_curvature", RELATIVE_TOL).map(|v| format!("deformed {v:.1e}")),
            below(&all, "gk.holomorphy", HOLOMORPHY_TOL).map(|v| format!("(0,1) pairs {v:.1e}")),
        ]),
    ));

    results.push((
        "Bismut connections: graph construction and reduced identities",
        collect(vec![
            exact(&all, "reduction.bismut_graphs").map(|_| String::new()),
            below(&all, "reduction.undeformed.bismut_pair", BISMUT_TOL).map(|v| format!("pair {v:.1e}")),
            below(&all, "reduction.deformed.bismut_pair", BISMUT_TOL).map(|v| format!("deformed pair {v:.1e}")),
            below(&all, "reduction.undeformed.metric_compatible", BISMUT_TOL).map(|v| format!("metric {v:.1e}")),
            below(&all, "reduction.deformed.metric_compatible", BISMUT_TOL).map(|v| format!("deformed metric {v:.1e}")),
        ]),
    ));

    results.push((
        "Hamiltonian condition, perturbed moment map rejected",
        collect(vec![
            below(&all, "gk.hamiltonian", HAMILTONIAN_TOL).map(|v| format!("{v:.1e}")),
            above(&all, "gk.hamiltonian.negative_control", CONTROL_FLOOR).map(|v| format!("control {v:.2e}")),
        ]),
    ));

    results.push(("property suites and verify all budget", {
        let runs = identities::run_all(SEED, PROPERTY_CASES);
        let total: usize = runs.iter().map(|r| r.1).sum();
        let failures: Vec<String> = runs
            .iter()
            .filter(|r| r.1 != PROPERTY_CASES)
            .map(|r| format!("{}: {}/{PROPERTY_CASES} ({})", r.0, r.1, r.2.clone().unwrap_or_default()))
            .collect();
        let within = all_time < VERIFY_ALL_BUDGET;
        let ok = failures.is_empty() && within && all.all_pass();
        let detail = if ok {
            format!("{total}/{} cases, verify all {:.1} s", runs.len() * PROPERTY_CASES, all_time.as_secs_f64())
        } else {
            format!(
                "{}; verify all {:.1} s, report green {}",
                failures.join("; "),
                all_time.as_secs_f64(),
                all.all_pass()
            )
        };
        outcome(ok, detail)
    }));

    let mut failed = 0;
    for (k, (name, o)) in results.iter().enumerate() {
        println!("{} {:>2} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, k + 1, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
