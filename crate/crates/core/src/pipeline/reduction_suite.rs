use std::sync::Arc;

use num_complex::Complex64;

use super::{point_rng, rel_diff, sweep_check, timed, Check, Context, Kind, Witness};
use crate::calculus::Form;
use crate::courant::TwistH;
use crate::error::Result;
use crate::gk::checks::{linear_field, random_matrix};
use crate::metric::{graph_bismut_mismatches, GenMetric, Sign};
use crate::reduction::local::{reduced_curvature_fd, values, Field};
use crate::reduction::{ExactMetric, Local, MetricSource, Setup};

type C = Complex64;

/// Absolute tolerance for the two expressions of the reduced 3-form.
pub const H_TOL: f64 = 1e-8;
/// Relative tolerance for closed-form against direct curvature.
pub const CURVATURE_TOL: f64 = 1e-7;
/// Relative tolerance for the finite-difference curvature oracle.
pub const FD_TOL: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-5;
/// Pairwise tolerance for the three relative curvature formulas.
pub const RELATIVE_TOL: f64 = 1e-8;
/// Random metrics in the graph-construction check.
pub const GRAPH_METRICS: usize = 5;

fn four_fields(loc: &Local, seed: u64, salt: u64, k: usize) -> (Vec<Vec<Vec<C>>>, Vec<Field>) {
    let mut r = point_rng(seed, salt, k);
    let a: Vec<_> = (0..4).map(|_| random_matrix(&mut r, loc.n())).collect();
    let f = a.iter().map(|m| linear_field(loc, m)).collect();
    (a, f)
}

pub fn run(ctx: &Context) -> Result<Vec<Check>> {
    let cfg = &ctx.cfg;
    let mut out = Vec::new();
    let flat: Arc<dyn MetricSource> = Arc::new(ExactMetric(GenMetric::flat(cfg.n)));
    out.extend(data_checks(ctx, "undeformed", &ctx.setup(flat), true));

    let deformed_names = [
        "h_tilde",
        "curvature_closed_vs_direct",
        "curvature_fd",
        "relative_curvature",
        "metric_lifts_agree",
        "metric_compatible",
        "bismut_pair",
        "torsion",
        "curvature_form",
        "submanifold_extension",
    ];
    if cfg.deformation.is_zero() || !ctx.integrable() {
        let why = if cfg.deformation.is_zero() {
            "the configured deformation is zero"
        } else {
            "the configured deformation is not integrable"
        };
        out.extend(
            deformed_names
                .iter()
                .map(|n| Check::skipped(&format!("reduction.deformed.{n}"), "", Kind::Numeric, why)),
        );
    } else {
        let src: Arc<dyn MetricSource> = ctx.source()?;
        out.extend(data_checks(ctx, "deformed", &ctx.setup(src), false));
    }
    out.push(graph_check(cfg.seed));
    Ok(out)
}

fn data_checks(ctx: &Context, label: &str, st: &Setup, kahler: bool) -> Vec<Check> {
    let cfg = &ctx.cfg;
    let seed = cfg.seed;
    let tol = cfg.tol;
    let pts = ctx.points(cfg.points, 0x7ed);
    let name = |s: &str| format!("reduction.{label}.{s}");
    let mut out = Vec::new();

    out.push(sweep_check(
        &name("h_tilde"),
        "(H + d gamma)|tau = (H + Omega_+^a ^ xi_a)|tau+",
        &pts,
        H_TOL,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 1, k);
            let a = loc.reduced_h_gamma(&f[0], &f[1], &f[2])?;
            let b = loc.reduced_h_omega(&f[0], &f[1], &f[2])?;
            Ok((a - b).norm())
        },
    ));
    if kahler {
        out.push(sweep_check(&name("h_tilde_zero"), "reduced 3-form vanishes", &pts, tol, seed, |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 1, k);
            Ok(loc.reduced_h_omega(&f[0], &f[1], &f[2])?.norm())
        }));
    }

    out.push(sweep_check(
        &name("curvature_closed_vs_direct"),
        "closed-form reduced curvature = curvature of the reduced connection, relative",
        &pts,
        CURVATURE_TOL,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 2, k);
            let direct = loc.reduced_curvature_direct_value(&f[0], &f[1], &f[2], &f[3])?;
            let closed = loc.reduced_curvature_closed(&f[0], &f[1], &f[2], &f[3])?;
            Ok(rel_diff(direct, closed))
        },
    ));

    let fd_pts = &pts[..pts.len().min(5)];
    out.push(sweep_check(
        &name("curvature_fd"),
        "closed-form reduced curvature = central-difference curvature, relative",
        fd_pts,
        FD_TOL,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (a, f) = four_fields(&loc, seed, 2, k);
            let closed = loc.reduced_curvature_closed(&f[0], &f[1], &f[2], &f[3])?;
            let fd = reduced_curvature_fd(st, z, |l, j| linear_field(l, &a[j]), FD_STEP)?;
            Ok(rel_diff(closed, fd))
        },
    ));

    if kahler {
        out.push(sweep_check(
            &name("kahler_symmetry"),
            "R(X,Y,Z,W) = R(Z,W,X,Y) = -R(X,Y,W,Z), relative",
            &pts,
            tol,
            seed,
            |k, z| {
                let loc = st.at(z)?;
                let (_, f) = four_fields(&loc, seed, 2, k);
                let r = |a: usize, b: usize, c: usize, d: usize| loc.reduced_curvature_closed(&f[a], &f[b], &f[c], &f[d]);
                let base = r(0, 1, 2, 3)?;
                let pair = r(2, 3, 0, 1)?;
                let anti = r(0, 1, 3, 2)?;
                Ok(rel_diff(base, pair).max(rel_diff(base, -anti)))
            },
        ));
    }

    out.push(sweep_check(
        &name("relative_curvature"),
        "definition, -2 T^{ab} g(nabla^-_{X+} Y-, V_b^-) and the ambient formula agree; definition is vertical",
        &pts,
        RELATIVE_TOL,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 3, k);
            let (def, vres) = loc.relative_curvature_def(&f[0], &f[1])?;
            let xp = loc.hor(Sign::Plus, &f[0])?;
            let ym = loc.hor(Sign::Minus, &f[1])?;
            let form = loc.relative_curvature_formula(&xp, &ym)?;
            let mut r = point_rng(seed, 4, k);
            let e: Vec<Vec<C>> = random_matrix(&mut r, 2 * loc.n()).into_iter().take(2).collect();
            let amb = loc.relative_curvature_ambient(&xp, &ym, &e[0], &e[1])?;
            let mut worst = vres;
            for a in 0..def.len() {
                worst = worst.max((def[a] - form[a]).norm()).max((def[a] - amb[a]).norm()).max((form[a] - amb[a]).norm());
            }
            Ok(worst)
        },
    ));

    out.push(sweep_check(
        &name("metric_lifts_agree"),
        "reduced metric through tau+ = through tau-",
        &pts,
        tol,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 5, k);
            Ok(loc.reduced_metric_mismatch(&f[0], &f[1])?.norm())
        },
    ));
    out.push(sweep_check(
        &name("metric_compatible"),
        "reduced nabla+ and nabla- preserve the reduced metric",
        &pts,
        tol,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 5, k);
            let p = loc.reduced_metric_defect(Sign::Plus, &f[0], &f[1], &f[2])?;
            let m = loc.reduced_metric_defect(Sign::Minus, &f[0], &f[1], &f[2])?;
            Ok(p.norm().max(m.norm()))
        },
    ));
    out.push(sweep_check(
        &name("bismut_pair"),
        "g~(nabla~+_X Y - nabla~-_X Y, Z) = H~(X, Y, Z)",
        &pts,
        tol,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 5, k);
            Ok(loc.bismut_pair_defect(&f[0], &f[1], &f[2])?.norm())
        },
    ));
    out.push(sweep_check(
        &name("torsion"),
        "torsion of reduced nabla+- is +-H~",
        &pts,
        tol,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 5, k);
            let p = loc.torsion_defect(Sign::Plus, &f[0], &f[1], &f[2])?;
            let m = loc.torsion_defect(Sign::Minus, &f[0], &f[1], &f[2])?;
            Ok(p.norm().max(m.norm()))
        },
    ));
    out.push(sweep_check(
        &name("curvature_form"),
        "Omega_+(X+, Y+) = -theta_+([X+, Y+])",
        &pts,
        tol,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 6, k);
            Ok(loc.omega_theta_defect(&f[0], &f[1])?.iter().map(|x| x.norm()).fold(0.0, f64::max))
        },
    ));
    out.push(sweep_check(
        &name("submanifold_extension"),
        "submanifold connection does not depend on the extension off the level set",
        &pts,
        tol,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let (_, f) = four_fields(&loc, seed, 7, k);
            let x = loc.hor(Sign::Minus, &f[0])?;
            let y = loc.hor(Sign::Minus, &f[1])?;
            let mut r = point_rng(seed, 8, k);
            let e = random_matrix(&mut r, 2 * loc.n());
            let (xe, ye) = extend(&loc, &x, &y, &e[0], &e[1]);
            let a = values(&loc.submanifold_bismut(&x, &y)?);
            let b = values(&loc.submanifold_bismut(&xe, &ye)?);
            Ok(a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max))
        },
    ));
    out
}

/// `X + sigma E1`, `Y + sigma E2` for each defining function `sigma`.
fn extend(loc: &Local, x: &[crate::jet::Jet], y: &[crate::jet::Jet], e1: &[C], e2: &[C]) -> (Field, Field) {
    let mut xe = x.to_vec();
    let mut ye = y.to_vec();
    for al in 0..loc.codim() {
        let s = loc.constraint(al);
        let c1 = loc.constant_field(e1);
        let c2 = loc.constant_field(e2);
        for k in 0..xe.len() {
            xe[k] = &xe[k] + &(&c1[k] * s);
            ye[k] = &ye[k] + &(&c2[k] * s);
        }
    }
    (xe, ye)
}

fn graph_check(seed: u64) -> Check {
    timed(|| {
        let name = "reduction.bismut_graphs";
        let formula = "tangent part of the V+- projection of [s-+(X), s+-(Y)]_H = (nabla +- g^{-1}H/2)_X Y, exactly";
        let mut r = point_rng(seed, 0x9a, 0);
        let n = 2;
        let mut bad = Vec::new();
        let mut seen = Vec::new();
        for k in 0..GRAPH_METRICS {
            let g = crate::sample::real_metric(&mut r, n, 1);
            let h = crate::sample::form(&mut r, n, 2, 1).d();
            let built = TwistH::new(h).and_then(|h| GenMetric::new(n, g, Form::zero(n), h));
            match built {
                Ok(gm) => {
                    let m = graph_bismut_mismatches(&gm);
                    if m != 0 {
                        bad.push(format!("metric #{k}: {m} entries differ"));
                    }
                    seen.push(Witness::note(format!("metric #{k}: {} nonconstant entries", count_nonconstant(&gm))));
                }
                Err(e) => bad.push(format!("metric #{k}: {e}")),
            }
        }
        Check::exact(name, formula, (!bad.is_empty()).then(|| bad.join("; "))).with_witnesses(seen)
    })
}

fn count_nonconstant(gm: &GenMetric) -> usize {
    gm.g().iter().flatten().filter(|x| x.to_poly().map_or(true, |p| !p.is_constant())).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::RunConfig;

    #[test]
    fn pinned_tolerances_ignore_the_configured_one() {
        let mut cfg = RunConfig::default_for(3).unwrap();
        cfg.points = 2;
        cfg.tol = 1e-3;
        let checks = run(&Context::new(cfg)).unwrap();
        assert!(checks.iter().all(|c| c.passed()), "{checks:?}");
        let h = checks.iter().find(|c| c.name == "reduction.deformed.h_tilde").unwrap();
        assert_eq!(h.tolerance, Some(H_TOL));
        let r = checks.iter().find(|c| c.name == "reduction.deformed.relative_curvature").unwrap();
        assert_eq!(r.tolerance, Some(RELATIVE_TOL));
    }
}
