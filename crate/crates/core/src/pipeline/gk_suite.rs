use std::sync::Arc;

use super::{describe, point_rng, timed, Check, Context, Kind, Witness};
use crate::algebra::{Poly, Scalar};
use crate::error::{Error, Result};
use crate::gk::checks::{hamiltonian_residuals, holomorphy_residual, linear_field, random_matrix, type_11_residuals, xi_perturbation};
use crate::gk::locus::{check_locus, proportionality, three_lines};
use crate::gk::{extract_bihermitian, mc_residual, Deformation};
use crate::reduction::local::Field;

/// Random invariant field pairs per point.
const PAIRS_PER_POINT: usize = 3;

pub fn run(ctx: &Context) -> Result<Vec<Check>> {
    let cfg = &ctx.cfg;
    let d = &cfg.deformation;
    let lambda = cfg.lambda.clone();
    let mut out = Vec::new();

    let mc = mc_residual(d);
    if !mc.is_zero() && !cfg.allow_nonintegrable {
        return Err(Error::NonIntegrable(mc.nonzero().join("; ")));
    }
    let integrable = mc.is_zero();
    out.push(timed(|| {
        let res = (!integrable).then(|| format!("{} nonzero terms: {}", mc.term_count(), describe(&mc.nonzero().join("; "))));
        Check::exact("gk.mc.config", "integrability residual of the configured deformation", res)
    }));
    for (name, def) in [
        ("gk.mc.solution_i", Deformation::solution_i(lambda.clone())),
        ("gk.mc.solution_ii", Deformation::solution_ii(lambda.clone())),
    ] {
        out.push(timed(|| {
            let r = mc_residual(&def);
            Check::exact(name, "integrability residual vanishes", (!r.is_zero()).then(|| r.nonzero().join("; ")))
        }));
    }
    out.push(timed(|| {
        let r = mc_residual(&Deformation::nonintegrable_control(lambda.clone()));
        let name = "gk.mc.negative_control";
        let formula = "f = (z0^2, z1^2, 0) has a nonzero integrability residual";
        if r.is_zero() {
            Check::exact(name, formula, Some("residual vanished".into()))
        } else {
            Check::exact(name, formula, None).with_witnesses(vec![Witness::note(format!("{} nonzero terms", r.term_count()))])
        }
    }));

    out.extend(locus_checks(ctx));

    let downstream = [
        ("gk.frames", Kind::Exact),
        ("gk.bihermitian", Kind::Exact),
        ("gk.positivity", Kind::Numeric),
        ("gk.hamiltonian", Kind::Numeric),
        ("gk.hamiltonian.negative_control", Kind::Numeric),
        ("gk.type_11", Kind::Numeric),
        ("gk.type_11.negative_control", Kind::Numeric),
        ("gk.holomorphy", Kind::Numeric),
    ];
    if !integrable {
        let why = "the configured deformation is not integrable";
        out.extend(downstream.iter().map(|&(n, k)| Check::skipped(n, "", k, why)));
        return Ok(out);
    }

    let df = ctx.frames()?;
    out.push(timed(|| {
        let c = &df.certificates;
        let res = (!c.all_hold(d.n())).then(|| format!("{c:?}"));
        Check::exact("gk.frames", "L+ and L- isotropic, mutually orthogonal, spanning with conjugates", res)
    }));
    out.push(timed(|| {
        let formula = "extracted (g, b, J+, J-): g symmetric, b antisymmetric, J^2 = -1, J orthogonal, graphs reproduce V+-";
        match extract_bihermitian(df) {
            Ok(bh) => {
                let mut bad = Vec::new();
                if !bh.g_symmetric() {
                    bad.push("g not symmetric".to_string());
                }
                if !bh.b_antisymmetric() {
                    bad.push("b not antisymmetric".into());
                }
                for (what, ok) in [("J^2", bh.j_squares_to_minus_one()), ("J compatible", bh.j_compatible()), ("graphs", bh.graphs_match(df))] {
                    if ok != [true, true] {
                        bad.push(format!("{what}: {ok:?}"));
                    }
                }
                Check::exact("gk.bihermitian", formula, (!bad.is_empty()).then(|| bad.join("; ")))
            }
            Err(e) => Check::errored("gk.bihermitian", formula, Kind::Exact, &e),
        }
    }));

    let source = ctx.source()?;
    let pts = ctx.points(cfg.points, 0x6b);
    let seed = cfg.seed;
    let positivity = timed(|| {
        let s = source.clone();
        super::control_check(
            "gk.positivity",
            "smallest eigenvalue of the deformed metric is positive",
            &pts,
            0.0,
            seed,
            move |_, z| s.min_eigen_at(z),
        )
    });
    if !positivity.passed() {
        let min = positivity.residual.as_f64().unwrap_or(f64::NAN);
        return Err(Error::Positivity { min });
    }
    out.push(positivity);

    let st = ctx.setup(source.clone());
    let mu = cfg.action.moment.clone();
    out.push(super::sweep_check(
        "gk.hamiltonian",
        "|J+ V+ + g^{-1} d mu| and |J- V- + g^{-1} d mu|",
        &pts,
        cfg.tol,
        seed,
        |_, z| {
            let loc = st.at(z)?;
            let r = hamiltonian_residuals(&loc, &mu)?;
            Ok(r[0].max(r[1]))
        },
    ));
    let n = cfg.n;
    let bad_mu = &mu + &(&Poly::z(n, 0) * &Poly::zb(n, 1.min(n - 1)));
    out.push(super::control_check(
        "gk.hamiltonian.negative_control",
        "mu + z0 zb1 violates the Hamiltonian condition",
        &pts,
        1e-3,
        seed,
        |_, z| {
            let loc = st.at(z)?;
            let r = hamiltonian_residuals(&loc, &bad_mu)?;
            Ok(r[0].max(r[1]))
        },
    ));

    let fields = |loc: &crate::reduction::Local, k: usize, salt: u64| -> Vec<Field> {
        let mut r = point_rng(seed, salt, k);
        (0..2 * PAIRS_PER_POINT).map(|_| linear_field(loc, &random_matrix(&mut r, n))).collect()
    };
    out.push(super::sweep_check(
        "gk.type_11",
        "d xi^+-(X^{1,0}, Y^{1,0}) = 0 on tau+- lifts",
        &pts,
        cfg.tol,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let fs = fields(&loc, k, 0x11);
            let mut worst: f64 = 0.0;
            for p in fs.chunks(2) {
                let r = type_11_residuals(&loc, &p[0], &p[1])?;
                worst = worst.max(r[0].norm()).max(r[1].norm());
            }
            Ok(worst)
        },
    ));
    let mut bad_st = st.clone();
    bad_st.gens[0].1 = &bad_st.gens[0].1 + &xi_perturbation(n);
    let bad_st = Arc::new(bad_st);
    out.push(super::control_check(
        "gk.type_11.negative_control",
        "adding zb0 z1 dz2 + z0 zb1 dzb2 to xi breaks the type condition",
        &pts,
        1e-3,
        seed,
        |k, z| {
            let loc = bad_st.at(z)?;
            let fs = fields(&loc, k, 0x11);
            let mut worst: f64 = 0.0;
            for p in fs.chunks(2) {
                let r = type_11_residuals(&loc, &p[0], &p[1])?;
                worst = worst.max(r[0].norm()).max(r[1].norm());
            }
            Ok(worst)
        },
    ));
    out.push(super::sweep_check(
        "gk.holomorphy",
        "R^a(X, Y) and d mu (nabla^-_X Y) vanish for X in tau+^{0,1}, Y in tau-^{0,1}",
        &pts,
        cfg.tol,
        seed,
        |k, z| {
            let loc = st.at(z)?;
            let fs = fields(&loc, k, 0x40);
            let mut worst: f64 = 0.0;
            for p in fs.chunks(2) {
                worst = worst.max(holomorphy_residual(&loc, &p[0], &p[1])?.max_abs());
            }
            Ok(worst)
        },
    ));
    Ok(out)
}

fn locus_checks(ctx: &Context) -> Vec<Check> {
    let cfg = &ctx.cfg;
    let lambda = cfg.lambda.clone();
    let mut out = Vec::new();
    let formula = "degree-0 part of i_V exp(-eps) dz0^dz1^dz2 is proportional to det(z; lambda f; g)";
    if cfg.n != 3 {
        out.push(Check::skipped("gk.type_locus.config", formula, Kind::Exact, "needs n = 3"));
    } else {
        out.push(timed(|| match check_locus(&cfg.deformation) {
            Ok(chk) => match (&chk.locus, &chk.general_ratio) {
                (None, _) if cfg.deformation.is_zero() => Check::exact("gk.type_locus.config", formula, None)
                    .with_witnesses(vec![Witness::note("no locus")]),
                (Some(p), Some(c)) => Check::exact("gk.type_locus.config", formula, None)
                    .with_witnesses(vec![Witness::note(format!("locus = {p}; ratio {c}"))]),
                _ => Check::exact("gk.type_locus.config", formula, Some(format!("{chk:?}"))),
            },
            Err(e) => Check::errored("gk.type_locus.config", formula, Kind::Exact, &e),
        }));
    }

    out.push(timed(|| {
        let name = "gk.type_locus.three_lines";
        let formula = "solution (ii) locus = c (z0 - z1)(z1 - z2)(z2 - z0), c a nonzero constant";
        match crate::gk::type_locus(&Deformation::solution_ii(lambda.clone())) {
            Ok(Some(p)) => match p.div_exact(&three_lines()) {
                Some(q) if q.is_constant() && !q.is_zero() => {
                    Check::exact(name, formula, None).with_witnesses(vec![Witness::note(format!("c = {q}"))])
                }
                _ => Check::exact(name, formula, Some(format!("locus {p} is not a constant multiple"))),
            },
            Ok(None) => Check::exact(name, formula, Some("no locus".into())),
            Err(e) => Check::errored(name, formula, Kind::Exact, &e),
        }
    }));

    out.push(timed(|| {
        let name = "gk.type_locus.solution_i";
        let formula = "solution (i) locus is proportional to z0^2 z1 = det(z; lambda f; g)";
        match check_locus(&Deformation::solution_i(lambda.clone())) {
            Ok(chk) => {
                let z0 = Poly::z(3, 0);
                let target = &(&z0 * &z0) * &Poly::z(3, 1);
                let ok = chk.locus.as_ref().and_then(|p| proportionality(p, &target)).is_some() && chk.general_ratio.is_some();
                let note = format!(
                    "g = 1 cubic z0(f1 - f2) + ... is {}proportional",
                    if chk.displayed_ratio.is_some() { "" } else { "not " }
                );
                Check::exact(name, formula, (!ok).then(|| format!("{chk:?}"))).with_witnesses(vec![Witness::note(note)])
            }
            Err(e) => Check::errored(name, formula, Kind::Exact, &e),
        }
    }));

    out.push(timed(|| {
        let name = "gk.type_locus.random";
        let formula = "for random integrable f with g = 1 the locus is proportional to z0(f1 - f2) + z1(f2 - f0) + z2(f0 - f1)";
        let mut r = point_rng(cfg.seed, 0x10c, 0);
        let mut bad = Vec::new();
        for k in 0..3 {
            let d = Deformation::random_difference_quadratics(&mut r, 3, Scalar::one());
            match check_locus(&d) {
                Ok(chk) if chk.displayed_ratio.is_some() => {}
                Ok(chk) => bad.push(format!("#{k}: {chk:?}")),
                Err(e) => bad.push(format!("#{k}: {e}")),
            }
        }
        Check::exact(name, formula, (!bad.is_empty()).then(|| bad.join("; ")))
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::RunConfig;

    #[test]
    fn names_are_unique_and_controls_fire() {
        let mut cfg = RunConfig::default_for(3).unwrap();
        cfg.points = 2;
        let checks = run(&Context::new(cfg)).unwrap();
        let mut names: Vec<_> = checks.iter().map(|c| c.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), checks.len());
        for c in checks.iter().filter(|c| c.name.ends_with("negative_control")) {
            assert!(c.passed(), "{c:?}");
        }
    }
}
