use super::{describe, timed, Check, Context, Kind, Witness};
use crate::algebra::NumericPoint;
use crate::error::Result;
use crate::gk::appendix::{corrupted, Appendix, N};

const PAIRS: [(usize, usize); 4] = [(1, 1), (2, 1), (1, 2), (2, 2)];

pub fn run(ctx: &Context) -> Result<Vec<Check>> {
    let d = &ctx.cfg.deformation;
    let names = [
        "appendix.frame_identity",
        "appendix.bracket_closed_form",
        "appendix.dmu_contraction",
        "appendix.membership",
    ];
    if d.n() != N || !d.unit_g() {
        let why = "needs n = 3 and g_i = 1";
        return Ok(names.iter().map(|n| Check::skipped(n, "", Kind::Exact, why)).collect());
    }
    let ap = Appendix::new(d)?;
    let mut out = Vec::new();

    out.push(timed(|| {
        let bad: Vec<String> = (0..N)
            .flat_map(|i| (0..N).map(move |j| (i, j)))
            .filter(|&(i, j)| !ap.frame_identity_residual(i, j).is_zero())
            .map(|(i, j)| format!("({i},{j})"))
            .collect();
        let res = (!bad.is_empty()).then(|| format!("nonzero for {}", bad.join(" ")));
        Check::exact("appendix.frame_identity", "[P_i, Q_j] = sum_q d_q f_i (Q_q - P_q)", res)
    }));

    for (i, j) in PAIRS {
        out.push(timed(|| {
            let name = format!("appendix.bracket_closed_form.A{i}B{j}");
            let formula = "[A_i, B_j]^- equals its closed form term by term";
            match ap.bracket_minus(i, j) {
                Ok(got) => {
                    let diff = &got - &ap.closed_form(i, j);
                    Check::exact(&name, formula, (!diff.is_zero()).then(|| describe(&diff)))
                }
                Err(e) => Check::errored(&name, formula, Kind::Exact, &e),
            }
        }));
    }

    for (i, j) in PAIRS {
        out.push(timed(|| {
            let name = format!("appendix.dmu_contraction.A{i}B{j}");
            let formula = "d mu (tangent part of [A_i, B_j]^-) = 0 on C^3";
            match ap.dmu_contraction(i, j) {
                Ok(r) => Check::exact(&name, formula, (!r.is_zero()).then(|| describe(&r))),
                Err(e) => Check::errored(&name, formula, Kind::Exact, &e),
            }
        }));
    }

    out.push(timed(|| {
        let formula = "A_k in L+, B_k in L-, both horizontal and tangent to the sphere";
        let df = match ctx.frames() {
            Ok(df) => df,
            Err(e) => return Check::errored("appendix.membership", formula, Kind::Exact, &e),
        };
        let mut bad = Vec::new();
        for k in 1..N {
            for (label, s, plus) in [("A", ap.a(k), true), ("B", ap.b(k), false)] {
                let m = ap.membership(df, &s, plus);
                if !m.holds() {
                    bad.push(format!("{label}{k}: {m:?}"));
                }
            }
        }
        Check::exact("appendix.membership", formula, (!bad.is_empty()).then(|| bad.join("; ")))
    }));

    let pts = ctx.points(ctx.cfg.points.min(5), 0xa11);
    out.push(timed(|| {
        let formula = "exact [A_i, B_j]^- equals the numeric V- projection along V+";
        let name = "appendix.numeric_projection";
        let df = match ctx.frames() {
            Ok(df) => df,
            Err(e) => return Check::errored(name, formula, Kind::Numeric, &e),
        };
        let exact: Vec<_> = match PAIRS.iter().map(|&(i, j)| ap.bracket_minus(i, j)).collect::<Result<Vec<_>>>() {
            Ok(v) => v,
            Err(e) => return Check::errored(name, formula, Kind::Numeric, &e),
        };
        super::sweep_check(name, formula, &pts, ctx.cfg.tol, ctx.cfg.seed, |_, z| {
            let p = NumericPoint::new(z.to_vec(), 1e-12);
            let mut worst: f64 = 0.0;
            for (k, &(i, j)) in PAIRS.iter().enumerate() {
                let num = ap.numeric_minus_part(df, i, j, z)?;
                let ex = exact[k].eval(&p)?;
                let e = num.iter().zip(&ex).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                worst = worst.max(e);
            }
            Ok(worst)
        })
    }));

    out.push(timed(|| {
        let name = "appendix.negative_control";
        let formula = "f_1 times (z2 - z0) makes the d mu contraction nonzero";
        let bad = match Appendix::new(&corrupted(d)) {
            Ok(a) => a,
            Err(e) => return Check::errored(name, formula, Kind::Exact, &e),
        };
        match bad.dmu_contraction(1, 1) {
            Ok(r) if !r.is_zero() => Check::exact(name, formula, None).with_witnesses(vec![Witness::note(describe(&r))]),
            Ok(_) => Check::exact(name, formula, Some("contraction still vanishes".into())),
            Err(e) => Check::errored(name, formula, Kind::Exact, &e),
        }
    }));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::RunConfig;

    #[test]
    fn appendix_checks_pass_and_are_exact_where_expected() {
        let mut cfg = RunConfig::default_for(3).unwrap();
        cfg.points = 2;
        let checks = run(&Context::new(cfg)).unwrap();
        assert!(checks.iter().all(|c| c.passed()), "{checks:?}");
        let exact = checks.iter().filter(|c| c.name.contains("dmu_contraction")).count();
        assert_eq!(exact, 4);
    }
}
