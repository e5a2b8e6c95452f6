//! Pointwise checks of the deformed structure on the sphere: the
//! Hamiltonian condition, the type of the curvature of `tau+-`, and the
//! relative curvature on mixed (0,1) pairs.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::{DeformedFrames, DeformedSource};
use crate::algebra::{sphere_moment, Poly, RatFunc};
use crate::calculus::{rotation_field, Form};
use crate::error::Result;
use crate::jet::Jet;
use crate::metric::{GenMetric, Sign};
use crate::reduction::local::{norm, values, Field};
use crate::reduction::{ExactMetric, Local, MetricSource, Setup};

type C = Complex64;

/// The circle action with zero form part, cut down to the unit sphere.
pub fn circle_setup(source: Arc<dyn MetricSource>) -> Setup {
    let n = source.n();
    Setup {
        source,
        h0: Form::zero(n),
        gens: vec![(rotation_field(n), Form::zero(n))],
        constraints: vec![sphere_moment(n)],
    }
}

pub fn deformed_setup(df: &DeformedFrames) -> Setup {
    circle_setup(Arc::new(DeformedSource::new(df)))
}

pub fn flat_setup(n: usize) -> Setup {
    circle_setup(Arc::new(ExactMetric(GenMetric::flat(n))))
}

/// The real invariant 1-form `zb0 z1 dz2 + z0 zb1 dzb2`. Its derivative has
/// a (2,0) part, so adding it to the form part of the action breaks the type
/// condition at order one, not just at order lambda.
pub fn xi_perturbation(n: usize) -> Form {
    let c = |p: Poly| RatFunc::from_poly(p);
    let a = &Poly::zb(n, 0) * &Poly::z(n, 1);
    let b = &Poly::z(n, 0) * &Poly::zb(n, 1);
    &Form::dz(n, 2).mul_fn(&c(a)) + &Form::dzb(n, 2).mul_fn(&c(b))
}

/// Random complex `n x n` matrix with Gaussian entries.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<C>> {
    (0..n)
        .map(|_| {
            (0..n)
                .map(|_| C::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal)))
                .collect()
        })
        .collect()
}

/// The real invariant field `sum_jk a_jk z_j d/dz_k + conj`.
pub fn linear_field(loc: &Local, a: &[Vec<C>]) -> Field {
    let n = loc.n();
    let vars = loc.vars();
    let sp = loc.space();
    let mut out = vec![Jet::zero(sp, 3); 2 * n];
    for k in 0..n {
        for j in 0..n {
            out[k] = &out[k] + &vars[j].scale(a[j][k]);
            out[k + n] = &out[k + n] + &vars[j + n].scale(a[j][k].conj());
        }
    }
    out
}

fn gradient(loc: &Local, f: &Poly) -> Field {
    let j = loc.function(&RatFunc::from_poly(f.clone()));
    (0..2 * loc.n()).map(|u| j.deriv(u)).collect()
}

/// Norms of `J+ V+ + g^{-1} d mu` and `J- V- + g^{-1} d mu` at the point.
pub fn hamiltonian_residuals(loc: &Local, mu: &Poly) -> Result<[f64; 2]> {
    let grad = loc.sharp(&gradient(loc, mu));
    let mut out = [0.0; 2];
    for (k, s) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
        let jv = loc.apply_j(s, &loc.vs(s, 0))?;
        let r: Vec<C> = values(&jv).iter().zip(values(&grad)).map(|(a, b)| a + b).collect();
        out[k] = norm(&r);
    }
    Ok(out)
}

/// `d xi^+ (X+^{1,0}, Y+^{1,0})` and `d xi^- (X-^{1,0}, Y-^{1,0})` on the
/// lifts of two base fields.
pub fn type_11_residuals(loc: &Local, x0: &[Jet], y0: &[Jet]) -> Result<[C; 2]> {
    let mut out = [C::new(0.0, 0.0); 2];
    for (k, s) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
        let x = loc.type_part(s, &loc.hor(s, x0)?, false)?;
        let y = loc.type_part(s, &loc.hor(s, y0)?, false)?;
        out[k] = loc.d1(&loc.xis(s, 0), &x, &y).value();
    }
    Ok(out)
}

/// Relative curvature and `d mu (nabla^-_X Y)` for `X` in `tau+^{0,1}` and
/// `Y` in `tau-^{0,1}`.
#[derive(Clone, Debug)]
pub struct Holomorphy {
    pub r: Vec<C>,
    pub dmu_nabla: C,
}

impl Holomorphy {
    pub fn max_abs(&self) -> f64 {
        self.r.iter().map(|x| x.norm()).fold(self.dmu_nabla.norm(), f64::max)
    }
}

pub fn holomorphy_residual(loc: &Local, x0: &[Jet], y0: &[Jet]) -> Result<Holomorphy> {
    let x = loc.type_part(Sign::Plus, &loc.hor(Sign::Plus, x0)?, true)?;
    let y = loc.type_part(Sign::Minus, &loc.hor(Sign::Minus, y0)?, true)?;
    let r = loc.relative_curvature_formula(&x, &y)?;
    let nab = loc.cov(Sign::Minus, &x, &y);
    let dmu = loc.dconstraint(0);
    let dmu_nabla = loc.pair(dmu, &nab).value();
    Ok(Holomorphy { r, dmu_nabla })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;
    use crate::gk::{deformed_frames, Deformation};
    use crate::metric::Sign;
    use crate::reduction::local::reduced_curvature_fd;
    use crate::sample;

    fn tenth() -> Scalar {
        Scalar::from_ratio(1, 10)
    }

    #[test]
    fn deformed_point_checks() {
        let d = Deformation::solution_ii(tenth());
        let df = deformed_frames(&d, false).unwrap();
        let st = deformed_setup(&df);
        let mut r = sample::rng(5);
        let z = sample::sphere_point(&mut r, 3);
        let loc = st.at(&z).unwrap();
        let mu = sphere_moment(3);
        let ham = hamiltonian_residuals(&loc, &mu).unwrap();
        let bad = &mu + &(&Poly::z(3, 0) * &Poly::zb(3, 1));
        let ham_bad = hamiltonian_residuals(&loc, &bad).unwrap();
        eprintln!("ham {ham:?} bad {ham_bad:?}");
        let a: Vec<Vec<Vec<C>>> = (0..4).map(|_| random_matrix(&mut r, 3)).collect();
        let fs: Vec<Field> = a.iter().map(|m| linear_field(&loc, m)).collect();
        let t11 = type_11_residuals(&loc, &fs[0], &fs[1]).unwrap();
        eprintln!("t11 {t11:?}");
        let hol = holomorphy_residual(&loc, &fs[0], &fs[1]).unwrap();
        eprintln!("hol {hol:?}");
        let hg = loc.reduced_h_gamma(&fs[0], &fs[1], &fs[2]).unwrap();
        let ho = loc.reduced_h_omega(&fs[0], &fs[1], &fs[2]).unwrap();
        eprintln!("H gamma {hg} omega {ho}");
        let direct = loc.reduced_curvature_direct(&fs[0], &fs[1], &fs[2]).unwrap();
        let wm = loc.hor(Sign::Minus, &fs[3]).unwrap();
        let dv = loc.inner(&direct, &wm).value();
        let cf = loc.reduced_curvature_closed(&fs[0], &fs[1], &fs[2], &fs[3]).unwrap();
        eprintln!("curv direct {dv} closed {cf}");
        let (ra, res) = loc.relative_curvature_def(&fs[0], &fs[1]).unwrap();
        let xp = loc.hor(Sign::Plus, &fs[0]).unwrap();
        let ym = loc.hor(Sign::Minus, &fs[1]).unwrap();
        let rf = loc.relative_curvature_formula(&xp, &ym).unwrap();
        let amb = loc.relative_curvature_ambient(&xp, &ym, &[C::new(0.3, 0.1); 6], &[C::new(-0.2, 0.5); 6]).unwrap();
        eprintln!("rel def {ra:?} res {res} formula {rf:?} ambient {amb:?}");
        assert!(ham[0] < 1e-9 && ham[1] < 1e-9);
    }

    #[test]
    fn reduced_connection_self_consistency() {
        let d = Deformation::solution_ii(tenth());
        let df = deformed_frames(&d, false).unwrap();
        for st in [flat_setup(3), deformed_setup(&df)] {
            let mut r = sample::rng(9);
            let z = sample::sphere_point(&mut r, 3);
            let loc = st.at(&z).unwrap();
            let a: Vec<Vec<Vec<C>>> = (0..4).map(|_| random_matrix(&mut r, 3)).collect();
            let fs: Vec<Field> = a.iter().map(|m| linear_field(&loc, m)).collect();
            let mm = loc.reduced_metric_mismatch(&fs[0], &fs[1]).unwrap();
            let md = loc.reduced_metric_defect(Sign::Minus, &fs[0], &fs[1], &fs[2]).unwrap();
            let mp = loc.reduced_metric_defect(Sign::Plus, &fs[0], &fs[1], &fs[2]).unwrap();
            let bp = loc.bismut_pair_defect(&fs[0], &fs[1], &fs[2]).unwrap();
            let tp = loc.torsion_defect(Sign::Plus, &fs[0], &fs[1], &fs[2]).unwrap();
            let tm = loc.torsion_defect(Sign::Minus, &fs[0], &fs[1], &fs[2]).unwrap();
            let ot = loc.omega_theta_defect(&fs[0], &fs[1]).unwrap();
            let dv = loc.reduced_curvature_direct_value(&fs[0], &fs[1], &fs[2], &fs[3]).unwrap();
            let fd = reduced_curvature_fd(&st, &z, |l, k| linear_field(l, &a[k]), 1e-5).unwrap();
            eprintln!("mm {mm} md {md} mp {mp} bp {bp} tp {tp} tm {tm} ot {ot:?} direct {dv} fd {fd}");
            for v in [mm, md, mp, bp, tp, tm] {
                assert!(v.norm() < 1e-9, "{v}");
            }
            assert!(ot.iter().all(|v| v.norm() < 1e-9));
            assert!((dv - fd).norm() < 1e-5 * (1.0 + dv.norm()), "{dv} {fd}");
        }
    }
}

