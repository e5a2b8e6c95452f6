//! The sections `A_i`, `B_j` spanning the graphs of `+-g` over `tau+-^{0,1}`
//! on the sphere in `C^3`, the `V-` parts of their brackets, and the
//! contraction of those parts with `d mu`.
//!
//! With `P_q = Eb_q + f_q F` and `Q_q = Fb_q + C` (where `F = sum F_p`,
//! `C = sum f_p E_p`), every bracket `[A_i, B_j]` lies in `L+ + L-`, so its
//! `V-` part is its `L-` part. In the coordinate frame `P_q` and `Q_q` are the
//! only sections with `d/dzb_q` or `dz_q` components: `P_q` carries `+dz_q`,
//! `Q_q` carries `-dz_q`. The `Q_q` coefficient is therefore half the
//! difference of those two components, and the split is confirmed by exact
//! reconstruction.

use num_complex::Complex64;

use super::{Deformation, DeformedFrames};
use crate::algebra::{sphere_moment, NumericPoint, Poly, RatFunc, Scalar};
use crate::calculus::{rotation_field, Form, VectorField};
use crate::courant::{combine, courant_bracket, expand_in_frame, pairing, project_onto_at, GSection, TwistH};
use crate::error::{Error, Result};

fn rf(p: Poly) -> RatFunc {
    RatFunc::from_poly(p)
}

/// Appendix sections for a deformation of `C^3` with `g_i = 1`.
#[derive(Clone, Debug)]
pub struct Appendix {
    f: Vec<Poly>,
    zbar: Poly,
    h: Poly,
    p: Vec<GSection>,
    q: Vec<GSection>,
}

pub const N: usize = 3;

impl Appendix {
    pub fn new(d: &Deformation) -> Result<Self> {
        if d.n() != N || !d.unit_g() {
            return Err(Error::Config("appendix sections need C^3 and g_i = 1".into()));
        }
        let f = d.scaled_f();
        let zbar = (0..N).fold(Poly::zero(N), |acc, q| &acc + &Poly::zb(N, q));
        let h = (0..N).fold(Poly::zero(N), |acc, q| &acc + &(&f[q] * &Poly::zb(N, q)));
        let big_f = d.f_section();
        let big_c = d.c_section();
        let p = (0..N)
            .map(|q| &GSection::e_bar(N, q) + &big_f.mul_fn(&rf(f[q].clone())))
            .collect();
        let q = (0..N).map(|q| &GSection::f_bar(N, q) + &big_c).collect();
        Ok(Appendix { f, zbar, h, p, q })
    }

    /// `Eb_q + f_q F`.
    pub fn p(&self, q: usize) -> &GSection {
        &self.p[q]
    }

    /// `Fb_q + C`.
    pub fn q(&self, q: usize) -> &GSection {
        &self.q[q]
    }

    /// `z_i + f_i zb` with `zb = sum zb_q`.
    fn a_coeff(&self, i: usize) -> Poly {
        &Poly::z(N, i) + &(&self.f[i] * &self.zbar)
    }

    /// `z_j + h` with `h = sum f_q zb_q`.
    fn b_coeff(&self, j: usize) -> Poly {
        &Poly::z(N, j) + &self.h
    }

    /// `A_i = -(z_i + f_i zb) P_0 + (z_0 + f_0 zb) P_i`.
    pub fn a(&self, i: usize) -> GSection {
        &self.p[i].mul_fn(&rf(self.a_coeff(0))) - &self.p[0].mul_fn(&rf(self.a_coeff(i)))
    }

    /// `B_j = -(z_j + h) Q_0 + (z_0 + h) Q_j`.
    pub fn b(&self, j: usize) -> GSection {
        &self.q[j].mul_fn(&rf(self.b_coeff(0))) - &self.q[0].mul_fn(&rf(self.b_coeff(j)))
    }

    /// `[P_i, Q_j]` minus `sum_q d_q f_i (Q_q - P_q)`; zero when the frame
    /// identity holds.
    pub fn frame_identity_residual(&self, i: usize, j: usize) -> GSection {
        let lhs = courant_bracket(&self.p[i], &self.q[j], &TwistH::zero(N));
        let mut rhs = GSection::zero(N);
        for q in 0..N {
            let c = rf(self.f[i].d(q));
            rhs = &rhs + &(&self.q[q] - &self.p[q]).mul_fn(&c);
        }
        &lhs - &rhs
    }

    /// Coefficients `(alpha, beta)` with `s = sum alpha_q P_q + beta_q Q_q`.
    pub fn split(&self, s: &GSection) -> Result<(Vec<RatFunc>, Vec<RatFunc>)> {
        let half = Scalar::from_ratio(1, 2);
        let v = s.vector().comps();
        let xi = s.form().one_form_comps();
        let mut alpha = Vec::with_capacity(N);
        let mut beta = Vec::with_capacity(N);
        for q in 0..N {
            let a = &v[q + N];
            let b = &xi[q];
            alpha.push((a + b).scale(&half));
            beta.push((a - b).scale(&half));
        }
        let back = &combine(N, &alpha, &self.p) + &combine(N, &beta, &self.q);
        let res = &back - s;
        if !res.is_zero() {
            return Err(Error::NotInSpan {
                residual: res.to_string(),
            });
        }
        Ok((alpha, beta))
    }

    /// `[A_i, B_j]` (untwisted).
    pub fn bracket(&self, i: usize, j: usize) -> GSection {
        courant_bracket(&self.a(i), &self.b(j), &TwistH::zero(N))
    }

    /// The `V-` part of `[A_i, B_j]`.
    pub fn bracket_minus(&self, i: usize, j: usize) -> Result<GSection> {
        let (_, beta) = self.split(&self.bracket(i, j))?;
        Ok(combine(N, &beta, &self.q))
    }

    /// Closed form of `[A_i, B_j]^-`, written with `Fb_q` only:
    /// `(z_i + f_i zb)(z_j - z_0) sum_q d_q f_0 Fb_q + 2 f_0 (z_i + f_i zb)(Fb_0 - Fb_j)
    ///  + (z_0 + f_0 zb)(z_0 - z_j) sum_q d_q f_i Fb_q + 2 f_i (z_0 + f_0 zb)(Fb_j - Fb_0)`.
    pub fn closed_form(&self, i: usize, j: usize) -> GSection {
        let fb = |q: usize| GSection::f_bar(N, q);
        let ai = self.a_coeff(i);
        let a0 = self.a_coeff(0);
        let zj0 = &Poly::z(N, j) - &Poly::z(N, 0);
        let two = Scalar::from_int(2);
        let grad = |k: usize| {
            let c: Vec<RatFunc> = (0..N).map(|q| rf(self.f[k].d(q))).collect();
            combine(N, &c, &(0..N).map(fb).collect::<Vec<_>>())
        };
        let t1 = grad(0).mul_fn(&rf(&ai * &zj0));
        let t2 = (&fb(0) - &fb(j)).mul_fn(&rf((&self.f[0] * &ai).scale(&two)));
        let t3 = grad(i).mul_fn(&rf(-&(&a0 * &zj0)));
        let t4 = (&fb(j) - &fb(0)).mul_fn(&rf((&self.f[i] * &a0).scale(&two)));
        &(&t1 + &t2) + &(&t3 + &t4)
    }

    /// `d mu` applied to the tangent part of `[A_i, B_j]^-`, exact on `C^3`.
    pub fn dmu_contraction(&self, i: usize, j: usize) -> Result<RatFunc> {
        let s = self.bracket_minus(i, j)?;
        let dmu = Form::function(rf(sphere_moment(N))).d();
        Ok(dmu.pair(s.vector()))
    }

    /// Exact membership facts for `A_i` (sign `+`) or `B_j` (sign `-`): the
    /// section lies in the deformed `L+-`, pairs to zero with the generator
    /// (horizontality), and its tangent part is tangent to the sphere.
    pub fn membership(&self, df: &DeformedFrames, s: &GSection, plus: bool) -> Membership {
        let frame = if plus { &df.l_plus } else { &df.l_minus };
        let in_frame = expand_in_frame(s, frame).is_ok();
        let v = GSection::from_vector(rotation_field(N));
        let horizontal = pairing(s, &v).is_zero();
        let dmu = Form::function(rf(sphere_moment(N))).d();
        let tangent = dmu.pair(s.vector()).is_zero();
        Membership {
            in_frame,
            horizontal,
            tangent,
        }
    }

    /// Numeric `V-` projection along `V+` at a point, for comparison with
    /// [`Appendix::bracket_minus`].
    pub fn numeric_minus_part(&self, df: &DeformedFrames, i: usize, j: usize, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let p = NumericPoint::new(z.to_vec(), 1e-12);
        project_onto_at(&self.bracket(i, j), &df.v_minus(), &df.v_plus(), &p)
    }

    /// Tangent part of `[A_i, B_j]^-` as a vector field.
    pub fn tangent_part(&self, i: usize, j: usize) -> Result<VectorField> {
        Ok(self.bracket_minus(i, j)?.vector().clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub in_frame: bool,
    pub horizontal: bool,
    pub tangent: bool,
}

impl Membership {
    pub fn holds(&self) -> bool {
        self.in_frame && self.horizontal && self.tangent
    }
}

/// `d` with `f_1` multiplied by `z_2 - z_0`. For solution (ii) this stays
/// integrable, but `f_1` is no longer homogeneous of degree 2.
pub fn corrupted(d: &Deformation) -> Deformation {
    let mut f = d.f().to_vec();
    f[1] = &f[1] * &(&Poly::z(N, 2) - &Poly::z(N, 0));
    Deformation::new(f, d.g().to_vec(), d.lambda().clone()).expect("holomorphic coefficients")
}

pub fn corrupted_solution(lambda: Scalar) -> Deformation {
    corrupted(&Deformation::solution_ii(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gk::deformed_frames;

    fn sol() -> Deformation {
        Deformation::solution_ii(Scalar::from_ratio(1, 10))
    }

    #[test]
    fn frame_bracket_identity() {
        let ap = Appendix::new(&sol()).unwrap();
        for i in 0..N {
            for j in 0..N {
                assert!(ap.frame_identity_residual(i, j).is_zero());
            }
        }
    }

    #[test]
    fn displayed_brackets_match() {
        let ap = Appendix::new(&sol()).unwrap();
        for (i, j) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let got = ap.bracket_minus(i, j).unwrap();
            assert_eq!(got, ap.closed_form(i, j), "pair ({i},{j})");
        }
    }

    #[test]
    fn all_contractions_vanish() {
        let ap = Appendix::new(&sol()).unwrap();
        for i in 1..N {
            for j in 1..N {
                assert!(ap.dmu_contraction(i, j).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn corrupted_f1_breaks_contraction() {
        let ap = Appendix::new(&corrupted_solution(Scalar::from_ratio(1, 10))).unwrap();
        assert!(!ap.dmu_contraction(1, 1).unwrap().is_zero());
    }

    #[test]
    fn sections_lie_in_frames() {
        let d = sol();
        let df = deformed_frames(&d, false).unwrap();
        let ap = Appendix::new(&d).unwrap();
        for k in 1..N {
            assert!(ap.membership(&df, &ap.a(k), true).holds());
            assert!(ap.membership(&df, &ap.b(k), false).holds());
        }
    }

    #[test]
    fn numeric_projection_agrees() {
        let d = sol();
        let df = deformed_frames(&d, false).unwrap();
        let ap = Appendix::new(&d).unwrap();
        let z = [Complex64::new(0.4, 0.2), Complex64::new(-0.5, 0.3), Complex64::new(0.1, 0.6)];
        let num = ap.numeric_minus_part(&df, 1, 1, &z).unwrap();
        let p = NumericPoint::new(z.to_vec(), 1e-12);
        let exact = ap.bracket_minus(1, 1).unwrap().eval(&p).unwrap();
        let err: f64 = num.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }
}
