//! The generalized tangent bundle `TM + T*M`: pairing, twisted bracket,
//! B-field transforms, frames and projections.

mod frame;
mod section_parse;

pub use frame::{expand_in_frame, generic_values, project_onto, project_onto_at, FrameBundle, Projection, EXACT_DIM_LIMIT};
pub use section_parse::parse_section;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::algebra::{NumericPoint, RatFunc, Scalar};
use crate::calculus::{Form, VectorField};
use crate::error::{Error, Result};

/// Weight of the natural pairing. `Full` is `xi(Y) + eta(X)`; `Half` is
/// half of that, the weight for which Clifford multiplication squares to
/// the pairing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairingConvention {
    #[default]
    Full,
    Half,
}

/// Section `X + xi` of the generalized tangent bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct GSection {
    v: VectorField,
    xi: Form,
}

impl GSection {
    pub fn new(v: VectorField, xi: Form) -> Self {
        assert_eq!(v.n(), xi.n(), "chart mismatch");
        assert!(
            xi.is_zero() || xi.degree() == Some(1),
            "form part must be a 1-form"
        );
        GSection { v, xi }
    }

    pub fn zero(n: usize) -> Self {
        GSection::new(VectorField::zero(n), Form::zero(n))
    }

    pub fn from_vector(v: VectorField) -> Self {
        let n = v.n();
        GSection::new(v, Form::zero(n))
    }

    pub fn from_form(xi: Form) -> Self {
        let n = xi.n();
        GSection::new(VectorField::zero(n), xi)
    }

    /// Section from its `4n` components (vector part first).
    pub fn from_comps(n: usize, c: &[RatFunc]) -> Self {
        assert_eq!(c.len(), 4 * n);
        GSection::new(
            VectorField::from_comps(n, c[..2 * n].to_vec()),
            Form::one_form(n, c[2 * n..].to_vec()),
        )
    }

    pub fn comps(&self) -> Vec<RatFunc> {
        let mut c = self.v.comps().to_vec();
        c.extend(self.xi.one_form_comps());
        c
    }

    pub fn n(&self) -> usize {
        self.v.n()
    }

    pub fn vector(&self) -> &VectorField {
        &self.v
    }

    /// Anchor map.
    pub fn anchor(&self) -> &VectorField {
        &self.v
    }

    pub fn form(&self) -> &Form {
        &self.xi
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero() && self.xi.is_zero()
    }

    pub fn scale(&self, s: &Scalar) -> GSection {
        GSection {
            v: self.v.scale(s),
            xi: self.xi.scale(s),
        }
    }

    pub fn mul_fn(&self, f: &RatFunc) -> GSection {
        GSection {
            v: self.v.mul_fn(f),
            xi: self.xi.mul_fn(f),
        }
    }

    pub fn conj(&self) -> GSection {
        GSection {
            v: self.v.conj(),
            xi: self.xi.conj(),
        }
    }

    pub fn eval(&self, p: &NumericPoint) -> Result<Vec<Complex64>> {
        self.comps()
            .iter()
            .map(|c| c.eval(p).map_err(Error::from))
            .collect()
    }

    /// `E_i = d/dz_i + dzb_i`.
    pub fn e(n: usize, i: usize) -> Self {
        GSection::new(VectorField::d_z(n, i), Form::dzb(n, i))
    }

    /// `F_i = d/dz_i - dzb_i`.
    pub fn f(n: usize, i: usize) -> Self {
        GSection::new(VectorField::d_z(n, i), -&Form::dzb(n, i))
    }

    pub fn e_bar(n: usize, i: usize) -> Self {
        GSection::e(n, i).conj()
    }

    pub fn f_bar(n: usize, i: usize) -> Self {
        GSection::f(n, i).conj()
    }

    /// The frame `E_i, F_i, Eb_i, Fb_i` of the complexified bundle.
    pub fn standard_frame(n: usize) -> Vec<GSection> {
        let mut out = Vec::with_capacity(4 * n);
        out.extend((0..n).map(|i| GSection::e(n, i)));
        out.extend((0..n).map(|i| GSection::f(n, i)));
        out.extend((0..n).map(|i| GSection::e_bar(n, i)));
        out.extend((0..n).map(|i| GSection::f_bar(n, i)));
        out
    }
}

impl fmt::Display for GSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.v.is_zero(), self.xi.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.v),
            (true, false) => write!(f, "{}", self.xi),
            (false, false) => write!(f, "{} + {}", self.v, self.xi),
        }
    }
}

impl<'a> Add<&'a GSection> for &'a GSection {
    type Output = GSection;
    fn add(self, o: &GSection) -> GSection {
        GSection {
            v: &self.v + &o.v,
            xi: &self.xi + &o.xi,
        }
    }
}

impl<'a> Sub<&'a GSection> for &'a GSection {
    type Output = GSection;
    fn sub(self, o: &GSection) -> GSection {
        GSection {
            v: &self.v - &o.v,
            xi: &self.xi - &o.xi,
        }
    }
}

impl Neg for &GSection {
    type Output = GSection;
    fn neg(self) -> GSection {
        GSection {
            v: -&self.v,
            xi: -&self.xi,
        }
    }
}

/// Linear combination `sum c_k s_k`.
pub fn combine(n: usize, coeffs: &[RatFunc], secs: &[GSection]) -> GSection {
    let mut acc = GSection::zero(n);
    for (c, s) in coeffs.iter().zip(secs) {
        if !c.is_zero() {
            acc = &acc + &s.mul_fn(c);
        }
    }
    acc
}

/// `<X + xi, Y + eta> = xi(Y) + eta(X)`.
pub fn pairing(a: &GSection, b: &GSection) -> RatFunc {
    &a.xi.pair(&b.v) + &b.xi.pair(&a.v)
}

pub fn pairing_with(a: &GSection, b: &GSection, conv: PairingConvention) -> RatFunc {
    let p = pairing(a, b);
    match conv {
        PairingConvention::Full => p,
        PairingConvention::Half => p.scale(&Scalar::from_ratio(1, 2)),
    }
}

/// Closed 3-form twisting the bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistH {
    h: Form,
}

impl TwistH {
    pub fn new(h: Form) -> Result<Self> {
        if !(h.is_zero() || h.degree() == Some(3)) {
            return Err(Error::Other("twist must be a 3-form".into()));
        }
        let dh = h.d();
        if !dh.is_zero() {
            return Err(Error::NotClosed(dh.to_string()));
        }
        Ok(TwistH { h })
    }

    pub fn zero(n: usize) -> Self {
        TwistH { h: Form::zero(n) }
    }

    pub fn form(&self) -> &Form {
        &self.h
    }
}

/// `[X+xi, Y+eta]_H = [X,Y] + L_X eta - i_Y d xi + i_Y i_X H`.
pub fn courant_bracket(a: &GSection, b: &GSection, h: &TwistH) -> GSection {
    let v = a.v.bracket(&b.v);
    let mut xi = &b.xi.lie_derivative(&a.v) - &a.xi.d().interior(&b.v);
    if !h.h.is_zero() {
        xi = &xi + &h.h.interior(&a.v).interior(&b.v);
    }
    GSection { v, xi }
}

/// `e^B (X + xi) = X + xi + i_X B`.
pub fn b_transform(b: &Form, a: &GSection) -> GSection {
    GSection {
        v: a.v.clone(),
        xi: &a.xi + &b.interior(&a.v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;

    #[test]
    fn standard_pairings() {
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let ee = pairing(&GSection::e(n, i), &GSection::e_bar(n, j));
                let ef = pairing(&GSection::e(n, i), &GSection::f(n, j));
                let expect = if i == j { 2 } else { 0 };
                assert_eq!(ee, RatFunc::from_int(n, expect));
                assert!(ef.is_zero());
            }
        }
    }

    #[test]
    fn constant_bracket_vanishes() {
        let n = 3;
        let h = TwistH::zero(n);
        assert!(courant_bracket(&GSection::e(n, 0), &GSection::f(n, 0), &h).is_zero());
    }

    #[test]
    fn twist_must_be_closed() {
        let n = 2;
        let z = RatFunc::from_poly(Poly::zb(n, 0));
        let h = Form::dz(n, 0)
            .wedge(&Form::dz(n, 1))
            .wedge(&Form::dzb(n, 1))
            .mul_fn(&z);
        assert!(matches!(TwistH::new(h), Err(Error::NotClosed(_))));
    }

    #[test]
    fn half_convention() {
        let n = 1;
        let e = GSection::e(n, 0);
        let eb = GSection::e_bar(n, 0);
        assert_eq!(pairing_with(&e, &eb, PairingConvention::Half), RatFunc::one(n));
    }
}
