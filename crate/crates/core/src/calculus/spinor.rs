use std::fmt;

use super::Form;
use crate::algebra::{RatFunc, Scalar};
use crate::courant::GSection;
use crate::error::{Error, Result};

/// Inhomogeneous form acted on by Clifford multiplication.
#[derive(Clone, Debug, PartialEq)]
pub struct Spinor(pub Form);

impl Spinor {
    pub fn form(&self) -> &Form {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn part(&self, k: u32) -> Form {
        self.0.part(k)
    }
}

impl From<Form> for Spinor {
    fn from(f: Form) -> Self {
        Spinor(f)
    }
}

impl fmt::Display for Spinor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `(X + xi) . phi = i_X phi + xi ^ phi`.
///
/// With this action `s.s.phi` is `<s,s>` in the half-weight pairing, that is
/// half of `xi(X) + xi(X)`.
pub fn clifford(s: &GSection, phi: &Spinor) -> Spinor {
    Spinor(&phi.0.interior(s.vector()) + &s.form().wedge(&phi.0))
}

/// Bivector `sum c_k a_k ^ b_k` of generalized sections.
#[derive(Clone, Debug, Default)]
pub struct Bivector {
    pub terms: Vec<(Scalar, GSection, GSection)>,
}

impl Bivector {
    pub fn new() -> Self {
        Bivector::default()
    }

    pub fn wedge(c: Scalar, a: GSection, b: GSection) -> Self {
        Bivector {
            terms: vec![(c, a, b)],
        }
    }

    pub fn scale(&self, s: &Scalar) -> Bivector {
        Bivector {
            terms: self
                .terms
                .iter()
                .map(|(c, a, b)| (c * s, a.clone(), b.clone()))
                .collect(),
        }
    }

    /// Spinor action: `a ^ b` acts as `(a.b - b.a)/2`.
    pub fn act(&self, phi: &Spinor) -> Spinor {
        let n = phi.0.n();
        let mut out = Form::zero(n);
        let half = Scalar::from_ratio(1, 2);
        for (c, a, b) in &self.terms {
            let ab = clifford(a, &clifford(b, phi)).0;
            let ba = clifford(b, &clifford(a, phi)).0;
            out = &out + &(&ab - &ba).scale(&(c * &half));
        }
        Spinor(out)
    }
}

/// `exp(-eps) . phi` by its power series, which must terminate within
/// `2n` steps.
pub fn exp_bivector_action(eps: &Bivector, phi: &Spinor) -> Result<Spinor> {
    let n = phi.0.n();
    let bound = 2 * n;
    let mut acc = phi.0.clone();
    let mut term = phi.clone();
    for k in 1..=bound + 1 {
        term = eps.act(&term);
        if term.is_zero() {
            return Ok(Spinor(acc));
        }
        if k > bound {
            break;
        }
        // term now holds eps^k phi / (k-1)!; divide by k and apply the sign.
        let f = Scalar::from_ratio(if k % 2 == 1 { -1 } else { 1 }, 1);
        term = Spinor(term.0.scale(&Scalar::from_ratio(1, k as i64)));
        acc = &acc + &term.0.scale(&f);
    }
    Err(Error::NonTerminating { bound })
}

/// Convenience: the constant spinor `1`.
pub fn unit_spinor(n: usize) -> Spinor {
    Spinor(Form::function(RatFunc::one(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::VectorField;

    #[test]
    fn e0_on_top_form() {
        let n = 3;
        let phi = Spinor(Form::dz(n, 0).wedge(&Form::dz(n, 1)).wedge(&Form::dz(n, 2)));
        let e0 = GSection::new(VectorField::d_z(n, 0), Form::dzb(n, 0));
        let out = clifford(&e0, &phi);
        let expect = &Form::dz(n, 1).wedge(&Form::dz(n, 2)) + &Form::dzb(n, 0).wedge(&phi.0);
        assert_eq!(out.0, expect);
    }

    #[test]
    fn f0_on_one() {
        let n = 3;
        let f0 = GSection::new(VectorField::d_z(n, 0), -&Form::dzb(n, 0));
        assert_eq!(clifford(&f0, &unit_spinor(n)).0, -&Form::dzb(n, 0));
    }

    #[test]
    fn zero_bivector_is_identity() {
        let n = 2;
        let phi = Spinor(Form::dz(n, 0));
        assert_eq!(exp_bivector_action(&Bivector::new(), &phi).unwrap(), phi);
    }
}
