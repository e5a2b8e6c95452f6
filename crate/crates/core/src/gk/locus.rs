//! Type-jumping locus of the deformed pure spinor `exp(-eps) . dz0..dz_{n-1}`
//! after contraction with the circle generator.

use super::Deformation;
use crate::algebra::{Poly, RatFunc, Scalar};
use crate::calculus::{exp_bivector_action, rotation_field, Form, Spinor};
use crate::error::{Error, Result};

/// `dz0 ^ .. ^ dz_{n-1}`.
pub fn top_holomorphic(n: usize) -> Spinor {
    Spinor((0..n).fold(Form::function(RatFunc::one(n)), |acc, i| acc.wedge(&Form::dz(n, i))))
}

/// Degree-0 part of `i_{d_theta} (exp(-eps) . phi)`, or `None` when it
/// vanishes identically (no type jumping).
pub fn type_locus(d: &Deformation) -> Result<Option<Poly>> {
    let n = d.n();
    let phi = exp_bivector_action(&d.bivector(), &top_holomorphic(n))?;
    if phi.is_zero() {
        return Err(Error::Other("deformed spinor vanishes".into()));
    }
    let rho = phi.form().interior(&rotation_field(n)).part(0).coeff(0);
    if rho.is_zero() {
        return Ok(None);
    }
    rho.to_poly()
        .map(Some)
        .ok_or_else(|| Error::Other(format!("locus {rho} is not polynomial")))
}

/// `z0 (f1 - f2) + z1 (f2 - f0) + z2 (f0 - f1)` with the scaled `f`.
pub fn displayed_cubic(d: &Deformation) -> Poly {
    let n = d.n();
    assert_eq!(n, 3, "the displayed cubic is for C^3");
    let f = d.scaled_f();
    let z = |i| Poly::z(n, i);
    let t0 = &z(0) * &(&f[1] - &f[2]);
    let t1 = &z(1) * &(&f[2] - &f[0]);
    let t2 = &z(2) * &(&f[0] - &f[1]);
    &(&t0 + &t1) + &t2
}

/// `det(z; lambda f; g)`: the cubic for arbitrary `g`, equal to
/// [`displayed_cubic`] when all `g_i = 1`.
pub fn general_cubic(d: &Deformation) -> Poly {
    let n = d.n();
    assert_eq!(n, 3, "the determinant cubic is for C^3");
    let f = d.scaled_f();
    let z: Vec<Poly> = (0..n).map(|i| Poly::z(n, i)).collect();
    let rows = [z, f, d.g().to_vec()];
    crate::algebra::det_poly(&rows)
}

/// Constant `c` with `a = c b`, if there is one.
pub fn proportionality(a: &Poly, b: &Poly) -> Option<Scalar> {
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let q = a.div_exact(b)?;
    q.constant_value().filter(|c| !c.is_zero())
}

/// Outcome of comparing the spinor locus with the cubic formulas.
#[derive(Clone, Debug)]
pub struct LocusCheck {
    pub locus: Option<Poly>,
    /// `locus = c * displayed cubic`.
    pub displayed_ratio: Option<Scalar>,
    /// `locus = c * det(z; f; g)`.
    pub general_ratio: Option<Scalar>,
}

pub fn check_locus(d: &Deformation) -> Result<LocusCheck> {
    let locus = type_locus(d)?;
    let (displayed_ratio, general_ratio) = match &locus {
        Some(p) if d.n() == 3 => (
            proportionality(p, &displayed_cubic(d)),
            proportionality(p, &general_cubic(d)),
        ),
        _ => (None, None),
    };
    Ok(LocusCheck {
        locus,
        displayed_ratio,
        general_ratio,
    })
}

/// `(z0 - z1)(z1 - z2)(z2 - z0)`.
pub fn three_lines() -> Poly {
    let n = 3;
    let z = |i| Poly::z(n, i);
    &(&(&z(0) - &z(1)) * &(&z(1) - &z(2))) * &(&z(2) - &z(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undeformed_has_no_locus() {
        assert_eq!(type_locus(&Deformation::undeformed(3)).unwrap(), None);
    }

    #[test]
    fn solution_ii_locus_is_three_lines() {
        let d = Deformation::solution_ii(Scalar::from_ratio(1, 10));
        let p = type_locus(&d).unwrap().unwrap();
        let c = p.div_exact(&three_lines()).unwrap();
        assert!(c.is_constant() && !c.is_zero());
        let chk = check_locus(&d).unwrap();
        assert!(chk.displayed_ratio.is_some());
        assert!(chk.general_ratio.is_some());
    }

    #[test]
    fn solution_i_locus_follows_determinant() {
        let d = Deformation::solution_i(Scalar::one());
        let chk = check_locus(&d).unwrap();
        let p = chk.locus.clone().unwrap();
        let z0 = Poly::z(3, 0);
        assert!(proportionality(&p, &(&(&z0 * &z0) * &Poly::z(3, 1))).is_some());
        assert!(chk.general_ratio.is_some());
        // The g = 1 formula gives z0^2 (z2 - z1) instead.
        assert!(chk.displayed_ratio.is_none());
    }

    #[test]
    fn random_integrable_loci_match_cubic() {
        let mut r = crate::sample::rng(11);
        for _ in 0..3 {
            let d = Deformation::random_difference_quadratics(&mut r, 3, Scalar::one());
            let chk = check_locus(&d).unwrap();
            assert!(chk.displayed_ratio.is_some(), "{:?}", chk);
        }
    }
}
