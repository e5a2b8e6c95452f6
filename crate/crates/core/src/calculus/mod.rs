//! Exterior calculus on a single polynomial chart of `C^n`.
//!
//! Real directions are indexed `0..2n`: index `v < n` is `z_v` and `v >= n`
//! is `zb_{v-n}`. Vector fields are component vectors in the frame
//! `d/dz_v, d/dzb_v` and forms are maps from wedge monomials (bitmasks of
//! directions) to rational-function coefficients.

mod field;
mod form;
mod spinor;

pub use field::VectorField;
pub use form::Form;
pub use spinor::{clifford, exp_bivector_action, unit_spinor, Bivector, Spinor};

use crate::algebra::{AlgebraError, Poly, RatFunc, Scalar};

/// Name of the `v`-th coordinate vector.
pub fn vector_name(n: usize, v: usize) -> String {
    if v < n {
        format!("D_z{v}")
    } else {
        format!("D_zb{}", v - n)
    }
}

/// Name of the `v`-th coordinate 1-form.
pub fn covector_name(n: usize, v: usize) -> String {
    if v < n {
        format!("dz{v}")
    } else {
        format!("dzb{}", v - n)
    }
}

/// Index of the conjugate direction.
pub fn conj_index(n: usize, v: usize) -> usize {
    if v < n {
        v + n
    } else {
        v - n
    }
}

pub(crate) fn check_n(a: usize, b: usize) -> Result<(), AlgebraError> {
    if a != b {
        return Err(AlgebraError::ContextMismatch { left: a, right: b });
    }
    Ok(())
}

/// The circle generator `i sum (z d/dz - zb d/dzb)`.
pub fn rotation_field(n: usize) -> VectorField {
    let mut c = Vec::with_capacity(2 * n);
    for k in 0..n {
        c.push(RatFunc::from_poly(Poly::z(n, k).scale(&Scalar::i())));
    }
    for k in 0..n {
        c.push(RatFunc::from_poly(Poly::zb(n, k).scale(&-Scalar::i())));
    }
    VectorField::from_comps(n, c)
}

/// The standard symplectic form `i sum dz ^ dzb`.
pub fn standard_symplectic(n: usize) -> Form {
    let mut w = Form::zero(n);
    for k in 0..n {
        w = &w + &Form::dvar(n, k).wedge(&Form::dvar(n, k + n));
    }
    w.scale(&Scalar::i())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sphere_moment;

    #[test]
    fn rotation_contracts_symplectic_to_minus_dmu() {
        let n = 3;
        let lhs = standard_symplectic(n).interior(&rotation_field(n));
        let dmu = Form::function(RatFunc::from_poly(sphere_moment(n))).d();
        assert_eq!(lhs, -&dmu);
        assert!(lhs.d().is_zero());
    }

    #[test]
    fn rotation_preserves_moment_and_symplectic() {
        let n = 3;
        let v = rotation_field(n);
        let mu = Form::function(RatFunc::from_poly(sphere_moment(n)));
        assert!(mu.lie_derivative(&v).is_zero());
        assert!(standard_symplectic(n).lie_derivative(&v).is_zero());
        assert!(v.bracket(&v).is_zero());
    }
}
