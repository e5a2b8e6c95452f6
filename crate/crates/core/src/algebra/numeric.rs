use num_complex::Complex64;

use super::poly::{full_values, Poly};
use super::ratfunc::RatFunc;
use super::AlgebraError;

/// A point of the chart with complex coordinates; conjugate variables are
/// always evaluated at the numeric conjugate. Arithmetic is IEEE double.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericPoint {
    coords: Vec<Complex64>,
    tol: f64,
}

impl NumericPoint {
    pub fn new(coords: Vec<Complex64>, tol: f64) -> Self {
        NumericPoint { coords, tol }
    }

    pub fn from_real(coords: &[f64], tol: f64) -> Self {
        NumericPoint::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect(), tol)
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Binary digits carried by the working precision.
    pub fn precision_bits(&self) -> u32 {
        f64::MANTISSA_DIGITS
    }

    /// Values for all `2n` polynomial variables.
    pub fn values(&self) -> Vec<Complex64> {
        full_values(self.coords.len(), &self.coords)
    }

    pub fn eval_poly(&self, p: &Poly) -> Complex64 {
        p.eval(&self.coords)
    }

    pub fn eval(&self, r: &RatFunc) -> Result<Complex64, AlgebraError> {
        r.eval(self)
    }

    /// Squared norm of the holomorphic coordinates.
    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// True when `a` and `b` agree within `tol` relative to their size.
pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;

    #[test]
    fn sphere_point_kills_mu() {
        let n = 3;
        let mut mu = Poly::from_int(n, -1);
        for i in 0..n {
            mu = &mu + &(&Poly::z(n, i) * &Poly::zb(n, i));
        }
        let p = NumericPoint::from_real(&[1.0, 0.0, 0.0], 1e-12);
        assert_eq!(p.eval_poly(&mu), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn conjugate_consistency() {
        let n = 2;
        let p = &Poly::z(n, 0).scale(&Scalar::gaussian(1, 2)) * &Poly::zb(n, 1);
        let pt = NumericPoint::new(vec![Complex64::new(0.3, -0.7), Complex64::new(1.1, 0.4)], 1e-12);
        assert!(close(pt.eval_poly(&p.conj()), pt.eval_poly(&p).conj(), 1e-14));
    }

    #[test]
    fn near_pole_reported() {
        let r = RatFunc::new(Poly::one(1), Poly::z(1, 0)).unwrap();
        let pt = NumericPoint::new(vec![Complex64::new(1e-14, 0.0)], 1e-10);
        assert!(matches!(r.eval(&pt), Err(AlgebraError::NearPole { .. })));
    }
}
