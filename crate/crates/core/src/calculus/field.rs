use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use super::{check_n, conj_index, vector_name};
use crate::algebra::{AlgebraError, NumericPoint, Poly, RatFunc, Scalar};

/// Vector field with rational-function components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    n: usize,
    c: Vec<RatFunc>,
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        VectorField {
            n,
            c: vec![RatFunc::zero(n); 2 * n],
        }
    }

    pub fn from_comps(n: usize, c: Vec<RatFunc>) -> Self {
        assert_eq!(c.len(), 2 * n, "vector field needs 2n components");
        VectorField { n, c }
    }

    pub fn from_polys(n: usize, c: Vec<Poly>) -> Self {
        VectorField::from_comps(n, c.into_iter().map(RatFunc::from_poly).collect())
    }

    /// Coordinate vector `d/dx^v`.
    pub fn coord(n: usize, v: usize) -> Self {
        let mut f = VectorField::zero(n);
        f.c[v] = RatFunc::one(n);
        f
    }

    pub fn d_z(n: usize, i: usize) -> Self {
        VectorField::coord(n, i)
    }

    pub fn d_zb(n: usize, i: usize) -> Self {
        VectorField::coord(n, i + n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn comp(&self, v: usize) -> &RatFunc {
        &self.c[v]
    }

    pub fn comps(&self) -> &[RatFunc] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Derivative of a function along the field.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero(self.n);
        for (v, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let df = f.d(v);
            if !df.is_zero() {
                acc = &acc + &(x * &df);
            }
        }
        acc
    }

    pub fn lie_bracket(&self, o: &VectorField) -> Result<VectorField, AlgebraError> {
        check_n(self.n, o.n)?;
        let c = (0..2 * self.n)
            .map(|k| &self.apply(&o.c[k]) - &o.apply(&self.c[k]))
            .collect();
        Ok(VectorField { n: self.n, c })
    }

    /// Lie bracket; panics on chart mismatch.
    pub fn bracket(&self, o: &VectorField) -> VectorField {
        self.lie_bracket(o).expect("chart mismatch")
    }

    pub fn scale(&self, s: &Scalar) -> VectorField {
        VectorField {
            n: self.n,
            c: self.c.iter().map(|x| x.scale(s)).collect(),
        }
    }

    pub fn mul_fn(&self, f: &RatFunc) -> VectorField {
        VectorField {
            n: self.n,
            c: self.c.iter().map(|x| x * f).collect(),
        }
    }

    /// Complex conjugate field.
    pub fn conj(&self) -> VectorField {
        let n = self.n;
        let c = (0..2 * n).map(|v| self.c[conj_index(n, v)].conj()).collect();
        VectorField { n, c }
    }

    pub fn eval(&self, p: &NumericPoint) -> Result<Vec<Complex64>, AlgebraError> {
        self.c.iter().map(|x| x.eval(p)).collect()
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({x})*{}", vector_name(self.n, v))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a VectorField> for &'a VectorField {
    type Output = VectorField;
    fn add(self, o: &VectorField) -> VectorField {
        check_n(self.n, o.n).expect("chart mismatch");
        VectorField {
            n: self.n,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a VectorField> for &'a VectorField {
    type Output = VectorField;
    fn sub(self, o: &VectorField) -> VectorField {
        check_n(self.n, o.n).expect("chart mismatch");
        VectorField {
            n: self.n,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField {
            n: self.n,
            c: self.c.iter().map(|a| -a).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_bracket() {
        let n = 3;
        let x = VectorField::d_z(n, 0);
        let y = VectorField::d_z(n, 1).mul_fn(&RatFunc::from_poly(Poly::z(n, 0)));
        assert_eq!(x.bracket(&y), VectorField::d_z(n, 1));
    }

    #[test]
    fn conj_is_involution() {
        let n = 2;
        let x = VectorField::from_polys(
            n,
            vec![
                Poly::z(n, 0).scale(&Scalar::i()),
                Poly::zb(n, 1),
                Poly::one(n),
                Poly::zero(n),
            ],
        );
        assert_eq!(x.conj().conj(), x);
        assert_eq!(x.conj().comp(2), &RatFunc::from_poly(Poly::zb(n, 0).scale(&-Scalar::i())));
    }
}
