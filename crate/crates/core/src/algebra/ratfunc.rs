use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::mono::Mono;
use super::numeric::NumericPoint;
use super::poly::Poly;
use super::scalar::Scalar;
use super::AlgebraError;

/// Exact size bound under which exact division is attempted during
/// normalization.
const CHEAP_DIVISION_TERMS: usize = 4000;

/// Fraction of polynomials. The denominator is never the zero polynomial.
///
/// No multivariate gcd is taken; equality is decided by cross-multiplication.
/// Normalization only folds constant denominators, makes the denominator
/// monic, strips a common monomial factor and tries exact division.
#[derive(Clone, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.n() != den.n() {
            return Err(AlgebraError::ContextMismatch {
                left: num.n(),
                right: den.n(),
            });
        }
        Ok(RatFunc { num, den }.normalized())
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.n();
        RatFunc {
            num: p,
            den: Poly::one(n),
        }
    }

    pub fn zero(n: usize) -> Self {
        RatFunc::from_poly(Poly::zero(n))
    }

    pub fn one(n: usize) -> Self {
        RatFunc::from_poly(Poly::one(n))
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        RatFunc::from_poly(Poly::constant(n, c))
    }

    pub fn from_int(n: usize, v: i64) -> Self {
        RatFunc::from_poly(Poly::from_int(n, v))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn n(&self) -> usize {
        self.num.n()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Polynomial value if the fraction reduces to one by exact division.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.den.is_one() {
            Some(self.num.clone())
        } else {
            self.num.div_exact(&self.den)
        }
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        let c = self.to_poly()?.constant_value()?;
        Some(c)
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den = Poly::one(self.num.n());
            return self;
        }
        if let Some(c) = self.den.constant_value() {
            let inv = c.inv().expect("nonzero denominator");
            self.num = self.num.scale(&inv);
            self.den = Poly::one(self.num.n());
            return self;
        }
        let m = self.num.monomial_content().gcd(&self.den.monomial_content());
        if m != Mono::ONE {
            self.num = self.num.div_mono(&m).expect("common monomial");
            self.den = self.den.div_mono(&m).expect("common monomial");
        }
        if self.num.len() <= CHEAP_DIVISION_TERMS && self.num.degree() >= self.den.degree() {
            if let Some(q) = self.num.div_exact(&self.den) {
                return RatFunc::from_poly(q);
            }
        }
        if let Some((_, lc)) = self.den.leading() {
            if !lc.is_one() {
                let inv = lc.inv().expect("nonzero leading coefficient");
                self.num = self.num.scale(&inv);
                self.den = self.den.scale(&inv);
            }
        }
        self
    }

    pub fn try_add(&self, o: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if self.n() != o.n() {
            return Err(AlgebraError::ContextMismatch {
                left: self.n(),
                right: o.n(),
            });
        }
        Ok(self.add_unchecked(o))
    }

    fn add_unchecked(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc {
                num: &self.num + &o.num,
                den: self.den.clone(),
            }
            .normalized();
        }
        if o.den.is_one() {
            return RatFunc {
                num: &self.num + &(&o.num * &self.den),
                den: self.den.clone(),
            };
        }
        if self.den.is_one() {
            return RatFunc {
                num: &(&self.num * &o.den) + &o.num,
                den: o.den.clone(),
            };
        }
        // One denominator dividing the other keeps the result small.
        if let Some(q) = o.den.div_exact(&self.den) {
            return RatFunc {
                num: &(&self.num * &q) + &o.num,
                den: o.den.clone(),
            }
            .normalized();
        }
        if let Some(q) = self.den.div_exact(&o.den) {
            return RatFunc {
                num: &self.num + &(&o.num * &q),
                den: self.den.clone(),
            }
            .normalized();
        }
        RatFunc {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
        .normalized()
    }

    pub fn try_mul(&self, o: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if self.n() != o.n() {
            return Err(AlgebraError::ContextMismatch {
                left: self.n(),
                right: o.n(),
            });
        }
        Ok(self.mul_unchecked(o))
    }

    fn mul_unchecked(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero(self.n());
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(&self.num * &o.num);
        }
        // Cross-cancel before multiplying out.
        let (mut a, mut b) = (self.num.clone(), self.den.clone());
        let (mut c, mut d) = (o.num.clone(), o.den.clone());
        if !d.is_one() {
            if let Some(q) = a.div_exact(&d) {
                a = q;
                d = Poly::one(self.n());
            }
        }
        if !b.is_one() {
            if let Some(q) = c.div_exact(&b) {
                c = q;
                b = Poly::one(self.n());
            }
        }
        RatFunc {
            num: &a * &c,
            den: &b * &d,
        }
        .normalized()
    }

    pub fn inv(&self) -> Result<RatFunc, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RatFunc {
            num: self.den.clone(),
            den: self.num.clone(),
        }
        .normalized())
    }

    pub fn scale(&self, c: &Scalar) -> RatFunc {
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
        .normalized()
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        self.mul_unchecked(&RatFunc::from_poly(p.clone()))
    }

    pub fn conj(&self) -> RatFunc {
        RatFunc {
            num: self.num.conj(),
            den: self.den.conj(),
        }
        .normalized()
    }

    /// Quotient rule derivative with respect to variable index `v`.
    pub fn partial(&self, v: usize) -> Result<RatFunc, AlgebraError> {
        let dn = self.num.partial(v)?;
        if self.den.is_one() {
            return Ok(RatFunc::from_poly(dn));
        }
        let dd = self.den.partial(v)?;
        if dd.is_zero() {
            return Ok(RatFunc {
                num: dn,
                den: self.den.clone(),
            }
            .normalized());
        }
        Ok(RatFunc {
            num: &(&dn * &self.den) - &(&self.num * &dd),
            den: &self.den * &self.den,
        }
        .normalized())
    }

    pub fn d(&self, v: usize) -> RatFunc {
        self.partial(v).expect("variable index in range")
    }

    pub fn eval(&self, p: &NumericPoint) -> Result<Complex64, AlgebraError> {
        let den = self.den.eval(p.coords());
        if den.norm() <= p.tol() {
            return Err(AlgebraError::NearPole {
                value: den.norm(),
                tol: p.tol(),
            });
        }
        Ok(self.num.eval(p.coords()) / den)
    }

    /// Evaluation with every variable supplied independently.
    pub fn eval_vars(&self, vals: &[Complex64]) -> Complex64 {
        self.num.eval_vars(vals) / self.den.eval_vars(vals)
    }

    pub fn eval_exact(&self, vals: &[Scalar]) -> Result<Scalar, AlgebraError> {
        let d = self.den.eval_exact(vals);
        let inv = d.inv().ok_or(AlgebraError::DivisionByZero)?;
        Ok(&self.num.eval_exact(vals) * &inv)
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &RatFunc) -> bool {
        if self.n() != o.n() {
            return false;
        }
        if self.den == o.den {
            return self.num == o.num;
        }
        &self.num * &o.den == &o.num * &self.den
    }
}

impl Eq for RatFunc {}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        self.try_add(o).expect("rational function context mismatch")
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self.try_add(&-o).expect("rational function context mismatch")
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        self.try_mul(o).expect("rational function context mismatch")
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        self * &o.inv().expect("division by zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

macro_rules! forward_rf {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                (&self).$m(o)
            }
        }
    };
}
forward_rf!(Add, add);
forward_rf!(Sub, sub);
forward_rf!(Mul, mul);
forward_rf!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    fn z(i: usize) -> Poly {
        Poly::z(2, i)
    }

    #[test]
    fn cross_multiplication_equality() {
        let a = RatFunc::new(&z(0) * &z(1), &z(1) + &z(0)).unwrap();
        let b = RatFunc::new(
            &(&z(0) * &z(1)) * &Poly::zb(2, 0),
            &(&z(1) + &z(0)) * &Poly::zb(2, 0),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inverse_cancels() {
        let a = RatFunc::new(&z(0) + &Poly::one(2), &z(1) - &Poly::zb(2, 1)).unwrap();
        assert_eq!(&a * &a.inv().unwrap(), RatFunc::one(2));
        assert_eq!(&a - &a, RatFunc::zero(2));
    }

    #[test]
    fn exact_division_collapses() {
        let d = &z(0) - &z(1);
        let r = RatFunc::new(&d * &d, d.clone()).unwrap();
        assert!(r.is_poly());
        assert_eq!(r.as_poly(), Some(&d));
    }

    #[test]
    fn quotient_rule() {
        let r = RatFunc::new(Poly::one(2), z(0)).unwrap();
        let expect = RatFunc::new(Poly::from_int(2, -1), &z(0) * &z(0)).unwrap();
        assert_eq!(r.d(0), expect);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(
            RatFunc::new(z(0), Poly::zero(2)),
            Err(AlgebraError::DivisionByZero)
        ));
    }
}
