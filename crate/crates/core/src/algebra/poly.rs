use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use super::mono::{Mono, MAX_VARS};
use super::scalar::Scalar;
use super::AlgebraError;

/// Binary ring operation selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// Multivariate polynomial over the Gaussian rationals in the variables
/// `z_0..z_{n-1}, zb_0..zb_{n-1}`, where `zb_i` is the formal conjugate of `z_i`.
///
/// Terms are kept in canonical form: no zero coefficients, graded-lex order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        assert!(2 * n <= MAX_VARS, "chart dimension {n} exceeds supported maximum");
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Mono::ONE, c);
        }
        p
    }

    pub fn one(n: usize) -> Self {
        Poly::constant(n, Scalar::one())
    }

    pub fn from_int(n: usize, v: i64) -> Self {
        Poly::constant(n, Scalar::from_int(v))
    }

    /// Variable by index: `0..n` are `z_i`, `n..2n` are `zb_i`.
    pub fn var(n: usize, v: usize) -> Self {
        assert!(v < 2 * n);
        let mut p = Poly::zero(n);
        p.terms.insert(Mono::var(v), Scalar::one());
        p
    }

    pub fn z(n: usize, i: usize) -> Self {
        Poly::var(n, i)
    }

    pub fn zb(n: usize, i: usize) -> Self {
        Poly::var(n, n + i)
    }

    pub fn monomial(n: usize, m: Mono, c: Scalar) -> Self {
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Mono, Scalar)>) -> Self {
        let mut p = Poly::zero(n);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        2 * self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.terms.get(&Mono::ONE).cloned().unwrap_or_default())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Mono::ONE).is_some_and(|c| c.is_one())
    }

    /// Largest term in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn is_homogeneous(&self, deg: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == deg)
    }

    /// True when no conjugate variable occurs.
    pub fn is_holomorphic(&self) -> bool {
        self.terms
            .keys()
            .all(|m| (self.n..2 * self.n).all(|v| m.exp(v) == 0))
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn check_ctx(&self, o: &Poly) -> Result<(), AlgebraError> {
        if self.n != o.n {
            Err(AlgebraError::ContextMismatch {
                left: self.n,
                right: o.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, o: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ctx(o)?;
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c);
        }
        Ok(r)
    }

    pub fn try_sub(&self, o: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ctx(o)?;
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, &-c);
        }
        Ok(r)
    }

    pub fn try_mul(&self, o: &Poly) -> Result<Poly, AlgebraError> {
        self.check_ctx(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Poly::zero(self.n));
        }
        if let Some(c) = o.constant_value() {
            return Ok(self.scale(&c));
        }
        if let Some(c) = self.constant_value() {
            return Ok(o.scale(&c));
        }
        let mut acc: std::collections::HashMap<Mono, Scalar> =
            std::collections::HashMap::with_capacity(self.len() * o.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let prod = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|e| *e += &prod)
                    .or_insert(prod);
            }
        }
        Ok(Poly {
            n: self.n,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        if c.is_one() {
            return self.clone();
        }
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Conjugation: swaps `z_i ↔ zb_i` and conjugates coefficients.
    pub fn conj(&self) -> Poly {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.conj(self.n), c.conj()))
                .collect(),
        }
    }

    /// Formal partial derivative with respect to variable index `v`.
    pub fn partial(&self, v: usize) -> Result<Poly, AlgebraError> {
        if v >= 2 * self.n {
            return Err(AlgebraError::UnknownVariable(format!("#{v}")));
        }
        let mut r = Poly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                r.add_term(
                    m.with_exp(v, e - 1),
                    &(c * &Scalar::from_int(e as i64)),
                );
            }
        }
        Ok(r)
    }

    /// Partial derivative, panicking on an out-of-range variable.
    pub fn d(&self, v: usize) -> Poly {
        self.partial(v).expect("variable index in range")
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(self.n));
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.inv()?));
        }
        let (lm_d, lc_d) = d.leading().map(|(m, c)| (*m, c.clone()))?;
        let lc_inv = lc_d.inv()?;
        if lm_d.degree() > self.degree().unwrap_or(0) {
            return None;
        }
        let mut rem = self.clone();
        let mut q = Poly::zero(self.n);
        while let Some((lm_r, lc_r)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            let qm = lm_d.div_into(&lm_r)?;
            let qc = &lc_r * &lc_inv;
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), &-(c * &qc));
            }
            q.add_term(qm, &qc);
        }
        Some(q)
    }

    /// Common monomial factor of all terms.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.keys();
        match it.next() {
            None => Mono::ONE,
            Some(first) => it.fold(*first, |acc, m| acc.gcd(m)),
        }
    }

    pub fn div_mono(&self, m: &Mono) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(m.div_into(k)?, c.clone());
        }
        Some(Poly { n: self.n, terms })
    }

    /// Numeric evaluation at `z` (conjugate variables take `conj(z)`).
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let vals = full_values(self.n, z);
        let mut acc = Complex64::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (v, val) in vals.iter().enumerate() {
                let e = m.exp(v);
                if e > 0 {
                    t *= val.powu(e as u32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Numeric evaluation with every variable (including conjugates) given
    /// independently.
    pub fn eval_vars(&self, vals: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (v, val) in vals.iter().enumerate().take(2 * self.n) {
                let e = m.exp(v);
                if e > 0 {
                    t *= val.powu(e as u32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation with every variable given independently.
    pub fn eval_exact(&self, vals: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, val) in vals.iter().enumerate().take(2 * self.n) {
                let e = m.exp(v);
                if e > 0 {
                    t = &t * &val.pow(e as u32);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Substitute polynomials for variables.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        let mut acc = Poly::zero(subs.first().map(|p| p.n).unwrap_or(self.n));
        for (m, c) in &self.terms {
            let mut t = Poly::constant(acc.n, c.clone());
            for (v, s) in subs.iter().enumerate().take(2 * self.n) {
                let e = m.exp(v);
                if e > 0 {
                    t = &t * &s.pow(e as u32);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn var_name(n: usize, v: usize) -> String {
        if v < n {
            format!("z{v}")
        } else {
            format!("zb{}", v - n)
        }
    }

    fn fmt_mono(&self, m: &Mono) -> String {
        let mut parts = Vec::new();
        for v in 0..2 * self.n {
            match m.exp(v) {
                0 => {}
                1 => parts.push(Poly::var_name(self.n, v)),
                e => parts.push(format!("{}^{}", Poly::var_name(self.n, v), e)),
            }
        }
        parts.join("*")
    }
}

/// Values of all `2n` variables at a point given by its holomorphic coordinates.
pub fn full_values(n: usize, z: &[Complex64]) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(2 * n);
    v.extend_from_slice(&z[..n]);
    v.extend(z[..n].iter().map(|c| c.conj()));
    v
}

/// Ring operation with variable-context checking.
pub fn poly_arith(a: &Poly, b: &Poly, op: PolyOp) -> Result<Poly, AlgebraError> {
    match op {
        PolyOp::Add => a.try_add(b),
        PolyOp::Sub => a.try_sub(b),
        PolyOp::Mul => a.try_mul(b),
    }
}

impl fmt::Display for Poly {
    /// Canonical text: terms in descending graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let negative = c.im.is_zero() && c.re < num_rational::BigRational::zero()
                || c.re.is_zero() && c.im < num_rational::BigRational::zero();
            let (sign, mag) = if negative { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono = self.fmt_mono(m);
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        self.try_add(o).expect("polynomial context mismatch")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self.try_sub(o).expect("polynomial context mismatch")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.try_mul(o).expect("polynomial context mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

macro_rules! forward_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                (&self).$m(o)
            }
        }
    };
}
forward_poly!(Add, add);
forward_poly!(Sub, sub);
forward_poly!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn z(i: usize) -> Poly {
        Poly::z(3, i)
    }

    #[test]
    fn binomial_square() {
        let a = &z(0) + &Poly::zb(3, 0);
        let sq = &a * &a;
        let expect = &(&(&z(0) * &z(0)) + &(&z(0) * &Poly::zb(3, 0)).scale(&Scalar::from_int(2)))
            + &(&Poly::zb(3, 0) * &Poly::zb(3, 0));
        assert_eq!(sq, expect);
        assert_eq!(sq.to_string(), "z0^2 + 2*z0*zb0 + zb0^2");
    }

    #[test]
    fn context_mismatch_is_reported() {
        let err = poly_arith(&Poly::z(2, 0), &Poly::z(3, 0), PolyOp::Add).unwrap_err();
        assert!(matches!(err, AlgebraError::ContextMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn exact_division() {
        let f = &(&z(1) - &z(0)) * &(&z(2) - &z(0));
        let g = &f * &(&z(0) + &Poly::zb(3, 2));
        assert_eq!(g.div_exact(&f), Some(&z(0) + &Poly::zb(3, 2)));
        assert_eq!((&g + &Poly::one(3)).div_exact(&f), None);
    }

    #[test]
    fn conj_of_i_z0() {
        let p = Poly::z(3, 0).scale(&Scalar::i());
        assert_eq!(p.conj(), Poly::zb(3, 0).scale(&-Scalar::i()));
    }

    #[test]
    fn partial_unknown_variable() {
        assert!(matches!(
            Poly::z(3, 0).partial(6),
            Err(AlgebraError::UnknownVariable(_))
        ));
        assert_eq!((&z(0) * &z(0)).d(0), z(0).scale(&Scalar::from_int(2)));
    }
}
