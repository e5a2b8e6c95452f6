use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use super::{check_n, conj_index, covector_name, VectorField};
use crate::algebra::{AlgebraError, NumericPoint, RatFunc, Scalar};

/// Sign of moving the 1-forms of `b` past those of `a` into sorted order.
fn wedge_sign(a: u32, b: u32) -> bool {
    // Count pairs (i in a, j in b) with i > j.
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += (a >> (j + 1)).count_ones();
    }
    swaps % 2 == 1
}

/// Inhomogeneous differential form. Keys are bitmasks of directions; the
/// wedge monomial of a key lists its directions in increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    n: usize,
    t: BTreeMap<u32, RatFunc>,
}

impl Form {
    pub fn zero(n: usize) -> Self {
        Form { n, t: BTreeMap::new() }
    }

    pub fn function(f: RatFunc) -> Self {
        let n = f.n();
        let mut w = Form::zero(n);
        w.add_term(0, f);
        w
    }

    pub fn constant(n: usize, s: Scalar) -> Self {
        Form::function(RatFunc::constant(n, s))
    }

    /// Coordinate 1-form `dx^v`.
    pub fn dvar(n: usize, v: usize) -> Self {
        Form::monomial(n, 1 << v, RatFunc::one(n))
    }

    pub fn dz(n: usize, i: usize) -> Self {
        Form::dvar(n, i)
    }

    pub fn dzb(n: usize, i: usize) -> Self {
        Form::dvar(n, i + n)
    }

    pub fn monomial(n: usize, mask: u32, c: RatFunc) -> Self {
        let mut w = Form::zero(n);
        w.add_term(mask, c);
        w
    }

    /// 1-form from its components in the frame `dx^v`.
    pub fn one_form(n: usize, c: Vec<RatFunc>) -> Self {
        assert_eq!(c.len(), 2 * n);
        let mut w = Form::zero(n);
        for (v, x) in c.into_iter().enumerate() {
            w.add_term(1 << v, x);
        }
        w
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.t.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &RatFunc)> {
        self.t.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, mask: u32) -> RatFunc {
        self.t.get(&mask).cloned().unwrap_or_else(|| RatFunc::zero(self.n))
    }

    /// Components of the degree-1 part in the frame `dx^v`.
    pub fn one_form_comps(&self) -> Vec<RatFunc> {
        (0..2 * self.n).map(|v| self.coeff(1 << v)).collect()
    }

    pub(crate) fn add_term(&mut self, mask: u32, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.t.remove(&mask) {
            None => {
                self.t.insert(mask, c);
            }
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.t.insert(mask, s);
                }
            }
        }
    }

    /// Degree-`k` component.
    pub fn part(&self, k: u32) -> Form {
        Form {
            n: self.n,
            t: self
                .t
                .iter()
                .filter(|(m, _)| m.count_ones() == k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Degree when homogeneous; `None` for zero or mixed forms.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.t.keys().map(|m| m.count_ones());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, s: &Scalar) -> Form {
        Form {
            n: self.n,
            t: self.t.iter().map(|(m, c)| (*m, c.scale(s))).collect(),
        }
    }

    pub fn mul_fn(&self, f: &RatFunc) -> Form {
        let mut w = Form::zero(self.n);
        for (m, c) in &self.t {
            w.add_term(*m, c * f);
        }
        w
    }

    pub fn try_wedge(&self, o: &Form) -> Result<Form, AlgebraError> {
        check_n(self.n, o.n)?;
        let mut w = Form::zero(self.n);
        for (a, ca) in &self.t {
            for (b, cb) in &o.t {
                if a & b != 0 {
                    continue;
                }
                let c = ca * cb;
                w.add_term(a | b, if wedge_sign(*a, *b) { -c } else { c });
            }
        }
        Ok(w)
    }

    pub fn wedge(&self, o: &Form) -> Form {
        self.try_wedge(o).expect("chart mismatch")
    }

    /// Exterior derivative.
    pub fn d(&self) -> Form {
        let mut w = Form::zero(self.n);
        for (m, c) in &self.t {
            for v in 0..2 * self.n {
                if m & (1 << v) != 0 {
                    continue;
                }
                let dc = c.d(v);
                if dc.is_zero() {
                    continue;
                }
                let neg = (m & ((1u32 << v) - 1)).count_ones() % 2 == 1;
                w.add_term(m | (1 << v), if neg { -dc } else { dc });
            }
        }
        w
    }

    /// Interior product with a vector field.
    pub fn interior(&self, x: &VectorField) -> Form {
        check_n(self.n, x.n()).expect("chart mismatch");
        let mut w = Form::zero(self.n);
        for (m, c) in &self.t {
            let mut rest = *m;
            let mut pos = 0u32;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let xv = x.comp(v);
                if !xv.is_zero() {
                    let t = c * xv;
                    w.add_term(m & !(1 << v), if pos % 2 == 1 { -t } else { t });
                }
                pos += 1;
            }
        }
        w
    }

    /// Lie derivative by the Cartan formula.
    pub fn lie_derivative(&self, x: &VectorField) -> Form {
        &self.interior(x).d() + &self.d().interior(x)
    }

    /// Evaluates a 1-form on a vector field.
    pub fn pair(&self, x: &VectorField) -> RatFunc {
        self.part(1).interior(x).coeff(0)
    }

    /// Complex conjugate form.
    pub fn conj(&self) -> Form {
        let n = self.n;
        let mut w = Form::zero(n);
        for (m, c) in &self.t {
            // Conjugate each direction, then sort back with a sign.
            let dirs: Vec<usize> = (0..2 * n)
                .filter(|v| m & (1 << v) != 0)
                .map(|v| conj_index(n, v))
                .collect();
            let mut inv = 0;
            for i in 0..dirs.len() {
                for j in i + 1..dirs.len() {
                    if dirs[i] > dirs[j] {
                        inv += 1;
                    }
                }
            }
            let mask = dirs.iter().fold(0u32, |acc, v| acc | (1 << v));
            let cc = c.conj();
            w.add_term(mask, if inv % 2 == 1 { -cc } else { cc });
        }
        w
    }

    /// Evaluates the form on vectors; arguments beyond the degree are
    /// contracted in order (`w(X1, X2, ...) = i_{Xk}...i_{X1}` read as
    /// `w(X1,..,Xk)` with the usual determinant convention).
    pub fn eval_on(&self, args: &[VectorField]) -> RatFunc {
        let mut w = self.part(args.len() as u32);
        for x in args {
            w = w.interior(x);
        }
        w.coeff(0)
    }

    /// Numeric coefficients at a point.
    pub fn eval(&self, p: &NumericPoint) -> Result<BTreeMap<u32, Complex64>, AlgebraError> {
        self.t.iter().map(|(m, c)| Ok((*m, c.eval(p)?))).collect()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.t {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            let names: Vec<String> = (0..2 * self.n)
                .filter(|v| m & (1 << v) != 0)
                .map(|v| covector_name(self.n, v))
                .collect();
            if !names.is_empty() {
                write!(f, "*{}", names.join("^"))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Form> for &'a Form {
    type Output = Form;
    fn add(self, o: &Form) -> Form {
        check_n(self.n, o.n).expect("chart mismatch");
        let mut w = self.clone();
        for (m, c) in &o.t {
            w.add_term(*m, c.clone());
        }
        w
    }
}

impl<'a> Sub<&'a Form> for &'a Form {
    type Output = Form;
    fn sub(self, o: &Form) -> Form {
        self + &-o
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form {
            n: self.n,
            t: self.t.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Poly;

    fn rf(p: Poly) -> RatFunc {
        RatFunc::from_poly(p)
    }

    #[test]
    fn d_of_simple_form() {
        let n = 3;
        let w = Form::dz(n, 1).mul_fn(&rf(Poly::z(n, 0)));
        assert_eq!(w.d(), Form::dz(n, 0).wedge(&Form::dz(n, 1)));
        assert!(w.d().d().is_zero());
    }

    #[test]
    fn interior_and_lie() {
        let n = 3;
        let w = Form::dz(n, 0).wedge(&Form::dz(n, 1));
        let x = VectorField::d_z(n, 0);
        assert_eq!(w.interior(&x), Form::dz(n, 1));
        assert!(w.interior(&x).interior(&x).is_zero());
        let u = Form::dz(n, 1).mul_fn(&rf(Poly::z(n, 0)));
        assert_eq!(u.lie_derivative(&x), Form::dz(n, 1));
    }

    #[test]
    fn wedge_antisymmetry_and_conj() {
        let n = 2;
        let a = Form::dz(n, 0);
        let b = Form::dzb(n, 1);
        assert_eq!(a.wedge(&b), -&b.wedge(&a));
        // conj(dz0 ^ dzb1) = dzb0 ^ dz1 = -dz1 ^ dzb0.
        let c = a.wedge(&b).conj();
        assert_eq!(c, Form::dzb(n, 0).wedge(&Form::dz(n, 1)));
        assert_eq!(c.conj(), a.wedge(&b));
    }

    #[test]
    fn eval_on_matches_determinant_convention() {
        let n = 2;
        let w = Form::dz(n, 0).wedge(&Form::dz(n, 1));
        let x = VectorField::d_z(n, 0);
        let y = VectorField::d_z(n, 1);
        assert_eq!(w.eval_on(&[x.clone(), y.clone()]), RatFunc::one(n));
        assert_eq!(w.eval_on(&[y, x]), -RatFunc::one(n));
    }
}
