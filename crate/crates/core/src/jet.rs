//! Truncated multivariate Taylor series (jets) over complex doubles.
//!
//! A jet of order `k` in `d` variables stores the Taylor coefficients of all
//! monomials of degree at most `k` around a base point. Arithmetic is exact
//! on the truncated algebra, so derivatives carry no discretization error.
//! Coefficients are laid out by degree, which makes an order-`k` jet a prefix
//! of an order-`k+1` jet.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

pub const MAX_ORDER: usize = 3;

type C = Complex64;

/// Monomial tables for one variable count.
#[derive(Debug)]
pub struct JetSpace {
    d: usize,
    exps: Vec<Vec<u8>>,
    /// `len[k]` = number of monomials of degree at most `k`.
    len: [usize; MAX_ORDER + 1],
    /// Product table `(i, j, k)` sorted by the degree of `k`.
    pairs: Vec<(u16, u16, u16)>,
    /// `pair_len[k]` = number of pairs whose product has degree at most `k`.
    pair_len: [usize; MAX_ORDER + 1],
    /// Per variable: `(source, target, factor)` for differentiation.
    deriv: Vec<Vec<(u16, u16, f64)>>,
    /// Per variable: index of the degree-one monomial.
    unit: Vec<u16>,
}

fn build(d: usize) -> JetSpace {
    let mut exps: Vec<Vec<u8>> = vec![vec![0; d]];
    let mut len = [0usize; MAX_ORDER + 1];
    len[0] = 1;
    let mut prev: Vec<Vec<u8>> = vec![vec![0; d]];
    for k in 1..=MAX_ORDER {
        let mut next: Vec<Vec<u8>> = Vec::new();
        for e in &prev {
            // Extend only at or after the last nonzero variable to avoid repeats.
            let last = e.iter().rposition(|&x| x > 0).unwrap_or(0);
            for v in last..d {
                let mut f = e.clone();
                f[v] += 1;
                next.push(f);
            }
        }
        exps.extend(next.iter().cloned());
        len[k] = exps.len();
        prev = next;
    }
    let index: HashMap<Vec<u8>, usize> = exps.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let deg = |e: &Vec<u8>| e.iter().map(|&x| x as usize).sum::<usize>();
    let mut pairs: Vec<(usize, u16, u16, u16)> = Vec::new();
    for (i, a) in exps.iter().enumerate() {
        for (j, b) in exps.iter().enumerate() {
            if deg(a) + deg(b) > MAX_ORDER {
                continue;
            }
            let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            pairs.push((deg(&s), i as u16, j as u16, index[&s] as u16));
        }
    }
    pairs.sort();
    let mut pair_len = [0usize; MAX_ORDER + 1];
    for k in 0..=MAX_ORDER {
        pair_len[k] = pairs.iter().filter(|p| p.0 <= k).count();
    }
    let mut deriv = vec![Vec::new(); d];
    let mut unit = vec![0u16; d];
    for (i, e) in exps.iter().enumerate() {
        for v in 0..d {
            if e[v] > 0 {
                let mut f = e.clone();
                f[v] -= 1;
                deriv[v].push((i as u16, index[&f] as u16, e[v] as f64));
            }
        }
        if deg(e) == 1 {
            let v = e.iter().position(|&x| x == 1).unwrap();
            unit[v] = i as u16;
        }
    }
    JetSpace {
        d,
        exps,
        len,
        pairs: pairs.into_iter().map(|(_, i, j, k)| (i, j, k)).collect(),
        pair_len,
        deriv,
        unit,
    }
}

/// Shared, leaked table for `d` variables.
pub fn space(d: usize) -> &'static JetSpace {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static JetSpace>>> = OnceLock::new();
    let mut map = CACHE.get_or_init(|| Mutex::new(HashMap::new())).lock().unwrap();
    map.entry(d).or_insert_with(|| Box::leak(Box::new(build(d))))
}

impl JetSpace {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self, order: usize) -> usize {
        self.len[order]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.exps[idx]
    }
}

/// Truncated Taylor series of one scalar function.
#[derive(Clone, Debug)]
pub struct Jet {
    sp: &'static JetSpace,
    ord: usize,
    c: Vec<C>,
}

impl Jet {
    pub fn zero(sp: &'static JetSpace, ord: usize) -> Jet {
        Jet {
            sp,
            ord,
            c: vec![C::new(0.0, 0.0); sp.len(ord)],
        }
    }

    /// Constant function; constants carry the maximal order.
    pub fn constant(sp: &'static JetSpace, v: C) -> Jet {
        let mut j = Jet::zero(sp, MAX_ORDER);
        j.c[0] = v;
        j
    }

    /// Coordinate function `x_v` with value `base` at the expansion point.
    pub fn var(sp: &'static JetSpace, v: usize, base: C) -> Jet {
        let mut j = Jet::constant(sp, base);
        j.c[sp.unit[v] as usize] = C::new(1.0, 0.0);
        j
    }

    pub fn from_coeffs(sp: &'static JetSpace, ord: usize, c: Vec<C>) -> Jet {
        assert_eq!(c.len(), sp.len(ord));
        Jet { sp, ord, c }
    }

    pub fn space(&self) -> &'static JetSpace {
        self.sp
    }

    pub fn order(&self) -> usize {
        self.ord
    }

    pub fn value(&self) -> C {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    /// First partial derivative at the base point.
    pub fn grad(&self, v: usize) -> C {
        assert!(self.ord >= 1, "gradient of an order-0 jet");
        self.c[self.sp.unit[v] as usize]
    }

    pub fn truncate(&self, ord: usize) -> Jet {
        if ord >= self.ord {
            return self.clone();
        }
        Jet {
            sp: self.sp,
            ord,
            c: self.c[..self.sp.len(ord)].to_vec(),
        }
    }

    pub fn scale(&self, s: C) -> Jet {
        Jet {
            sp: self.sp,
            ord: self.ord,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    pub fn conj_coeffs(&self) -> Jet {
        Jet {
            sp: self.sp,
            ord: self.ord,
            c: self.c.iter().map(|x| x.conj()).collect(),
        }
    }

    /// Partial derivative; the order drops by one.
    pub fn deriv(&self, v: usize) -> Jet {
        assert!(self.ord >= 1, "derivative of an order-0 jet");
        let ord = self.ord - 1;
        let mut out = Jet::zero(self.sp, ord);
        let lim = self.sp.len(self.ord);
        for &(src, dst, f) in &self.sp.deriv[v] {
            let (src, dst) = (src as usize, dst as usize);
            if src < lim && dst < out.c.len() {
                out.c[dst] += self.c[src] * f;
            }
        }
        out
    }

    /// Directional derivative `sum_v dir_v * d_v self`.
    pub fn directional(&self, dir: &[Jet]) -> Jet {
        let mut acc: Option<Jet> = None;
        for (v, w) in dir.iter().enumerate() {
            let t = w * &self.deriv(v);
            acc = Some(match acc {
                None => t,
                Some(a) => &a + &t,
            });
        }
        acc.unwrap_or_else(|| Jet::zero(self.sp, self.ord.saturating_sub(1)))
    }

    /// Multiplicative inverse via the nilpotent series.
    pub fn recip(&self) -> Jet {
        let a = self.c[0];
        let inv = C::new(1.0, 0.0) / a;
        // self = a (1 + u), u without constant term.
        let mut u = self.scale(inv);
        u.c[0] = C::new(0.0, 0.0);
        let mut term = Jet::constant(self.sp, C::new(1.0, 0.0)).truncate(self.ord);
        let mut acc = term.clone();
        for k in 1..=self.ord {
            term = &term * &u;
            if k % 2 == 1 {
                acc = &acc - &term;
            } else {
                acc = &acc + &term;
            }
        }
        acc.scale(inv)
    }

    pub fn sqrt_value_abs(&self) -> f64 {
        self.c[0].norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let ord = self.ord.min(o.ord);
        let n = self.sp.len(ord);
        Jet {
            sp: self.sp,
            ord,
            c: (0..n).map(|i| self.c[i] + o.c[i]).collect(),
        }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let ord = self.ord.min(o.ord);
        let n = self.sp.len(ord);
        Jet {
            sp: self.sp,
            ord,
            c: (0..n).map(|i| self.c[i] - o.c[i]).collect(),
        }
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let ord = self.ord.min(o.ord);
        let mut out = Jet::zero(self.sp, ord);
        let sp = self.sp;
        for &(i, j, k) in &sp.pairs[..sp.pair_len[ord]] {
            out.c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        out
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C::new(-1.0, 0.0))
    }
}

macro_rules! forward_jet {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: &Jet) -> Jet {
                (&self).$m(o)
            }
        }
    };
}
forward_jet!(Add, add);
forward_jet!(Sub, sub);
forward_jet!(Mul, mul);

/// Sum of jets (zero of the given order when empty).
pub fn sum<'a>(sp: &'static JetSpace, ord: usize, it: impl IntoIterator<Item = Jet>) -> Jet {
    let mut acc = Jet::zero(sp, ord);
    for j in it {
        acc = &acc + &j;
    }
    acc
}

/// Dense jet matrix helpers.
pub mod mat {
    use super::{Jet, JetSpace, C};
    use thiserror::Error;

    pub type JVec = Vec<Jet>;
    pub type JMat = Vec<Vec<Jet>>;

    #[derive(Debug, Error, Clone, PartialEq)]
    #[error("jet matrix singular at base point (pivot {pivot:e})")]
    pub struct Singular {
        pub pivot: f64,
    }

    pub fn zeros(sp: &'static JetSpace, ord: usize, r: usize, c: usize) -> JMat {
        vec![vec![Jet::zero(sp, ord); c]; r]
    }

    pub fn identity(sp: &'static JetSpace, n: usize) -> JMat {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Jet::constant(sp, C::new(if i == j { 1.0 } else { 0.0 }, 0.0)))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(a: &JMat) -> JMat {
        if a.is_empty() {
            return Vec::new();
        }
        (0..a[0].len())
            .map(|j| a.iter().map(|r| r[j].clone()).collect())
            .collect()
    }

    pub fn matmul(a: &JMat, b: &JMat) -> JMat {
        let sp = a[0][0].space();
        let m = b[0].len();
        a.iter()
            .map(|row| {
                (0..m)
                    .map(|j| {
                        let mut acc: Option<Jet> = None;
                        for (k, x) in row.iter().enumerate() {
                            let t = x * &b[k][j];
                            acc = Some(match acc {
                                None => t,
                                Some(s) => &s + &t,
                            });
                        }
                        acc.unwrap_or_else(|| Jet::zero(sp, 0))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn matvec(a: &JMat, x: &[Jet]) -> JVec {
        a.iter()
            .map(|row| {
                let mut acc = &row[0] * &x[0];
                for k in 1..row.len() {
                    acc = &acc + &(&row[k] * &x[k]);
                }
                acc
            })
            .collect()
    }

    /// Bilinear form `x^T a y`.
    pub fn bilinear(a: &JMat, x: &[Jet], y: &[Jet]) -> Jet {
        let ay = matvec(a, y);
        dot(x, &ay)
    }

    pub fn dot(x: &[Jet], y: &[Jet]) -> Jet {
        let mut acc = &x[0] * &y[0];
        for k in 1..x.len() {
            acc = &acc + &(&x[k] * &y[k]);
        }
        acc
    }

    /// Solves `A X = B` (B given column-wise as rows of right-hand sides:
    /// `b[row][col]`) by Gaussian elimination with partial pivoting on the
    /// base-point values.
    pub fn solve(a: &JMat, b: &JMat) -> Result<JMat, Singular> {
        let n = a.len();
        let mut a = a.clone();
        let mut b = b.clone();
        let scale = a
            .iter()
            .flat_map(|r| r.iter().map(|x| x.value().norm()))
            .fold(0.0, f64::max)
            .max(1e-300);
        for k in 0..n {
            let (piv, pval) = (k..n)
                .map(|r| (r, a[r][k].value().norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pval <= 1e-13 * scale {
                return Err(Singular { pivot: pval });
            }
            a.swap(k, piv);
            b.swap(k, piv);
            let inv = a[k][k].recip();
            for j in k..n {
                a[k][j] = &a[k][j] * &inv;
            }
            for j in 0..b[k].len() {
                b[k][j] = &b[k][j] * &inv;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i][k].clone();
                if f.max_abs() == 0.0 {
                    continue;
                }
                for j in k..n {
                    a[i][j] = &a[i][j] - &(&f * &a[k][j]);
                }
                for j in 0..b[i].len() {
                    b[i][j] = &b[i][j] - &(&f * &b[k][j]);
                }
            }
        }
        Ok(b)
    }

    pub fn inverse(a: &JMat) -> Result<JMat, Singular> {
        let sp = a[0][0].space();
        solve(a, &identity(sp, a.len()))
    }

    pub fn solve_vec(a: &JMat, b: &[Jet]) -> Result<JVec, Singular> {
        let cols: JMat = b.iter().map(|x| vec![x.clone()]).collect();
        Ok(solve(a, &cols)?.into_iter().map(|mut r| r.remove(0)).collect())
    }

    /// Determinant value at the base point (LU on values only).
    pub fn det_value(a: &JMat) -> C {
        let n = a.len();
        let mut m: Vec<Vec<C>> = a.iter().map(|r| r.iter().map(|x| x.value()).collect()).collect();
        let mut det = C::new(1.0, 0.0);
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&x, &y| m[x][k].norm().partial_cmp(&m[y][k].norm()).unwrap())
                .unwrap();
            if m[piv][k].norm() == 0.0 {
                return C::new(0.0, 0.0);
            }
            if piv != k {
                m.swap(piv, k);
                det = -det;
            }
            det *= m[k][k];
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    let t = m[k][j];
                    m[i][j] -= f * t;
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn layout_counts() {
        let sp = space(6);
        assert_eq!(sp.len(0), 1);
        assert_eq!(sp.len(1), 7);
        assert_eq!(sp.len(2), 28);
        assert_eq!(sp.len(3), 84);
    }

    #[test]
    fn product_and_derivative() {
        let sp = space(2);
        let x = Jet::var(sp, 0, c(2.0)).truncate(3);
        let y = Jet::var(sp, 1, c(-1.0)).truncate(3);
        // f = x^2 y at (2,-1): f = -4, df/dx = 2xy = -4, df/dy = x^2 = 4.
        let f = &(&x * &x) * &y;
        assert!((f.value() - c(-4.0)).norm() < 1e-15);
        assert!((f.grad(0) - c(-4.0)).norm() < 1e-15);
        assert!((f.grad(1) - c(4.0)).norm() < 1e-15);
        // d^2 f / dx dy = 2x = 4.
        assert!((f.deriv(0).deriv(1).value() - c(4.0)).norm() < 1e-15);
    }

    #[test]
    fn reciprocal_series() {
        let sp = space(1);
        let x = Jet::var(sp, 0, c(0.5)).truncate(3);
        let r = (&x + &Jet::constant(sp, c(1.0))).recip();
        // 1/(1+x) at 0.5: derivatives -1/(1.5)^2, 2/(1.5)^3 (Taylor coeff 1/(1.5)^3).
        assert!((r.value() - c(1.0 / 1.5)).norm() < 1e-15);
        assert!((r.grad(0) - c(-1.0 / 2.25)).norm() < 1e-15);
        assert!((r.coeffs()[2] - c(1.0 / 3.375)).norm() < 1e-15);
    }

    #[test]
    fn jet_solve_matches_inverse() {
        let sp = space(2);
        let x = Jet::var(sp, 0, c(0.3)).truncate(2);
        let y = Jet::var(sp, 1, c(0.7)).truncate(2);
        let one = Jet::constant(sp, c(1.0));
        let a = vec![vec![&one + &x, y.clone()], vec![&x * &y, &one + &(&y * &y)]];
        let inv = mat::inverse(&a).unwrap();
        let prod = mat::matmul(&a, &inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((&prod[i][j] - &Jet::constant(sp, c(e))).max_abs() < 1e-13);
            }
        }
    }
}
