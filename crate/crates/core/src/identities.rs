//! Exact algebraic identities on seeded random inputs. Each function builds
//! its inputs from `seed` and returns the first identity that fails.

use crate::algebra::{Poly, RatFunc};
use crate::calculus::{clifford, Form, Spinor};
use crate::courant::{courant_bracket, pairing, TwistH};
use crate::sample;

const N: usize = 2;

pub type Identity = fn(u64) -> Result<(), String>;

/// Every identity with its name.
pub const ALL: [(&str, Identity); 7] = [
    ("polynomial ring axioms", ring_axioms),
    ("rational function field axioms", field_axioms),
    ("Jacobi identity for vector fields", jacobi),
    ("d^2 = 0", d_squared),
    ("Cartan formulas", cartan),
    ("Clifford relation", clifford_relation),
    ("Leibniz identity for the twisted bracket", dorfman_leibniz),
];

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

pub fn ring_axioms(seed: u64) -> Result<(), String> {
    let mut r = sample::rng(seed);
    let p: Vec<Poly> = (0..3).map(|_| sample::poly(&mut r, N, 3, 4, false)).collect();
    let (a, b, c) = (&p[0], &p[1], &p[2]);
    ensure(a + b == b + a, "a + b = b + a")?;
    ensure(&(a + b) + c == a + &(b + c), "(a + b) + c = a + (b + c)")?;
    ensure(a * b == b * a, "ab = ba")?;
    ensure(&(a * b) * c == a * &(b * c), "(ab)c = a(bc)")?;
    ensure(a * &(b + c) == &(a * b) + &(a * c), "a(b + c) = ab + ac")?;
    ensure(a + &Poly::zero(N) == *a, "a + 0 = a")?;
    ensure(a * &Poly::one(N) == *a, "a 1 = a")?;
    ensure((&(-a) + a).is_zero(), "-a + a = 0")
}

pub fn field_axioms(seed: u64) -> Result<(), String> {
    let mut r = sample::rng(seed);
    let a = sample::ratfunc(&mut r, N, 2);
    let b = sample::ratfunc(&mut r, N, 2);
    let c = sample::ratfunc(&mut r, N, 2);
    ensure(&(&a + &b) * &c == &(&a * &c) + &(&b * &c), "(a + b)c = ac + bc")?;
    ensure(&a * &b == &b * &a, "ab = ba")?;
    ensure(&(&a * &b) * &c == &a * &(&b * &c), "(ab)c = a(bc)")?;
    if !b.is_zero() {
        ensure(&(&a / &b) * &b == a, "(a / b) b = a")?;
        let inv = b.inv().map_err(|e| e.to_string())?;
        ensure(&b * &inv == RatFunc::one(N), "b b^-1 = 1")?;
    }
    Ok(())
}

pub fn jacobi(seed: u64) -> Result<(), String> {
    let mut r = sample::rng(seed);
    let f: Vec<_> = (0..3).map(|_| sample::vector_field(&mut r, N, 2)).collect();
    let (x, y, z) = (&f[0], &f[1], &f[2]);
    let j = &(&x.bracket(&y.bracket(z)) + &y.bracket(&z.bracket(x))) + &z.bracket(&x.bracket(y));
    ensure(j.is_zero(), "[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]] = 0")?;
    ensure(x.bracket(y) == -&y.bracket(x), "[X,Y] = -[Y,X]")
}

pub fn d_squared(seed: u64) -> Result<(), String> {
    let mut r = sample::rng(seed);
    let f = Form::function(RatFunc::from_poly(sample::poly(&mut r, N, 3, 4, false)));
    ensure(f.d().d().is_zero(), "d d f = 0")?;
    for k in 1..3 {
        ensure(sample::form(&mut r, N, k, 3).d().d().is_zero(), "d d w = 0")?;
    }
    Ok(())
}

pub fn cartan(seed: u64) -> Result<(), String> {
    let mut r = sample::rng(seed);
    let x = sample::vector_field(&mut r, N, 2);
    let y = sample::vector_field(&mut r, N, 2);
    let xi = sample::form(&mut r, N, 1, 2);
    let w = sample::form(&mut r, N, 2, 2);
    let lhs = xi.lie_derivative(&x).pair(&y);
    let rhs = &x.apply(&xi.pair(&y)) - &xi.pair(&x.bracket(&y));
    ensure(lhs == rhs, "(L_X xi)(Y) = X(xi(Y)) - xi([X,Y])")?;
    let a = w.interior(&x.bracket(&y));
    let b = &w.interior(&y).lie_derivative(&x) - &w.lie_derivative(&x).interior(&y);
    ensure(a == b, "i_[X,Y] = [L_X, i_Y]")?;
    ensure(w.lie_derivative(&x).d() == w.d().lie_derivative(&x), "d L_X = L_X d")
}

/// `a.b.phi + b.a.phi = <a, b> phi` with `<X + xi, Y + eta> = xi(Y) + eta(X)`.
pub fn clifford_relation(seed: u64) -> Result<(), String> {
    let mut r = sample::rng(seed);
    let a = sample::section(&mut r, N, 1);
    let b = sample::section(&mut r, N, 1);
    let phi = Spinor(&sample::form(&mut r, N, 1, 1) + &sample::form(&mut r, N, 2, 1));
    let ab = clifford(&a, &clifford(&b, &phi));
    let ba = clifford(&b, &clifford(&a, &phi));
    ensure(ab.form() + ba.form() == phi.form().mul_fn(&pairing(&a, &b)), "ab + ba = <a,b>")
}

pub fn dorfman_leibniz(seed: u64) -> Result<(), String> {
    let mut r = sample::rng(seed);
    let s: Vec<_> = (0..3).map(|_| sample::section(&mut r, N, 1)).collect();
    let h = TwistH::new(sample::form(&mut r, N, 2, 1).d()).map_err(|e| e.to_string())?;
    let br = |p: &_, q: &_| courant_bracket(p, q, &h);
    let lhs = br(&s[0], &br(&s[1], &s[2]));
    let rhs = &br(&br(&s[0], &s[1]), &s[2]) + &br(&s[1], &br(&s[0], &s[2]));
    ensure((&lhs - &rhs).is_zero(), "[a,[b,c]] = [[a,b],c] + [b,[a,c]]")
}

/// Runs every identity on `cases` consecutive seeds from `seed`; returns
/// `(name, passed, first failure)` per identity.
pub fn run_all(seed: u64, cases: usize) -> Vec<(&'static str, usize, Option<String>)> {
    ALL.iter()
        .map(|&(name, f)| {
            let res = crate::par::map_range(cases, |k| f(seed.wrapping_add(k as u64)));
            let passed = res.iter().filter(|x| x.is_ok()).count();
            let first = res.into_iter().find_map(|x| x.err());
            (name, passed, first)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_holds_on_a_few_seeds() {
        for (name, passed, first) in run_all(123, 4) {
            assert_eq!(passed, 4, "{name}: {first:?}");
        }
    }
}
