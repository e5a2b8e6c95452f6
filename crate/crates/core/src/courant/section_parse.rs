//! Linear combinations of named sections with polynomial coefficients.
//!
//! Names: `E<i>`, `F<i>`, `Eb<i>`, `Fb<i>` (the standard frame and its
//! conjugate), `D_z<i>`, `D_zb<i>` (coordinate vectors) and `dz<i>`,
//! `dzb<i>` (coordinate 1-forms). Coefficients use the polynomial syntax.

use super::GSection;
use crate::algebra::parse::{eval_poly, parse_expr, Expr};
use crate::algebra::{AlgebraError, Poly, RatFunc};
use crate::calculus::{Form, VectorField};

enum Value {
    Scalar(Poly),
    Section(GSection),
}

fn err(pos: usize, msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse {
        pos,
        msg: msg.into(),
    }
}

fn index(rest: &str, n: usize) -> Option<usize> {
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let k: usize = rest.parse().ok()?;
    (k < n).then_some(k)
}

fn named(name: &str, n: usize) -> Option<GSection> {
    // Longest prefixes first.
    let table: [(&str, fn(usize, usize) -> GSection); 8] = [
        ("D_zb", |n, i| GSection::from_vector(VectorField::d_zb(n, i))),
        ("D_z", |n, i| GSection::from_vector(VectorField::d_z(n, i))),
        ("dzb", |n, i| GSection::from_form(Form::dzb(n, i))),
        ("dz", |n, i| GSection::from_form(Form::dz(n, i))),
        ("Eb", GSection::e_bar),
        ("Fb", GSection::f_bar),
        ("E", GSection::e),
        ("F", GSection::f),
    ];
    for (p, mk) in table {
        if let Some(rest) = name.strip_prefix(p) {
            return index(rest, n).map(|i| mk(n, i));
        }
    }
    None
}

fn eval(e: &Expr, n: usize) -> Result<Value, AlgebraError> {
    let section_or = |v: Value, pos: usize| -> Result<GSection, AlgebraError> {
        match v {
            Value::Section(s) => Ok(s),
            Value::Scalar(p) if p.is_zero() => Ok(GSection::zero(n)),
            Value::Scalar(_) => Err(err(pos, "cannot add a scalar to a section")),
        }
    };
    Ok(match e {
        Expr::Sym { name, pos } => match named(name, n) {
            Some(s) => Value::Section(s),
            None => return Err(err(*pos, format!("unknown section '{name}'"))),
        },
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (x, y) = (eval(a, n)?, eval(b, n)?);
            let neg = matches!(e, Expr::Sub(..));
            match (x, y) {
                (Value::Scalar(p), Value::Scalar(q)) => {
                    Value::Scalar(if neg { &p - &q } else { &p + &q })
                }
                (x, y) => {
                    let (s, t) = (section_or(x, 0)?, section_or(y, 0)?);
                    Value::Section(if neg { &s - &t } else { &s + &t })
                }
            }
        }
        Expr::Mul(a, b, pos) => match (eval(a, n)?, eval(b, n)?) {
            (Value::Scalar(p), Value::Scalar(q)) => Value::Scalar(&p * &q),
            (Value::Scalar(p), Value::Section(s)) | (Value::Section(s), Value::Scalar(p)) => {
                Value::Section(s.mul_fn(&RatFunc::from_poly(p)))
            }
            _ => return Err(err(*pos, "product of two sections")),
        },
        Expr::Div(a, b, pos) => {
            let d = eval_poly(b, n)?;
            let c = d
                .constant_value()
                .and_then(|c| c.inv())
                .ok_or_else(|| err(*pos, "division by a non-constant or zero"))?;
            match eval(a, n)? {
                Value::Scalar(p) => Value::Scalar(p.scale(&c)),
                Value::Section(s) => Value::Section(s.scale(&c)),
            }
        }
        Expr::Neg(a) => match eval(a, n)? {
            Value::Scalar(p) => Value::Scalar(-p),
            Value::Section(s) => Value::Section(-&s),
        },
        other => Value::Scalar(eval_poly(other, n)?),
    })
}

/// Parses a section expression such as `z1*E0 - (z0 + zb2)*Fb1`.
pub fn parse_section(src: &str, n: usize) -> Result<GSection, AlgebraError> {
    match eval(&parse_expr(src, n)?, n)? {
        Value::Section(s) => Ok(s),
        Value::Scalar(p) if p.is_zero() => Ok(GSection::zero(n)),
        Value::Scalar(_) => Err(err(0, "expression is a scalar, not a section")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_sections() {
        let n = 3;
        let s = parse_section("E0 - F0", n).unwrap();
        assert_eq!(s, GSection::from_form(Form::dzb(n, 0).scale(&2.into())));
        let t = parse_section("z1*Eb2 + dz0/2", n).unwrap();
        assert_eq!(t.form().coeff(1), RatFunc::constant(n, crate::algebra::Scalar::from_ratio(1, 2)));
    }

    #[test]
    fn reports_position() {
        match parse_section("E0 + Q1", 3) {
            Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_section("E0 * F0", 3).is_err());
        assert!(parse_section("E0 +", 3).is_err());
    }
}
