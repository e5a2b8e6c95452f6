//! Text syntax for polynomials and linear expressions in named symbols.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 'i' | ident | '(' expr ')'
//! ident  := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! `z<k>` and `zb<k>` are polynomial variables, `i` is the imaginary unit.
//! Any other identifier is a symbol whose meaning is supplied by the caller.
//! Division is only allowed by constants.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::Poly;
use super::scalar::Scalar;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    I,
    Var(usize),
    Sym { name: String, pos: usize },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>, usize),
    Div(Box<Expr>, Box<Expr>, usize),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

fn err(pos: usize, msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse {
        pos,
        msg: msg.into(),
    }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, AlgebraError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, AlgebraError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    let p = self.pos;
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?), p);
                }
                Some(b'/') => {
                    let p = self.pos;
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), p);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, AlgebraError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.peek() == Some(b'+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, AlgebraError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(err(start, "expected integer exponent"));
            }
            let e: u32 = digits
                .parse()
                .map_err(|_| err(start, "exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Expr, AlgebraError> {
        let Some(c) = self.peek() else {
            return Err(err(self.pos, "unexpected end of input"));
        };
        let start = self.pos;
        if c.is_ascii_digit() {
            let d = self.digits();
            let v: BigInt = d.parse().map_err(|_| err(start, "bad integer"))?;
            return Ok(Expr::Num(BigRational::from_integer(v)));
        }
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(err(self.pos, "expected ')'"));
            }
            self.pos += 1;
            return Ok(e);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            if name == "i" {
                return Ok(Expr::I);
            }
            if let Some(v) = var_index(&name, self.n) {
                return Ok(Expr::Var(v));
            }
            return Ok(Expr::Sym { name, pos: start });
        }
        Err(err(start, format!("unexpected character '{}'", c as char)))
    }
}

/// Index of `z<k>` / `zb<k>` in an `n`-dimensional chart.
pub fn var_index(name: &str, n: usize) -> Option<usize> {
    let (base, off) = if let Some(r) = name.strip_prefix("zb") {
        (r, n)
    } else if let Some(r) = name.strip_prefix('z') {
        (r, 0)
    } else {
        return None;
    };
    if base.is_empty() || !base.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let k: usize = base.parse().ok()?;
    (k < n).then_some(k + off)
}

/// Parses `src` into an expression tree for an `n`-dimensional chart.
pub fn parse_expr(src: &str, n: usize) -> Result<Expr, AlgebraError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        n,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(err(p.pos, "trailing input"));
    }
    Ok(e)
}

/// Evaluates an expression tree as a polynomial; symbols are rejected.
pub fn eval_poly(e: &Expr, n: usize) -> Result<Poly, AlgebraError> {
    Ok(match e {
        Expr::Num(r) => Poly::constant(n, Scalar::from(r.clone())),
        Expr::I => Poly::constant(n, Scalar::i()),
        Expr::Var(v) => Poly::var(n, *v),
        Expr::Sym { name, pos } => {
            if name.starts_with('z') {
                return Err(err(*pos, format!("unknown variable '{name}'")));
            }
            return Err(err(*pos, format!("unexpected symbol '{name}' in polynomial")));
        }
        Expr::Add(a, b) => &eval_poly(a, n)? + &eval_poly(b, n)?,
        Expr::Sub(a, b) => &eval_poly(a, n)? - &eval_poly(b, n)?,
        Expr::Mul(a, b, _) => &eval_poly(a, n)? * &eval_poly(b, n)?,
        Expr::Div(a, b, pos) => {
            let d = eval_poly(b, n)?;
            let c = d
                .constant_value()
                .ok_or_else(|| err(*pos, "division by a non-constant"))?;
            let inv = c.inv().ok_or_else(|| err(*pos, "division by zero"))?;
            eval_poly(a, n)?.scale(&inv)
        }
        Expr::Neg(a) => -eval_poly(a, n)?,
        Expr::Pow(a, k) => eval_poly(a, n)?.pow(*k),
    })
}

/// Parses a polynomial in `z0..z{n-1}`, `zb0..zb{n-1}`.
pub fn parse_poly(src: &str, n: usize) -> Result<Poly, AlgebraError> {
    eval_poly(&parse_expr(src, n)?, n)
}

/// Parses a scalar such as `1/10`, `-3`, `2*i`.
pub fn parse_scalar(src: &str) -> Result<Scalar, AlgebraError> {
    let p = parse_poly(src, 1)?;
    p.constant_value()
        .ok_or_else(|| err(0, "expected a constant"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_display() {
        let n = 3;
        let p = parse_poly("(z1 - z0)*(z2 - z0)", n).unwrap();
        assert_eq!(p.to_string(), "z0^2 - z0*z1 - z0*z2 + z1*z2");
        assert_eq!(parse_poly(&p.to_string(), n).unwrap(), p);
    }

    #[test]
    fn complex_coefficients() {
        let p = parse_poly("i*z0 - (1 - 3*i)*zb1/2", 2).unwrap();
        assert_eq!(parse_poly(&p.to_string(), 2).unwrap(), p);
    }

    #[test]
    fn error_positions() {
        match parse_poly("z0 + * z1", 2) {
            Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_poly("z7", 2),
            Err(AlgebraError::Parse { pos: 0, .. })
        ));
        assert!(parse_poly("z0/z1", 2).is_err());
    }

    #[test]
    fn scalar_text() {
        assert_eq!(parse_scalar("1/10").unwrap(), Scalar::from_ratio(1, 10));
    }
}
