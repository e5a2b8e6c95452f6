//! Exact Gaussian-rational scalars, polynomials in `z` and formal `zb`,
//! rational functions, exact linear solves, and numeric evaluation.

pub mod linsolve;
pub mod mono;
pub mod numeric;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod scalar;

pub use linsolve::{det_poly, det_ratfunc, ratfunc_inverse, ratfunc_solve, ratfunc_solve_many};
pub use mono::Mono;
pub use numeric::NumericPoint;
pub use parse::{parse_poly, parse_scalar};
pub use poly::{poly_arith, Poly, PolyOp};
pub use ratfunc::RatFunc;
pub use scalar::Scalar;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("variable context mismatch: {left} vs {right} complex variables")]
    ContextMismatch { left: usize, right: usize },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("singular matrix: determinant is {det}")]
    SingularMatrix { det: String },
    #[error("denominator {value:e} below tolerance {tol:e} (near a pole)")]
    NearPole { value: f64, tol: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// The sphere moment map `sum z_i zb_i - 1`.
pub fn sphere_moment(n: usize) -> Poly {
    let mut mu = Poly::from_int(n, -1);
    for i in 0..n {
        mu = &mu + &(&Poly::z(n, i) * &Poly::zb(n, i));
    }
    mu
}
