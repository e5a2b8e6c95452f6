//! Fraction-free (Bareiss) elimination over polynomial rings.

use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::AlgebraError;

/// Row-reduced system: upper-triangular `a`, right-hand sides `b`, the
/// final determinant and the column permutation sign.
struct Reduced {
    a: Vec<Vec<Poly>>,
    b: Vec<Vec<Poly>>,
    det: Poly,
}

/// Scales every row so that all entries (matrix and right-hand sides)
/// become polynomials. Row scaling does not change the solution.
fn clear_denominators(a: &[Vec<RatFunc>], b: &[Vec<RatFunc>]) -> (Vec<Vec<Poly>>, Vec<Vec<Poly>>) {
    let mut pa = Vec::with_capacity(a.len());
    let mut pb = Vec::with_capacity(a.len());
    for (ra, rb) in a.iter().zip(b) {
        let mut dens: Vec<Poly> = Vec::new();
        for e in ra.iter().chain(rb.iter()) {
            if !e.den().is_one() && !dens.contains(e.den()) {
                dens.push(e.den().clone());
            }
        }
        let n = ra.first().map(|e| e.n()).unwrap_or(0);
        let mut scale = Poly::one(n);
        for d in &dens {
            scale = &scale * d;
        }
        let conv = |e: &RatFunc| -> Poly {
            if e.den().is_one() {
                e.num() * &scale
            } else {
                let q = scale.div_exact(e.den()).expect("denominator divides row scale");
                e.num() * &q
            }
        };
        pa.push(ra.iter().map(conv).collect());
        pb.push(rb.iter().map(conv).collect());
    }
    (pa, pb)
}

fn bareiss(mut a: Vec<Vec<Poly>>, mut b: Vec<Vec<Poly>>, n: usize) -> Result<Reduced, AlgebraError> {
    let dim = a.len();
    let mut prev = Poly::one(n);
    let mut sign = 1i64;
    for k in 0..dim {
        // Pivot: prefer the nonzero entry with the fewest terms.
        let piv = (k..dim)
            .filter(|&r| !a[r][k].is_zero())
            .min_by_key(|&r| a[r][k].len());
        let Some(piv) = piv else {
            return Err(AlgebraError::SingularMatrix {
                det: "0".to_string(),
            });
        };
        if piv != k {
            a.swap(piv, k);
            b.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..dim {
            for j in k + 1..dim {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.div_exact(&prev).expect("Bareiss exact division");
            }
            for j in 0..b[i].len() {
                let t = &(&b[i][j] * &a[k][k]) - &(&a[i][k] * &b[k][j]);
                b[i][j] = t.div_exact(&prev).expect("Bareiss exact division");
            }
            a[i][k] = Poly::zero(n);
        }
        prev = a[k][k].clone();
    }
    let det = if dim == 0 {
        Poly::one(n)
    } else if sign < 0 {
        -&a[dim - 1][dim - 1]
    } else {
        a[dim - 1][dim - 1].clone()
    };
    Ok(Reduced { a, b, det })
}

/// Determinant of a polynomial matrix by fraction-free elimination.
pub fn det_poly(a: &[Vec<Poly>]) -> Poly {
    let n = a.first().and_then(|r| r.first()).map(|p| p.n()).unwrap_or(0);
    match bareiss(a.to_vec(), vec![Vec::new(); a.len()], n) {
        Ok(r) => r.det,
        Err(_) => Poly::zero(n),
    }
}

/// Determinant of a rational-function matrix.
pub fn det_ratfunc(a: &[Vec<RatFunc>]) -> RatFunc {
    let n = a.first().and_then(|r| r.first()).map(|p| p.n()).unwrap_or(0);
    let mut scale = RatFunc::one(n);
    let rows: Vec<Vec<Poly>> = a
        .iter()
        .map(|row| {
            let (pa, _) = clear_denominators(std::slice::from_ref(row), &[Vec::new()]);
            let p = pa.into_iter().next().unwrap();
            // Factor by which the row was scaled.
            let s = match row.iter().zip(&p).find(|(e, _)| !e.is_zero()) {
                Some((e, q)) => &RatFunc::from_poly(q.clone()) / e,
                None => RatFunc::one(n),
            };
            scale = &scale * &s;
            p
        })
        .collect();
    &RatFunc::from_poly(det_poly(&rows)) / &scale
}

/// Solves `A X = B` exactly for several right-hand sides (columns of `B`,
/// given as `b[row][col]`).
pub fn ratfunc_solve_many(
    a: &[Vec<RatFunc>],
    b: &[Vec<RatFunc>],
) -> Result<Vec<Vec<RatFunc>>, AlgebraError> {
    let dim = a.len();
    if a.iter().any(|r| r.len() != dim) || b.len() != dim {
        return Err(AlgebraError::Shape(format!(
            "expected square {dim}x{dim} system with {dim} right-hand rows"
        )));
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let n = a[0][0].n();
    let ncols = b[0].len();
    let (pa, pb) = clear_denominators(a, b);
    let red = bareiss(pa, pb, n)?;
    let upper = &red.a;
    let d = upper[dim - 1][dim - 1].clone();
    if d.is_zero() {
        return Err(AlgebraError::SingularMatrix {
            det: red.det.to_string(),
        });
    }
    // Fraction-free back substitution: y_i = d * x_i is polynomial.
    let mut x = vec![vec![RatFunc::zero(n); ncols]; dim];
    for c in 0..ncols {
        let mut y = vec![Poly::zero(n); dim];
        for i in (0..dim).rev() {
            let mut acc = &red.b[i][c] * &d;
            for j in i + 1..dim {
                acc = &acc - &(&upper[i][j] * &y[j]);
            }
            y[i] = acc
                .div_exact(&upper[i][i])
                .expect("fraction-free back substitution");
        }
        for i in 0..dim {
            x[i][c] = RatFunc::new(y[i].clone(), d.clone())?;
        }
    }
    Ok(x)
}

/// Solves `A x = b` exactly.
pub fn ratfunc_solve(a: &[Vec<RatFunc>], b: &[RatFunc]) -> Result<Vec<RatFunc>, AlgebraError> {
    let cols: Vec<Vec<RatFunc>> = b.iter().map(|e| vec![e.clone()]).collect();
    Ok(ratfunc_solve_many(a, &cols)?
        .into_iter()
        .map(|mut r| r.remove(0))
        .collect())
}

/// Exact matrix inverse.
pub fn ratfunc_inverse(a: &[Vec<RatFunc>]) -> Result<Vec<Vec<RatFunc>>, AlgebraError> {
    let dim = a.len();
    let n = a.first().and_then(|r| r.first()).map(|e| e.n()).unwrap_or(0);
    let id: Vec<Vec<RatFunc>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { RatFunc::one(n) } else { RatFunc::zero(n) })
                .collect()
        })
        .collect();
    ratfunc_solve_many(a, &id)
}

/// Residual `A x - b`, for verification.
pub fn residual(a: &[Vec<RatFunc>], x: &[RatFunc], b: &[RatFunc]) -> Vec<RatFunc> {
    a.iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut acc = -bi;
            for (aij, xj) in row.iter().zip(x) {
                acc = &acc + &(aij * xj);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;

    fn rf(p: Poly) -> RatFunc {
        RatFunc::from_poly(p)
    }

    #[test]
    fn identity_system() {
        let n = 2;
        let id = vec![
            vec![RatFunc::one(n), RatFunc::zero(n)],
            vec![RatFunc::zero(n), RatFunc::one(n)],
        ];
        let b = vec![rf(Poly::z(n, 0)), rf(Poly::zb(n, 1))];
        assert_eq!(ratfunc_solve(&id, &b).unwrap(), b);
    }

    #[test]
    fn polynomial_two_by_two() {
        let n = 2;
        let z0 = Poly::z(n, 0);
        let z1 = Poly::z(n, 1);
        let a = vec![
            vec![rf(&z0 + &Poly::one(n)), rf(z1.clone())],
            vec![rf(z1.clone()), rf(&z0 - &Poly::from_int(n, 2))],
        ];
        let b = vec![rf(Poly::zb(n, 0)), RatFunc::one(n)];
        let x = ratfunc_solve(&a, &b).unwrap();
        assert!(residual(&a, &x, &b).iter().all(|r| r.is_zero()));
    }

    #[test]
    fn singular_reports_determinant() {
        let n = 1;
        let z = rf(Poly::z(n, 0));
        let a = vec![vec![z.clone(), z.clone()], vec![z.clone(), z.clone()]];
        let err = ratfunc_solve(&a, &[RatFunc::one(n), RatFunc::one(n)]).unwrap_err();
        assert!(matches!(err, AlgebraError::SingularMatrix { .. }));
    }

    #[test]
    fn one_by_one() {
        let n = 1;
        let k = rf(&Poly::z(n, 0) * &Poly::zb(n, 0));
        let rhs = rf(Poly::z(n, 0).scale(&Scalar::i()));
        let x = ratfunc_solve(&[vec![k.clone()]], &[rhs.clone()]).unwrap();
        assert_eq!(&x[0] * &k, rhs);
    }

    #[test]
    fn determinant_of_rational_matrix() {
        let n = 1;
        let z = rf(Poly::z(n, 0));
        let a = vec![
            vec![z.inv().unwrap(), RatFunc::one(n)],
            vec![RatFunc::one(n), z.clone()],
        ];
        assert_eq!(det_ratfunc(&a), RatFunc::zero(n));
    }
}
