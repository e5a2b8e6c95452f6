//! BiHermitian data `(g, b, J+, J-)` read off from the deformed frames.
//!
//! `V+ = L+ + conj(L+)` is the graph of `b + g` and `V- = L- + conj(L-)` the
//! graph of `b - g`. With `T` the tangent components of a spanning set and
//! `Phi` the form components, the graph map `M` (with `M(d_u, d_w)` the
//! `dw` coefficient of the image of `d_u`) satisfies `M^T = Phi T^{-1}`.
//! `J` is `T diag(-i, .., -i, i, .., i) T^{-1}` because the tangent parts of
//! `L` span the `-i` eigenspace.

use num_complex::Complex64;

use super::DeformedFrames;
use crate::algebra::{ratfunc_inverse, RatFunc, Scalar};
use crate::calculus::{conj_index, Form};
use crate::courant::FrameBundle;
use crate::error::{Error, Result};
use crate::jet::{mat, mat::JMat, Jet};
use crate::metric::Matrix;
use crate::reduction::local::{ratfunc_jet, MetricSource};

type C = Complex64;

fn rmatmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a[0].len().max(1);
    let zero = RatFunc::zero(a[0][0].n());
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    let mut acc = zero.clone();
                    for k in 0..n {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = &acc + &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn rtranspose(a: &Matrix) -> Matrix {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Tangent and form component matrices (columns are sections).
fn split_matrix(f: &FrameBundle) -> (Matrix, Matrix) {
    let full = f.matrix();
    let m = full.len() / 2;
    (full[..m].to_vec(), full[m..].to_vec())
}

/// `diag(-i x n, i x n)`.
fn eigen_diag(n: usize) -> Vec<Scalar> {
    (0..2 * n)
        .map(|k| if k < n { -Scalar::i() } else { Scalar::i() })
        .collect()
}

/// `J+` and `J-` as endomorphisms of vector components: `(JX)^u = J[u][v] X^v`.
#[derive(Clone, Debug)]
pub struct ComplexStructurePair {
    pub plus: Matrix,
    pub minus: Matrix,
}

/// Exact biHermitian data on the chart.
#[derive(Clone, Debug)]
pub struct BiHermitian {
    n: usize,
    pub g: Matrix,
    pub b: Matrix,
    pub js: ComplexStructurePair,
}

/// Exact extraction by inverting the `2n x 2n` tangent matrices of `V+-`.
pub fn extract_bihermitian(df: &DeformedFrames) -> Result<BiHermitian> {
    let n = df.n();
    let d = eigen_diag(n);
    let mut graphs = Vec::new();
    let mut js = Vec::new();
    for v in [df.v_plus(), df.v_minus()] {
        let (t, phi) = split_matrix(&v);
        let tinv = ratfunc_inverse(&t).map_err(|_| Error::Degenerate {
            what: "tangent projection of V (not a graph)".into(),
            det: 0.0,
        })?;
        graphs.push(rtranspose(&rmatmul(&phi, &tinv)));
        let td: Matrix = t
            .iter()
            .map(|row| row.iter().zip(&d).map(|(x, s)| x.scale(s)).collect())
            .collect();
        js.push(rmatmul(&td, &tinv));
    }
    let half = Scalar::from_ratio(1, 2);
    let m = 2 * n;
    let mut g = vec![vec![RatFunc::zero(n); m]; m];
    let mut b = g.clone();
    for u in 0..m {
        for w in 0..m {
            g[u][w] = (&graphs[0][u][w] - &graphs[1][u][w]).scale(&half);
            b[u][w] = (&graphs[0][u][w] + &graphs[1][u][w]).scale(&half);
        }
    }
    let minus = js.pop().unwrap();
    let plus = js.pop().unwrap();
    Ok(BiHermitian {
        n,
        g,
        b,
        js: ComplexStructurePair { plus, minus },
    })
}

impl BiHermitian {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b_form(&self) -> Form {
        let m = 2 * self.n;
        let mut out = Form::zero(self.n);
        for u in 0..m {
            for w in u + 1..m {
                if !self.b[u][w].is_zero() {
                    out = &out + &Form::monomial(self.n, (1 << u) | (1 << w), self.b[u][w].clone());
                }
            }
        }
        out
    }

    pub fn g_symmetric(&self) -> bool {
        let m = 2 * self.n;
        (0..m).all(|u| (0..u).all(|w| self.g[u][w] == self.g[w][u]))
    }

    pub fn b_antisymmetric(&self) -> bool {
        let m = 2 * self.n;
        (0..m).all(|u| (0..=u).all(|w| (&self.b[u][w] + &self.b[w][u]).is_zero()))
    }

    /// `J^2 = -1`, exactly.
    pub fn j_squares_to_minus_one(&self) -> [bool; 2] {
        let m = 2 * self.n;
        [&self.js.plus, &self.js.minus].map(|j| {
            let sq = rmatmul(j, j);
            (0..m).all(|u| (0..m).all(|v| {
                let id = if u == v { RatFunc::one(self.n) } else { RatFunc::zero(self.n) };
                (&sq[u][v] + &id).is_zero()
            }))
        })
    }

    /// `g(J., J.) = g`, exactly.
    pub fn j_compatible(&self) -> [bool; 2] {
        [&self.js.plus, &self.js.minus].map(|j| rmatmul(&rmatmul(&rtranspose(j), &self.g), j) == self.g)
    }

    /// Every section of `V+` (`V-`) is `X + (b +- g)(X)`, exactly.
    pub fn graphs_match(&self, df: &DeformedFrames) -> [bool; 2] {
        let m = 2 * self.n;
        let check = |v: &FrameBundle, sgn: i64| {
            let s = Scalar::from_int(sgn);
            v.sections().iter().all(|sec| {
                let x = sec.vector().comps();
                let xi = sec.form().one_form_comps();
                (0..m).all(|w| {
                    let mut acc = RatFunc::zero(self.n);
                    for u in 0..m {
                        let mw = &self.b[u][w] + &self.g[u][w].scale(&s);
                        acc = &acc + &(&x[u] * &mw);
                    }
                    acc == xi[w]
                })
            })
        };
        [check(&df.v_plus(), 1), check(&df.v_minus(), -1)]
    }
}

/// Per-point jets of the deformed `(g, b, J+, J-)`.
pub struct DeformedSource {
    n: usize,
    frames: [(Matrix, Matrix); 2],
}

impl DeformedSource {
    pub fn new(df: &DeformedFrames) -> Self {
        DeformedSource {
            n: df.n(),
            frames: [split_matrix(&df.v_plus()), split_matrix(&df.v_minus())],
        }
    }

    fn pieces(&self, vars: &[Jet]) -> Result<[(JMat, JMat); 2]> {
        let jm = |a: &Matrix| -> JMat { a.iter().map(|r| r.iter().map(|x| ratfunc_jet(x, vars)).collect()).collect() };
        let mut out = Vec::new();
        for (t, phi) in &self.frames {
            let t = jm(t);
            let tinv = mat::inverse(&t).map_err(|e| Error::Degenerate {
                what: "tangent projection of V".into(),
                det: e.pivot,
            })?;
            out.push((t, tinv, jm(phi)));
        }
        let mut res = out.into_iter().map(|(t, tinv, phi)| {
            let graph = mat::transpose(&mat::matmul(&phi, &tinv));
            let d: Vec<C> = (0..2 * self.n)
                .map(|k| if k < self.n { C::new(0.0, -1.0) } else { C::new(0.0, 1.0) })
                .collect();
            let td: JMat = t.iter().map(|r| r.iter().zip(&d).map(|(x, s)| x.scale(*s)).collect()).collect();
            (graph, mat::matmul(&td, &tinv))
        });
        let a = res.next().unwrap();
        let b = res.next().unwrap();
        Ok([a, b])
    }

    /// Smallest eigenvalue of the Hermitian form `g(d_u, conj d_v)` at `z`;
    /// positive means `g` is a Riemannian metric there.
    pub fn min_eigen_at(&self, z: &[C]) -> Result<f64> {
        let n = self.n;
        let m = 2 * n;
        let sp = crate::jet::space(m);
        let vars: Vec<Jet> = (0..m)
            .map(|v| Jet::var(sp, v, if v < n { z[v] } else { z[v - n].conj() }))
            .collect();
        let (g, _) = self.jets(&vars)?;
        let h = nalgebra::DMatrix::from_fn(m, m, |u, v| g[u][conj_index(n, v)].value());
        let herm = (&h + h.adjoint()) * C::new(0.5, 0.0);
        Ok(herm.symmetric_eigenvalues().min())
    }
}

impl MetricSource for DeformedSource {
    fn n(&self) -> usize {
        self.n
    }

    fn jets(&self, vars: &[Jet]) -> Result<(JMat, JMat)> {
        let [(p, _), (q, _)] = self.pieces(vars)?;
        let m = 2 * self.n;
        let mut g = p.clone();
        let mut b = p.clone();
        for u in 0..m {
            for w in 0..m {
                g[u][w] = (&p[u][w] - &q[u][w]).scale(C::new(0.5, 0.0));
                b[u][w] = (&p[u][w] + &q[u][w]).scale(C::new(0.5, 0.0));
            }
        }
        Ok((g, b))
    }

    fn complex_structures(&self, vars: &[Jet]) -> Result<Option<(JMat, JMat)>> {
        let [(_, jp), (_, jm)] = self.pieces(vars)?;
        Ok(Some((jp, jm)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gk::{deformed_frames, Deformation};
    use crate::metric::GenMetric;

    #[test]
    fn undeformed_extraction_is_flat() {
        let df = deformed_frames(&Deformation::undeformed(3), false).unwrap();
        let bh = extract_bihermitian(&df).unwrap();
        assert_eq!(bh.g, GenMetric::flat_matrix(3));
        assert!(bh.b_form().is_zero());
        assert_eq!(bh.js.plus, bh.js.minus);
        assert_eq!(bh.j_squares_to_minus_one(), [true, true]);
    }

    #[test]
    fn solution_ii_exact_structure() {
        let df = deformed_frames(&Deformation::solution_ii(Scalar::from_ratio(1, 10)), false).unwrap();
        let t0 = std::time::Instant::now();
        let bh = extract_bihermitian(&df).unwrap();
        eprintln!("extract {:?}", t0.elapsed());
        assert!(bh.g_symmetric());
        assert!(bh.b_antisymmetric());
        assert_eq!(bh.graphs_match(&df), [true, true]);
        eprintln!("graphs {:?}", t0.elapsed());
        assert_eq!(bh.j_squares_to_minus_one(), [true, true]);
        eprintln!("jsq {:?}", t0.elapsed());
        assert_eq!(bh.j_compatible(), [true, true]);
        eprintln!("compat {:?}", t0.elapsed());
    }

    #[test]
    fn jets_agree_with_exact_extraction() {
        let df = deformed_frames(&Deformation::solution_ii(Scalar::from_ratio(1, 10)), false).unwrap();
        let bh = extract_bihermitian(&df).unwrap();
        let src = DeformedSource::new(&df);
        let z = [C::new(0.5, 0.1), C::new(-0.3, 0.6), C::new(0.2, -0.4)];
        let n = 3;
        let sp = crate::jet::space(6);
        let vars: Vec<Jet> = (0..6).map(|v| Jet::var(sp, v, if v < n { z[v] } else { z[v - n].conj() })).collect();
        let vals: Vec<C> = vars.iter().map(|v| v.value()).collect();
        let (g, b) = src.jets(&vars).unwrap();
        let (jp, _) = src.complex_structures(&vars).unwrap().unwrap();
        for u in 0..6 {
            for w in 0..6 {
                assert!((g[u][w].value() - bh.g[u][w].eval_vars(&vals)).norm() < 1e-12);
                assert!((b[u][w].value() - bh.b[u][w].eval_vars(&vals)).norm() < 1e-12);
                assert!((jp[u][w].value() - bh.js.plus[u][w].eval_vars(&vals)).norm() < 1e-12);
            }
        }
        assert!(src.min_eigen_at(&z).unwrap() > 0.0);
    }
}
