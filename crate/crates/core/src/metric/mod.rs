//! Generalized metrics `(g, b)`, their graph subbundles, Levi-Civita and
//! Bismut connections as exact Christoffel tables, and curvature.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{ratfunc_inverse, NumericPoint, RatFunc, Scalar};
use crate::calculus::{conj_index, Form, VectorField};
use crate::courant::{courant_bracket, FrameBundle, GSection, TwistH};
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<RatFunc>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn scalar(self) -> Scalar {
        match self {
            Sign::Plus => Scalar::one(),
            Sign::Minus => -Scalar::one(),
        }
    }
}

/// Generalized metric: symmetric `g` (components `g(d_u, d_v)` in the
/// coordinate frame), 2-form `b` and the twist of the ambient splitting.
#[derive(Clone, Debug)]
pub struct GenMetric {
    n: usize,
    g: Matrix,
    ginv: Matrix,
    b: Form,
    h: TwistH,
}

impl GenMetric {
    pub fn new(n: usize, g: Matrix, b: Form, h: TwistH) -> Result<Self> {
        let m = 2 * n;
        if g.len() != m || g.iter().any(|r| r.len() != m) {
            return Err(Error::Other(format!("metric must be {m}x{m}")));
        }
        for u in 0..m {
            for v in 0..u {
                if g[u][v] != g[v][u] {
                    return Err(Error::Other("metric is not symmetric".into()));
                }
            }
        }
        let ginv = ratfunc_inverse(&g)?;
        Ok(GenMetric { n, g, ginv, b, h })
    }

    /// `g(d_zi, d_zbj) = delta_ij`, i.e. the flat metric `sum |dz|^2`.
    pub fn flat_matrix(n: usize) -> Matrix {
        let m = 2 * n;
        (0..m)
            .map(|u| {
                (0..m)
                    .map(|v| {
                        if v == conj_index(n, u) {
                            RatFunc::one(n)
                        } else {
                            RatFunc::zero(n)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn flat(n: usize) -> Self {
        GenMetric::new(n, GenMetric::flat_matrix(n), Form::zero(n), TwistH::zero(n))
            .expect("flat metric is nondegenerate")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn ginv(&self) -> &Matrix {
        &self.ginv
    }

    pub fn b(&self) -> &Form {
        &self.b
    }

    pub fn h(&self) -> &TwistH {
        &self.h
    }

    /// `g(X, Y)`.
    pub fn inner(&self, x: &VectorField, y: &VectorField) -> RatFunc {
        let mut acc = RatFunc::zero(self.n);
        for u in 0..2 * self.n {
            if x.comp(u).is_zero() {
                continue;
            }
            for v in 0..2 * self.n {
                if self.g[u][v].is_zero() || y.comp(v).is_zero() {
                    continue;
                }
                acc = &acc + &(&(x.comp(u) * &self.g[u][v]) * y.comp(v));
            }
        }
        acc
    }

    /// The 1-form `g(X, .)`.
    pub fn flat_of(&self, x: &VectorField) -> Form {
        let m = 2 * self.n;
        let c = (0..m)
            .map(|v| {
                let mut acc = RatFunc::zero(self.n);
                for u in 0..m {
                    if !x.comp(u).is_zero() && !self.g[u][v].is_zero() {
                        acc = &acc + &(x.comp(u) * &self.g[u][v]);
                    }
                }
                acc
            })
            .collect();
        Form::one_form(self.n, c)
    }

    /// The vector field `g^{-1}(xi)`.
    pub fn sharp(&self, xi: &Form) -> VectorField {
        let m = 2 * self.n;
        let xc = xi.one_form_comps();
        let c = (0..m)
            .map(|u| {
                let mut acc = RatFunc::zero(self.n);
                for v in 0..m {
                    if !xc[v].is_zero() && !self.ginv[u][v].is_zero() {
                        acc = &acc + &(&self.ginv[u][v] * &xc[v]);
                    }
                }
                acc
            })
            .collect();
        VectorField::from_comps(self.n, c)
    }

    /// Graph section `X + (b +- g)(X)`.
    pub fn graph(&self, x: &VectorField, s: Sign) -> GSection {
        let gx = self.flat_of(x);
        let bx = self.b.interior(x);
        let form = match s {
            Sign::Plus => &bx + &gx,
            Sign::Minus => &bx - &gx,
        };
        GSection::new(x.clone(), form)
    }

    /// Frame of `V+` or `V-` (graphs of the coordinate vectors).
    pub fn v_frame(&self, s: Sign) -> FrameBundle {
        let label = match s {
            Sign::Plus => "V+",
            Sign::Minus => "V-",
        };
        FrameBundle::labeled(
            label,
            (0..2 * self.n)
                .map(|v| self.graph(&VectorField::coord(self.n, v), s))
                .collect(),
        )
    }

    /// Tangent part of the `V+-` component of `Z + eta`:
    /// `(Z +- g^{-1}(eta - b Z)) / 2`.
    pub fn project_tangent(&self, s: &GSection, sign: Sign) -> VectorField {
        let z = s.vector();
        let eta = s.form() - &self.b.interior(z);
        let w = self.sharp(&eta);
        let half = Scalar::from_ratio(1, 2);
        match sign {
            Sign::Plus => (z + &w).scale(&half),
            Sign::Minus => (z - &w).scale(&half),
        }
    }

    /// Numeric Hermitian matrix `g(d_u, conj(d_v))` at a point.
    pub fn hermitian_at(&self, p: &NumericPoint) -> Result<DMatrix<Complex64>> {
        let m = 2 * self.n;
        let mut h = DMatrix::zeros(m, m);
        for u in 0..m {
            for v in 0..m {
                h[(u, v)] = self.g[u][conj_index(self.n, v)].eval(p)?;
            }
        }
        Ok(h)
    }

    /// Smallest eigenvalue of the pairing on `V+` (which is `2g` on real
    /// vectors) at a point. Positive means `V+` is positive definite there.
    pub fn v_plus_min_eigen(&self, p: &NumericPoint) -> Result<f64> {
        let h = self.hermitian_at(p)?;
        let herm = (&h + h.adjoint()) * Complex64::new(1.0, 0.0);
        let e = herm.symmetric_eigenvalues();
        Ok(e.min())
    }

    /// Errors unless `V+` is positive and `V-` negative at every point.
    pub fn check_positivity(&self, pts: &[NumericPoint]) -> Result<f64> {
        let mut min = f64::INFINITY;
        for p in pts {
            min = min.min(self.v_plus_min_eigen(p)?);
        }
        if min <= 0.0 {
            return Err(Error::Positivity { min });
        }
        Ok(min)
    }
}

/// Affine connection `nabla_{d_i} d_j = Gamma^k_{ij} d_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    n: usize,
    /// `gamma[i][j][k]`.
    gamma: Vec<Vec<Vec<RatFunc>>>,
}

impl Connection {
    pub fn new(n: usize, gamma: Vec<Vec<Vec<RatFunc>>>) -> Self {
        Connection { n, gamma }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &RatFunc {
        &self.gamma[i][j][k]
    }

    pub fn is_flat_table(&self) -> bool {
        self.gamma.iter().flatten().flatten().all(|x| x.is_zero())
    }

    /// `nabla_X Y`.
    pub fn covariant(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let m = 2 * self.n;
        let mut c: Vec<RatFunc> = (0..m).map(|k| x.apply(y.comp(k))).collect();
        for i in 0..m {
            if x.comp(i).is_zero() {
                continue;
            }
            for j in 0..m {
                if y.comp(j).is_zero() {
                    continue;
                }
                let xy = x.comp(i) * y.comp(j);
                for (k, ck) in c.iter_mut().enumerate() {
                    let gk = &self.gamma[i][j][k];
                    if !gk.is_zero() {
                        *ck = &*ck + &(&xy * gk);
                    }
                }
            }
        }
        VectorField::from_comps(self.n, c)
    }

    /// `T(X, Y) = nabla_X Y - nabla_Y X - [X, Y]`.
    pub fn torsion(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let a = &self.covariant(x, y) - &self.covariant(y, x);
        &a - &x.bracket(y)
    }

    pub fn difference(&self, o: &Connection) -> Connection {
        let gamma = self
            .gamma
            .iter()
            .zip(&o.gamma)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
                    .collect()
            })
            .collect();
        Connection { n: self.n, gamma }
    }

    /// Residual of metric compatibility `d_i g_jk - g(nabla_i d_j, d_k) - g(d_j, nabla_i d_k)`.
    pub fn metric_defect(&self, g: &Matrix) -> Vec<RatFunc> {
        let m = 2 * self.n;
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                for k in j..m {
                    let mut r = g[j][k].d(i);
                    for l in 0..m {
                        r = &r - &(&self.gamma[i][j][l] * &g[l][k]);
                        r = &r - &(&self.gamma[i][k][l] * &g[j][l]);
                    }
                    out.push(r);
                }
            }
        }
        out
    }
}

/// Levi-Civita connection of `g`.
pub fn levi_civita(gm: &GenMetric) -> Connection {
    let n = gm.n;
    let m = 2 * n;
    let g = &gm.g;
    // First-kind symbols [ij, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2.
    let half = Scalar::from_ratio(1, 2);
    let dg: Vec<Vec<Vec<RatFunc>>> = (0..m)
        .map(|a| (0..m).map(|b| (0..m).map(|c| g[b][c].d(a)).collect()).collect())
        .collect();
    let mut gamma = vec![vec![vec![RatFunc::zero(n); m]; m]; m];
    for i in 0..m {
        for j in i..m {
            let first: Vec<RatFunc> = (0..m)
                .map(|l| (&(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j]).scale(&half))
                .collect();
            for k in 0..m {
                let mut acc = RatFunc::zero(n);
                for (l, f) in first.iter().enumerate() {
                    if !f.is_zero() && !gm.ginv[k][l].is_zero() {
                        acc = &acc + &(&gm.ginv[k][l] * f);
                    }
                }
                gamma[i][j][k] = acc.clone();
                gamma[j][i][k] = acc;
            }
        }
    }
    Connection { n, gamma }
}

/// `nabla +- g^{-1} H / 2`.
pub fn bismut(gm: &GenMetric, h: &TwistH, sign: Sign) -> Connection {
    let lc = levi_civita(gm);
    if h.form().is_zero() {
        return lc;
    }
    let n = gm.n;
    let m = 2 * n;
    let coef = &sign.scalar() * &Scalar::from_ratio(1, 2);
    let mut gamma = lc.gamma;
    let coords: Vec<VectorField> = (0..m).map(|v| VectorField::coord(n, v)).collect();
    for i in 0..m {
        let hi = h.form().interior(&coords[i]);
        for j in 0..m {
            let hij = hi.interior(&coords[j]);
            if hij.is_zero() {
                continue;
            }
            // H(d_i, d_j, d_l) is the coefficient of dx^l in i_j i_i H.
            let hl = hij.one_form_comps();
            for k in 0..m {
                let mut acc = RatFunc::zero(n);
                for l in 0..m {
                    if !hl[l].is_zero() && !gm.ginv[k][l].is_zero() {
                        acc = &acc + &(&gm.ginv[k][l] * &hl[l]);
                    }
                }
                if !acc.is_zero() {
                    gamma[i][j][k] = &gamma[i][j][k] + &acc.scale(&coef);
                }
            }
        }
    }
    Connection { n, gamma }
}

/// Tangent part of the `V+-` projection of `[s_-+(X), s_+-(Y)]_H`.
pub fn bismut_from_graphs(gm: &GenMetric, x: &VectorField, y: &VectorField, sign: Sign) -> VectorField {
    let a = gm.graph(x, sign.flip());
    let b = gm.graph(y, sign);
    let br = courant_bracket(&a, &b, &gm.h);
    gm.project_tangent(&br, sign)
}

/// Christoffel table of the graph construction, column by column.
pub fn bismut_from_graphs_table(gm: &GenMetric, sign: Sign) -> Connection {
    let n = gm.n;
    let m = 2 * n;
    let coords: Vec<VectorField> = (0..m).map(|v| VectorField::coord(n, v)).collect();
    let gamma = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    bismut_from_graphs(gm, &coords[i], &coords[j], sign)
                        .comps()
                        .to_vec()
                })
                .collect()
        })
        .collect();
    Connection { n, gamma }
}

/// Christoffel entries where the graph construction and `nabla +- g^{-1}H/2`
/// disagree, over both signs. Zero means they are the same connection.
pub fn graph_bismut_mismatches(gm: &GenMetric) -> usize {
    [Sign::Plus, Sign::Minus]
        .into_iter()
        .map(|s| {
            let d = bismut_from_graphs_table(gm, s).difference(&bismut(gm, &gm.h, s));
            d.gamma.iter().flatten().flatten().filter(|x| !x.is_zero()).count()
        })
        .sum()
}

/// Riemann tensor: `R(d_i, d_j) d_k = r[i][j][k][l] d_l`.
#[derive(Clone, Debug)]
pub struct Curvature {
    n: usize,
    r: Vec<Vec<Vec<Vec<RatFunc>>>>,
}

impl Curvature {
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> &RatFunc {
        &self.r[i][j][k][l]
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().flatten().flatten().flatten().all(|x| x.is_zero())
    }

    /// `R(X, Y) Z` (tensorial).
    pub fn apply(&self, x: &VectorField, y: &VectorField, z: &VectorField) -> VectorField {
        let m = 2 * self.n;
        let mut c = vec![RatFunc::zero(self.n); m];
        for i in 0..m {
            if x.comp(i).is_zero() {
                continue;
            }
            for j in 0..m {
                if y.comp(j).is_zero() {
                    continue;
                }
                let xy = x.comp(i) * y.comp(j);
                for k in 0..m {
                    if z.comp(k).is_zero() {
                        continue;
                    }
                    let w = &xy * z.comp(k);
                    for (l, cl) in c.iter_mut().enumerate() {
                        let r = &self.r[i][j][k][l];
                        if !r.is_zero() {
                            *cl = &*cl + &(&w * r);
                        }
                    }
                }
            }
        }
        VectorField::from_comps(self.n, c)
    }
}

pub fn riemann_curvature(c: &Connection) -> Curvature {
    let n = c.n;
    let m = 2 * n;
    let mut r = vec![vec![vec![vec![RatFunc::zero(n); m]; m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            if j == i {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    let mut acc = &c.gamma[j][k][l].d(i) - &c.gamma[i][k][l].d(j);
                    for p in 0..m {
                        acc = &acc + &(&c.gamma[j][k][p] * &c.gamma[i][p][l]);
                        acc = &acc - &(&c.gamma[i][k][p] * &c.gamma[j][p][l]);
                    }
                    r[i][j][k][l] = acc;
                }
            }
        }
    }
    Curvature { n, r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{sphere_moment, Poly};

    fn rf(p: Poly) -> RatFunc {
        RatFunc::from_poly(p)
    }

    #[test]
    fn flat_is_flat() {
        let gm = GenMetric::flat(3);
        let lc = levi_civita(&gm);
        assert!(lc.is_flat_table());
        assert!(riemann_curvature(&lc).is_zero());
    }

    #[test]
    fn conformal_metric_is_torsion_free_and_compatible() {
        let n = 2;
        let s = rf(&Poly::one(n) + &sphere_moment(n));
        let s = &s + &RatFunc::one(n);
        let g: Matrix = GenMetric::flat_matrix(n)
            .into_iter()
            .map(|r| r.into_iter().map(|x| &x * &s).collect())
            .collect();
        let gm = GenMetric::new(n, g, Form::zero(n), TwistH::zero(n)).unwrap();
        let lc = levi_civita(&gm);
        assert!(lc.metric_defect(gm.g()).iter().all(|x| x.is_zero()));
        for u in 0..2 * n {
            for v in 0..2 * n {
                let t = lc.torsion(&VectorField::coord(n, u), &VectorField::coord(n, v));
                assert!(t.is_zero());
            }
        }
    }

    #[test]
    fn bismut_torsion_is_h() {
        let n = 2;
        // Constant-coefficient exact H = d(z0 dz1 ^ dzb0).
        let b = Form::dz(n, 1)
            .wedge(&Form::dzb(n, 0))
            .mul_fn(&rf(Poly::z(n, 0)));
        let h = TwistH::new(b.d()).unwrap();
        let gm = GenMetric::flat(n);
        let bp = bismut(&gm, &h, Sign::Plus);
        let bm = bismut(&gm, &h, Sign::Minus);
        let x = VectorField::d_z(n, 0);
        let y = VectorField::d_z(n, 1);
        let z = VectorField::d_zb(n, 0);
        let t = bp.torsion(&x, &y);
        assert_eq!(gm.inner(&t, &z), h.form().eval_on(&[x.clone(), y.clone(), z.clone()]));
        let d = &bp.covariant(&x, &y) - &bm.covariant(&x, &y);
        let hxy = h.form().interior(&x).interior(&y);
        assert_eq!(d, gm.sharp(&hxy));
    }

    #[test]
    fn flat_graph_bracket_of_constants_vanishes() {
        let n = 2;
        let gm = GenMetric::flat(n);
        let x = VectorField::d_z(n, 0);
        let y = VectorField::d_zb(n, 1);
        assert!(bismut_from_graphs(&gm, &x, &y, Sign::Plus).is_zero());
    }

    #[test]
    fn graph_construction_matches_bismut_on_random_metrics() {
        let mut r = crate::sample::rng(3);
        for _ in 0..2 {
            let g = crate::sample::real_metric(&mut r, 2, 1);
            let h = TwistH::new(crate::sample::form(&mut r, 2, 2, 1).d()).unwrap();
            let gm = GenMetric::new(2, g, Form::zero(2), h).unwrap();
            assert_eq!(graph_bismut_mismatches(&gm), 0);
        }
    }
}
