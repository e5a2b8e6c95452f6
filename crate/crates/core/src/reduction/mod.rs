//! Metric reduction by an isotropic trivially extended action.
//!
//! The exact layer here works on the whole chart: the action, its
//! compatibility identities, the distributions `tau+-` / `k+-` and their Gram
//! matrices over rational functions. Quantities that live on a constraint
//! locus or need second derivatives of lifts are evaluated pointwise by
//! [`local`].

pub mod local;

use crate::algebra::{ratfunc_inverse, Poly, RatFunc, Scalar};
use crate::calculus::{rotation_field, Form, VectorField};
use crate::courant::{courant_bracket, pairing, GSection, TwistH};
use crate::error::{Error, Result};
use crate::metric::{GenMetric, Matrix, Sign};

pub use local::{ExactMetric, Local, MetricSource, Setup};

/// Generators `V_a + xi_a`, structure constants `f_ab^c`, optional moment
/// map components and defining functions of an invariant submanifold.
#[derive(Clone, Debug)]
pub struct ExtendedAction {
    n: usize,
    gens: Vec<(VectorField, Form)>,
    structure: Vec<Vec<Vec<Scalar>>>,
    moment: Vec<Poly>,
    constraints: Vec<Poly>,
}

impl ExtendedAction {
    pub fn new(n: usize, gens: Vec<(VectorField, Form)>, structure: Vec<Vec<Vec<Scalar>>>) -> Result<Self> {
        let r = gens.len();
        if r == 0 {
            return Err(Error::InvalidAction("no generators".into()));
        }
        if structure.len() != r || structure.iter().any(|x| x.len() != r || x.iter().any(|y| y.len() != r)) {
            return Err(Error::InvalidAction(format!("structure constants must be {r}x{r}x{r}")));
        }
        for (v, xi) in &gens {
            if v.n() != n || xi.n() != n {
                return Err(Error::InvalidAction("chart mismatch".into()));
            }
            if !(xi.is_zero() || xi.degree() == Some(1)) {
                return Err(Error::InvalidAction("form parts must be 1-forms".into()));
            }
        }
        Ok(ExtendedAction {
            n,
            gens,
            structure,
            moment: Vec::new(),
            constraints: Vec::new(),
        })
    }

    /// Abelian action with the given generators.
    pub fn abelian(n: usize, gens: Vec<(VectorField, Form)>) -> Result<Self> {
        let r = gens.len();
        ExtendedAction::new(n, gens, vec![vec![vec![Scalar::zero(); r]; r]; r])
    }

    /// The diagonal circle action on `C^n` with zero form part, moment map
    /// `|z|^2 - 1`, restricted to the unit sphere.
    pub fn circle(n: usize) -> Self {
        let mu = crate::algebra::sphere_moment(n);
        ExtendedAction::abelian(n, vec![(rotation_field(n), Form::zero(n))])
            .expect("circle action")
            .with_moment(vec![mu.clone()])
            .with_constraints(vec![mu])
    }

    pub fn with_moment(mut self, mu: Vec<Poly>) -> Self {
        self.moment = mu;
        self
    }

    pub fn with_constraints(mut self, s: Vec<Poly>) -> Self {
        self.constraints = s;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[(VectorField, Form)] {
        &self.gens
    }

    pub fn section(&self, a: usize) -> GSection {
        GSection::new(self.gens[a].0.clone(), self.gens[a].1.clone())
    }

    pub fn moment(&self) -> &[Poly] {
        &self.moment
    }

    pub fn constraints(&self) -> &[Poly] {
        &self.constraints
    }

    /// The same action seen in the splitting shifted by `b`:
    /// `xi_a -> xi_a - i_{V_a} b`.
    pub fn in_splitting(&self, b: &Form) -> ExtendedAction {
        let mut out = self.clone();
        for (v, xi) in out.gens.iter_mut() {
            *xi = &*xi - &b.interior(v);
        }
        out
    }

    /// `i_a xi_b + i_b xi_a` for all pairs; all zero iff the image is isotropic.
    pub fn isotropy_residuals(&self) -> Vec<RatFunc> {
        let r = self.rank();
        let mut out = Vec::new();
        for a in 0..r {
            for b in a..r {
                out.push(pairing(&self.section(a), &self.section(b)));
            }
        }
        out
    }

    /// `[V_a + xi_a, V_b + xi_b]_H - f_ab^c (V_c + xi_c)`.
    pub fn equivariance_residuals(&self, h: &TwistH) -> Vec<GSection> {
        let r = self.rank();
        let mut out = Vec::new();
        for a in 0..r {
            for b in 0..r {
                let mut res = courant_bracket(&self.section(a), &self.section(b), h);
                for c in 0..r {
                    let f = &self.structure[a][b][c];
                    if !f.is_zero() {
                        res = &res - &self.section(c).scale(f);
                    }
                }
                out.push(res);
            }
        }
        out
    }

    /// `i_{V_a} H - d xi_a`.
    pub fn twist_residuals(&self, h: &TwistH) -> Vec<Form> {
        self.gens
            .iter()
            .map(|(v, xi)| &h.form().interior(v) - &xi.d())
            .collect()
    }

    /// Runs all exact compatibility checks.
    pub fn validate(&self, h: &TwistH) -> Result<()> {
        if let Some(bad) = self.isotropy_residuals().into_iter().find(|x| !x.is_zero()) {
            return Err(Error::InvalidAction(format!("image not isotropic: {bad}")));
        }
        if let Some(bad) = self.equivariance_residuals(h).into_iter().find(|x| !x.is_zero()) {
            return Err(Error::InvalidAction(format!("bracket not preserved: {bad}")));
        }
        if let Some(bad) = self.twist_residuals(h).into_iter().find(|x| !x.is_zero()) {
            return Err(Error::InvalidAction(format!("i_a H != d xi_a: {bad}")));
        }
        Ok(())
    }
}

/// `V_a^{+-}`, the Gram matrices `T`, `Q`, `K` and their inverses.
#[derive(Clone, Debug)]
pub struct ReductionFrames {
    n: usize,
    pub v: Vec<VectorField>,
    pub xi: Vec<Form>,
    pub v_plus: Vec<VectorField>,
    pub v_minus: Vec<VectorField>,
    pub t: Matrix,
    pub t_inv: Matrix,
    pub q: Matrix,
    pub q_inv: Matrix,
    pub k: Matrix,
    pub k_inv: Matrix,
    g: GenMetric,
}

fn gram(gm: &GenMetric, a: &[VectorField], b: &[VectorField]) -> Matrix {
    a.iter().map(|x| b.iter().map(|y| gm.inner(x, y)).collect()).collect()
}

fn invert(m: &Matrix, what: &str) -> Result<Matrix> {
    ratfunc_inverse(m).map_err(|e| Error::Degenerate {
        what: format!("{what}: {e}"),
        det: 0.0,
    })
}

/// Frames of the reduction on the whole chart. The form parts of `action`
/// must already be written in the metric splitting of `gm`.
pub fn build_frames(action: &ExtendedAction, gm: &GenMetric) -> Result<ReductionFrames> {
    if action.n() != gm.n() {
        return Err(Error::Config("action and metric live on different charts".into()));
    }
    let v: Vec<VectorField> = action.gens.iter().map(|g| g.0.clone()).collect();
    let xi: Vec<Form> = action.gens.iter().map(|g| g.1.clone()).collect();
    let w: Vec<VectorField> = xi.iter().map(|x| gm.sharp(x)).collect();
    let v_plus: Vec<VectorField> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
    let v_minus: Vec<VectorField> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
    let t = gram(gm, &v_plus, &v_plus);
    let q = gram(gm, &v, &v);
    let r = v.len();
    let k: Matrix = (0..r)
        .map(|a| (0..r).map(|b| &q[a][b] - &xi[a].pair(&v[b])).collect())
        .collect();
    Ok(ReductionFrames {
        n: gm.n(),
        t_inv: invert(&t, "T")?,
        q_inv: invert(&q, "Q")?,
        k_inv: invert(&k, "K")?,
        v,
        xi,
        v_plus,
        v_minus,
        t,
        q,
        k,
        g: gm.clone(),
    })
}

impl ReductionFrames {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn metric(&self) -> &GenMetric {
        &self.g
    }

    pub fn k_frame(&self, s: Sign) -> &[VectorField] {
        match s {
            Sign::Plus => &self.v_plus,
            Sign::Minus => &self.v_minus,
        }
    }

    /// `g(Y, V_a) +- xi_a(Y)`: zero iff `Y` lies in `tau+-`.
    pub fn tau_defect(&self, s: Sign, y: &VectorField) -> Vec<RatFunc> {
        self.v
            .iter()
            .zip(&self.xi)
            .map(|(v, xi)| {
                let a = self.g.inner(y, v);
                let b = xi.pair(y);
                match s {
                    Sign::Plus => &a + &b,
                    Sign::Minus => &a - &b,
                }
            })
            .collect()
    }

    /// Projection to `tau+-` along `k+-`.
    pub fn tau_projection(&self, s: Sign, y: &VectorField) -> VectorField {
        let kf = self.k_frame(s);
        let gv = gram(&self.g, kf, kf);
        let inv = invert(&gv, "k frame").expect("T is invertible");
        let mut out = y.clone();
        for a in 0..kf.len() {
            for b in 0..kf.len() {
                let c = &inv[a][b] * &self.g.inner(y, &kf[b]);
                out = &out - &kf[a].mul_fn(&c);
            }
        }
        out
    }

    /// `g(V_a^+, V_b^+) - g(V_a^-, V_b^-)`.
    pub fn t_symmetry_residuals(&self) -> Vec<RatFunc> {
        let tm = gram(&self.g, &self.v_minus, &self.v_minus);
        self.t
            .iter()
            .flatten()
            .zip(tm.iter().flatten())
            .map(|(a, b)| a - b)
            .collect()
    }
}

/// `[pi]^*(xi) = xi - T^{ab} g(xi, xi_a) (V_b + xi_b)` for a basic 1-form.
pub fn pullback_coform(xi: &Form, rf: &ReductionFrames) -> Result<GSection> {
    if !(xi.is_zero() || xi.degree() == Some(1)) {
        return Err(Error::Config("pullback needs a 1-form".into()));
    }
    for v in &rf.v {
        if !xi.pair(v).is_zero() || !xi.lie_derivative(v).is_zero() {
            return Err(Error::InvalidAction("form is not basic".into()));
        }
    }
    let mut out = GSection::from_form(xi.clone());
    let r = rf.v.len();
    let sharp = rf.xi.iter().map(|x| rf.g.sharp(x)).collect::<Vec<_>>();
    for a in 0..r {
        let gxa = xi.pair(&sharp[a]);
        if gxa.is_zero() {
            continue;
        }
        for b in 0..r {
            let c = &rf.t_inv[a][b] * &gxa;
            let sec = GSection::new(rf.v[b].clone(), rf.xi[b].clone());
            out = &out - &sec.mul_fn(&c);
        }
    }
    Ok(out)
}

/// `R^a rho_*(e_a)` for an abelian action with integer weights: each
/// generator acts on the fibre by `i k_a`.
pub fn associated_relative_curvature(r: &[num_complex::Complex64], weights: &[i64]) -> Result<num_complex::Complex64> {
    if r.len() != weights.len() {
        return Err(Error::Config(format!(
            "{} curvature components but {} weights",
            r.len(),
            weights.len()
        )));
    }
    Ok(r.iter()
        .zip(weights)
        .map(|(x, &k)| x * num_complex::Complex64::new(0.0, k as f64))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::VectorField;

    #[test]
    fn circle_action_is_valid_and_t_is_twice_radius() {
        let n = 3;
        let act = ExtendedAction::circle(n);
        act.validate(&TwistH::zero(n)).unwrap();
        let rf = build_frames(&act, &GenMetric::flat(n)).unwrap();
        let r2 = (0..n).fold(Poly::zero(n), |acc, i| &acc + &(&Poly::z(n, i) * &Poly::zb(n, i)));
        assert_eq!(rf.t[0][0], RatFunc::from_poly(r2.scale(&Scalar::from_int(2))));
        assert_eq!(rf.t[0][0], rf.q[0][0]);
        assert!(rf.t_symmetry_residuals().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn tau_projection_lands_in_tau() {
        let n = 2;
        let act = ExtendedAction::circle(n);
        let rf = build_frames(&act, &GenMetric::flat(n)).unwrap();
        let y = VectorField::d_z(n, 0);
        for s in [Sign::Plus, Sign::Minus] {
            let p = rf.tau_projection(s, &y);
            assert!(rf.tau_defect(s, &p).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn non_isotropic_action_rejected() {
        let n = 1;
        let act = ExtendedAction::abelian(n, vec![(VectorField::d_z(n, 0), Form::dz(n, 0))]).unwrap();
        assert!(matches!(act.validate(&TwistH::zero(n)), Err(Error::InvalidAction(_))));
    }

    #[test]
    fn weights_are_linear() {
        let r = [num_complex::Complex64::new(0.5, -1.0)];
        let a = associated_relative_curvature(&r, &[1]).unwrap();
        let b = associated_relative_curvature(&r, &[-1]).unwrap();
        assert_eq!(a, -b);
        assert_eq!(associated_relative_curvature(&r, &[0]).unwrap(), num_complex::Complex64::new(0.0, 0.0));
    }
}
