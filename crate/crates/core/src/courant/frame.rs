use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{combine, pairing, GSection};
use crate::algebra::{ratfunc_solve, NumericPoint, RatFunc};
use crate::error::{Error, Result};

/// Largest system solved exactly by projections; bigger ones go numeric.
pub const EXACT_DIM_LIMIT: usize = 12;

/// Sections spanning a subbundle.
#[derive(Clone, Debug)]
pub struct FrameBundle {
    pub label: Option<String>,
    sections: Vec<GSection>,
}

impl FrameBundle {
    pub fn new(sections: Vec<GSection>) -> Self {
        FrameBundle {
            label: None,
            sections,
        }
    }

    pub fn labeled(label: &str, sections: Vec<GSection>) -> Self {
        FrameBundle {
            label: Some(label.to_string()),
            sections,
        }
    }

    pub fn sections(&self) -> &[GSection] {
        &self.sections
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn n(&self) -> usize {
        self.sections[0].n()
    }

    pub fn conj(&self) -> FrameBundle {
        FrameBundle {
            label: self.label.as_ref().map(|l| format!("conj({l})")),
            sections: self.sections.iter().map(|s| s.conj()).collect(),
        }
    }

    /// Union of two frames.
    pub fn join(&self, o: &FrameBundle) -> FrameBundle {
        let mut s = self.sections.clone();
        s.extend(o.sections.iter().cloned());
        FrameBundle::new(s)
    }

    /// `4n x k` component matrix.
    pub fn matrix(&self) -> Vec<Vec<RatFunc>> {
        let cols: Vec<Vec<RatFunc>> = self.sections.iter().map(|s| s.comps()).collect();
        let m = cols[0].len();
        (0..m)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect()
    }

    pub fn gram(&self) -> Vec<Vec<RatFunc>> {
        self.sections
            .iter()
            .map(|a| self.sections.iter().map(|b| pairing(a, b)).collect())
            .collect()
    }

    /// Exact isotropy.
    pub fn is_isotropic(&self) -> bool {
        self.gram().iter().flatten().all(|x| x.is_zero())
    }

    /// Exact mutual orthogonality.
    pub fn is_orthogonal_to(&self, o: &FrameBundle) -> bool {
        self.sections
            .iter()
            .all(|a| o.sections.iter().all(|b| pairing(a, b).is_zero()))
    }

    /// Numeric rank at generic values of all `2n` variables.
    pub fn rank_at(&self, vals: &[Complex64]) -> usize {
        let m = numeric_matrix(&self.matrix(), vals);
        m.rank(1e-9 * m.norm().max(1.0))
    }
}

fn numeric_matrix(a: &[Vec<RatFunc>], vals: &[Complex64]) -> DMatrix<Complex64> {
    let r = a.len();
    let c = a[0].len();
    DMatrix::from_fn(r, c, |i, j| a[i][j].eval_vars(vals))
}

/// Fixed generic values for all variables, used to pick nonsingular minors.
pub fn generic_values(n: usize) -> Vec<Complex64> {
    (0..2 * n)
        .map(|v| {
            let v = v as f64;
            Complex64::new(0.37 + 0.113 * v * v, -0.29 + 0.071 * v)
        })
        .collect()
}

/// Rows of `a` forming a nonsingular square minor at generic values.
fn pick_rows(a: &[Vec<RatFunc>], n: usize) -> Vec<usize> {
    let m = numeric_matrix(a, &generic_values(n));
    let k = m.ncols();
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for r in 0..m.nrows() {
        if chosen.len() == k {
            break;
        }
        let mut v: nalgebra::DVector<Complex64> = m.row(r).transpose().into_owned();
        for b in &basis {
            let proj = b.dotc(&v);
            v -= b * proj;
        }
        let nv = v.norm();
        if nv > 1e-9 * (1.0 + m.row(r).norm()) {
            basis.push(v / Complex64::new(nv, 0.0));
            chosen.push(r);
        }
    }
    chosen
}

/// Coefficients `c` with `s = sum c_k F_k`, exact.
pub fn expand_in_frame(s: &GSection, f: &FrameBundle) -> Result<Vec<RatFunc>> {
    let n = s.n();
    let a = f.matrix();
    let b = s.comps();
    let k = f.len();
    let rows = if k == a.len() {
        (0..k).collect()
    } else {
        pick_rows(&a, n)
    };
    if rows.len() < k {
        return Err(Error::Degenerate {
            what: "frame".into(),
            det: 0.0,
        });
    }
    let sa: Vec<Vec<RatFunc>> = rows.iter().map(|&r| a[r].clone()).collect();
    let sb: Vec<RatFunc> = rows.iter().map(|&r| b[r].clone()).collect();
    let x = ratfunc_solve(&sa, &sb)?;
    let back = combine(n, &x, f.sections());
    let res = &back - s;
    if !res.is_zero() {
        return Err(Error::NotInSpan {
            residual: res.to_string(),
        });
    }
    Ok(x)
}

/// Result of a projection: exact where feasible, numeric otherwise.
#[derive(Clone, Debug)]
pub enum Projection {
    Exact(GSection),
    Numeric(Vec<Complex64>),
}

/// Component of `s` in `span(sub)` along `span(complement)`.
///
/// Systems larger than [`EXACT_DIM_LIMIT`] are solved numerically at
/// `fallback`, which must then be supplied.
pub fn project_onto(
    s: &GSection,
    sub: &FrameBundle,
    complement: &FrameBundle,
    fallback: Option<&NumericPoint>,
) -> Result<Projection> {
    let all = sub.join(complement);
    if all.len() > EXACT_DIM_LIMIT {
        let p = fallback.ok_or_else(|| Error::Other("numeric fallback point required".into()))?;
        return Ok(Projection::Numeric(project_onto_at(s, sub, complement, p)?));
    }
    if s.is_zero() {
        return Ok(Projection::Exact(GSection::zero(s.n())));
    }
    let c = expand_in_frame(s, &all)?;
    Ok(Projection::Exact(combine(s.n(), &c[..sub.len()], sub.sections())))
}

/// Numeric projection at a point; returns the `4n` components.
pub fn project_onto_at(
    s: &GSection,
    sub: &FrameBundle,
    complement: &FrameBundle,
    p: &NumericPoint,
) -> Result<Vec<Complex64>> {
    let all = sub.join(complement);
    let a = all.matrix();
    let r = a.len();
    let k = all.len();
    let mut m = DMatrix::<Complex64>::zeros(r, k);
    for i in 0..r {
        for j in 0..k {
            m[(i, j)] = a[i][j].eval(p)?;
        }
    }
    let b = nalgebra::DVector::from_vec(s.eval(p)?);
    let svd = m.clone().svd(true, true);
    let smin = svd.singular_values.min();
    if smin < 1e-10 * svd.singular_values.max().max(1.0) {
        return Err(Error::Degenerate {
            what: "projection frame".into(),
            det: smin,
        });
    }
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Other(e.to_string()))?;
    let mut out = nalgebra::DVector::<Complex64>::zeros(r);
    for j in 0..sub.len() {
        out += m.column(j) * x[j];
    }
    Ok(out.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_expansion_in_standard_frame() {
        let n = 3;
        let f = FrameBundle::new(GSection::standard_frame(n));
        let c = expand_in_frame(&GSection::e(n, 0), &f).unwrap();
        for (k, x) in c.iter().enumerate() {
            assert_eq!(*x, RatFunc::from_int(n, if k == 0 { 1 } else { 0 }));
        }
    }

    #[test]
    fn not_in_span_reported() {
        let n = 2;
        let f = FrameBundle::new(vec![GSection::e(n, 0)]);
        assert!(matches!(
            expand_in_frame(&GSection::f(n, 0), &f),
            Err(Error::NotInSpan { .. })
        ));
    }

    #[test]
    fn flat_projection_keeps_e0() {
        let n = 2;
        let vp = FrameBundle::new((0..n).flat_map(|i| [GSection::e(n, i), GSection::e_bar(n, i)]).collect());
        let vm = FrameBundle::new((0..n).flat_map(|i| [GSection::f(n, i), GSection::f_bar(n, i)]).collect());
        match project_onto(&GSection::e(n, 0), &vp, &vm, None).unwrap() {
            Projection::Exact(s) => assert_eq!(s, GSection::e(n, 0)),
            Projection::Numeric(_) => panic!("expected exact"),
        }
    }
}
