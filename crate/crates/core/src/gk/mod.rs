//! Generalized Kähler data on `C^n` deformed by a bivector
//! `eps = 1/2 (sum f_i E_i) ^ (sum g_j F_j)`: Maurer-Cartan residuals,
//! deformed frames, biHermitian extraction, the Hamiltonian and holomorphy
//! checks, and pure-spinor type loci.

pub mod appendix;
pub mod bihermitian;
pub mod checks;
pub mod locus;

use num_complex::Complex64;

use crate::algebra::{Poly, RatFunc, Scalar};
use crate::calculus::{Bivector, VectorField};
use crate::courant::{combine, FrameBundle, GSection};
use crate::error::{Error, Result};

pub use bihermitian::{extract_bihermitian, BiHermitian, ComplexStructurePair, DeformedSource};
pub use locus::{displayed_cubic, general_cubic, type_locus, LocusCheck};

/// Holomorphic coefficient functions `f_i`, `g_i` and the scale `lambda`
/// applied to the `f_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    n: usize,
    f: Vec<Poly>,
    g: Vec<Poly>,
    lambda: Scalar,
}

impl Deformation {
    pub fn new(f: Vec<Poly>, g: Vec<Poly>, lambda: Scalar) -> Result<Self> {
        let n = f.len();
        if n == 0 || g.len() != n {
            return Err(Error::Config(format!("need as many f_i as g_i (got {} and {})", f.len(), g.len())));
        }
        for p in f.iter().chain(&g) {
            if p.n() != n {
                return Err(Error::Config(format!("coefficient {p} lives on C^{}, expected C^{n}", p.n())));
            }
            if !p.is_holomorphic() {
                return Err(Error::Config(format!("coefficient {p} is not holomorphic")));
            }
        }
        Ok(Deformation { n, f, g, lambda })
    }

    pub fn undeformed(n: usize) -> Self {
        Deformation {
            n,
            f: vec![Poly::zero(n); n],
            g: vec![Poly::one(n); n],
            lambda: Scalar::one(),
        }
    }

    /// `g = (0, 0, 1)`, `f = (z0^2, 0, 0)`.
    pub fn solution_i(lambda: Scalar) -> Self {
        let n = 3;
        let z0 = Poly::z(n, 0);
        Deformation {
            n,
            f: vec![&z0 * &z0, Poly::zero(n), Poly::zero(n)],
            g: vec![Poly::zero(n), Poly::zero(n), Poly::one(n)],
            lambda,
        }
    }

    /// `g_i = 1`, `f_i = prod_{j != i} (z_j - z_i)`.
    pub fn solution_ii(lambda: Scalar) -> Self {
        let n = 3;
        let z: Vec<Poly> = (0..n).map(|i| Poly::z(n, i)).collect();
        let f = (0..n)
            .map(|i| {
                let mut p = Poly::one(n);
                for j in (0..n).filter(|&j| j != i) {
                    p = &p * &(&z[j] - &z[i]);
                }
                p
            })
            .collect();
        Deformation {
            n,
            f,
            g: vec![Poly::one(n); n],
            lambda,
        }
    }

    /// `f = (z0^2, z1^2, 0)`, `g_i = 1`: violates the integrability equations.
    pub fn nonintegrable_control(lambda: Scalar) -> Self {
        let n = 3;
        let sq = |i| &Poly::z(n, i) * &Poly::z(n, i);
        Deformation {
            n,
            f: vec![sq(0), sq(1), Poly::zero(n)],
            g: vec![Poly::one(n); n],
            lambda,
        }
    }

    /// Random integrable deformation with `g_i = 1`: each `f_i` is a
    /// quadratic form in the differences `z_k - z_0`, so `sum_p d_p f_i = 0`.
    pub fn random_difference_quadratics<R: rand::Rng>(rng: &mut R, n: usize, lambda: Scalar) -> Self {
        let d: Vec<Poly> = (1..n).map(|k| &Poly::z(n, k) - &Poly::z(n, 0)).collect();
        let f = (0..n)
            .map(|_| {
                let mut p = Poly::zero(n);
                for a in 0..d.len() {
                    for b in a..d.len() {
                        let c = crate::sample::small_scalar(rng, 3);
                        p = &p + &(&d[a] * &d[b]).scale(&c);
                    }
                }
                p
            })
            .collect();
        Deformation {
            n,
            f,
            g: vec![Poly::one(n); n],
            lambda,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> &[Poly] {
        &self.f
    }

    pub fn g(&self) -> &[Poly] {
        &self.g
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn with_lambda(&self, lambda: Scalar) -> Self {
        Deformation { lambda, ..self.clone() }
    }

    /// `lambda f_i`.
    pub fn scaled_f(&self) -> Vec<Poly> {
        self.f.iter().map(|p| p.scale(&self.lambda)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() || self.f.iter().all(|p| p.is_zero()) || self.g.iter().all(|p| p.is_zero())
    }

    pub fn unit_g(&self) -> bool {
        self.g.iter().all(|p| p.is_one())
    }

    /// Whether every `f_i` is annihilated by `sum_p d/dz_p`.
    pub fn translation_invariant_f(&self) -> bool {
        self.f.iter().all(|p| {
            let mut s = Poly::zero(self.n);
            for q in 0..self.n {
                s = &s + &p.d(q);
            }
            s.is_zero()
        })
    }

    /// `sum lambda f_i E_i`.
    pub fn c_section(&self) -> GSection {
        let n = self.n;
        let coeffs: Vec<RatFunc> = self.scaled_f().into_iter().map(RatFunc::from_poly).collect();
        combine(n, &coeffs, &(0..n).map(|i| GSection::e(n, i)).collect::<Vec<_>>())
    }

    /// `sum g_j F_j`.
    pub fn f_section(&self) -> GSection {
        let n = self.n;
        let coeffs: Vec<RatFunc> = self.g.iter().cloned().map(RatFunc::from_poly).collect();
        combine(n, &coeffs, &(0..n).map(|i| GSection::f(n, i)).collect::<Vec<_>>())
    }

    /// `eps = 1/2 (sum lambda f_i E_i) ^ (sum g_j F_j)`.
    pub fn bivector(&self) -> Bivector {
        Bivector::wedge(Scalar::from_ratio(1, 2), self.c_section(), self.f_section())
    }
}

/// Residuals of the two integrability equations, indexed by `(k, q)`, `k < q`.
#[derive(Clone, Debug)]
pub struct McResidual {
    pub first: Vec<((usize, usize), Poly)>,
    pub second: Vec<((usize, usize), Poly)>,
}

impl McResidual {
    pub fn is_zero(&self) -> bool {
        self.first.iter().chain(&self.second).all(|(_, p)| p.is_zero())
    }

    /// Nonzero entries, labelled.
    pub fn nonzero(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (tag, list) in [("first", &self.first), ("second", &self.second)] {
            for ((k, q), p) in list {
                if !p.is_zero() {
                    out.push(format!("{tag}({k},{q}) = {p}"));
                }
            }
        }
        out
    }

    pub fn term_count(&self) -> usize {
        self.first.iter().chain(&self.second).map(|(_, p)| p.len()).sum()
    }
}

/// `sum_p f_p (g_k d_p g_q - g_q d_p g_k)` and
/// `sum_p g_p (f_k d_p f_q - f_q d_p f_k)`, with the scaled `f`.
pub fn mc_residual(d: &Deformation) -> McResidual {
    let n = d.n;
    let f = d.scaled_f();
    let g = &d.g;
    let eq = |a: &[Poly], b: &[Poly], k: usize, q: usize| {
        let mut acc = Poly::zero(n);
        for p in 0..n {
            let t = &(&b[k] * &b[q].d(p)) - &(&b[q] * &b[k].d(p));
            acc = &acc + &(&a[p] * &t);
        }
        acc
    };
    let mut first = Vec::new();
    let mut second = Vec::new();
    for k in 0..n {
        for q in k + 1..n {
            first.push(((k, q), eq(&f, g, k, q)));
            second.push(((k, q), eq(g, &f, k, q)));
        }
    }
    McResidual { first, second }
}

/// Exact certificates attached to a pair of deformed frames.
#[derive(Clone, Debug)]
pub struct FrameCertificates {
    pub integrable: bool,
    pub plus_isotropic: bool,
    pub minus_isotropic: bool,
    pub orthogonal: bool,
    pub orthogonal_to_conjugate: bool,
    /// Numeric rank of all `4n` sections at generic values.
    pub rank: usize,
}

impl FrameCertificates {
    pub fn all_hold(&self, n: usize) -> bool {
        self.integrable
            && self.plus_isotropic
            && self.minus_isotropic
            && self.orthogonal
            && self.orthogonal_to_conjugate
            && self.rank == 4 * n
    }
}

/// `L+ = span{Eb_i + lambda f_i sum_p g_p F_p}` and
/// `L- = span{Fb_i + g_i sum_p lambda f_p E_p}`.
#[derive(Clone, Debug)]
pub struct DeformedFrames {
    def: Deformation,
    pub l_plus: FrameBundle,
    pub l_minus: FrameBundle,
    pub certificates: FrameCertificates,
}

impl DeformedFrames {
    pub fn deformation(&self) -> &Deformation {
        &self.def
    }

    pub fn n(&self) -> usize {
        self.def.n
    }

    /// `V+ = L+ + conj(L+)`.
    pub fn v_plus(&self) -> FrameBundle {
        self.l_plus.join(&self.l_plus.conj())
    }

    /// `V- = L- + conj(L-)`.
    pub fn v_minus(&self) -> FrameBundle {
        self.l_minus.join(&self.l_minus.conj())
    }

    /// Tangent parts of `L+`, spanning `T_{0,1}` for `J+`.
    pub fn t01_plus(&self) -> Vec<VectorField> {
        self.l_plus.sections().iter().map(|s| s.vector().clone()).collect()
    }

    pub fn t01_minus(&self) -> Vec<VectorField> {
        self.l_minus.sections().iter().map(|s| s.vector().clone()).collect()
    }
}

/// Builds the deformed frames. A nonzero integrability residual is an error
/// unless `allow_nonintegrable` is set.
pub fn deformed_frames(d: &Deformation, allow_nonintegrable: bool) -> Result<DeformedFrames> {
    let n = d.n;
    let mc = mc_residual(d);
    let integrable = mc.is_zero();
    if !integrable && !allow_nonintegrable {
        return Err(Error::NonIntegrable(mc.nonzero().join("; ")));
    }
    let f: Vec<RatFunc> = d.scaled_f().into_iter().map(RatFunc::from_poly).collect();
    let g: Vec<RatFunc> = d.g.iter().cloned().map(RatFunc::from_poly).collect();
    let big_f = d.f_section();
    let big_c = d.c_section();
    let plus = (0..n)
        .map(|i| &GSection::e_bar(n, i) + &big_f.mul_fn(&f[i]))
        .collect();
    let minus = (0..n)
        .map(|i| &GSection::f_bar(n, i) + &big_c.mul_fn(&g[i]))
        .collect();
    let l_plus = FrameBundle::labeled("L+", plus);
    let l_minus = FrameBundle::labeled("L-", minus);
    let all = l_plus.join(&l_plus.conj()).join(&l_minus).join(&l_minus.conj());
    let certificates = FrameCertificates {
        integrable,
        plus_isotropic: l_plus.is_isotropic(),
        minus_isotropic: l_minus.is_isotropic(),
        orthogonal: l_plus.is_orthogonal_to(&l_minus),
        orthogonal_to_conjugate: l_plus.is_orthogonal_to(&l_minus.conj()),
        rank: all.rank_at(&crate::courant::generic_values(n)),
    };
    Ok(DeformedFrames {
        def: d.clone(),
        l_plus,
        l_minus,
        certificates,
    })
}

/// Seeded sample points on the unit sphere in `C^n` kept away from a locus
/// where `bad` is small.
pub fn sphere_samples(n: usize, count: usize, seed: u64, bad: impl Fn(&[Complex64]) -> f64) -> Vec<Vec<Complex64>> {
    let pts = crate::sample::sphere_points(n, count, seed, 1e-12, |p| bad(p.coords()) > 1e-6);
    pts.into_iter().map(|p| p.coords().to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tenth() -> Scalar {
        Scalar::from_ratio(1, 10)
    }

    #[test]
    fn named_solutions_are_integrable() {
        assert!(mc_residual(&Deformation::solution_i(tenth())).is_zero());
        assert!(mc_residual(&Deformation::solution_ii(tenth())).is_zero());
        assert!(mc_residual(&Deformation::undeformed(3)).is_zero());
    }

    #[test]
    fn control_is_not_integrable() {
        let r = mc_residual(&Deformation::nonintegrable_control(Scalar::one()));
        assert!(!r.is_zero());
        // (k, q) = (0, 1) of the second equation: 2 z0^2 z1 - 2 z1^2 z0.
        let n = 3;
        let z0 = Poly::z(n, 0);
        let z1 = Poly::z(n, 1);
        let expect = &(&(&z0 * &z0) * &z1).scale(&Scalar::from_int(2)) - &(&(&z1 * &z1) * &z0).scale(&Scalar::from_int(2));
        assert_eq!(r.second[0].1, expect);
        assert!(matches!(
            deformed_frames(&Deformation::nonintegrable_control(Scalar::one()), false),
            Err(Error::NonIntegrable(_))
        ));
        assert!(deformed_frames(&Deformation::nonintegrable_control(Scalar::one()), true).is_ok());
    }

    #[test]
    fn random_difference_quadratics_are_integrable() {
        let mut r = crate::sample::rng(3);
        for _ in 0..3 {
            let d = Deformation::random_difference_quadratics(&mut r, 3, Scalar::one());
            assert!(d.translation_invariant_f());
            assert!(mc_residual(&d).is_zero());
        }
    }

    #[test]
    fn frames_carry_certificates() {
        for d in [Deformation::solution_ii(tenth()), Deformation::solution_i(tenth())] {
            let fr = deformed_frames(&d, false).unwrap();
            assert!(fr.certificates.all_hold(3), "{:?}", fr.certificates);
        }
    }

    #[test]
    fn undeformed_frames_are_standard() {
        let n = 3;
        let fr = deformed_frames(&Deformation::undeformed(n), false).unwrap();
        for i in 0..n {
            assert_eq!(fr.l_plus.sections()[i], GSection::e_bar(n, i));
            assert_eq!(fr.l_minus.sections()[i], GSection::f_bar(n, i));
        }
    }

    #[test]
    fn tangent_parts_match_displayed_spans() {
        let n = 3;
        let d = Deformation::solution_ii(tenth());
        let fr = deformed_frames(&d, false).unwrap();
        let f = d.scaled_f();
        let sum_dz = (0..n).fold(VectorField::zero(n), |acc, p| &acc + &VectorField::d_z(n, p));
        for i in 0..n {
            let f_i = RatFunc::from_poly(f[i].clone());
            let expect = &VectorField::d_zb(n, i) + &sum_dz.mul_fn(&f_i);
            assert_eq!(fr.t01_plus()[i], expect);
            let mut c = VectorField::zero(n);
            for p in 0..n {
                c = &c + &VectorField::d_z(n, p).mul_fn(&RatFunc::from_poly(f[p].clone()));
            }
            assert_eq!(fr.t01_minus()[i], &VectorField::d_zb(n, i) + &c);
        }
    }
}
