//! Seeded random inputs: sphere points and small random exact objects.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Mono, NumericPoint, Poly, RatFunc, Scalar};
use crate::calculus::{Form, VectorField};
use crate::courant::GSection;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the unit sphere in `C^n` (complex Gaussian, normalized).
pub fn sphere_point<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let r = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / r).collect()
}

/// `count` sphere points accepted by `keep` (used to stay off degenerate
/// loci), in seed order.
pub fn sphere_points(
    n: usize,
    count: usize,
    seed: u64,
    tol: f64,
    mut keep: impl FnMut(&NumericPoint) -> bool,
) -> Vec<NumericPoint> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 1000 * (count + 1), "could not sample admissible points");
        let p = NumericPoint::new(sphere_point(&mut r, n), tol);
        if keep(&p) {
            out.push(p);
        }
    }
    out
}

pub fn small_scalar<R: Rng>(rng: &mut R, range: i64) -> Scalar {
    let num = rng.random_range(-range..=range);
    let im = rng.random_range(-range..=range);
    let den = rng.random_range(1..=3);
    &Scalar::gaussian(num, im) * &Scalar::from_ratio(1, den)
}

/// Random polynomial with up to `terms` terms of degree at most `deg`.
pub fn poly<R: Rng>(rng: &mut R, n: usize, deg: u32, terms: usize, holomorphic: bool) -> Poly {
    let nv = if holomorphic { n } else { 2 * n };
    let mut p = Poly::zero(n);
    for _ in 0..terms {
        let d = rng.random_range(0..=deg);
        let mut e = vec![0u16; 2 * n];
        for _ in 0..d {
            e[rng.random_range(0..nv)] += 1;
        }
        let m = Poly::monomial(n, Mono::from_exps(&e), small_scalar(rng, 3));
        p = &p + &m;
    }
    p
}

pub fn ratfunc<R: Rng>(rng: &mut R, n: usize, deg: u32) -> RatFunc {
    let num = poly(rng, n, deg, 3, false);
    let mut den = poly(rng, n, 1, 2, false);
    den = &den + &Poly::from_int(n, 5);
    RatFunc::new(num, den).unwrap_or_else(|_| RatFunc::zero(n))
}

pub fn vector_field<R: Rng>(rng: &mut R, n: usize, deg: u32) -> VectorField {
    VectorField::from_polys(n, (0..2 * n).map(|_| poly(rng, n, deg, 2, false)).collect())
}

pub fn form<R: Rng>(rng: &mut R, n: usize, k: u32, deg: u32) -> Form {
    let mut w = Form::zero(n);
    for _ in 0..3 {
        let mut mask = 0u32;
        while mask.count_ones() < k {
            mask |= 1 << rng.random_range(0..2 * n);
        }
        w = &w + &Form::monomial(n, mask, RatFunc::from_poly(poly(rng, n, deg, 2, false)));
    }
    w
}

pub fn section<R: Rng>(rng: &mut R, n: usize, deg: u32) -> GSection {
    GSection::new(vector_field(rng, n, deg), form(rng, n, 1, deg))
}

/// Real metric `flat + eps * P` where `P` has random polynomial entries of
/// degree at most `deg`, symmetrised so that `conj(g_uv) = g_{u' v'}`.
pub fn real_metric<R: Rng>(rng: &mut R, n: usize, deg: u32) -> Vec<Vec<RatFunc>> {
    use crate::calculus::conj_index;
    let m = 2 * n;
    let eps = Scalar::from_ratio(1, 10);
    let mut g = crate::metric::GenMetric::flat_matrix(n);
    let mut done = vec![vec![false; m]; m];
    for u in 0..m {
        for v in u..m {
            if done[u][v] {
                continue;
            }
            let (cu, cv) = (conj_index(n, u), conj_index(n, v));
            let mut p = poly(rng, n, deg, 2, false).scale(&eps);
            let self_conj = (cu == u && cv == v) || (cu == v && cv == u);
            if self_conj {
                p = &p + &p.conj();
            }
            let add = |g: &mut Vec<Vec<RatFunc>>, a: usize, b: usize, q: &Poly| {
                g[a][b] = &g[a][b] + &RatFunc::from_poly(q.clone());
                if a != b {
                    g[b][a] = &g[b][a] + &RatFunc::from_poly(q.clone());
                }
            };
            add(&mut g, u, v, &p);
            done[u][v] = true;
            done[v][u] = true;
            if !self_conj {
                add(&mut g, cu, cv, &p.conj());
                done[cu][cv] = true;
                done[cv][cu] = true;
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_are_unit_and_seeded() {
        let a = sphere_points(3, 5, 9, 1e-9, |p| p.coords()[0].norm() > 0.1);
        let b = sphere_points(3, 5, 9, 1e-9, |p| p.coords()[0].norm() > 0.1);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.coords(), q.coords());
            let r: f64 = p.coords().iter().map(|c| c.norm_sqr()).sum();
            assert!((r - 1.0).abs() < 1e-12);
            assert!(p.coords()[0].norm() > 0.1);
        }
    }

    #[test]
    fn real_metric_is_symmetric_and_conjugation_invariant() {
        use crate::calculus::conj_index;
        let n = 2;
        let g = real_metric(&mut rng(4), n, 2);
        for u in 0..2 * n {
            for v in 0..2 * n {
                assert_eq!(g[u][v], g[v][u]);
                assert_eq!(g[u][v].conj(), g[conj_index(n, u)][conj_index(n, v)]);
            }
        }
    }
}
