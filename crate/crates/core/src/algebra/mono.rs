use std::cmp::Ordering;

/// Maximum number of polynomial variables (holomorphic plus conjugate).
pub const MAX_VARS: usize = 8;

const BITS: u32 = 16;
const MASK: u128 = 0xffff;

/// Exponent vector packed into 16-bit lanes, variable 0 in the most
/// significant lane. Ordering is graded lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono {
    deg: u32,
    packed: u128,
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg
            .cmp(&other.deg)
            .then_with(|| self.packed.cmp(&other.packed))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[inline]
fn shift(var: usize) -> u32 {
    (MAX_VARS as u32 - 1 - var as u32) * BITS
}

impl Mono {
    pub const ONE: Mono = Mono { deg: 0, packed: 0 };

    pub fn var(v: usize) -> Self {
        Mono::ONE.with_exp(v, 1)
    }

    pub fn from_exps(exps: &[u16]) -> Self {
        let mut m = Mono::ONE;
        for (v, &e) in exps.iter().enumerate() {
            m = m.with_exp(v, e);
        }
        m
    }

    #[inline]
    pub fn exp(&self, v: usize) -> u16 {
        ((self.packed >> shift(v)) & MASK) as u16
    }

    pub fn with_exp(&self, v: usize, e: u16) -> Self {
        let old = self.exp(v) as u32;
        let packed = (self.packed & !(MASK << shift(v))) | ((e as u128) << shift(v));
        Mono {
            deg: self.deg - old + e as u32,
            packed,
        }
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg
    }

    #[inline]
    pub fn mul(&self, o: &Mono) -> Mono {
        Mono {
            deg: self.deg + o.deg,
            packed: self.packed + o.packed,
        }
    }

    pub fn divides(&self, o: &Mono) -> bool {
        (0..MAX_VARS).all(|v| self.exp(v) <= o.exp(v))
    }

    /// `o / self` when `self` divides `o`.
    pub fn div_into(&self, o: &Mono) -> Option<Mono> {
        if self.divides(o) {
            Some(Mono {
                deg: o.deg - self.deg,
                packed: o.packed - self.packed,
            })
        } else {
            None
        }
    }

    /// Componentwise minimum (gcd of monomials).
    pub fn gcd(&self, o: &Mono) -> Mono {
        let mut m = Mono::ONE;
        for v in 0..MAX_VARS {
            m = m.with_exp(v, self.exp(v).min(o.exp(v)));
        }
        m
    }

    /// Swap the holomorphic and conjugate halves for an `n`-dimensional chart.
    pub fn conj(&self, n: usize) -> Mono {
        let mut m = Mono::ONE;
        for i in 0..n {
            m = m.with_exp(i, self.exp(n + i)).with_exp(n + i, self.exp(i));
        }
        m
    }

    pub fn exps(&self, nvars: usize) -> Vec<u16> {
        (0..nvars).map(|v| self.exp(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = Mono::from_exps(&[2, 0]);
        let b = Mono::from_exps(&[1, 1]);
        let c = Mono::from_exps(&[0, 3]);
        assert!(a > b);
        assert!(c > a);
        assert_eq!(a.mul(&b), Mono::from_exps(&[3, 1]));
        assert_eq!(b.div_into(&a.mul(&b)), Some(a));
        assert_eq!(a.div_into(&b), None);
    }

    #[test]
    fn conj_swaps_halves() {
        let m = Mono::from_exps(&[1, 0, 2, 3]);
        assert_eq!(m.conj(2), Mono::from_exps(&[2, 3, 1, 0]));
    }
}
