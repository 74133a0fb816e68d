//! Truncated multivariate power series over exact complex rationals.
//!
//! Variables are the holomorphic coordinates `z_1..z_n` (indices `0..n`)
//! followed by their conjugates `z̄_1..z̄_n` (indices `n..2n`). All arithmetic
//! truncates at a fixed total-degree cap, so every operation terminates and
//! the ring laws hold exactly below the cap.

use crate::rational::CRat;
use std::collections::BTreeMap;

/// Packed exponent vector: 8 bits per variable, at most 8 variables.
pub type Mono = u64;

pub fn mono_exp(m: Mono, var: usize) -> u32 {
    ((m >> (8 * var)) & 0xff) as u32
}

pub fn mono_with_exp(m: Mono, var: usize, e: u32) -> Mono {
    let shift = 8 * var;
    (m & !(0xffu64 << shift)) | ((e as u64) << shift)
}

pub fn mono_total_degree(m: Mono, nvars: usize) -> u32 {
    (0..nvars).map(|v| mono_exp(m, v)).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    /// Complex dimension (number of holomorphic variables).
    pub n: usize,
    /// Total-degree cap; coefficients of higher degree are dropped.
    pub cap: u32,
    coeffs: BTreeMap<Mono, CRat>,
}

impl TruncSeries {
    pub fn zero(n: usize, cap: u32) -> Self {
        assert!(2 * n <= 8, "at most 4 complex variables supported");
        TruncSeries {
            n,
            cap,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, cap: u32, c: CRat) -> Self {
        let mut s = Self::zero(n, cap);
        if !c.is_zero() {
            s.coeffs.insert(0, c);
        }
        s
    }

    pub fn one(n: usize, cap: u32) -> Self {
        Self::constant(n, cap, CRat::one())
    }

    /// The coordinate series `z_k` (`var < n`) or `z̄_{var-n}` (`var >= n`).
    pub fn var(n: usize, cap: u32, var: usize) -> Self {
        assert!(var < 2 * n);
        let mut s = Self::zero(n, cap);
        if cap >= 1 {
            s.coeffs.insert(mono_with_exp(0, var, 1), CRat::one());
        }
        s
    }

    pub fn nvars(&self) -> usize {
        2 * self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> CRat {
        self.coeffs.get(&m).cloned().unwrap_or_else(CRat::zero)
    }

    pub fn set_coeff(&mut self, m: Mono, c: CRat) {
        if mono_total_degree(m, self.nvars()) > self.cap {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&m);
        } else {
            self.coeffs.insert(m, c);
        }
    }

    pub fn add_to_coeff(&mut self, m: Mono, c: &CRat) {
        if c.is_zero() || mono_total_degree(m, self.nvars()) > self.cap {
            return;
        }
        let entry = self.coeffs.entry(m).or_insert_with(CRat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    /// Value at the origin (the constant term).
    pub fn eval0(&self) -> CRat {
        self.coeff(0)
    }

    /// Lowest total degree among stored terms, or None for the zero series.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs
            .keys()
            .map(|&m| mono_total_degree(m, self.nvars()))
            .min()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &CRat)> {
        self.coeffs.iter()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.coeffs {
            out.add_to_coeff(*m, c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.coeffs {
            out.add_to_coeff(*m, &-c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn scale(&self, k: &CRat) -> Self {
        if k.is_zero() {
            return Self::zero(self.n, self.cap);
        }
        let mut out = Self::zero(self.n, self.cap);
        for (m, c) in &self.coeffs {
            out.coeffs.insert(*m, c * k);
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&CRat::from_int(k))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_compat(rhs);
        let nv = self.nvars();
        let mut out = Self::zero(self.n, self.cap);
        for (ma, ca) in &self.coeffs {
            let da = mono_total_degree(*ma, nv);
            if da > self.cap {
                continue;
            }
            for (mb, cb) in &rhs.coeffs {
                let db = mono_total_degree(*mb, nv);
                if da + db > self.cap {
                    continue;
                }
                // Exponent fields cannot collide: total degree stays <= cap < 256.
                out.add_to_coeff(ma + mb, &(ca * cb));
            }
        }
        out
    }

    /// Complex conjugate: swaps z^α z̄^β -> z^β z̄^α and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n, self.cap);
        for (m, c) in &self.coeffs {
            let mut mc: Mono = 0;
            for v in 0..self.n {
                mc = mono_with_exp(mc, v, mono_exp(*m, v + self.n));
                mc = mono_with_exp(mc, v + self.n, mono_exp(*m, v));
            }
            out.coeffs.insert(mc, c.conj());
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Partial derivative with respect to variable `var`.
    pub fn deriv(&self, var: usize) -> Self {
        assert!(var < self.nvars());
        let mut out = Self::zero(self.n, self.cap);
        for (m, c) in &self.coeffs {
            let e = mono_exp(*m, var);
            if e == 0 {
                continue;
            }
            let md = mono_with_exp(*m, var, e - 1);
            out.add_to_coeff(md, &c.scale_int(e as i64));
        }
        out
    }

    /// ∂²/∂z_k ∂z̄_l applied as two single derivatives.
    pub fn deriv2(&self, k: usize, lbar: usize) -> Self {
        self.deriv(k).deriv(lbar)
    }

    /// Copy with a lower degree cap, dropping the higher terms.
    pub fn truncated(&self, new_cap: u32) -> Self {
        assert!(new_cap <= self.cap);
        let mut out = Self::zero(self.n, new_cap);
        for (m, c) in &self.coeffs {
            if mono_total_degree(*m, self.nvars()) <= new_cap {
                out.coeffs.insert(*m, c.clone());
            }
        }
        out
    }

    /// log of a series with constant term 1, via log(1+x) = Σ (-1)^{k+1} x^k / k.
    pub fn log_unit(&self) -> Self {
        assert_eq!(self.eval0(), CRat::one(), "log needs unit constant term");
        let x = self.sub(&Self::one(self.n, self.cap));
        let val = match x.valuation() {
            None => return Self::zero(self.n, self.cap),
            Some(v) => v.max(1),
        };
        let kmax = self.cap / val;
        let mut out = Self::zero(self.n, self.cap);
        let mut xp = x.clone();
        for k in 1..=kmax {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&xp.scale(&CRat::from_ratio(sign, k as i64)));
            if k < kmax {
                xp = xp.mul(&x);
            }
        }
        out
    }

    fn check_compat(&self, rhs: &Self) {
        assert_eq!(self.n, rhs.n, "mixed dimensions");
        assert_eq!(self.cap, rhs.cap, "mixed truncation caps");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(n: usize, cap: u32, k: usize) -> TruncSeries {
        TruncSeries::var(n, cap, k)
    }

    #[test]
    fn mul_truncates() {
        let cap = 3;
        let z1 = z(1, cap, 0);
        let zb = z(1, cap, 1);
        let t = z1.mul(&zb); // z z̄, degree 2
        let t2 = t.mul(&t); // degree 4: truncated away
        assert!(t2.is_zero());
        assert_eq!(t.coeff(mono_with_exp(mono_with_exp(0, 0, 1), 1, 1)), CRat::one());
    }

    #[test]
    fn derivative_commutes() {
        let cap = 6;
        let z1 = z(2, cap, 0);
        let z2b = z(2, cap, 3);
        let s = z1.mul(&z1).mul(&z2b).scale(&CRat::from_ratio(3, 7));
        assert_eq!(s.deriv(0).deriv(3), s.deriv(3).deriv(0));
    }

    #[test]
    fn log_of_geometric() {
        // log(1/(1-x)) = x + x²/2 + x³/3 with x = z z̄ (degree cap 6)
        let cap = 6;
        let x = z(1, cap, 0).mul(&z(1, cap, 1));
        let mut inv = TruncSeries::one(1, cap);
        let mut xp = x.clone();
        for _ in 0..3 {
            inv = inv.add(&xp);
            xp = xp.mul(&x);
        }
        let lg = inv.log_unit();
        let mono_k = |k: u32| mono_with_exp(mono_with_exp(0, 0, k), 1, k);
        assert_eq!(lg.coeff(mono_k(1)), CRat::one());
        assert_eq!(lg.coeff(mono_k(2)), CRat::from_ratio(1, 2));
        assert_eq!(lg.coeff(mono_k(3)), CRat::from_ratio(1, 3));
    }

    #[test]
    fn conj_is_involution() {
        let cap = 4;
        let s = z(2, cap, 0)
            .mul(&z(2, cap, 3))
            .scale(&CRat::new(
                num_rational::BigRational::new(1.into(), 3.into()),
                num_rational::BigRational::new(2.into(), 5.into()),
            ))
            .add(&z(2, cap, 1));
        assert_eq!(s.conj().conj(), s);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn ring_laws(seed in 0u64..10_000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let cap = 5u32;
            let rand_series = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut s = TruncSeries::zero(2, cap);
                for _ in 0..6 {
                    let mut m: Mono = 0;
                    let mut left = cap;
                    for v in 0..4 {
                        let e = rng.gen_range(0..=left.min(2));
                        m = mono_with_exp(m, v, e);
                        left -= e;
                    }
                    let num = rng.gen_range(-3i64..=3);
                    let den = rng.gen_range(1i64..=4);
                    s.add_to_coeff(m, &CRat::from_ratio(num, den));
                }
                s
            };
            let a = rand_series(&mut rng);
            let b = rand_series(&mut rng);
            let c = rand_series(&mut rng);
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }
    }
}
