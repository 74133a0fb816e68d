//! Square matrices of truncated series.

use crate::rational::CRat;
use crate::series::TruncSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub n: usize,
    pub entries: Vec<TruncSeries>, // row-major, n x n
}

impl SeriesMatrix {
    pub fn zero(n: usize, dim: usize, cap: u32) -> Self {
        SeriesMatrix {
            n,
            entries: vec![TruncSeries::zero(dim, cap); n * n],
        }
    }

    pub fn identity(n: usize, dim: usize, cap: u32) -> Self {
        let mut m = Self::zero(n, dim, cap);
        for i in 0..n {
            *m.at_mut(i, i) = TruncSeries::one(dim, cap);
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &TruncSeries {
        &self.entries[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut TruncSeries {
        &mut self.entries[i * self.n + j]
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&rhs.entries) {
            *a = a.add(b);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&rhs.entries) {
            *a = a.sub(b);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = a.neg();
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let dim = self.entries[0].n;
        let cap = self.entries[0].cap;
        let mut out = Self::zero(n, dim, cap);
        for i in 0..n {
            for j in 0..n {
                let mut acc = TruncSeries::zero(dim, cap);
                for k in 0..n {
                    acc = acc.add(&self.at(i, k).mul(rhs.at(k, j)));
                }
                *out.at_mut(i, j) = acc;
            }
        }
        out
    }

    pub fn trace(&self) -> TruncSeries {
        let dim = self.entries[0].n;
        let cap = self.entries[0].cap;
        let mut t = TruncSeries::zero(dim, cap);
        for i in 0..self.n {
            t = t.add(self.at(i, i));
        }
        t
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = a.conj();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = self.at(j, i).clone();
            }
        }
        out
    }

    pub fn eval0(&self) -> Vec<CRat> {
        self.entries.iter().map(|s| s.eval0()).collect()
    }

    /// Inverse via the Neumann series, valid when the constant term is the
    /// identity and the remainder has positive valuation. Terminates because
    /// powers of the remainder eventually exceed the degree cap.
    pub fn inverse_unit(&self) -> Self {
        let n = self.n;
        let dim = self.entries[0].n;
        let cap = self.entries[0].cap;
        let id = Self::identity(n, dim, cap);
        let e = self.sub(&id);
        let val = e
            .entries
            .iter()
            .filter_map(|s| s.valuation())
            .min()
            .unwrap_or(cap + 1);
        assert!(val >= 1, "inverse_unit needs identity constant term");
        let kmax = cap / val;
        let mut out = id.clone();
        let mut p = id;
        for _ in 0..kmax {
            p = p.matmul(&e).neg();
            out = out.add(&p);
        }
        out
    }

    pub fn det(&self) -> TruncSeries {
        match self.n {
            1 => self.at(0, 0).clone(),
            2 => self
                .at(0, 0)
                .mul(self.at(1, 1))
                .sub(&self.at(0, 1).mul(self.at(1, 0))),
            3 => {
                let m = |i: usize, j: usize| self.at(i, j);
                let mut acc = m(0, 0).mul(&m(1, 1).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 1))));
                acc = acc.sub(&m(0, 1).mul(&m(1, 0).mul(m(2, 2)).sub(&m(1, 2).mul(m(2, 0)))));
                acc.add(&m(0, 2).mul(&m(1, 0).mul(m(2, 1)).sub(&m(1, 1).mul(m(2, 0)))))
            }
            _ => panic!("det supported up to 3x3"),
        }
    }

    pub fn log_det_unit(&self) -> TruncSeries {
        self.det().log_unit()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::mono_with_exp;

    #[test]
    fn inverse_of_unit_matrix() {
        let dim = 1;
        let cap = 6;
        let z = TruncSeries::var(dim, cap, 0);
        let zb = TruncSeries::var(dim, cap, 1);
        let mut m = SeriesMatrix::identity(1, dim, cap);
        *m.at_mut(0, 0) = TruncSeries::one(dim, cap).add(&z.mul(&zb).scale_int(4));
        let minv = m.inverse_unit();
        let prod = m.matmul(&minv);
        assert_eq!(prod, SeriesMatrix::identity(1, dim, cap));
    }

    #[test]
    fn logdet_matches_hand_expansion() {
        // det = 1 + 4c z z̄ with c = 1/3: log det = 4c t - 8c² t² + ...
        let dim = 1;
        let cap = 4;
        let t = TruncSeries::var(dim, cap, 0).mul(&TruncSeries::var(dim, cap, 1));
        let c = CRat::from_ratio(1, 3);
        let mut m = SeriesMatrix::identity(1, dim, cap);
        *m.at_mut(0, 0) = TruncSeries::one(dim, cap).add(&t.scale(&c.scale_int(4)));
        let ld = m.log_det_unit();
        let m1 = mono_with_exp(mono_with_exp(0, 0, 1), 1, 1);
        let m2 = mono_with_exp(mono_with_exp(0, 0, 2), 1, 2);
        assert_eq!(ld.coeff(m1), CRat::from_ratio(4, 3));
        assert_eq!(ld.coeff(m2), CRat::from_ratio(-8, 9));
    }
}
