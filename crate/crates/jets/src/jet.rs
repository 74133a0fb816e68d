//! Kähler potential jets in geodesic normal holomorphic coordinates and the
//! curvature data derived from them by exact series arithmetic.
//!
//! Conventions, fixed once for the whole crate:
//!   - the metric coefficient matrix is `ω_{k,l̄} = ∂²φ/∂z_k∂z̄_l`, equal to
//!     the identity at the origin with vanishing first derivatives;
//!   - `ω^{p,l̄}` is the (p,l) entry of the inverse coefficient matrix;
//!   - Ricci coefficients are `R_{k,l̄} = -∂²_{k,l̄} log det ω`;
//!   - `R'_{k,l̄} = R_{k,l̄} + ∂²_{k,l̄} f`, and the endomorphism coefficients
//!     of the weighted Ricci form are `𝓡_{k,l̄} = 2 R'_{k,p̄} ω^{p,l̄}`;
//!   - curvature coefficients at the origin: `Rm^{r,p̄}_{k,l̄} = -2 ∂²_{k,l̄} ω_{p,r̄}(0)`.

use crate::matrix::SeriesMatrix;
use crate::rational::CRat;
use crate::series::{mono_with_exp, Mono, TruncSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Error for a derivative request past what the degree cap supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeOverflow {
    pub needed: u32,
    pub have: u32,
}

impl std::fmt::Display for DegreeOverflow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "degree cap {} too small, need at least {}",
            self.have, self.needed
        )
    }
}

impl std::error::Error for DegreeOverflow {}

/// A Kähler potential together with an optional real weight-function jet.
#[derive(Clone, Debug)]
pub struct PotentialJet {
    pub n: usize,
    pub cap: u32,
    pub phi: TruncSeries,
    pub f: TruncSeries,
}

fn enumerate_tuples(n: usize, total_max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![];
    let mut cur = vec![0u32; n];
    fn rec(n: usize, pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == n {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(n, pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    rec(n, 0, total_max, &mut cur, &mut out);
    out
}

fn tuple_degree(t: &[u32]) -> u32 {
    t.iter().sum()
}

fn mono_from_tuples(n: usize, alpha: &[u32], beta: &[u32]) -> Mono {
    let mut m: Mono = 0;
    for (v, &e) in alpha.iter().enumerate() {
        m = mono_with_exp(m, v, e);
    }
    for (v, &e) in beta.iter().enumerate() {
        m = mono_with_exp(m, v + n, e);
    }
    m
}

fn small_rational(rng: &mut ChaCha8Rng) -> CRat {
    let num = rng.gen_range(-3i64..=3);
    let den = rng.gen_range(1i64..=4);
    CRat::from_ratio(num, den)
}

fn small_complex(rng: &mut ChaCha8Rng) -> CRat {
    let re = small_rational(rng);
    let im = small_rational(rng);
    CRat::new(re.re, im.re)
}

impl PotentialJet {
    /// Flat model: φ = Σ z_k z̄_k, f = 0.
    pub fn flat(n: usize, cap: u32) -> Self {
        let mut phi = TruncSeries::zero(n, cap);
        for k in 0..n {
            phi = phi.add(&TruncSeries::var(n, cap, k).mul(&TruncSeries::var(n, cap, k + n)));
        }
        PotentialJet {
            n,
            cap,
            phi,
            f: TruncSeries::zero(n, cap),
        }
    }

    /// Round model in n = 1: φ = 4 log(1 + z z̄ / 4), the constant-curvature
    /// metric with ω(0) = 1, Gauss curvature 1 and total area 4π.
    pub fn round_dim1(cap: u32) -> Self {
        let mut phi = TruncSeries::zero(1, cap);
        let kmax = cap / 2;
        for k in 1..=kmax {
            // coefficient of (z z̄)^k in 4 log(1 + t/4): (-1)^{k+1} / (k 4^{k-1})
            let sign = if k % 2 == 1 { 1i64 } else { -1i64 };
            let den = (k as i64) * 4i64.pow(k - 1);
            let m = mono_with_exp(mono_with_exp(0, 0, k), 1, k);
            phi.set_coeff(m, CRat::from_ratio(sign, den));
        }
        PotentialJet {
            n: 1,
            cap,
            phi,
            f: TruncSeries::zero(1, cap),
        }
    }

    /// Seeded random normal-coordinate potential plus a random real f-jet.
    ///
    /// Potential terms satisfy |α| ≥ 2, |β| ≥ 2 and reality c_{βα} = conj(c_{αβ}),
    /// so the metric is the identity at the origin with vanishing first
    /// derivatives. The f-jet is an arbitrary real polynomial of degree ≥ 1.
    pub fn random(seed: u64, n: usize, cap: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut jet = Self::flat(n, cap);
        let tuples = enumerate_tuples(n, cap);

        for (ia, alpha) in tuples.iter().enumerate() {
            if tuple_degree(alpha) < 2 {
                continue;
            }
            for (ib, beta) in tuples.iter().enumerate() {
                if ib < ia || tuple_degree(beta) < 2 {
                    continue;
                }
                if tuple_degree(alpha) + tuple_degree(beta) > cap {
                    continue;
                }
                if !rng.gen_bool(0.6) {
                    continue;
                }
                if ia == ib {
                    let c = small_rational(&mut rng);
                    jet.phi.add_to_coeff(mono_from_tuples(n, alpha, beta), &c);
                } else {
                    let c = small_complex(&mut rng);
                    jet.phi.add_to_coeff(mono_from_tuples(n, alpha, beta), &c);
                    jet.phi
                        .add_to_coeff(mono_from_tuples(n, beta, alpha), &c.conj());
                }
            }
        }

        for (ia, alpha) in tuples.iter().enumerate() {
            for (ib, beta) in tuples.iter().enumerate() {
                if ib < ia {
                    continue;
                }
                let d = tuple_degree(alpha) + tuple_degree(beta);
                if d < 1 || d > cap {
                    continue;
                }
                if !rng.gen_bool(0.5) {
                    continue;
                }
                if ia == ib {
                    let c = small_rational(&mut rng);
                    jet.f.add_to_coeff(mono_from_tuples(n, alpha, beta), &c);
                } else {
                    let c = small_complex(&mut rng);
                    jet.f.add_to_coeff(mono_from_tuples(n, alpha, beta), &c);
                    jet.f
                        .add_to_coeff(mono_from_tuples(n, beta, alpha), &c.conj());
                }
            }
        }

        debug_assert!(jet.phi.is_real());
        debug_assert!(jet.f.is_real());
        jet
    }

    pub fn with_f(mut self, f: TruncSeries) -> Self {
        assert!(f.is_real(), "weight jet must be real");
        self.f = f;
        self
    }

    /// Truncate both jets to a lower degree cap. Checks that only evaluate
    /// low-order coefficients at the origin use this to cut the arithmetic
    /// cost; the discarded terms provably cannot reach those coefficients.
    pub fn truncated(&self, new_cap: u32) -> Self {
        PotentialJet {
            n: self.n,
            cap: new_cap,
            phi: self.phi.truncated(new_cap),
            f: self.f.truncated(new_cap),
        }
    }
}

/// Exact curvature package built from a potential jet.
pub struct MetricJet {
    pub n: usize,
    pub cap: u32,
    pub f: TruncSeries,
    /// ω_{k,l̄} as a matrix of series (entry (k,l)).
    pub omega: SeriesMatrix,
    /// ω^{p,l̄}: inverse coefficient matrix (entry (p,l)).
    pub omega_inv: SeriesMatrix,
    /// Γ^p_{kl}, indexed [p][k][l].
    pub gamma: Vec<Vec<Vec<TruncSeries>>>,
    /// R_{k,l̄} = -∂²_{k,l̄} log det ω.
    pub ricci: SeriesMatrix,
    /// R'_{k,l̄} = R_{k,l̄} + ∂²_{k,l̄} f.
    pub ricci_weighted: SeriesMatrix,
    /// 𝓡_{k,l̄} = 2 R'_{k,p̄} ω^{p,l̄}: endomorphism coefficients of the
    /// weighted Ricci form.
    pub script_r: SeriesMatrix,
    /// Rm^{r,p̄}_{k,l̄} at the origin, indexed [r][p][k][l].
    pub rm0: Vec<CRat>,
}

impl MetricJet {
    pub fn build(jet: &PotentialJet) -> Result<MetricJet, DegreeOverflow> {
        // The deepest consumers need ∂⁴ of ω (degree-6 potential terms) plus
        // second derivatives of assembled fields.
        if jet.cap < 6 {
            return Err(DegreeOverflow {
                needed: 6,
                have: jet.cap,
            });
        }
        let n = jet.n;
        let cap = jet.cap;
        let mut omega = SeriesMatrix::zero(n, n, cap);
        for k in 0..n {
            for l in 0..n {
                *omega.at_mut(k, l) = jet.phi.deriv(k).deriv(n + l);
            }
        }
        // Normal-coordinate gauge: identity value, vanishing first derivatives.
        for k in 0..n {
            for l in 0..n {
                let want = if k == l { CRat::one() } else { CRat::zero() };
                assert_eq!(omega.at(k, l).eval0(), want, "metric not normalized at 0");
                for v in 0..2 * n {
                    assert!(
                        omega.at(k, l).deriv(v).eval0().is_zero(),
                        "metric first derivatives must vanish at 0"
                    );
                }
            }
        }
        let omega_inv = omega.inverse_unit();
        let logdet = omega.log_det_unit();

        let mut ricci = SeriesMatrix::zero(n, n, cap);
        for k in 0..n {
            for l in 0..n {
                *ricci.at_mut(k, l) = logdet.deriv(k).deriv(n + l).neg();
            }
        }
        let mut ricci_weighted = ricci.clone();
        for k in 0..n {
            for l in 0..n {
                *ricci_weighted.at_mut(k, l) =
                    ricci_weighted.at(k, l).add(&jet.f.deriv(k).deriv(n + l));
            }
        }
        let script_r = {
            let mut s = ricci_weighted.matmul(&omega_inv);
            for e in s.entries.iter_mut() {
                *e = e.scale_int(2);
            }
            s
        };

        let mut gamma = vec![vec![vec![TruncSeries::zero(n, cap); n]; n]; n];
        for p in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = TruncSeries::zero(n, cap);
                    for q in 0..n {
                        acc = acc.add(&omega_inv.at(p, q).mul(&omega.at(l, q).deriv(k)));
                    }
                    gamma[p][k][l] = acc;
                }
            }
        }

        let mut rm0 = vec![CRat::zero(); n * n * n * n];
        for r in 0..n {
            for p in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = omega.at(p, r).deriv(k).deriv(n + l).eval0().scale_int(-2);
                        rm0[((r * n + p) * n + k) * n + l] = v;
                    }
                }
            }
        }

        Ok(MetricJet {
            n,
            cap,
            f: jet.f.clone(),
            omega,
            omega_inv,
            gamma,
            ricci,
            ricci_weighted,
            script_r,
            rm0,
        })
    }

    pub fn rm_at0(&self, r: usize, p: usize, k: usize, l: usize) -> &CRat {
        let n = self.n;
        &self.rm0[((r * n + p) * n + k) * n + l]
    }

    /// Endomorphism coefficients of the (unweighted) Ricci form:
    /// 2 R_{k,p̄} ω^{p,l̄}.
    pub fn ricci_endo(&self) -> SeriesMatrix {
        let mut s = self.ricci.matmul(&self.omega_inv);
        for e in s.entries.iter_mut() {
            *e = e.scale_int(2);
        }
        s
    }

    /// Laplacian of a scalar series: Δh = 4 ω^{p,l̄} ∂²_{l,p̄} h (global formula,
    /// first-order metric terms cancel for Kähler metrics).
    pub fn lap_scalar(&self, h: &TruncSeries) -> TruncSeries {
        let n = self.n;
        let mut acc = TruncSeries::zero(n, self.cap);
        for p in 0..n {
            for l in 0..n {
                acc = acc.add(&self.omega_inv.at(p, l).mul(&h.deriv(l).deriv(n + p)));
            }
        }
        acc.scale_int(4)
    }

    /// Riemannian pairing of gradients: ⟨∇a, ∇b⟩ as a series.
    pub fn grad_pair(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        let n = self.n;
        let mut acc = TruncSeries::zero(n, self.cap);
        for p in 0..n {
            for l in 0..n {
                let w = self.omega_inv.at(p, l);
                acc = acc.add(&w.mul(&a.deriv(l).mul(&b.deriv(n + p))));
                acc = acc.add(&w.mul(&b.deriv(l).mul(&a.deriv(n + p))));
            }
        }
        acc.scale_int(2)
    }

    /// |∇h|² as a series, for real h.
    pub fn grad_norm_sq(&self, h: &TruncSeries) -> TruncSeries {
        let n = self.n;
        let mut acc = TruncSeries::zero(n, self.cap);
        for p in 0..n {
            for l in 0..n {
                acc = acc.add(&self.omega_inv.at(p, l).mul(&h.deriv(l).mul(&h.deriv(n + p))));
            }
        }
        acc.scale_int(4)
    }

    /// (1,0)-gradient components: ∇^{1,0}h = ξ_k ζ_k with ξ_k = 2 ω^{p,k̄} ∂_p̄ h.
    pub fn grad_components(&self, h: &TruncSeries) -> Vec<TruncSeries> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut acc = TruncSeries::zero(n, self.cap);
                for p in 0..n {
                    acc = acc.add(&self.omega_inv.at(p, k).mul(&h.deriv(n + p)));
                }
                acc.scale_int(2)
            })
            .collect()
    }

    /// Coefficients A_{k,l̄} of the anti-linear Hessian part of a real
    /// function, by the definitional route: A_{k,l̄} = ∂_l̄ ξ_k.
    pub fn antilinear_hessian(&self, h: &TruncSeries) -> SeriesMatrix {
        let n = self.n;
        let xi = self.grad_components(h);
        let mut a = SeriesMatrix::zero(n, n, self.cap);
        for k in 0..n {
            for l in 0..n {
                *a.at_mut(k, l) = xi[k].deriv(n + l);
            }
        }
        a
    }

    /// The same coefficients by the closed local formula
    /// A_{k,l̄} = 2 ω^{p,k̄} [ ∂²_{l̄,p̄} h − ∂_l̄ ω_{j,p̄} ω^{r,j̄} ∂_r̄ h ].
    pub fn antilinear_hessian_local(&self, h: &TruncSeries) -> SeriesMatrix {
        let n = self.n;
        let mut a = SeriesMatrix::zero(n, n, self.cap);
        for k in 0..n {
            for l in 0..n {
                let mut inner = TruncSeries::zero(n, self.cap);
                for p in 0..n {
                    let mut bracket = h.deriv(n + l).deriv(n + p);
                    for j in 0..n {
                        for r in 0..n {
                            let term = self
                                .omega
                                .at(j, p)
                                .deriv(n + l)
                                .mul(self.omega_inv.at(r, j))
                                .mul(&h.deriv(n + r));
                            bracket = bracket.sub(&term);
                        }
                    }
                    inner = inner.add(&self.omega_inv.at(p, k).mul(&bracket));
                }
                *a.at_mut(k, l) = inner.scale_int(2);
            }
        }
        a
    }

    /// Contraction of a (1,1)-form (given by its endomorphism coefficient
    /// matrix at the origin) with the curvature coefficients at the origin:
    /// the (k,l) entry is Σ_{r,p} B_{r,p̄} Rm^{r,p̄}_{k,l̄}.
    pub fn rm_contract(&self, b0: &[CRat]) -> Vec<CRat> {
        let n = self.n;
        let mut out = vec![CRat::zero(); n * n];
        for k in 0..n {
            for l in 0..n {
                let mut acc = CRat::zero();
                for r in 0..n {
                    for p in 0..n {
                        acc += &(&b0[r * n + p] * self.rm_at0(r, p, k, l));
                    }
                }
                out[k * n + l] = acc;
            }
        }
        out
    }
}

/// Largest derivative order supported for a field assembled at degree `cap`
/// before hitting truncation noise, used by checks to fail loudly.
pub fn require_degree(cap: u32, needed: u32) -> Result<(), DegreeOverflow> {
    if cap < needed {
        Err(DegreeOverflow { needed, have: cap })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::mono_total_degree;

    #[test]
    fn flat_jet_is_flat() {
        let jet = PotentialJet::flat(2, 6);
        let mj = MetricJet::build(&jet).unwrap();
        assert!(mj.ricci.entries.iter().all(|s| s.is_zero()));
        assert!(mj.rm0.iter().all(|c| c.is_zero()));
        for p in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    assert!(mj.gamma[p][k][l].is_zero());
                }
            }
        }
    }

    #[test]
    fn quartic_potential_ricci_fixture() {
        // φ = z z̄ + c (z z̄)², c = 3/5: R_{1,1̄}(0) = -4c.
        let cap = 6;
        let mut jet = PotentialJet::flat(1, cap);
        let c = CRat::from_ratio(3, 5);
        let m = mono_with_exp(mono_with_exp(0, 0, 2), 1, 2);
        jet.phi.add_to_coeff(m, &c);
        let mj = MetricJet::build(&jet).unwrap();
        assert_eq!(mj.ricci.at(0, 0).eval0(), CRat::from_ratio(-12, 5));
    }

    #[test]
    fn round_model_einstein_values() {
        let jet = PotentialJet::round_dim1(8);
        let mj = MetricJet::build(&jet).unwrap();
        // R(0) = 1/2, endomorphism coefficient 𝓡(0) = 1, Rm(0) = 1.
        assert_eq!(mj.ricci.at(0, 0).eval0(), CRat::from_ratio(1, 2));
        assert_eq!(mj.script_r.at(0, 0).eval0(), CRat::one());
        assert_eq!(*mj.rm_at0(0, 0, 0, 0), CRat::one());
        // Einstein: 𝓡 is the constant series 1 (identity endomorphism).
        let diff = mj
            .script_r
            .at(0, 0)
            .sub(&TruncSeries::one(1, 8));
        // Truncation at the cap leaves junk only above cap-4; everything
        // resolvable must vanish.
        assert!(diff.terms().all(|(m, _)| mono_total_degree(*m, 2) > 4));
    }

    #[test]
    fn inverse_contract_holds() {
        let jet = PotentialJet::random(7, 2, 8);
        let mj = MetricJet::build(&jet).unwrap();
        let prod = mj.omega.matmul(&mj.omega_inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j {
                    TruncSeries::one(2, 8)
                } else {
                    TruncSeries::zero(2, 8)
                };
                let diff = prod.at(i, j).sub(&want);
                // Exact inverse up to degree cap - 2.
                assert!(diff.terms().all(|(m, _)| mono_total_degree(*m, 4) > 6));
            }
        }
    }

    #[test]
    fn rm_kahler_symmetries() {
        let jet = PotentialJet::random(11, 2, 8);
        let mj = MetricJet::build(&jet).unwrap();
        for r in 0..2 {
            for p in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(mj.rm_at0(r, p, k, l), mj.rm_at0(r, k, p, l));
                        assert_eq!(mj.rm_at0(r, p, k, l), mj.rm_at0(l, p, k, r));
                    }
                }
            }
        }
    }

    #[test]
    fn gradient_components_match_contraction() {
        // ξ_k ω_{k,l̄} = 2 ∂_l̄ f as series.
        let jet = PotentialJet::random(23, 2, 8);
        let mj = MetricJet::build(&jet).unwrap();
        let xi = mj.grad_components(&mj.f);
        for l in 0..2 {
            let mut acc = TruncSeries::zero(2, 8);
            for k in 0..2 {
                acc = acc.add(&xi[k].mul(mj.omega.at(k, l)));
            }
            let want = mj.f.deriv(2 + l).scale_int(2);
            let diff = acc.sub(&want);
            assert!(diff.terms().all(|(m, _)| mono_total_degree(*m, 4) > 5));
        }
    }
}
