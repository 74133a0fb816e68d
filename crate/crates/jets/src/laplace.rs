//! Covariant Laplacian kernel for endomorphism fields, shared by the
//! curvature-identity checks.
//!
//! Fields are stored through their coefficient matrices in the coordinate
//! frame. A "linear" field maps ζ_k to C_{k,m} ζ_m (block ζ*_k ⊗ ζ_m); an
//! "anti-linear" field maps ζ̄_l to A_{k,l̄} ζ_k (block ζ̄*_l ⊗ ζ_k). For a
//! Kähler metric the (1,0)-connection only touches unbarred slots and the
//! (0,1)-connection only barred ones, so each covariant derivative corrects
//! exactly the slots of its own type.

use crate::jet::MetricJet;
use crate::matrix::SeriesMatrix;
use crate::rational::CRat;


/// ∇_r of a linear field: ∂_r C_{k,m} − Γ^a_{rk} C_{a,m} + Γ^m_{ra} C_{k,a}.
fn d_unbarred_linear(jet: &MetricJet, c: &SeriesMatrix, r: usize) -> SeriesMatrix {
    let n = jet.n;
    let mut out = SeriesMatrix::zero(n, n, jet.cap);
    for k in 0..n {
        for m in 0..n {
            let mut acc = c.at(k, m).deriv(r);
            for a in 0..n {
                acc = acc.sub(&jet.gamma[a][r][k].mul(c.at(a, m)));
                acc = acc.add(&jet.gamma[m][r][a].mul(c.at(k, a)));
            }
            *out.at_mut(k, m) = acc;
        }
    }
    out
}

/// ∇_r̄ of a linear field: plain ∂_r̄ (no barred slots to correct).
fn d_barred_linear(jet: &MetricJet, c: &SeriesMatrix, r: usize) -> SeriesMatrix {
    let n = jet.n;
    let mut out = SeriesMatrix::zero(n, n, jet.cap);
    for k in 0..n {
        for m in 0..n {
            *out.at_mut(k, m) = c.at(k, m).deriv(n + r);
        }
    }
    out
}

/// ∇_r of an anti-linear field: ∂_r A_{k,l̄} + Γ^k_{ra} A_{a,l̄}.
fn d_unbarred_anti(jet: &MetricJet, a: &SeriesMatrix, r: usize) -> SeriesMatrix {
    let n = jet.n;
    let mut out = SeriesMatrix::zero(n, n, jet.cap);
    for k in 0..n {
        for l in 0..n {
            let mut acc = a.at(k, l).deriv(r);
            for b in 0..n {
                acc = acc.add(&jet.gamma[k][r][b].mul(a.at(b, l)));
            }
            *out.at_mut(k, l) = acc;
        }
    }
    out
}

/// ∇_r̄ of an anti-linear field: ∂_r̄ A_{k,l̄} − conj(Γ^a_{rl}) A_{k,ā}.
fn d_barred_anti(jet: &MetricJet, a: &SeriesMatrix, r: usize) -> SeriesMatrix {
    let n = jet.n;
    let mut out = SeriesMatrix::zero(n, n, jet.cap);
    for k in 0..n {
        for l in 0..n {
            let mut acc = a.at(k, l).deriv(n + r);
            for b in 0..n {
                acc = acc.sub(&jet.gamma[b][r][l].conj().mul(a.at(k, b)));
            }
            *out.at_mut(k, l) = acc;
        }
    }
    out
}

fn sum_eval0(fields: Vec<SeriesMatrix>) -> Vec<CRat> {
    let n = fields[0].n;
    let mut out = vec![CRat::zero(); n * n];
    for f in &fields {
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] += &f.at(i, j).eval0();
            }
        }
    }
    out
}

/// Δ T(0) = 2 Σ_r (∇_r ∇_r̄ + ∇_r̄ ∇_r) T at the origin, linear fields.
pub fn laplacian_linear_at0(jet: &MetricJet, c: &SeriesMatrix) -> Vec<CRat> {
    let n = jet.n;
    let mut parts = vec![];
    for r in 0..n {
        let a = d_unbarred_linear(jet, &d_barred_linear(jet, c, r), r);
        let b = d_barred_linear(jet, &d_unbarred_linear(jet, c, r), r);
        let mut s = a.add(&b);
        for e in s.entries.iter_mut() {
            *e = e.scale_int(2);
        }
        parts.push(s);
    }
    sum_eval0(parts)
}

/// Same for anti-linear fields.
pub fn laplacian_antilinear_at0(jet: &MetricJet, a: &SeriesMatrix) -> Vec<CRat> {
    let n = jet.n;
    let mut parts = vec![];
    for r in 0..n {
        let x = d_unbarred_anti(jet, &d_barred_anti(jet, a, r), r);
        let y = d_barred_anti(jet, &d_unbarred_anti(jet, a, r), r);
        let mut s = x.add(&y);
        for e in s.entries.iter_mut() {
            *e = e.scale_int(2);
        }
        parts.push(s);
    }
    sum_eval0(parts)
}

/// Scalar sanity route: the kernel applied to a multiple of the identity
/// must reproduce the scalar Laplacian of the coefficient.
#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::PotentialJet;

    #[test]
    fn identity_block_reduces_to_scalar_laplacian() {
        let jet = PotentialJet::random(3, 2, 8);
        let mj = MetricJet::build(&jet).unwrap();
        // T = h · I with h real.
        let h = mj.f.clone();
        let mut c = SeriesMatrix::zero(2, 2, 8);
        for i in 0..2 {
            *c.at_mut(i, i) = h.clone();
        }
        let lap = laplacian_linear_at0(&mj, &c);
        let want = mj.lap_scalar(&h).eval0();
        for i in 0..2 {
            for j in 0..2 {
                if i == j {
                    assert_eq!(lap[i * 2 + j], want);
                } else {
                    assert!(lap[i * 2 + j].is_zero());
                }
            }
        }
    }
}
