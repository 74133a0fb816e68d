//! Exact comparison of tensor norms computed two ways: once through the real
//! Riemannian structure (frame components, trace contractions) and once
//! through the hermitian extension on complex-type components.
//!
//! Frame conventions: the real basis of T_X is (e_1..e_n, Je_1..Je_n),
//! orthonormal for g. ζ_k = (e_k − i Je_k)/2 and ζ*_k = ê^k + i Ĵ^k, so
//! ζ*_k(ζ_l) = δ_{kl}. The hermitian dual pairing is normalized by
//! h*(ζ*_a, ζ̄*_b) = 4 δ_{ab} with all equal-type pairings zero, and the
//! hermitian metric on complexified spaces is 2 h_ℂ(v, w) = h(v, w̄) + conj h(v̄, w).

use crate::checks::JetCheckReport;
use crate::rational::CRat;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Complex components of ζ_k over the real basis (length 2n).
fn zeta_vec(n: usize, k: usize) -> Vec<CRat> {
    let mut v = vec![CRat::zero(); 2 * n];
    v[k] = CRat::from_ratio(1, 2);
    v[n + k] = &CRat::from_ratio(-1, 2) * &CRat::i();
    v
}

/// Complex components of ζ*_k as a covector over the real basis.
fn zeta_form(n: usize, k: usize) -> Vec<CRat> {
    let mut v = vec![CRat::zero(); 2 * n];
    v[k] = CRat::one();
    v[n + k] = CRat::i();
    v
}

fn conj_vec(v: &[CRat]) -> Vec<CRat> {
    v.iter().map(|c| c.conj()).collect()
}

/// h* on pure-type basis forms: 4δ for a (1,0) paired with a (0,1), else 0.
/// `bar1`/`bar2` flag whether the form is ζ̄* rather than ζ*.
fn hstar_basis(i: usize, bar1: bool, j: usize, bar2: bool) -> CRat {
    if !bar1 && bar2 && i == j {
        CRat::from_int(4)
    } else {
        CRat::zero()
    }
}

/// Hermitian pairing of two (0,1)-basis forms from the extension formula.
fn herm_form_01(l: usize, p: usize) -> CRat {
    // 2 h_ℂ(ζ̄*_l, ζ̄*_p) = h*(ζ̄*_l, conj ζ̄*_p) + conj h*(conj ζ̄*_l, ζ̄*_p)
    let t1 = hstar_basis(l, true, p, false);
    let t2 = hstar_basis(l, false, p, true).conj();
    (&t1 + &t2).div_int(2)
}

fn herm_form_10(l: usize, p: usize) -> CRat {
    let t1 = hstar_basis(l, false, p, true);
    let t2 = hstar_basis(l, true, p, false).conj();
    (&t1 + &t2).div_int(2)
}

/// Hermitian pairing of (1,1) wedge basis forms ζ*_p ∧ ζ̄*_l via the
/// determinant formula ⟨α₁∧β₁, α₂∧β₂⟩ = 2! det(½h*(α₁, ᾱ₂)) conj det(½h*(β̄₁, β₂)).
fn herm_wedge_11(p: usize, l: usize, r: usize, h: usize) -> CRat {
    let da = hstar_basis(p, false, r, true).div_int(2);
    let db = hstar_basis(l, false, h, true).div_int(2).conj();
    (&da * &db).scale_int(2)
}

fn tr_aat(m: &[Vec<BigRational>]) -> BigRational {
    let mut acc = BigRational::from_integer(0.into());
    for row in m {
        for v in row {
            acc += v * v;
        }
    }
    acc
}

fn real_part_matrix(mc: &[Vec<CRat>]) -> Vec<Vec<BigRational>> {
    mc.iter()
        .map(|row| row.iter().map(|c| c.re.clone() * BigRational::from_integer(2.into())).collect())
        .collect()
}

/// Real endomorphism matrix of A = Σ A_{k,l̄} ζ̄*_l ⊗ ζ_k + conj.
fn real_matrix_antilinear(n: usize, a: &[Vec<CRat>]) -> Vec<Vec<BigRational>> {
    let dim = 2 * n;
    let mut mc = vec![vec![CRat::zero(); dim]; dim];
    for k in 0..n {
        let vk = zeta_vec(n, k);
        for l in 0..n {
            let fl = conj_vec(&zeta_form(n, l));
            for r in 0..dim {
                for c in 0..dim {
                    // row r = output component, column c = input basis vector
                    let term = &(&a[k][l] * &vk[r]) * &fl[c];
                    mc[r][c] += &term;
                }
            }
        }
    }
    // adding the conjugate block doubles the real part
    real_part_matrix(&mc)
}

/// Real endomorphism matrix of A = Σ A_{k,l} ζ*_l ⊗ ζ_k + conj.
fn real_matrix_linear(n: usize, a: &[Vec<CRat>]) -> Vec<Vec<BigRational>> {
    let dim = 2 * n;
    let mut mc = vec![vec![CRat::zero(); dim]; dim];
    for k in 0..n {
        let vk = zeta_vec(n, k);
        for l in 0..n {
            let fl = zeta_form(n, l);
            for r in 0..dim {
                for c in 0..dim {
                    let term = &(&a[k][l] * &vk[r]) * &fl[c];
                    mc[r][c] += &term;
                }
            }
        }
    }
    real_part_matrix(&mc)
}

/// Real components of the Λ²T*⊗T tensor i A_{p,k,l̄} (ζ*_p ∧ ζ̄*_l) ⊗ ζ_k + conj.
fn real_tensor_two_form(n: usize, a: &[Vec<Vec<CRat>>]) -> Vec<Vec<Vec<BigRational>>> {
    let dim = 2 * n;
    let mut tc = vec![vec![vec![CRat::zero(); dim]; dim]; dim];
    for p in 0..n {
        let fp = zeta_form(n, p);
        for k in 0..n {
            let vk = zeta_vec(n, k);
            for l in 0..n {
                let fl = conj_vec(&zeta_form(n, l));
                for x in 0..dim {
                    for y in 0..dim {
                        let wedge = &(&fp[x] * &fl[y]) - &(&fp[y] * &fl[x]);
                        if wedge.is_zero() {
                            continue;
                        }
                        let base = &(&CRat::i() * &a[p][k][l]) * &wedge;
                        for c in 0..dim {
                            tc[x][y][c] += &(&base * &vk[c]);
                        }
                    }
                }
            }
        }
    }
    tc.iter()
        .map(|plane| real_part_matrix(plane))
        .collect()
}

/// Norm of a Λ²⊗T tensor through frame contractions:
/// ½ Σ_v Tr[(v ⌟ A)(v ⌟ A)ᵀ] over the full orthonormal real frame. The half
/// compensates the double count of each antisymmetric index pair, so that
/// |X∧Y ⊗ Z|² = |Z|² for orthonormal X, Y.
fn two_form_contraction_norm(t: &[Vec<Vec<BigRational>>]) -> BigRational {
    let dim = t.len();
    let mut acc = BigRational::from_integer(0.into());
    for v in 0..dim {
        let mut slab = vec![vec![BigRational::from_integer(0.into()); dim]; dim];
        for (b, row) in slab.iter_mut().enumerate() {
            for (c, val) in row.iter_mut().enumerate() {
                *val = t[v][b][c].clone();
            }
        }
        acc += tr_aat(&slab);
    }
    acc / BigRational::from_integer(2.into())
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn random_crat(rng: &mut ChaCha8Rng) -> CRat {
    CRat::new(
        rat(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=4)),
        rat(rng.gen_range(-3i64..=3), rng.gen_range(1i64..=4)),
    )
}

/// Exact verification of the norm comparison factors on random tensors in an
/// orthonormal frame, plus the pinned single-component values.
pub fn check_norm_comparisons(seed: u64, n: usize) -> JetCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fail = |w: String| JetCheckReport {
        check: "norms".into(),
        seed,
        dim: n,
        degree: 0,
        pass: false,
        witness: Some(w),
    };

    // (a) anti-linear A: |A|²_g = |A|²_ω = 2 Σ |A_{k,l̄}|².
    let a01: Vec<Vec<CRat>> = (0..n)
        .map(|_| (0..n).map(|_| random_crat(&mut rng)).collect())
        .collect();
    let real_norm = tr_aat(&real_matrix_antilinear(n, &a01));
    let mut herm_norm = BigRational::from_integer(0.into());
    for k in 0..n {
        for l in 0..n {
            for p in 0..n {
                let pairing = herm_form_01(l, p);
                let c = &(&a01[k][l] * &a01[k][p].conj()) * &pairing;
                herm_norm += &c.re;
            }
        }
    }
    if real_norm != herm_norm {
        return fail(format!("antilinear: g-norm {real_norm} vs ω-norm {herm_norm}"));
    }

    // (b) complex-linear (1,0)-form-valued A: same identity.
    let a10: Vec<Vec<CRat>> = (0..n)
        .map(|_| (0..n).map(|_| random_crat(&mut rng)).collect())
        .collect();
    let real_norm10 = tr_aat(&real_matrix_linear(n, &a10));
    let mut herm_norm10 = BigRational::from_integer(0.into());
    for k in 0..n {
        for l in 0..n {
            for p in 0..n {
                let pairing = herm_form_10(l, p);
                let c = &(&a10[k][l] * &a10[k][p].conj()) * &pairing;
                herm_norm10 += &c.re;
            }
        }
    }
    if real_norm10 != herm_norm10 {
        return fail(format!("linear: g-norm {real_norm10} vs ω-norm {herm_norm10}"));
    }

    // (c) Λ^{1,1}⊗T versus Λ²⊗T: 2 |A|²_{Λ²,g} = |A|²_{Λ^{1,1},ω}.
    let a11: Vec<Vec<Vec<CRat>>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| (0..n).map(|_| random_crat(&mut rng)).collect())
                .collect()
        })
        .collect();
    let real11 = two_form_contraction_norm(&real_tensor_two_form(n, &a11));
    let mut herm11 = BigRational::from_integer(0.into());
    for k in 0..n {
        for p in 0..n {
            for l in 0..n {
                for r in 0..n {
                    for h in 0..n {
                        let pairing = herm_wedge_11(p, l, r, h);
                        let c = &(&a11[p][k][l] * &a11[r][k][h].conj()) * &pairing;
                        herm11 += &c.re;
                    }
                }
            }
        }
    }
    if real11.clone() * BigRational::from_integer(2.into()) != herm11 {
        return fail(format!("two-form: 2·g-norm {} vs ω-norm {}", real11, herm11));
    }

    // Pinned values: single unit component.
    let mut unit01 = vec![vec![CRat::zero(); n]; n];
    unit01[0][0] = CRat::one();
    let g2 = tr_aat(&real_matrix_antilinear(n, &unit01));
    if g2 != rat(2, 1) {
        return fail(format!("unit antilinear g-norm {} ≠ 2", g2));
    }
    if herm_form_01(0, 0) != CRat::from_int(2) {
        return fail("unit antilinear ω-norm ≠ 2".into());
    }
    let mut unit11 = vec![vec![vec![CRat::zero(); n]; n]; n];
    unit11[0][0][0] = CRat::one();
    let g4 = two_form_contraction_norm(&real_tensor_two_form(n, &unit11));
    if g4 != rat(4, 1) {
        return fail(format!("unit two-form g-norm {} ≠ 4", g4));
    }
    if herm_wedge_11(0, 0, 0, 0) != CRat::from_int(8) {
        return fail("unit two-form ω-norm ≠ 8".into());
    }

    JetCheckReport {
        check: "norms".into(),
        seed,
        dim: n,
        degree: 0,
        pass: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_values_and_random_dims() {
        for n in 2..=3 {
            for seed in 0..5 {
                let rep = check_norm_comparisons(seed, n);
                assert!(rep.pass, "{:?}", rep.witness);
            }
        }
    }

    #[test]
    fn zero_tensor() {
        // all-zero components: both routes zero, report passes
        let rep = check_norm_comparisons(u64::MAX, 2);
        assert!(rep.pass);
    }
}
