//! Exact point checks of the curvature identities used by the flow lab.
//!
//! Every check builds a seeded random jet, evaluates both sides of an
//! identity as exact rationals at the origin of normal coordinates, and
//! reports pass/fail with the first offending entry as witness. There are no
//! tolerances anywhere in this module.

use crate::jet::{require_degree, DegreeOverflow, MetricJet, PotentialJet};
use crate::laplace::{laplacian_antilinear_at0, laplacian_linear_at0};
use crate::matrix::SeriesMatrix;
use crate::rational::CRat;
use crate::series::{mono_total_degree, TruncSeries};
use num_rational::BigRational;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct JetCheckReport {
    pub check: String,
    pub seed: u64,
    pub dim: usize,
    pub degree: u32,
    pub pass: bool,
    /// First failing coefficient, if any.
    pub witness: Option<String>,
}

impl JetCheckReport {
    fn pass(check: &str, seed: u64, dim: usize, degree: u32) -> Self {
        JetCheckReport {
            check: check.into(),
            seed,
            dim,
            degree,
            pass: true,
            witness: None,
        }
    }

    fn fail(check: &str, seed: u64, dim: usize, degree: u32, witness: String) -> Self {
        JetCheckReport {
            check: check.into(),
            seed,
            dim,
            degree,
            pass: false,
            witness: Some(witness),
        }
    }
}

fn diff_witness(tag: &str, i: usize, j: usize, lhs: &CRat, rhs: &CRat) -> String {
    format!("{tag}[{i},{j}]: lhs = {lhs}, rhs = {rhs}")
}

/// Exchange identity for second derivatives of the weighted Ricci
/// endomorphism coefficients at the origin:
///   Σ_r ∂²_{r,r̄} 𝓡_{k,l̄} = ∂²_{k,l̄} Σ_r 𝓡_{r,r̄}
///                           − ½ 𝓡_{r,p̄} Rm^{r,p̄}_{k,l̄} + 𝓡_{k,p̄} R_{p,l̄}.
pub fn check_sim_ric(seed: u64, n: usize, cap: u32) -> Result<JetCheckReport, DegreeOverflow> {
    require_degree(cap, 6)?;
    let jet = PotentialJet::random(seed, n, cap).truncated(6);
    let mj = MetricJet::build(&jet)?;
    let s0 = mj.script_r.eval0();
    let r0 = mj.ricci.eval0();

    let trace = mj.script_r.trace();
    let contraction = mj.rm_contract(&s0);

    for k in 0..n {
        for l in 0..n {
            let mut lhs = CRat::zero();
            for r in 0..n {
                lhs += &mj.script_r.at(k, l).deriv(r).deriv(n + r).eval0();
            }
            let mut rhs = trace.deriv(k).deriv(n + l).eval0();
            rhs -= &contraction[k * n + l].div_int(2);
            for p in 0..n {
                rhs += &(&s0[k * n + p] * &r0[p * n + l]);
            }
            if lhs != rhs {
                return Ok(JetCheckReport::fail(
                    "sim-ric",
                    seed,
                    n,
                    cap,
                    diff_witness("d2R", k, l, &lhs, &rhs),
                ));
            }
        }
    }
    Ok(JetCheckReport::pass("sim-ric", seed, n, cap))
}

/// Expansion of the fourth potential derivatives behind the Ricci
/// coefficients:
///   4 ∂²_{j,k̄} R_{h,s̄} = −4 ∂⁴_{j,k̄,h,s̄} ω_{l,l̄}
///                        + Rm^{s,h̄}_{l,r̄} Rm^{l,r̄}_{j,k̄}
///                        + Rm^{k,h̄}_{l,r̄} Rm^{l,r̄}_{j,s̄},
/// together with the index symmetries it implies.
pub fn check_fourth_derivative_symmetry(
    seed: u64,
    n: usize,
    cap: u32,
) -> Result<JetCheckReport, DegreeOverflow> {
    require_degree(cap, 6)?;
    let jet = PotentialJet::random(seed, n, cap).truncated(6);
    let mj = MetricJet::build(&jet)?;
    let omega_trace = {
        let mut t = TruncSeries::zero(n, mj.cap);
        for l in 0..n {
            t = t.add(mj.omega.at(l, l));
        }
        t
    };

    let d2r = |j: usize, k: usize, h: usize, s: usize| -> CRat {
        mj.ricci.at(h, s).deriv(j).deriv(n + k).eval0()
    };

    for j in 0..n {
        for k in 0..n {
            for h in 0..n {
                for s in 0..n {
                    let lhs = d2r(j, k, h, s).scale_int(4);
                    let mut rhs = omega_trace
                        .deriv(j)
                        .deriv(n + k)
                        .deriv(h)
                        .deriv(n + s)
                        .eval0()
                        .scale_int(-4);
                    for l in 0..n {
                        for r in 0..n {
                            rhs += &(mj.rm_at0(s, h, l, r) * mj.rm_at0(l, r, j, k));
                            rhs += &(mj.rm_at0(k, h, l, r) * mj.rm_at0(l, r, j, s));
                        }
                    }
                    if lhs != rhs {
                        return Ok(JetCheckReport::fail(
                            "fourth-symmetry",
                            seed,
                            n,
                            cap,
                            format!("expansion[{j},{k},{h},{s}]: lhs = {lhs}, rhs = {rhs}"),
                        ));
                    }
                    // k ↔ s and j ↔ h symmetries of ∂²_{j,k̄} R_{h,s̄}.
                    if d2r(j, k, h, s) != d2r(j, s, h, k) || d2r(j, k, h, s) != d2r(h, k, j, s) {
                        return Ok(JetCheckReport::fail(
                            "fourth-symmetry",
                            seed,
                            n,
                            cap,
                            format!("index symmetry violated at [{j},{k},{h},{s}]"),
                        ));
                    }
                }
            }
        }
    }
    Ok(JetCheckReport::pass("fourth-symmetry", seed, n, cap))
}

/// Endomorphism coefficient matrix, at the origin, of the curvature action
/// on a (1,1)-form given by its endomorphism coefficients `b0`:
/// the plain contraction Σ_{r,p} B_{r,p̄} Rm^{r,p̄}_{k,l̄}.
fn form_times_rm_at0(mj: &MetricJet, b0: &[CRat]) -> Vec<CRat> {
    mj.rm_contract(b0)
}

/// Covariant Laplacian of the weighted Ricci endomorphism:
///   Δ Ric̲* = (i∂∂̄ Tr_ℝ Ric̲* − 2 Ric̲·Rm)* + Ric̲* Ric* + Ric* Ric̲*.
pub fn check_lap_rc(seed: u64, n: usize, cap: u32) -> Result<JetCheckReport, DegreeOverflow> {
    require_degree(cap, 8)?;
    let jet = PotentialJet::random(seed, n, cap).truncated(6);
    let mj = MetricJet::build(&jet)?;

    let lhs = laplacian_linear_at0(&mj, &mj.script_r);

    // Tr_ℝ Ric̲* = tr 𝓡 + conj(tr 𝓡), a real scalar series.
    let tr = mj.script_r.trace();
    let tr_real = tr.add(&tr.conj());
    // (i∂∂̄ h)* has coefficients 2 ∂²_{k,p̄} h · ω^{p,l̄}.
    let mut hess_endo = SeriesMatrix::zero(n, n, mj.cap);
    for k in 0..n {
        for l in 0..n {
            let mut acc = TruncSeries::zero(n, mj.cap);
            for p in 0..n {
                acc = acc.add(&tr_real.deriv(k).deriv(n + p).mul(mj.omega_inv.at(p, l)));
            }
            *hess_endo.at_mut(k, l) = acc.scale_int(2);
        }
    }

    let s0 = mj.script_r.eval0();
    let rm_term = form_times_rm_at0(&mj, &s0);

    let ric_endo = mj.ricci_endo();
    let prod = mj
        .script_r
        .matmul(&ric_endo)
        .add(&ric_endo.matmul(&mj.script_r));

    for k in 0..n {
        for l in 0..n {
            let mut rhs = hess_endo.at(k, l).eval0();
            rhs -= &rm_term[k * n + l].scale_int(2);
            rhs += &prod.at(k, l).eval0();
            if lhs[k * n + l] != rhs {
                return Ok(JetCheckReport::fail(
                    "lap-ric",
                    seed,
                    n,
                    cap,
                    diff_witness("lapRic", k, l, &lhs[k * n + l], &rhs),
                ));
            }
        }
    }
    Ok(JetCheckReport::pass("lap-ric", seed, n, cap))
}

/// Covariant Laplacian of the anti-linear Hessian part A = ∂̄∇f:
///   Δ A = ∂̄∇Δf + 2 ∂̄_E Ric*·∇f + Ric* A + A Ric* + 2 A·Rm,
/// where (A·Rm)_{k,l̄} = Σ_{r,p} Rm^{k,p̄}_{r,l̄} A_{r,p̄}. The curvature
/// contraction term survives whenever ∂̄∇f has a nonzero value at the point;
/// dropping it leaves an identity that fails on generic jets.
pub fn check_lap_a(seed: u64, n: usize, cap: u32) -> Result<JetCheckReport, DegreeOverflow> {
    require_degree(cap, 8)?;
    let jet = PotentialJet::random(seed, n, cap).truncated(6);
    let mj = MetricJet::build(&jet)?;

    let a = mj.antilinear_hessian(&mj.f);
    let a0 = a.eval0();
    let lhs = laplacian_antilinear_at0(&mj, &a);

    let lap_f = mj.lap_scalar(&mj.f);
    let term_hess = mj.antilinear_hessian(&lap_f);

    // (∂̄_E Ric* · ∇f) has anti-linear block B_{m,l̄} = ∂_l̄ 𝓇_{k,m} ξ_k.
    let ric_endo = mj.ricci_endo();
    let xi = mj.grad_components(&mj.f);
    let mut term_dbar = SeriesMatrix::zero(n, n, mj.cap);
    for m in 0..n {
        for l in 0..n {
            let mut acc = TruncSeries::zero(n, mj.cap);
            for k in 0..n {
                acc = acc.add(&ric_endo.at(k, m).deriv(n + l).mul(&xi[k]));
            }
            *term_dbar.at_mut(m, l) = acc;
        }
    }

    // Compositions: (Ric* ∘ A)_{m,l̄} = A_{k,l̄} 𝓇_{k,m};
    //               (A ∘ Ric*)_{k,l̄} = conj(𝓇_{l,m}) A_{k,m̄}.
    let mut comp = SeriesMatrix::zero(n, n, mj.cap);
    for k in 0..n {
        for l in 0..n {
            let mut acc = TruncSeries::zero(n, mj.cap);
            for m in 0..n {
                acc = acc.add(&a.at(m, l).mul(ric_endo.at(m, k)));
                acc = acc.add(&ric_endo.at(l, m).conj().mul(a.at(k, m)));
            }
            *comp.at_mut(k, l) = acc;
        }
    }

    for k in 0..n {
        for l in 0..n {
            let mut rhs = term_hess.at(k, l).eval0();
            rhs += &term_dbar.at(k, l).eval0().scale_int(2);
            rhs += &comp.at(k, l).eval0();
            let mut rm_term = CRat::zero();
            for r in 0..n {
                for p in 0..n {
                    rm_term += &(mj.rm_at0(k, p, r, l) * &a0[r * n + p]);
                }
            }
            rhs += &rm_term.scale_int(2);
            if lhs[k * n + l] != rhs {
                return Ok(JetCheckReport::fail(
                    "lap-a",
                    seed,
                    n,
                    cap,
                    diff_witness("lapA", k, l, &lhs[k * n + l], &rhs),
                ));
            }
        }
    }
    Ok(JetCheckReport::pass("lap-a", seed, n, cap))
}

/// The closed local expression for A_{k,l̄} against the definitional route,
/// as series up to degree cap − 3.
pub fn check_a_local_expression(
    seed: u64,
    n: usize,
    cap: u32,
) -> Result<JetCheckReport, DegreeOverflow> {
    require_degree(cap, 5)?;
    let jet = PotentialJet::random(seed, n, cap);
    let mj = MetricJet::build(&jet)?;
    let a_def = mj.antilinear_hessian(&mj.f);
    let a_loc = mj.antilinear_hessian_local(&mj.f);
    let max_deg = cap - 3;
    for k in 0..n {
        for l in 0..n {
            let diff = a_def.at(k, l).sub(a_loc.at(k, l));
            for (m, c) in diff.terms() {
                if mono_total_degree(*m, 2 * n) <= max_deg {
                    return Ok(JetCheckReport::fail(
                        "a-local",
                        seed,
                        n,
                        cap,
                        format!("A[{k},{l}] differs at degree {}: {c}", mono_total_degree(*m, 2 * n)),
                    ));
                }
            }
        }
    }
    Ok(JetCheckReport::pass("a-local", seed, n, cap))
}

/// Pointwise Bochner identity at the origin:
///   Δ|∇f|² = 2 ∇Δf·∇f + 2|∂̄∇f|² + 2|i∂∂̄f|² + 2 Ric(∇f, J∇f).
pub fn check_bochner_point(seed: u64, n: usize, cap: u32) -> Result<JetCheckReport, DegreeOverflow> {
    require_degree(cap, 6)?;
    let jet = PotentialJet::random(seed, n, cap).truncated(6);
    let mj = MetricJet::build(&jet)?;
    let f = &mj.f;

    let lhs = mj.lap_scalar(&mj.grad_norm_sq(f)).eval0();

    let mut rhs = mj.grad_pair(&mj.lap_scalar(f), f).eval0().scale_int(2);

    // 2 |A|² with |A|² = 2 Σ |A_{k,l̄}(0)|².
    let a = mj.antilinear_hessian(f);
    let mut a_norm = CRat::zero();
    for k in 0..n {
        for l in 0..n {
            let v = a.at(k, l).eval0();
            a_norm += &(&v * &v.conj());
        }
    }
    rhs += &a_norm.scale_int(4);

    // 2 |i∂∂̄f|² with endomorphism coefficients m = 2 ∂²_{k,l̄} f at 0.
    let mut h_norm = CRat::zero();
    for k in 0..n {
        for l in 0..n {
            let v = f.deriv(k).deriv(n + l).eval0().scale_int(2);
            h_norm += &(&v * &v.conj());
        }
    }
    rhs += &h_norm.scale_int(4);

    // 2 Ric(∇f, J∇f) = 2 · 2 Re[R_{p,q̄} ξ_p conj(ξ_q)] at 0.
    let xi: Vec<CRat> = mj.grad_components(f).iter().map(|s| s.eval0()).collect();
    let mut ric_term = CRat::zero();
    for p in 0..n {
        for q in 0..n {
            let t = &(&mj.ricci.at(p, q).eval0() * &xi[p]) * &xi[q].conj();
            ric_term += &t;
            ric_term += &t.conj();
        }
    }
    rhs += &ric_term.scale_int(2);

    if lhs != rhs {
        return Ok(JetCheckReport::fail(
            "bochner",
            seed,
            n,
            cap,
            format!("lhs = {lhs}, rhs = {rhs}"),
        ));
    }
    Ok(JetCheckReport::pass("bochner", seed, n, cap))
}

/// Exact constant c with ⟨α·Rm, α⟩ = c · K · a² for α = a·ω on the round
/// one-dimensional model. Consumed as a fixture by the profile lab.
pub fn check_dim1_pairing_constant(cap: u32) -> Result<BigRational, DegreeOverflow> {
    require_degree(cap, 6)?;
    let jet = PotentialJet::round_dim1(cap);
    let mj = MetricJet::build(&jet)?;

    let a = CRat::from_int(1);
    // α* = a·I: endomorphism coefficients a δ_{r,p}.
    let alpha0 = vec![a.clone()];
    let contraction = form_times_rm_at0(&mj, &alpha0);
    // ⟨α*, (αRm)*⟩ = 2 Re tr(a · contraction).
    let mut pairing = &a * &contraction[0];
    pairing += &pairing.clone().conj();
    // Scal = Tr_ℝ Ric* = 2 Re tr(2 R ω^{-1}), K = Scal / 2.
    let ric0 = mj.ricci_endo().at(0, 0).eval0();
    let scal = ric0.scale_int(2);
    let kappa = scal.div_int(2);
    assert!(pairing.is_real() && kappa.is_real());
    Ok(pairing.re / kappa.re)
}

/// Batch driver: run one named check over a seed range.
pub fn run_check(
    name: &str,
    seeds: std::ops::Range<u64>,
    dim: usize,
    cap: u32,
) -> Result<Vec<JetCheckReport>, DegreeOverflow> {
    let mut out = vec![];
    for seed in seeds {
        let rep = match name {
            "sim-ric" => check_sim_ric(seed, dim, cap)?,
            "fourth-symmetry" => check_fourth_derivative_symmetry(seed, dim, cap)?,
            "lap-ric" => check_lap_rc(seed, dim, cap)?,
            "lap-a" => check_lap_a(seed, dim, cap)?,
            "a-local" => check_a_local_expression(seed, dim, cap)?,
            "bochner" => check_bochner_point(seed, dim, cap)?,
            "norms" => crate::norms::check_norm_comparisons(seed, dim),
            "pairing-constant" => {
                let c = check_dim1_pairing_constant(cap)?;
                let pass = c == BigRational::from_integer(2.into());
                JetCheckReport {
                    check: "pairing-constant".into(),
                    seed,
                    dim: 1,
                    degree: cap,
                    pass,
                    witness: if pass { None } else { Some(format!("c = {c}")) },
                }
            }
            other => panic!("unknown jet check '{other}'"),
        };
        out.push(rep);
    }
    Ok(out)
}

pub const CHECK_NAMES: &[&str] = &[
    "sim-ric",
    "fourth-symmetry",
    "lap-ric",
    "lap-a",
    "a-local",
    "bochner",
    "norms",
    "pairing-constant",
];
