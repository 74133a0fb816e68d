//! Exact identity suite over seeded random jets. No tolerances: every
//! assertion is an equality of rationals.

use num_rational::BigRational;
use std::thread;
use wlab_jets::checks;
use wlab_jets::jet::{MetricJet, PotentialJet};
use wlab_jets::rational::CRat;

fn run_parallel(name: &'static str, seeds: u64, dim: usize, cap: u32) {
    let mut handles = vec![];
    let workers = 4.min(seeds);
    for w in 0..workers {
        handles.push(thread::spawn(move || {
            let mut reports = vec![];
            let mut s = w;
            while s < seeds {
                reports.extend(checks::run_check(name, s..s + 1, dim, cap).unwrap());
                s += workers;
            }
            reports
        }));
    }
    for h in handles {
        for rep in h.join().unwrap() {
            assert!(
                rep.pass,
                "{} failed at seed {}: {:?}",
                rep.check, rep.seed, rep.witness
            );
        }
    }
}

#[test]
fn sim_ric_twenty_seeds() {
    run_parallel("sim-ric", 20, 2, 8);
}

#[test]
fn fourth_symmetry_twenty_seeds() {
    run_parallel("fourth-symmetry", 20, 2, 8);
}

#[test]
fn lap_ric_twenty_seeds() {
    run_parallel("lap-ric", 20, 2, 8);
}

#[test]
fn lap_ric_dim_one() {
    run_parallel("lap-ric", 5, 1, 8);
}

#[test]
fn lap_a_twenty_seeds() {
    run_parallel("lap-a", 20, 2, 8);
}

#[test]
fn a_local_twenty_seeds() {
    run_parallel("a-local", 20, 2, 8);
}

#[test]
fn a_local_pure_holomorphic_weight() {
    // u = z₁z₂ + z̄₁z̄₂: nonzero A(0), both routes agree exactly.
    use wlab_jets::series::{mono_with_exp, TruncSeries};
    let cap = 8;
    let mut f = TruncSeries::zero(2, cap);
    let m1 = mono_with_exp(mono_with_exp(0, 0, 1), 1, 1);
    let m2 = mono_with_exp(mono_with_exp(0, 2, 1), 3, 1);
    f.set_coeff(m1, CRat::one());
    f.set_coeff(m2, CRat::one());
    let jet = PotentialJet::random(5, 2, cap).with_f(f);
    let mj = MetricJet::build(&jet).unwrap();
    let a_def = mj.antilinear_hessian(&mj.f);
    let a_loc = mj.antilinear_hessian_local(&mj.f);
    let a0 = a_def.eval0();
    assert!(a0.iter().any(|c| !c.is_zero()), "A(0) should be nonzero");
    for k in 0..2 {
        for l in 0..2 {
            assert_eq!(a_def.at(k, l).eval0(), a_loc.at(k, l).eval0());
        }
    }
}

#[test]
fn bochner_twenty_seeds() {
    run_parallel("bochner", 20, 2, 8);
}

#[test]
fn bochner_flat_and_linear() {
    // Flat metric with quadratic weight, and a linear weight on a curved jet.
    use wlab_jets::series::{mono_with_exp, TruncSeries};
    let cap = 8;
    let mut fq = TruncSeries::zero(2, cap);
    fq.set_coeff(mono_with_exp(mono_with_exp(0, 0, 1), 2, 1), CRat::from_int(2));
    fq.set_coeff(
        mono_with_exp(mono_with_exp(0, 0, 1), 3, 1),
        CRat::from_ratio(1, 3),
    );
    fq.set_coeff(
        mono_with_exp(mono_with_exp(0, 1, 1), 2, 1),
        CRat::from_ratio(1, 3),
    );
    let flat = PotentialJet::flat(2, cap).with_f(fq);
    let mjf = MetricJet::build(&flat).unwrap();
    let lhs = mjf.lap_scalar(&mjf.grad_norm_sq(&mjf.f)).eval0();
    // flat + quadratic: only Hessian terms survive
    let mut rhs = mjf.grad_pair(&mjf.lap_scalar(&mjf.f), &mjf.f).eval0().scale_int(2);
    let a = mjf.antilinear_hessian(&mjf.f);
    let mut an = CRat::zero();
    for k in 0..2 {
        for l in 0..2 {
            let v = a.at(k, l).eval0();
            an += &(&v * &v.conj());
        }
    }
    rhs += &an.scale_int(4);
    let mut hn = CRat::zero();
    for k in 0..2 {
        for l in 0..2 {
            let v = mjf.f.deriv(k).deriv(2 + l).eval0().scale_int(2);
            hn += &(&v * &v.conj());
        }
    }
    rhs += &hn.scale_int(4);
    assert_eq!(lhs, rhs);

    // linear weight on a random curved jet: full check must still pass
    let mut fl = TruncSeries::zero(2, cap);
    fl.set_coeff(mono_with_exp(0, 0, 1), CRat::from_ratio(1, 2));
    fl.set_coeff(mono_with_exp(0, 2, 1), CRat::from_ratio(1, 2));
    let jet = PotentialJet::random(9, 2, cap).with_f(fl);
    let mj = MetricJet::build(&jet).unwrap();
    let g = mj.grad_norm_sq(&mj.f);
    let lhs2 = mj.lap_scalar(&g).eval0();
    let mut rhs2 = mj.grad_pair(&mj.lap_scalar(&mj.f), &mj.f).eval0().scale_int(2);
    let a2 = mj.antilinear_hessian(&mj.f);
    let mut an2 = CRat::zero();
    for k in 0..2 {
        for l in 0..2 {
            let v = a2.at(k, l).eval0();
            an2 += &(&v * &v.conj());
        }
    }
    rhs2 += &an2.scale_int(4);
    let mut hn2 = CRat::zero();
    for k in 0..2 {
        for l in 0..2 {
            let v = mj.f.deriv(k).deriv(2 + l).eval0().scale_int(2);
            hn2 += &(&v * &v.conj());
        }
    }
    rhs2 += &hn2.scale_int(4);
    let xi: Vec<CRat> = mj.grad_components(&mj.f).iter().map(|s| s.eval0()).collect();
    let mut ric_term = CRat::zero();
    for p in 0..2 {
        for q in 0..2 {
            let t = &(&mj.ricci.at(p, q).eval0() * &xi[p]) * &xi[q].conj();
            ric_term += &t;
            ric_term += &t.conj();
        }
    }
    rhs2 += &ric_term.scale_int(2);
    assert_eq!(lhs2, rhs2);
}

#[test]
fn norm_comparisons_dims_two_and_three() {
    for dim in [2usize, 3] {
        for seed in 0..20u64 {
            let rep = wlab_jets::check_norm_comparisons(seed, dim);
            assert!(rep.pass, "norms failed: {:?}", rep.witness);
        }
    }
}

#[test]
fn pairing_constant_is_two() {
    let c = checks::check_dim1_pairing_constant(8).unwrap();
    assert_eq!(c, BigRational::from_integer(2.into()));
}

#[test]
fn pairing_contraction_flat_and_linear() {
    // Flat model: contraction vanishes. Doubling α quadruples the pairing.
    let flat = PotentialJet::flat(1, 8);
    let mj = MetricJet::build(&flat).unwrap();
    let c1 = mj.rm_contract(&[CRat::one()]);
    assert!(c1[0].is_zero());

    let round = PotentialJet::round_dim1(8);
    let mj = MetricJet::build(&round).unwrap();
    let p1 = {
        let a = CRat::one();
        let contr = mj.rm_contract(&[a.clone()]);
        let t = &a * &contr[0];
        &t + &t.conj()
    };
    let p2 = {
        let a = CRat::from_int(2);
        let contr = mj.rm_contract(&[a.clone()]);
        let t = &a * &contr[0];
        &t + &t.conj()
    };
    assert_eq!(p2, p1.scale_int(4));
}

#[test]
fn sim_ric_flat_cases() {
    // Flat potential with zero and with quadratic weight: identity reduces to
    // commuting fourth partials of the weight.
    use wlab_jets::series::{mono_with_exp, TruncSeries};
    let cap = 8;
    for with_weight in [false, true] {
        let mut jet = PotentialJet::flat(2, cap);
        if with_weight {
            let mut f = TruncSeries::zero(2, cap);
            f.set_coeff(mono_with_exp(mono_with_exp(0, 0, 1), 2, 1), CRat::from_int(1));
            f.set_coeff(
                mono_with_exp(mono_with_exp(0, 1, 1), 3, 1),
                CRat::from_ratio(-2, 3),
            );
            jet = jet.with_f(f);
        }
        let mj = MetricJet::build(&jet).unwrap();
        let n = 2;
        let trace = mj.script_r.trace();
        let s0 = mj.script_r.eval0();
        let contraction = mj.rm_contract(&s0);
        let r0 = mj.ricci.eval0();
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
                assert_eq!(lhs, rhs);
            }
        }
    }
}
