use std::time::Instant;
use wlab_core::entropy::variation_report;
use wlab_core::flow::{evolve_krf, solve_conjugate_heat_backward, RunMeta};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;

fn main() {
    let t0 = Instant::now();
    let n = 128;
    let dt = 5e-4;
    let grid = CollocationGrid::new(n);
    let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
    let state = KahlerState::new_area_normalized(u0).unwrap();
    let meta = RunMeta { nodes: n, dt, t_final: 1.0, scheme: "trapezoidal".into(), seed: 42, perturbation: vec![(2, 0.05)], f_t_epsilon: 0.1 };
    let tr = evolve_krf(&state, 1.0, dt, meta).unwrap();
    println!("flow: {:?}", t0.elapsed());

    let t1 = Instant::now();
    let f_t = {
        let last = tr.states.last().unwrap();
        let logdens = last.volume_density().map(|d| d.ln());
        ScalarProfile::from_fn(grid.clone(), |mu| 0.1 * (3.0 * mu * mu - 1.0) / 2.0)
            .zip(&logdens, |p, l| p + l)
    };
    let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
    println!("backward heat: {:?}", t1.elapsed());

    let t2 = Instant::now();
    let rep = variation_report(&full, 4).unwrap();
    println!("variation report: {:?}", t2.elapsed());
    println!("max first-variation residual (interior):  {:.3e}", rep.max_first_residual);
    println!("max second-variation residual (interior): {:.3e}", rep.max_second_residual);
    println!("monotone: {}, convexity: {}", rep.monotone, rep.convexity_observation);

    // also: how big is the anti-pairing term relative to wddot? (sanity)
    let mid = rep.rows.len() / 2;
    let r = &rep.rows[mid];
    println!("mid-slice: wdot={:.4e} wddot={:.4e} [pair={:.2e} anti={:.2e} gradH={:.2e} ga={:.2e} gA={:.2e}]",
        r.wdot_formula, r.wddot_formula, r.int_curv_pairing, r.int_anti_curv_pairing,
        r.int_grad_h_sq, r.int_grad_alpha_sq, r.int_grad_a_sq);
    // variant check: what would wddot be WITHOUT the anti term, vs FD?
    if let (Some(fd2), _) = (r.wddot_fd, ()) {
        let with = r.wddot_formula;
        let without = with + r.int_anti_curv_pairing;
        println!("mid-slice wddot: fd={:.6e} with-anti={:.6e} without-anti={:.6e}", fd2, with, without);
    }
    println!("total {:?}", t0.elapsed());
}
