use std::time::Instant;
use wlab_core::bench::{run_flow_suite, run_slice_suite};
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
    let f_t = {
        let last = tr.states.last().unwrap();
        let logdens = last.volume_density().map(|d| d.ln());
        ScalarProfile::from_fn(grid.clone(), |mu| 0.1 * (3.0 * mu * mu - 1.0) / 2.0)
            .zip(&logdens, |p, l| p + l)
    };
    let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
    println!("pipeline: {:?}", t0.elapsed());

    let t1 = Instant::now();
    for r in run_flow_suite(&full, 42) {
        println!("{:28} {:26} residual {:.3e}  tol {:.0e}  pass={}", r.tag, r.context, r.residual, r.tolerance, r.pass);
    }
    println!("flow suite: {:?}", t1.elapsed());
    let t2 = Instant::now();
    for r in run_slice_suite(grid.clone(), 20) {
        println!("{:28} {:26} residual {:.3e}  tol {:.0e}  pass={}", r.tag, r.context, r.residual, r.tolerance, r.pass);
    }
    println!("slice suite: {:?}", t2.elapsed());
}
