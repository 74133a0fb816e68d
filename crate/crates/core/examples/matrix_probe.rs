use std::collections::HashMap;
use wlab_core::bench::run_flow_suite;
use wlab_core::flow::{evolve_krf, solve_conjugate_heat_backward, FlowTrajectory, RunMeta};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;

fn run(n: usize, dt: f64) -> FlowTrajectory {
    let grid = CollocationGrid::new(n);
    let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
    let state = KahlerState::new_area_normalized(u0).unwrap();
    let meta = RunMeta { nodes: n, dt, t_final: 0.5, scheme: "t".into(), seed: 42, perturbation: vec![(2, 0.05)], f_t_epsilon: 0.1 };
    let tr = evolve_krf(&state, 0.5, dt, meta).unwrap();
    let f_t = {
        let last = tr.states.last().unwrap();
        let logdens = last.volume_density().map(|d| d.ln());
        ScalarProfile::from_fn(grid.clone(), |mu| 0.1 * (3.0 * mu * mu - 1.0) / 2.0)
            .zip(&logdens, |p, l| p + l)
    };
    solve_conjugate_heat_backward(tr, &f_t).unwrap()
}

fn main() {
    for (n, dt) in [(128usize, 5e-4), (128, 2.5e-4), (128, 1.25e-4), (256, 5e-4), (256, 2.5e-4)] {
        let traj = run(n, dt);
        let r: HashMap<String, f64> = run_flow_suite(&traj, 42).into_iter().map(|x| (x.tag, x.residual)).collect();
        println!("n={n:3} dt={dt:.2e}: h-evol {:.3e}  alpha-evol {:.3e}  norms-heat {:.3e}",
            r["h-evolution"], r["alpha-norm-evolution"], r["norms-heat-equation"]);
    }
}
