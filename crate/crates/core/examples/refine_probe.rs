use std::collections::HashMap;
use std::time::Instant;
use wlab_core::bench::run_flow_suite;
use wlab_core::flow::{evolve_krf, solve_conjugate_heat_backward, FlowTrajectory, RunMeta};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;

fn run(n: usize, dt: f64) -> FlowTrajectory {
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
    solve_conjugate_heat_backward(tr, &f_t).unwrap()
}

fn main() {
    let t0 = Instant::now();
    let base = run(128, 5e-4);
    println!("base done {:?}", t0.elapsed());
    let t1 = Instant::now();
    let fine = run(256, 2.5e-4);
    println!("refined done {:?}", t1.elapsed());
    let rb: HashMap<String, f64> = run_flow_suite(&base, 42).into_iter().map(|r| (r.tag, r.residual)).collect();
    let rf: HashMap<String, f64> = run_flow_suite(&fine, 42).into_iter().map(|r| (r.tag, r.residual)).collect();
    let fd_tags = ["adjoint-pair", "alpha-norm-evolution", "a-norm-evolution", "norms-heat-equation",
                   "grad-norm-evolution", "laplacian-evolution", "scalar-evolution", "h-evolution",
                   "divergence-heat-vanishing"];
    for tag in fd_tags {
        let b = rb[tag];
        let f = rf[tag];
        println!("{tag:28} base {b:.3e} refined {f:.3e} shrink {:.2}x {}", b / f, if b / f >= 3.0 { "OK" } else { "FAIL" });
    }
    println!("total {:?}", t0.elapsed());
}
