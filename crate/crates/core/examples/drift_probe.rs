use wlab_core::flow::{evolve_krf, RunMeta};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;

fn main() {
    for (n, dt) in [(48usize, 1e-3), (128, 5e-4), (128, 2.5e-4)] {
        let grid = CollocationGrid::new(n);
        let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
        let state = KahlerState::new_area_normalized(u0).unwrap();
        let meta = RunMeta { nodes: n, dt, t_final: 1.0, scheme: "trapezoidal".into(), seed: 0, perturbation: vec![], f_t_epsilon: 0.0 };
        let tr = evolve_krf(&state, 1.0, dt, meta).unwrap();
        let drift = tr.states.iter().map(|s| (s.area() - 4.0 * std::f64::consts::PI).abs()).fold(0.0, f64::max);
        println!("n={n} dt={dt:.1e}: initial offset {:.2e}, max drift = {drift:.3e}", (state.area() - 4.0*std::f64::consts::PI).abs());
    }
}
