use wlab_core::flow::{evolve_krf, RunMeta};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;

fn main() {
    let grid = CollocationGrid::new(64);
    let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
    let state = KahlerState::new(u0).unwrap();
    let meta = RunMeta { nodes: 64, dt: 1e-3, t_final: 1.0, scheme: "trapezoidal".into(), seed: 0, perturbation: vec![], f_t_epsilon: 0.0 };
    let tr = evolve_krf(&state, 1.0, 1e-3, meta).unwrap();
    let fourpi = 4.0 * std::f64::consts::PI;
    for i in (0..tr.times.len()).step_by(200) {
        let a = tr.states[i].area();
        let k_int = tr.states[i].integral(&tr.states[i].gauss_curvature());
        println!("t={:.2}: area-4π = {:+.6e}, ∫K dV - 4π = {:+.3e}", tr.times[i], a - fourpi, k_int - fourpi);
    }
}
