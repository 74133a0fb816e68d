use wlab_core::flow::{evolve_krf, solve_conjugate_heat_backward, RunMeta};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;

fn main() {
    let n = 128;
    for dt in [1e-3, 5e-4, 2.5e-4, 1.25e-4] {
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
        let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
        let m = full.len();
        let mut worst = 0.0f64;
        for i in (1..m - 1).step_by((m / 40).max(1)) {
            let fdot = ScalarProfile::new(grid.clone(), (&full.fs[i + 1].values - &full.fs[i - 1].values) / (2.0 * dt));
            let st = &full.states[i];
            let f = &full.fs[i];
            let lap = st.laplacian(f);
            let gr = st.gradient_norm_sq(f);
            let scal = st.scalar_curvature();
            let resid: Vec<f64> = (0..grid.len()).map(|j| {
                2.0 * fdot.values[j] - (-lap.values[j] + gr.values[j] - scal.values[j] + 2.0)
            }).collect();
            let proj = grid.project_resolved(&nalgebra::DVector::from_vec(resid), 96);
            worst = worst.max(proj.amax());
        }
        println!("dt={dt:.2e}: nonlinear-form residual {worst:.3e}");
    }
}
