use wlab_core::entropy::{h_field, speed_norm_sq};
use wlab_core::flow::{evolve_krf, solve_conjugate_heat_backward, RunMeta};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;

fn main() {
    let n = 256;
    let dt = 2.5e-4;
    let grid = CollocationGrid::new(n);
    let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
    let state = KahlerState::new_area_normalized(u0).unwrap();
    let meta = RunMeta { nodes: n, dt, t_final: 1.0, scheme: "t".into(), seed: 42, perturbation: vec![(2, 0.05)], f_t_epsilon: 0.1 };
    let tr = evolve_krf(&state, 1.0, dt, meta).unwrap();
    let f_t = {
        let last = tr.states.last().unwrap();
        let logdens = last.volume_density().map(|d| d.ln());
        ScalarProfile::from_fn(grid.clone(), |mu| 0.1 * (3.0 * mu * mu - 1.0) / 2.0)
            .zip(&logdens, |p, l| p + l)
    };
    let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();

    // spectral tail of f at several slices
    for i in [1usize, 100, 1000, 2000, 3000, 3999] {
        println!("slice {i}: f tail {:.2e}, u tail {:.2e}", full.fs[i].spectral_tail(), full.states[i].conformal_factor().spectral_tail());
    }

    // h-evolution residual localization
    let m = full.len();
    let h: Vec<ScalarProfile> = (0..m).map(|i| h_field(&full.states[i], &full.fs[i])).collect();
    let mut worst = (0.0f64, 0usize, 0usize);
    for i in (1..m - 1).step_by(40) {
        let st = &full.states[i];
        let f = &full.fs[i];
        let lhs = ScalarProfile::new(grid.clone(), (&h[i + 1].values - &h[i - 1].values) * (1.0 / dt));
        let rhs = {
            let lap_h = st.laplacian(&h[i]);
            let cross = st.gradient_pair(&h[i], f);
            let speed = speed_norm_sq(st, f);
            lap_h.zip(&cross, |l, c| -l + 2.0 * c).zip(&speed, |x, s| x + s)
        };
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        for j in 0..grid.len() {
            let r = (lhs.values[j] - rhs.values[j]).abs() / scale;
            if r > worst.0 {
                worst = (r, i, j);
            }
        }
    }
    println!("worst h-evolution residual {:.3e} at slice {} node {} (mu = {:.6})", worst.0, worst.1, worst.2, grid.node(worst.2));
    // print residual near that slice across a few times
    let i0 = worst.1;
    for i in [i0.saturating_sub(2), i0 - 1, i0, i0 + 1, i0 + 2] {
        let st = &full.states[i];
        let f = &full.fs[i];
        let lhs = ScalarProfile::new(grid.clone(), (&h[i + 1].values - &h[i - 1].values) * (1.0 / dt));
        let rhs = {
            let lap_h = st.laplacian(&h[i]);
            let cross = st.gradient_pair(&h[i], f);
            let speed = speed_norm_sq(st, f);
            lap_h.zip(&cross, |l, c| -l + 2.0 * c).zip(&speed, |x, s| x + s)
        };
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        let r = (0..grid.len()).map(|j| (lhs.values[j]-rhs.values[j]).abs()).fold(0.0, f64::max) / scale;
        println!("  slice {i}: residual {r:.3e} (t = {:.4})", full.times[i]);
    }
}
