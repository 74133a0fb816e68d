use wlab_core::entropy::{alpha_coefficient, antilinear_part, h_field, speed_norm_sq};
use wlab_core::flow::{evolve_krf, solve_conjugate_heat_backward, RunMeta};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;

fn main() {
    let n = 128;
    let dt = 5e-4;
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
    let i = 1000; // t = 0.5
    let st = &full.states[i];
    let f = &full.fs[i];
    let h: Vec<ScalarProfile> = (i-1..=i+1).map(|j| h_field(&full.states[j], &full.fs[j])).collect();
    let lhs = ScalarProfile::new(grid.clone(), (&h[2].values - &h[0].values) * (1.0 / dt));
    let rhs = {
        let lap_h = st.laplacian(&h[1]);
        let cross = st.gradient_pair(&h[1], f);
        let speed = speed_norm_sq(st, f);
        lap_h.zip(&cross, |l, c| -l + 2.0 * c).zip(&speed, |x, s| x + s)
    };
    let diff = ScalarProfile::new(grid.clone(), grid.project_resolved(&(&lhs - &rhs).values, 96));
    let a = alpha_coefficient(st, f);
    let anti = antilinear_part(st, f);
    let asq = anti.anti_norm_sq();
    let k = st.gauss_curvature();
    println!("  mu        defect       a²K          |A|²K        a·|A|        a");
    for idx in (4..n-4).step_by(12) {
        let mu = grid.node(idx);
        println!("{:+.3}  {:+.3e}  {:+.3e}  {:+.3e}  {:+.3e}  {:+.3e}",
            mu, diff.values[idx],
            a.values[idx]*a.values[idx]*k.values[idx],
            asq.values[idx]*k.values[idx],
            a.values[idx]*asq.values[idx].sqrt(),
            a.values[idx]);
    }
    println!("max|defect| = {:.3e}, scale = {:.3}", diff.max_abs(), lhs.max_abs().max(rhs.max_abs()));
}
