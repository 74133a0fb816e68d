use wlab_core::entropy::h_field;
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
    let meta = RunMeta { nodes: n, dt, t_final: 0.5, scheme: "t".into(), seed: 42, perturbation: vec![(2, 0.05)], f_t_epsilon: 0.1 };
    let tr = evolve_krf(&state, 0.5, dt, meta).unwrap();
    let f_t = {
        let last = tr.states.last().unwrap();
        let logdens = last.volume_density().map(|d| d.ln());
        ScalarProfile::from_fn(grid.clone(), |mu| 0.1 * (3.0 * mu * mu - 1.0) / 2.0)
            .zip(&logdens, |p, l| p + l)
    };
    let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
    // second differences of H and f at a node: smooth series have ~dt²·|∂²|,
    // sawtooth noise shows up directly
    let node = 64;
    let i0 = 500;
    let hs: Vec<f64> = (i0 - 4..=i0 + 4)
        .map(|i| h_field(&full.states[i], &full.fs[i]).values[node])
        .collect();
    let fs: Vec<f64> = (i0 - 4..=i0 + 4).map(|i| full.fs[i].values[node]).collect();
    let us: Vec<f64> = (i0 - 4..=i0 + 4).map(|i| full.states[i].conformal_factor().values[node]).collect();
    let d2 = |v: &Vec<f64>| -> Vec<f64> {
        (1..v.len() - 1).map(|j| v[j + 1] - 2.0 * v[j] + v[j - 1]).collect()
    };
    println!("second differences at node {node} around slice {i0}:");
    println!("  H: {:?}", d2(&hs).iter().map(|x| format!("{x:+.2e}")).collect::<Vec<_>>());
    println!("  f: {:?}", d2(&fs).iter().map(|x| format!("{x:+.2e}")).collect::<Vec<_>>());
    println!("  u: {:?}", d2(&us).iter().map(|x| format!("{x:+.2e}")).collect::<Vec<_>>());
}
