//! Shared building blocks between the CLI commands and the acceptance suite.

use crate::config::RunConfig;
use wlab_core::flow::{
    evolve_krf, solve_conjugate_heat_backward, FlowTrajectory, KrfTrajectory, RunMeta,
};
use wlab_core::geometry::KahlerState;
use wlab_core::grid::CollocationGrid;
use wlab_core::profile::ScalarProfile;
use wlab_core::Result;

fn legendre(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let mut pm = 1.0;
            let mut p = x;
            for j in 1..k {
                let jf = j as f64;
                let pn = ((2.0 * jf + 1.0) * x * p - jf * pm) / (jf + 1.0);
                pm = p;
                p = pn;
            }
            p
        }
    }
}

/// Initial state of a run: Legendre perturbation over the round metric,
/// shifted to total area 4π.
pub fn initial_state(cfg: &RunConfig) -> Result<KahlerState> {
    let grid = CollocationGrid::new(cfg.nodes);
    let pert = cfg.perturbation.clone();
    let u0 = ScalarProfile::from_fn(grid, move |mu| {
        pert.iter().map(|&(k, c)| c * legendre(k, mu)).sum()
    });
    KahlerState::new_area_normalized(u0)
}

/// Default terminal weight potential:
/// f_T = log(dV_{g_T}/dV₀) + ε (3μ² - 1)/2.
pub fn terminal_weight(krf: &KrfTrajectory, epsilon: f64) -> ScalarProfile {
    let last = krf.states.last().expect("nonempty trajectory");
    let logdens = last.volume_density().map(|d| d.ln());
    let grid = logdens.grid.clone();
    ScalarProfile::from_fn(grid, |mu| epsilon * (3.0 * mu * mu - 1.0) / 2.0)
        .zip(&logdens, |p, l| p + l)
}

/// Metric flow followed by the backward conjugate heat sweep.
pub fn run_pipeline(cfg: &RunConfig) -> Result<FlowTrajectory> {
    let state = initial_state(cfg)?;
    let meta = RunMeta {
        nodes: cfg.nodes,
        dt: cfg.dt,
        t_final: cfg.t_final,
        scheme: "trapezoidal+crank-nicolson".into(),
        seed: cfg.seed,
        perturbation: cfg.perturbation.clone(),
        f_t_epsilon: cfg.f_t_epsilon,
    };
    let krf = evolve_krf(&state, cfg.t_final, cfg.dt, meta)?;
    let f_t = terminal_weight(&krf, cfg.f_t_epsilon);
    solve_conjugate_heat_backward(krf, &f_t)
}

/// Conservation summary used by run artifacts and the acceptance suite.
pub struct ConservationSummary {
    pub max_area_drift: f64,
    pub max_mass_drift: f64,
}

pub fn conservation(traj: &FlowTrajectory) -> ConservationSummary {
    let fourpi = 4.0 * std::f64::consts::PI;
    let mut area = 0.0f64;
    for s in &traj.states {
        area = area.max((s.area() - fourpi).abs());
    }
    let m0 = traj.mass_at(0);
    let mut mass = 0.0f64;
    for i in 0..traj.len() {
        mass = mass.max((traj.mass_at(i) - m0).abs());
    }
    ConservationSummary {
        max_area_drift: area,
        max_mass_drift: mass / m0.abs().max(1e-300),
    }
}
