//! Time integration: the normalized flow of the conformal factor, the linear
//! conjugate heat equation solved backward along the stored metric, and the
//! gauge flow of equivariant diffeomorphisms generated by -½∇f̂.
//!
//! The metric flow reduces to u̇ = (1 - K)/2 on the conformal factor and is
//! integrated by an A-stable trapezoidal scheme with Newton inner solves; the
//! backward equation 2∂ₜw = -Δw + (Scal - 2)w is linear in w = e^{-f̂} and
//! integrated by Crank–Nicolson against the stored snapshots.

use crate::error::{LabError, Result};
use crate::geometry::{KahlerState, ReparamMap, WeightedMeasure};
use crate::grid::CollocationGrid;
use crate::profile::ScalarProfile;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMeta {
    pub nodes: usize,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: String,
    pub seed: u64,
    /// Legendre perturbation of the initial conformal factor: (degree, coeff).
    pub perturbation: Vec<(usize, f64)>,
    pub f_t_epsilon: f64,
}

/// Metric half of a run: snapshots of the conformal state at every step.
pub struct KrfTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<KahlerState>,
    pub meta: RunMeta,
}

/// A completed run: metric, backward weight potential and the fixed measure.
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<KahlerState>,
    pub fs: Vec<ScalarProfile>,
    pub omega: WeightedMeasure,
    pub meta: RunMeta,
}

impl FlowTrajectory {
    pub fn grid(&self) -> &Arc<CollocationGrid> {
        self.states[0].grid()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Mass ∫ e^{-f̂} dV at a slice.
    pub fn mass_at(&self, i: usize) -> f64 {
        let ones = ScalarProfile::constant(self.grid().clone(), 1.0);
        self.states[i].weighted_integral(&ones, &self.fs[i])
    }

    /// Conformal factor interpolated in time by a cubic through the stored
    /// snapshots (matches the second-order accuracy of the integrator).
    pub fn conformal_factor_at(&self, t: f64) -> Result<ScalarProfile> {
        self.sample_cubic(t, |i| self.states[i].conformal_factor())
    }

    pub fn f_at(&self, t: f64) -> Result<ScalarProfile> {
        self.sample_cubic(t, |i| &self.fs[i])
    }

    fn sample_cubic<'a>(
        &'a self,
        t: f64,
        field: impl Fn(usize) -> &'a ScalarProfile,
    ) -> Result<ScalarProfile> {
        let times = &self.times;
        let m = times.len();
        let t0 = times[0];
        let t1 = times[m - 1];
        if t < t0 - 1e-12 || t > t1 + 1e-12 {
            return Err(LabError::TimeOutOfRange { t, t0, t1 });
        }
        let dt = self.dt();
        let j = (((t - t0) / dt).floor() as usize).min(m - 2);
        // 4-point stencil around the bracketing interval
        let base = j.saturating_sub(1).min(m - 4);
        let x = (t - times[base]) / dt;
        let mut values = DVector::zeros(self.grid().len());
        // Lagrange cubic on equally spaced samples 0,1,2,3
        let l = |k: usize, x: f64| -> f64 {
            let mut num = 1.0;
            let mut den = 1.0;
            for m in 0..4 {
                if m != k {
                    num *= x - m as f64;
                    den *= k as f64 - m as f64;
                }
            }
            num / den
        };
        for k in 0..4 {
            let w = l(k, x);
            values += w * &field(base + k).values;
        }
        Ok(ScalarProfile::new(self.grid().clone(), values))
    }
}

/// One trapezoidal step of u̇ = F(u), F(u) = (1 - K(u))/2, solved by Newton
/// with the Jacobian frozen at the predictor.
fn krf_step(
    grid: &Arc<CollocationGrid>,
    u: &DVector<f64>,
    dt: f64,
    t: f64,
) -> Result<DVector<f64>> {
    let n = grid.len();
    let rhs_f = |v: &DVector<f64>| -> DVector<f64> {
        let lap = grid.round_laplacian(v);
        DVector::from_iterator(
            n,
            (0..n).map(|i| 0.5 * (1.0 - (1.0 - lap[i]) * (-2.0 * v[i]).exp())),
        )
    };
    let f_n = rhs_f(u);
    let mut v = u + dt * &f_n; // Euler predictor

    // Frozen Jacobian: J_R = I - (dt/2) [diag(K) + ½ diag(e^{-2u}) L₀]
    let lap_v = grid.round_laplacian(&v);
    let mut jac = DMatrix::zeros(n, n);
    let l0 = grid.round_laplacian_matrix();
    for i in 0..n {
        let e2u = (2.0 * v[i]).exp();
        let k = (1.0 - lap_v[i]) / e2u;
        for j in 0..n {
            jac[(i, j)] = -0.5 * dt * 0.5 * l0[(i, j)] / e2u;
        }
        jac[(i, i)] += 1.0 - 0.5 * dt * k;
    }
    let lu = jac.lu();

    for iter in 0..50 {
        let f_v = rhs_f(&v);
        let resid = &v - u - 0.5 * dt * (&f_n + &f_v);
        if resid.amax() < 1e-13 {
            return Ok(grid.filter(&v));
        }
        let delta = lu
            .solve(&resid)
            .ok_or(LabError::NewtonDiverged { t, iters: iter })?;
        v -= delta;
        if iter == 49 {
            return Err(LabError::NewtonDiverged { t, iters: iter });
        }
    }
    Ok(v)
}

/// Integrate the normalized flow of the conformal factor up to time `t_final`
/// with constant step `dt`, storing every accepted step.
pub fn evolve_krf(initial: &KahlerState, t_final: f64, dt: f64, meta: RunMeta) -> Result<KrfTrajectory> {
    assert!(t_final > 0.0 && dt > 0.0);
    let grid = initial.grid().clone();
    let steps = (t_final / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(initial.clone());
    let mut u = initial.conformal_factor().values.clone();
    for s in 0..steps {
        let t = s as f64 * dt;
        u = krf_step(&grid, &u, dt, t)?;
        let state = KahlerState::new_unchecked(ScalarProfile::new(grid.clone(), u.clone()))?;
        times.push((s + 1) as f64 * dt);
        states.push(state);
    }
    Ok(KrfTrajectory { times, states, meta })
}

/// Observed convergence order of the integrator from a three-level Richardson
/// estimate on a shortened horizon.
pub fn observed_order(initial: &KahlerState, t_final: f64, dt: f64) -> Result<f64> {
    let meta = RunMeta {
        nodes: initial.grid().len(),
        dt,
        t_final,
        scheme: "trapezoidal".into(),
        seed: 0,
        perturbation: vec![],
        f_t_epsilon: 0.0,
    };
    let fine = |d: f64| -> Result<DVector<f64>> {
        let tr = evolve_krf(initial, t_final, d, meta.clone())?;
        Ok(tr.states.last().unwrap().conformal_factor().values.clone())
    };
    let u1 = fine(dt)?;
    let u2 = fine(dt / 2.0)?;
    let u4 = fine(dt / 4.0)?;
    let e12 = (&u1 - &u2).amax();
    let e24 = (&u2 - &u4).amax();
    Ok((e12 / e24).log2())
}

/// Crank–Nicolson sweep of 2 ∂ₜ w = -Δ w + (Scal - 2) w backward from w(T),
/// on the trajectory's own time grid, with positivity-guarded sub-stepping.
pub fn solve_conjugate_heat_backward(
    krf: KrfTrajectory,
    f_t: &ScalarProfile,
) -> Result<FlowTrajectory> {
    let grid = krf.states[0].grid().clone();
    let n = grid.len();
    f_t.require_smooth("terminal weight potential", 1e-6)?;
    let m = krf.times.len();
    if m < 2 {
        return Err(LabError::TrajectoryTooShort { len: m, need: 2 });
    }

    // operator A_t = diag(e^{-2u}) L₀ - diag(Scal - 2)
    let op = |state: &KahlerState| -> DMatrix<f64> {
        let l0 = grid.round_laplacian_matrix();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            let e2u = state.volume_density().values[i];
            for j in 0..n {
                a[(i, j)] = l0[(i, j)] / e2u;
            }
            a[(i, i)] -= 2.0 * state.gauss_curvature().values[i] - 2.0;
        }
        a
    };

    let mut ws: Vec<DVector<f64>> = vec![DVector::zeros(n); m];
    ws[m - 1] = f_t.values.map(|v| (-v).exp());

    let cn_sub = |a_hi: &DMatrix<f64>,
                  a_lo: &DMatrix<f64>,
                  w_hi: &DVector<f64>,
                  dt: f64|
     -> Option<DVector<f64>> {
        let id = DMatrix::identity(n, n);
        let lhs = &id - (dt / 4.0) * a_lo;
        let rhs = (&id + (dt / 4.0) * a_hi) * w_hi;
        lhs.lu().solve(&rhs)
    };

    for j in (0..m - 1).rev() {
        let dt = krf.times[j + 1] - krf.times[j];
        let a_lo = op(&krf.states[j]);
        let a_hi = op(&krf.states[j + 1]);
        let mut w = cn_sub(&a_hi, &a_lo, &ws[j + 1], dt);
        let mut halvings = 0;
        while w.as_ref().map_or(true, |v| v.min() <= 0.0) {
            halvings += 1;
            if halvings > 20 {
                return Err(LabError::PositivityLost { t: krf.times[j] });
            }
            // re-integrate the interval with 2^halvings Crank–Nicolson
            // substeps against linearly interpolated operators
            let parts = 1usize << halvings;
            let mut cur = ws[j + 1].clone();
            let mut failed = false;
            for p in 0..parts {
                let th = 1.0 - p as f64 / parts as f64;
                let tl = 1.0 - (p + 1) as f64 / parts as f64;
                let ah = &a_lo * (1.0 - th) + &a_hi * th;
                let al = &a_lo * (1.0 - tl) + &a_hi * tl;
                match cn_sub(&ah, &al, &cur, dt / parts as f64) {
                    Some(next) if next.min() > 0.0 => cur = next,
                    _ => {
                        failed = true;
                        break;
                    }
                }
            }
            if !failed {
                w = Some(cur);
            } else {
                w = None;
            }
        }
        ws[j] = grid.filter(&w.unwrap());
    }

    let fs: Vec<ScalarProfile> = ws
        .iter()
        .map(|w| ScalarProfile::new(grid.clone(), w.map(|v| -v.ln())))
        .collect();
    let omega = WeightedMeasure::from_state(&krf.states[0], &fs[0])?;
    Ok(FlowTrajectory {
        times: krf.times,
        states: krf.states,
        fs,
        omega,
        meta: krf.meta,
    })
}

/// Node trajectories of the gauge flow 2 dΨ/dt = -∇f̂ ∘ Ψ, integrated by RK4
/// with spectral interpolation in μ and cubic interpolation in t.
pub struct Reparametrization {
    pub times: Vec<f64>,
    pub maps: Vec<ReparamMap>,
}

pub fn gauge_flow(traj: &FlowTrajectory, stride: usize) -> Result<Reparametrization> {
    let grid = traj.grid().clone();
    let n = grid.len();
    let m = traj.len();
    let dt = traj.dt();

    // velocity field at a stored or interpolated time
    let velocity = |t: f64| -> Result<(ScalarProfile, ScalarProfile)> {
        let u = traj.conformal_factor_at(t)?;
        let f = traj.f_at(t)?;
        Ok((u, f.deriv()))
    };
    let eval_v = |u: &ScalarProfile, df: &ScalarProfile, mu: f64| -> f64 {
        let s = 1.0 - mu * mu;
        let uu = u.interpolate(mu);
        -0.5 * (-2.0 * uu).exp() * s * df.interpolate(mu)
    };

    let mut pos = DVector::from_iterator(n, grid.nodes().iter().cloned());
    let mut times = vec![0.0];
    let mut maps = vec![ReparamMap::identity(grid.clone())];

    for j in 0..m - 1 {
        let t = traj.times[j];
        let (u0, d0) = velocity(t)?;
        let (uh, dh) = velocity(t + 0.5 * dt)?;
        let (u1, d1) = velocity(t + dt)?;
        for i in 0..n {
            let x = pos[i];
            let k1 = eval_v(&u0, &d0, x);
            let k2 = eval_v(&uh, &dh, x + 0.5 * dt * k1);
            let k3 = eval_v(&uh, &dh, x + 0.5 * dt * k2);
            let k4 = eval_v(&u1, &d1, x + dt * k3);
            pos[i] = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (j + 1) % stride == 0 || j + 1 == m - 1 {
            let map = ReparamMap::new(ScalarProfile::new(grid.clone(), pos.clone()))?;
            times.push(traj.times[j + 1]);
            maps.push(map);
        }
    }
    Ok(Reparametrization { times, maps })
}

// ---------------------------------------------------------------------------
// Trajectory persistence: a JSON header line followed by CSV blocks.

pub fn save_trajectory(traj: &FlowTrajectory, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header = serde_json::to_string(&traj.meta).expect("meta serializes");
    writeln!(file, "{header}")?;
    let grid = traj.grid();
    for i in 0..traj.len() {
        writeln!(file, "t {:.16e}", traj.times[i])?;
        let u = &traj.states[i].conformal_factor().values;
        let f = &traj.fs[i].values;
        for j in 0..grid.len() {
            writeln!(file, "{:.16e},{:.16e},{:.16e}", grid.node(j), u[j], f[j])?;
        }
    }
    Ok(())
}

pub fn load_trajectory(path: &Path) -> Result<FlowTrajectory> {
    let file = BufReader::new(std::fs::File::open(path)?);
    let mut lines = file.lines();
    let header = lines
        .next()
        .ok_or_else(|| LabError::MalformedTrajectory("empty file".into()))??;
    let meta: RunMeta = serde_json::from_str(&header)
        .map_err(|e| LabError::MalformedTrajectory(format!("bad header: {e}")))?;
    let grid = CollocationGrid::new(meta.nodes);
    let n = grid.len();

    let mut times = vec![];
    let mut states = vec![];
    let mut fs = vec![];
    let mut u = DVector::zeros(n);
    let mut f = DVector::zeros(n);
    let mut row = 0usize;
    let mut in_block = false;
    for line in lines {
        let line = line?;
        if let Some(ts) = line.strip_prefix("t ") {
            if in_block {
                return Err(LabError::MalformedTrajectory("truncated block".into()));
            }
            times.push(
                ts.trim()
                    .parse::<f64>()
                    .map_err(|e| LabError::MalformedTrajectory(e.to_string()))?,
            );
            row = 0;
            in_block = true;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let _mu: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LabError::MalformedTrajectory(format!("bad row: {line}")))?;
        u[row] = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LabError::MalformedTrajectory(format!("bad row: {line}")))?;
        f[row] = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LabError::MalformedTrajectory(format!("bad row: {line}")))?;
        row += 1;
        if row == n {
            states.push(KahlerState::new_unchecked(ScalarProfile::new(
                grid.clone(),
                u.clone(),
            ))?);
            fs.push(ScalarProfile::new(grid.clone(), f.clone()));
            in_block = false;
        }
    }
    if in_block || states.is_empty() {
        return Err(LabError::MalformedTrajectory("incomplete data".into()));
    }
    let omega = WeightedMeasure::from_state(&states[0], &fs[0])?;
    Ok(FlowTrajectory {
        times,
        states,
        fs,
        omega,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(nodes: usize, dt: f64, t: f64) -> RunMeta {
        RunMeta {
            nodes,
            dt,
            t_final: t,
            scheme: "trapezoidal".into(),
            seed: 0,
            perturbation: vec![],
            f_t_epsilon: 0.0,
        }
    }

    #[test]
    fn round_state_is_a_fixed_point() {
        let grid = CollocationGrid::new(32);
        let state = KahlerState::round(grid.clone());
        let tr = evolve_krf(&state, 0.5, 1e-2, meta(32, 1e-2, 0.5)).unwrap();
        let drift: f64 = tr
            .states
            .iter()
            .map(|s| s.conformal_factor().max_abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-10, "drift {drift}");
    }

    #[test]
    fn perturbed_flow_decays_and_preserves_area() {
        let grid = CollocationGrid::new(48);
        let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
        let state = KahlerState::new_area_normalized(u0).unwrap();
        let tr = evolve_krf(&state, 1.0, 5e-4, meta(48, 5e-4, 1.0)).unwrap();
        let mut last = f64::INFINITY;
        for (i, s) in tr.states.iter().enumerate() {
            let dev = s
                .gauss_curvature()
                .map(|k| (k - 1.0).abs())
                .max_abs();
            if i % 100 == 0 {
                assert!(dev <= last + 1e-12, "curvature deviation grew");
                last = dev;
            }
            assert!((s.area() - 4.0 * std::f64::consts::PI).abs() <= 1e-8);
        }
    }

    #[test]
    fn observed_order_is_second() {
        let grid = CollocationGrid::new(32);
        let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
        let state = KahlerState::new(u0).unwrap();
        let order = observed_order(&state, 0.25, 2e-2).unwrap();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn backward_heat_constant_on_round() {
        let grid = CollocationGrid::new(32);
        let state = KahlerState::round(grid.clone());
        let tr = evolve_krf(&state, 0.5, 5e-3, meta(32, 5e-3, 0.5)).unwrap();
        let f_t = ScalarProfile::constant(grid.clone(), 0.3);
        let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
        for f in &full.fs {
            assert!((f - &ScalarProfile::constant(grid.clone(), 0.3)).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn backward_heat_conserves_mass() {
        let grid = CollocationGrid::new(48);
        let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
        let state = KahlerState::new(u0).unwrap();
        let tr = evolve_krf(&state, 1.0, 1e-3, meta(48, 1e-3, 1.0)).unwrap();
        let f_t = ScalarProfile::from_fn(grid.clone(), |mu| 0.1 * (3.0 * mu * mu - 1.0) / 2.0);
        let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
        let m_end = full.mass_at(full.len() - 1);
        for i in 0..full.len() {
            assert!(
                (full.mass_at(i) - m_end).abs() <= 1e-8 * m_end,
                "mass drift at slice {i}"
            );
        }
    }

    #[test]
    fn backward_equation_residual_in_nonlinear_form() {
        // 2 ḟ = -Δf + |∇f|² - Scal + 2 along the solution, time derivative by
        // central differences.
        let grid = CollocationGrid::new(48);
        let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * (3.0 * mu * mu - 1.0) / 2.0);
        let state = KahlerState::new(u0).unwrap();
        let tr = evolve_krf(&state, 0.5, 5e-4, meta(48, 5e-4, 0.5)).unwrap();
        let f_t = ScalarProfile::from_fn(grid.clone(), |mu| 0.1 * (3.0 * mu * mu - 1.0) / 2.0);
        let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
        let dt = full.dt();
        let mut worst = 0.0f64;
        for i in (50..full.len() - 50).step_by(100) {
            let fdot = ScalarProfile::new(
                grid.clone(),
                (&full.fs[i + 1].values - &full.fs[i - 1].values) / (2.0 * dt),
            );
            let state = &full.states[i];
            let f = &full.fs[i];
            let lap = state.laplacian(f);
            let gr = state.gradient_norm_sq(f);
            let scal = state.scalar_curvature();
            let resid = (0..grid.len())
                .map(|j| {
                    (2.0 * fdot.values[j]
                        - (-lap.values[j] + gr.values[j] - scal.values[j] + 2.0))
                        .abs()
                })
                .fold(0.0, f64::max);
            worst = worst.max(resid);
        }
        assert!(worst <= 1e-6, "nonlinear residual {worst}");
    }

    #[test]
    fn time_reversal_round_trip() {
        // Backward sweep then exact algebraic reversal returns w(T); kept at
        // modest resolution and horizon where the reversal is well posed.
        let grid = CollocationGrid::new(32);
        let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.03 * (3.0 * mu * mu - 1.0) / 2.0);
        let state = KahlerState::new(u0).unwrap();
        let tr = evolve_krf(&state, 0.025, 5e-4, meta(32, 5e-4, 0.025)).unwrap();
        let f_t = ScalarProfile::from_fn(grid.clone(), |mu| 0.05 * mu);
        let full = solve_conjugate_heat_backward(
            KrfTrajectory {
                times: tr.times.clone(),
                states: tr.states.clone(),
                meta: tr.meta.clone(),
            },
            &f_t,
        )
        .unwrap();
        // forward re-integration of the same linear relations
        let n = grid.len();
        let op = |state: &KahlerState| -> DMatrix<f64> {
            let l0 = grid.round_laplacian_matrix();
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                let e2u = state.volume_density().values[i];
                for j in 0..n {
                    a[(i, j)] = l0[(i, j)] / e2u;
                }
                a[(i, i)] -= 2.0 * state.gauss_curvature().values[i] - 2.0;
            }
            a
        };
        let mut w = full.fs[0].values.map(|v| (-v).exp());
        let id = DMatrix::identity(n, n);
        for j in 0..full.len() - 1 {
            let dt = full.times[j + 1] - full.times[j];
            let a_lo = op(&full.states[j]);
            let a_hi = op(&full.states[j + 1]);
            let rhs = (&id - (dt / 4.0) * &a_lo) * &w;
            w = (&id + (dt / 4.0) * &a_hi).lu().solve(&rhs).unwrap();
        }
        let w_t = full.fs.last().unwrap().values.map(|v| (-v).exp());
        let rel = (&w - &w_t).amax() / w_t.amax();
        assert!(rel <= 1e-7, "round trip error {rel}");
    }

    #[test]
    fn gauge_flow_identity_for_constant_f() {
        let grid = CollocationGrid::new(32);
        let state = KahlerState::round(grid.clone());
        let tr = evolve_krf(&state, 0.2, 2e-3, meta(32, 2e-3, 0.2)).unwrap();
        let f_t = ScalarProfile::constant(grid.clone(), 0.2);
        let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
        let rep = gauge_flow(&full, 25).unwrap();
        for map in &rep.maps {
            let dev = (0..grid.len())
                .map(|i| (map.values.values[i] - grid.node(i)).abs())
                .fold(0.0, f64::max);
            assert!(dev <= 1e-12);
        }
    }

    #[test]
    fn trajectory_round_trip_through_file() {
        let grid = CollocationGrid::new(32);
        let u0 = ScalarProfile::from_fn(grid.clone(), |mu| 0.04 * mu * mu);
        let state = KahlerState::new(u0).unwrap();
        let tr = evolve_krf(&state, 0.1, 5e-3, meta(32, 5e-3, 0.1)).unwrap();
        let f_t = ScalarProfile::from_fn(grid.clone(), |mu| 0.1 * mu);
        let full = solve_conjugate_heat_backward(tr, &f_t).unwrap();
        let dir = std::env::temp_dir().join("wlab_test_traj.txt");
        save_trajectory(&full, &dir).unwrap();
        let back = load_trajectory(&dir).unwrap();
        assert_eq!(back.len(), full.len());
        for i in [0usize, full.len() / 2, full.len() - 1] {
            let du = (back.states[i].conformal_factor() - full.states[i].conformal_factor())
                .max_abs();
            let df = (&back.fs[i] - &full.fs[i]).max_abs();
            assert!(du <= 1e-14 && df <= 1e-14);
        }
        std::fs::remove_file(dir).ok();
    }
}
