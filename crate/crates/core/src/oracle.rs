//! Independent validation utilities: dense finite-difference discretizations
//! on fine uniform grids, and seeded generators for smooth random data.
//!
//! Everything here deliberately avoids the spectral machinery it is used to
//! check: derivatives are computed from fourth-order stencils on uniform
//! grids, never from the collocation operators.

use crate::geometry::ReparamMap;
use crate::grid::CollocationGrid;
use crate::profile::ScalarProfile;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Uniform grid on [-1, 1] with m points.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64)
        .collect()
}

/// Fourth-order finite-difference first derivative on a uniform grid,
/// one-sided at the edges.
pub fn fd_deriv_uniform(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 7);
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = if i >= 2 && i + 2 < n {
            (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2])
                / (12.0 * h)
        } else if i < 2 {
            (-25.0 * values[i] + 48.0 * values[i + 1] - 36.0 * values[i + 2]
                + 16.0 * values[i + 3]
                - 3.0 * values[i + 4])
                / (12.0 * h)
        } else {
            (25.0 * values[i] - 48.0 * values[i - 1] + 36.0 * values[i - 2]
                - 16.0 * values[i - 3]
                + 3.0 * values[i - 4])
                / (12.0 * h)
        };
    }
    out
}

/// Gauss curvature of e^{2u} g₀ computed purely by finite differences of an
/// analytic conformal factor on a fine uniform grid:
/// K = e^{-2u} (1 - d/dμ[(1-μ²) du/dμ]).
pub fn gauss_curvature_fd(u: impl Fn(f64) -> f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mus = uniform_grid(m);
    let h = 2.0 / (m - 1) as f64;
    let uv: Vec<f64> = mus.iter().map(|&x| u(x)).collect();
    let du = fd_deriv_uniform(&uv, h);
    let flux: Vec<f64> = mus
        .iter()
        .zip(du.iter())
        .map(|(&x, &d)| (1.0 - x * x) * d)
        .collect();
    let lap = fd_deriv_uniform(&flux, h);
    let k = mus
        .iter()
        .enumerate()
        .map(|(i, _)| (1.0 - lap[i]) * (-2.0 * uv[i]).exp())
        .collect();
    (mus, k)
}

/// |∇φ|² of an analytic function under e^{2u} g₀ by finite differences.
pub fn gradient_norm_sq_fd(
    u: impl Fn(f64) -> f64,
    phi: impl Fn(f64) -> f64,
    m: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mus = uniform_grid(m);
    let h = 2.0 / (m - 1) as f64;
    let pv: Vec<f64> = mus.iter().map(|&x| phi(x)).collect();
    let dp = fd_deriv_uniform(&pv, h);
    let g = mus
        .iter()
        .enumerate()
        .map(|(i, &x)| (1.0 - x * x) * dp[i] * dp[i] * (-2.0 * u(x)).exp())
        .collect();
    (mus, g)
}

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

/// Smooth random profile Σ c_k P_k(μ) with c_k uniform in ±amplitude.
pub fn random_smooth_profile(
    grid: Arc<CollocationGrid>,
    seed: u64,
    max_degree: usize,
    amplitude: f64,
) -> ScalarProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..=max_degree)
        .map(|_| rng.gen_range(-amplitude..amplitude))
        .collect();
    ScalarProfile::from_fn(grid, |mu| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * legendre(k, mu))
            .sum()
    })
}

/// Random conformal factor of the standard slice family:
/// u = Σ_{k=2..5} c_k P_k(μ), c_k uniform in [-0.1, 0.1].
pub fn random_slice_factor(grid: Arc<CollocationGrid>, seed: u64) -> ScalarProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (2..=5).map(|_| rng.gen_range(-0.1..0.1)).collect();
    ScalarProfile::from_fn(grid, |mu| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * legendre(k + 2, mu))
            .sum()
    })
}

/// Random smooth equivariant reparametrization:
/// ν(μ) = μ + Σ_{k=1..4} c_k (1-μ²) P_k(μ) with coefficients small enough to
/// keep the map strictly monotone.
pub fn random_reparam_map(grid: Arc<CollocationGrid>, seed: u64) -> ReparamMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (1..=4).map(|_| rng.gen_range(-0.015..0.015)).collect();
    let values = ScalarProfile::from_fn(grid, |mu| {
        let bump: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * (1.0 - mu * mu) * legendre(k + 1, mu))
            .sum();
        mu + bump
    });
    ReparamMap::new(values).expect("generated map is monotone")
}

/// Interpolate spectral data onto a list of query points.
pub fn sample_profile(p: &ScalarProfile, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| p.interpolate(x)).collect()
}

/// Max-norm difference between a spectral profile and oracle values given at
/// oracle grid points (spectral side interpolated to the oracle points, edges
/// excluded where one-sided stencils dominate the oracle's own error).
pub fn max_diff_against_oracle(p: &ScalarProfile, xs: &[f64], oracle: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        if x.abs() > 0.999 {
            continue;
        }
        worst = worst.max((p.interpolate(x) - oracle[i]).abs());
    }
    worst
}

/// Quadrature helper used by tests comparing against dense trapezoid sums.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    }
    acc
}

/// Dense vector of nodal values for assembling ad-hoc profiles in tests.
pub fn profile_from_values(grid: Arc<CollocationGrid>, v: Vec<f64>) -> ScalarProfile {
    ScalarProfile::new(grid, DVector::from_vec(v))
}
