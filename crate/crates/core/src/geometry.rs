//! Circle-symmetric Kähler metrics on the sphere, represented by a conformal
//! factor over the round background, together with the pointwise geometric
//! operators every other module consumes.
//!
//! Conventions: g = e^{2u} g₀ with g₀ the unit round sphere (area 4π, Gauss
//! curvature 1, the Einstein normalization of the flow). Δ = div ∇, so Δ of a
//! function at an interior maximum is ≤ 0. The orthonormal frame is
//! e₁ ∝ ∂_μ, e₂ = J e₁; invariant symmetric 2-tensors are stored through
//! their J-invariant coefficient λ (the multiple of g) and the de-weighted
//! anti-invariant components P, Q with frame values (1-μ²)·P, (1-μ²)·Q, which
//! keeps every stored profile smooth across the poles.

use crate::error::{LabError, Result};
use crate::grid::CollocationGrid;
use crate::profile::ScalarProfile;
use nalgebra::DVector;
use std::sync::Arc;

pub const SMOOTH_TAIL_DEFAULT: f64 = 1e-8;
const MIN_DENSITY: f64 = 1e-10;
const MAX_CURVATURE: f64 = 1e6;

/// Exact rational constant relating ⟨α·Rm, α⟩ to K a² for α = a ω in complex
/// dimension one. Certified against the jet verifier's contraction, which
/// recomputes it as an exact rational (acceptance ties the two together).
pub const RM_PAIRING_CONSTANT: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct KahlerState {
    u: ScalarProfile,
    density: ScalarProfile,
    gauss: ScalarProfile,
    area: f64,
}

impl KahlerState {
    pub fn new(u: ScalarProfile) -> Result<Self> {
        u.require_smooth("conformal factor", SMOOTH_TAIL_DEFAULT)?;
        Self::new_unchecked(u)
    }

    /// Construction without the smoothness diagnostic, for integrator
    /// internals that validate differently.
    pub fn new_unchecked(u: ScalarProfile) -> Result<Self> {
        let density = u.map(|x| (2.0 * x).exp());
        if density.min() < MIN_DENSITY {
            return Err(LabError::MetricDegenerate {
                min_density: density.min(),
            });
        }
        let lap0_u = u.round_laplacian();
        let gauss = density.zip(&lap0_u, |e2u, l| (1.0 - l) / e2u);
        if gauss.max_abs() > MAX_CURVATURE {
            return Err(LabError::CurvatureBlowup {
                max_abs: gauss.max_abs(),
            });
        }
        let area = u.grid.quad_sphere(&density.values);
        Ok(KahlerState {
            u,
            density,
            gauss,
            area,
        })
    }

    pub fn round(grid: Arc<CollocationGrid>) -> Self {
        Self::new(ScalarProfile::zeros(grid)).expect("round state is valid")
    }

    /// State with the conformal factor shifted by a constant so the total
    /// area is exactly 4π, the normalization the flow preserves.
    pub fn new_area_normalized(u: ScalarProfile) -> Result<Self> {
        let raw = Self::new(u)?;
        let c = -0.5 * (raw.area / (4.0 * std::f64::consts::PI)).ln();
        if c.abs() < 1e-15 {
            return Ok(raw);
        }
        Self::new(raw.u.map(|x| x + c))
    }

    pub fn grid(&self) -> &Arc<CollocationGrid> {
        &self.u.grid
    }

    pub fn conformal_factor(&self) -> &ScalarProfile {
        &self.u
    }

    /// e^{2u}, the density of dV_g against dV₀.
    pub fn volume_density(&self) -> &ScalarProfile {
        &self.density
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Gauss curvature K = e^{-2u}(1 - Δ₀ u).
    pub fn gauss_curvature(&self) -> &ScalarProfile {
        &self.gauss
    }

    /// Scalar curvature, 2K on a surface.
    pub fn scalar_curvature(&self) -> ScalarProfile {
        self.gauss.scale(2.0)
    }

    /// Δ_g φ = e^{-2u} Δ₀ φ.
    pub fn laplacian(&self, phi: &ScalarProfile) -> ScalarProfile {
        phi.round_laplacian().zip(&self.density, |l, d| l / d)
    }

    /// |∇φ|²_g = e^{-2u} (1-μ²) (dφ/dμ)².
    pub fn gradient_norm_sq(&self, phi: &ScalarProfile) -> ScalarProfile {
        self.gradient_pair(phi, phi)
    }

    /// ⟨∇φ, ∇ψ⟩_g.
    pub fn gradient_pair(&self, phi: &ScalarProfile, psi: &ScalarProfile) -> ScalarProfile {
        let dp = phi.deriv();
        let dq = psi.deriv();
        let grid = self.grid().clone();
        let v = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| {
                let s = 1.0 - grid.node(i) * grid.node(i);
                s * dp.values[i] * dq.values[i] / self.density.values[i]
            }),
        );
        ScalarProfile::new(grid, v)
    }

    /// Full Hessian ∇dφ as an invariant tensor.
    pub fn hessian(&self, phi: &ScalarProfile) -> InvariantSymmetric2Tensor {
        let (jinv, anti) = self.hessian_split(phi);
        InvariantSymmetric2Tensor {
            jinv,
            anti_p: anti.anti_p,
            anti_q: anti.anti_q,
        }
    }

    /// J-invariant coefficient λ = Δ_g φ / 2 and the traceless anti-invariant
    /// remainder, the tensor incarnation of ∂̄∇φ.
    pub fn hessian_split(&self, phi: &ScalarProfile) -> (ScalarProfile, InvariantSymmetric2Tensor) {
        let lam = self.laplacian(phi).scale(0.5);
        let d1 = phi.deriv();
        let d2 = d1.deriv();
        let du = self.u.deriv();
        // de-weighted anti component: P with frame value (1-μ²) P,
        // P = e^{-2u} (φ'' - 2 u' φ') / 2
        let p = ScalarProfile::new(
            self.grid().clone(),
            DVector::from_iterator(
                self.grid().len(),
                (0..self.grid().len()).map(|i| {
                    0.5 * (d2.values[i] - 2.0 * du.values[i] * d1.values[i])
                        / self.density.values[i]
                }),
            ),
        );
        let anti = InvariantSymmetric2Tensor {
            jinv: ScalarProfile::zeros(self.grid().clone()),
            anti_p: p,
            anti_q: ScalarProfile::zeros(self.grid().clone()),
        };
        (lam, anti)
    }

    /// Pointwise pairing ⟨α·Rm, α⟩ of a (1,1)-form α = a·ω with the curvature
    /// operator, in the closed dimension-one form c·K·a².
    pub fn curvature_pairing(&self, alpha: &InvariantSymmetric2Tensor) -> Result<ScalarProfile> {
        let anti = alpha.anti_norm_sq().max_abs();
        let total = alpha.norm_sq().max_abs().max(1e-30);
        let rel = (anti / total).sqrt();
        if rel > 1e-7 {
            return Err(LabError::NotOneOneForm { size: rel });
        }
        Ok(self
            .gauss
            .zip(&alpha.jinv, |k, a| RM_PAIRING_CONSTANT * k * a * a))
    }

    /// |∇b|² for an invariant symmetric 2-tensor, through the frame connection
    /// coefficients; the metric itself is parallel.
    pub fn tensor_covariant_norm_sq(&self, b: &InvariantSymmetric2Tensor) -> ScalarProfile {
        let grid = self.grid().clone();
        let dl = b.jinv.deriv();
        let dp = b.anti_p.deriv();
        let dq = b.anti_q.deriv();
        let du = self.u.deriv();
        let v = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| {
                let mu = grid.node(i);
                let s = 1.0 - mu * mu;
                let e2u = self.density.values[i];
                let lam_term = 2.0 * s * dl.values[i] * dl.values[i] / e2u;
                let tp = s * dp.values[i] - 2.0 * mu * b.anti_p.values[i];
                let tq = s * dq.values[i] - 2.0 * mu * b.anti_q.values[i];
                let rot = s * du.values[i] - mu;
                let anti_term = (2.0 * s * (tp * tp + tq * tq)
                    + 8.0
                        * s
                        * rot
                        * rot
                        * (b.anti_p.values[i] * b.anti_p.values[i]
                            + b.anti_q.values[i] * b.anti_q.values[i]))
                    / e2u;
                lam_term + anti_term
            }),
        );
        ScalarProfile::new(grid, v)
    }

    /// ∫ φ e^{-f} dV_g.
    pub fn weighted_integral(&self, phi: &ScalarProfile, f: &ScalarProfile) -> f64 {
        let grid = self.grid();
        let integrand = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| {
                phi.values[i] * (-f.values[i]).exp() * self.density.values[i]
            }),
        );
        grid.quad_sphere(&integrand)
    }

    /// ∫ φ Ω.
    pub fn measure_integral(&self, phi: &ScalarProfile, omega: &WeightedMeasure) -> f64 {
        let grid = self.grid();
        let integrand = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| phi.values[i] * omega.density0.values[i]),
        );
        grid.quad_sphere(&integrand)
    }

    /// ∫ φ dV_g.
    pub fn integral(&self, phi: &ScalarProfile) -> f64 {
        let grid = self.grid();
        let integrand = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| phi.values[i] * self.density.values[i]),
        );
        grid.quad_sphere(&integrand)
    }

    /// μ-component of the 1-form ∇*_Ω T = ∇*T + T(∇f, ·) for a diagonal
    /// invariant symmetric tensor (frame components λ ± (1-μ²)P), with
    /// f = log(dV_g / Ω). The off-diagonal channel must vanish.
    pub fn weighted_divergence_form(
        &self,
        t: &InvariantSymmetric2Tensor,
        f: &ScalarProfile,
    ) -> ScalarProfile {
        assert!(
            t.anti_q.max_abs() <= 1e-12 * t.norm_sq().max_abs().max(1.0),
            "off-diagonal invariant divergence not supported"
        );
        let grid = self.grid().clone();
        let tau1 = t.frame_component_11();
        let dtau1 = tau1.deriv();
        let du = self.u.deriv();
        let df = f.deriv();
        let v = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| {
                let mu = grid.node(i);
                let s = 1.0 - mu * mu;
                let rot = s * du.values[i] - mu;
                -dtau1.values[i] - 2.0 * rot * t.anti_p.values[i] + tau1.values[i] * df.values[i]
            }),
        );
        ScalarProfile::new(grid, v)
    }

    /// Pulls the state and a function back along an equivariant
    /// reparametrization and re-expresses the result in the conformal gauge
    /// on the same grid. The general-metric components of the raw pullback
    /// are returned alongside for gauge-independent evaluations.
    pub fn reparametrize(
        &self,
        f: &ScalarProfile,
        map: &ReparamMap,
    ) -> Result<(KahlerState, ScalarProfile, PulledBackMetric)> {
        map.validate()?;
        let pulled = self.pull_back(f, map);

        // Conformal re-gauge: the new latitude solves dm/dμ = (1-m²)√(A/B)
        // with endpoints fixed, which is the map itself; the conformal factor
        // is then recovered from the pulled-back metric components alone.
        let grid = self.grid().clone();
        let n = grid.len();
        let w_of_nu = DVector::from_iterator(
            n,
            (0..n).map(|i| 0.5 * (pulled.b_bar.values[i] / pulled.ratio.values[i]).ln()),
        );
        let w_profile = ScalarProfile::new(grid.clone(), w_of_nu);
        let mut u_new = DVector::zeros(n);
        let mut f_new = DVector::zeros(n);
        for j in 0..n {
            let pre = map.invert(grid.node(j));
            u_new[j] = w_profile.interpolate(pre);
            f_new[j] = pulled.f.interpolate(pre);
        }
        let state = KahlerState::new_unchecked(ScalarProfile::new(grid.clone(), u_new))?;
        Ok((state, ScalarProfile::new(grid, f_new), pulled))
    }

    /// Raw pullback along an equivariant map: metric components in the de-
    /// weighted form A = Ā/(1-μ²), B = B̄(1-μ²), plus the composed function.
    pub fn pull_back(&self, f: &ScalarProfile, map: &ReparamMap) -> PulledBackMetric {
        let grid = self.grid().clone();
        let n = grid.len();
        let dnu = map.values.deriv();
        let mut a_bar = DVector::zeros(n);
        let mut b_bar = DVector::zeros(n);
        let mut ratio = DVector::zeros(n);
        let mut fv = DVector::zeros(n);
        for i in 0..n {
            let mu = grid.node(i);
            let s = 1.0 - mu * mu;
            let nu = map.values.values[i];
            let e2u = (2.0 * self.u.interpolate(nu)).exp();
            // (1-ν²)/(1-μ²), with the endpoint limit ν'(±1)
            let r = if s < 1e-13 {
                dnu.values[i]
            } else {
                (1.0 - nu * nu) / s
            };
            ratio[i] = r;
            a_bar[i] = e2u * dnu.values[i] * dnu.values[i] / r;
            b_bar[i] = e2u * r;
            fv[i] = f.interpolate(nu);
        }
        PulledBackMetric {
            a_bar: ScalarProfile::new(grid.clone(), a_bar),
            b_bar: ScalarProfile::new(grid.clone(), b_bar),
            ratio: ScalarProfile::new(grid.clone(), ratio),
            f: ScalarProfile::new(grid, fv),
        }
    }
}

/// An S¹-invariant symmetric 2-tensor split into its J-invariant multiple of
/// the metric and the de-weighted anti-invariant components.
#[derive(Clone, Debug)]
pub struct InvariantSymmetric2Tensor {
    /// Coefficient λ of the J-invariant part λ·g.
    pub jinv: ScalarProfile,
    /// De-weighted diagonal anti component: frame value (1-μ²)·P.
    pub anti_p: ScalarProfile,
    /// De-weighted off-diagonal anti component: frame value (1-μ²)·Q.
    pub anti_q: ScalarProfile,
}

impl InvariantSymmetric2Tensor {
    pub fn zero(grid: Arc<CollocationGrid>) -> Self {
        InvariantSymmetric2Tensor {
            jinv: ScalarProfile::zeros(grid.clone()),
            anti_p: ScalarProfile::zeros(grid.clone()),
            anti_q: ScalarProfile::zeros(grid),
        }
    }

    pub fn multiple_of_metric(lam: ScalarProfile) -> Self {
        let grid = lam.grid.clone();
        InvariantSymmetric2Tensor {
            jinv: lam,
            anti_p: ScalarProfile::zeros(grid.clone()),
            anti_q: ScalarProfile::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<CollocationGrid> {
        &self.jinv.grid
    }

    fn weight(&self) -> ScalarProfile {
        ScalarProfile::from_fn(self.grid().clone(), |mu| 1.0 - mu * mu)
    }

    /// Frame component b(e₁, e₁) = λ + (1-μ²) P.
    pub fn frame_component_11(&self) -> ScalarProfile {
        let s = self.weight();
        self.jinv.zip(&(&s * &self.anti_p), |l, sp| l + sp)
    }

    /// Frame component b(e₂, e₂) = λ - (1-μ²) P.
    pub fn frame_component_22(&self) -> ScalarProfile {
        let s = self.weight();
        self.jinv.zip(&(&s * &self.anti_p), |l, sp| l - sp)
    }

    /// Frame component b(e₁, e₂) = (1-μ²) Q.
    pub fn frame_component_12(&self) -> ScalarProfile {
        &self.weight() * &self.anti_q
    }

    /// |b|² = 2λ² + 2(1-μ²)²(P² + Q²): the split is pointwise orthogonal.
    pub fn norm_sq(&self) -> ScalarProfile {
        let j = self.jinv_norm_sq();
        let a = self.anti_norm_sq();
        &j + &a
    }

    pub fn jinv_norm_sq(&self) -> ScalarProfile {
        self.jinv.map(|l| 2.0 * l * l)
    }

    pub fn anti_norm_sq(&self) -> ScalarProfile {
        let grid = self.grid().clone();
        let v = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| {
                let s = 1.0 - grid.node(i) * grid.node(i);
                2.0 * s
                    * s
                    * (self.anti_p.values[i] * self.anti_p.values[i]
                        + self.anti_q.values[i] * self.anti_q.values[i])
            }),
        );
        ScalarProfile::new(grid, v)
    }

    /// Real pairing Tr_ℝ(b b'ᵀ) of two invariant symmetric tensors.
    pub fn pairing(&self, other: &Self) -> ScalarProfile {
        let grid = self.grid().clone();
        let v = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| {
                let s = 1.0 - grid.node(i) * grid.node(i);
                2.0 * self.jinv.values[i] * other.jinv.values[i]
                    + 2.0
                        * s
                        * s
                        * (self.anti_p.values[i] * other.anti_p.values[i]
                            + self.anti_q.values[i] * other.anti_q.values[i])
            }),
        );
        ScalarProfile::new(grid, v)
    }

    pub fn add(&self, other: &Self) -> Self {
        InvariantSymmetric2Tensor {
            jinv: &self.jinv + &other.jinv,
            anti_p: &self.anti_p + &other.anti_p,
            anti_q: &self.anti_q + &other.anti_q,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        InvariantSymmetric2Tensor {
            jinv: &self.jinv - &other.jinv,
            anti_p: &self.anti_p - &other.anti_p,
            anti_q: &self.anti_q - &other.anti_q,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        InvariantSymmetric2Tensor {
            jinv: self.jinv.scale(c),
            anti_p: self.anti_p.scale(c),
            anti_q: self.anti_q.scale(c),
        }
    }

    /// Endomorphism square trace Tr_ℝ(b*)², equal to |b|² for symmetric b.
    pub fn endo_square_trace(&self) -> ScalarProfile {
        self.pairing(self)
    }
}

/// A fixed positive measure, stored through its density against dV₀.
#[derive(Clone, Debug)]
pub struct WeightedMeasure {
    pub density0: ScalarProfile,
    pub mass: f64,
}

impl WeightedMeasure {
    pub fn new(density0: ScalarProfile) -> Result<Self> {
        if density0.min() <= 0.0 || !density0.all_finite() {
            return Err(LabError::NonPositiveMeasure);
        }
        let mass = density0.grid.quad_sphere(&density0.values);
        Ok(WeightedMeasure { density0, mass })
    }

    /// Ω = e^{-f} dV_g.
    pub fn from_state(state: &KahlerState, f: &ScalarProfile) -> Result<Self> {
        let d = state
            .volume_density()
            .zip(f, |e2u, fv| e2u * (-fv).exp());
        Self::new(d)
    }

    /// log(dV_g / Ω) for a given state.
    pub fn log_density_ratio(&self, state: &KahlerState) -> ScalarProfile {
        state
            .volume_density()
            .zip(&self.density0, |e2u, d| (e2u / d).ln())
    }
}

/// Monotone endpoint-fixing map of μ, the equivariant reduction of a sphere
/// diffeomorphism.
#[derive(Clone, Debug)]
pub struct ReparamMap {
    pub values: ScalarProfile,
}

impl ReparamMap {
    pub fn identity(grid: Arc<CollocationGrid>) -> Self {
        ReparamMap {
            values: ScalarProfile::from_fn(grid, |mu| mu),
        }
    }

    pub fn new(values: ScalarProfile) -> Result<Self> {
        let map = ReparamMap { values };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<()> {
        let v = &self.values.values;
        let n = v.len();
        if (v[0] + 1.0).abs() > 1e-10 || (v[n - 1] - 1.0).abs() > 1e-10 {
            return Err(LabError::NonMonotoneMap);
        }
        for i in 1..n {
            if v[i] <= v[i - 1] {
                return Err(LabError::NonMonotoneMap);
            }
        }
        let dv = self.values.deriv();
        if dv.min() <= 0.0 {
            return Err(LabError::NonMonotoneMap);
        }
        Ok(())
    }

    /// Preimage of a point under the map, by bisection on the interpolant.
    pub fn invert(&self, y: f64) -> f64 {
        let mut lo = -1.0f64;
        let mut hi = 1.0f64;
        if y <= -1.0 {
            return -1.0;
        }
        if y >= 1.0 {
            return 1.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.values.interpolate(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// General axisymmetric metric A dμ² + B dθ² in the pole-regular form
/// A = Ā/(1-μ²), B = B̄(1-μ²), as produced by pulling back a state.
#[derive(Clone, Debug)]
pub struct PulledBackMetric {
    pub a_bar: ScalarProfile,
    pub b_bar: ScalarProfile,
    /// (1-ν²)/(1-μ²), the pole-regular stretch ratio of the map.
    pub ratio: ScalarProfile,
    pub f: ScalarProfile,
}

impl PulledBackMetric {
    pub fn grid(&self) -> &Arc<CollocationGrid> {
        &self.a_bar.grid
    }

    pub fn area(&self) -> f64 {
        let grid = self.grid();
        let v = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| (self.a_bar.values[i] * self.b_bar.values[i]).sqrt()),
        );
        grid.quad_sphere(&v)
    }

    /// Gauss curvature recomputed from the pulled-back components alone.
    pub fn gauss_curvature(&self) -> ScalarProfile {
        let grid = self.grid().clone();
        let n = grid.len();
        let sqrt_ab = DVector::from_iterator(
            n,
            (0..n).map(|i| (self.a_bar.values[i] * self.b_bar.values[i]).sqrt()),
        );
        let db = self.b_bar.deriv();
        let inner = DVector::from_iterator(
            n,
            (0..n).map(|i| {
                let mu = grid.node(i);
                let s = 1.0 - mu * mu;
                (db.values[i] * s - 2.0 * mu * self.b_bar.values[i]) / sqrt_ab[i]
            }),
        );
        let d_inner = grid.deriv(&inner);
        ScalarProfile::new(
            grid,
            DVector::from_iterator(n, (0..n).map(|i| -0.5 * d_inner[i] / sqrt_ab[i])),
        )
    }

    /// The entropy functional evaluated directly on the general metric, an
    /// independent route used by the invariance tests.
    pub fn w_functional(&self) -> f64 {
        let grid = self.grid();
        let n = grid.len();
        let k = self.gauss_curvature();
        let df = self.f.deriv();
        let v = DVector::from_iterator(
            n,
            (0..n).map(|i| {
                let mu = grid.node(i);
                let s = 1.0 - mu * mu;
                let grad_sq = s * df.values[i] * df.values[i] / self.a_bar.values[i];
                let dens = (self.a_bar.values[i] * self.b_bar.values[i]).sqrt();
                (grad_sq + 2.0 * k.values[i] + 2.0 * self.f.values[i] - 2.0)
                    * (-self.f.values[i]).exp()
                    * dens
            }),
        );
        grid.quad_sphere(&v)
    }

    /// Density of e^{-f} dV against dV₀ in the transported gauge.
    pub fn weighted_volume_density(&self) -> ScalarProfile {
        let grid = self.grid().clone();
        let v = DVector::from_iterator(
            grid.len(),
            (0..grid.len()).map(|i| {
                (self.a_bar.values[i] * self.b_bar.values[i]).sqrt()
                    * (-self.f.values[i]).exp()
            }),
        );
        ScalarProfile::new(grid, v)
    }
}
