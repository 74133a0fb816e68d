//! Numerical laboratory for the entropy functional along the normalized
//! Kähler-Ricci flow on the circle-symmetric sphere.
//!
//! The lab integrates the conformal reduction of the flow, solves the
//! backward conjugate heat equation for the weight potential, evaluates the
//! entropy functional and its first and second variations, and checks a
//! family of pointwise and integrated tensor identities against
//! finite-difference oracles. All fields are axisymmetric profiles of the
//! latitude μ on a Legendre-Gauss-Lobatto grid; everything is deterministic
//! given a seed.

pub mod bench;
pub mod entropy;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod oracle;
pub mod profile;

pub use error::{LabError, Result};
pub use geometry::{
    InvariantSymmetric2Tensor, KahlerState, PulledBackMetric, ReparamMap, WeightedMeasure,
    RM_PAIRING_CONSTANT,
};
pub use grid::CollocationGrid;
pub use profile::ScalarProfile;
