//! Exact point certification of Kähler curvature identities with truncated
//! power series over complex rationals.
//!
//! The crate builds seeded random Kähler potential jets in geodesic normal
//! holomorphic coordinates, derives metric, Christoffel, Ricci and curvature
//! series from them, and checks a family of tensor identities entrywise as
//! exact rationals. A companion routine extracts the dimension-one curvature
//! pairing constant consumed by the numerical flow laboratory.

pub mod checks;
pub mod jet;
pub mod laplace;
pub mod matrix;
pub mod norms;
pub mod rational;
pub mod series;

pub use checks::{
    check_a_local_expression, check_bochner_point, check_dim1_pairing_constant,
    check_fourth_derivative_symmetry, check_lap_a, check_lap_rc, check_sim_ric, run_check,
    JetCheckReport, CHECK_NAMES,
};
pub use jet::{DegreeOverflow, MetricJet, PotentialJet};
pub use norms::check_norm_comparisons;
pub use rational::CRat;
pub use series::TruncSeries;
