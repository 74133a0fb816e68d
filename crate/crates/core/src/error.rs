use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("profile '{which}' is not spectrally smooth: tail {tail:.3e} exceeds {threshold:.3e}")]
    NonSmoothProfile {
        which: String,
        tail: f64,
        threshold: f64,
    },

    #[error("metric degenerate: min conformal density {min_density:.3e}")]
    MetricDegenerate { min_density: f64 },

    #[error("curvature blow-up: max |K| = {max_abs:.3e}")]
    CurvatureBlowup { max_abs: f64 },

    #[error("Newton iteration diverged at t = {t:.6} after {iters} iterations")]
    NewtonDiverged { t: f64, iters: usize },

    #[error("conjugate heat solution lost positivity at t = {t:.6}")]
    PositivityLost { t: f64 },

    #[error("reparametrization map is not strictly monotone")]
    NonMonotoneMap,

    #[error("expected a J-invariant tensor, anti-invariant part has relative size {size:.3e}")]
    NotOneOneForm { size: f64 },

    #[error("weighted measure must be positive")]
    NonPositiveMeasure,

    #[error("time {t} outside the stored trajectory [{t0}, {t1}]")]
    TimeOutOfRange { t: f64, t0: f64, t1: f64 },

    #[error("trajectory too short: {len} snapshots, need at least {need}")]
    TrajectoryTooShort { len: usize, need: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed trajectory file: {0}")]
    MalformedTrajectory(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
