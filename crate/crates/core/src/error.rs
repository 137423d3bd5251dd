use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-positive density {value:e} at grid node (i={i}, j={j})")]
    NonPositiveDensity { i: usize, j: usize, value: f64 },

    #[error("density {value:e} fell below floor {floor:e} at (i={i}, j={j}), t={t}")]
    DensityFloor {
        i: usize,
        j: usize,
        value: f64,
        floor: f64,
        t: f64,
    },

    #[error("time step {dt:e} violates CFL limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("velocity gradient {grad:e} exceeded blow-up bound at t={t}")]
    BlowUp { t: f64, grad: f64 },

    #[error("non-finite value in `{field}` at t={t}")]
    NonFinite { field: &'static str, t: f64 },

    #[error("unknown initial profile `{0}`")]
    UnknownProfile(String),

    #[error("initial profile violates density bounds: min {min}, max {max}, allowed [{lo}, {hi}]")]
    DensityBounds { min: f64, max: f64, lo: f64, hi: f64 },

    #[error("time grid mismatch: {0}")]
    TimeGrid(String),

    #[error("corrector traces requested but no first-order Euler trajectory was supplied")]
    MissingCorrectorTraces,

    #[error("boundary-layer tail not converged: relative magnitude {ratio:e} at z_max (t={t})")]
    TailNotConverged { ratio: f64, t: f64 },

    #[error("z = y/eps reaches {z_needed} beyond z_max = {z_max} with non-negligible tail {tail:e}; raise z_max")]
    BoundaryLayerTruncated { z_needed: f64, z_max: f64, tail: f64 },

    #[error("need at least {needed} time levels, got {got}")]
    InsufficientLevels { needed: usize, got: usize },

    #[error("implicit solve failed: {0}")]
    LinearSolve(String),

    #[error("norm specification invalid: mu = {mu} must be below mu0 - lambda t = {limit}")]
    NormSpec { mu: f64, limit: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("run aborted at t={t}: {cause}")]
    Aborted {
        t: f64,
        cause: Box<Error>,
        /// Last state that passed every check.
        last_good: Box<crate::field::State>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveDensity { .. }
                | Error::DensityFloor { .. }
                | Error::Cfl { .. }
                | Error::BlowUp { .. }
                | Error::NonFinite { .. }
                | Error::TailNotConverged { .. }
                | Error::BoundaryLayerTruncated { .. }
                | Error::LinearSolve(_)
                | Error::Aborted { .. }
        )
    }
}
