use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("direction is not a unit tangent (|dir.x| = {dot:e}, |dir| = {norm})")]
    NotTangent { dot: f64, norm: f64 },

    #[error("degenerate configuration (alpha = {alpha}): great circle undefined")]
    Degenerate { alpha: f64 },

    #[error("angular distance {alpha} outside [0, pi]")]
    AlphaOutOfRange { alpha: f64 },

    #[error("game already over: agents collocated")]
    Captured,

    #[error("inadmissible control: {0}")]
    Inadmissible(String),

    #[error(
        "root bracket [{lo}, {hi}] does not enclose a sign change (alpha = {alpha}, lambda = {lambda})"
    )]
    Bracket {
        alpha: f64,
        lambda: f64,
        lo: f64,
        hi: f64,
    },

    #[error("inadmissible control at step {step} (t = {t}): {reason}")]
    PolicyViolation { step: usize, t: f64, reason: String },

    #[error("two-pursuer intercept undefined: {0}")]
    NoJointIntercept(String),
}

impl Error {
    /// Failures of the numerics as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Bracket { .. } | Error::Degenerate { .. } | Error::NoJointIntercept(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
