use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Gamma/digamma argument landed on a nonpositive integer.
    #[error("pole at z = {0}; use the series form instead")]
    Pole(f64),

    #[error("series term at power {power} falls below the capacity {min}")]
    TruncationUnderflow { power: i32, min: i32 },

    #[error("ln(eps) degree {degree} exceeds the cap {cap}")]
    LogOverflow { degree: u32, cap: u32 },

    /// Leading term is zero or carries ln(eps).
    #[error("series has no invertible leading term")]
    NonInvertible,

    #[error("quadrature missed tolerance: estimate {estimate:e} +/- {error:e} after {evals} evaluations")]
    Tolerance {
        estimate: f64,
        error: f64,
        evals: usize,
    },

    #[error("integral does not converge: {0}")]
    NonConvergent(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("operation needs a nonzero coupling")]
    ZeroCoupling,

    #[error("expected interaction power r = {expected}, found {found}")]
    WrongPower { expected: u32, found: u32 },

    #[error("invalid trace set: {0}")]
    InvalidTraceSet(&'static str),
}
