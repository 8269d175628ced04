use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("effective admixtures undefined: delta1 and kappa1 are both zero")]
    UndefinedAdmixture,

    #[error("effective {0} decay rate is zero")]
    ZeroDecay(&'static str),

    #[error("unsupported excitation number {0} (expected 1 or 2)")]
    UnsupportedExcitation(usize),

    #[error("eigensolver did not converge on a {0}x{0} block")]
    EigenConvergence(usize),

    #[error("branch tracking lost continuity at grid index {index} (overlap {overlap:.3})")]
    BranchContinuity { index: usize, overlap: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("matrix 1-norm {norm:e} exceeds the scaling budget of the exponential")]
    ExcessiveNorm { norm: f64 },

    #[error("steady state: {0}")]
    SteadyState(String),

    #[error("g2(0) undefined: mean photon number {0:e} is too small")]
    UndefinedCorrelation(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
