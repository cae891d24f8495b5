use thiserror::Error;

/// Errors raised by the closed-form and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("quadrature `{name}` did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature {
        name: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("net profit condition violated (requires c*alpha > lambda)")]
    NetProfit,

    #[error("truncation horizon too short: p * t_max = {0} < 30")]
    Truncation(f64),

    #[error("occupation law not normalized: atom + mass - 1 = {0:e}")]
    Normalization(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
