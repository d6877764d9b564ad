use thiserror::Error;

use crate::chernoff::ChernoffResult;

/// Errors raised by the divergence toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Dimension(String),

    #[error("parameter outside the natural domain: {0}")]
    Domain(String),

    #[error("{family} has no closed-form inverse gradient (expectation -> natural)")]
    UnsupportedDirection { family: String },

    #[error("invalid family construction: {0}")]
    Construction(String),

    #[error("{name} = {value} is outside its admissible range {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("divergence evaluated to {0}, below the clamping tolerance")]
    Inconsistent(f64),

    #[error("bisection did not converge after {iterations} iterations (best alpha = {}, gap = {})", best.alpha_star, best.bregman_gap)]
    NonConvergence {
        iterations: usize,
        best: Box<ChernoffResult>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with [`Error::Range`] unless `0 < alpha < 1`.
pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Range {
            name,
            value,
            range: "(0, 1)",
        })
    }
}
