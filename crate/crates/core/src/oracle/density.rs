//! Textbook densities, evaluated from conventional parameters only.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::families::SourceParams;
use crate::params::ParamPoint;

/// Log-gamma via argument shifting and the Stirling series.
pub(crate) fn stirling_ln_gamma(x: f64) -> f64 {
    let mut x = x;
    let mut shift = 0.0;
    while x < 15.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

#[derive(Clone, Debug)]
pub(crate) enum Density {
    Poisson { lambda: f64 },
    Bernoulli { p: f64 },
    Exponential { lambda: f64 },
    Normal { mu: f64, sd: f64 },
    Mvn { mu: DVector<f64>, chol: DMatrix<f64>, log_norm: f64 },
    Beta { a: f64, b: f64, log_norm: f64 },
}

impl Density {
    pub(crate) fn of(point: &ParamPoint) -> Result<Self> {
        let family = point.family();
        Ok(match family.source_from_natural(point.expect_natural()?)? {
            SourceParams::Poisson { lambda } => Density::Poisson { lambda },
            SourceParams::Bernoulli { p } => Density::Bernoulli { p },
            SourceParams::Exponential { lambda } => Density::Exponential { lambda },
            SourceParams::GaussianFixedSigma { mu } => {
                let Some((_, sd)) = family.mean_and_std(point.params()) else {
                    unreachable!("fixed-sigma family always has a standard deviation")
                };
                Density::Normal { mu, sd }
            }
            SourceParams::Gaussian { mu, var } => Density::Normal { mu, sd: var.sqrt() },
            SourceParams::Mvn { mu, sigma } => {
                let d = mu.len() as f64;
                let chol = sigma
                    .cholesky()
                    .ok_or_else(|| Error::Domain("covariance is not positive definite".to_string()))?
                    .unpack();
                let log_det: f64 = 2.0 * chol.diagonal().iter().map(|v| v.ln()).sum::<f64>();
                Density::Mvn {
                    mu,
                    chol,
                    log_norm: 0.5 * log_det + 0.5 * d * (2.0 * PI).ln(),
                }
            }
            SourceParams::Dirichlet { alpha } if alpha.len() == 2 => {
                let (a, b) = (alpha[0], alpha[1]);
                Density::Beta {
                    a,
                    b,
                    log_norm: stirling_ln_gamma(a) + stirling_ln_gamma(b) - stirling_ln_gamma(a + b),
                }
            }
            SourceParams::Dirichlet { alpha } => {
                return Err(Error::Unsupported(format!(
                    "oracle densities for dirichlet with d = {}",
                    alpha.len()
                )))
            }
        })
    }

    /// Log-density at `x`; `-inf` outside the support.
    pub(crate) fn log_pdf(&self, x: &[f64]) -> f64 {
        match self {
            Density::Poisson { lambda } => {
                let k = x[0];
                if k < 0.0 || k != k.floor() {
                    return f64::NEG_INFINITY;
                }
                let mut ln_fact = 0.0;
                let mut i = 2.0;
                while i <= k {
                    ln_fact += f64::ln(i);
                    i += 1.0;
                }
                k * lambda.ln() - lambda - ln_fact
            }
            Density::Bernoulli { p } => match x[0] {
                1.0 => p.ln(),
                0.0 => (1.0 - p).ln(),
                _ => f64::NEG_INFINITY,
            },
            Density::Exponential { lambda } => {
                if x[0] < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    lambda.ln() - lambda * x[0]
                }
            }
            Density::Normal { mu, sd } => {
                let z = (x[0] - mu) / sd;
                -0.5 * z * z - sd.ln() - 0.5 * (2.0 * PI).ln()
            }
            Density::Mvn { mu, chol, log_norm } => {
                let diff = DVector::from_column_slice(x) - mu;
                let z = chol
                    .solve_lower_triangular(&diff)
                    .expect("cholesky factor is invertible");
                -0.5 * z.norm_squared() - log_norm
            }
            Density::Beta { a, b, log_norm } => {
                let (u, v) = (x[0], x[1]);
                if u <= 0.0 || v <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                (a - 1.0) * u.ln() + (b - 1.0) * v.ln() - log_norm
            }
        }
    }
}
