//! The exponential-family catalog.
//!
//! Every family is written in canonical form
//! `p(x; θ) = exp(⟨t(x), θ⟩ - F(θ) + k(x))` and exposes its log-normalizer
//! `F`, gradient `∇F` (the map to expectation coordinates), the inverse
//! gradient where it has a closed form, and maps to and from the
//! conventional parameters (λ, μ, σ², Σ, …).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::params::{Coordinates, ParamPoint, ParamVector, Shape};
use crate::special::{digamma, ln_gamma};

/// Points closer than this to the boundary of Θ are rejected.
pub const DOMAIN_MARGIN: f64 = 1e-12;

/// Sample space of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    NonNegativeIntegers,
    Binary,
    RealLine,
    PositiveReals,
    Simplex(usize),
    RealVector(usize),
}

/// Catalog entry. `Family` is the descriptor: all the functional fields of a
/// family are methods on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Poisson,
    Bernoulli,
    /// Exponential distribution with rate λ (θ = -λ).
    Exponential,
    /// Univariate Gaussian with known standard deviation.
    GaussianFixedSigma { sigma: f64 },
    /// Univariate Gaussian, θ = (μ/σ², 1/(2σ²)), t(x) = (x, -x²).
    Gaussian1d,
    /// d-variate Gaussian, θ = (Σ⁻¹μ, ½Σ⁻¹), t(x) = (x, -xxᵀ).
    GaussianMvn { dim: usize },
    /// Dirichlet on the (d-1)-simplex, θ = p - 1, t(x) = log x.
    Dirichlet { dim: usize },
}

/// Family selector, as it appears in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Poisson,
    Bernoulli,
    Exponential,
    GaussianFixedSigma,
    #[serde(rename = "gaussian-1d")]
    Gaussian1d,
    GaussianMvn,
    Dirichlet,
}

/// Fixed hyperparameters needed by some families.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Deserialize)]
pub struct Hyper {
    pub sigma: Option<f64>,
    pub d: Option<usize>,
}

/// Builds a validated catalog family.
pub fn make_family(kind: FamilyKind, hyper: Hyper) -> Result<Family> {
    let dim = |name: &str| match hyper.d {
        Some(d) if d >= 1 => Ok(d),
        Some(d) => Err(Error::Construction(format!("{name}: d must be >= 1, got {d}"))),
        None => Err(Error::Construction(format!("{name}: missing dimension d"))),
    };
    Ok(match kind {
        FamilyKind::Poisson => Family::Poisson,
        FamilyKind::Bernoulli => Family::Bernoulli,
        FamilyKind::Exponential => Family::Exponential,
        FamilyKind::GaussianFixedSigma => match hyper.sigma {
            Some(sigma) if sigma > 0.0 && sigma.is_finite() => Family::GaussianFixedSigma { sigma },
            other => {
                return Err(Error::Construction(format!(
                    "gaussian-fixed-sigma needs sigma > 0, got {other:?}"
                )))
            }
        },
        FamilyKind::Gaussian1d => Family::Gaussian1d,
        FamilyKind::GaussianMvn => Family::GaussianMvn { dim: dim("gaussian-mvn")? },
        FamilyKind::Dirichlet => Family::Dirichlet { dim: dim("dirichlet")? },
    })
}

/// Natural parameter standing in for a degenerate Bernoulli (p = 0 or 1):
/// the sigmoid saturates to exactly 0 or 1 in double precision.
pub const BERNOULLI_SATURATION: f64 = 1000.0;

/// Bernoulli point that also accepts the degenerate endpoints p = 0 and p = 1.
pub fn bernoulli_point(p: f64) -> Result<ParamPoint> {
    let theta = if p == 0.0 {
        -BERNOULLI_SATURATION
    } else if p == 1.0 {
        BERNOULLI_SATURATION
    } else {
        return Family::Bernoulli.point(&SourceParams::Bernoulli { p });
    };
    ParamPoint::natural(Family::Bernoulli, ParamVector::scalar(theta))
}

/// Parameters in the conventional (textbook) parameterization.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceParams {
    Poisson { lambda: f64 },
    Bernoulli { p: f64 },
    Exponential { lambda: f64 },
    GaussianFixedSigma { mu: f64 },
    Gaussian { mu: f64, var: f64 },
    Mvn { mu: DVector<f64>, sigma: DMatrix<f64> },
    Dirichlet { alpha: Vec<f64> },
}

impl Family {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::Poisson => FamilyKind::Poisson,
            Family::Bernoulli => FamilyKind::Bernoulli,
            Family::Exponential => FamilyKind::Exponential,
            Family::GaussianFixedSigma { .. } => FamilyKind::GaussianFixedSigma,
            Family::Gaussian1d => FamilyKind::Gaussian1d,
            Family::GaussianMvn { .. } => FamilyKind::GaussianMvn,
            Family::Dirichlet { .. } => FamilyKind::Dirichlet,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Poisson => "poisson",
            Family::Bernoulli => "bernoulli",
            Family::Exponential => "exponential",
            Family::GaussianFixedSigma { .. } => "gaussian-fixed-sigma",
            Family::Gaussian1d => "gaussian-1d",
            Family::GaussianMvn { .. } => "gaussian-mvn",
            Family::Dirichlet { .. } => "dirichlet",
        }
    }

    /// Dimension of the natural parameter space.
    pub fn order(&self) -> usize {
        match *self {
            Family::Poisson | Family::Bernoulli | Family::Exponential | Family::GaussianFixedSigma { .. } => 1,
            Family::Gaussian1d => 2,
            Family::GaussianMvn { dim } => dim * (dim + 3) / 2,
            Family::Dirichlet { dim } => dim,
        }
    }

    pub fn support(&self) -> Support {
        match *self {
            Family::Poisson => Support::NonNegativeIntegers,
            Family::Bernoulli => Support::Binary,
            Family::Exponential => Support::PositiveReals,
            Family::GaussianFixedSigma { .. } | Family::Gaussian1d => Support::RealLine,
            Family::GaussianMvn { dim } => Support::RealVector(dim),
            Family::Dirichlet { dim } => Support::Simplex(dim),
        }
    }

    /// Length of one observation.
    pub fn observation_dim(&self) -> usize {
        match *self {
            Family::GaussianMvn { dim } | Family::Dirichlet { dim } => dim,
            _ => 1,
        }
    }

    pub fn shape(&self) -> Shape {
        match *self {
            Family::Gaussian1d => Shape { vector_len: 2, matrix_dim: None },
            Family::GaussianMvn { dim } => Shape { vector_len: dim, matrix_dim: Some(dim) },
            Family::Dirichlet { dim } => Shape { vector_len: dim, matrix_dim: None },
            _ => Shape { vector_len: 1, matrix_dim: None },
        }
    }

    /// Whether the inner product has a trace term.
    pub fn is_composite(&self) -> bool {
        self.shape().matrix_dim.is_some()
    }

    pub(crate) fn check_shape(&self, v: &ParamVector) -> Result<()> {
        if v.shape() != self.shape() {
            return Err(Error::Dimension(format!(
                "{} expects {:?}, got {:?}",
                self.name(),
                self.shape(),
                v.shape()
            )));
        }
        Ok(())
    }

    /// Membership in the open natural parameter space Θ.
    pub fn contains(&self, theta: &ParamVector) -> bool {
        if theta.shape() != self.shape() || !theta.is_finite() {
            return false;
        }
        let v = &theta.vector;
        match *self {
            Family::Poisson | Family::Bernoulli | Family::GaussianFixedSigma { .. } => true,
            Family::Exponential => v[0] < -DOMAIN_MARGIN,
            Family::Gaussian1d => v[1] > DOMAIN_MARGIN,
            Family::GaussianMvn { .. } => theta.matrix.as_ref().is_some_and(is_positive_definite),
            Family::Dirichlet { .. } => v.iter().all(|&t| t + 1.0 > DOMAIN_MARGIN),
        }
    }

    /// Log-normalizer F(θ). Not checked for domain membership; returns a
    /// non-finite value outside Θ.
    pub fn log_normalizer(&self, theta: &ParamVector) -> f64 {
        let v = &theta.vector;
        match *self {
            Family::Poisson => v[0].exp(),
            Family::Bernoulli => softplus(v[0]),
            Family::Exponential => -(-v[0]).ln(),
            Family::GaussianFixedSigma { sigma } => 0.5 * v[0] * v[0] * sigma * sigma,
            Family::Gaussian1d => v[0] * v[0] / (4.0 * v[1]) - 0.5 * v[1].ln() + 0.5 * PI.ln(),
            Family::GaussianMvn { dim } => {
                let Some(chol) = theta.matrix.clone().and_then(|m| m.cholesky()) else {
                    return f64::NAN;
                };
                let solved = chol.solve(v);
                let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
                0.25 * v.dot(&solved) - 0.5 * log_det + 0.5 * dim as f64 * PI.ln()
            }
            Family::Dirichlet { dim } => {
                let total: f64 = v.iter().sum::<f64>() + dim as f64;
                v.iter().map(|t| ln_gamma(t + 1.0)).sum::<f64>() - ln_gamma(total)
            }
        }
    }

    /// ∇F(θ): the expectation parameters E[t(x)].
    pub fn gradient(&self, theta: &ParamVector) -> ParamVector {
        let v = &theta.vector;
        match *self {
            Family::Poisson => ParamVector::scalar(v[0].exp()),
            Family::Bernoulli => ParamVector::scalar(sigmoid(v[0])),
            Family::Exponential => ParamVector::scalar(-1.0 / v[0]),
            Family::GaussianFixedSigma { sigma } => ParamVector::scalar(v[0] * sigma * sigma),
            Family::Gaussian1d => {
                let (a, b) = (v[0], v[1]);
                ParamVector::from_vec(vec![a / (2.0 * b), -a * a / (4.0 * b * b) - 0.5 / b])
            }
            Family::GaussianMvn { dim } => {
                let inv = theta
                    .matrix
                    .as_ref()
                    .and_then(|m| m.clone().cholesky())
                    .map(|c| c.inverse())
                    .unwrap_or_else(|| DMatrix::from_element(dim, dim, f64::NAN));
                let mu = &inv * v * 0.5;
                let second = -(&mu * mu.transpose()) - inv * 0.5;
                ParamVector::composite(mu, second)
            }
            Family::Dirichlet { dim } => {
                let total: f64 = v.iter().sum::<f64>() + dim as f64;
                let psi_total = digamma(total);
                ParamVector::from_vec(v.iter().map(|t| digamma(t + 1.0) - psi_total).collect())
            }
        }
    }

    pub fn has_inverse_gradient(&self) -> bool {
        !matches!(self, Family::Dirichlet { .. })
    }

    /// (∇F)⁻¹(η) = ∇F*(η), for families where it has a closed form.
    pub fn inverse_gradient(&self, eta: &ParamVector) -> Result<ParamVector> {
        self.check_shape(eta)?;
        let v = &eta.vector;
        let outside = || Error::Domain(format!("{} expectation parameter {:?}", self.name(), eta.flatten()));
        let theta = match *self {
            Family::Poisson if v[0] > 0.0 => ParamVector::scalar(v[0].ln()),
            Family::Bernoulli if v[0] > 0.0 && v[0] < 1.0 => ParamVector::scalar((v[0] / (1.0 - v[0])).ln()),
            Family::Exponential if v[0] > 0.0 => ParamVector::scalar(-1.0 / v[0]),
            Family::GaussianFixedSigma { sigma } => ParamVector::scalar(v[0] / (sigma * sigma)),
            Family::Gaussian1d => {
                let var = -v[1] - v[0] * v[0];
                if var <= 0.0 {
                    return Err(outside());
                }
                ParamVector::from_vec(vec![v[0] / var, 0.5 / var])
            }
            Family::GaussianMvn { .. } => {
                let eta2 = eta.matrix.as_ref().ok_or_else(outside)?;
                let sigma = -eta2 - v * v.transpose();
                let prec = sigma.cholesky().ok_or_else(outside)?.inverse();
                ParamVector::composite(&prec * v, prec * 0.5)
            }
            Family::Dirichlet { .. } => {
                return Err(Error::UnsupportedDirection {
                    family: self.name().to_string(),
                })
            }
            _ => return Err(outside()),
        };
        if !self.contains(&theta) {
            return Err(outside());
        }
        Ok(theta)
    }

    /// Sufficient statistic t(x).
    pub fn sufficient_statistic(&self, x: &[f64]) -> ParamVector {
        match *self {
            Family::Poisson | Family::Bernoulli | Family::Exponential | Family::GaussianFixedSigma { .. } => {
                ParamVector::scalar(x[0])
            }
            Family::Gaussian1d => ParamVector::from_vec(vec![x[0], -x[0] * x[0]]),
            Family::GaussianMvn { .. } => {
                let x = DVector::from_column_slice(x);
                let outer = -(&x * x.transpose());
                ParamVector::composite(x, outer)
            }
            Family::Dirichlet { .. } => ParamVector::from_vec(x.iter().map(|v| v.ln()).collect()),
        }
    }

    /// Carrier measure k(x).
    pub fn carrier(&self, x: &[f64]) -> f64 {
        match *self {
            Family::Poisson => -ln_gamma(x[0] + 1.0),
            Family::GaussianFixedSigma { sigma } => {
                -x[0] * x[0] / (2.0 * sigma * sigma) - 0.5 * (2.0 * PI * sigma * sigma).ln()
            }
            _ => 0.0,
        }
    }

    pub fn in_support(&self, x: &[f64]) -> bool {
        if x.len() != self.observation_dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.support() {
            Support::NonNegativeIntegers => x[0] >= 0.0 && x[0] == x[0].floor(),
            Support::Binary => x[0] == 0.0 || x[0] == 1.0,
            Support::PositiveReals => x[0] > 0.0,
            Support::RealLine | Support::RealVector(_) => true,
            Support::Simplex(_) => {
                x.iter().all(|&v| v > 0.0) && (x.iter().sum::<f64>() - 1.0).abs() < 1e-9
            }
        }
    }

    /// Canonical log-density `⟨t(x), θ⟩ - F(θ) + k(x)`.
    pub fn log_density(&self, theta: &ParamVector, x: &[f64]) -> f64 {
        let t = self.sufficient_statistic(x);
        let dot = t.inner(theta).unwrap_or(f64::NAN);
        dot - self.log_normalizer(theta) + self.carrier(x)
    }

    /// Conventional parameters → θ.
    pub fn natural_from_source(&self, source: &SourceParams) -> Result<ParamVector> {
        let bad = |msg: String| Err(Error::Domain(format!("{}: {msg}", self.name())));
        let theta = match (*self, source) {
            (Family::Poisson, SourceParams::Poisson { lambda }) => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return bad(format!("lambda must be > 0, got {lambda}"));
                }
                ParamVector::scalar(lambda.ln())
            }
            (Family::Bernoulli, SourceParams::Bernoulli { p }) => {
                if !(*p > 0.0 && *p < 1.0) {
                    return bad(format!("p must lie in (0, 1), got {p}"));
                }
                ParamVector::scalar((p / (1.0 - p)).ln())
            }
            (Family::Exponential, SourceParams::Exponential { lambda }) => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return bad(format!("lambda must be > 0, got {lambda}"));
                }
                ParamVector::scalar(-lambda)
            }
            (Family::GaussianFixedSigma { sigma }, SourceParams::GaussianFixedSigma { mu }) => {
                ParamVector::scalar(mu / (sigma * sigma))
            }
            (Family::Gaussian1d, SourceParams::Gaussian { mu, var }) => {
                if !(*var > 0.0 && var.is_finite()) {
                    return bad(format!("variance must be > 0, got {var}"));
                }
                ParamVector::from_vec(vec![mu / var, 0.5 / var])
            }
            (Family::GaussianMvn { dim }, SourceParams::Mvn { mu, sigma }) => {
                if mu.len() != dim || sigma.nrows() != dim || sigma.ncols() != dim {
                    return Err(Error::Dimension(format!(
                        "gaussian-mvn(d={dim}) got mu of length {} and {}x{} sigma",
                        mu.len(),
                        sigma.nrows(),
                        sigma.ncols()
                    )));
                }
                if !is_positive_definite(sigma) {
                    return bad("covariance must be symmetric positive definite".to_string());
                }
                let prec = sigma.clone().cholesky().expect("checked positive definite").inverse();
                let prec = symmetrize(&prec);
                ParamVector::composite(&prec * mu, prec * 0.5)
            }
            (Family::Dirichlet { dim }, SourceParams::Dirichlet { alpha }) => {
                if alpha.len() != dim {
                    return Err(Error::Dimension(format!(
                        "dirichlet(d={dim}) got {} concentration parameters",
                        alpha.len()
                    )));
                }
                if alpha.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
                    return bad(format!("concentrations must be > 0, got {alpha:?}"));
                }
                ParamVector::from_vec(alpha.iter().map(|a| a - 1.0).collect())
            }
            (family, source) => {
                return Err(Error::Config(format!(
                    "parameters {source:?} do not describe a {} distribution",
                    family.name()
                )))
            }
        };
        if !self.contains(&theta) {
            return bad(format!("{source:?} maps outside the natural domain"));
        }
        Ok(theta)
    }

    /// θ → conventional parameters.
    pub fn source_from_natural(&self, theta: &ParamVector) -> Result<SourceParams> {
        self.check_shape(theta)?;
        let v = &theta.vector;
        Ok(match *self {
            Family::Poisson => SourceParams::Poisson { lambda: v[0].exp() },
            Family::Bernoulli => SourceParams::Bernoulli { p: sigmoid(v[0]) },
            Family::Exponential => SourceParams::Exponential { lambda: -v[0] },
            Family::GaussianFixedSigma { sigma } => SourceParams::GaussianFixedSigma { mu: v[0] * sigma * sigma },
            Family::Gaussian1d => {
                let var = 0.5 / v[1];
                SourceParams::Gaussian { mu: v[0] * var, var }
            }
            Family::GaussianMvn { .. } => {
                let m = theta
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::Dimension("missing matrix block".to_string()))?;
                let sigma = (m * 2.0)
                    .cholesky()
                    .ok_or_else(|| Error::Domain("θ₂ is not positive definite".to_string()))?
                    .inverse();
                let sigma = symmetrize(&sigma);
                SourceParams::Mvn { mu: &sigma * v, sigma }
            }
            Family::Dirichlet { .. } => SourceParams::Dirichlet {
                alpha: v.iter().map(|t| t + 1.0).collect(),
            },
        })
    }

    /// Natural-coordinate point from conventional parameters.
    pub fn point(&self, source: &SourceParams) -> Result<ParamPoint> {
        ParamPoint::natural(*self, self.natural_from_source(source)?)
    }

    /// Mean of the sufficient statistic's first block, i.e. E[x] for scalar
    /// families. Used to size integration ranges.
    pub fn mean_and_std(&self, theta: &ParamVector) -> Option<(f64, f64)> {
        Some(match self.source_from_natural(theta).ok()? {
            SourceParams::Poisson { lambda } => (lambda, lambda.sqrt()),
            SourceParams::Bernoulli { p } => (p, (p * (1.0 - p)).sqrt()),
            SourceParams::Exponential { lambda } => (1.0 / lambda, 1.0 / lambda),
            SourceParams::GaussianFixedSigma { mu } => match self {
                Family::GaussianFixedSigma { sigma } => (mu, *sigma),
                _ => unreachable!(),
            },
            SourceParams::Gaussian { mu, var } => (mu, var.sqrt()),
            _ => return None,
        })
    }
}

/// Legendre dual: natural ↔ expectation coordinates.
pub fn legendre_dual(p: &ParamPoint) -> Result<ParamPoint> {
    let family = p.family();
    match p.system() {
        Coordinates::Natural => ParamPoint::expectation(family, family.gradient(p.params())),
        Coordinates::Expectation => ParamPoint::natural(family, family.inverse_gradient(p.params())?),
    }
}

/// Convex conjugate F*(η) = ⟨θ, η⟩ - F(θ) at θ = (∇F)⁻¹(η).
pub fn dual_log_normalizer(p: &ParamPoint) -> Result<f64> {
    if p.system() != Coordinates::Expectation {
        return Err(Error::Domain("dual log-normalizer takes expectation coordinates".to_string()));
    }
    let family = p.family();
    let theta = family.inverse_gradient(p.params())?;
    Ok(theta.inner(p.params())? - family.log_normalizer(&theta))
}

/// Composite inner product of two parameter (or statistic) values.
pub fn inner_product(a: &ParamVector, b: &ParamVector) -> Result<f64> {
    a.inner(b)
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    if !m.is_square() || m.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let scale = m.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if (m - m.transpose()).iter().any(|v| v.abs() > 1e-12 * scale) {
        return false;
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    eig.eigenvalues.iter().all(|&l| l > DOMAIN_MARGIN)
}
