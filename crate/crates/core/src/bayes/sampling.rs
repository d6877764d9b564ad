//! Deterministic samplers for the catalog families.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::families::{Family, SourceParams};
use crate::params::{ParamPoint, ParamVector};

#[derive(Clone, Debug)]
enum Kind {
    Poisson(Poisson<f64>),
    Bernoulli(f64),
    Exponential(Exp<f64>),
    Normal(Normal<f64>),
    Mvn { mu: DVector<f64>, chol: DMatrix<f64> },
}

/// Draws observations of one distribution of a catalog family.
#[derive(Clone, Debug)]
pub struct Sampler {
    kind: Kind,
    dim: usize,
}

fn bad(e: impl std::fmt::Display) -> Error {
    Error::Domain(e.to_string())
}

impl Sampler {
    pub fn new(point: &ParamPoint) -> Result<Self> {
        let family = point.family();
        let theta = point.expect_natural()?;
        let kind = match family.source_from_natural(theta)? {
            SourceParams::Poisson { lambda } => Kind::Poisson(Poisson::new(lambda).map_err(bad)?),
            SourceParams::Bernoulli { p } => Kind::Bernoulli(p),
            SourceParams::Exponential { lambda } => Kind::Exponential(Exp::new(lambda).map_err(bad)?),
            SourceParams::GaussianFixedSigma { mu } => {
                let Family::GaussianFixedSigma { sigma } = family else { unreachable!() };
                Kind::Normal(Normal::new(mu, sigma).map_err(bad)?)
            }
            SourceParams::Gaussian { mu, var } => Kind::Normal(Normal::new(mu, var.sqrt()).map_err(bad)?),
            SourceParams::Mvn { mu, sigma } => {
                let chol = sigma
                    .cholesky()
                    .ok_or_else(|| Error::Domain("covariance is not positive definite".to_string()))?
                    .unpack();
                Kind::Mvn { mu, chol }
            }
            SourceParams::Dirichlet { .. } => {
                return Err(Error::Unsupported("sampling from the dirichlet family".to_string()))
            }
        };
        Ok(Sampler { kind, dim: family.observation_dim() })
    }

    /// Length of one observation.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes one draw into `out`, which must have length [`Sampler::dim`].
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match &self.kind {
            Kind::Poisson(d) => out[0] = d.sample(rng),
            Kind::Bernoulli(p) => out[0] = if rng.random::<f64>() < *p { 1.0 } else { 0.0 },
            Kind::Exponential(d) => out[0] = d.sample(rng),
            Kind::Normal(d) => out[0] = d.sample(rng),
            Kind::Mvn { mu, chol } => {
                let z = DVector::from_fn(mu.len(), |_, _| StandardNormal.sample(rng));
                let x = mu + chol * z;
                out.copy_from_slice(x.as_slice());
            }
        }
    }
}

/// `n` i.i.d. observations stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

/// Draws `n` observations from `p(x; θ)`; identical seeds give identical draws.
pub fn sample(family: Family, theta: &ParamVector, n: usize, seed: u64) -> Result<Samples> {
    let sampler = Sampler::new(&ParamPoint::natural(family, theta.clone())?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = sampler.dim();
    let mut data = vec![0.0; n * dim];
    for row in data.chunks_exact_mut(dim) {
        sampler.draw(&mut rng, row);
    }
    Ok(Samples { dim, data })
}
