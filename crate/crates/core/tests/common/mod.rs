#![allow(dead_code)]

use chernoff_core::{Family, ParamPoint, SourceParams};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn poisson(lambda: f64) -> ParamPoint {
    Family::Poisson.point(&SourceParams::Poisson { lambda }).unwrap()
}

pub fn gaussian(mu: f64, var: f64) -> ParamPoint {
    Family::Gaussian1d.point(&SourceParams::Gaussian { mu, var }).unwrap()
}

pub fn mvn(mu: &[f64], sigma: &[f64]) -> ParamPoint {
    let d = mu.len();
    Family::GaussianMvn { dim: d }
        .point(&SourceParams::Mvn {
            mu: DVector::from_column_slice(mu),
            sigma: DMatrix::from_row_slice(d, d, sigma),
        })
        .unwrap()
}

/// Conventional parameters of a random, well-conditioned member of `family`.
pub fn random_source<R: Rng>(family: Family, rng: &mut R) -> SourceParams {
    match family {
        Family::Poisson => SourceParams::Poisson { lambda: rng.random_range(0.2..20.0) },
        Family::Bernoulli => SourceParams::Bernoulli { p: rng.random_range(0.05..0.95) },
        Family::Exponential => SourceParams::Exponential { lambda: rng.random_range(0.2..5.0) },
        Family::GaussianFixedSigma { .. } => SourceParams::GaussianFixedSigma { mu: rng.random_range(-3.0..3.0) },
        Family::Gaussian1d => SourceParams::Gaussian {
            mu: rng.random_range(-3.0..3.0),
            var: rng.random_range(0.25..4.0),
        },
        Family::GaussianMvn { dim } => {
            let mu = DVector::from_fn(dim, |_, _| rng.random_range(-2.0..2.0));
            let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
            let sigma = &a * a.transpose() + DMatrix::identity(dim, dim) * 0.3;
            SourceParams::Mvn { mu, sigma }
        }
        Family::Dirichlet { dim } => SourceParams::Dirichlet {
            alpha: (0..dim).map(|_| rng.random_range(0.5..8.0)).collect(),
        },
    }
}

pub fn random_point<R: Rng>(family: Family, rng: &mut R) -> ParamPoint {
    family.point(&random_source(family, rng)).unwrap()
}

pub fn random_pair<R: Rng>(family: Family, rng: &mut R) -> (ParamPoint, ParamPoint) {
    (random_point(family, rng), random_point(family, rng))
}

pub const SCALAR_FAMILIES: [Family; 4] = [Family::Poisson, Family::Bernoulli, Family::Exponential, Family::Gaussian1d];

pub fn catalog() -> Vec<Family> {
    vec![
        Family::Poisson,
        Family::Bernoulli,
        Family::Exponential,
        Family::GaussianFixedSigma { sigma: 1.5 },
        Family::Gaussian1d,
        Family::GaussianMvn { dim: 2 },
        Family::Dirichlet { dim: 3 },
    ]
}
