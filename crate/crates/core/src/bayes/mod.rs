//! Two-class Bayesian decisions between members of one family, and the
//! Chernoff-type bounds on their error.

pub mod sampling;

use serde::Serialize;

use crate::chernoff::{chernoff_information, BisectionConfig};
use crate::divergences::{bhattacharyya, jensen_raw, jeffreys, resistor_average};
use crate::error::{check_open_unit, Error, Result};
use crate::exec::Execution;
use crate::families::Family;
use crate::oracle::chunk_rng;
use crate::params::{same_family, ParamPoint};
use sampling::Sampler;

#[derive(Clone, Debug)]
pub struct BinaryProblem {
    pub family: Family,
    pub theta1: ParamPoint,
    pub theta2: ParamPoint,
    /// Prior of class 1.
    pub w1: f64,
}

impl BinaryProblem {
    pub fn new(theta1: ParamPoint, theta2: ParamPoint, w1: f64) -> Result<Self> {
        check_open_unit("w1", w1)?;
        let (family, _, _) = same_family(&theta1, &theta2)?;
        Ok(BinaryProblem { family, theta1, theta2, w1 })
    }

    pub fn w2(&self) -> f64 {
        1.0 - self.w1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Class {
    C1,
    C2,
}

/// MAP rule: `C1` iff `⟨t(x), θ₁ - θ₂⟩ - F(θ₁) + F(θ₂) ≥ log(w₂/w₁)`.
pub fn map_decide(problem: &BinaryProblem, x: &[f64]) -> Result<Class> {
    let family = problem.family;
    if x.len() != family.observation_dim() || !family.in_support(x) {
        return Err(Error::Domain(format!("{x:?} is outside the {} support", family.name())));
    }
    let (t1, t2) = (problem.theta1.expect_natural()?, problem.theta2.expect_natural()?);
    let stat = family.sufficient_statistic(x);
    let score = stat.inner(&t1.sub(t2)?)? - family.log_normalizer(t1) + family.log_normalizer(t2);
    Ok(if score >= (problem.w2() / problem.w1).ln() { Class::C1 } else { Class::C2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub point_estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

const CHUNK: usize = 1 << 14;

/// Monte-Carlo error of the MAP rule: draw a class by its prior, draw an
/// observation from it, and count misclassifications.
pub fn empirical_bayes_error(problem: &BinaryProblem, n: usize, seed: u64) -> Result<ErrorEstimate> {
    empirical_bayes_error_with(problem, n, seed, Execution::default())
}

pub fn empirical_bayes_error_with(problem: &BinaryProblem, n: usize, seed: u64, exec: Execution) -> Result<ErrorEstimate> {
    if n == 0 {
        return Err(Error::Config("at least one sample is required".to_string()));
    }
    let samplers = [Sampler::new(&problem.theta1)?, Sampler::new(&problem.theta2)?];
    let dim = samplers[0].dim();
    let chunks = n.div_ceil(CHUNK);
    let counts = exec.map_indexed(chunks, |c| -> Result<usize> {
        use rand::Rng;
        let mut rng = chunk_rng(seed, c);
        let mut x = vec![0.0; dim];
        let mut errors = 0;
        for _ in 0..CHUNK.min(n - c * CHUNK) {
            let truth = if rng.random::<f64>() < problem.w1 { Class::C1 } else { Class::C2 };
            samplers[(truth == Class::C2) as usize].draw(&mut rng, &mut x);
            if map_decide(problem, &x)? != truth {
                errors += 1;
            }
        }
        Ok(errors)
    });
    let errors: usize = counts.into_iter().sum::<Result<usize>>()?;
    let rate = errors as f64 / n as f64;
    Ok(ErrorEstimate {
        point_estimate: rate,
        std_error: (rate * (1.0 - rate) / n as f64).sqrt(),
        samples: n,
    })
}

fn log_bound(problem: &BinaryProblem, alpha: f64) -> Result<f64> {
    let (family, t1, t2) = same_family(&problem.theta1, &problem.theta2)?;
    Ok(alpha * problem.w1.ln() + (1.0 - alpha) * problem.w2().ln() - jensen_raw(family, t1, t2, alpha)?)
}

/// `w₁^α w₂^{1-α} c_α(p₁ : p₂)`, an upper bound on the Bayes error for every α.
pub fn chernoff_bound(problem: &BinaryProblem, alpha: f64) -> Result<f64> {
    check_open_unit("alpha", alpha)?;
    Ok(log_bound(problem, alpha)?.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BestBound {
    pub alpha: f64,
    pub bound: f64,
}

/// Tightest Chernoff bound. With equal priors the prior factor is constant
/// and the optimum is the Chernoff point; otherwise the log-bound, which is
/// convex in α, is minimized by golden-section search.
pub fn best_chernoff_bound(problem: &BinaryProblem, config: &BisectionConfig) -> Result<BestBound> {
    if problem.w1 == 0.5 {
        let r = chernoff_information(&problem.theta1, &problem.theta2, config)?;
        return Ok(BestBound {
            alpha: r.alpha_star,
            bound: 0.5 * (-r.info).exp(),
        });
    }
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (log_bound(problem, x1)?, log_bound(problem, x2)?);
    while b - a > config.alpha_tolerance.max(1e-12) {
        if f1 > f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = log_bound(problem, x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = log_bound(problem, x1)?;
        }
    }
    let alpha = 0.5 * (a + b);
    Ok(BestBound {
        alpha,
        bound: log_bound(problem, alpha)?.exp(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundOrdering {
    pub chernoff_info: f64,
    pub alpha_star: f64,
    pub resistor: f64,
    pub jeffreys: f64,
    pub bhattacharyya_info: f64,
    /// `C_½ ≤ C*`.
    pub bhattacharyya_below_chernoff: bool,
    /// `C* ≤ R`.
    pub chernoff_below_resistor: bool,
    /// `R ≤ J`.
    pub resistor_below_jeffreys: bool,
}

impl BoundOrdering {
    pub fn holds(&self) -> bool {
        self.bhattacharyya_below_chernoff && self.chernoff_below_resistor && self.resistor_below_jeffreys
    }
}

/// Exponents of the four bounds, and whether `C_½ ≤ C* ≤ R ≤ J` holds.
pub fn bound_ordering_report(problem: &BinaryProblem, config: &BisectionConfig) -> Result<BoundOrdering> {
    let (p, q) = (&problem.theta1, &problem.theta2);
    let c = chernoff_information(p, q, config)?;
    let resistor = resistor_average(p, q)?.value;
    let jeffreys = jeffreys(p, q)?.value;
    let bhattacharyya_info = bhattacharyya(p, q)?.value;
    let slack = 1e-12 * c.info.abs().max(1.0);
    Ok(BoundOrdering {
        chernoff_info: c.info,
        alpha_star: c.alpha_star,
        resistor,
        jeffreys,
        bhattacharyya_info,
        bhattacharyya_below_chernoff: bhattacharyya_info <= c.info + slack,
        chernoff_below_resistor: c.info <= resistor + slack,
        resistor_below_jeffreys: resistor <= jeffreys + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::SourceParams;

    fn problem(mu1: f64, mu2: f64, w1: f64) -> BinaryProblem {
        let family = Family::GaussianFixedSigma { sigma: 1.0 };
        BinaryProblem::new(
            family.point(&SourceParams::GaussianFixedSigma { mu: mu1 }).unwrap(),
            family.point(&SourceParams::GaussianFixedSigma { mu: mu2 }).unwrap(),
            w1,
        )
        .unwrap()
    }

    #[test]
    fn midpoint_threshold() {
        let pr = problem(0.0, 2.0, 0.5);
        assert_eq!(map_decide(&pr, &[0.999]).unwrap(), Class::C1);
        assert_eq!(map_decide(&pr, &[1.0]).unwrap(), Class::C1);
        assert_eq!(map_decide(&pr, &[1.001]).unwrap(), Class::C2);
    }

    #[test]
    fn identical_classes_follow_the_prior() {
        let pr = problem(1.0, 1.0, 0.7);
        for x in [-3.0, 0.0, 5.0] {
            assert_eq!(map_decide(&pr, &[x]).unwrap(), Class::C1);
        }
        assert_eq!(chernoff_bound(&problem(1.0, 1.0, 0.5), 0.5).unwrap(), 0.5);
    }

    #[test]
    fn priors_are_validated() {
        let family = Family::Poisson;
        let p = family.point(&SourceParams::Poisson { lambda: 1.0 }).unwrap();
        assert!(BinaryProblem::new(p.clone(), p.clone(), 1.0).is_err());
        assert!(chernoff_bound(&BinaryProblem::new(p.clone(), p, 0.5).unwrap(), 1.0).is_err());
    }

    #[test]
    fn unequal_priors_tighten_the_bound() {
        let pr = problem(0.0, 1.5, 0.8);
        let best = best_chernoff_bound(&pr, &BisectionConfig::default()).unwrap();
        for i in 1..100 {
            let a = i as f64 / 100.0;
            assert!(best.bound <= chernoff_bound(&pr, a).unwrap() + 1e-14);
        }
        // The heavier prior on class 1 pulls the optimum toward α = 0.
        assert!(best.alpha < 0.5);
    }

    #[test]
    fn ordering_for_a_gaussian_pair() {
        let report = bound_ordering_report(&problem(0.0, 3.0, 0.5), &BisectionConfig::default()).unwrap();
        assert!(report.holds(), "{report:?}");
        // Equal variances: Bhattacharyya and Chernoff coincide.
        assert!((report.bhattacharyya_info - report.chernoff_info).abs() < 1e-12);
    }
}
