//! Numerical reference computations that bypass the log-normalizer.
//!
//! Every quantity here is computed from textbook densities on conventional
//! parameters, by discrete summation, adaptive quadrature or Monte Carlo, so it
//! can be used to check the closed-form machinery.

pub mod density;
pub mod quadrature;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bayes::sampling::Sampler;
use crate::error::{check_open_unit, Error, Result};
use crate::exec::Execution;
use crate::families::{Family, Support};
use crate::params::{same_family, ParamPoint, ParamVector};
use density::Density;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    DiscreteSum,
    AdaptiveQuadrature,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationSpec {
    pub scheme: Scheme,
    /// Probability mass allowed outside the truncated range.
    pub tail_epsilon: f64,
    pub abs_tolerance: f64,
    /// Half-width of a continuous range, in standard deviations.
    pub range_sigmas: f64,
    pub mc_samples: usize,
    pub seed: u64,
    /// Initial quadrature panels over the range.
    pub panels: usize,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        IntegrationSpec {
            scheme: Scheme::AdaptiveQuadrature,
            tail_epsilon: 1e-14,
            abs_tolerance: 1e-9,
            range_sigmas: 12.0,
            mc_samples: 1_000_000,
            seed: 0,
            panels: 64,
        }
    }
}

impl IntegrationSpec {
    /// The natural scheme for a family: sums for discrete supports, quadrature
    /// for one-dimensional continuous ones, Monte Carlo otherwise.
    pub fn for_family(family: Family) -> Self {
        let scheme = match family.support() {
            Support::NonNegativeIntegers | Support::Binary => Scheme::DiscreteSum,
            Support::RealLine | Support::PositiveReals | Support::Simplex(2) => Scheme::AdaptiveQuadrature,
            Support::RealVector(_) | Support::Simplex(_) => Scheme::MonteCarlo,
        };
        IntegrationSpec { scheme, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("tail epsilon", self.tail_epsilon)?;
        positive("absolute tolerance", self.abs_tolerance)?;
        positive("range sigmas", self.range_sigmas)?;
        if self.mc_samples < 1000 {
            return Err(Error::Config(format!("at least 1000 Monte-Carlo samples are required, got {}", self.mc_samples)));
        }
        if self.panels == 0 {
            return Err(Error::Config("at least one quadrature panel is required".to_string()));
        }
        Ok(())
    }
}

/// A numerical value with its standard error (zero for deterministic schemes).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0 }
    }
}

/// Integration domain shared by a set of densities.
enum Domain {
    Points(Vec<f64>),
    Interval(f64, f64),
    /// Two-part simplex, parametrized by the first coordinate.
    UnitInterval,
}

fn poisson_cutoff(lambda: f64, tail_epsilon: f64) -> usize {
    // P(X >= k) <= e^{-λ} (eλ/k)^k for k > λ.
    let mut k = lambda.ceil().max(1.0) + 1.0;
    while -lambda + k * (1.0 + lambda.ln() - k.ln()) > tail_epsilon.ln() {
        k += 1.0;
    }
    k as usize
}

fn domain_of(points: &[&ParamPoint], spec: &IntegrationSpec) -> Result<Domain> {
    let family = points[0].family();
    let moments = || -> Result<Vec<(f64, f64)>> {
        points
            .iter()
            .map(|p| {
                family
                    .mean_and_std(p.expect_natural()?)
                    .ok_or_else(|| Error::Unsupported(format!("moments of {}", family.name())))
            })
            .collect()
    };
    Ok(match family.support() {
        Support::Binary => Domain::Points(vec![0.0, 1.0]),
        Support::NonNegativeIntegers => {
            let lambda_max = moments()?.iter().map(|m| m.0).fold(0.0, f64::max);
            let k = poisson_cutoff(lambda_max, spec.tail_epsilon);
            Domain::Points((0..=k).map(|i| i as f64).collect())
        }
        Support::RealLine => {
            let m = moments()?;
            let lo = m.iter().map(|(mu, sd)| mu - spec.range_sigmas * sd).fold(f64::INFINITY, f64::min);
            let hi = m.iter().map(|(mu, sd)| mu + spec.range_sigmas * sd).fold(f64::NEG_INFINITY, f64::max);
            Domain::Interval(lo, hi)
        }
        Support::PositiveReals => {
            let hi = moments()?
                .iter()
                .map(|(mean, sd)| (mean + spec.range_sigmas * sd).max(-spec.tail_epsilon.ln() * mean))
                .fold(0.0, f64::max);
            Domain::Interval(0.0, hi)
        }
        Support::Simplex(2) => Domain::UnitInterval,
        other => return Err(Error::Unsupported(format!("deterministic integration over {other:?}"))),
    })
}

/// Integrates `g(log p_1(x), …, log p_n(x))` against counting or Lebesgue
/// measure over the shared support.
fn integrate_logs<G>(points: &[&ParamPoint], spec: &IntegrationSpec, g: G) -> Result<f64>
where
    G: Fn(&[f64]) -> f64,
{
    let densities = points.iter().map(|p| Density::of(p)).collect::<Result<Vec<_>>>()?;
    let eval = |x: &[f64]| {
        let logs: Vec<f64> = densities.iter().map(|d| d.log_pdf(x)).collect();
        g(&logs)
    };
    Ok(match domain_of(points, spec)? {
        Domain::Points(xs) => xs.iter().map(|&x| eval(&[x])).sum(),
        Domain::Interval(lo, hi) => {
            quadrature::integrate(|x| eval(&[x]), lo, hi, spec.abs_tolerance, spec.panels).value
        }
        Domain::UnitInterval => {
            quadrature::integrate(|u| eval(&[u, 1.0 - u]), 0.0, 1.0, spec.abs_tolerance, spec.panels).value
        }
    })
}

const MC_CHUNK: usize = 1 << 14;

/// Per-chunk generator: independent streams of one seed, so the result does
/// not depend on how chunks are scheduled.
pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Sample mean of `f` over `n` draws, split into fixed-size chunks.
pub(crate) fn mc_mean<F>(n: usize, seed: u64, exec: Execution, f: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(MC_CHUNK);
    let partial = exec.map_indexed(chunks, |c| {
        let mut rng = chunk_rng(seed, c);
        let len = MC_CHUNK.min(n - c * MC_CHUNK);
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..len {
            let v = f(&mut rng);
            sum += v;
            sq += v * v;
        }
        (sum, sq)
    });
    let (sum, sq) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    Estimate {
        value: mean,
        std_error: (var / nf).sqrt(),
    }
}

/// Monte Carlo over the equal mixture `½p + ½q`: for a functional
/// `∫ h(p(x), q(x)) dx` the weight `h / (½p + ½q)` stays bounded whenever `h`
/// is bounded by a combination of `p` and `q`.
fn mc_over_mixture<G>(p: &ParamPoint, q: &ParamPoint, spec: &IntegrationSpec, exec: Execution, g: G) -> Result<Estimate>
where
    G: Fn(f64, f64) -> f64 + Sync + Send,
{
    let (dp, dq) = (Density::of(p)?, Density::of(q)?);
    let (sp, sq) = (Sampler::new(p)?, Sampler::new(q)?);
    let dim = sp.dim();
    Ok(mc_mean(spec.mc_samples, spec.seed, exec, |rng| {
        use rand::Rng;
        let mut x = vec![0.0; dim];
        if rng.random::<bool>() {
            sp.draw(rng, &mut x);
        } else {
            sq.draw(rng, &mut x);
        }
        let (lp, lq) = (dp.log_pdf(&x), dq.log_pdf(&x));
        let hi = lp.max(lq);
        let log_mix = hi + (0.5 * ((lp - hi).exp() + (lq - hi).exp())).ln();
        g(lp - log_mix, lq - log_mix)
    }))
}

/// `c_α(p : q) = ∫ p^α q^{1-α}` with its standard error.
pub fn chernoff_coefficient_estimate(p: &ParamPoint, q: &ParamPoint, alpha: f64, spec: &IntegrationSpec) -> Result<Estimate> {
    check_open_unit("alpha", alpha)?;
    spec.validate()?;
    same_family(p, q)?;
    let geometric = move |lp: f64, lq: f64| {
        if lp == f64::NEG_INFINITY || lq == f64::NEG_INFINITY {
            0.0
        } else {
            (alpha * lp + (1.0 - alpha) * lq).exp()
        }
    };
    match spec.scheme {
        Scheme::MonteCarlo => mc_over_mixture(p, q, spec, Execution::default(), geometric),
        _ => integrate_logs(&[p, q], spec, |l| geometric(l[0], l[1])).map(Estimate::exact),
    }
}

pub fn chernoff_coefficient_numeric(p: &ParamPoint, q: &ParamPoint, alpha: f64, spec: &IntegrationSpec) -> Result<f64> {
    chernoff_coefficient_estimate(p, q, alpha, spec).map(|e| e.value)
}

/// `KL(p ‖ q) = ∫ p log(p/q)`.
pub fn kl_estimate(p: &ParamPoint, q: &ParamPoint, spec: &IntegrationSpec) -> Result<Estimate> {
    spec.validate()?;
    same_family(p, q)?;
    let term = |lp: f64, lq: f64| {
        if lp == f64::NEG_INFINITY {
            0.0
        } else {
            lp.exp() * (lp - lq)
        }
    };
    match spec.scheme {
        Scheme::MonteCarlo => {
            let (dp, dq) = (Density::of(p)?, Density::of(q)?);
            let sp = Sampler::new(p)?;
            let dim = sp.dim();
            Ok(mc_mean(spec.mc_samples, spec.seed, Execution::default(), |rng| {
                let mut x = vec![0.0; dim];
                sp.draw(rng, &mut x);
                dp.log_pdf(&x) - dq.log_pdf(&x)
            }))
        }
        _ => integrate_logs(&[p, q], spec, |l| term(l[0], l[1])).map(Estimate::exact),
    }
}

pub fn kl_numeric(p: &ParamPoint, q: &ParamPoint, spec: &IntegrationSpec) -> Result<f64> {
    kl_estimate(p, q, spec).map(|e| e.value)
}

/// `∫ min(w₁p, w₂q)`, the Bayes error of the MAP rule.
pub fn bayes_error_numeric(p: &ParamPoint, q: &ParamPoint, w1: f64, spec: &IntegrationSpec) -> Result<Estimate> {
    check_open_unit("w1", w1)?;
    spec.validate()?;
    same_family(p, q)?;
    let (l1, l2) = (w1.ln(), (1.0 - w1).ln());
    let term = move |lp: f64, lq: f64| (l1 + lp).min(l2 + lq).exp();
    match spec.scheme {
        Scheme::MonteCarlo => mc_over_mixture(p, q, spec, Execution::default(), term),
        _ => integrate_logs(&[p, q], spec, |l| term(l[0], l[1])).map(Estimate::exact),
    }
}

/// Total mass of the canonical density `exp(⟨t(x), θ⟩ - F(θ) + k(x))`.
/// Should be 1 up to the integration error.
pub fn normalization_check(point: &ParamPoint, spec: &IntegrationSpec) -> Result<Estimate> {
    spec.validate()?;
    let family = point.family();
    let theta = point.expect_natural()?.clone();
    match spec.scheme {
        Scheme::MonteCarlo => {
            let proposal = Density::of(point)?;
            let sampler = Sampler::new(point)?;
            let dim = sampler.dim();
            Ok(mc_mean(spec.mc_samples, spec.seed, Execution::default(), |rng| {
                let mut x = vec![0.0; dim];
                sampler.draw(rng, &mut x);
                (family.log_density(&theta, &x) - proposal.log_pdf(&x)).exp()
            }))
        }
        _ => {
            let densities = [point];
            let domain = domain_of(&densities, spec)?;
            let canonical = |x: &[f64]| {
                if family.in_support(x) {
                    family.log_density(&theta, x).exp()
                } else {
                    0.0
                }
            };
            Ok(Estimate::exact(match domain {
                Domain::Points(xs) => xs.iter().map(|&x| canonical(&[x])).sum(),
                Domain::Interval(lo, hi) => {
                    quadrature::integrate(|x| canonical(&[x]), lo, hi, spec.abs_tolerance, spec.panels).value
                }
                Domain::UnitInterval => {
                    quadrature::integrate(|u| canonical(&[u, 1.0 - u]), 0.0, 1.0, spec.abs_tolerance, spec.panels).value
                }
            }))
        }
    }
}

/// Change in the Chernoff coefficient when the initial quadrature panel count
/// is doubled; small values mean the integration is converged.
pub fn quadrature_refinement_delta(p: &ParamPoint, q: &ParamPoint, alpha: f64, spec: &IntegrationSpec) -> Result<f64> {
    let coarse = chernoff_coefficient_numeric(p, q, alpha, spec)?;
    let fine = IntegrationSpec { panels: spec.panels * 2, ..*spec };
    Ok((chernoff_coefficient_numeric(p, q, alpha, &fine)? - coarse).abs())
}

/// Points at which densities are compared: the truncated support for
/// discrete families, an interior grid over the integration range otherwise.
pub fn evaluation_points(p: &ParamPoint, q: &ParamPoint, spec: &IntegrationSpec, count: usize) -> Result<Vec<Vec<f64>>> {
    same_family(p, q)?;
    let interior = |lo: f64, hi: f64| -> Vec<f64> {
        (1..=count).map(|i| lo + (hi - lo) * i as f64 / (count + 1) as f64).collect()
    };
    Ok(match domain_of(&[p, q], spec)? {
        Domain::Points(xs) => xs.into_iter().map(|x| vec![x]).collect(),
        Domain::Interval(lo, hi) => interior(lo, hi).into_iter().map(|x| vec![x]).collect(),
        Domain::UnitInterval => interior(0.0, 1.0).into_iter().map(|u| vec![u, 1.0 - u]).collect(),
    })
}

/// Maximizer of `J^(α)(θ_p : θ_q)` over the grid `step, 2·step, …` in `(0, 1)`.
/// Ties resolve toward α = ½.
pub fn alpha_grid_argmax(p: &ParamPoint, q: &ParamPoint, step: f64) -> Result<(f64, f64)> {
    alpha_grid_argmax_with(p, q, step, Execution::default())
}

pub fn alpha_grid_argmax_with(p: &ParamPoint, q: &ParamPoint, step: f64, exec: Execution) -> Result<(f64, f64)> {
    let (family, tp, tq) = same_family(p, q)?;
    let n = grid_len(step)?;
    let values = exec.map_indexed(n, |i| {
        let alpha = (i + 1) as f64 * step;
        crate::divergences::jensen_raw(family, tp, tq, alpha).map(|v| (alpha, v))
    });
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pick_max(values))
}

fn grid_len(step: f64) -> Result<usize> {
    if !(step > 0.0 && step < 0.5) {
        return Err(Error::Range { name: "step", value: step, range: "(0, 0.5)" });
    }
    Ok(((1.0 / step).round() as usize).saturating_sub(1).max(1))
}

fn pick_max(values: Vec<(f64, f64)>) -> (f64, f64) {
    values
        .into_iter()
        .fold((0.5, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 || (cur.1 == best.1 && (cur.0 - 0.5).abs() < (best.0 - 0.5).abs()) {
                cur
            } else {
                best
            }
        })
}

/// Chernoff information from numerical coefficients only: grid search on
/// `-log c_α` followed by golden-section refinement on the bracketing cell.
pub fn chernoff_information_numeric(p: &ParamPoint, q: &ParamPoint, spec: &IntegrationSpec, step: f64) -> Result<(f64, f64)> {
    same_family(p, q)?;
    let n = grid_len(step)?;
    let objective = |alpha: f64| chernoff_coefficient_numeric(p, q, alpha, spec).map(|c| -c.ln());
    let values = Execution::default().map_indexed(n, |i| {
        let alpha = (i + 1) as f64 * step;
        objective(alpha).map(|v| (alpha, v))
    });
    let (alpha0, _) = pick_max(values.into_iter().collect::<Result<Vec<_>>>()?);
    let (mut a, mut b) = ((alpha0 - step).max(1e-12), (alpha0 + step).min(1.0 - 1e-12));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (objective(x1)?, objective(x2)?);
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = objective(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = objective(x1)?;
        }
    }
    let alpha = 0.5 * (a + b);
    Ok((alpha, objective(alpha)?))
}

/// Maximum absolute difference between the canonical density at θ* and the
/// normalized geometric mixture `p^α q^{1-α} / c_α`, over the evaluation grid.
pub fn geometric_mixture_gap(p: &ParamPoint, q: &ParamPoint, theta: &ParamVector, alpha: f64, spec: &IntegrationSpec) -> Result<f64> {
    let (family, _, _) = same_family(p, q)?;
    if matches!(family.support(), Support::RealVector(_)) || matches!(family.support(), Support::Simplex(d) if d > 2) {
        return Err(Error::Unsupported("density comparison needs a one-dimensional support".to_string()));
    }
    let c = chernoff_coefficient_numeric(p, q, alpha, spec)?;
    let (dp, dq) = (Density::of(p)?, Density::of(q)?);
    let points = evaluation_points(p, q, spec, 2001)?;
    Ok(points
        .iter()
        .map(|x| {
            let (lp, lq) = (dp.log_pdf(x), dq.log_pdf(x));
            let mix = if lp == f64::NEG_INFINITY || lq == f64::NEG_INFINITY {
                0.0
            } else {
                (alpha * lp + (1.0 - alpha) * lq).exp() / c
            };
            let canonical = if family.in_support(x) { family.log_density(theta, x).exp() } else { 0.0 };
            (canonical - mix).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::SourceParams;

    fn poisson(l: f64) -> ParamPoint {
        Family::Poisson.point(&SourceParams::Poisson { lambda: l }).unwrap()
    }

    #[test]
    fn cutoff_bounds_the_tail() {
        let k = poisson_cutoff(5.0, 1e-14);
        assert!(k > 5 && k < 60);
    }

    #[test]
    fn poisson_normalization() {
        let p = poisson(7.5);
        let m = normalization_check(&p, &IntegrationSpec::for_family(Family::Poisson)).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_coefficient_matches_direct_formula() {
        // ∫ (a e^{-ax})^α (b e^{-bx})^{1-α} = a^α b^{1-α} / (αa + (1-α)b)
        let (a, b, alpha) = (0.5, 3.0, 0.3);
        let p = Family::Exponential.point(&SourceParams::Exponential { lambda: a }).unwrap();
        let q = Family::Exponential.point(&SourceParams::Exponential { lambda: b }).unwrap();
        let c = chernoff_coefficient_numeric(&p, &q, alpha, &IntegrationSpec::for_family(Family::Exponential)).unwrap();
        let exact = a.powf(alpha) * b.powf(1.0 - alpha) / (alpha * a + (1.0 - alpha) * b);
        assert!((c - exact).abs() < 1e-9, "{c} vs {exact}");
    }

    #[test]
    fn grid_ties_prefer_the_middle() {
        assert_eq!(pick_max(vec![(0.2, 1.0), (0.5, 1.0), (0.8, 1.0)]).0, 0.5);
        assert_eq!(pick_max(vec![(0.3, 1.0), (0.6, 1.0)]).0, 0.6);
    }

    #[test]
    fn spec_validation() {
        let spec = IntegrationSpec { mc_samples: 10, ..Default::default() };
        assert!(matches!(spec.validate(), Err(Error::Config(_))));
        let spec = IntegrationSpec { abs_tolerance: 0.0, ..Default::default() };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn monte_carlo_is_schedule_independent() {
        let f = |rng: &mut ChaCha8Rng| {
            use rand::Rng;
            rng.random::<f64>()
        };
        let a = mc_mean(100_000, 7, Execution::Sequential, f);
        let b = mc_mean(100_000, 7, Execution::Parallel, f);
        assert_eq!(a, b);
        assert!((a.value - 0.5).abs() < 5.0 * a.std_error);
    }
}
