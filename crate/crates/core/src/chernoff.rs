//! Chernoff information as a Bregman-bisector intersection.
//!
//! The curve θ(α) = αθ_p + (1-α)θ_q starts at θ_q (α = 0) and ends at θ_p
//! (α = 1). Along it the bisector gap `B_F(θ_p : θ) - B_F(θ_q : θ)` decreases
//! strictly from `B_F(θ_p : θ_q) > 0` to `-B_F(θ_q : θ_p) < 0`, and its unique
//! root α* maximizes the skew Jensen divergence `J^(α)(θ_p : θ_q)`.

use std::io::Write;

use serde::Serialize;

use crate::divergences::jensen_raw;
use crate::error::{check_open_unit, Error, Result};
use crate::exec::Execution;
use crate::families::{Family, SourceParams};
use crate::oracle::{self, IntegrationSpec};
use crate::params::{same_family, Coordinates, ParamPoint, ParamVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    Bisection,
}

#[derive(Clone, Debug)]
pub struct ChernoffResult {
    /// Weight on θ_p of the optimal point.
    pub alpha_star: f64,
    /// Chernoff information `C(p, q) = J^(α*)(θ_p : θ_q)`.
    pub info: f64,
    pub theta_star: ParamPoint,
    /// Bisector gap at `theta_star`; zero at the exact optimum.
    pub bregman_gap: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectionConfig {
    pub alpha_tolerance: f64,
    pub gap_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            alpha_tolerance: 1e-12,
            gap_tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

impl BisectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_tolerance > 0.0 && self.alpha_tolerance.is_finite()) {
            return Err(Error::Config(format!("alpha tolerance must be positive, got {}", self.alpha_tolerance)));
        }
        if !(self.gap_tolerance > 0.0 && self.gap_tolerance.is_finite()) {
            return Err(Error::Config(format!("gap tolerance must be positive, got {}", self.gap_tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max iterations must be at least 1".to_string()));
        }
        Ok(())
    }
}

fn check_unit_closed(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Range { name, value, range: "[0, 1]" })
    }
}

/// Exponential geodesic `(1-λ)θ_p + λθ_q`, in natural coordinates.
pub fn e_geodesic(p: &ParamPoint, q: &ParamPoint, lambda: f64) -> Result<ParamPoint> {
    check_unit_closed("lambda", lambda)?;
    let (family, tp, tq) = same_family(p, q)?;
    ParamPoint::natural(family, ParamVector::combine(1.0 - lambda, tp, lambda, tq)?)
}

/// Mixture geodesic `(1-λ)η_p + λη_q`, in expectation coordinates.
pub fn m_geodesic_eta(p: &ParamPoint, q: &ParamPoint, lambda: f64) -> Result<ParamPoint> {
    check_unit_closed("lambda", lambda)?;
    if p.family() != q.family() {
        return Err(Error::Dimension(format!("{} vs {}", p.family().name(), q.family().name())));
    }
    if p.system() != Coordinates::Expectation || q.system() != Coordinates::Expectation {
        return Err(Error::Domain("mixture geodesic takes expectation coordinates".to_string()));
    }
    ParamPoint::expectation(p.family(), ParamVector::combine(1.0 - lambda, p.params(), lambda, q.params())?)
}

/// `B_F(θ_p : θ) - B_F(θ_q : θ)`.
pub fn bisector_gap(p: &ParamPoint, q: &ParamPoint, theta: &ParamPoint) -> Result<f64> {
    let (family, tp, tq) = same_family(p, q)?;
    let (_, _, t) = same_family(p, theta)?;
    let grad = family.gradient(t);
    let ft = family.log_normalizer(t);
    let b_p = family.log_normalizer(tp) - ft - tp.sub(t)?.inner(&grad)?;
    let b_q = family.log_normalizer(tq) - ft - tq.sub(t)?.inner(&grad)?;
    Ok(b_p - b_q)
}

/// `(F(θ_p) - F(θ_q)) - ⟨θ_p - θ_q, ∇F(θ)⟩`, which vanishes exactly at the
/// Chernoff optimum. Algebraically identical to [`bisector_gap`].
pub fn optimality_residual(p: &ParamPoint, q: &ParamPoint, theta: &ParamPoint) -> Result<f64> {
    let (family, tp, tq) = same_family(p, q)?;
    let (_, _, t) = same_family(p, theta)?;
    let diff = tp.sub(tq)?;
    Ok(family.log_normalizer(tp) - family.log_normalizer(tq) - diff.inner(&family.gradient(t))?)
}

fn degenerate(family: Family, tp: &ParamVector, method: SolveMethod) -> Result<ChernoffResult> {
    Ok(ChernoffResult {
        alpha_star: 0.5,
        info: 0.0,
        theta_star: ParamPoint::natural(family, tp.clone())?,
        bregman_gap: 0.0,
        iterations: 0,
        method,
    })
}

fn finish(
    p: &ParamPoint,
    q: &ParamPoint,
    alpha: f64,
    iterations: usize,
    method: SolveMethod,
) -> Result<ChernoffResult> {
    let (family, tp, tq) = same_family(p, q)?;
    let theta = ParamPoint::natural(family, ParamVector::combine(alpha, tp, 1.0 - alpha, tq)?)?;
    Ok(ChernoffResult {
        alpha_star: alpha,
        info: jensen_raw(family, tp, tq, alpha)?,
        bregman_gap: bisector_gap(p, q, &theta)?,
        theta_star: theta,
        iterations,
        method,
    })
}

/// Bisection on α for the root of the bisector gap.
///
/// Stops once the bracket is narrower than `alpha_tolerance` or the gap is
/// within `gap_tolerance` of zero, and returns the evaluated point with the
/// smallest gap.
pub fn chernoff_bisection(p: &ParamPoint, q: &ParamPoint, config: &BisectionConfig) -> Result<ChernoffResult> {
    config.validate()?;
    let (family, tp, tq) = same_family(p, q)?;
    if tp == tq {
        return degenerate(family, tp, SolveMethod::Bisection);
    }
    let diff = tp.sub(tq)?;
    let offset = family.log_normalizer(tp) - family.log_normalizer(tq);
    let gap_at = |alpha: f64| -> Result<f64> {
        let theta = ParamVector::combine(alpha, tp, 1.0 - alpha, tq)?;
        Ok(offset - diff.inner(&family.gradient(&theta))?)
    };

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = (0.5, f64::INFINITY);
    for iteration in 1..=config.max_iterations {
        let mid = 0.5 * (lo + hi);
        let gap = gap_at(mid)?;
        if gap.is_nan() {
            return Err(Error::Domain(format!("bisector gap is NaN at alpha = {mid}")));
        }
        if gap.abs() < best.1 {
            best = (mid, gap.abs());
        }
        if gap.abs() <= config.gap_tolerance {
            return finish(p, q, mid, iteration, SolveMethod::Bisection);
        }
        if gap > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= config.alpha_tolerance {
            return finish(p, q, best.0, iteration, SolveMethod::Bisection);
        }
    }
    let result = finish(p, q, best.0, config.max_iterations, SolveMethod::Bisection)?;
    Err(Error::NonConvergence {
        iterations: config.max_iterations,
        best: Box::new(result),
    })
}

/// Closed-form optimum for order-1 families with an invertible gradient:
/// θ* solves `F'(θ*) = (F(θ_p) - F(θ_q)) / (θ_p - θ_q)`.
///
/// Falls back to bisection with the default configuration for families
/// without a usable inverse gradient.
pub fn chernoff_closed_form_order1(p: &ParamPoint, q: &ParamPoint) -> Result<ChernoffResult> {
    let (family, tp, tq) = same_family(p, q)?;
    if family.order() != 1 || !family.has_inverse_gradient() {
        return chernoff_bisection(p, q, &BisectionConfig::default());
    }
    let (a, b) = (tp.first(), tq.first());
    if a == b {
        return degenerate(family, tp, SolveMethod::ClosedForm);
    }
    let slope = (family.log_normalizer(tp) - family.log_normalizer(tq)) / (a - b);
    let theta = match family.inverse_gradient(&ParamVector::scalar(slope)) {
        Ok(t) => t.first(),
        Err(_) => return chernoff_bisection(p, q, &BisectionConfig::default()),
    };
    let alpha = ((theta - b) / (a - b)).clamp(0.0, 1.0);
    finish(p, q, alpha, 0, SolveMethod::ClosedForm)
}

/// Closed form where available, bisection otherwise.
pub fn chernoff_information(p: &ParamPoint, q: &ParamPoint, config: &BisectionConfig) -> Result<ChernoffResult> {
    config.validate()?;
    let family = p.family();
    if family.order() == 1 && family.has_inverse_gradient() {
        chernoff_closed_form_order1(p, q)
    } else {
        chernoff_bisection(p, q, config)
    }
}

/// Closed-form Chernoff information between Poisson(λ_p) and Poisson(λ_q),
/// written through ρ = λ_p/λ_q, together with the optimal weight on p.
pub fn poisson_chernoff_information(lambda_p: f64, lambda_q: f64) -> Result<(f64, f64)> {
    for (name, v) in [("lambda_p", lambda_p), ("lambda_q", lambda_q)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Range { name, value: v, range: "(0, inf)" });
        }
    }
    if lambda_p == lambda_q {
        return Ok((0.5, 0.0));
    }
    let rho = lambda_p / lambda_q;
    let log_rho = rho.ln();
    let ratio = (rho - 1.0) / log_rho;
    let info = lambda_q * (ratio * (ratio / std::f64::consts::E).ln() + 1.0);
    let alpha = ratio.ln() / log_rho;
    Ok((alpha, info))
}

/// Convenience for callers holding conventional parameters.
pub fn chernoff_from_source(
    family: Family,
    p: &SourceParams,
    q: &SourceParams,
    config: &BisectionConfig,
) -> Result<ChernoffResult> {
    chernoff_information(&family.point(p)?, &family.point(q)?, config)
}

/// Equally spaced interior grid `i / (n + 1)`, `i = 1..=n`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    let denom = (points + 1) as f64;
    (1..=points).map(|i| i as f64 / denom).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub chernoff_alpha_divergence: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Plain-decimal rendering with 17 significant digits.
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (16 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

impl SweepTable {
    pub fn max_row(&self) -> Option<SweepRow> {
        self.rows
            .iter()
            .copied()
            .max_by(|a, b| a.chernoff_alpha_divergence.total_cmp(&b.chernoff_alpha_divergence))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "alpha,chernoff_alpha_divergence")?;
        for row in &self.rows {
            writeln!(out, "{},{}", format_decimal(row.alpha), format_decimal(row.chernoff_alpha_divergence))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Evaluates `J^(α)(θ_p : θ_q)` over `grid`; rows come back sorted by α.
pub fn alpha_sweep(p: &ParamPoint, q: &ParamPoint, grid: &[f64]) -> Result<SweepTable> {
    alpha_sweep_with(p, q, grid, Execution::default())
}

pub fn alpha_sweep_with(p: &ParamPoint, q: &ParamPoint, grid: &[f64], exec: Execution) -> Result<SweepTable> {
    let (family, tp, tq) = same_family(p, q)?;
    for &alpha in grid {
        check_open_unit("alpha", alpha)?;
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let values = exec.map_indexed(sorted.len(), |i| jensen_raw(family, tp, tq, sorted[i]));
    let rows = sorted
        .iter()
        .zip(values)
        .map(|(&alpha, v)| {
            v.map(|value| SweepRow {
                alpha,
                chernoff_alpha_divergence: value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

/// Largest pointwise deviation between the canonical density at θ* and the
/// normalized geometric mixture `p^α* q^(1-α*) / c_α*`, over the oracle's
/// evaluation grid.
pub fn chernoff_point_density_check(p: &ParamPoint, q: &ParamPoint, result: &ChernoffResult) -> Result<f64> {
    let spec = IntegrationSpec::for_family(p.family());
    oracle::geometric_mixture_gap(p, q, result.theta_star.expect_natural()?, result.alpha_star, &spec)
}

/// `KL(r* ‖ p) - KL(r* ‖ q)` by numerical integration, where r* is the
/// distribution at θ*. Vanishes at the Chernoff point.
pub fn kl_balance(p: &ParamPoint, q: &ParamPoint, result: &ChernoffResult) -> Result<f64> {
    let spec = IntegrationSpec::for_family(p.family());
    let r = &result.theta_star;
    Ok(oracle::kl_numeric(r, p, &spec)? - oracle::kl_numeric(r, q, &spec)?)
}
