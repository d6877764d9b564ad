//! Divergences between two members of the same exponential family.
//!
//! Everything here reduces to the log-normalizer: the Chernoff α-coefficient
//! of two densities equals `exp(-J_F^(α)(θ_p : θ_q))`, the skew Jensen
//! divergence of their natural parameters, and KL is a Bregman divergence
//! with swapped arguments. [`closed_form`] holds per-family formulas that are
//! tested against this generic route.

pub mod closed_form;

use serde::Serialize;

use crate::error::{check_open_unit, Error, Result};
use crate::families::Family;
use crate::params::{same_family, ParamPoint, ParamVector};

/// Divergences within this (scaled) tolerance below zero are rounding noise.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// How a divergence value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    GenericJensen,
    Oracle,
}

/// A non-negative divergence in nats.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceValue {
    pub value: f64,
    pub method: Method,
    /// Exponent, for members of an α-family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl DivergenceValue {
    fn new(value: f64, method: Method, alpha: Option<f64>) -> Self {
        DivergenceValue { value, method, alpha }
    }
}

/// Clamps rounding noise to zero. `scale` is the magnitude of the terms that
/// were cancelled to produce `raw`.
pub(crate) fn clamp(raw: f64, scale: f64) -> Result<f64> {
    if raw.is_nan() {
        return Err(Error::Domain("divergence evaluated to NaN".to_string()));
    }
    if raw >= 0.0 {
        Ok(raw)
    } else if raw >= -CLAMP_TOLERANCE * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Inconsistent(raw))
    }
}

/// `B_F(p : q) = F(p) - F(q) - ⟨p - q, ∇F(q)⟩` on raw natural parameters.
pub(crate) fn bregman_raw(family: Family, p: &ParamVector, q: &ParamVector) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let (fp, fq) = (family.log_normalizer(p), family.log_normalizer(q));
    let grad_q = family.gradient(q);
    let lin = p.sub(q)?.inner(&grad_q)?;
    clamp(fp - fq - lin, fp.abs() + fq.abs() + lin.abs())
}

/// `J_F^(α)(p : q) = αF(p) + (1-α)F(q) - F(αp + (1-α)q)` on raw natural parameters.
pub(crate) fn jensen_raw(family: Family, p: &ParamVector, q: &ParamVector, alpha: f64) -> Result<f64> {
    if p == q {
        return Ok(0.0);
    }
    let mix = ParamVector::combine(alpha, p, 1.0 - alpha, q)?;
    let (fp, fq, fm) = (
        family.log_normalizer(p),
        family.log_normalizer(q),
        family.log_normalizer(&mix),
    );
    clamp(alpha * fp + (1.0 - alpha) * fq - fm, fp.abs() + fq.abs() + fm.abs())
}

/// Bregman divergence `B_F(θ_p : θ_q)` of the log-normalizer.
pub fn bregman(p: &ParamPoint, q: &ParamPoint) -> Result<DivergenceValue> {
    let (family, tp, tq) = same_family(p, q)?;
    Ok(DivergenceValue::new(bregman_raw(family, tp, tq)?, Method::ClosedForm, None))
}

/// Skew Jensen divergence `J_F^(α)(θ_p : θ_q)`, `0 < α < 1`.
pub fn skew_jensen(p: &ParamPoint, q: &ParamPoint, alpha: f64) -> Result<DivergenceValue> {
    check_open_unit("alpha", alpha)?;
    let (family, tp, tq) = same_family(p, q)?;
    Ok(DivergenceValue::new(
        jensen_raw(family, tp, tq, alpha)?,
        Method::GenericJensen,
        Some(alpha),
    ))
}

/// Chernoff α-divergence (first type) `C_α(p : q) = -log ∫ p^α q^(1-α)`.
pub fn chernoff_alpha_divergence(p: &ParamPoint, q: &ParamPoint, alpha: f64) -> Result<DivergenceValue> {
    skew_jensen(p, q, alpha)
}

/// Chernoff α-coefficient `c_α(p : q) = ∫ p^α q^(1-α) ∈ (0, 1]`.
pub fn chernoff_coefficient(p: &ParamPoint, q: &ParamPoint, alpha: f64) -> Result<f64> {
    Ok((-chernoff_alpha_divergence(p, q, alpha)?.value).exp())
}

/// Chernoff α-divergence of the second type, `(1 - c_α) / (α(1-α))`.
pub fn chernoff_alpha_divergence_second_type(
    p: &ParamPoint,
    q: &ParamPoint,
    alpha: f64,
) -> Result<DivergenceValue> {
    let j = skew_jensen(p, q, alpha)?.value;
    Ok(DivergenceValue::new(
        -(-j).exp_m1() / (alpha * (1.0 - alpha)),
        Method::GenericJensen,
        Some(alpha),
    ))
}

/// `KL(p ‖ q) = B_F(θ_q : θ_p)`.
pub fn kl(p: &ParamPoint, q: &ParamPoint) -> Result<DivergenceValue> {
    bregman(q, p)
}

fn check_limit_range(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Range {
            name: "alpha",
            value: alpha,
            range: "(0, 1]",
        })
    }
}

/// Rényi divergence `R_α(p : q) = J_F^(α)(θ_p : θ_q) / (1 - α)`; `α = 1` is KL.
pub fn renyi(p: &ParamPoint, q: &ParamPoint, alpha: f64) -> Result<DivergenceValue> {
    check_limit_range(alpha)?;
    if alpha == 1.0 {
        return Ok(DivergenceValue { alpha: Some(1.0), ..kl(p, q)? });
    }
    let j = skew_jensen(p, q, alpha)?.value;
    Ok(DivergenceValue::new(j / (1.0 - alpha), Method::GenericJensen, Some(alpha)))
}

/// Tsallis relative entropy `T_α(p : q) = (1 - c_α(p : q)) / (1 - α)`; `α = 1` is KL.
pub fn tsallis(p: &ParamPoint, q: &ParamPoint, alpha: f64) -> Result<DivergenceValue> {
    check_limit_range(alpha)?;
    if alpha == 1.0 {
        return Ok(DivergenceValue { alpha: Some(1.0), ..kl(p, q)? });
    }
    let j = skew_jensen(p, q, alpha)?.value;
    Ok(DivergenceValue::new(-(-j).exp_m1() / (1.0 - alpha), Method::GenericJensen, Some(alpha)))
}

/// Amari α-divergence, `α ∈ [-1, 1]`.
///
/// Interior values use `4/(1-α²) · (1 - c_{(1-α)/2}(p : q))`; `α = -1` is
/// `KL(p ‖ q)` and `α = 1` is `KL(q ‖ p)`.
pub fn amari_alpha(p: &ParamPoint, q: &ParamPoint, alpha: f64) -> Result<DivergenceValue> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::Range {
            name: "alpha_amari",
            value: alpha,
            range: "[-1, 1]",
        });
    }
    if alpha == -1.0 {
        return Ok(DivergenceValue { alpha: Some(alpha), ..kl(p, q)? });
    }
    if alpha == 1.0 {
        return Ok(DivergenceValue { alpha: Some(alpha), ..kl(q, p)? });
    }
    let j = skew_jensen(p, q, 0.5 * (1.0 - alpha))?.value;
    Ok(DivergenceValue::new(
        -4.0 * (-j).exp_m1() / (1.0 - alpha * alpha),
        Method::GenericJensen,
        Some(alpha),
    ))
}

/// Bhattacharyya distance `C_½(p : q)`.
pub fn bhattacharyya(p: &ParamPoint, q: &ParamPoint) -> Result<DivergenceValue> {
    skew_jensen(p, q, 0.5)
}

/// Half the Jeffreys divergence: the arithmetic mean of the two sided KLs.
pub fn jeffreys(p: &ParamPoint, q: &ParamPoint) -> Result<DivergenceValue> {
    let (a, b) = (kl(p, q)?.value, kl(q, p)?.value);
    Ok(DivergenceValue::new(0.5 * (a + b), Method::ClosedForm, None))
}

/// Resistor-average distance `R` with `1/R = 1/KL(p‖q) + 1/KL(q‖p)`; zero when `p = q`.
pub fn resistor_average(p: &ParamPoint, q: &ParamPoint) -> Result<DivergenceValue> {
    let (a, b) = (kl(p, q)?.value, kl(q, p)?.value);
    let value = if a + b > 0.0 { a * b / (a + b) } else { 0.0 };
    Ok(DivergenceValue::new(value, Method::ClosedForm, None))
}
