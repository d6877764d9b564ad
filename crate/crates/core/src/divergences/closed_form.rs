//! Per-family closed forms. The generic Jensen route in the parent module is
//! authoritative; these exist for cross-checking and for callers that hold
//! conventional parameters.
//!
//! Gaussian formulas use `Σ_α = (1-α)Σ_p + αΣ_q` with an inverse in the
//! quadratic term: this is what `J_F^(α)` of the natural parameters reduces
//! to. Writing the mixture as `αΣ_p + (1-α)Σ_q`, or dropping the inverse,
//! disagrees with the generic route.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_open_unit, Error, Result};
use crate::special::ln_gamma;

/// Chernoff α-divergence between `N(μ_p, Σ_p)` and `N(μ_q, Σ_q)`:
///
/// `½ log(|Σ_α| / (|Σ_p|^(1-α) |Σ_q|^α)) + α(1-α)/2 · Δμᵀ Σ_α⁻¹ Δμ`
pub fn mvn_chernoff_alpha(
    mu_p: &DVector<f64>,
    sigma_p: &DMatrix<f64>,
    mu_q: &DVector<f64>,
    sigma_q: &DMatrix<f64>,
    alpha: f64,
) -> Result<f64> {
    check_open_unit("alpha", alpha)?;
    let d = mu_p.len();
    if mu_q.len() != d || sigma_p.shape() != (d, d) || sigma_q.shape() != (d, d) {
        return Err(Error::Dimension("inconsistent Gaussian dimensions".to_string()));
    }
    let mixed = sigma_p * (1.0 - alpha) + sigma_q * alpha;
    let log_det = |m: &DMatrix<f64>| -> Result<f64> {
        let c = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Domain("covariance is not positive definite".to_string()))?;
        Ok(2.0 * c.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
    };
    let diff = mu_p - mu_q;
    let solved = mixed
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Domain("mixed covariance is not positive definite".to_string()))?
        .solve(&diff);
    let det_term = 0.5 * (log_det(&mixed)? - (1.0 - alpha) * log_det(sigma_p)? - alpha * log_det(sigma_q)?);
    Ok(det_term + 0.5 * alpha * (1.0 - alpha) * diff.dot(&solved))
}

/// Rényi divergence between Gaussians, `C_α / (1 - α)`.
pub fn mvn_renyi(
    mu_p: &DVector<f64>,
    sigma_p: &DMatrix<f64>,
    mu_q: &DVector<f64>,
    sigma_q: &DMatrix<f64>,
    alpha: f64,
) -> Result<f64> {
    Ok(mvn_chernoff_alpha(mu_p, sigma_p, mu_q, sigma_q, alpha)? / (1.0 - alpha))
}

/// Chernoff α-divergence between `Dir(p)` and `Dir(q)`, the skew Jensen
/// divergence of `F(a) = Σ log Γ(a_i) - log Γ(Σ a_i)` at the concentrations.
pub fn dirichlet_chernoff_alpha(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    check_open_unit("alpha", alpha)?;
    if p.len() != q.len() {
        return Err(Error::Dimension(format!("{} vs {} concentrations", p.len(), q.len())));
    }
    let f = |a: &[f64]| a.iter().map(|&v| ln_gamma(v)).sum::<f64>() - ln_gamma(a.iter().sum());
    let mixed: Vec<f64> = p.iter().zip(q).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
    Ok(alpha * f(p) + (1.0 - alpha) * f(q) - f(&mixed))
}

/// Chernoff α-divergence between Poisson(λ_p) and Poisson(λ_q).
pub fn poisson_chernoff_alpha(lambda_p: f64, lambda_q: f64, alpha: f64) -> Result<f64> {
    check_open_unit("alpha", alpha)?;
    Ok(alpha * lambda_p + (1.0 - alpha) * lambda_q - lambda_p.powf(alpha) * lambda_q.powf(1.0 - alpha))
}

/// Bhattacharyya distance between equal-variance Gaussians, `(Δμ)² / (8σ²)`.
pub fn gaussian_fixed_sigma_bhattacharyya(mu_p: f64, mu_q: f64, sigma: f64) -> f64 {
    (mu_p - mu_q).powi(2) / (8.0 * sigma * sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergences::skew_jensen;
    use crate::families::{Family, SourceParams};

    #[test]
    fn mvn_matches_generic_jensen() {
        let family = Family::GaussianMvn { dim: 2 };
        let mu_p = DVector::from_vec(vec![0.0, 1.0]);
        let mu_q = DVector::from_vec(vec![1.5, -0.5]);
        let s_p = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.5]);
        let s_q = DMatrix::from_row_slice(2, 2, &[2.0, -0.4, -0.4, 1.5]);
        let p = family.point(&SourceParams::Mvn { mu: mu_p.clone(), sigma: s_p.clone() }).unwrap();
        let q = family.point(&SourceParams::Mvn { mu: mu_q.clone(), sigma: s_q.clone() }).unwrap();
        for a in [0.1, 0.3, 0.5, 0.8, 0.95] {
            let closed = mvn_chernoff_alpha(&mu_p, &s_p, &mu_q, &s_q, a).unwrap();
            let generic = skew_jensen(&p, &q, a).unwrap().value;
            assert!((closed - generic).abs() < 1e-9, "alpha = {a}: {closed} vs {generic}");
            let renyi = mvn_renyi(&mu_p, &s_p, &mu_q, &s_q, a).unwrap();
            assert!((renyi - generic / (1.0 - a)).abs() < 1e-9);
        }
    }

    #[test]
    fn literal_mixing_order_disagrees() {
        // `αΣ_p + (1-α)Σ_q` without inverse: not the Chernoff α-divergence.
        let family = Family::GaussianMvn { dim: 1 };
        let (mu_p, mu_q) = (DVector::from_vec(vec![0.0]), DVector::from_vec(vec![2.0]));
        let (s_p, s_q) = (DMatrix::from_element(1, 1, 9.0), DMatrix::from_element(1, 1, 36.0));
        let a: f64 = 0.3;
        let mixed = a * 9.0 + (1.0 - a) * 36.0;
        let literal = 0.5 * (mixed / (9f64.powf(a) * 36f64.powf(1.0 - a))).ln() + 0.5 * a * (1.0 - a) * 4.0 * mixed;
        let p = family.point(&SourceParams::Mvn { mu: mu_p.clone(), sigma: s_p.clone() }).unwrap();
        let q = family.point(&SourceParams::Mvn { mu: mu_q.clone(), sigma: s_q.clone() }).unwrap();
        let generic = skew_jensen(&p, &q, a).unwrap().value;
        assert!((literal - generic).abs() > 1e-2);
        assert!((mvn_chernoff_alpha(&mu_p, &s_p, &mu_q, &s_q, a).unwrap() - generic).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_matches_generic_jensen() {
        let family = Family::Dirichlet { dim: 3 };
        let (a, b) = (vec![0.7, 2.0, 5.5], vec![3.0, 1.2, 0.4]);
        let p = family.point(&SourceParams::Dirichlet { alpha: a.clone() }).unwrap();
        let q = family.point(&SourceParams::Dirichlet { alpha: b.clone() }).unwrap();
        for alpha in [0.2, 0.5, 0.77] {
            let closed = dirichlet_chernoff_alpha(&a, &b, alpha).unwrap();
            let generic = skew_jensen(&p, &q, alpha).unwrap().value;
            assert!((closed - generic).abs() < 1e-11);
        }
    }

    #[test]
    fn poisson_matches_generic_jensen() {
        let p = Family::Poisson.point(&SourceParams::Poisson { lambda: 2.0 }).unwrap();
        let q = Family::Poisson.point(&SourceParams::Poisson { lambda: 5.0 }).unwrap();
        let closed = poisson_chernoff_alpha(2.0, 5.0, 0.3).unwrap();
        assert!((closed - skew_jensen(&p, &q, 0.3).unwrap().value).abs() < 1e-14);
    }

    #[test]
    fn equal_variance_bhattacharyya() {
        assert_eq!(gaussian_fixed_sigma_bhattacharyya(0.0, 2.0, 3.0), 4.0 / 72.0);
    }
}
