//! Acceptance criteria. Runs as a plain binary so that every criterion prints
//! one PASS/FAIL line; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use chernoff_core::bayes::{best_chernoff_bound, bound_ordering_report, empirical_bayes_error, BinaryProblem};
use chernoff_core::chernoff::{
    bisector_gap, chernoff_bisection, chernoff_closed_form_order1, chernoff_point_density_check, kl_balance,
    poisson_chernoff_information,
};
use chernoff_core::divergences::{bregman, chernoff_alpha_divergence, kl, skew_jensen};
use chernoff_core::families::{dual_log_normalizer, legendre_dual};
use chernoff_core::oracle::{
    alpha_grid_argmax, bayes_error_numeric, chernoff_coefficient_estimate, chernoff_coefficient_numeric,
    chernoff_information_numeric, kl_numeric, IntegrationSpec, Scheme,
};
use chernoff_core::{chernoff_information, BisectionConfig, Family};
use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn equal_variance_gaussian() -> Outcome {
    let (p, q) = (gaussian(0.0, 9.0), gaussian(2.0, 9.0));
    let cfg = BisectionConfig::default();
    chernoff_bisection(&p, &q, &cfg).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let r = chernoff_bisection(&p, &q, &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = 4.0 / 72.0;
    ensure((r.alpha_star - 0.5).abs() <= 1e-9, || format!("alpha* = {}", r.alpha_star))?;
    ensure((r.info - expected).abs() <= 1e-10, || format!("C* = {} vs {expected}", r.info))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {:.3} ms", ms(elapsed)))?;
    Ok(format!("alpha* = {:.12}, C* = {:.12}, {:.3} ms", r.alpha_star, r.info, ms(elapsed)))
}

fn poisson_closed_form() -> Outcome {
    let start = Instant::now();
    let spec = IntegrationSpec::for_family(Family::Poisson);
    let mut worst = (0.0f64, 0.0f64);
    for (l1, l2) in [(0.5, 2.0), (1.0, 3.0), (2.0, 5.0), (10.0, 11.0)] {
        let (p, q) = (poisson(l1), poisson(l2));
        let (_, closed) = poisson_chernoff_information(l1, l2).map_err(|e| e.to_string())?;
        let bisect = chernoff_bisection(&p, &q, &BisectionConfig::default()).map_err(|e| e.to_string())?;
        let (_, numeric) = chernoff_information_numeric(&p, &q, &spec, 1e-4).map_err(|e| e.to_string())?;
        let (d_bisect, d_oracle) = ((closed - bisect.info).abs(), (closed - numeric).abs());
        ensure(d_bisect <= 1e-10, || format!("({l1}, {l2}): bisection off by {d_bisect:e}"))?;
        ensure(d_oracle <= 1e-6, || format!("({l1}, {l2}): oracle off by {d_oracle:e}"))?;
        worst = (worst.0.max(d_bisect), worst.1.max(d_oracle));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {:.1} ms", ms(elapsed)))?;
    Ok(format!(
        "max |closed - bisection| = {:.1e}, max |closed - oracle| = {:.1e}, {:.1} ms",
        worst.0,
        worst.1,
        ms(elapsed)
    ))
}

fn oracle_sweep() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(3);
    let mut worst = 0.0f64;
    for family in SCALAR_FAMILIES {
        let spec = IntegrationSpec::for_family(family);
        for _ in 0..20 {
            let (p, q) = random_pair(family, &mut rng);
            for alpha in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let generic = chernoff_alpha_divergence(&p, &q, alpha).map_err(|e| e.to_string())?.value;
                let c = chernoff_coefficient_numeric(&p, &q, alpha, &spec).map_err(|e| e.to_string())?;
                let diff = (generic + c.ln()).abs();
                ensure(diff <= 1e-6, || {
                    format!("{}: {:?} vs {:?} at alpha {alpha}: |diff| = {diff:e}", family.name(), p.params(), q.params())
                })?;
                worst = worst.max(diff);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {:.1} s", elapsed.as_secs_f64()))?;
    Ok(format!("400 comparisons, max |diff| = {worst:.1e}, {:.1} ms", ms(elapsed)))
}

fn bregman_kl() -> Outcome {
    let mut rng = rng(3);
    let mut worst = 0.0f64;
    for family in SCALAR_FAMILIES {
        let spec = IntegrationSpec::for_family(family);
        for _ in 0..20 {
            let (p, q) = random_pair(family, &mut rng);
            let b = bregman(&q, &p).map_err(|e| e.to_string())?.value;
            let numeric = kl_numeric(&p, &q, &spec).map_err(|e| e.to_string())?;
            let diff = (b - numeric).abs();
            ensure(diff <= 1e-6, || format!("{}: |B - KL| = {diff:e}", family.name()))?;
            worst = worst.max(diff);
        }
    }
    Ok(format!("80 pairs, max |B_F(q:p) - KL(p||q)| = {worst:.1e}"))
}

fn chernoff_point_identities() -> Outcome {
    let mut rng = rng(5);
    let (mut gap, mut balance, mut density) = (0.0f64, 0.0f64, 0.0f64);
    for family in catalog() {
        for _ in 0..10 {
            let (p, q) = random_pair(family, &mut rng);
            let r = chernoff_information(&p, &q, &BisectionConfig::default()).map_err(|e| e.to_string())?;
            let g = bisector_gap(&p, &q, &r.theta_star).map_err(|e| e.to_string())?.abs();
            ensure(g <= 1e-10, || format!("{}: bisector gap {g:e}", family.name()))?;
            gap = gap.max(g);
            if SCALAR_FAMILIES.contains(&family) {
                let b = kl_balance(&p, &q, &r).map_err(|e| e.to_string())?.abs();
                ensure(b <= 1e-5, || format!("{}: KL balance {b:e}", family.name()))?;
                let d = chernoff_point_density_check(&p, &q, &r).map_err(|e| e.to_string())?;
                ensure(d <= 1e-6, || format!("{}: density deviation {d:e}", family.name()))?;
                balance = balance.max(b);
                density = density.max(d);
            }
        }
    }
    Ok(format!("max gap = {gap:.1e}, max KL balance = {balance:.1e}, max density deviation = {density:.1e}"))
}

fn limit_property() -> Outcome {
    let mut rng = rng(6);
    let mut pairs = 0;
    for family in catalog() {
        for _ in 0..10 {
            let (p, q) = random_pair(family, &mut rng);
            let target = kl(&p, &q).map_err(|e| e.to_string())?.value;
            let errors = [1, 2, 3]
                .iter()
                .map(|&k| {
                    let alpha = 1.0 - 10f64.powi(-k);
                    skew_jensen(&p, &q, alpha).map(|j| (j.value / (1.0 - alpha) - target).abs())
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            ensure(errors[0] > errors[1] && errors[1] > errors[2], || {
                format!("{}: errors {errors:?} not decreasing", family.name())
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs over {} families, error decreases with k", catalog().len()))
}

fn bound_chain() -> Outcome {
    let problem = BinaryProblem::new(poisson(2.0), poisson(5.0), 0.5).map_err(|e| e.to_string())?;
    let spec = IntegrationSpec::for_family(Family::Poisson);
    let exact = bayes_error_numeric(&problem.theta1, &problem.theta2, 0.5, &spec)
        .map_err(|e| e.to_string())?
        .value;
    let best = best_chernoff_bound(&problem, &BisectionConfig::default()).map_err(|e| e.to_string())?;
    ensure(exact <= best.bound, || format!("Bayes error {exact} exceeds bound {}", best.bound))?;
    let mc = empirical_bayes_error(&problem, 1_000_000, 0).map_err(|e| e.to_string())?;
    let z = (mc.point_estimate - exact).abs() / mc.std_error;
    ensure(z <= 5.0, || format!("Monte Carlo {} vs exact {exact}: {z:.2} standard errors", mc.point_estimate))?;

    let mut rng = rng(7);
    for family in catalog() {
        for _ in 0..50 {
            let (p, q) = random_pair(family, &mut rng);
            let pb = BinaryProblem::new(p.clone(), q.clone(), 0.5).map_err(|e| e.to_string())?;
            let report = bound_ordering_report(&pb, &BisectionConfig::default()).map_err(|e| e.to_string())?;
            ensure(report.holds(), || {
                format!("{}: {:?} vs {:?} violates the ordering: {report:?}", family.name(), p.params(), q.params())
            })?;
        }
    }
    Ok(format!(
        "exact = {exact:.8} <= bound = {:.8}; Monte Carlo = {:.6} ({z:.2} se); ordering holds on {} pairs",
        best.bound,
        mc.point_estimate,
        50 * catalog().len()
    ))
}

fn mvn_generic() -> Outcome {
    let start = Instant::now();
    let family = Family::GaussianMvn { dim: 2 };
    let spec = IntegrationSpec {
        scheme: Scheme::MonteCarlo,
        mc_samples: 1_000_000,
        ..IntegrationSpec::default()
    };
    let mut rng = rng(8);
    let (mut grid_diff, mut worst_z) = (0.0f64, 0.0f64);
    for i in 0..10 {
        let (p, q) = random_pair(family, &mut rng);
        let r = chernoff_bisection(&p, &q, &BisectionConfig::default()).map_err(|e| e.to_string())?;
        let (_, grid) = alpha_grid_argmax(&p, &q, 1e-4).map_err(|e| e.to_string())?;
        let d = (r.info - grid).abs();
        ensure(d <= 1e-7, || format!("pair {i}: bisection {} vs grid {grid}", r.info))?;
        let spec = IntegrationSpec { seed: i, ..spec };
        let est = chernoff_coefficient_estimate(&p, &q, r.alpha_star, &spec).map_err(|e| e.to_string())?;
        let z = ((-r.info).exp() - est.value).abs() / est.std_error;
        ensure(z <= 5.0, || format!("pair {i}: coefficient {} vs Monte Carlo {} ({z:.2} se)", (-r.info).exp(), est.value))?;
        grid_diff = grid_diff.max(d);
        worst_z = worst_z.max(z);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {:.1} s", elapsed.as_secs_f64()))?;
    Ok(format!(
        "max |bisection - grid| = {grid_diff:.1e}, max Monte-Carlo deviation = {worst_z:.2} se, {:.0} ms",
        ms(elapsed)
    ))
}

fn duality() -> Outcome {
    let mut rng = rng(9);
    let (mut round_trip, mut young) = (0.0f64, 0.0f64);
    let mut families = 0;
    for family in catalog().into_iter().filter(Family::has_inverse_gradient) {
        families += 1;
        for _ in 0..100 {
            let theta = random_point(family, &mut rng);
            let eta = legendre_dual(&theta).map_err(|e| e.to_string())?;
            let back = legendre_dual(&eta).map_err(|e| e.to_string())?;
            let rt = back.params().sub(theta.params()).map_err(|e| e.to_string())?.max_abs();
            let f = family.log_normalizer(theta.params());
            let f_star = dual_log_normalizer(&eta).map_err(|e| e.to_string())?;
            let pairing = theta.params().inner(eta.params()).map_err(|e| e.to_string())?;
            let yf = (f + f_star - pairing).abs();
            ensure(rt <= 1e-9, || format!("{}: round trip error {rt:e}", family.name()))?;
            ensure(yf <= 1e-9, || format!("{}: Young-Fenchel gap {yf:e}", family.name()))?;
            round_trip = round_trip.max(rt);
            young = young.max(yf);
        }
    }
    Ok(format!("{families} families x 100 points, max round trip = {round_trip:.1e}, max Young-Fenchel gap = {young:.1e}"))
}

fn main() {
    // Touch the closed-form solver once so lazy initialization does not count
    // against the first timing.
    let _ = chernoff_closed_form_order1(&poisson(1.0), &poisson(2.0));

    let criteria: [Criterion; 9] = [
        ("equal-variance Gaussian", equal_variance_gaussian),
        ("Poisson closed form", poisson_closed_form),
        ("oracle agreement sweep", oracle_sweep),
        ("Bregman-KL equivalence", bregman_kl),
        ("Chernoff-point identities", chernoff_point_identities),
        ("limit property", limit_property),
        ("bound chain", bound_chain),
        ("MVN generic path", mvn_generic),
        ("duality suite", duality),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed, {:.2} s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
