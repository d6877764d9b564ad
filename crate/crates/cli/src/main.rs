use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use chernoff_core::bayes::{best_chernoff_bound, bound_ordering_report, chernoff_bound, empirical_bayes_error, BinaryProblem};
use chernoff_core::chernoff::{alpha_sweep, uniform_grid};
use chernoff_core::config::{load_problem, Problem};
use chernoff_core::divergences::{self, DivergenceValue};
use chernoff_core::oracle::{self, IntegrationSpec, Scheme};
use chernoff_core::{chernoff_information, BisectionConfig, Error};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "chernoff", version, about = "Chernoff information between exponential-family distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Problem file: {"family", "hyper"?, "p", "q", "w1"?}.
    #[arg(long, global = true)]
    problem: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Skew parameter α in (0, 1).
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Interior grid size for `sweep`.
    #[arg(long, default_value_t = 99, global = true)]
    grid_points: usize,

    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Number of Monte-Carlo draws for `simulate`.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    samples: usize,

    #[arg(long, global = true)]
    alpha_tolerance: Option<f64>,

    #[arg(long, global = true)]
    gap_tolerance: Option<f64>,

    #[arg(long, global = true)]
    max_iterations: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// KL, Jeffreys, resistor-average, Bhattacharyya and the α-family at --alpha.
    Divergence,
    /// Chernoff information and the optimal skew α*.
    Chernoff,
    /// Chernoff α-divergence on a uniform α grid.
    Sweep,
    /// Compare closed-form values with the numerical oracle.
    Verify,
    /// Chernoff bounds on the Bayes error and the bound ordering.
    Bound,
    /// Monte-Carlo Bayes error of the MAP rule next to the best bound.
    Simulate,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Invalid(String),
    NonConvergence(String),
    Verification(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Bisection settings with any command-line overrides applied.
fn bisection_config(cli: &Cli) -> Result<BisectionConfig, Failure> {
    let defaults = BisectionConfig::default();
    let cfg = BisectionConfig {
        alpha_tolerance: cli.alpha_tolerance.unwrap_or(defaults.alpha_tolerance),
        gap_tolerance: cli.gap_tolerance.unwrap_or(defaults.gap_tolerance),
        max_iterations: cli.max_iterations.unwrap_or(defaults.max_iterations),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn alpha(cli: &Cli) -> Result<f64, Failure> {
    match cli.alpha {
        None => Ok(0.5),
        Some(a) if a > 0.0 && a < 1.0 => Ok(a),
        Some(a) => Err(Failure::Invalid(format!("--alpha must lie in (0, 1), got {a}"))),
    }
}

fn entry(v: DivergenceValue) -> Value {
    json!({"value": v.value, "method": v.method})
}

fn divergence_report(problem: &Problem, alpha: f64) -> Result<Value, Failure> {
    let (p, q) = (&problem.p, &problem.q);
    Ok(json!({
        "family": problem.family.name(),
        "alpha": alpha,
        "kl": entry(divergences::kl(p, q)?),
        "kl_reverse": entry(divergences::kl(q, p)?),
        "jeffreys": entry(divergences::jeffreys(p, q)?),
        "resistor_average": entry(divergences::resistor_average(p, q)?),
        "bhattacharyya": entry(divergences::bhattacharyya(p, q)?),
        "bregman": entry(divergences::bregman(p, q)?),
        "skew_jensen": entry(divergences::skew_jensen(p, q, alpha)?),
        "chernoff_alpha_divergence": entry(divergences::chernoff_alpha_divergence(p, q, alpha)?),
        "chernoff_coefficient": divergences::chernoff_coefficient(p, q, alpha)?,
        "chernoff_alpha_divergence_second_type": entry(divergences::chernoff_alpha_divergence_second_type(p, q, alpha)?),
        "renyi": entry(divergences::renyi(p, q, alpha)?),
        "tsallis": entry(divergences::tsallis(p, q, alpha)?),
        "amari_alpha": entry(divergences::amari_alpha(p, q, 1.0 - 2.0 * alpha)?),
    }))
}

fn chernoff_report(problem: &Problem, cfg: &BisectionConfig) -> Result<Value, Failure> {
    let r = chernoff_information(&problem.p, &problem.q, cfg)?;
    Ok(json!({
        "family": problem.family.name(),
        "alpha_star": r.alpha_star,
        "info": r.info,
        "method": r.method,
        "iterations": r.iterations,
        "bregman_gap": r.bregman_gap,
        "theta_star": r.theta_star.params().flatten(),
    }))
}

fn verify_report(problem: &Problem, alpha: f64, seed: u64) -> Result<(Value, bool), Failure> {
    const TOLERANCE: f64 = 1e-6;
    let spec = IntegrationSpec { seed, ..IntegrationSpec::for_family(problem.family) };
    let closed = divergences::chernoff_alpha_divergence(&problem.p, &problem.q, alpha)?.value;
    let estimate = oracle::chernoff_coefficient_estimate(&problem.p, &problem.q, alpha, &spec)?;
    let numeric = -estimate.value.ln();
    let diff = (closed - numeric).abs();
    // Monte-Carlo agreement is judged on the coefficient, in standard errors.
    let (compared_on, deviation, tolerance) = match spec.scheme {
        Scheme::MonteCarlo => ("coefficient", ((-closed).exp() - estimate.value).abs(), 5.0 * estimate.std_error),
        _ => ("divergence", diff, TOLERANCE),
    };
    let passed = deviation <= tolerance;
    let scheme = match spec.scheme {
        Scheme::DiscreteSum => "discrete_sum",
        Scheme::AdaptiveQuadrature => "adaptive_quadrature",
        Scheme::MonteCarlo => "monte_carlo",
    };
    Ok((
        json!({
            "family": problem.family.name(),
            "alpha": alpha,
            "scheme": scheme,
            "closed_form": closed,
            "oracle": numeric,
            "oracle_coefficient": estimate.value,
            "oracle_std_error": estimate.std_error,
            "abs_diff": diff,
            "compared_on": compared_on,
            "deviation": deviation,
            "tolerance": tolerance,
            "passed": passed,
        }),
        passed,
    ))
}

fn bound_report(problem: &Problem, alpha: Option<f64>, cfg: &BisectionConfig) -> Result<Value, Failure> {
    let bp = BinaryProblem::new(problem.p.clone(), problem.q.clone(), problem.w1)?;
    let best = best_chernoff_bound(&bp, cfg)?;
    let at_alpha = alpha.map(|a| chernoff_bound(&bp, a)).transpose()?;
    let ordering = bound_ordering_report(&bp, cfg)?;
    Ok(json!({
        "family": problem.family.name(),
        "w1": problem.w1,
        "best_bound": best,
        "alpha": alpha,
        "bound_at_alpha": at_alpha,
        "ordering": ordering,
        "ordering_holds": ordering.holds(),
    }))
}

fn simulate_report(problem: &Problem, n: usize, seed: u64, cfg: &BisectionConfig) -> Result<Value, Failure> {
    let bp = BinaryProblem::new(problem.p.clone(), problem.q.clone(), problem.w1)?;
    let estimate = empirical_bayes_error(&bp, n, seed)?;
    let best = best_chernoff_bound(&bp, cfg)?;
    Ok(json!({
        "family": problem.family.name(),
        "w1": problem.w1,
        "seed": seed,
        "empirical_error": estimate,
        "best_bound": best,
    }))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.grid_points < 2 {
        return Err(Failure::Invalid(format!("--grid-points must be at least 2, got {}", cli.grid_points)));
    }
    if cli.format == Format::Csv && cli.command != Command::Sweep {
        return Err(Failure::Invalid("csv output is only available for sweep".to_string()));
    }
    let path = cli
        .problem
        .as_ref()
        .ok_or_else(|| Failure::Invalid("--problem is required".to_string()))?;
    let problem = load_problem(path)?;
    let cfg = bisection_config(cli)?;
    let alpha_value = alpha(cli)?;

    let mut verification_failed = None;
    let body = match cli.command {
        Command::Divergence => to_json(&divergence_report(&problem, alpha_value)?),
        Command::Chernoff => to_json(&chernoff_report(&problem, &cfg)?),
        Command::Sweep => {
            let table = alpha_sweep(&problem.p, &problem.q, &uniform_grid(cli.grid_points))?;
            match cli.format {
                Format::Csv => table.to_csv(),
                Format::Json => to_json(&json!({ "rows": table.rows })),
            }
        }
        Command::Verify => {
            let (report, passed) = verify_report(&problem, alpha_value, cli.seed)?;
            if !passed {
                verification_failed = Some(format!("oracle disagreement: {}", report["abs_diff"]));
            }
            to_json(&report)
        }
        Command::Bound => to_json(&bound_report(&problem, cli.alpha.map(|_| alpha_value), &cfg)?),
        Command::Simulate => to_json(&simulate_report(&problem, cli.samples, cli.seed, &cfg)?),
    };

    match &cli.output {
        Some(out) => File::create(out)?.write_all(body.as_bytes())?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    match verification_failed {
        Some(msg) => Err(Failure::Verification(msg)),
        None => Ok(()),
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
