//! Problem files: a pair of same-family distributions in conventional
//! parameters, plus an optional class prior.
//!
//! ```json
//! {"family": "gaussian-1d", "p": {"mu": 0, "var": 9}, "q": {"mu": 2, "var": 9}}
//! ```

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::families::{bernoulli_point, make_family, Family, FamilyKind, Hyper, SourceParams};
use crate::params::ParamPoint;

#[derive(Clone, Debug)]
pub struct Problem {
    pub family: Family,
    pub p: ParamPoint,
    pub q: ParamPoint,
    pub w1: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    family: FamilyKind,
    #[serde(default)]
    hyper: Option<Hyper>,
    p: Value,
    q: Value,
    #[serde(default)]
    w1: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Rate {
    lambda: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Prob {
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Mean {
    mu: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanVar {
    mu: f64,
    #[serde(default)]
    var: Option<f64>,
    #[serde(default)]
    sigma: Option<f64>,
}

impl MeanVar {
    fn variance(&self) -> std::result::Result<f64, String> {
        match (self.var, self.sigma) {
            (Some(v), None) => Ok(v),
            (None, Some(s)) if s > 0.0 => Ok(s * s),
            (None, Some(s)) => Err(format!("sigma must be > 0, got {s}")),
            _ => Err("give exactly one of `var` and `sigma`".to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanCov {
    mu: Vec<f64>,
    sigma: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Concentration {
    #[serde(alias = "p")]
    alpha: Vec<f64>,
}

/// 1-based line of the first occurrence of `"key":` in `text`.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().enumerate().find_map(|(i, line)| {
        let at = line.find(&needle)?;
        line[at + needle.len()..].trim_start().starts_with(':').then_some(i + 1)
    })
}

fn anchored(text: &str, key: &str, err: impl std::fmt::Display) -> Error {
    match key_line(text, key) {
        Some(line) => Error::Config(format!("line {line}: \"{key}\": {err}")),
        None => Error::Config(format!("\"{key}\": {err}")),
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
}

fn side<T: for<'de> Deserialize<'de>>(text: &str, key: &str, value: &Value) -> Result<T> {
    T::deserialize(value).map_err(|e| anchored(text, key, e))
}

fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("covariance must be square, got {n} rows of lengths {:?}", rows.iter().map(Vec::len).collect::<Vec<_>>())));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn point(text: &str, key: &str, kind: FamilyKind, family: Family, value: &Value) -> Result<ParamPoint> {
    let source = match kind {
        FamilyKind::Poisson => SourceParams::Poisson { lambda: side::<Rate>(text, key, value)?.lambda },
        FamilyKind::Exponential => SourceParams::Exponential { lambda: side::<Rate>(text, key, value)?.lambda },
        FamilyKind::Bernoulli => {
            let p = side::<Prob>(text, key, value)?.p;
            return bernoulli_point(p).map_err(|e| anchored(text, key, e));
        }
        FamilyKind::GaussianFixedSigma => SourceParams::GaussianFixedSigma { mu: side::<Mean>(text, key, value)?.mu },
        FamilyKind::Gaussian1d => {
            let side: MeanVar = side(text, key, value)?;
            let var = side.variance().map_err(|e| anchored(text, key, e))?;
            SourceParams::Gaussian { mu: side.mu, var }
        }
        FamilyKind::GaussianMvn => {
            let MeanCov { mu, sigma } = side(text, key, value)?;
            SourceParams::Mvn {
                mu: DVector::from_vec(mu),
                sigma: matrix(&sigma).map_err(|e| anchored(text, key, e))?,
            }
        }
        FamilyKind::Dirichlet => SourceParams::Dirichlet { alpha: side::<Concentration>(text, key, value)?.alpha },
    };
    family.point(&source).map_err(|e| anchored(text, key, e))
}

/// Dimension of a vector-valued side, used when `hyper.d` is omitted.
fn inferred_dim(kind: FamilyKind, value: &Value) -> Option<usize> {
    let field = match kind {
        FamilyKind::GaussianMvn => "mu",
        FamilyKind::Dirichlet => "alpha",
        _ => return None,
    };
    let entry = value.get(field).or_else(|| value.get("p"))?;
    entry.as_array().map(Vec::len)
}

/// Parses a problem file. Errors carry the line of the offending entry.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let raw: RawProblem = serde_json::from_str(text).map_err(json_error)?;
    let mut hyper = raw.hyper.unwrap_or_default();
    if hyper.d.is_none() {
        hyper.d = inferred_dim(raw.family, &raw.p);
    }
    let family = make_family(raw.family, hyper).map_err(|e| anchored(text, "family", e))?;
    let p = point(text, "p", raw.family, family, &raw.p)?;
    let q = point(text, "q", raw.family, family, &raw.q)?;
    let w1 = raw.w1.unwrap_or(0.5);
    if !(w1 > 0.0 && w1 < 1.0) {
        return Err(anchored(text, "w1", format!("prior must lie in (0, 1), got {w1}")));
    }
    Ok(Problem { family, p, q, w1 })
}

pub fn load_problem(path: &std::path::Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}
