//! Chernoff information and related divergences between members of one
//! exponential family.
//!
//! Distributions are handled through their natural parameters θ and
//! log-normalizer F. The skew Jensen divergence of F gives the Chernoff
//! α-divergences in closed form, and the Chernoff information is the maximum
//! over α, located by bisection on the Bregman bisector gap (or directly, for
//! order-1 families). [`oracle`] recomputes the same quantities by brute-force
//! integration for validation.
//!
//! ```
//! use chernoff_core::{chernoff_information, BisectionConfig, Family, SourceParams};
//!
//! let p = Family::Gaussian1d.point(&SourceParams::Gaussian { mu: 0.0, var: 9.0 })?;
//! let q = Family::Gaussian1d.point(&SourceParams::Gaussian { mu: 2.0, var: 9.0 })?;
//! let r = chernoff_information(&p, &q, &BisectionConfig::default())?;
//! assert!((r.alpha_star - 0.5).abs() < 1e-9);
//! assert!((r.info - 4.0 / 72.0).abs() < 1e-10);
//! # Ok::<(), chernoff_core::Error>(())
//! ```

pub mod bayes;
pub mod chernoff;
pub mod config;
pub mod divergences;
pub mod error;
pub mod exec;
pub mod families;
pub mod oracle;
pub mod params;
pub mod special;

pub use chernoff::{chernoff_information, BisectionConfig, ChernoffResult, SolveMethod};
pub use error::{Error, Result};
pub use exec::Execution;
pub use families::{make_family, Family, FamilyKind, Hyper, SourceParams};
pub use params::{Coordinates, ParamPoint, ParamVector};
