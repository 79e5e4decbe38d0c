//! Comparison of excess-of-loss (indemnity) and parametric insurance under a
//! mean-variance criterion.
//!
//! Annual losses are compound: a claim count (Poisson, or a general
//! over-dispersed law) with i.i.d. censored-exponential severities capped at
//! the sum insured. Premiums follow the expectation principle with a
//! proportional loading and an additive per-period fixed cost. The crate
//! provides:
//!
//! - [`severity`]: closed-form severity, excess-loss, and retained-loss
//!   moments;
//! - [`pricing`]: premiums for both designs and their inversions;
//! - [`objective`]: mean-variance objectives, derivatives, optimal contract
//!   parameters, and the duality between them;
//! - [`comparison`]: premium-matched comparisons, indifference thresholds,
//!   budget-constrained choice, and dominance surfaces;
//! - [`oracle`]: independent verification engines — adaptive quadrature,
//!   seeded Monte Carlo, and brute-force grid search.

pub mod comparison;
pub mod error;
pub mod objective;
pub mod oracle;
pub mod pricing;
mod root;
pub mod severity;

pub use error::{Error, Result};
pub use objective::{ContractOptimum, DualityGap, Preferences, Scenario};
pub use pricing::{FrequencyModel, PricingParams};
pub use root::RootReport;
pub use severity::SeverityModel;
