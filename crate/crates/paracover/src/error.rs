//! Error type shared across the crate.

/// Errors produced by model construction, contract evaluation, and the
/// verification engines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A model parameter violates a type invariant.
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A contract parameter lies outside its admissible interval.
    #[error("{name} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A premium target is below the smallest premium the contract can
    /// charge, `(1 + loading) * fixed_cost`.
    #[error("premium target {target} is below the feasibility floor {floor}")]
    InfeasiblePremium { target: f64, floor: f64 },

    /// The operation needs equi-dispersed (Poisson) claim counts.
    #[error("operation requires Poisson claim counts; got mean {mean}, variance {variance}")]
    PoissonRequired { mean: f64, variance: f64 },

    /// A bracketed search found no sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoRoot {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Root refinement ran out of iterations before reaching tolerance.
    #[error("root not bracketed to within {tol} after {max_iter} iterations (width {width})")]
    RootNotConverged {
        tol: f64,
        max_iter: usize,
        width: f64,
    },

    /// The first-order condition for the general-count deductible is not
    /// monotone on the admissible range, so the bracketed solve is invalid.
    #[error("first-order condition not monotone on [0, {cap}] for count law (mean {mean}, variance {variance})")]
    NonMonotoneFoc { mean: f64, variance: f64, cap: f64 },

    /// Grid axes do not match the requested surface kind.
    #[error("grid axes ({axis1}, {axis2}) do not match surface kind expecting ({expected1}, {expected2})")]
    AxisMismatch {
        axis1: String,
        axis2: String,
        expected1: &'static str,
        expected2: &'static str,
    },

    /// Adaptive quadrature hit the refinement limit before converging.
    #[error("quadrature did not reach relative tolerance {rel_tol} within depth {max_depth}")]
    QuadratureNonConvergent { rel_tol: f64, max_depth: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validate_positive(value: f64, name: &'static str) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            requirement: "strictly positive and finite",
        })
    }
}

pub(crate) fn validate_non_negative(value: f64, name: &'static str) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            requirement: "non-negative and finite",
        })
    }
}
