//! Expectation-principle premiums with proportional loading and additive
//! fixed cost, plus the premium inversions used by the budget analysis.
//!
//! Both contract designs are priced as
//! `premium = (1 + loading) * (expected annual benefit + fixed_cost)`,
//! where the fixed cost is a per-period friction (loss adjustment, overhead)
//! that is itself risk-loaded.

use serde::Serialize;

use crate::error::{validate_non_negative, validate_positive, Error, Result};
use crate::root;
use crate::severity::SeverityModel;

/// Per-contract pricing inputs: loading `theta >= 0` and per-period fixed
/// cost `gamma >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PricingParams {
    loading: f64,
    fixed_cost: f64,
}

impl PricingParams {
    pub fn new(loading: f64, fixed_cost: f64) -> Result<Self> {
        validate_non_negative(loading, "loading")?;
        validate_non_negative(fixed_cost, "fixed_cost")?;
        Ok(Self {
            loading,
            fixed_cost,
        })
    }

    pub fn loading(&self) -> f64 {
        self.loading
    }

    pub fn fixed_cost(&self) -> f64 {
        self.fixed_cost
    }

    /// Same loading, different fixed cost. Used by sweeps over the friction.
    pub fn with_fixed_cost(self, fixed_cost: f64) -> Result<Self> {
        Self::new(self.loading, fixed_cost)
    }

    /// Same fixed cost, different loading.
    pub fn with_loading(self, loading: f64) -> Result<Self> {
        Self::new(loading, self.fixed_cost)
    }

    /// Smallest premium the contract can charge: `(1 + theta) * gamma`,
    /// attained by the indemnity design at deductible = cap.
    pub fn premium_floor(&self) -> f64 {
        (1.0 + self.loading) * self.fixed_cost
    }
}

/// Annual claim-count law: Poisson, or a general (mean, variance) pair for
/// over/under-dispersed counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyModel {
    mean: f64,
    variance: f64,
    poisson: bool,
}

impl FrequencyModel {
    /// Poisson counts with rate `lambda`; variance equals the mean exactly.
    pub fn poisson(lambda: f64) -> Result<Self> {
        validate_positive(lambda, "lambda")?;
        Ok(Self {
            mean: lambda,
            variance: lambda,
            poisson: true,
        })
    }

    /// General count law specified by its first two moments.
    pub fn general(mean: f64, variance: f64) -> Result<Self> {
        validate_positive(mean, "frequency mean")?;
        validate_positive(variance, "frequency variance")?;
        Ok(Self {
            mean,
            variance,
            poisson: false,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn is_poisson(&self) -> bool {
        self.poisson
    }
}

/// Result of inverting the indemnity premium for a deductible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeductibleInversion {
    pub deductible: f64,
    /// The target exceeded the full-cover premium; the result was clamped to
    /// deductible 0.
    pub clamped: bool,
}

/// Indemnity premium `(1 + theta_d) * (mean_count * E[(Y - d)_+] + gamma_d)`.
pub fn indemnity_premium(
    sev: &SeverityModel,
    freq: &FrequencyModel,
    pricing: &PricingParams,
    deductible: f64,
) -> Result<f64> {
    let expected_benefit = freq.mean() * sev.excess_mean(deductible)?;
    Ok((1.0 + pricing.loading()) * (expected_benefit + pricing.fixed_cost()))
}

/// Parametric premium `(1 + theta_p) * (mean_count * k + gamma_p)`.
pub fn parametric_premium(
    freq: &FrequencyModel,
    pricing: &PricingParams,
    payment: f64,
) -> Result<f64> {
    if !payment.is_finite() || payment < 0.0 {
        return Err(Error::OutOfRange {
            name: "payment",
            value: payment,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok((1.0 + pricing.loading()) * (freq.mean() * payment + pricing.fixed_cost()))
}

/// Invert the indemnity premium: the unique `d` with premium(d) = target.
///
/// Uses the closed form
/// `d = -(1/nu) ln( nu (target/(1+theta) - gamma)/mean_count + e^{-nu L} )`.
/// Targets below the feasibility floor `(1+theta) gamma` are infeasible;
/// targets above the full-cover premium clamp to `d = 0` with a flag.
pub fn invert_indemnity_premium(
    sev: &SeverityModel,
    freq: &FrequencyModel,
    pricing: &PricingParams,
    target: f64,
) -> Result<DeductibleInversion> {
    let floor = pricing.premium_floor();
    if !target.is_finite() || target < floor {
        return Err(Error::InfeasiblePremium { target, floor });
    }
    let net_benefit = target / (1.0 + pricing.loading()) - pricing.fixed_cost();
    let arg = sev.nu() * net_benefit / freq.mean() + sev.atom_mass();
    if arg > 1.0 {
        return Ok(DeductibleInversion {
            deductible: 0.0,
            clamped: true,
        });
    }
    let deductible = (-arg.ln() / sev.nu()).clamp(0.0, sev.cap());
    Ok(DeductibleInversion {
        deductible,
        clamped: false,
    })
}

/// Bisection fallback for [`invert_indemnity_premium`], for severity laws
/// without a closed-form inverse. Same contract, solved numerically on
/// `[0, cap]` to 1e-7 currency units.
pub fn invert_indemnity_premium_bisection(
    sev: &SeverityModel,
    freq: &FrequencyModel,
    pricing: &PricingParams,
    target: f64,
) -> Result<DeductibleInversion> {
    let floor = pricing.premium_floor();
    if !target.is_finite() || target < floor {
        return Err(Error::InfeasiblePremium { target, floor });
    }
    if indemnity_premium(sev, freq, pricing, 0.0)? < target {
        return Ok(DeductibleInversion {
            deductible: 0.0,
            clamped: true,
        });
    }
    let report = root::solve_bracketed(
        |d| Ok(indemnity_premium(sev, freq, pricing, d)? - target),
        0.0,
        sev.cap(),
        1e-7,
        200,
    )?;
    Ok(DeductibleInversion {
        deductible: report.root,
        clamped: false,
    })
}

/// Invert the parametric premium: `k = (target/(1+theta) - gamma)/mean_count`,
/// not capped at the sum insured (capping is the caller's concern).
pub fn invert_parametric_premium(
    freq: &FrequencyModel,
    pricing: &PricingParams,
    target: f64,
) -> Result<f64> {
    let floor = pricing.premium_floor();
    if !target.is_finite() || target < floor {
        return Err(Error::InfeasiblePremium { target, floor });
    }
    let payment = (target / (1.0 + pricing.loading()) - pricing.fixed_cost()) / freq.mean();
    Ok(payment.max(0.0))
}
