//! Mean-variance objectives, their derivatives, and optimal contract
//! parameters for both designs.
//!
//! Terminal wealth over one period is
//! `W = w0 - premium - S + benefit`, with aggregate loss `S = sum_i Y_i`
//! over `N` events, and the agent ranks contracts by
//! `MV(W) = E[W] - beta * Var(W)`.
//!
//! Under Poisson counts the indemnity and parametric problems have the
//! closed-form optima `d* = theta_d / (2 beta)` and
//! `k* = E[Y] - theta_p / (2 beta)`, tied together by the identity
//! `E[Y] = d* + k*` when the loadings coincide. For general counts the
//! parametric optimum scales by `mean/variance` of the count law and the
//! deductible optimum is the root of a monotone first-order condition.

use serde::Serialize;

use crate::error::{validate_positive, Error, Result};
use crate::pricing::{self, FrequencyModel, PricingParams};
use crate::root;
use crate::severity::SeverityModel;

/// Wealth and risk-aversion inputs. `risk_aversion` has units of inverse
/// currency so both objective terms are in currency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preferences {
    initial_wealth: f64,
    risk_aversion: f64,
}

impl Preferences {
    pub fn new(initial_wealth: f64, risk_aversion: f64) -> Result<Self> {
        validate_positive(initial_wealth, "initial_wealth")?;
        validate_positive(risk_aversion, "risk_aversion")?;
        Ok(Self {
            initial_wealth,
            risk_aversion,
        })
    }

    /// Wealth-normalized risk aversion: `beta = 1 / w0` exactly.
    pub fn normalized(initial_wealth: f64) -> Result<Self> {
        validate_positive(initial_wealth, "initial_wealth")?;
        Ok(Self {
            initial_wealth,
            risk_aversion: 1.0 / initial_wealth,
        })
    }

    /// Degenerate risk-neutral preferences (`beta = 0`).
    ///
    /// Rejected by [`Preferences::new`]; provided only so the simulation and
    /// quadrature oracles can exercise the mean term in isolation. Contract
    /// optimization rejects it.
    #[doc(hidden)]
    pub fn risk_neutral(initial_wealth: f64) -> Result<Self> {
        validate_positive(initial_wealth, "initial_wealth")?;
        Ok(Self {
            initial_wealth,
            risk_aversion: 0.0,
        })
    }

    pub fn initial_wealth(&self) -> f64 {
        self.initial_wealth
    }

    pub fn risk_aversion(&self) -> f64 {
        self.risk_aversion
    }
}

/// The unit of all computations: preferences, loss model, and the pricing of
/// both contract designs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub prefs: Preferences,
    pub sev: SeverityModel,
    pub freq: FrequencyModel,
    pub indemnity_pricing: PricingParams,
    pub parametric_pricing: PricingParams,
}

impl Scenario {
    /// Built-in default: a household with wealth 150,000 holding a 500,000
    /// house on a 1-in-50-year flood plain, severity rate 1/350,000, equal
    /// loadings 0.3, no fixed costs, wealth-normalized risk aversion.
    pub fn baseline() -> Self {
        Scenario {
            prefs: Preferences::normalized(150_000.0).expect("valid baseline"),
            sev: SeverityModel::new(1.0 / 350_000.0, 500_000.0).expect("valid baseline"),
            freq: FrequencyModel::poisson(1.0 / 50.0).expect("valid baseline"),
            indemnity_pricing: PricingParams::new(0.3, 0.0).expect("valid baseline"),
            parametric_pricing: PricingParams::new(0.3, 0.0).expect("valid baseline"),
        }
    }

    pub fn with_indemnity_fixed_cost(&self, fixed_cost: f64) -> Result<Self> {
        Ok(Scenario {
            indemnity_pricing: self.indemnity_pricing.with_fixed_cost(fixed_cost)?,
            ..*self
        })
    }

    pub fn with_indemnity_loading(&self, loading: f64) -> Result<Self> {
        Ok(Scenario {
            indemnity_pricing: self.indemnity_pricing.with_loading(loading)?,
            ..*self
        })
    }

    pub fn with_parametric_fixed_cost(&self, fixed_cost: f64) -> Result<Self> {
        Ok(Scenario {
            parametric_pricing: self.parametric_pricing.with_fixed_cost(fixed_cost)?,
            ..*self
        })
    }

    pub fn with_parametric_loading(&self, loading: f64) -> Result<Self> {
        Ok(Scenario {
            parametric_pricing: self.parametric_pricing.with_loading(loading)?,
            ..*self
        })
    }
}

/// An optimized contract parameter with its premium and objective value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractOptimum {
    /// Optimal deductible or per-event payment, projected onto `[0, cap]`.
    pub parameter: f64,
    /// The interior formula fell outside `[0, cap]` and was projected.
    pub clamped: bool,
    pub premium: f64,
    pub mv_value: f64,
}

/// The gap `d* + k* - E[Y]` together with whether the identity is expected
/// to hold (equal loadings, Poisson counts, both optima interior).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityGap {
    pub gap: f64,
    pub identity_expected: bool,
}

/// Mean-variance of staying uninsured:
/// `w0 - mean_N E[Y] - beta (mean_N Var(Y) + var_N E[Y]^2)`.
/// Under Poisson counts this is `w0 - lambda E[Y] - beta lambda E[Y^2]`.
pub fn mv_no_insurance(s: &Scenario) -> f64 {
    let w0 = s.prefs.initial_wealth();
    let beta = s.prefs.risk_aversion();
    if s.freq.is_poisson() {
        let lambda = s.freq.mean();
        w0 - lambda * s.sev.mean() - beta * lambda * s.sev.second_moment()
    } else {
        let mean_y = s.sev.mean();
        let agg_var = s.freq.mean() * s.sev.variance() + s.freq.variance() * mean_y * mean_y;
        w0 - s.freq.mean() * mean_y - beta * agg_var
    }
}

/// Mean-variance of the excess-of-loss contract at deductible `d`.
///
/// Poisson counts:
/// `w0 - premium - lambda E[Y] + lambda E[(Y-d)_+] - beta lambda G(d)`.
/// General counts: the retained loss per event is `R_d = min(Y, d)`, so
/// `w0 - premium - mean_N E[R_d] - beta (mean_N Var(R_d) + var_N E[R_d]^2)`.
pub fn mv_indemnity(s: &Scenario, deductible: f64) -> Result<f64> {
    let premium = pricing::indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, deductible)?;
    let w0 = s.prefs.initial_wealth();
    let beta = s.prefs.risk_aversion();
    if s.freq.is_poisson() {
        let lambda = s.freq.mean();
        Ok(
            w0 - premium - lambda * s.sev.mean() + lambda * s.sev.excess_mean(deductible)?
                - beta * lambda * s.sev.retained_second_moment(deductible)?,
        )
    } else {
        let retained_mean = s.sev.retained_mean(deductible)?;
        let retained_var =
            s.sev.retained_second_moment(deductible)? - retained_mean * retained_mean;
        let agg_var =
            s.freq.mean() * retained_var + s.freq.variance() * retained_mean * retained_mean;
        Ok(w0 - premium - s.freq.mean() * retained_mean - beta * agg_var)
    }
}

/// Mean-variance of the parametric contract paying `k` per event.
///
/// Poisson counts:
/// `w0 - premium - lambda E[Y] + lambda k - beta lambda (E[Y^2] + k^2 - 2 k E[Y])`.
/// General counts: the per-event net loss is `Y - k`, so the variance term
/// becomes `mean_N Var(Y) + var_N (E[Y] - k)^2`.
pub fn mv_parametric(s: &Scenario, payment: f64) -> Result<f64> {
    check_payment(s, payment)?;
    let premium = pricing::parametric_premium(&s.freq, &s.parametric_pricing, payment)?;
    let w0 = s.prefs.initial_wealth();
    let beta = s.prefs.risk_aversion();
    let mean_y = s.sev.mean();
    if s.freq.is_poisson() {
        let lambda = s.freq.mean();
        let quad = s.sev.second_moment() + payment * payment - 2.0 * payment * mean_y;
        Ok(w0 - premium - lambda * mean_y + lambda * payment - beta * lambda * quad)
    } else {
        let basis = mean_y - payment;
        let agg_var = s.freq.mean() * s.sev.variance() + s.freq.variance() * basis * basis;
        Ok(w0 - premium - s.freq.mean() * mean_y + s.freq.mean() * payment - beta * agg_var)
    }
}

/// Derivative of [`mv_indemnity`] in the deductible:
/// `e^{-nu d} (mean_N theta_d - 2 beta (mean_N d + (var_N - mean_N) E[min(Y,d)]))`,
/// which under Poisson counts reduces to `lambda e^{-nu d} (theta_d - 2 beta d)`.
pub fn indemnity_mv_derivative(s: &Scenario, deductible: f64) -> Result<f64> {
    let foc = deductible_foc(s, deductible)?;
    Ok((-s.sev.nu() * deductible).exp() * foc)
}

/// Optimal deductible under Poisson counts: `d* = theta_d / (2 beta)`
/// projected onto `[0, cap]`.
pub fn optimal_deductible(s: &Scenario) -> Result<ContractOptimum> {
    require_poisson(&s.freq)?;
    let beta = require_risk_averse(&s.prefs)?;
    let interior = s.indemnity_pricing.loading() / (2.0 * beta);
    let optimum = finish_deductible(s, interior)?;
    debug_assert!(
        !optimum.clamped || interior < 0.0 || interior > s.sev.cap(),
        "clamp flag must reflect projection"
    );
    // second-order condition at the interior point: -2 beta lambda e^{-nu d*} < 0
    debug_assert!(
        optimum.clamped
            || -2.0 * beta * s.freq.mean() * (-s.sev.nu() * optimum.parameter).exp() < 0.0
    );
    Ok(optimum)
}

/// Optimal per-event payment under Poisson counts:
/// `k* = E[Y] - theta_p / (2 beta)` projected onto `[0, cap]`.
pub fn optimal_parametric(s: &Scenario) -> Result<ContractOptimum> {
    require_poisson(&s.freq)?;
    let beta = require_risk_averse(&s.prefs)?;
    let interior = s.sev.mean() - s.parametric_pricing.loading() / (2.0 * beta);
    finish_parametric(s, interior)
}

/// Optimal per-event payment for a general count law:
/// `k* = E[Y] - (mean_N / var_N) * theta_p / (2 beta)` projected onto `[0, cap]`.
/// Reduces to [`optimal_parametric`] when `var_N = mean_N`.
pub fn general_parametric_optimum(s: &Scenario) -> Result<ContractOptimum> {
    let beta = require_risk_averse(&s.prefs)?;
    let ratio = s.freq.mean() / s.freq.variance();
    let interior = s.sev.mean() - ratio * s.parametric_pricing.loading() / (2.0 * beta);
    finish_parametric(s, interior)
}

/// Optimal deductible for a general count law: the root of
/// `mean_N theta_d = 2 beta (mean_N d + (var_N - mean_N) E[min(Y, d)])`
/// on `[0, cap]`, found by a bracketed secant/bisection hybrid to 1e-6
/// currency units. If the condition has no interior root the better boundary
/// is returned with the clamp flag set.
pub fn general_deductible_optimum(s: &Scenario) -> Result<ContractOptimum> {
    require_risk_averse(&s.prefs)?;
    let (mean_n, var_n) = (s.freq.mean(), s.freq.variance());
    // The FOC right-hand side has derivative
    // 2 beta (mean_N + (var_N - mean_N) e^{-nu d}), linear in e^{-nu d}, so
    // its minimum on [0, cap] sits at an endpoint.
    let slope_at_zero = var_n;
    let slope_at_cap = mean_n + (var_n - mean_n) * s.sev.atom_mass();
    if slope_at_zero.min(slope_at_cap) <= 0.0 {
        return Err(Error::NonMonotoneFoc {
            mean: mean_n,
            variance: var_n,
            cap: s.sev.cap(),
        });
    }
    let foc_at_cap = deductible_foc(s, s.sev.cap())?;
    if foc_at_cap > 0.0 {
        // objective increasing on the whole range; compare boundaries anyway
        // and break an exact tie toward the lower-premium option d = cap
        let mv_zero = mv_indemnity(s, 0.0)?;
        let mv_cap = mv_indemnity(s, s.sev.cap())?;
        let parameter = if mv_zero > mv_cap { 0.0 } else { s.sev.cap() };
        return Ok(ContractOptimum {
            parameter,
            clamped: true,
            premium: pricing::indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, parameter)?,
            mv_value: mv_zero.max(mv_cap),
        });
    }
    let report = root::solve_bracketed(|d| deductible_foc(s, d), 0.0, s.sev.cap(), 1e-6, 200)?;
    let parameter = report.root;
    Ok(ContractOptimum {
        parameter,
        clamped: false,
        premium: pricing::indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, parameter)?,
        mv_value: mv_indemnity(s, parameter)?,
    })
}

/// `d* + k* - E[Y]`, using the closed-form optima under Poisson counts and
/// the general-count optima otherwise. `identity_expected` records whether
/// the preconditions for a zero gap hold; their failure is a flag, not an
/// error.
pub fn duality_gap(s: &Scenario) -> Result<DualityGap> {
    let (d_opt, k_opt) = if s.freq.is_poisson() {
        (optimal_deductible(s)?, optimal_parametric(s)?)
    } else {
        (
            general_deductible_optimum(s)?,
            general_parametric_optimum(s)?,
        )
    };
    let gap = d_opt.parameter + k_opt.parameter - s.sev.mean();
    let identity_expected = s.freq.is_poisson()
        && s.indemnity_pricing.loading() == s.parametric_pricing.loading()
        && !d_opt.clamped
        && !k_opt.clamped;
    Ok(DualityGap {
        gap,
        identity_expected,
    })
}

/// Deductible optimum for any count law: closed form under Poisson,
/// root-found otherwise.
pub fn deductible_optimum(s: &Scenario) -> Result<ContractOptimum> {
    if s.freq.is_poisson() {
        optimal_deductible(s)
    } else {
        general_deductible_optimum(s)
    }
}

/// Parametric optimum for any count law.
pub fn parametric_optimum(s: &Scenario) -> Result<ContractOptimum> {
    if s.freq.is_poisson() {
        optimal_parametric(s)
    } else {
        general_parametric_optimum(s)
    }
}

/// First-order condition for the deductible, valid for any count law:
/// `mean_N theta_d - 2 beta (mean_N d + (var_N - mean_N) E[min(Y, d)])`.
fn deductible_foc(s: &Scenario, deductible: f64) -> Result<f64> {
    let beta = s.prefs.risk_aversion();
    let (mean_n, var_n) = (s.freq.mean(), s.freq.variance());
    let retained = s.sev.retained_mean(deductible)?;
    Ok(mean_n * s.indemnity_pricing.loading()
        - 2.0 * beta * (mean_n * deductible + (var_n - mean_n) * retained))
}

fn finish_deductible(s: &Scenario, interior: f64) -> Result<ContractOptimum> {
    let parameter = interior.clamp(0.0, s.sev.cap());
    Ok(ContractOptimum {
        parameter,
        clamped: parameter != interior,
        premium: pricing::indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, parameter)?,
        mv_value: mv_indemnity(s, parameter)?,
    })
}

fn finish_parametric(s: &Scenario, interior: f64) -> Result<ContractOptimum> {
    let parameter = interior.clamp(0.0, s.sev.cap());
    Ok(ContractOptimum {
        parameter,
        clamped: parameter != interior,
        premium: pricing::parametric_premium(&s.freq, &s.parametric_pricing, parameter)?,
        mv_value: mv_parametric(s, parameter)?,
    })
}

fn check_payment(s: &Scenario, payment: f64) -> Result<()> {
    if payment.is_finite() && (0.0..=s.sev.cap()).contains(&payment) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "payment",
            value: payment,
            lo: 0.0,
            hi: s.sev.cap(),
        })
    }
}

fn require_poisson(freq: &FrequencyModel) -> Result<()> {
    if freq.is_poisson() {
        Ok(())
    } else {
        Err(Error::PoissonRequired {
            mean: freq.mean(),
            variance: freq.variance(),
        })
    }
}

fn require_risk_averse(prefs: &Preferences) -> Result<f64> {
    let beta = prefs.risk_aversion();
    if beta > 0.0 {
        Ok(beta)
    } else {
        Err(Error::InvalidParameter {
            name: "risk_aversion",
            value: beta,
            requirement: "strictly positive for contract optimization",
        })
    }
}
