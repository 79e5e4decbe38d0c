//! Scenario file loading: a human-editable TOML document whose keys all
//! default to the built-in baseline.
//!
//! ```toml
//! [preferences]
//! w0 = 150000.0
//! beta = "normalized"        # or an explicit value, e.g. 6.6667e-6
//!
//! [severity]
//! nu = 2.857142857142857e-6  # or mean_full_exponential = 350000.0
//! L = 500000.0
//!
//! [frequency]
//! lambda = 0.02              # or mean/variance/family for general counts
//!
//! [indemnity_pricing]
//! theta_d = 0.3
//! gamma_d = 0.0
//!
//! [parametric_pricing]
//! theta_p = 0.3
//! gamma_p = 0.0
//! ```

use std::fs;

use serde::Deserialize;

use paracover::{FrequencyModel, Preferences, PricingParams, Scenario, SeverityModel};

use crate::{CliError, ScenarioArgs};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    preferences: Option<PreferencesDoc>,
    severity: Option<SeverityDoc>,
    frequency: Option<FrequencyDoc>,
    indemnity_pricing: Option<IndemnityDoc>,
    parametric_pricing: Option<ParametricDoc>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PreferencesDoc {
    w0: Option<f64>,
    beta: Option<BetaDoc>,
}

/// `beta` is either an explicit value or the token `"normalized"` for
/// `beta = 1 / w0`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BetaDoc {
    Value(f64),
    Token(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeverityDoc {
    nu: Option<f64>,
    /// Mean of the uncensored exponential, `1 / nu`.
    mean_full_exponential: Option<f64>,
    #[serde(rename = "L")]
    cap: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrequencyDoc {
    lambda: Option<f64>,
    mean: Option<f64>,
    variance: Option<f64>,
    family: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndemnityDoc {
    theta_d: Option<f64>,
    gamma_d: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParametricDoc {
    theta_p: Option<f64>,
    gamma_p: Option<f64>,
}

pub fn load(args: &ScenarioArgs) -> Result<Scenario, CliError> {
    let scenario = match &args.source.scenario {
        None => Scenario::baseline(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
            let doc: ScenarioDoc = toml::from_str(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            build(doc)?
        }
    };
    if args.gamma_per_event {
        // fixed costs were given per event; pricing wants them per period
        let mean_count = scenario.freq.mean();
        Ok(scenario
            .with_indemnity_fixed_cost(scenario.indemnity_pricing.fixed_cost() * mean_count)?
            .with_parametric_fixed_cost(scenario.parametric_pricing.fixed_cost() * mean_count)?)
    } else {
        Ok(scenario)
    }
}

fn build(doc: ScenarioDoc) -> Result<Scenario, CliError> {
    let base = Scenario::baseline();

    let sev_doc = doc.severity.unwrap_or_default();
    let cap = sev_doc.cap.unwrap_or(base.sev.cap());
    let nu = match (sev_doc.nu, sev_doc.mean_full_exponential) {
        (Some(_), Some(_)) => {
            return Err(CliError::Parse(
                "severity: give nu or mean_full_exponential, not both".into(),
            ))
        }
        (Some(nu), None) => nu,
        (None, Some(mean)) => 1.0 / mean,
        (None, None) => base.sev.nu(),
    };
    let sev = SeverityModel::new(nu, cap)?;

    let prefs_doc = doc.preferences.unwrap_or_default();
    let w0 = prefs_doc.w0.unwrap_or(base.prefs.initial_wealth());
    let prefs = match prefs_doc.beta {
        None => Preferences::normalized(w0)?,
        Some(BetaDoc::Value(beta)) => Preferences::new(w0, beta)?,
        Some(BetaDoc::Token(token)) if token == "normalized" => Preferences::normalized(w0)?,
        Some(BetaDoc::Token(token)) => {
            return Err(CliError::Parse(format!(
                "preferences.beta: expected a number or \"normalized\", got \"{token}\""
            )))
        }
    };

    let freq_doc = doc.frequency.unwrap_or_default();
    let freq = match (freq_doc.lambda, freq_doc.mean, freq_doc.variance) {
        (None, None, None) => base.freq,
        (Some(lambda), None, None) => FrequencyModel::poisson(lambda)?,
        (Some(_), _, _) => {
            return Err(CliError::Parse(
                "frequency: give lambda or mean/variance, not both".into(),
            ))
        }
        (None, Some(mean), Some(variance)) => {
            match freq_doc.family.as_deref().unwrap_or("negative_binomial") {
                "poisson" => {
                    if variance != mean {
                        return Err(CliError::Parse(
                            "frequency: the poisson family requires variance = mean".into(),
                        ));
                    }
                    FrequencyModel::poisson(mean)?
                }
                "negative_binomial" => FrequencyModel::general(mean, variance)?,
                other => {
                    return Err(CliError::Parse(format!(
                        "frequency.family: expected poisson or negative_binomial, got \"{other}\""
                    )))
                }
            }
        }
        _ => {
            return Err(CliError::Parse(
                "frequency: mean and variance must be given together".into(),
            ))
        }
    };

    let ind_doc = doc.indemnity_pricing.unwrap_or_default();
    let indemnity_pricing = PricingParams::new(
        ind_doc.theta_d.unwrap_or(base.indemnity_pricing.loading()),
        ind_doc
            .gamma_d
            .unwrap_or(base.indemnity_pricing.fixed_cost()),
    )?;
    let par_doc = doc.parametric_pricing.unwrap_or_default();
    let parametric_pricing = PricingParams::new(
        par_doc.theta_p.unwrap_or(base.parametric_pricing.loading()),
        par_doc
            .gamma_p
            .unwrap_or(base.parametric_pricing.fixed_cost()),
    )?;

    Ok(Scenario {
        prefs,
        sev,
        freq,
        indemnity_pricing,
        parametric_pricing,
    })
}
