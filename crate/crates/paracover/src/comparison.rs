//! Welfare comparison of the two designs: premium-matched payments,
//! indifference thresholds in the indemnity frictions, budget-constrained
//! contract choice, and the two-dimensional dominance surfaces.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::objective::{self, Scenario};
use crate::pricing;
use crate::root::{self, RootReport};

/// Relative tolerance below which two objective values count as equal.
const TIE_REL_TOL: f64 = 1e-9;
/// Bracket and tolerance for the fixed-cost indifference search.
const GAMMA_BRACKET_HI: f64 = 50_000.0;
const GAMMA_TOL: f64 = 1e-4;
/// Tolerance for the loading indifference search.
const THETA_TOL: f64 = 1e-6;
const ROOT_MAX_ITER: usize = 200;

/// Whether the parametric side of a comparison uses its own optimum or the
/// payment premium-matched to the indemnity contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndifferenceMode {
    OptimalBoth,
    PremiumMatched,
}

/// Action selected by a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    Parametric,
    Indemnity,
    NoInsurance,
    Tie,
}

impl Choice {
    pub fn as_str(&self) -> &'static str {
        match self {
            Choice::Parametric => "parametric",
            Choice::Indemnity => "indemnity",
            Choice::NoInsurance => "no_insurance",
            Choice::Tie => "tie",
        }
    }
}

/// Payment premium-matched to the indemnity premium at deductible `d`:
/// `k = min{ (P_d(d)/(1+theta_p) - gamma_p) / mean_count, cap }`, floored at
/// zero when the fixed-cost difference makes the raw expression negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchedPayment {
    pub k: f64,
    /// The raw matched payment exceeded the sum insured (the cap region).
    pub capped: bool,
    /// The raw matched payment was negative and was floored at zero.
    pub floored: bool,
}

/// Best choice within a premium budget, with ties resolved toward
/// no-insurance (and indemnity over parametric) for determinism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetOutcome {
    pub choice: Choice,
    /// Deductible or payment when a contract is bought.
    pub parameter: Option<f64>,
    pub mv: f64,
    /// Premium actually spent; can sit strictly below the budget once the
    /// unconstrained optimum is affordable.
    pub spent: f64,
    /// The decisive comparison was a tie within tolerance.
    pub tied: bool,
    /// Indemnity only: the budget is below the minimum feasible premium.
    pub infeasible: bool,
}

/// Kinds of dominance surface, named by their axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    /// Premium-matched comparison over (deductible, indemnity fixed cost).
    DeductibleGamma,
    /// Premium-matched comparison over (indemnity loading, indemnity fixed
    /// cost), indemnity evaluated at its optimal deductible per loading.
    ThetaGamma,
    /// Budget-constrained comparison over (budget, indemnity fixed cost).
    BudgetGamma,
}

impl SurfaceKind {
    pub fn axis_names(&self) -> (&'static str, &'static str) {
        match self {
            SurfaceKind::DeductibleGamma => ("d", "gamma_d"),
            SurfaceKind::ThetaGamma => ("theta_d", "gamma_d"),
            SurfaceKind::BudgetGamma => ("budget", "gamma_d"),
        }
    }
}

/// Unit of an axis, controlling export formatting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxisUnit {
    Currency,
    Dimensionless,
}

/// One axis of a rectangular grid: `steps` evenly spaced values on
/// `[min, max]` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub unit: AxisUnit,
}

impl AxisSpec {
    pub fn new(name: &str, min: f64, max: f64, steps: usize, unit: AxisUnit) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::OutOfRange {
                name: "axis range",
                value: min,
                lo: f64::NEG_INFINITY,
                hi: max,
            });
        }
        if steps < 2 {
            return Err(Error::InvalidParameter {
                name: "axis steps",
                value: steps as f64,
                requirement: "at least 2",
            });
        }
        Ok(Self {
            name: name.to_string(),
            min,
            max,
            steps,
            unit,
        })
    }

    pub fn value(&self, index: usize) -> f64 {
        debug_assert!(index < self.steps);
        self.min + (self.max - self.min) * index as f64 / (self.steps - 1) as f64
    }
}

/// Rectangular parameter grid for a surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
}

impl GridSpec {
    pub fn new(axis1: AxisSpec, axis2: AxisSpec) -> Self {
        Self { axis1, axis2 }
    }

    /// Default grids: 201x201 cells over d in [0, cap] x gamma_d in
    /// [0, 15000]; theta_d in (theta_p, 2.0] x gamma_d in [0, 15000]; budget
    /// in [0, 12000] x gamma_d in [0, 5000]. Ranges cover every interesting
    /// threshold of the baseline with margin and are flag-overridable.
    pub fn default_for(kind: SurfaceKind, s: &Scenario) -> Result<Self> {
        let (name1, name2) = kind.axis_names();
        Ok(match kind {
            SurfaceKind::DeductibleGamma => GridSpec::new(
                AxisSpec::new(name1, 0.0, s.sev.cap(), 201, AxisUnit::Currency)?,
                AxisSpec::new(name2, 0.0, 15_000.0, 201, AxisUnit::Currency)?,
            ),
            SurfaceKind::ThetaGamma => {
                // open at theta_p: start one uniform step above it
                let theta_p = s.parametric_pricing.loading();
                let hi = 2.0f64.max(theta_p * 2.0 + 0.1);
                let lo = theta_p + (hi - theta_p) / 201.0;
                GridSpec::new(
                    AxisSpec::new(name1, lo, hi, 201, AxisUnit::Dimensionless)?,
                    AxisSpec::new(name2, 0.0, 15_000.0, 201, AxisUnit::Currency)?,
                )
            }
            SurfaceKind::BudgetGamma => GridSpec::new(
                AxisSpec::new(name1, 0.0, 12_000.0, 201, AxisUnit::Currency)?,
                AxisSpec::new(name2, 0.0, 5_000.0, 201, AxisUnit::Currency)?,
            ),
        })
    }
}

/// One cell of a dominance surface. `delta_mv` is stored untruncated;
/// the positive-part view is an export concern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceCell {
    pub axis1_value: f64,
    pub axis2_value: f64,
    /// Parametric objective minus the comparison alternative.
    pub delta_mv: f64,
    /// The premium-matched payment hit the sum insured.
    pub capped: bool,
    /// Budget surfaces only: indemnity was not purchasable at all.
    pub indemnity_infeasible: bool,
    pub chosen: Choice,
}

/// Premium-matched parametric payment for the indemnity contract at `d`.
pub fn premium_matched_k(s: &Scenario, deductible: f64) -> Result<MatchedPayment> {
    let target = pricing::indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, deductible)?;
    let raw = (target / (1.0 + s.parametric_pricing.loading()) - s.parametric_pricing.fixed_cost())
        / s.freq.mean();
    if raw < 0.0 {
        return Ok(MatchedPayment {
            k: 0.0,
            capped: false,
            floored: true,
        });
    }
    let cap = s.sev.cap();
    Ok(MatchedPayment {
        k: raw.min(cap),
        capped: raw > cap,
        floored: false,
    })
}

/// Indemnity fixed cost `gamma_d` at which the agent is indifferent between
/// the two covers, searched on `[0, 50000]` to 1e-4 currency units.
///
/// The indemnity side sits at its optimal deductible (invariant to
/// `gamma_d`); the parametric side uses its own optimum (`OptimalBoth`) or
/// the payment premium-matched to the indemnity premium (`PremiumMatched`).
pub fn indifference_gamma(s: &Scenario, mode: IndifferenceMode) -> Result<RootReport> {
    let d_star = objective::deductible_optimum(s)?.parameter;
    let parametric_mv = objective::parametric_optimum(s)?.mv_value;
    let difference = |gamma: f64| -> Result<f64> {
        let shifted = s.with_indemnity_fixed_cost(gamma)?;
        let indemnity_mv = objective::mv_indemnity(&shifted, d_star)?;
        let parametric_mv = match mode {
            IndifferenceMode::OptimalBoth => parametric_mv,
            IndifferenceMode::PremiumMatched => {
                let matched = premium_matched_k(&shifted, d_star)?;
                objective::mv_parametric(&shifted, matched.k)?
            }
        };
        Ok(parametric_mv - indemnity_mv)
    };
    root::solve_bracketed(difference, 0.0, GAMMA_BRACKET_HI, GAMMA_TOL, ROOT_MAX_ITER)
}

/// Indemnity loading `theta_d` at which the agent is indifferent between the
/// two covers, with the indemnity evaluated at `d*(theta_d)`.
///
/// The search runs over `(theta_p, 2 beta cap]`, the loadings for which the
/// optimal deductible stays at or below the sum insured, to 1e-6.
pub fn indifference_theta(s: &Scenario, mode: IndifferenceMode) -> Result<RootReport> {
    let beta = s.prefs.risk_aversion();
    let theta_lo = s.parametric_pricing.loading() + 1e-6;
    let mut theta_hi = 2.0 * beta * s.sev.cap();
    if theta_hi <= theta_lo {
        return Err(Error::InvalidParameter {
            name: "loading bracket",
            value: theta_hi,
            requirement: "2*beta*cap above the parametric loading",
        });
    }
    let parametric_mv = objective::parametric_optimum(s)?.mv_value;
    let difference = |theta: f64| -> Result<f64> {
        let shifted = s.with_indemnity_loading(theta)?;
        let d_star = objective::deductible_optimum(&shifted)?.parameter;
        let indemnity_mv = objective::mv_indemnity(&shifted, d_star)?;
        let parametric_mv = match mode {
            IndifferenceMode::OptimalBoth => parametric_mv,
            IndifferenceMode::PremiumMatched => {
                let matched = premium_matched_k(&shifted, d_star)?;
                objective::mv_parametric(&shifted, matched.k)?
            }
        };
        Ok(parametric_mv - indemnity_mv)
    };
    // At theta_hi with zero fixed costs both contracts degenerate and the
    // difference is exactly zero; back off the endpoint until it is
    // informative so the bracketed solve sees the interior crossing.
    let mut shrink = 0;
    while difference(theta_hi)? == 0.0 && shrink < 20 {
        theta_hi = theta_lo + 0.99 * (theta_hi - theta_lo);
        shrink += 1;
    }
    root::solve_bracketed(difference, theta_lo, theta_hi, THETA_TOL, ROOT_MAX_ITER)
}

/// Best parametric choice within a premium budget. The agent may always
/// stay uninsured; concavity of the objective makes the best affordable
/// payment `min{k*, inverted budget, cap}`.
pub fn budget_constrained_parametric(s: &Scenario, budget: f64) -> Result<BudgetOutcome> {
    check_budget(budget)?;
    let uninsured_mv = objective::mv_no_insurance(s);
    if budget < s.parametric_pricing.premium_floor() {
        return Ok(no_insurance_outcome(uninsured_mv, false, false));
    }
    let affordable = pricing::invert_parametric_premium(&s.freq, &s.parametric_pricing, budget)?;
    let optimum = objective::parametric_optimum(s)?;
    let k = optimum.parameter.min(affordable).min(s.sev.cap());
    let mv = objective::mv_parametric(s, k)?;
    match compare(mv, uninsured_mv) {
        Comparison::FirstWins => Ok(BudgetOutcome {
            choice: Choice::Parametric,
            parameter: Some(k),
            mv,
            spent: pricing::parametric_premium(&s.freq, &s.parametric_pricing, k)?,
            tied: false,
            infeasible: false,
        }),
        Comparison::SecondWins => Ok(no_insurance_outcome(uninsured_mv, false, false)),
        Comparison::Tie => Ok(no_insurance_outcome(uninsured_mv, true, false)),
    }
}

/// Best indemnity choice within a premium budget. Below the premium floor
/// `(1+theta_d) gamma_d` the contract is infeasible outright; otherwise the
/// smallest affordable deductible bounds the choice from below and the
/// unimodal objective puts the optimum at `max{d*, inverted budget}`.
pub fn budget_constrained_indemnity(s: &Scenario, budget: f64) -> Result<BudgetOutcome> {
    check_budget(budget)?;
    let uninsured_mv = objective::mv_no_insurance(s);
    if budget < s.indemnity_pricing.premium_floor() {
        return Ok(no_insurance_outcome(uninsured_mv, false, true));
    }
    let inversion =
        pricing::invert_indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, budget)?;
    let optimum = objective::deductible_optimum(s)?;
    let d = optimum.parameter.max(inversion.deductible).min(s.sev.cap());
    let mv = objective::mv_indemnity(s, d)?;
    match compare(mv, uninsured_mv) {
        Comparison::FirstWins => Ok(BudgetOutcome {
            choice: Choice::Indemnity,
            parameter: Some(d),
            mv,
            spent: pricing::indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, d)?,
            tied: false,
            infeasible: false,
        }),
        Comparison::SecondWins => Ok(no_insurance_outcome(uninsured_mv, false, false)),
        Comparison::Tie => Ok(no_insurance_outcome(uninsured_mv, true, false)),
    }
}

/// Overall action implied by the two budget outcomes. When both reduce to
/// staying uninsured that is the answer; otherwise the higher objective wins
/// and equality within tolerance reports a tie.
pub fn budget_choice(parametric: &BudgetOutcome, indemnity: &BudgetOutcome) -> Choice {
    if parametric.choice == Choice::NoInsurance && indemnity.choice == Choice::NoInsurance {
        return Choice::NoInsurance;
    }
    match compare(parametric.mv, indemnity.mv) {
        Comparison::FirstWins => Choice::Parametric,
        Comparison::SecondWins => Choice::Indemnity,
        Comparison::Tie => Choice::Tie,
    }
}

/// Incremental welfare of parametric cover at the given budget:
/// `MV_parametric_budget - MV_indemnity_budget`.
pub fn delta_mv_budget(s: &Scenario, budget: f64) -> Result<f64> {
    let p = budget_constrained_parametric(s, budget)?;
    let d = budget_constrained_indemnity(s, budget)?;
    Ok(p.mv - d.mv)
}

/// Locate the budget at which [`delta_mv_budget`] changes sign on
/// `[lo, hi]`, scanning `scan_steps` panels for a bracket and bisecting to
/// 1e-4. `Ok(None)` when the sweep never changes sign.
pub fn find_budget_crossing(
    s: &Scenario,
    lo: f64,
    hi: f64,
    scan_steps: usize,
) -> Result<Option<RootReport>> {
    check_budget(lo)?;
    if !(hi.is_finite() && hi > lo) || scan_steps < 2 {
        return Err(Error::InvalidParameter {
            name: "crossing sweep",
            value: hi,
            requirement: "a finite range with at least 2 panels",
        });
    }
    let step = (hi - lo) / scan_steps as f64;
    let mut prev = (lo, delta_mv_budget(s, lo)?);
    for i in 1..=scan_steps {
        let b = lo + i as f64 * step;
        let val = delta_mv_budget(s, b)?;
        if prev.1 != 0.0 && val != 0.0 && prev.1.signum() != val.signum() {
            let report = root::solve_bracketed(
                |x| delta_mv_budget(s, x),
                prev.0,
                b,
                GAMMA_TOL,
                ROOT_MAX_ITER,
            )?;
            return Ok(Some(report));
        }
        if val != 0.0 {
            prev = (b, val);
        }
    }
    Ok(None)
}

/// Evaluate a dominance surface cell by cell, row-major in
/// (axis1 index, axis2 index).
pub fn surface(s: &Scenario, grid: &GridSpec, kind: SurfaceKind) -> Result<Vec<SurfaceCell>> {
    let (expected1, expected2) = kind.axis_names();
    if grid.axis1.name != expected1 || grid.axis2.name != expected2 {
        return Err(Error::AxisMismatch {
            axis1: grid.axis1.name.clone(),
            axis2: grid.axis2.name.clone(),
            expected1,
            expected2,
        });
    }
    let mut cells = Vec::with_capacity(grid.axis1.steps * grid.axis2.steps);
    for i in 0..grid.axis1.steps {
        let a1 = grid.axis1.value(i);
        for j in 0..grid.axis2.steps {
            let a2 = grid.axis2.value(j);
            cells.push(surface_cell(s, kind, a1, a2)?);
        }
    }
    Ok(cells)
}

fn surface_cell(s: &Scenario, kind: SurfaceKind, a1: f64, a2: f64) -> Result<SurfaceCell> {
    match kind {
        SurfaceKind::DeductibleGamma => {
            let shifted = s.with_indemnity_fixed_cost(a2)?;
            matched_cell(&shifted, a1, a1, a2)
        }
        SurfaceKind::ThetaGamma => {
            let shifted = s
                .with_indemnity_loading(a1)?
                .with_indemnity_fixed_cost(a2)?;
            let d_star = objective::deductible_optimum(&shifted)?.parameter;
            matched_cell(&shifted, d_star, a1, a2)
        }
        SurfaceKind::BudgetGamma => {
            let shifted = s.with_indemnity_fixed_cost(a2)?;
            let p = budget_constrained_parametric(&shifted, a1)?;
            let d = budget_constrained_indemnity(&shifted, a1)?;
            let chosen = budget_choice(&p, &d);
            Ok(SurfaceCell {
                axis1_value: a1,
                axis2_value: a2,
                delta_mv: p.mv - d.mv,
                capped: p.parameter.is_some_and(|k| k >= shifted.sev.cap()),
                indemnity_infeasible: d.infeasible,
                chosen,
            })
        }
    }
}

fn matched_cell(shifted: &Scenario, deductible: f64, a1: f64, a2: f64) -> Result<SurfaceCell> {
    let matched = premium_matched_k(shifted, deductible)?;
    let mv_p = objective::mv_parametric(shifted, matched.k)?;
    let mv_d = objective::mv_indemnity(shifted, deductible)?;
    let chosen = match compare(mv_p, mv_d) {
        Comparison::FirstWins => Choice::Parametric,
        Comparison::SecondWins => Choice::Indemnity,
        Comparison::Tie => Choice::Tie,
    };
    Ok(SurfaceCell {
        axis1_value: a1,
        axis2_value: a2,
        delta_mv: mv_p - mv_d,
        capped: matched.capped,
        indemnity_infeasible: false,
        chosen,
    })
}

/// Write cells as delimited text with the fixed header
/// `axis1,axis2,delta_mv,capped,indemnity_infeasible,chosen`.
/// Currency values round to 2 decimals at export; dimensionless axes keep 6.
/// With `truncate_zero` the positive part of `delta_mv` is written.
pub fn write_surface_csv<W: Write>(
    out: &mut W,
    grid: &GridSpec,
    cells: &[SurfaceCell],
    truncate_zero: bool,
) -> io::Result<()> {
    writeln!(
        out,
        "axis1,axis2,delta_mv,capped,indemnity_infeasible,chosen"
    )?;
    for cell in cells {
        let delta = if truncate_zero {
            cell.delta_mv.max(0.0)
        } else {
            cell.delta_mv
        };
        writeln!(
            out,
            "{},{},{delta:.2},{},{},{}",
            format_axis(cell.axis1_value, grid.axis1.unit),
            format_axis(cell.axis2_value, grid.axis2.unit),
            cell.capped,
            cell.indemnity_infeasible,
            cell.chosen.as_str()
        )?;
    }
    Ok(())
}

fn format_axis(value: f64, unit: AxisUnit) -> String {
    match unit {
        AxisUnit::Currency => format!("{value:.2}"),
        AxisUnit::Dimensionless => format!("{value:.6}"),
    }
}

enum Comparison {
    FirstWins,
    SecondWins,
    Tie,
}

fn compare(a: f64, b: f64) -> Comparison {
    let tol = TIE_REL_TOL * a.abs().max(b.abs()).max(1.0);
    if (a - b).abs() <= tol {
        Comparison::Tie
    } else if a > b {
        Comparison::FirstWins
    } else {
        Comparison::SecondWins
    }
}

fn no_insurance_outcome(mv: f64, tied: bool, infeasible: bool) -> BudgetOutcome {
    BudgetOutcome {
        choice: Choice::NoInsurance,
        parameter: None,
        mv,
        spent: 0.0,
        tied,
        infeasible,
    }
}

fn check_budget(budget: f64) -> Result<()> {
    if budget.is_finite() && budget >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "budget",
            value: budget,
            lo: 0.0,
            hi: f64::INFINITY,
        })
    }
}
