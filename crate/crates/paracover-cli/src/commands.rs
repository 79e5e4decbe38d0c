//! The five subcommands. Reports print as `key: value` lines, currency
//! rounded to 2 decimals at the output boundary only; `--out` writes a JSON
//! object (reports) or the CSV table (surfaces, sweeps).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use paracover::comparison::{
    self, budget_choice, AxisSpec, AxisUnit, BudgetOutcome, GridSpec, IndifferenceMode, SurfaceKind,
};
use paracover::objective::{self, ContractOptimum, DualityGap, Scenario};
use paracover::oracle::{self, Design, MCEstimate, SimulationConfig};

use crate::{CliError, TargetArg};

#[derive(Serialize)]
struct OptimizeReport {
    count_law: &'static str,
    deductible: ContractOptimum,
    parametric: ContractOptimum,
    mv_no_insurance: f64,
    duality: DualityGap,
}

pub fn optimize(s: &Scenario, out: Option<&Path>) -> Result<(), CliError> {
    let deductible = objective::deductible_optimum(s)?;
    let parametric = objective::parametric_optimum(s)?;
    let mv0 = objective::mv_no_insurance(s);
    let duality = objective::duality_gap(s)?;
    let count_law = if s.freq.is_poisson() {
        "poisson"
    } else {
        "general"
    };

    println!("count_law: {count_law}");
    println!(
        "deductible_optimum: d = {:.2}{}, premium = {:.2}, mv = {:.2}",
        deductible.parameter,
        clamp_note(deductible.clamped),
        deductible.premium,
        deductible.mv_value
    );
    println!(
        "parametric_optimum: k = {:.2}{}, premium = {:.2}, mv = {:.2}",
        parametric.parameter,
        clamp_note(parametric.clamped),
        parametric.premium,
        parametric.mv_value
    );
    println!("mv_no_insurance: {mv0:.2}");
    println!(
        "duality_gap: {:.6e} (identity_expected: {})",
        duality.gap, duality.identity_expected
    );

    write_json(
        out,
        &OptimizeReport {
            count_law,
            deductible,
            parametric,
            mv_no_insurance: mv0,
            duality,
        },
    )
}

#[derive(Serialize)]
struct IndifferenceReport {
    target: &'static str,
    mode: &'static str,
    root: f64,
    bracket: (f64, f64),
    iterations: usize,
    residual: f64,
}

pub fn indifference(
    s: &Scenario,
    target: TargetArg,
    mode: IndifferenceMode,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (name, report) = match target {
        TargetArg::Gamma => ("gamma_d", comparison::indifference_gamma(s, mode)?),
        TargetArg::Theta => ("theta_d", comparison::indifference_theta(s, mode)?),
    };
    let mode_name = match mode {
        IndifferenceMode::OptimalBoth => "optimal",
        IndifferenceMode::PremiumMatched => "matched",
    };
    println!("target: {name}");
    println!("mode: {mode_name}");
    match target {
        TargetArg::Gamma => println!("root: {:.2}", report.root),
        TargetArg::Theta => println!("root: {:.6}", report.root),
    }
    println!(
        "bracket: [{:.6}, {:.6}]",
        report.bracket.0, report.bracket.1
    );
    println!("iterations: {}", report.iterations);
    println!("residual: {:.6e}", report.residual);

    write_json(
        out,
        &IndifferenceReport {
            target: name,
            mode: mode_name,
            root: report.root,
            bracket: report.bracket,
            iterations: report.iterations,
            residual: report.residual,
        },
    )
}

pub fn surface(
    s: &Scenario,
    kind: SurfaceKind,
    grid_spec: Option<&str>,
    truncate_zero: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let grid = match grid_spec {
        Some(spec) => parse_grid(spec, kind)?,
        None => GridSpec::default_for(kind, s)?,
    };
    let cells = comparison::surface(s, &grid, kind)?;
    let mut buf = Vec::new();
    comparison::write_surface_csv(&mut buf, &grid, &cells, truncate_zero)?;
    match out {
        Some(path) => fs::write(path, buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

/// `a1min:a1max:a1steps,a2min:a2max:a2steps`
fn parse_grid(spec: &str, kind: SurfaceKind) -> Result<GridSpec, CliError> {
    let (name1, name2) = kind.axis_names();
    let unit1 = match kind {
        SurfaceKind::ThetaGamma => AxisUnit::Dimensionless,
        _ => AxisUnit::Currency,
    };
    let mut axes = spec.split(',');
    let axis1 = parse_axis(axes.next(), name1, unit1)?;
    let axis2 = parse_axis(axes.next(), name2, AxisUnit::Currency)?;
    if axes.next().is_some() {
        return Err(CliError::Parse(format!(
            "--grid expects two axes, got \"{spec}\""
        )));
    }
    Ok(GridSpec::new(axis1, axis2))
}

fn parse_axis(part: Option<&str>, name: &str, unit: AxisUnit) -> Result<AxisSpec, CliError> {
    let part = part.ok_or_else(|| {
        CliError::Parse("--grid expects a1min:a1max:a1steps,a2min:a2max:a2steps".into())
    })?;
    let fields: Vec<&str> = part.split(':').collect();
    if fields.len() != 3 {
        return Err(CliError::Parse(format!(
            "axis \"{part}\" must be min:max:steps"
        )));
    }
    let min: f64 = fields[0]
        .parse()
        .map_err(|_| CliError::Parse(format!("axis min \"{}\" is not a number", fields[0])))?;
    let max: f64 = fields[1]
        .parse()
        .map_err(|_| CliError::Parse(format!("axis max \"{}\" is not a number", fields[1])))?;
    let steps: usize = fields[2]
        .parse()
        .map_err(|_| CliError::Parse(format!("axis steps \"{}\" is not a count", fields[2])))?;
    Ok(AxisSpec::new(name, min, max, steps, unit)?)
}

#[derive(Serialize)]
struct BudgetReport {
    budget: f64,
    chosen: &'static str,
    parametric: BudgetOutcome,
    indemnity: BudgetOutcome,
    mv_no_insurance: f64,
    delta_mv: f64,
}

pub fn budget_single(s: &Scenario, budget: f64, out: Option<&Path>) -> Result<(), CliError> {
    let parametric = comparison::budget_constrained_parametric(s, budget)?;
    let indemnity = comparison::budget_constrained_indemnity(s, budget)?;
    let chosen = budget_choice(&parametric, &indemnity).as_str();
    let mv0 = objective::mv_no_insurance(s);

    println!("budget: {budget:.2}");
    println!("chosen: {chosen}");
    print_outcome("parametric", &parametric);
    print_outcome("indemnity", &indemnity);
    println!("mv_no_insurance: {mv0:.2}");
    println!("delta_mv: {:.6}", parametric.mv - indemnity.mv);

    write_json(
        out,
        &BudgetReport {
            budget,
            chosen,
            parametric,
            indemnity,
            mv_no_insurance: mv0,
            delta_mv: parametric.mv - indemnity.mv,
        },
    )
}

fn print_outcome(label: &str, outcome: &BudgetOutcome) {
    let parameter = outcome
        .parameter
        .map(|p| format!("{p:.2}"))
        .unwrap_or_else(|| "none".into());
    println!(
        "{label}: choice = {}{}{}, parameter = {parameter}, spent = {:.2}, mv = {:.2}",
        outcome.choice.as_str(),
        if outcome.tied { " (tie)" } else { "" },
        if outcome.infeasible {
            " (infeasible)"
        } else {
            ""
        },
        outcome.spent,
        outcome.mv
    );
}

pub fn budget_sweep(s: &Scenario, spec: &str, out: Option<&Path>) -> Result<(), CliError> {
    let fields: Vec<&str> = spec.split(':').collect();
    if fields.len() != 3 {
        return Err(CliError::Parse(format!(
            "--sweep \"{spec}\" must be min:max:steps"
        )));
    }
    let min: f64 = fields[0]
        .parse()
        .map_err(|_| CliError::Parse(format!("sweep min \"{}\" is not a number", fields[0])))?;
    let max: f64 = fields[1]
        .parse()
        .map_err(|_| CliError::Parse(format!("sweep max \"{}\" is not a number", fields[1])))?;
    let steps: usize = fields[2]
        .parse()
        .map_err(|_| CliError::Parse(format!("sweep steps \"{}\" is not a count", fields[2])))?;
    if !(min.is_finite() && max.is_finite() && min < max) || steps < 2 {
        return Err(CliError::Parse(format!(
            "--sweep \"{spec}\" needs min < max and at least 2 steps"
        )));
    }

    // affordability landmarks
    println!("p_d_min: {:.2}", s.indemnity_pricing.premium_floor());
    println!(
        "indemnity_optimum_affordable_at: {:.2}",
        objective::deductible_optimum(s)?.premium
    );
    println!(
        "parametric_optimum_affordable_at: {:.2}",
        objective::parametric_optimum(s)?.premium
    );
    match comparison::find_budget_crossing(s, min, max, (steps * 4).max(400))? {
        Some(crossing) => println!("indifference_budget: {:.2}", crossing.root),
        None => println!("indifference_budget: none on [{min:.2}, {max:.2}]"),
    }

    let mut buf = Vec::new();
    writeln!(
        buf,
        "budget,chosen,parametric_parameter,parametric_spent,parametric_mv,\
         indemnity_parameter,indemnity_spent,indemnity_mv,no_insurance_mv,delta_mv"
    )?;
    let mv0 = objective::mv_no_insurance(s);
    for i in 0..steps {
        let budget = min + (max - min) * i as f64 / (steps - 1) as f64;
        let p = comparison::budget_constrained_parametric(s, budget)?;
        let d = comparison::budget_constrained_indemnity(s, budget)?;
        writeln!(
            buf,
            "{budget:.2},{},{},{:.2},{:.2},{},{:.2},{:.2},{mv0:.2},{:.2}",
            budget_choice(&p, &d).as_str(),
            format_parameter(&p),
            p.spent,
            p.mv,
            format_parameter(&d),
            d.spent,
            d.mv,
            p.mv - d.mv
        )?;
    }
    match out {
        Some(path) => fs::write(path, buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn format_parameter(outcome: &BudgetOutcome) -> String {
    outcome
        .parameter
        .map(|p| format!("{p:.2}"))
        .unwrap_or_default()
}

#[derive(Serialize)]
struct SimulateReport {
    design: String,
    years: u64,
    seed: u64,
    estimate: MCEstimate,
    closed_form_mv: f64,
    z_score: Option<f64>,
}

pub fn simulate(
    s: &Scenario,
    design_spec: &str,
    years: u64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let design = parse_design(design_spec)?;
    let cfg = SimulationConfig::new(years, seed)?;
    let estimate = oracle::simulate_wealth(s, design, &cfg)?;
    let closed = match design {
        Design::None => objective::mv_no_insurance(s),
        Design::Indemnity(d) => objective::mv_indemnity(s, d)?,
        Design::Parametric(k) => objective::mv_parametric(s, k)?,
    };
    let z = (estimate.std_error_mv > 0.0).then(|| (estimate.mv - closed) / estimate.std_error_mv);

    println!("design: {design_spec}");
    println!("years: {years}");
    println!("seed: {seed}");
    println!("mean: {:.6}", estimate.mean);
    println!("variance: {:.6}", estimate.variance);
    println!("mv: {:.6}", estimate.mv);
    println!("std_error_mean: {:.6}", estimate.std_error_mean);
    println!("std_error_mv: {:.6}", estimate.std_error_mv);
    println!("closed_form_mv: {closed:.6}");
    match z {
        Some(z) => println!("z_score: {z:.3}"),
        None => println!("z_score: n/a"),
    }

    write_json(
        out,
        &SimulateReport {
            design: design_spec.to_string(),
            years,
            seed,
            estimate,
            closed_form_mv: closed,
            z_score: z,
        },
    )
}

fn parse_design(spec: &str) -> Result<Design, CliError> {
    if spec == "none" {
        return Ok(Design::None);
    }
    let bad = || {
        CliError::Parse(format!(
            "--design \"{spec}\" must be none, indemnity:D, or parametric:K"
        ))
    };
    let (kind, value) = spec.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.parse().map_err(|_| bad())?;
    match kind {
        "indemnity" => Ok(Design::Indemnity(value)),
        "parametric" => Ok(Design::Parametric(value)),
        _ => Err(bad()),
    }
}

fn clamp_note(clamped: bool) -> &'static str {
    if clamped {
        " (clamped)"
    } else {
        " (interior)"
    }
}

fn write_json<T: Serialize>(out: Option<&Path>, report: &T) -> Result<(), CliError> {
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(report)
            .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
        fs::write(path, json)?;
    }
    Ok(())
}
