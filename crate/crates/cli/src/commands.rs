use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use plan_core::analysis::{self, compare_methods, policy_for, size_report, SizeReport, SCHEMA_VERSION};
use plan_core::formulation::{build, CollapsePolicy, CostBreakdown, MethodKind, PolicyKind};
use plan_core::par::Execution;
use plan_core::{load_scenario, Scenario};
use plan_lp::{emit_lp, Mode, Status};
use serde::Serialize;

use crate::args::{CompareArgs, EmitArgs, Format, PolicyArg, SizeArgs, SolveArgs};

/// How a command finished; maps to the status line and exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Infeasible,
    /// Commands without a solve.
    Done,
}

/// Misuse of otherwise well-formed flags.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn load(dir: &Path) -> Result<Scenario> {
    load_scenario(dir).with_context(|| format!("loading scenario {}", dir.display()))
}

/// Rejects a policy on methods other than compact.
fn check_policy(policy: Option<PolicyArg>, has_compact: bool) -> Result<PolicyKind> {
    match policy {
        Some(_) if !has_compact => Err(UsageError("--policy only applies to the compact method".into()).into()),
        Some(p) => Ok(p.into()),
        None => Ok(PolicyKind::default()),
    }
}

fn resolve_policy(scenario: &Scenario, method: MethodKind, kind: PolicyKind) -> Result<CollapsePolicy> {
    if method != MethodKind::Compact {
        return Ok(CollapsePolicy::Operational);
    }
    Ok(policy_for(scenario, kind)?)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_lp(model: &plan_lp::LinearModel, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    emit_lp(model, path).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct SolutionDoc<'a> {
    schema: u32,
    scenario: String,
    method: MethodKind,
    policy: Option<PolicyKind>,
    mode: Mode,
    status: String,
    objective: Option<f64>,
    cost_breakdown: Option<CostBreakdown>,
    /// group -> variable name -> value
    variables: BTreeMap<&'a str, BTreeMap<String, f64>>,
}

fn outcome_of(status: Status) -> Result<Outcome> {
    match status {
        Status::Optimal => Ok(Outcome::Optimal),
        Status::Infeasible => Ok(Outcome::Infeasible),
        other => bail!("solver finished with status {other}"),
    }
}

pub fn solve(args: &SolveArgs) -> Result<Outcome> {
    let method: MethodKind = args.method.into();
    let kind = check_policy(args.policy, method == MethodKind::Compact)?;
    let scenario = load(&args.scenario)?;
    let policy = resolve_policy(&scenario, method, kind)?;
    let mode: Mode = args.mode.into();

    let target = analysis::scenario_for(&scenario, method)?;
    let built = build(&target, method, &policy)?;
    if let Some(path) = &args.emit_lp {
        write_lp(&built.model, path)?;
    }
    let solution = plan_lp::solve(&built.model, &analysis::solve_options(mode))?;
    let optimal = solution.is_optimal();
    let model = &built.model;

    let mut variables: BTreeMap<&str, BTreeMap<String, f64>> = BTreeMap::new();
    if optimal {
        for (i, var) in model.variables().iter().enumerate() {
            variables.entry(var.group.as_str()).or_default().insert(model.var_name(plan_lp::VarId(i)), solution.values[i]);
        }
    }
    let breakdown = optimal.then(|| CostBreakdown::of(model, &solution.values));
    let doc = SolutionDoc {
        schema: SCHEMA_VERSION,
        scenario: args.scenario.display().to_string(),
        method,
        policy: built.policy,
        mode,
        status: solution.status.to_string(),
        objective: optimal.then_some(solution.objective),
        cost_breakdown: breakdown,
        variables,
    };
    let mut json = serde_json::to_string_pretty(&doc)?;
    json.push('\n');
    let path = args.out.join("solution.json");
    write_file(&path, &json)?;

    match args.format {
        Format::Json => print!("{json}"),
        Format::Text => {
            match built.policy {
                Some(p) => println!("method: {method} (policy {p})"),
                None => println!("method: {method}"),
            }
            println!("mode: {}", if mode == Mode::Integer { "integer" } else { "continuous" });
            println!("status: {}", solution.status);
            if let Some(b) = breakdown {
                println!("objective: {}", solution.objective);
                println!("  investment: {}", b.investment);
                println!("  fixed: {}", b.fixed);
                println!("  variable: {}", b.variable);
            }
            println!("wrote {}", path.display());
        }
    }
    outcome_of(solution.status)
}

pub fn size(args: &SizeArgs) -> Result<Outcome> {
    let scenario = load(&args.scenario)?;
    let methods: Vec<MethodKind> = match args.method {
        Some(m) => vec![m.into()],
        None => MethodKind::ALL.to_vec(),
    };
    let reports = methods.iter().map(|&m| size_report(&scenario, m)).collect::<Result<Vec<_>, _>>()?;
    match args.format {
        Format::Json => print!("{}", SizeReport::render_json(&reports)),
        Format::Text => print!("{}", SizeReport::render_text(&reports)),
    }
    Ok(Outcome::Done)
}

pub fn compare(args: &CompareArgs) -> Result<Outcome> {
    let methods: Vec<MethodKind> = args.methods.iter().map(|&m| m.into()).collect();
    if methods.is_empty() {
        return Err(UsageError("--methods needs at least one method".into()).into());
    }
    let kind = check_policy(args.policy, methods.contains(&MethodKind::Compact))?;
    let scenario = load(&args.scenario)?;
    let report = compare_methods(&scenario, &methods, kind, args.mode.into(), Execution::default())?;
    let json = report.render_json();
    let path = args.out.join("comparison.json");
    write_file(&path, &json)?;
    match args.format {
        Format::Json => print!("{json}"),
        Format::Text => {
            print!("{}", report.render_text());
            println!("wrote {}", path.display());
        }
    }
    if let Some(failed) = report.outcomes.iter().find(|o| o.error.is_some()) {
        bail!("{} failed: {}", failed.method, failed.error.as_deref().unwrap_or("unknown error"));
    }
    // gaps are findings, not errors
    if report.outcomes.iter().all(|o| o.objective.is_some()) {
        Ok(Outcome::Optimal)
    } else if report.outcomes.iter().all(|o| o.status == "optimal" || o.status == "infeasible") {
        Ok(Outcome::Infeasible)
    } else {
        bail!("a method finished without an optimal or infeasible status")
    }
}

pub fn emit(args: &EmitArgs) -> Result<Outcome> {
    let method: MethodKind = args.method.into();
    let kind = check_policy(args.policy, method == MethodKind::Compact)?;
    let scenario = load(&args.scenario)?;
    let policy = resolve_policy(&scenario, method, kind)?;
    let target = analysis::scenario_for(&scenario, method)?;
    let built = build(&target, method, &policy)?;
    write_lp(&built.model, &args.out)?;
    println!(
        "wrote {} ({} variables, {} constraints)",
        args.out.display(),
        built.model.num_variables(),
        built.model.num_constraints()
    );
    Ok(Outcome::Done)
}
