//! Size reports, cross-method comparison and the enumeration oracle.
//!
//! Functions here take a scenario as loaded and retarget it per method
//! ([`scenario_for`]), so one directory drives all three formulations.

mod compare;
mod oracle;
mod size;
mod table;

use plan_lp::{solve, Mode, Solution, SolveOptions};

use crate::error::{AnalysisError, BuildError, ScenarioError};
use crate::formulation::{build, reference_weights, BuildOutput, CollapsePolicy, MethodKind, PolicyKind};
use crate::scenario::{InvestmentMethod, Scenario};

pub use compare::{compare_methods, ComparisonReport, Gap, MethodOutcome, EQUIVALENCE_TOL};
pub use oracle::{evaluate_assignment, oracle_solve, OracleOptions, OracleResult, ORACLE_DECISION_LIMIT};
pub use size::{size_report, Count, SizeReport};
pub use table::Table;

pub const SCHEMA_VERSION: u32 = 1;

/// `scenario` with every investable asset switched to the accounting `method` needs.
pub fn scenario_for(scenario: &Scenario, method: MethodKind) -> Result<Scenario, ScenarioError> {
    scenario.with_investment_method(match method {
        MethodKind::Simple => InvestmentMethod::Simple,
        MethodKind::Vintage | MethodKind::Compact => InvestmentMethod::Compact,
    })
}

/// Materializes a policy; weighted policies run the reference vintage solve.
pub fn policy_for(scenario: &Scenario, kind: PolicyKind) -> Result<CollapsePolicy, BuildError> {
    match kind {
        PolicyKind::Weighted => Ok(CollapsePolicy::Weighted(reference_weights(&scenario_for(scenario, MethodKind::Vintage)?)?)),
        other => CollapsePolicy::from_kind(other),
    }
}

pub fn solve_options(mode: Mode) -> SolveOptions {
    SolveOptions { mode, ..SolveOptions::default() }
}

/// A built and solved method.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: MethodKind,
    pub build: BuildOutput,
    pub solution: Solution,
}

/// Retargets, builds and solves one method.
pub fn run_method(scenario: &Scenario, method: MethodKind, policy: &CollapsePolicy, mode: Mode) -> Result<MethodRun, AnalysisError> {
    let target = scenario_for(scenario, method).map_err(BuildError::from)?;
    let build = build(&target, method, policy)?;
    let solution = solve(&build.model, &solve_options(mode))?;
    Ok(MethodRun { method, build, solution })
}

#[cfg(test)]
mod tests;
