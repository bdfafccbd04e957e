use std::collections::BTreeMap;

use log::warn;
use plan_lp::{solve, SolveOptions};

use super::builder::{Accounting, Builder};
use super::vintage::{build_vintage, VintageOptions};
use super::{collapse_profile, BuildOutput, CollapsePolicy, MethodKind, VintageWeights};
use crate::error::BuildError;
use crate::scenario::{InvestmentMethod, Scenario};

/// Compact-method model: per-vintage unit accounting, one capacity row per
/// asset and slot using the profile chosen by `policy`.
pub fn build_compact(scenario: &Scenario, policy: &CollapsePolicy) -> Result<BuildOutput, BuildError> {
    if !scenario.assets().iter().any(|a| a.investment_method == InvestmentMethod::Compact) {
        warn!("compact build on a scenario without compact assets; the model equals the simple one");
    }
    let mut collapsed = BTreeMap::new();
    let mut b = Builder::new(scenario, Accounting::Compact);
    b.add_unit_variables()?;
    b.add_flow_variables()?;
    b.add_unit_rows()?;
    b.add_capacity_rows(
        &mut |a, slot| {
            let p = collapse_profile(scenario, a, slot, policy)?;
            collapsed.insert((a, slot), p);
            Ok(p)
        },
        &mut |_, _, _| unreachable!("vintage accounting is not used by compact builds"),
    )?;
    b.add_demand_rows()?;
    Ok(b.finish(MethodKind::Compact, Some(policy.kind()), collapsed))
}

/// Weights for [`CollapsePolicy::Weighted`]: available units of the
/// continuous vintage-method optimum.
pub fn reference_weights(scenario: &Scenario) -> Result<VintageWeights, BuildError> {
    let built = build_vintage(scenario, &VintageOptions::default())?;
    let sol = solve(&built.model, &SolveOptions::continuous()).map_err(|_| BuildError::MissingReferenceSolve)?;
    if !sol.is_optimal() {
        return Err(BuildError::MissingReferenceSolve);
    }
    Ok(VintageWeights(built.vars.available_by_vintage.iter().map(|(&k, &id)| (k, sol.value(id))).collect()))
}
