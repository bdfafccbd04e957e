use std::collections::BTreeMap;

use super::builder::{Accounting, Builder};
use super::{BuildOutput, MethodKind};
use crate::error::BuildError;
use crate::scenario::{InvestmentMethod, Scenario};

/// Simple-method model: one available-units variable per asset and year.
///
/// Fails with [`BuildError::WrongMethod`] if any asset uses compact investment.
pub fn build_simple(scenario: &Scenario) -> Result<BuildOutput, BuildError> {
    if let Some(a) = scenario.assets().iter().find(|a| a.investment_method == InvestmentMethod::Compact) {
        return Err(BuildError::WrongMethod { asset: a.name.clone(), found: a.investment_method.to_string(), method: "simple" });
    }
    let mut b = Builder::new(scenario, Accounting::Simple);
    b.add_unit_variables()?;
    b.add_flow_variables()?;
    b.add_unit_rows()?;
    b.add_capacity_rows(&mut |_, _| unreachable!("no compact assets"), &mut |_, _, _| unreachable!("no vintage assets"))?;
    b.add_demand_rows()?;
    Ok(b.finish(MethodKind::Simple, None, BTreeMap::new()))
}
