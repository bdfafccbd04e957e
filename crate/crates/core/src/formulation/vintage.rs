use std::collections::{BTreeMap, BTreeSet};

use log::warn;

use super::builder::{Accounting, Builder};
use super::{BuildOutput, MethodKind};
use crate::error::BuildError;
use crate::scenario::{AssetId, Scenario, Year};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VintageOptions {
    /// Use the vintage-less profile for vintages without one (with a warning).
    pub allow_profile_fallback: bool,
}

impl Default for VintageOptions {
    fn default() -> Self {
        VintageOptions { allow_profile_fallback: true }
    }
}

/// Vintage-method model: units, production and capacity rows per
/// (operational year, vintage) for every compact asset.
pub fn build_vintage(scenario: &Scenario, options: &VintageOptions) -> Result<BuildOutput, BuildError> {
    let mut warned: BTreeSet<(AssetId, Year)> = BTreeSet::new();
    let mut b = Builder::new(scenario, Accounting::Vintage);
    b.add_unit_variables()?;
    b.add_flow_variables()?;
    b.add_unit_rows()?;
    b.add_capacity_rows(&mut |_, _| unreachable!("compact accounting is not used by vintage builds"), &mut |a, v, slot| {
        if let Some(p) = scenario.vintage_profile(a, v, slot) {
            return Ok(p);
        }
        let name = &scenario.asset(a).name;
        if !options.allow_profile_fallback {
            return Err(BuildError::MissingVintageProfile { asset: name.clone(), vintage: v.0 });
        }
        if warned.insert((a, v)) {
            warn!("asset {name}, vintage {v}: no vintage profile, using the operational-year profile");
        }
        scenario.profile(a, slot).ok_or_else(|| BuildError::MissingProfile { asset: name.clone(), slot: scenario.describe_slot(slot) })
    })?;
    b.add_demand_rows()?;
    Ok(b.finish(MethodKind::Vintage, None, BTreeMap::new()))
}
