use std::collections::BTreeMap;

use super::PolicyKind;
use crate::error::BuildError;
use crate::scenario::{AssetId, Scenario, Slot, Year};

/// Available units per `(asset, y, v)` from a reference solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VintageWeights(pub BTreeMap<(AssetId, Year, Year), f64>);

/// Rule mapping vintage-specific profiles to one profile per asset and slot.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CollapsePolicy {
    #[default]
    Operational,
    Min,
    Mean,
    Max,
    Weighted(VintageWeights),
}

impl CollapsePolicy {
    pub fn kind(&self) -> PolicyKind {
        match self {
            CollapsePolicy::Operational => PolicyKind::Operational,
            CollapsePolicy::Min => PolicyKind::Min,
            CollapsePolicy::Mean => PolicyKind::Mean,
            CollapsePolicy::Max => PolicyKind::Max,
            CollapsePolicy::Weighted(_) => PolicyKind::Weighted,
        }
    }

    /// The policy for a kind that needs no data. `Weighted` needs
    /// [`super::reference_weights`] and yields
    /// [`BuildError::MissingReferenceSolve`] here.
    pub fn from_kind(kind: PolicyKind) -> Result<CollapsePolicy, BuildError> {
        Ok(match kind {
            PolicyKind::Operational => CollapsePolicy::Operational,
            PolicyKind::Min => CollapsePolicy::Min,
            PolicyKind::Mean => CollapsePolicy::Mean,
            PolicyKind::Max => CollapsePolicy::Max,
            PolicyKind::Weighted => return Err(BuildError::MissingReferenceSolve),
        })
    }
}

/// The single availability value the compact capacity row uses for `asset` in `slot`.
///
/// Assets without vintage profiles always use the vintage-less profile. Vintages
/// active in the slot's year but lacking a profile of their own fall back to it too.
pub fn collapse_profile(scenario: &Scenario, asset: AssetId, slot: Slot, policy: &CollapsePolicy) -> Result<f64, BuildError> {
    let base = scenario.profile(asset, slot).ok_or_else(|| BuildError::MissingProfile {
        asset: scenario.asset(asset).name.clone(),
        slot: scenario.describe_slot(slot),
    })?;
    if !scenario.has_any_vintage_profile(asset) || matches!(policy, CollapsePolicy::Operational) {
        return Ok(base);
    }
    let values: Vec<(Year, f64)> = scenario
        .domain(asset)
        .vintages_in(slot.year)
        .map(|v| (v, scenario.vintage_profile(asset, v, slot).unwrap_or(base)))
        .collect();
    if values.is_empty() {
        return Ok(base);
    }
    let mean = || values.iter().map(|(_, p)| p).sum::<f64>() / values.len() as f64;
    Ok(match policy {
        CollapsePolicy::Operational => base,
        CollapsePolicy::Min => values.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min),
        CollapsePolicy::Max => values.iter().map(|(_, p)| *p).fold(f64::NEG_INFINITY, f64::max),
        CollapsePolicy::Mean => mean(),
        CollapsePolicy::Weighted(w) => {
            let (num, den) = values.iter().fold((0.0, 0.0), |(n, d), &(v, p)| {
                let wv = w.0.get(&(asset, slot.year, v)).copied().unwrap_or(0.0).max(0.0);
                (n + wv * p, d + wv)
            });
            if den > 0.0 {
                num / den
            } else {
                mean()
            }
        }
    })
}
