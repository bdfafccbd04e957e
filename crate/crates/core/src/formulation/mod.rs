//! Compiles a [`Scenario`] into a [`LinearModel`] under one of three
//! investment accountings.
//!
//! * simple: one available-units variable per asset and year;
//! * vintage: units and production tracked per (operational year, vintage);
//! * compact: units tracked per vintage, production aggregated per year.
//!
//! Assets whose method is `simple` or `none` keep simple accounting in every
//! build, so mixed fleets compile under the vintage and compact methods too.

mod builder;
mod collapse;
mod compact;
mod simple;
mod vintage;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use plan_lp::{ConstrId, LinearModel, VarId};
use serde::{Deserialize, Serialize};

use crate::scenario::{AssetId, FlowId, Slot, Year};

pub use collapse::{collapse_profile, CollapsePolicy, VintageWeights};
pub use compact::{build_compact, reference_weights};
pub use simple::build_simple;
pub use vintage::{build_vintage, VintageOptions};

pub const GROUP_INV: &str = "inv";
pub const GROUP_DECOM_SIMPLE: &str = "decom_simple";
pub const GROUP_DECOM_VINTAGE: &str = "decom_vintage";
pub const GROUP_DECOM_COMPACT: &str = "decom_compact";
pub const GROUP_AVAILABLE_SIMPLE: &str = "available_simple";
pub const GROUP_AVAILABLE_VINTAGE: &str = "available_vintage";
pub const GROUP_AVAILABLE_COMPACT: &str = "available_compact";
pub const GROUP_FLOW: &str = "flow";
pub const GROUP_FLOW_VINTAGE: &str = "flow_vintage";

pub const ROW_UNITS_SIMPLE: &str = "units_simple";
pub const ROW_UNITS_VINTAGE: &str = "units_vintage";
pub const ROW_UNITS_COMPACT: &str = "units_compact";
pub const ROW_CAPACITY_SIMPLE: &str = "capacity_simple";
pub const ROW_CAPACITY_VINTAGE: &str = "capacity_vintage";
pub const ROW_CAPACITY_COMPACT: &str = "capacity_compact";
pub const ROW_DEMAND: &str = "demand";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Simple,
    Vintage,
    Compact,
}

impl MethodKind {
    pub const ALL: [MethodKind; 3] = [MethodKind::Simple, MethodKind::Vintage, MethodKind::Compact];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::Simple => "simple",
            MethodKind::Vintage => "vintage",
            MethodKind::Compact => "compact",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simple" => Ok(MethodKind::Simple),
            "vintage" => Ok(MethodKind::Vintage),
            "compact" => Ok(MethodKind::Compact),
            other => Err(format!("unknown method {other:?} (expected simple, vintage or compact)")),
        }
    }
}

/// Name of a compact collapse policy, without the data a weighted policy carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    /// The vintage-less profile of the operational year.
    #[default]
    Operational,
    Min,
    Mean,
    Max,
    /// Average weighted by available units of a reference vintage solve.
    Weighted,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] =
        [PolicyKind::Operational, PolicyKind::Min, PolicyKind::Mean, PolicyKind::Max, PolicyKind::Weighted];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Operational => "operational",
            PolicyKind::Min => "min",
            PolicyKind::Mean => "mean",
            PolicyKind::Max => "max",
            PolicyKind::Weighted => "weighted",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = crate::error::BuildError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "operational" | "operational-year-profile" => Ok(PolicyKind::Operational),
            "min" | "min-over-active-vintages" => Ok(PolicyKind::Min),
            "mean" | "mean-over-active-vintages" => Ok(PolicyKind::Mean),
            "max" | "max-over-active-vintages" => Ok(PolicyKind::Max),
            "weighted" | "capacity-weighted" => Ok(PolicyKind::Weighted),
            other => Err(crate::error::BuildError::UnknownPolicy(other.to_string())),
        }
    }
}

/// Variable handles of a built model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarMaps {
    /// `(asset, commissioning year)`.
    pub inv: BTreeMap<(AssetId, Year), VarId>,
    /// `(asset, decommissioning year)`.
    pub decom_simple: BTreeMap<(AssetId, Year), VarId>,
    /// `(asset, operational year)`.
    pub available_simple: BTreeMap<(AssetId, Year), VarId>,
    /// `(asset, decommissioning year i, vintage v)`; vintage or compact group.
    pub decom_by_vintage: BTreeMap<(AssetId, Year, Year), VarId>,
    /// `(asset, operational year y, vintage v)`; vintage or compact group.
    pub available_by_vintage: BTreeMap<(AssetId, Year, Year), VarId>,
    pub flow: BTreeMap<(FlowId, Slot), VarId>,
    /// `(flow, vintage, slot)`.
    pub flow_vintage: BTreeMap<(FlowId, Year, Slot), VarId>,
}

/// Constraint handles of a built model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RowMaps {
    pub units_simple: BTreeMap<(AssetId, Year), ConstrId>,
    /// `(asset, y, v)`.
    pub units_by_vintage: BTreeMap<(AssetId, Year, Year), ConstrId>,
    /// Aggregate capacity rows (simple and compact accounting).
    pub capacity: BTreeMap<(AssetId, Slot), ConstrId>,
    /// `(asset, vintage, slot)`.
    pub capacity_vintage: BTreeMap<(AssetId, Year, Slot), ConstrId>,
    pub demand: BTreeMap<(AssetId, Slot), ConstrId>,
}

/// A compiled model and its index maps.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub method: MethodKind,
    /// Set for compact builds.
    pub policy: Option<PolicyKind>,
    pub model: LinearModel,
    pub vars: VarMaps,
    pub rows: RowMaps,
    /// Collapsed profile per compact asset slot (compact builds only).
    pub collapsed_profiles: BTreeMap<(AssetId, Slot), f64>,
}

pub type SimpleBuildOutput = BuildOutput;
pub type VintageBuildOutput = BuildOutput;
pub type CompactBuildOutput = BuildOutput;

/// The three term groups of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostBreakdown {
    pub investment: f64,
    pub fixed: f64,
    pub variable: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.investment + self.fixed + self.variable
    }

    /// Objective contribution of `values`, by term group.
    pub fn of(model: &LinearModel, values: &[f64]) -> CostBreakdown {
        let mut out = CostBreakdown::default();
        for ((var, c), x) in model.variables().iter().zip(model.objective()).zip(values) {
            let term = c * x;
            match var.group.as_str() {
                GROUP_INV => out.investment += term,
                g if g.starts_with("available") => out.fixed += term,
                g if g.starts_with("flow") => out.variable += term,
                _ => debug_assert_eq!(*c, 0.0, "untyped objective term in {}", var.group),
            }
        }
        out
    }
}

/// Builds `method` with its default options.
pub fn build(scenario: &crate::Scenario, method: MethodKind, policy: &CollapsePolicy) -> Result<BuildOutput, crate::BuildError> {
    match method {
        MethodKind::Simple => build_simple(scenario),
        MethodKind::Vintage => build_vintage(scenario, &VintageOptions::default()),
        MethodKind::Compact => build_compact(scenario, policy),
    }
}

#[cfg(test)]
mod tests;
