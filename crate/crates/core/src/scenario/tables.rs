//! Raw scenario rows, one struct per CSV file.

use serde::{Deserialize, Serialize};

use super::{AssetKind, InvestmentMethod, Year};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearRow {
    pub year: Year,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetRow {
    pub name: String,
    pub kind: AssetKind,
    pub investment_method: InvestmentMethod,
    pub technical_lifetime: u32,
    pub unit_capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetYearRow {
    pub asset: String,
    pub year: Year,
    pub investment_cost: f64,
    pub fixed_cost: f64,
    /// Blank means "use the asset's unit capacity".
    pub capacity: Option<f64>,
    pub initial_units: f64,
    pub investable: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetVintageRow {
    pub asset: String,
    pub year: Year,
    pub vintage: Year,
    /// Blank means "use the asset-year fixed cost".
    pub fixed_cost: Option<f64>,
    pub initial_units: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepPeriodRow {
    pub year: Year,
    pub rep_period: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeBlockRow {
    pub year: Year,
    pub rep_period: String,
    pub block: String,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRow {
    pub flow: String,
    pub from_asset: String,
    pub to_asset: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowYearRow {
    pub flow: String,
    pub year: Year,
    pub variable_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub asset: String,
    /// Blank for the vintage-less profile.
    pub vintage: Option<Year>,
    pub year: Year,
    pub rep_period: String,
    pub block: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandRow {
    pub asset: String,
    pub year: Year,
    pub rep_period: String,
    pub block: String,
    pub value: f64,
}

/// Every row of a scenario directory, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioTables {
    pub years: Vec<YearRow>,
    pub assets: Vec<AssetRow>,
    pub asset_year: Vec<AssetYearRow>,
    pub asset_vintage: Vec<AssetVintageRow>,
    pub rep_periods: Vec<RepPeriodRow>,
    pub time_blocks: Vec<TimeBlockRow>,
    pub flows: Vec<FlowRow>,
    pub flow_year: Vec<FlowYearRow>,
    pub profiles: Vec<ProfileRow>,
    pub demand: Vec<DemandRow>,
}

pub const YEARS_FILE: &str = "years.csv";
pub const ASSETS_FILE: &str = "assets.csv";
pub const ASSET_YEAR_FILE: &str = "asset_year.csv";
pub const ASSET_VINTAGE_FILE: &str = "asset_vintage.csv";
pub const REP_PERIODS_FILE: &str = "rep_periods.csv";
pub const TIME_BLOCKS_FILE: &str = "time_blocks.csv";
pub const FLOWS_FILE: &str = "flows.csv";
pub const FLOW_YEAR_FILE: &str = "flow_year.csv";
pub const PROFILES_FILE: &str = "profiles.csv";
pub const DEMAND_FILE: &str = "demand.csv";

/// 1-based file line of the `idx`-th data row (the header is line 1).
pub(crate) fn line_of(idx: usize) -> u64 {
    idx as u64 + 2
}
