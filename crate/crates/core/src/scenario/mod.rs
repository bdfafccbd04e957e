//! Planning scenario: assets, milestone years, representative periods,
//! flows, profiles and demand, validated once and immutable afterwards.

mod io;
pub mod tables;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
pub use io::{load_scenario, write_scenario};
use tables::*;

/// A calendar year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Year(pub i32);

impl fmt::Display for Year {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssetId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssetKind {
    Producer,
    Consumer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvestmentMethod {
    None,
    Simple,
    Compact,
}

impl fmt::Display for InvestmentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvestmentMethod::None => "none",
            InvestmentMethod::Simple => "simple",
            InvestmentMethod::Compact => "compact",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Asset {
    pub name: String,
    pub kind: AssetKind,
    pub investment_method: InvestmentMethod,
    pub technical_lifetime: u32,
    pub unit_capacity: f64,
    /// Sorted.
    pub investable_years: Vec<Year>,
}

impl Asset {
    pub fn is_producer(&self) -> bool {
        self.kind == AssetKind::Producer
    }

    pub fn is_investable_in(&self, year: Year) -> bool {
        self.investable_years.binary_search(&year).is_ok()
    }

    /// `i` still operates in `y`: `y - lifetime + 1 <= i <= y`.
    pub fn alive(&self, commissioned: Year, y: Year) -> bool {
        commissioned <= y && i64::from(y.0) - i64::from(self.technical_lifetime) < i64::from(commissioned.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetYearParams {
    pub investment_cost: f64,
    pub fixed_cost: f64,
    pub capacity: f64,
    pub initial_units: f64,
    pub is_producer_in_year: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetVintageParams {
    pub fixed_cost: f64,
    pub initial_units: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeBlock {
    pub id: String,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepPeriod {
    pub year: Year,
    pub id: String,
    pub weight: f64,
    pub blocks: Vec<TimeBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowEdge {
    pub id: String,
    pub from: AssetId,
    pub to: AssetId,
    pub variable_cost: BTreeMap<Year, f64>,
}

impl FlowEdge {
    pub fn is_active(&self, year: Year) -> bool {
        self.variable_cost.contains_key(&year)
    }
}

/// One time block: year, position of the rep-period within that year, position of the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub year: Year,
    pub rep_period: usize,
    pub block: usize,
}

/// The compact-investment domain of one asset: `(operational year, vintage)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainTriples {
    pub asset: AssetId,
    /// Sorted by `(y, v)`.
    pub pairs: Vec<(Year, Year)>,
}

impl DomainTriples {
    pub fn contains(&self, y: Year, v: Year) -> bool {
        self.pairs.binary_search(&(y, v)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Vintages active in operational year `y`, ascending.
    pub fn vintages_in(&self, y: Year) -> impl Iterator<Item = Year> + '_ {
        self.pairs.iter().filter(move |(yy, _)| *yy == y).map(|&(_, v)| v)
    }

    /// Distinct vintages, ascending.
    pub fn vintages(&self) -> BTreeSet<Year> {
        self.pairs.iter().map(|&(_, v)| v).collect()
    }
}

/// A validated planning scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    tables: ScenarioTables,
    years: Vec<Year>,
    assets: Vec<Asset>,
    asset_ids: BTreeMap<String, AssetId>,
    asset_year: BTreeMap<(AssetId, Year), AssetYearParams>,
    /// Keyed by `(asset, operational year, vintage)`.
    asset_vintage: BTreeMap<(AssetId, Year, Year), AssetVintageParams>,
    rep_periods: BTreeMap<Year, Vec<RepPeriod>>,
    flows: Vec<FlowEdge>,
    profiles: BTreeMap<(AssetId, Slot), f64>,
    vintage_profiles: BTreeMap<(AssetId, Year, Slot), f64>,
    demand: BTreeMap<(AssetId, Slot), f64>,
    domains: Vec<DomainTriples>,
}

/// Milestone years `i` with `y - lifetime + 1 <= i <= y`.
pub fn active_window(scenario: &Scenario, asset: AssetId, y: Year) -> Vec<Year> {
    let a = scenario.asset(asset);
    scenario.years().iter().copied().filter(|&i| a.alive(i, y)).collect()
}

/// The `(y, v)` domain of `asset` (see [`DomainTriples`]).
pub fn domain_triples(scenario: &Scenario, asset: AssetId) -> DomainTriples {
    scenario.domain(asset).clone()
}

impl Scenario {
    pub fn tables(&self) -> &ScenarioTables {
        &self.tables
    }

    pub fn years(&self) -> &[Year] {
        &self.years
    }

    pub fn assets(&self) -> &[Asset] {
        &self.assets
    }

    pub fn asset(&self, id: AssetId) -> &Asset {
        &self.assets[id.0]
    }

    pub fn asset_ids(&self) -> impl Iterator<Item = AssetId> + '_ {
        (0..self.assets.len()).map(AssetId)
    }

    pub fn producers(&self) -> impl Iterator<Item = AssetId> + '_ {
        self.asset_ids().filter(|&a| self.asset(a).is_producer())
    }

    pub fn consumers(&self) -> impl Iterator<Item = AssetId> + '_ {
        self.asset_ids().filter(|&a| !self.asset(a).is_producer())
    }

    pub fn asset_id(&self, name: &str) -> Option<AssetId> {
        self.asset_ids.get(name).copied()
    }

    /// Parameters of a producer in a milestone year (present for every producer and year).
    pub fn asset_year(&self, asset: AssetId, y: Year) -> &AssetYearParams {
        &self.asset_year[&(asset, y)]
    }

    /// Vintage parameters with defaults: the asset-year fixed cost and zero initial units.
    pub fn vintage_params(&self, asset: AssetId, y: Year, v: Year) -> AssetVintageParams {
        self.asset_vintage.get(&(asset, y, v)).copied().unwrap_or(AssetVintageParams {
            fixed_cost: self.asset_year(asset, y).fixed_cost,
            initial_units: 0.0,
        })
    }

    pub fn has_vintage_records(&self, asset: AssetId) -> bool {
        self.asset_vintage.range((asset, Year(i32::MIN), Year(i32::MIN))..).next().is_some_and(|((a, _, _), _)| *a == asset)
    }

    /// Explicit vintage records as `((y, v), params)`.
    pub fn vintage_records(&self, asset: AssetId) -> impl Iterator<Item = ((Year, Year), &AssetVintageParams)> + '_ {
        self.asset_vintage.iter().filter(move |((a, _, _), _)| *a == asset).map(|(&(_, y, v), p)| ((y, v), p))
    }

    pub fn rep_periods(&self, y: Year) -> &[RepPeriod] {
        self.rep_periods.get(&y).map_or(&[], Vec::as_slice)
    }

    pub fn slots(&self, y: Year) -> Vec<Slot> {
        self.rep_periods(y)
            .iter()
            .enumerate()
            .flat_map(|(k, rp)| (0..rp.blocks.len()).map(move |b| Slot { year: y, rep_period: k, block: b }))
            .collect()
    }

    pub fn all_slots(&self) -> Vec<Slot> {
        self.years.iter().flat_map(|&y| self.slots(y)).collect()
    }

    pub fn rep_period(&self, slot: Slot) -> &RepPeriod {
        &self.rep_periods[&slot.year][slot.rep_period]
    }

    pub fn block(&self, slot: Slot) -> &TimeBlock {
        &self.rep_period(slot).blocks[slot.block]
    }

    /// Objective weight of one MWh-per-hour of flow in `slot`: rp weight × block duration.
    pub fn slot_weight(&self, slot: Slot) -> f64 {
        self.rep_period(slot).weight * self.block(slot).duration
    }

    /// `year`, rep-period id, block id.
    pub fn slot_labels(&self, slot: Slot) -> [String; 3] {
        [slot.year.to_string(), self.rep_period(slot).id.clone(), self.block(slot).id.clone()]
    }

    pub fn describe_slot(&self, slot: Slot) -> String {
        let [y, k, b] = self.slot_labels(slot);
        format!("year {y}, rep-period {k}, block {b}")
    }

    pub fn flows(&self) -> &[FlowEdge] {
        &self.flows
    }

    pub fn flow(&self, id: FlowId) -> &FlowEdge {
        &self.flows[id.0]
    }

    pub fn flows_out(&self, asset: AssetId, y: Year) -> Vec<FlowId> {
        (0..self.flows.len()).map(FlowId).filter(|&f| self.flow(f).from == asset && self.flow(f).is_active(y)).collect()
    }

    pub fn flows_in(&self, asset: AssetId, y: Year) -> Vec<FlowId> {
        (0..self.flows.len()).map(FlowId).filter(|&f| self.flow(f).to == asset && self.flow(f).is_active(y)).collect()
    }

    /// Vintage-less availability.
    pub fn profile(&self, asset: AssetId, slot: Slot) -> Option<f64> {
        self.profiles.get(&(asset, slot)).copied()
    }

    pub fn vintage_profile(&self, asset: AssetId, vintage: Year, slot: Slot) -> Option<f64> {
        self.vintage_profiles.get(&(asset, vintage, slot)).copied()
    }

    pub fn has_vintage_profile(&self, asset: AssetId, vintage: Year) -> bool {
        self.vintage_profiles.keys().any(|&(a, v, _)| a == asset && v == vintage)
    }

    pub fn has_any_vintage_profile(&self, asset: AssetId) -> bool {
        self.vintage_profiles.keys().any(|&(a, _, _)| a == asset)
    }

    pub fn demand(&self, consumer: AssetId, slot: Slot) -> f64 {
        self.demand.get(&(consumer, slot)).copied().unwrap_or(0.0)
    }

    pub fn domain(&self, asset: AssetId) -> &DomainTriples {
        &self.domains[asset.0]
    }

    /// Copy of the scenario where every investable asset uses `method`.
    ///
    /// Assets with method `none` keep it. Re-validates, so a simple asset with
    /// initial units but no vintage records cannot be switched to compact.
    pub fn with_investment_method(&self, method: InvestmentMethod) -> Result<Scenario, ScenarioError> {
        let mut tables = self.tables.clone();
        for a in &mut tables.assets {
            if a.investment_method != InvestmentMethod::None && method != InvestmentMethod::None {
                a.investment_method = method;
            }
        }
        Scenario::from_tables(tables)
    }

    /// Validates `tables` and assembles the scenario.
    pub fn from_tables(tables: ScenarioTables) -> Result<Scenario, ScenarioError> {
        Validator::new(&tables).run().map(|parts| parts.into_scenario(tables))
    }
}

const RULE_YEARS: &str = "milestone years strictly increasing and unique";
const RULE_UNIQUE: &str = "unique keys";
const RULE_LIFETIME: &str = "technical_lifetime >= 1";
const RULE_UNIT_CAPACITY: &str = "unit_capacity > 0 for producers";
const RULE_CONSUMER_METHOD: &str = "consumer has investment_method none";
const RULE_INVESTABLE: &str = "investable years empty iff investment_method none";
const RULE_INVESTABLE_FLAG: &str = "investable in {0,1}";
const RULE_COSTS: &str = "costs >= 0";
const RULE_CAPACITY: &str = "capacity > 0 for producers";
const RULE_INITIAL: &str = "initial_units >= 0";
const RULE_PRODUCER_YEARS: &str = "asset_year row for every producer year";
const RULE_RP_PER_YEAR: &str = "rep-period per milestone year";
const RULE_WEIGHT: &str = "weight >= 0";
const RULE_BLOCKS: &str = "rep-period has at least one block";
const RULE_DURATION: &str = "duration > 0";
const RULE_FLOW_ENDS: &str = "flow from producer to consumer";
const RULE_AVAILABILITY: &str = "availability in [0,1]";
const RULE_PROFILE_COMPLETE: &str = "profile for every producer slot";
const RULE_PROFILE_PRODUCER: &str = "profiles on producers only";
const RULE_VINTAGE_PROFILE_DOMAIN: &str = "vintage profile inside domain";
const RULE_VINTAGE_PROFILE_COMPLETE: &str = "vintage profile complete";
const RULE_DEMAND: &str = "demand >= 0";
const RULE_DEMAND_CONSUMER: &str = "demand on consumers only";
const RULE_DEMAND_REACHABLE: &str = "demand reachable";
const RULE_VINTAGE_DOMAIN: &str = "vintage record inside domain";
const RULE_INITIAL_CONSISTENT: &str = "initial units consistent across tables";
const RULE_OUTGOING: &str = "producer has outgoing flow";
const RULE_FINITE: &str = "numbers finite";

struct Parts {
    years: Vec<Year>,
    assets: Vec<Asset>,
    asset_ids: BTreeMap<String, AssetId>,
    asset_year: BTreeMap<(AssetId, Year), AssetYearParams>,
    asset_vintage: BTreeMap<(AssetId, Year, Year), AssetVintageParams>,
    rep_periods: BTreeMap<Year, Vec<RepPeriod>>,
    flows: Vec<FlowEdge>,
    profiles: BTreeMap<(AssetId, Slot), f64>,
    vintage_profiles: BTreeMap<(AssetId, Year, Slot), f64>,
    demand: BTreeMap<(AssetId, Slot), f64>,
    domains: Vec<DomainTriples>,
}

impl Parts {
    fn into_scenario(self, tables: ScenarioTables) -> Scenario {
        Scenario {
            tables,
            years: self.years,
            assets: self.assets,
            asset_ids: self.asset_ids,
            asset_year: self.asset_year,
            asset_vintage: self.asset_vintage,
            rep_periods: self.rep_periods,
            flows: self.flows,
            profiles: self.profiles,
            vintage_profiles: self.vintage_profiles,
            demand: self.demand,
            domains: self.domains,
        }
    }
}

struct Validator<'a> {
    t: &'a ScenarioTables,
}

fn finite(file: &str, idx: usize, what: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::invariant(RULE_FINITE, format!("{file} line {}: {what} = {v}", line_of(idx))))
    }
}

impl<'a> Validator<'a> {
    fn new(t: &'a ScenarioTables) -> Self {
        Validator { t }
    }

    fn run(self) -> Result<Parts, ScenarioError> {
        let years = self.years()?;
        let year_set: BTreeSet<Year> = years.iter().copied().collect();
        let check_year = |file: &str, idx: usize, y: Year| {
            if year_set.contains(&y) {
                Ok(())
            } else {
                Err(ScenarioError::reference(file, line_of(idx), format!("year {y} is not a milestone year")))
            }
        };

        let (mut assets, asset_ids) = self.assets()?;
        let lookup_asset = |file: &str, idx: usize, name: &str| {
            asset_ids
                .get(name)
                .copied()
                .ok_or_else(|| ScenarioError::reference(file, line_of(idx), format!("unknown asset {name:?}")))
        };

        // asset_year
        let mut asset_year = BTreeMap::new();
        for (idx, row) in self.t.asset_year.iter().enumerate() {
            let a = lookup_asset(ASSET_YEAR_FILE, idx, &row.asset)?;
            check_year(ASSET_YEAR_FILE, idx, row.year)?;
            for (what, v) in [
                ("investment_cost", row.investment_cost),
                ("fixed_cost", row.fixed_cost),
                ("initial_units", row.initial_units),
            ] {
                finite(ASSET_YEAR_FILE, idx, what, v)?;
            }
            let asset = &mut assets[a.0];
            if row.investment_cost < 0.0 || row.fixed_cost < 0.0 {
                return Err(ScenarioError::invariant(RULE_COSTS, format!("{ASSET_YEAR_FILE} line {}", line_of(idx))));
            }
            if row.initial_units < 0.0 {
                return Err(ScenarioError::invariant(RULE_INITIAL, format!("{ASSET_YEAR_FILE} line {}", line_of(idx))));
            }
            let capacity = row.capacity.unwrap_or(asset.unit_capacity);
            finite(ASSET_YEAR_FILE, idx, "capacity", capacity)?;
            if asset.is_producer() && capacity <= 0.0 {
                return Err(ScenarioError::invariant(
                    RULE_CAPACITY,
                    format!("{ASSET_YEAR_FILE} line {}: {} year {}", line_of(idx), row.asset, row.year),
                ));
            }
            match row.investable {
                0 => {}
                1 => asset.investable_years.push(row.year),
                other => {
                    return Err(ScenarioError::invariant(
                        RULE_INVESTABLE_FLAG,
                        format!("{ASSET_YEAR_FILE} line {}: {other}", line_of(idx)),
                    ))
                }
            }
            let params = AssetYearParams {
                investment_cost: row.investment_cost,
                fixed_cost: row.fixed_cost,
                capacity,
                initial_units: row.initial_units,
                is_producer_in_year: asset.is_producer(),
            };
            if asset_year.insert((a, row.year), params).is_some() {
                return Err(ScenarioError::invariant(
                    RULE_UNIQUE,
                    format!("{ASSET_YEAR_FILE} line {}: duplicate ({}, {})", line_of(idx), row.asset, row.year),
                ));
            }
        }
        for (i, asset) in assets.iter_mut().enumerate() {
            asset.investable_years.sort();
            let none = asset.investment_method == InvestmentMethod::None;
            if none != asset.investable_years.is_empty() {
                return Err(ScenarioError::invariant(
                    RULE_INVESTABLE,
                    format!("asset {} has method {} and {} investable years", asset.name, asset.investment_method, asset.investable_years.len()),
                ));
            }
            if asset.is_producer() {
                for &y in &years {
                    if !asset_year.contains_key(&(AssetId(i), y)) {
                        return Err(ScenarioError::invariant(
                            RULE_PRODUCER_YEARS,
                            format!("producer {} has no {ASSET_YEAR_FILE} row for {y}", asset.name),
                        ));
                    }
                }
            }
        }

        let rep_periods = self.rep_periods(&years, &check_year)?;
        let slot_of = |file: &str, idx: usize, y: Year, rp: &str, block: &str| -> Result<Slot, ScenarioError> {
            check_year(file, idx, y)?;
            let rps = &rep_periods[&y];
            let k = rps
                .iter()
                .position(|r| r.id == rp)
                .ok_or_else(|| ScenarioError::reference(file, line_of(idx), format!("unknown rep-period {rp:?} in {y}")))?;
            let b = rps[k].blocks.iter().position(|tb| tb.id == block).ok_or_else(|| {
                ScenarioError::reference(file, line_of(idx), format!("unknown block {block:?} in rep-period {rp:?} of {y}"))
            })?;
            Ok(Slot { year: y, rep_period: k, block: b })
        };

        // flows
        let mut flows: Vec<FlowEdge> = Vec::new();
        let mut flow_ids: BTreeMap<&str, FlowId> = BTreeMap::new();
        for (idx, row) in self.t.flows.iter().enumerate() {
            let from = lookup_asset(FLOWS_FILE, idx, &row.from_asset)?;
            let to = lookup_asset(FLOWS_FILE, idx, &row.to_asset)?;
            if !assets[from.0].is_producer() || assets[to.0].is_producer() {
                return Err(ScenarioError::invariant(
                    RULE_FLOW_ENDS,
                    format!("{FLOWS_FILE} line {}: {} -> {}", line_of(idx), row.from_asset, row.to_asset),
                ));
            }
            if flow_ids.insert(&row.flow, FlowId(flows.len())).is_some() {
                return Err(ScenarioError::invariant(RULE_UNIQUE, format!("{FLOWS_FILE} line {}: duplicate flow {}", line_of(idx), row.flow)));
            }
            flows.push(FlowEdge { id: row.flow.clone(), from, to, variable_cost: BTreeMap::new() });
        }
        for (idx, row) in self.t.flow_year.iter().enumerate() {
            let f = flow_ids
                .get(row.flow.as_str())
                .copied()
                .ok_or_else(|| ScenarioError::reference(FLOW_YEAR_FILE, line_of(idx), format!("unknown flow {:?}", row.flow)))?;
            check_year(FLOW_YEAR_FILE, idx, row.year)?;
            finite(FLOW_YEAR_FILE, idx, "variable_cost", row.variable_cost)?;
            if row.variable_cost < 0.0 {
                return Err(ScenarioError::invariant(RULE_COSTS, format!("{FLOW_YEAR_FILE} line {}", line_of(idx))));
            }
            if flows[f.0].variable_cost.insert(row.year, row.variable_cost).is_some() {
                return Err(ScenarioError::invariant(
                    RULE_UNIQUE,
                    format!("{FLOW_YEAR_FILE} line {}: duplicate ({}, {})", line_of(idx), row.flow, row.year),
                ));
            }
        }
        for (i, asset) in assets.iter().enumerate() {
            if asset.is_producer() && !flows.iter().any(|f| f.from == AssetId(i)) {
                return Err(ScenarioError::invariant(RULE_OUTGOING, format!("producer {} has no flow edge", asset.name)));
            }
        }

        // asset_vintage (domain needs the vintages carrying initial units first)
        let mut asset_vintage = BTreeMap::new();
        let mut initial_vintages: BTreeSet<(AssetId, Year)> = BTreeSet::new();
        for (idx, row) in self.t.asset_vintage.iter().enumerate() {
            let a = lookup_asset(ASSET_VINTAGE_FILE, idx, &row.asset)?;
            check_year(ASSET_VINTAGE_FILE, idx, row.year)?;
            if !assets[a.0].is_producer() {
                return Err(ScenarioError::reference(ASSET_VINTAGE_FILE, line_of(idx), format!("{} is not a producer", row.asset)));
            }
            finite(ASSET_VINTAGE_FILE, idx, "initial_units", row.initial_units)?;
            if row.initial_units < 0.0 {
                return Err(ScenarioError::invariant(RULE_INITIAL, format!("{ASSET_VINTAGE_FILE} line {}", line_of(idx))));
            }
            let fixed_cost = match row.fixed_cost {
                Some(c) => {
                    finite(ASSET_VINTAGE_FILE, idx, "fixed_cost", c)?;
                    if c < 0.0 {
                        return Err(ScenarioError::invariant(RULE_COSTS, format!("{ASSET_VINTAGE_FILE} line {}", line_of(idx))));
                    }
                    c
                }
                None => asset_year[&(a, row.year)].fixed_cost,
            };
            if row.initial_units > 0.0 {
                initial_vintages.insert((a, row.vintage));
            }
            let params = AssetVintageParams { fixed_cost, initial_units: row.initial_units };
            if asset_vintage.insert((a, row.year, row.vintage), params).is_some() {
                return Err(ScenarioError::invariant(
                    RULE_UNIQUE,
                    format!("{ASSET_VINTAGE_FILE} line {}: duplicate ({}, {}, {})", line_of(idx), row.asset, row.year, row.vintage),
                ));
            }
        }
        let domains: Vec<DomainTriples> = assets
            .iter()
            .enumerate()
            .map(|(i, asset)| {
                let id = AssetId(i);
                let mut vintages: BTreeSet<Year> = asset.investable_years.iter().copied().collect();
                vintages.extend(initial_vintages.iter().filter(|(a, _)| *a == id).map(|&(_, v)| v));
                let mut pairs: Vec<(Year, Year)> = Vec::new();
                if asset.is_producer() {
                    for &y in &years {
                        for &v in &vintages {
                            if asset.alive(v, y) {
                                pairs.push((y, v));
                            }
                        }
                    }
                }
                pairs.sort();
                DomainTriples { asset: id, pairs }
            })
            .collect();
        for (idx, row) in self.t.asset_vintage.iter().enumerate() {
            let a = asset_ids[&row.asset];
            if !domains[a.0].contains(row.year, row.vintage) {
                return Err(ScenarioError::invariant(
                    RULE_VINTAGE_DOMAIN,
                    format!("{ASSET_VINTAGE_FILE} line {}: ({}, {}, {}) is outside the lifetime window or has no investment/initial units", line_of(idx), row.asset, row.year, row.vintage),
                ));
            }
        }
        for (i, asset) in assets.iter().enumerate() {
            let id = AssetId(i);
            let mut last: BTreeMap<Year, f64> = BTreeMap::new();
            for (&(a, _, v), p) in asset_vintage.iter() {
                if a != id {
                    continue;
                }
                if let Some(prev) = last.insert(v, p.initial_units) {
                    if p.initial_units > prev {
                        warn!("asset {}: initial units of vintage {v} increase over operational years", asset.name);
                    }
                }
            }
            let has_records = asset_vintage.keys().any(|&(a, _, _)| a == id);
            if asset.is_producer() && (asset.investment_method == InvestmentMethod::Compact || has_records) {
                for &y in &years {
                    let from_vintages: f64 =
                        asset_vintage.iter().filter(|(&(a, yy, _), _)| a == id && yy == y).map(|(_, p)| p.initial_units).sum();
                    let from_year = asset_year[&(id, y)].initial_units;
                    if (from_vintages - from_year).abs() > 1e-9 * (1.0 + from_year.abs()) {
                        return Err(ScenarioError::invariant(
                            RULE_INITIAL_CONSISTENT,
                            format!("asset {} year {y}: {ASSET_YEAR_FILE} has {from_year} initial units, {ASSET_VINTAGE_FILE} vintages sum to {from_vintages}", asset.name),
                        ));
                    }
                }
            }
        }

        // profiles
        let mut profiles = BTreeMap::new();
        let mut vintage_profiles = BTreeMap::new();
        for (idx, row) in self.t.profiles.iter().enumerate() {
            let a = lookup_asset(PROFILES_FILE, idx, &row.asset)?;
            if !assets[a.0].is_producer() {
                return Err(ScenarioError::invariant(RULE_PROFILE_PRODUCER, format!("{PROFILES_FILE} line {}: {}", line_of(idx), row.asset)));
            }
            let slot = slot_of(PROFILES_FILE, idx, row.year, &row.rep_period, &row.block)?;
            if !(0.0..=1.0).contains(&row.value) {
                return Err(ScenarioError::invariant(
                    RULE_AVAILABILITY,
                    format!("{PROFILES_FILE} line {}: value {}", line_of(idx), row.value),
                ));
            }
            let dup = match row.vintage {
                None => profiles.insert((a, slot), row.value).is_some(),
                Some(v) => {
                    if !domains[a.0].contains(row.year, v) {
                        return Err(ScenarioError::invariant(
                            RULE_VINTAGE_PROFILE_DOMAIN,
                            format!("{PROFILES_FILE} line {}: vintage {v} of {} is not active in {}", line_of(idx), row.asset, row.year),
                        ));
                    }
                    vintage_profiles.insert((a, v, slot), row.value).is_some()
                }
            };
            if dup {
                return Err(ScenarioError::invariant(RULE_UNIQUE, format!("{PROFILES_FILE} line {}: duplicate entry", line_of(idx))));
            }
        }
        let all_slots: Vec<Slot> = years
            .iter()
            .flat_map(|&y| {
                rep_periods[&y]
                    .iter()
                    .enumerate()
                    .flat_map(move |(k, rp)| (0..rp.blocks.len()).map(move |b| Slot { year: y, rep_period: k, block: b }))
            })
            .collect();
        for (i, asset) in assets.iter().enumerate() {
            if !asset.is_producer() {
                continue;
            }
            let id = AssetId(i);
            for &slot in &all_slots {
                if !profiles.contains_key(&(id, slot)) {
                    let rp = &rep_periods[&slot.year][slot.rep_period];
                    return Err(ScenarioError::invariant(
                        RULE_PROFILE_COMPLETE,
                        format!("{} has no profile for year {}, rep-period {}, block {}", asset.name, slot.year, rp.id, rp.blocks[slot.block].id),
                    ));
                }
            }
            let profiled: BTreeSet<Year> = vintage_profiles.keys().filter(|(a, _, _)| *a == id).map(|&(_, v, _)| v).collect();
            for v in profiled {
                for &(y, vv) in &domains[i].pairs {
                    if vv != v {
                        continue;
                    }
                    for &slot in all_slots.iter().filter(|s| s.year == y) {
                        if !vintage_profiles.contains_key(&(id, v, slot)) {
                            return Err(ScenarioError::invariant(
                                RULE_VINTAGE_PROFILE_COMPLETE,
                                format!("{} vintage {v} has no profile for {}", asset.name, describe(&rep_periods, slot)),
                            ));
                        }
                    }
                }
            }
        }

        // demand
        let mut demand = BTreeMap::new();
        for (idx, row) in self.t.demand.iter().enumerate() {
            let a = lookup_asset(DEMAND_FILE, idx, &row.asset)?;
            if assets[a.0].is_producer() {
                return Err(ScenarioError::invariant(RULE_DEMAND_CONSUMER, format!("{DEMAND_FILE} line {}: {}", line_of(idx), row.asset)));
            }
            let slot = slot_of(DEMAND_FILE, idx, row.year, &row.rep_period, &row.block)?;
            finite(DEMAND_FILE, idx, "value", row.value)?;
            if row.value < 0.0 {
                return Err(ScenarioError::invariant(RULE_DEMAND, format!("{DEMAND_FILE} line {}: value {}", line_of(idx), row.value)));
            }
            if demand.insert((a, slot), row.value).is_some() {
                return Err(ScenarioError::invariant(RULE_UNIQUE, format!("{DEMAND_FILE} line {}: duplicate entry", line_of(idx))));
            }
        }
        for (&(c, slot), &value) in &demand {
            if value > 0.0 && !flows.iter().any(|f| f.to == c && f.is_active(slot.year)) {
                return Err(ScenarioError::invariant(
                    RULE_DEMAND_REACHABLE,
                    format!("{} has demand in {} but no active inflow", assets[c.0].name, describe(&rep_periods, slot)),
                ));
            }
        }

        Ok(Parts {
            years,
            assets,
            asset_ids,
            asset_year,
            asset_vintage,
            rep_periods,
            flows,
            profiles,
            vintage_profiles,
            demand,
            domains,
        })
    }

    fn years(&self) -> Result<Vec<Year>, ScenarioError> {
        let years: Vec<Year> = self.t.years.iter().map(|r| r.year).collect();
        if years.is_empty() {
            return Err(ScenarioError::invariant(RULE_YEARS, "no milestone years"));
        }
        if let Some(w) = years.windows(2).find(|w| w[0] >= w[1]) {
            return Err(ScenarioError::invariant(RULE_YEARS, format!("{} followed by {}", w[0], w[1])));
        }
        Ok(years)
    }

    fn assets(&self) -> Result<(Vec<Asset>, BTreeMap<String, AssetId>), ScenarioError> {
        let mut assets = Vec::new();
        let mut ids = BTreeMap::new();
        for (idx, row) in self.t.assets.iter().enumerate() {
            if ids.insert(row.name.clone(), AssetId(assets.len())).is_some() {
                return Err(ScenarioError::invariant(RULE_UNIQUE, format!("{ASSETS_FILE} line {}: duplicate asset {}", line_of(idx), row.name)));
            }
            if row.technical_lifetime < 1 {
                return Err(ScenarioError::invariant(RULE_LIFETIME, format!("asset {}", row.name)));
            }
            finite(ASSETS_FILE, idx, "unit_capacity", row.unit_capacity)?;
            if row.kind == AssetKind::Producer && row.unit_capacity <= 0.0 {
                return Err(ScenarioError::invariant(RULE_UNIT_CAPACITY, format!("asset {}", row.name)));
            }
            if row.kind == AssetKind::Consumer && row.investment_method != InvestmentMethod::None {
                return Err(ScenarioError::invariant(RULE_CONSUMER_METHOD, format!("asset {}", row.name)));
            }
            assets.push(Asset {
                name: row.name.clone(),
                kind: row.kind,
                investment_method: row.investment_method,
                technical_lifetime: row.technical_lifetime,
                unit_capacity: row.unit_capacity,
                investable_years: Vec::new(),
            });
        }
        Ok((assets, ids))
    }

    fn rep_periods(
        &self,
        years: &[Year],
        check_year: &dyn Fn(&str, usize, Year) -> Result<(), ScenarioError>,
    ) -> Result<BTreeMap<Year, Vec<RepPeriod>>, ScenarioError> {
        let mut rps: BTreeMap<Year, Vec<RepPeriod>> = years.iter().map(|&y| (y, Vec::new())).collect();
        for (idx, row) in self.t.rep_periods.iter().enumerate() {
            check_year(REP_PERIODS_FILE, idx, row.year)?;
            finite(REP_PERIODS_FILE, idx, "weight", row.weight)?;
            if row.weight < 0.0 {
                return Err(ScenarioError::invariant(RULE_WEIGHT, format!("{REP_PERIODS_FILE} line {}", line_of(idx))));
            }
            let list = rps.get_mut(&row.year).expect("checked year");
            if list.iter().any(|r| r.id == row.rep_period) {
                return Err(ScenarioError::invariant(
                    RULE_UNIQUE,
                    format!("{REP_PERIODS_FILE} line {}: duplicate rep-period {}", line_of(idx), row.rep_period),
                ));
            }
            list.push(RepPeriod { year: row.year, id: row.rep_period.clone(), weight: row.weight, blocks: Vec::new() });
        }
        for (idx, row) in self.t.time_blocks.iter().enumerate() {
            check_year(TIME_BLOCKS_FILE, idx, row.year)?;
            let rp = rps
                .get_mut(&row.year)
                .and_then(|l| l.iter_mut().find(|r| r.id == row.rep_period))
                .ok_or_else(|| ScenarioError::reference(TIME_BLOCKS_FILE, line_of(idx), format!("unknown rep-period {:?} in {}", row.rep_period, row.year)))?;
            finite(TIME_BLOCKS_FILE, idx, "duration", row.duration)?;
            if row.duration <= 0.0 {
                return Err(ScenarioError::invariant(RULE_DURATION, format!("{TIME_BLOCKS_FILE} line {}", line_of(idx))));
            }
            if rp.blocks.iter().any(|b| b.id == row.block) {
                return Err(ScenarioError::invariant(RULE_UNIQUE, format!("{TIME_BLOCKS_FILE} line {}: duplicate block {}", line_of(idx), row.block)));
            }
            rp.blocks.push(TimeBlock { id: row.block.clone(), duration: row.duration });
        }
        for (y, list) in &rps {
            if list.is_empty() {
                return Err(ScenarioError::invariant(RULE_RP_PER_YEAR, format!("year {y} has no rep-period")));
            }
            if let Some(rp) = list.iter().find(|r| r.blocks.is_empty()) {
                return Err(ScenarioError::invariant(RULE_BLOCKS, format!("rep-period {} of {y}", rp.id)));
            }
        }
        Ok(rps)
    }
}

fn describe(rps: &BTreeMap<Year, Vec<RepPeriod>>, slot: Slot) -> String {
    let rp = &rps[&slot.year][slot.rep_period];
    format!("year {}, rep-period {}, block {}", slot.year, rp.id, rp.blocks[slot.block].id)
}

#[cfg(test)]
mod tests;
