//! Exhaustive enumeration over bounded integer investment and
//! decommissioning decisions.
//!
//! Deliberately shares no code with the formulation builders: unit
//! accounting is evaluated by direct arithmetic and only the remaining
//! dispatch problem (flows) goes through the simplex, on a model built here.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use plan_lp::{lp_name, solve, Bounds, LinearModel, Sense, SolveOptions};
use serde::Serialize;

use super::scenario_for;
use crate::error::{AnalysisError, BuildError};
use crate::formulation::{CollapsePolicy, MethodKind, PolicyKind};
use crate::par::{self, Execution};
use crate::scenario::{AssetId, FlowId, InvestmentMethod, Scenario, Slot, Year};

pub const ORACLE_DECISION_LIMIT: usize = 12;

const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Each decision ranges over `0..=max_units`.
    pub max_units: u32,
    pub execution: Execution,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_units: 2, execution: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub method: MethodKind,
    pub policy: Option<PolicyKind>,
    /// `None` when no assignment is feasible.
    pub best_objective: Option<f64>,
    /// Decision values by LP variable name (all decisions listed).
    pub best_assignment: BTreeMap<String, f64>,
    /// Size of the enumerated grid.
    pub candidates: usize,
    /// Assignments whose unit accounting stays nonnegative.
    pub accounting_feasible: usize,
    pub dispatch_solves: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Inv(usize, Year),
    /// Simple accounting: `(asset, i)`.
    Decom(usize, Year),
    /// Per-vintage accounting: `(asset, i, v)`.
    DecomVintage(usize, Year, Year),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Track {
    Simple,
    /// Per-vintage units; `strict` forbids decommissioning in the commissioning year.
    Vintaged { strict: bool, split_production: bool },
}

/// One capacity row of the dispatch LP: flows `(flow, vintage)` bounded by
/// `profile * capacity * units`, where units come from accounting entries.
#[derive(Debug, Clone)]
struct CapacityRow {
    flows: Vec<usize>,
    scale: f64,
    units: Vec<usize>,
}

struct Problem<'a> {
    s: &'a Scenario,
    decisions: Vec<(String, Kind)>,
    tracks: Vec<Track>,
    /// Accounting entries: `(asset, y, vintage)` with `None` for simple accounting.
    units: Vec<(usize, Year, Option<Year>)>,
    fixed_cost: Vec<f64>,
    /// Per decision: investment cost (zero for decommissioning).
    decision_cost: Vec<f64>,
    /// Dispatch columns: `(flow, vintage, slot)` with cost.
    columns: Vec<((usize, Option<Year>, Slot), f64)>,
    capacity: Vec<CapacityRow>,
    demand: Vec<(Vec<usize>, f64)>,
}

fn alive(lifetime: u32, i: Year, y: Year) -> bool {
    i.0 <= y.0 && i64::from(y.0) - i64::from(lifetime) + 1 <= i64::from(i.0)
}

/// Vintage pairs `(y, v)` of one asset, recomputed from raw data.
fn pairs(s: &Scenario, a: AssetId) -> Vec<(Year, Year)> {
    let asset = s.asset(a);
    let mut vintages: BTreeSet<Year> = asset.investable_years.iter().copied().collect();
    for ((_, v), p) in s.vintage_records(a) {
        if p.initial_units > 0.0 {
            vintages.insert(v);
        }
    }
    let mut out = Vec::new();
    for &y in s.years() {
        for &v in &vintages {
            if alive(asset.technical_lifetime, v, y) {
                out.push((y, v));
            }
        }
    }
    out
}

fn profile_of(s: &Scenario, a: AssetId, slot: Slot) -> Result<f64, BuildError> {
    s.profile(a, slot).ok_or_else(|| BuildError::MissingProfile { asset: s.asset(a).name.clone(), slot: s.describe_slot(slot) })
}

fn collapsed(s: &Scenario, a: AssetId, slot: Slot, active: &[Year], policy: &CollapsePolicy) -> Result<f64, BuildError> {
    let base = profile_of(s, a, slot)?;
    if !s.has_any_vintage_profile(a) || active.is_empty() {
        return Ok(base);
    }
    let ps: Vec<f64> = active.iter().map(|&v| s.vintage_profile(a, v, slot).unwrap_or(base)).collect();
    let mean = ps.iter().sum::<f64>() / ps.len() as f64;
    Ok(match policy {
        CollapsePolicy::Operational => base,
        CollapsePolicy::Min => ps.iter().copied().fold(f64::INFINITY, f64::min),
        CollapsePolicy::Max => ps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        CollapsePolicy::Mean => mean,
        CollapsePolicy::Weighted(w) => {
            let mut num = 0.0;
            let mut den = 0.0;
            for (&v, &p) in active.iter().zip(&ps) {
                let wv = w.0.get(&(a, slot.year, v)).copied().unwrap_or(0.0).max(0.0);
                num += wv * p;
                den += wv;
            }
            if den > 0.0 {
                num / den
            } else {
                mean
            }
        }
    })
}

impl<'a> Problem<'a> {
    fn new(s: &'a Scenario, method: MethodKind, policy: &CollapsePolicy) -> Result<Self, AnalysisError> {
        let tracks: Vec<Track> = s
            .assets()
            .iter()
            .map(|a| match (a.investment_method, method) {
                (InvestmentMethod::Compact, MethodKind::Vintage) => Track::Vintaged { strict: false, split_production: true },
                (InvestmentMethod::Compact, _) => Track::Vintaged { strict: true, split_production: false },
                _ => Track::Simple,
            })
            .collect();
        if method == MethodKind::Simple {
            if let Some(a) = s.assets().iter().find(|a| a.investment_method == InvestmentMethod::Compact) {
                return Err(BuildError::WrongMethod { asset: a.name.clone(), found: "compact".into(), method: "simple" }.into());
            }
        }
        let mut decisions = Vec::new();
        let mut decision_cost = Vec::new();
        let mut units = Vec::new();
        let mut fixed_cost = Vec::new();
        let mut pair_map: BTreeMap<usize, Vec<(Year, Year)>> = BTreeMap::new();
        for a in s.producers() {
            let asset = s.asset(a);
            let name = &asset.name;
            for &v in &asset.investable_years {
                decisions.push((lp_name("inv", &[name.clone(), v.to_string()]), Kind::Inv(a.0, v)));
                decision_cost.push(s.asset_year(a, v).investment_cost * asset.unit_capacity);
            }
            match tracks[a.0] {
                Track::Simple => {
                    for &i in s.years() {
                        decisions.push((lp_name("decom_simple", &[name.clone(), i.to_string()]), Kind::Decom(a.0, i)));
                        decision_cost.push(0.0);
                    }
                    for &y in s.years() {
                        units.push((a.0, y, None));
                        fixed_cost.push(s.asset_year(a, y).fixed_cost * asset.unit_capacity);
                    }
                }
                Track::Vintaged { strict, .. } => {
                    let ps = pairs(s, a);
                    let group = if strict { "decom_compact" } else { "decom_vintage" };
                    for &(i, v) in &ps {
                        if v < i || (!strict && v == i) {
                            decisions.push((lp_name(group, &[name.clone(), i.to_string(), v.to_string()]), Kind::DecomVintage(a.0, i, v)));
                            decision_cost.push(0.0);
                        }
                    }
                    for &(y, v) in &ps {
                        units.push((a.0, y, Some(v)));
                        fixed_cost.push(s.vintage_params(a, y, v).fixed_cost * asset.unit_capacity);
                    }
                    pair_map.insert(a.0, ps);
                }
            }
        }

        // dispatch columns
        let mut columns = Vec::new();
        let mut col_of: HashMap<(usize, Option<Year>, Slot), usize> = HashMap::new();
        for (fi, edge) in s.flows().iter().enumerate() {
            let from = edge.from.0;
            for (&y, &vc) in &edge.variable_cost {
                for slot in s.slots(y) {
                    let cost = s.rep_period(slot).weight * s.block(slot).duration * vc;
                    let vintages: Vec<Option<Year>> = match tracks[from] {
                        Track::Vintaged { split_production: true, .. } => {
                            pair_map[&from].iter().filter(|(yy, _)| *yy == y).map(|&(_, v)| Some(v)).collect()
                        }
                        _ => vec![None],
                    };
                    for v in vintages {
                        col_of.insert((fi, v, slot), columns.len());
                        columns.push(((fi, v, slot), cost));
                    }
                }
            }
        }
        let unit_index: HashMap<(usize, Year, Option<Year>), usize> = units.iter().enumerate().map(|(k, &u)| (u, k)).collect();
        let outflows = |a: usize, y: Year| -> Vec<usize> {
            s.flows().iter().enumerate().filter(|(_, e)| e.from.0 == a && e.variable_cost.contains_key(&y)).map(|(f, _)| f).collect()
        };
        let mut capacity = Vec::new();
        for a in s.producers() {
            for &y in s.years() {
                let cap = s.asset_year(a, y).capacity;
                let fs = outflows(a.0, y);
                for slot in s.slots(y) {
                    match tracks[a.0] {
                        Track::Simple => capacity.push(CapacityRow {
                            flows: fs.iter().map(|&f| col_of[&(f, None, slot)]).collect(),
                            scale: profile_of(s, a, slot)? * cap,
                            units: vec![unit_index[&(a.0, y, None)]],
                        }),
                        Track::Vintaged { split_production: false, .. } => {
                            let active: Vec<Year> = pair_map[&a.0].iter().filter(|(yy, _)| *yy == y).map(|&(_, v)| v).collect();
                            capacity.push(CapacityRow {
                                flows: fs.iter().map(|&f| col_of[&(f, None, slot)]).collect(),
                                scale: collapsed(s, a, slot, &active, policy)? * cap,
                                units: active.iter().map(|&v| unit_index[&(a.0, y, Some(v))]).collect(),
                            });
                        }
                        Track::Vintaged { split_production: true, .. } => {
                            for &(_, v) in pair_map[&a.0].iter().filter(|(yy, _)| *yy == y) {
                                let p = match s.vintage_profile(a, v, slot) {
                                    Some(p) => p,
                                    None => profile_of(s, a, slot)?,
                                };
                                capacity.push(CapacityRow {
                                    flows: fs.iter().map(|&f| col_of[&(f, Some(v), slot)]).collect(),
                                    scale: p * cap,
                                    units: vec![unit_index[&(a.0, y, Some(v))]],
                                });
                            }
                        }
                    }
                }
            }
        }
        let mut demand = Vec::new();
        for c in s.consumers() {
            for &y in s.years() {
                let inflows: Vec<FlowId> = s.flows_in(c, y);
                if inflows.is_empty() {
                    continue;
                }
                for slot in s.slots(y) {
                    let cols = columns
                        .iter()
                        .enumerate()
                        .filter(|(_, ((f, _, sl), _))| *sl == slot && inflows.contains(&FlowId(*f)))
                        .map(|(k, _)| k)
                        .collect();
                    demand.push((cols, s.demand(c, slot)));
                }
            }
        }
        Ok(Problem { s, decisions, tracks, units, fixed_cost, decision_cost, columns, capacity, demand })
    }

    /// Units per accounting entry, or `None` if any goes negative.
    fn accounting(&self, x: &[f64]) -> Option<Vec<f64>> {
        let s = self.s;
        let mut inv: HashMap<(usize, Year), f64> = HashMap::new();
        let mut decom: HashMap<(usize, Year), f64> = HashMap::new();
        let mut decom_v: HashMap<(usize, Year, Year), f64> = HashMap::new();
        for ((_, kind), &val) in self.decisions.iter().zip(x) {
            match *kind {
                Kind::Inv(a, v) => {
                    inv.insert((a, v), val);
                }
                Kind::Decom(a, i) => {
                    decom.insert((a, i), val);
                }
                Kind::DecomVintage(a, i, v) => {
                    decom_v.insert((a, i, v), val);
                }
            }
        }
        let mut out = Vec::with_capacity(self.units.len());
        for &(a, y, v) in &self.units {
            let asset = &s.assets()[a];
            let id = AssetId(a);
            let value = match v {
                None => {
                    let mut u = s.asset_year(id, y).initial_units;
                    for &i in s.years() {
                        if alive(asset.technical_lifetime, i, y) {
                            u += inv.get(&(a, i)).copied().unwrap_or(0.0);
                            u -= decom.get(&(a, i)).copied().unwrap_or(0.0);
                        }
                    }
                    u
                }
                Some(v) => {
                    let strict = matches!(self.tracks[a], Track::Vintaged { strict: true, .. });
                    let mut u = s.vintage_params(id, y, v).initial_units + inv.get(&(a, v)).copied().unwrap_or(0.0);
                    for &i in s.years() {
                        let in_range = if strict { v < i } else { v <= i } && i <= y;
                        if in_range {
                            u -= decom_v.get(&(a, i, v)).copied().unwrap_or(0.0);
                        }
                    }
                    u
                }
            };
            if value < -1e-9 {
                return None;
            }
            out.push(value.max(0.0));
        }
        Some(out)
    }

    fn static_cost(&self, x: &[f64], units: &[f64]) -> f64 {
        let inv: f64 = self.decision_cost.iter().zip(x).map(|(c, v)| c * v).sum();
        let fixed: f64 = self.fixed_cost.iter().zip(units).map(|(c, u)| c * u).sum();
        inv + fixed
    }

    fn rhs(&self, units: &[f64]) -> Vec<f64> {
        self.capacity.iter().map(|row| row.scale * row.units.iter().map(|&k| units[k]).sum::<f64>()).collect()
    }

    /// Minimum flow cost under the given capacity limits.
    fn dispatch(&self, rhs: &[f64]) -> Result<Option<f64>, AnalysisError> {
        let mut m = LinearModel::new();
        let vars: Vec<_> = self
            .columns
            .iter()
            .enumerate()
            .map(|(k, _)| m.add_variable("x", vec![k.to_string()], Bounds::NON_NEGATIVE, false))
            .collect::<Result<_, _>>()
            .map_err(BuildError::from)?;
        for (k, (_, cost)) in self.columns.iter().enumerate() {
            m.add_objective_term(vars[k], *cost).map_err(BuildError::from)?;
        }
        for (r, (row, &b)) in self.capacity.iter().zip(rhs).enumerate() {
            if row.flows.is_empty() {
                continue;
            }
            m.add_constraint("cap", vec![r.to_string()], row.flows.iter().map(|&k| (vars[k], 1.0)), Sense::Le, b)
                .map_err(BuildError::from)?;
        }
        for (r, (cols, d)) in self.demand.iter().enumerate() {
            if cols.is_empty() {
                if *d > 0.0 {
                    return Ok(None);
                }
                continue;
            }
            m.add_constraint("dem", vec![r.to_string()], cols.iter().map(|&k| (vars[k], 1.0)), Sense::Ge, *d)
                .map_err(BuildError::from)?;
        }
        let sol = solve(&m, &SolveOptions::continuous())?;
        Ok(sol.is_optimal().then_some(sol.objective))
    }

    fn decode(&self, mut idx: usize, base: usize) -> Vec<f64> {
        (0..self.decisions.len())
            .map(|_| {
                let d = idx % base;
                idx /= base;
                d as f64
            })
            .collect()
    }
}

fn key(rhs: &[f64]) -> Vec<u64> {
    rhs.iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() }).collect()
}

/// Best objective over all integer assignments in `[0, max_units]^n`.
pub fn oracle_solve(
    scenario: &Scenario,
    method: MethodKind,
    policy: &CollapsePolicy,
    options: &OracleOptions,
) -> Result<OracleResult, AnalysisError> {
    let target = scenario_for(scenario, method).map_err(BuildError::from)?;
    let p = Problem::new(&target, method, policy)?;
    let n = p.decisions.len();
    if n > ORACLE_DECISION_LIMIT {
        return Err(AnalysisError::TooLarge { decisions: n, limit: ORACLE_DECISION_LIMIT });
    }
    let base = options.max_units as usize + 1;
    let candidates = base.pow(n as u32);
    let exec = options.execution;

    // accounting pass over the whole grid
    let statics: Vec<Option<f64>> = par::map_range(exec, candidates, CHUNK, |idx| {
        let x = p.decode(idx, base);
        p.accounting(&x).map(|u| p.static_cost(&x, &u))
    });
    let mut order: Vec<(f64, usize)> = statics.iter().enumerate().filter_map(|(i, c)| c.map(|c| (c, i))).collect();
    let accounting_feasible = order.len();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let rhs_of = |i: usize| p.rhs(&p.accounting(&p.decode(i, base)).expect("accounting-feasible candidate"));

    // dispatch costs are nonnegative, so candidates whose static cost already
    // exceeds the incumbent cannot win and are skipped
    let mut memo: HashMap<Vec<u64>, Option<f64>> = HashMap::new();
    let mut best: Option<(f64, usize)> = None;
    for chunk in order.chunks(CHUNK) {
        if let Some((b, _)) = best {
            if chunk[0].0 > b {
                break;
            }
        }
        let keyed: Vec<(f64, usize, Vec<f64>)> = chunk.iter().map(|&(c, i)| (c, i, rhs_of(i))).collect();
        let mut fresh: Vec<&[f64]> = Vec::new();
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        for (_, _, rhs) in &keyed {
            let k = key(rhs);
            if !memo.contains_key(&k) && seen.insert(k) {
                fresh.push(rhs);
            }
        }
        let solved = par::map(exec, &fresh, |rhs| p.dispatch(rhs));
        for (rhs, r) in fresh.into_iter().zip(solved) {
            memo.insert(key(rhs), r?);
        }
        for (static_cost, i, rhs) in &keyed {
            if let Some(d) = memo[&key(rhs)] {
                let total = static_cost + d;
                let better = match best {
                    None => true,
                    Some((b, bi)) => total < b || (total == b && *i < bi),
                };
                if better {
                    best = Some((total, *i));
                }
            }
        }
    }
    let best_assignment = match best {
        Some((_, i)) => p.decisions.iter().map(|(name, _)| name.clone()).zip(p.decode(i, base)).collect(),
        None => BTreeMap::new(),
    };
    Ok(OracleResult {
        method,
        policy: (method == MethodKind::Compact).then(|| policy.kind()),
        best_objective: best.map(|(b, _)| b),
        best_assignment,
        candidates,
        accounting_feasible,
        dispatch_solves: memo.len(),
    })
}

/// Objective of one assignment (decision name to value, missing names are
/// zero), or `None` if its accounting or dispatch is infeasible.
///
/// Values within 1e-6 of an integer are rounded first.
pub fn evaluate_assignment(
    scenario: &Scenario,
    method: MethodKind,
    policy: &CollapsePolicy,
    assignment: &BTreeMap<String, f64>,
) -> Result<Option<f64>, AnalysisError> {
    let target = scenario_for(scenario, method).map_err(BuildError::from)?;
    let p = Problem::new(&target, method, policy)?;
    let x: Vec<f64> = p
        .decisions
        .iter()
        .map(|(name, _)| {
            let v = assignment.get(name).copied().unwrap_or(0.0);
            if (v - v.round()).abs() <= 1e-6 {
                v.round()
            } else {
                v
            }
        })
        .collect();
    let Some(units) = p.accounting(&x) else {
        return Ok(None);
    };
    Ok(p.dispatch(&p.rhs(&units))?.map(|d| p.static_cost(&x, &units) + d))
}
