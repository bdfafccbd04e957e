use std::collections::BTreeMap;

use plan_lp::{Bounds, LinearModel, Sense, VarId};

use super::*;
use crate::error::BuildError;
use crate::scenario::{AssetId, FlowId, InvestmentMethod, Scenario, Slot, Year};

/// How one producer's units are tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Accounting {
    Simple,
    /// Per-vintage units and production; decommissioning allowed from `i = v`.
    Vintage,
    /// Per-vintage units, aggregate production; decommissioning only for `v < i`.
    Compact,
}

pub(super) struct Builder<'a> {
    s: &'a Scenario,
    model: LinearModel,
    vars: VarMaps,
    rows: RowMaps,
    accounting: Vec<Accounting>,
}

fn ys(y: Year) -> String {
    y.to_string()
}

impl<'a> Builder<'a> {
    /// `vintaged` is the accounting applied to assets with method `compact`.
    pub(super) fn new(s: &'a Scenario, vintaged: Accounting) -> Self {
        let accounting = s
            .assets()
            .iter()
            .map(|a| if a.investment_method == InvestmentMethod::Compact { vintaged } else { Accounting::Simple })
            .collect();
        Builder { s, model: LinearModel::new(), vars: VarMaps::default(), rows: RowMaps::default(), accounting }
    }

    fn name(&self, a: AssetId) -> String {
        self.s.asset(a).name.clone()
    }

    fn var(&mut self, group: &str, index: Vec<String>, integer: bool, cost: f64) -> Result<VarId, BuildError> {
        let id = self.model.add_variable(group, index, Bounds::NON_NEGATIVE, integer)?;
        if cost != 0.0 {
            self.model.add_objective_term(id, cost)?;
        }
        Ok(id)
    }

    /// Investment, decommissioning and available-units variables.
    pub(super) fn add_unit_variables(&mut self) -> Result<(), BuildError> {
        let s = self.s;
        for a in s.producers() {
            let asset = s.asset(a);
            for &v in &asset.investable_years {
                let cost = s.asset_year(a, v).investment_cost * asset.unit_capacity;
                let id = self.var(GROUP_INV, vec![self.name(a), ys(v)], true, cost)?;
                self.vars.inv.insert((a, v), id);
            }
            match self.accounting[a.0] {
                Accounting::Simple => {
                    for &i in s.years() {
                        let id = self.var(GROUP_DECOM_SIMPLE, vec![self.name(a), ys(i)], true, 0.0)?;
                        self.vars.decom_simple.insert((a, i), id);
                    }
                    for &y in s.years() {
                        let cost = s.asset_year(a, y).fixed_cost * asset.unit_capacity;
                        let id = self.var(GROUP_AVAILABLE_SIMPLE, vec![self.name(a), ys(y)], false, cost)?;
                        self.vars.available_simple.insert((a, y), id);
                    }
                }
                acc => {
                    let (decom_group, avail_group) = match acc {
                        Accounting::Vintage => (GROUP_DECOM_VINTAGE, GROUP_AVAILABLE_VINTAGE),
                        _ => (GROUP_DECOM_COMPACT, GROUP_AVAILABLE_COMPACT),
                    };
                    let pairs = s.domain(a).pairs.clone();
                    for &(i, v) in &pairs {
                        if v < i || (acc == Accounting::Vintage && v == i) {
                            let id = self.var(decom_group, vec![self.name(a), ys(i), ys(v)], true, 0.0)?;
                            self.vars.decom_by_vintage.insert((a, i, v), id);
                        }
                    }
                    for &(y, v) in &pairs {
                        let cost = s.vintage_params(a, y, v).fixed_cost * asset.unit_capacity;
                        let id = self.var(avail_group, vec![self.name(a), ys(y), ys(v)], false, cost)?;
                        self.vars.available_by_vintage.insert((a, y, v), id);
                    }
                }
            }
        }
        Ok(())
    }

    pub(super) fn add_flow_variables(&mut self) -> Result<(), BuildError> {
        let s = self.s;
        for (fi, edge) in s.flows().iter().enumerate() {
            let f = FlowId(fi);
            let from = edge.from;
            for (&y, &cost) in &edge.variable_cost {
                for slot in s.slots(y) {
                    let [yl, kl, bl] = s.slot_labels(slot);
                    let c = s.slot_weight(slot) * cost;
                    if self.accounting[from.0] == Accounting::Vintage {
                        let vintages: Vec<Year> = s.domain(from).vintages_in(y).collect();
                        for v in vintages {
                            let index = vec![edge.id.clone(), ys(v), yl.clone(), kl.clone(), bl.clone()];
                            let id = self.var(GROUP_FLOW_VINTAGE, index, false, c)?;
                            self.vars.flow_vintage.insert((f, v, slot), id);
                        }
                    } else {
                        let id = self.var(GROUP_FLOW, vec![edge.id.clone(), yl, kl, bl], false, c)?;
                        self.vars.flow.insert((f, slot), id);
                    }
                }
            }
        }
        Ok(())
    }

    /// Defining rows of the available-units variables.
    pub(super) fn add_unit_rows(&mut self) -> Result<(), BuildError> {
        let s = self.s;
        for a in s.producers() {
            let asset = s.asset(a);
            match self.accounting[a.0] {
                Accounting::Simple => {
                    for &y in s.years() {
                        // available - sum(inv in window) + sum(decom in window) = initial
                        let mut terms = vec![(self.vars.available_simple[&(a, y)], 1.0)];
                        for &i in s.years() {
                            if !asset.alive(i, y) {
                                continue;
                            }
                            if let Some(&id) = self.vars.inv.get(&(a, i)) {
                                terms.push((id, -1.0));
                            }
                            terms.push((self.vars.decom_simple[&(a, i)], 1.0));
                        }
                        let rhs = s.asset_year(a, y).initial_units;
                        let id = self.model.add_constraint(ROW_UNITS_SIMPLE, vec![self.name(a), ys(y)], terms, Sense::Eq, rhs)?;
                        self.rows.units_simple.insert((a, y), id);
                    }
                }
                acc => {
                    let group = if acc == Accounting::Vintage { ROW_UNITS_VINTAGE } else { ROW_UNITS_COMPACT };
                    let pairs = s.domain(a).pairs.clone();
                    for &(y, v) in &pairs {
                        let mut terms = vec![(self.vars.available_by_vintage[&(a, y, v)], 1.0)];
                        if let Some(&id) = self.vars.inv.get(&(a, v)) {
                            terms.push((id, -1.0));
                        }
                        for &i in s.years().iter().filter(|&&i| v <= i && i <= y) {
                            if let Some(&id) = self.vars.decom_by_vintage.get(&(a, i, v)) {
                                terms.push((id, 1.0));
                            }
                        }
                        let rhs = s.vintage_params(a, y, v).initial_units;
                        let id = self.model.add_constraint(group, vec![self.name(a), ys(y), ys(v)], terms, Sense::Eq, rhs)?;
                        self.rows.units_by_vintage.insert((a, y, v), id);
                    }
                }
            }
        }
        Ok(())
    }

    fn outflow_terms(&self, a: AssetId, slot: Slot, vintage: Option<Year>) -> Vec<(VarId, f64)> {
        self.s
            .flows_out(a, slot.year)
            .into_iter()
            .filter_map(|f| match vintage {
                Some(v) => self.vars.flow_vintage.get(&(f, v, slot)),
                None => self.vars.flow.get(&(f, slot)),
            })
            .map(|&id| (id, 1.0))
            .collect()
    }

    /// Capacity rows. `profile` gives the aggregate profile for compact assets.
    pub(super) fn add_capacity_rows(
        &mut self,
        profile: &mut dyn FnMut(AssetId, Slot) -> Result<f64, BuildError>,
        vintage_profile: &mut dyn FnMut(AssetId, Year, Slot) -> Result<f64, BuildError>,
    ) -> Result<(), BuildError> {
        let s = self.s;
        for a in s.producers() {
            for &y in s.years() {
                let capacity = s.asset_year(a, y).capacity;
                for slot in s.slots(y) {
                    let [yl, kl, bl] = s.slot_labels(slot);
                    match self.accounting[a.0] {
                        Accounting::Simple => {
                            let p = s.profile(a, slot).ok_or_else(|| BuildError::MissingProfile {
                                asset: self.name(a),
                                slot: s.describe_slot(slot),
                            })?;
                            let mut terms = self.outflow_terms(a, slot, None);
                            terms.push((self.vars.available_simple[&(a, y)], -p * capacity));
                            let id = self.model.add_constraint(ROW_CAPACITY_SIMPLE, vec![self.name(a), yl, kl, bl], terms, Sense::Le, 0.0)?;
                            self.rows.capacity.insert((a, slot), id);
                        }
                        Accounting::Compact => {
                            let p = profile(a, slot)?;
                            let mut terms = self.outflow_terms(a, slot, None);
                            for v in s.domain(a).vintages_in(y) {
                                terms.push((self.vars.available_by_vintage[&(a, y, v)], -p * capacity));
                            }
                            let id = self.model.add_constraint(ROW_CAPACITY_COMPACT, vec![self.name(a), yl, kl, bl], terms, Sense::Le, 0.0)?;
                            self.rows.capacity.insert((a, slot), id);
                        }
                        Accounting::Vintage => {
                            let vintages: Vec<Year> = s.domain(a).vintages_in(y).collect();
                            for v in vintages {
                                let p = vintage_profile(a, v, slot)?;
                                let mut terms = self.outflow_terms(a, slot, Some(v));
                                terms.push((self.vars.available_by_vintage[&(a, y, v)], -p * capacity));
                                let index = vec![self.name(a), yl.clone(), ys(v), kl.clone(), bl.clone()];
                                let id = self.model.add_constraint(ROW_CAPACITY_VINTAGE, index, terms, Sense::Le, 0.0)?;
                                self.rows.capacity_vintage.insert((a, v, slot), id);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `sum(inflow) >= demand` for every consumer slot with an active inflow edge.
    pub(super) fn add_demand_rows(&mut self) -> Result<(), BuildError> {
        let s = self.s;
        for c in s.consumers() {
            for &y in s.years() {
                let inflows = s.flows_in(c, y);
                if inflows.is_empty() {
                    continue;
                }
                for slot in s.slots(y) {
                    let mut terms = Vec::new();
                    for &f in &inflows {
                        if let Some(&id) = self.vars.flow.get(&(f, slot)) {
                            terms.push((id, 1.0));
                        }
                        let vintaged: Vec<VarId> =
                            self.vars.flow_vintage.range((f, Year(i32::MIN), slot)..).take_while(|((ff, _, _), _)| *ff == f).filter(|((_, _, sl), _)| *sl == slot).map(|(_, &id)| id).collect();
                        terms.extend(vintaged.into_iter().map(|id| (id, 1.0)));
                    }
                    let [yl, kl, bl] = s.slot_labels(slot);
                    let id = self.model.add_constraint(ROW_DEMAND, vec![self.name(c), yl, kl, bl], terms, Sense::Ge, s.demand(c, slot))?;
                    self.rows.demand.insert((c, slot), id);
                }
            }
        }
        Ok(())
    }

    pub(super) fn finish(
        self,
        method: MethodKind,
        policy: Option<PolicyKind>,
        collapsed_profiles: BTreeMap<(AssetId, Slot), f64>,
    ) -> BuildOutput {
        BuildOutput { method, policy, model: self.model, vars: self.vars, rows: self.rows, collapsed_profiles }
    }
}
