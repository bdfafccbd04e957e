use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{scenario_for, Table};
use crate::error::BuildError;
use crate::formulation::{build, BuildOutput, CollapsePolicy, MethodKind};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct Count {
    /// Index groups at year / vintage-year granularity, ignoring time blocks.
    pub groups: usize,
    /// Scalar entries of the fully expanded model.
    pub scalars: usize,
}

/// Model size of one method, computed from the index maps of a build.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub method: MethodKind,
    pub decom_convention: &'static str,
    /// Keys: `inv`, `decom`, `available`, `production`.
    pub variables: BTreeMap<&'static str, Count>,
    /// Keys: `available`, `capacity`, `demand`.
    pub constraints: BTreeMap<&'static str, Count>,
    pub total_variables: usize,
    pub total_constraints: usize,
}

pub fn decom_convention(method: MethodKind) -> &'static str {
    match method {
        MethodKind::Simple => "one per asset and milestone year",
        MethodKind::Vintage => "one per active (year i, vintage v) pair with v <= i",
        MethodKind::Compact => "one per active (year i, vintage v) pair with v < i",
    }
}

fn flat(n: usize) -> Count {
    Count { groups: n, scalars: n }
}

/// Size of `method` on `scenario` (retargeted); no solve.
pub fn size_report(scenario: &Scenario, method: MethodKind) -> Result<SizeReport, BuildError> {
    let target = scenario_for(scenario, method)?;
    // the policy only changes coefficients, never the index sets
    let b = build(&target, method, &CollapsePolicy::Operational)?;
    Ok(from_build(&target, &b))
}

pub(crate) fn from_build(s: &Scenario, b: &BuildOutput) -> SizeReport {
    let v = &b.vars;
    let r = &b.rows;
    let mut production: BTreeSet<(usize, i32, Option<i32>)> = BTreeSet::new();
    for &(f, slot) in v.flow.keys() {
        production.insert((s.flow(f).from.0, slot.year.0, None));
    }
    for &(f, vin, slot) in v.flow_vintage.keys() {
        production.insert((s.flow(f).from.0, slot.year.0, Some(vin.0)));
    }
    let mut capacity: BTreeSet<(usize, i32, Option<i32>)> = BTreeSet::new();
    for &(a, slot) in r.capacity.keys() {
        capacity.insert((a.0, slot.year.0, None));
    }
    for &(a, vin, slot) in r.capacity_vintage.keys() {
        capacity.insert((a.0, slot.year.0, Some(vin.0)));
    }
    let demand: BTreeSet<_> = r.demand.keys().map(|(c, slot)| (c.0, slot.year)).collect();

    let variables = BTreeMap::from([
        ("inv", flat(v.inv.len())),
        ("decom", flat(v.decom_simple.len() + v.decom_by_vintage.len())),
        ("available", flat(v.available_simple.len() + v.available_by_vintage.len())),
        ("production", Count { groups: production.len(), scalars: v.flow.len() + v.flow_vintage.len() }),
    ]);
    let constraints = BTreeMap::from([
        ("available", flat(r.units_simple.len() + r.units_by_vintage.len())),
        ("capacity", Count { groups: capacity.len(), scalars: r.capacity.len() + r.capacity_vintage.len() }),
        ("demand", Count { groups: demand.len(), scalars: r.demand.len() }),
    ]);
    SizeReport {
        method: b.method,
        decom_convention: decom_convention(b.method),
        variables,
        constraints,
        total_variables: b.model.num_variables(),
        total_constraints: b.model.num_constraints(),
    }
}

impl SizeReport {
    /// Aligned text for several methods side by side.
    pub fn render_text(reports: &[SizeReport]) -> String {
        let mut header = vec!["".to_string()];
        for r in reports {
            header.push(format!("{} groups", r.method));
            header.push(format!("{} scalars", r.method));
        }
        let mut t = Table::new(header);
        let section = |t: &mut Table, kind: &str, pick: &dyn Fn(&SizeReport) -> &BTreeMap<&'static str, Count>| {
            let Some(first) = reports.first() else { return };
            for key in pick(first).keys() {
                let mut row = vec![format!("{kind} {key}")];
                for r in reports {
                    let c = pick(r)[key];
                    row.push(c.groups.to_string());
                    row.push(c.scalars.to_string());
                }
                t.row(row);
            }
        };
        section(&mut t, "var", &|r| &r.variables);
        section(&mut t, "row", &|r| &r.constraints);
        let totals: [(&str, fn(&SizeReport) -> usize); 2] =
            [("total variables", |r| r.total_variables), ("total constraints", |r| r.total_constraints)];
        for (label, pick) in totals {
            let mut row = vec![label.to_string()];
            for r in reports {
                row.push("-".to_string());
                row.push(pick(r).to_string());
            }
            t.row(row);
        }
        let mut out = t.to_string();
        for r in reports {
            out.push_str(&format!("decom convention ({}): {}\n", r.method, r.decom_convention));
        }
        out
    }

    /// `{"schema": 1, "methods": [...]}`.
    pub fn render_json(reports: &[SizeReport]) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: u32,
            methods: &'a [SizeReport],
        }
        let mut s = serde_json::to_string_pretty(&Doc { schema: super::SCHEMA_VERSION, methods: reports }).expect("serializable");
        s.push('\n');
        s
    }
}
