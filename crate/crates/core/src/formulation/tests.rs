use std::path::PathBuf;

use plan_lp::{solve, Bounds, Sense, SolveOptions, VarId};

use super::*;
use crate::error::BuildError;
use crate::scenario::{load_scenario, InvestmentMethod, Scenario, Year};

fn fixture(name: &str) -> Scenario {
    load_scenario(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)).unwrap()
}

fn as_simple(s: &Scenario) -> Scenario {
    s.with_investment_method(InvestmentMethod::Simple).unwrap()
}

fn continuous(b: &BuildOutput) -> plan_lp::Solution {
    let sol = solve(&b.model, &SolveOptions::continuous()).unwrap();
    assert!(sol.is_optimal(), "{:?}", sol.status);
    sol
}

fn groups_with(b: &BuildOutput, prefix: &str) -> usize {
    b.model.variables().iter().filter(|v| v.group.starts_with(prefix)).count()
}

#[test]
fn wind3_counts_per_method() {
    let s = fixture("wind3");
    let simple = build_simple(&as_simple(&s)).unwrap();
    assert_eq!(simple.vars.inv.len(), 3);
    assert_eq!(simple.vars.decom_simple.len(), 3);
    assert_eq!(simple.vars.available_simple.len(), 3);
    assert_eq!(simple.rows.capacity.len(), 3);

    let vintage = build_vintage(&s, &VintageOptions::default()).unwrap();
    assert_eq!(vintage.vars.inv.len(), 3);
    assert_eq!(vintage.vars.decom_by_vintage.len(), 6);
    assert_eq!(vintage.vars.flow_vintage.len(), 6);
    assert_eq!(vintage.rows.capacity_vintage.len(), 6);

    let compact = build_compact(&s, &CollapsePolicy::Operational).unwrap();
    assert_eq!(compact.vars.inv.len(), 3);
    let decom: Vec<_> = compact.vars.decom_by_vintage.keys().map(|&(_, i, v)| (i.0, v.0)).collect();
    assert_eq!(decom, vec![(2040, 2030), (2050, 2030), (2050, 2040)]);
    assert_eq!(compact.vars.flow.len(), 3);
    assert_eq!(compact.rows.capacity.len(), 3);
    assert_eq!(compact.rows.units_by_vintage.len(), 6);
}

#[test]
fn lifetime_one_collapses_vintage_pairs() {
    let mut t = fixture("wind3").tables().clone();
    t.assets[0].technical_lifetime = 1;
    let s = Scenario::from_tables(t).unwrap();
    let vintage = build_vintage(&s, &VintageOptions::default()).unwrap();
    assert_eq!(vintage.vars.flow_vintage.len(), 3);
    assert_eq!(vintage.rows.capacity_vintage.len(), 3);
}

#[test]
fn simple_rejects_compact_assets() {
    match build_simple(&fixture("wind3")) {
        Err(BuildError::WrongMethod { asset, method, .. }) => assert_eq!((asset.as_str(), method), ("wind", "simple")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn toy1_available_2040_forced_to_two() {
    let s = fixture("toy1");
    let mut b = build_simple(&s).unwrap();
    let wind = s.asset_id("wind").unwrap();
    let inv = b.vars.inv[&(wind, Year(2030))];
    b.model.set_bounds(inv, Bounds::fixed(1.0)).unwrap();
    b.model.set_bounds(b.vars.inv[&(wind, Year(2040))], Bounds::fixed(0.0)).unwrap();
    for &id in b.vars.decom_simple.values() {
        b.model.set_bounds(id, Bounds::fixed(0.0)).unwrap();
    }
    let sol = continuous(&b);
    assert_eq!(sol.value(b.vars.available_simple[&(wind, Year(2040))]), 2.0);
}

#[test]
fn toy1_simple_continuous_optimum() {
    let s = fixture("toy1");
    let b = build_simple(&s).unwrap();
    let sol = continuous(&b);
    assert!((sol.objective - 14250.0).abs() < 1e-9, "{}", sol.objective);
    let wind = s.asset_id("wind").unwrap();
    assert!((sol.value(b.vars.inv[&(wind, Year(2030))]) - 0.5).abs() < 1e-9);
    for (&(_, slot), &id) in &b.vars.flow {
        assert!((sol.value(id) - s.demand(s.asset_id("demand").unwrap(), slot)).abs() < 1e-9);
    }
}

#[test]
fn simple_has_no_vintage_index() {
    for name in ["toy1", "wind3", "two_tech", "legacy", "gappy"] {
        let s = as_simple(&fixture(name));
        let b = build_simple(&s).unwrap();
        assert_eq!(groups_with(&b, "decom_vintage") + groups_with(&b, "decom_compact") + groups_with(&b, "flow_vintage"), 0);
        for v in b.model.variables() {
            let expected = if v.group == GROUP_FLOW { 4 } else { 2 };
            assert_eq!(v.index.len(), expected, "{} {:?}", v.group, v.index);
        }
    }
}

#[test]
fn cost_breakdown_sums_to_objective() {
    for name in ["toy1", "toy1v", "two_tech", "legacy", "gappy"] {
        let s = fixture(name);
        for method in MethodKind::ALL {
            let s = if method == MethodKind::Simple { as_simple(&s) } else { s.with_investment_method(InvestmentMethod::Compact).unwrap() };
            let b = build(&s, method, &CollapsePolicy::Operational).unwrap();
            let sol = continuous(&b);
            let cb = CostBreakdown::of(&b.model, &sol.values);
            assert!((cb.total() - sol.objective).abs() <= 1e-9 * sol.objective.abs().max(1.0), "{name} {method}");
            assert!(cb.investment >= 0.0 && cb.fixed >= 0.0 && cb.variable >= 0.0);
        }
    }
}

#[test]
fn compact_flows_carry_no_vintage_and_match_simple_capacity_rows() {
    for name in ["toy1v", "wind3", "two_tech", "legacy", "gappy"] {
        let s = fixture(name);
        let c = build_compact(&s.with_investment_method(InvestmentMethod::Compact).unwrap(), &CollapsePolicy::Min).unwrap();
        let simple = build_simple(&as_simple(&s)).unwrap();
        assert!(c.vars.flow_vintage.is_empty());
        assert!(c.model.variables().iter().filter(|v| v.group == GROUP_FLOW).all(|v| v.index.len() == 4));
        assert_eq!(c.rows.capacity.len(), simple.rows.capacity.len(), "{name}");
    }
}

#[test]
fn vintage_group_counts_equal_domain_size() {
    for name in ["toy1v", "wind3", "two_tech", "legacy", "gappy"] {
        let s = fixture(name);
        let b = build_vintage(&s, &VintageOptions::default()).unwrap();
        for a in s.producers().filter(|&a| s.asset(a).investment_method == InvestmentMethod::Compact) {
            let d = s.domain(a).len();
            let prod: std::collections::BTreeSet<_> = b
                .vars
                .flow_vintage
                .keys()
                .filter(|(f, _, _)| s.flow(*f).from == a)
                .map(|(_, v, slot)| (slot.year, *v))
                .collect();
            let cap: std::collections::BTreeSet<_> =
                b.rows.capacity_vintage.keys().filter(|(aa, _, _)| *aa == a).map(|(_, v, slot)| (slot.year, *v)).collect();
            assert_eq!(prod.len(), d, "{name}");
            assert_eq!(cap.len(), d, "{name}");
        }
    }
}

#[test]
fn missing_vintage_profile_without_fallback() {
    let s = fixture("wind3");
    let opts = VintageOptions { allow_profile_fallback: false };
    assert!(matches!(build_vintage(&s, &opts), Err(BuildError::MissingVintageProfile { .. })));
    // toy1v has profiles for every active vintage
    assert!(build_vintage(&fixture("toy1v"), &opts).is_ok());
}

#[test]
fn policy_names() {
    assert_eq!("min".parse::<PolicyKind>().unwrap(), PolicyKind::Min);
    assert_eq!("capacity-weighted".parse::<PolicyKind>().unwrap(), PolicyKind::Weighted);
    assert!(matches!("median".parse::<PolicyKind>(), Err(BuildError::UnknownPolicy(p)) if p == "median"));
    assert!(matches!(CollapsePolicy::from_kind(PolicyKind::Weighted), Err(BuildError::MissingReferenceSolve)));
    assert!("hybrid".parse::<MethodKind>().is_err());
}

#[test]
fn collapse_policies_on_toy1v() {
    let s = fixture("toy1v");
    let wind = s.asset_id("wind").unwrap();
    let slot = s.slots(Year(2040))[0];
    let p = |pol: &CollapsePolicy| collapse_profile(&s, wind, slot, pol).unwrap();
    assert_eq!(p(&CollapsePolicy::Operational), 0.9);
    assert_eq!(p(&CollapsePolicy::Min), 0.8);
    assert_eq!(p(&CollapsePolicy::Max), 1.0);
    assert!((p(&CollapsePolicy::Mean) - 0.9).abs() < 1e-15);
    // zero weights fall back to the mean
    assert!((p(&CollapsePolicy::Weighted(VintageWeights::default())) - 0.9).abs() < 1e-15);
    let mut w = VintageWeights::default();
    w.0.insert((wind, Year(2040), Year(2030)), 3.0);
    w.0.insert((wind, Year(2040), Year(2040)), 1.0);
    assert!((p(&CollapsePolicy::Weighted(w)) - 0.95).abs() < 1e-15);
    // a single active vintage in 2030
    let early = s.slots(Year(2030))[0];
    assert_eq!(collapse_profile(&s, wind, early, &CollapsePolicy::Min).unwrap(), 1.0);
}

#[test]
fn toy1v_conservatism_and_mirror() {
    let s = fixture("toy1v");
    let vintage = continuous(&build_vintage(&s, &VintageOptions::default()).unwrap()).objective;
    let min = continuous(&build_compact(&s, &CollapsePolicy::Min).unwrap()).objective;
    let max = continuous(&build_compact(&s, &CollapsePolicy::Max).unwrap()).objective;
    assert!(min >= vintage - 1e-9, "min {min} vintage {vintage}");
    assert!(max <= vintage + 1e-9, "max {max} vintage {vintage}");
    // regression values, first computed by the enumeration oracle and the simplex
    assert!((vintage - 30250.0).abs() < 1e-7);
    assert!((min - 37281.25).abs() < 1e-7);
    assert!((max - 29000.0).abs() < 1e-7);
}

#[test]
fn homogeneous_fixtures_agree_across_methods() {
    for name in ["toy1", "wind3", "two_tech", "legacy", "gappy"] {
        let s = fixture(name);
        let simple = continuous(&build_simple(&as_simple(&s)).unwrap()).objective;
        let cs = s.with_investment_method(InvestmentMethod::Compact).unwrap();
        let vintage = continuous(&build_vintage(&cs, &VintageOptions::default()).unwrap()).objective;
        let compact = continuous(&build_compact(&cs, &CollapsePolicy::Operational).unwrap()).objective;
        for (m, v) in [("vintage", vintage), ("compact", compact)] {
            assert!((v - simple).abs() <= 1e-7 * simple.abs().max(1.0), "{name}: simple {simple} {m} {v}");
        }
    }
}

#[test]
fn compact_telescopes_to_simple_accounting() {
    for name in ["toy1", "wind3", "two_tech", "gappy"] {
        let s = fixture(name).with_investment_method(InvestmentMethod::Compact).unwrap();
        let c = build_compact(&s, &CollapsePolicy::Operational).unwrap();
        let sol = continuous(&c);
        let simple = build_simple(&as_simple(&s)).unwrap();
        // map compact values onto the simple variables
        let mut x = vec![0.0; simple.model.num_variables()];
        for (k, &id) in &simple.vars.inv {
            x[id.0] = sol.value(c.vars.inv[k]);
        }
        for (&(a, y), &id) in &simple.vars.available_simple {
            x[id.0] = if s.asset(a).investment_method == InvestmentMethod::Compact {
                s.domain(a).vintages_in(y).map(|v| sol.value(c.vars.available_by_vintage[&(a, y, v)])).sum()
            } else {
                sol.value(c.vars.available_simple[&(a, y)])
            };
        }
        for (&(a, i), &id) in &simple.vars.decom_simple {
            x[id.0] = c.vars.decom_simple.get(&(a, i)).map_or(0.0, |&d| sol.value(d));
        }
        assert!(c.vars.decom_by_vintage.values().all(|&d| sol.value(d).abs() < 1e-9), "{name}: decom used");
        for &row in simple.rows.units_simple.values() {
            let r = simple.model.constraint(row);
            assert_eq!(r.sense, Sense::Eq);
            assert!((r.activity(&x) - r.rhs).abs() <= 1e-9, "{name}: {}", simple.model.constraint_name(row));
        }
    }
}

#[test]
fn aggregated_vintage_flows_fit_weighted_compact() {
    for name in ["toy1v", "two_tech", "gappy"] {
        let s = fixture(name).with_investment_method(InvestmentMethod::Compact).unwrap();
        let v = build_vintage(&s, &VintageOptions::default()).unwrap();
        let vs = continuous(&v);
        let weights = reference_weights(&s).unwrap();
        let c = build_compact(&s, &CollapsePolicy::Weighted(weights)).unwrap();
        let mut x = vec![0.0; c.model.num_variables()];
        for (&(f, _, slot), &id) in &v.vars.flow_vintage {
            x[c.vars.flow[&(f, slot)].0] += vs.value(id);
        }
        for (k, &id) in &v.vars.flow {
            x[c.vars.flow[k].0] = vs.value(id);
        }
        for (k, &id) in &v.vars.available_by_vintage {
            x[c.vars.available_by_vintage[k].0] = vs.value(id);
        }
        for (k, &id) in &v.vars.available_simple {
            x[c.vars.available_simple[k].0] = vs.value(id);
        }
        for &row in c.rows.capacity.values().chain(c.rows.demand.values()) {
            let r = c.model.constraint(row);
            let act = r.activity(&x);
            let ok = match r.sense {
                Sense::Le => act <= r.rhs + 1e-7,
                Sense::Ge => act >= r.rhs - 1e-7,
                Sense::Eq => (act - r.rhs).abs() <= 1e-7,
            };
            assert!(ok, "{name}: {} activity {act} rhs {}", c.model.constraint_name(row), r.rhs);
        }
    }
}

#[test]
fn operation_assets_get_simple_accounting_everywhere() {
    let s = fixture("legacy");
    let coal = s.asset_id("coal").unwrap();
    for method in [MethodKind::Vintage, MethodKind::Compact] {
        let b = build(&s, method, &CollapsePolicy::Operational).unwrap();
        assert_eq!(b.vars.decom_simple.keys().filter(|(a, _)| *a == coal).count(), 3);
        assert!(!b.vars.inv.keys().any(|(a, _)| *a == coal));
    }
}

#[test]
fn builds_are_deterministic() {
    for name in ["two_tech", "legacy"] {
        let s = fixture(name);
        for method in MethodKind::ALL {
            let s = if method == MethodKind::Simple { as_simple(&s) } else { s.clone() };
            let a = build(&s, method, &CollapsePolicy::Mean).unwrap();
            let b = build(&s, method, &CollapsePolicy::Mean).unwrap();
            let names = |b: &BuildOutput| (0..b.model.num_variables()).map(|j| b.model.var_name(VarId(j))).collect::<Vec<_>>();
            assert_eq!(names(&a), names(&b));
            assert_eq!(a.model.canonical(), b.model.canonical());
        }
    }
}
