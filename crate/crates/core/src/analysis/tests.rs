use std::collections::BTreeMap;
use std::path::PathBuf;

use plan_lp::Mode;

use super::*;
use crate::formulation::{CollapsePolicy, MethodKind, PolicyKind};
use crate::par::Execution;
use crate::scenario::{load_scenario, Scenario};
use crate::synthetic::{random_scenario, ProfileMode, SyntheticOptions};

fn fixture(name: &str) -> Scenario {
    load_scenario(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)).unwrap()
}

fn counts(r: &SizeReport) -> [usize; 5] {
    [
        r.variables["inv"].groups,
        r.variables["decom"].groups,
        r.variables["production"].groups,
        r.constraints["capacity"].groups,
        r.variables["available"].groups,
    ]
}

/// Decision values of an integer solve keyed like the oracle's assignment.
fn decisions(run: &MethodRun) -> BTreeMap<String, f64> {
    let m = &run.build.model;
    m.variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.integer)
        .map(|(i, _)| (m.var_name(plan_lp::VarId(i)), run.solution.values[i]))
        .collect()
}

#[test]
fn wind3_size_examples() {
    let s = fixture("wind3");
    assert_eq!(counts(&size_report(&s, MethodKind::Simple).unwrap())[..4], [3, 3, 3, 3]);
    assert_eq!(counts(&size_report(&s, MethodKind::Vintage).unwrap())[..4], [3, 6, 6, 6]);
    assert_eq!(counts(&size_report(&s, MethodKind::Compact).unwrap()), [3, 3, 3, 3, 6]);
}

#[test]
fn size_totals_and_granularity() {
    for name in ["toy1", "two_tech", "legacy", "gappy"] {
        let s = fixture(name);
        for m in MethodKind::ALL {
            let r = size_report(&s, m).unwrap();
            for c in r.variables.values().chain(r.constraints.values()) {
                assert!(c.scalars >= c.groups);
            }
            assert_eq!(r.total_variables, r.variables.values().map(|c| c.scalars).sum::<usize>());
            assert_eq!(r.total_constraints, r.constraints.values().map(|c| c.scalars).sum::<usize>());
        }
    }
}

#[test]
fn size_monotone_with_overlapping_vintages() {
    let mut scenarios = vec![fixture("wind3"), fixture("two_tech")];
    let opts = SyntheticOptions { max_years: 4, ..SyntheticOptions::default() };
    scenarios.extend((0..40).filter_map(|seed| random_scenario(seed, &opts).ok()));
    let mut checked = 0;
    for s in &scenarios {
        // a producer year without any active vintage has no vintage-indexed
        // production at all, so the strict ordering needs every year covered
        let covered = s.producers().all(|a| s.years().iter().all(|&y| s.domain(a).vintages_in(y).count() >= 1));
        let overlapping = s.producers().any(|a| s.years().iter().any(|&y| s.domain(a).vintages_in(y).count() >= 2));
        if !(covered && overlapping) {
            continue;
        }
        let [simple, vintage, compact] = MethodKind::ALL.map(|m| size_report(s, m).unwrap());
        assert_eq!(simple.variables["production"].groups, compact.variables["production"].groups);
        assert!(compact.variables["production"].groups < vintage.variables["production"].groups);
        assert_eq!(simple.constraints["capacity"].groups, compact.constraints["capacity"].groups);
        assert!(compact.constraints["capacity"].groups < vintage.constraints["capacity"].groups);
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} scenarios had overlapping vintages");
}

#[test]
fn size_report_is_deterministic() {
    let s = fixture("two_tech");
    let a: Vec<_> = MethodKind::ALL.iter().map(|&m| size_report(&s, m).unwrap()).collect();
    let b: Vec<_> = MethodKind::ALL.iter().map(|&m| size_report(&s, m).unwrap()).collect();
    assert_eq!(SizeReport::render_json(&a), SizeReport::render_json(&b));
    assert_eq!(SizeReport::render_text(&a), SizeReport::render_text(&b));
    assert!(SizeReport::render_json(&a).starts_with("{\n  \"schema\": 1,"));
}

#[test]
fn oracle_matches_integer_solve_on_toy1() {
    let s = fixture("toy1");
    let oracle = oracle_solve(&s, MethodKind::Simple, &CollapsePolicy::Operational, &OracleOptions::default()).unwrap();
    let run = run_method(&s, MethodKind::Simple, &CollapsePolicy::Operational, Mode::Integer).unwrap();
    assert!(run.solution.is_optimal());
    assert_eq!(oracle.best_objective, Some(run.solution.objective));
    assert_eq!(oracle.candidates, 3usize.pow(4));
    let eval = evaluate_assignment(&s, MethodKind::Simple, &CollapsePolicy::Operational, &oracle.best_assignment).unwrap();
    assert_eq!(eval, oracle.best_objective);
    let eval = evaluate_assignment(&s, MethodKind::Simple, &CollapsePolicy::Operational, &decisions(&run)).unwrap();
    assert_eq!(eval, Some(run.solution.objective));
}

#[test]
fn oracle_agrees_across_small_fixtures() {
    for name in ["toy1", "toy1v", "wind3", "gappy"] {
        let s = fixture(name);
        for m in MethodKind::ALL {
            let pol = CollapsePolicy::Operational;
            let oracle = oracle_solve(&s, m, &pol, &OracleOptions::default()).unwrap();
            let run = run_method(&s, m, &pol, Mode::Integer).unwrap();
            let solved = run.solution.is_optimal().then_some(run.solution.objective);
            assert_eq!(oracle.best_objective, solved, "{name} {m}");
            let eval = evaluate_assignment(&s, m, &pol, &decisions(&run)).unwrap();
            assert_eq!(eval, solved, "{name} {m}");
        }
    }
}

#[test]
fn oracle_with_zero_demand_builds_nothing() {
    let mut t = fixture("wind3").tables().clone();
    for d in &mut t.demand {
        d.value = 0.0;
    }
    let s = Scenario::from_tables(t).unwrap();
    for m in MethodKind::ALL {
        let r = oracle_solve(&s, m, &CollapsePolicy::Operational, &OracleOptions::default()).unwrap();
        assert_eq!(r.best_objective, Some(0.0));
        assert!(r.best_assignment.iter().filter(|(k, _)| k.starts_with("inv")).all(|(_, &v)| v == 0.0));
    }
}

#[test]
fn oracle_reports_infeasible() {
    let s = fixture("infeasible");
    for m in MethodKind::ALL {
        let r = oracle_solve(&s, m, &CollapsePolicy::Operational, &OracleOptions::default()).unwrap();
        assert_eq!(r.best_objective, None);
        assert!(r.best_assignment.is_empty());
    }
}

#[test]
fn oracle_refuses_large_grids() {
    let s = fixture("legacy");
    match oracle_solve(&s, MethodKind::Vintage, &CollapsePolicy::Operational, &OracleOptions::default()) {
        Err(AnalysisError::TooLarge { decisions, limit }) => {
            assert_eq!(decisions, 14);
            assert_eq!(limit, ORACLE_DECISION_LIMIT);
        }
        other => panic!("expected TooLarge, got {other:?}"),
    }
}

#[test]
fn oracle_sequential_and_parallel_agree() {
    let s = fixture("gappy");
    let run = |execution| oracle_solve(&s, MethodKind::Compact, &CollapsePolicy::Min, &OracleOptions { max_units: 2, execution }).unwrap();
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}

#[test]
fn compare_toy1_is_equivalent() {
    let r = compare_methods(&fixture("toy1"), &MethodKind::ALL, PolicyKind::Operational, Mode::Continuous, Execution::Parallel).unwrap();
    assert!(r.equivalent, "{}", r.render_text());
    assert_eq!(r.gaps.len(), 3);
    for g in &r.gaps {
        let from = r.outcomes.iter().find(|o| o.method == g.from).unwrap().objective.unwrap();
        let to = r.outcomes.iter().find(|o| o.method == g.to).unwrap().objective.unwrap();
        assert!((g.absolute - (to - from)).abs() <= 1e-12);
    }
    assert!(r.render_text().ends_with("verdict: equivalent\n"));
}

#[test]
fn compare_toy1v_min_is_conservative() {
    let r = compare_methods(&fixture("toy1v"), &[MethodKind::Vintage, MethodKind::Compact], PolicyKind::Min, Mode::Continuous, Execution::Parallel).unwrap();
    assert_eq!(r.gaps.len(), 1);
    let g = &r.gaps[0];
    assert_eq!((g.from, g.to), (MethodKind::Vintage, MethodKind::Compact));
    assert!(g.absolute >= 0.0);
    assert!(!r.equivalent);
    assert_eq!(r.outcomes[1].policy, Some(PolicyKind::Min));
    assert_eq!(r.outcomes[0].policy, None);
}

#[test]
fn compare_rejects_empty_selection() {
    let e = compare_methods(&fixture("toy1"), &[], PolicyKind::Operational, Mode::Continuous, Execution::Parallel);
    assert!(matches!(e, Err(AnalysisError::EmptySelection)));
}

#[test]
fn compare_keeps_going_after_failure() {
    let r = compare_methods(&fixture("infeasible"), &MethodKind::ALL, PolicyKind::Operational, Mode::Continuous, Execution::Sequential).unwrap();
    assert!(r.outcomes.iter().all(|o| o.status == "infeasible" && o.objective.is_none()));
    assert!(r.gaps.is_empty());
    assert!(!r.equivalent);

    // weighted needs a reference solve, which is infeasible here
    let r = compare_methods(&fixture("infeasible"), &[MethodKind::Simple, MethodKind::Compact], PolicyKind::Weighted, Mode::Continuous, Execution::Sequential).unwrap();
    assert_eq!(r.outcomes[0].status, "infeasible");
    assert_eq!(r.outcomes[1].status, "error");
    assert!(r.outcomes[1].error.is_some());
}

#[test]
fn compare_dedupes_and_is_deterministic() {
    let s = fixture("two_tech");
    let methods = [MethodKind::Compact, MethodKind::Simple, MethodKind::Compact];
    let a = compare_methods(&s, &methods, PolicyKind::Mean, Mode::Continuous, Execution::Parallel).unwrap();
    let b = compare_methods(&s, &methods, PolicyKind::Mean, Mode::Continuous, Execution::Sequential).unwrap();
    assert_eq!(a.outcomes.len(), 2);
    assert_eq!(a.render_json(), b.render_json());
    assert_eq!(a.render_text(), b.render_text());
}

#[test]
fn random_vintage_scaled_min_is_conservative() {
    let opts = SyntheticOptions { profiles: ProfileMode::VintageScaled, ..SyntheticOptions::default() };
    for seed in 0..10 {
        let s = random_scenario(seed, &opts).unwrap();
        let r = compare_methods(&s, &[MethodKind::Vintage, MethodKind::Compact], PolicyKind::Min, Mode::Continuous, Execution::Parallel).unwrap();
        let g = &r.gaps[0];
        assert!(g.absolute >= -1e-9, "seed {seed}: {}", r.render_text());
    }
}
