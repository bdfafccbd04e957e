use std::path::PathBuf;

use super::*;
use crate::error::ScenarioError;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn copy_fixture(name: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixture(name)).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    dir
}

fn edit(dir: &tempfile::TempDir, file: &str, from: &str, to: &str) {
    let path = dir.path().join(file);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(from), "{file} has no {from:?}");
    std::fs::write(&path, text.replacen(from, to, 1)).unwrap();
}

fn years(v: &[i32]) -> Vec<Year> {
    v.iter().copied().map(Year).collect()
}

#[test]
fn loads_toy1() {
    let s = load_scenario(fixture("toy1")).unwrap();
    assert_eq!(s.years(), years(&[2030, 2040]).as_slice());
    assert_eq!(s.flows().len(), 1);
    let wind = s.asset_id("wind").unwrap();
    assert_eq!(s.asset(wind).investable_years, years(&[2030, 2040]));
    // blank capacity column defaults to unit capacity
    assert_eq!(s.asset_year(wind, Year(2040)).capacity, 10.0);
    assert_eq!(s.slots(Year(2030)).len(), 1);
}

#[test]
fn loading_is_deterministic() {
    for name in ["toy1", "toy1v", "wind3", "two_tech", "legacy", "gappy", "infeasible"] {
        assert_eq!(load_scenario(fixture(name)).unwrap(), load_scenario(fixture(name)).unwrap(), "{name}");
    }
}

#[test]
fn write_then_load_round_trips() {
    for name in ["toy1v", "two_tech", "legacy"] {
        let s = load_scenario(fixture(name)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_scenario(&s, dir.path()).unwrap();
        assert_eq!(load_scenario(dir.path()).unwrap(), s, "{name}");
    }
}

#[test]
fn missing_assets_file() {
    let dir = copy_fixture("toy1");
    std::fs::remove_file(dir.path().join("assets.csv")).unwrap();
    match load_scenario(dir.path()) {
        Err(ScenarioError::MissingFile { file, .. }) => assert_eq!(file, "assets.csv"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn asset_vintage_file_is_optional() {
    let s = load_scenario(fixture("wind3")).unwrap();
    assert!(!s.has_vintage_records(s.asset_id("wind").unwrap()));
}

#[test]
fn profile_out_of_range() {
    let dir = copy_fixture("toy1");
    edit(&dir, "profiles.csv", "wind,,2030,rp1,b1,1", "wind,,2030,rp1,b1,1.2");
    let err = load_scenario(dir.path()).unwrap_err();
    assert_eq!(err.rule(), Some("availability in [0,1]"), "{err}");
}

#[test]
fn malformed_row_names_line_and_column() {
    let dir = copy_fixture("toy1");
    edit(&dir, "asset_year.csv", "wind,2040,1200", "wind,2040,lots");
    match load_scenario(dir.path()).unwrap_err() {
        ScenarioError::MalformedRow { file, line, column, .. } => {
            assert_eq!(file, "asset_year.csv");
            assert_eq!(line, 3);
            assert_eq!(column, "investment_cost");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn broken_reference() {
    let dir = copy_fixture("toy1");
    edit(&dir, "flows.csv", "wind,demand", "wind,nobody");
    assert!(matches!(load_scenario(dir.path()), Err(ScenarioError::BrokenReference { line: 2, .. })));
}

#[test]
fn invariant_rules_are_named() {
    let cases: &[(&str, &str, &str, &str)] = &[
        ("years.csv", "2040", "2030", "milestone years strictly increasing and unique"),
        ("assets.csv", "simple,20", "simple,0", "technical_lifetime >= 1"),
        ("assets.csv", "simple,20,10", "simple,20,0", "unit_capacity > 0 for producers"),
        ("assets.csv", "consumer,none", "consumer,simple", "consumer has investment_method none"),
        ("assets.csv", "producer,simple", "producer,none", "investable years empty iff investment_method none"),
        ("asset_year.csv", "wind,2030,1200", "wind,2030,-1", "costs >= 0"),
        ("asset_year.csv", ",1,1\nwind,2040", ",1,7\nwind,2040", "investable in {0,1}"),
        ("rep_periods.csv", "2030,rp1,1", "2030,rp1,-1", "weight >= 0"),
        ("time_blocks.csv", "2040,rp1,b1,10", "2040,rp1,b1,0", "duration > 0"),
        ("demand.csv", "2030,rp1,b1,15", "2030,rp1,b1,-15", "demand >= 0"),
        ("asset_vintage.csv", "wind,2040,2030,,1", "wind,2040,2030,,2", "initial units consistent across tables"),
        ("flows.csv", "wind,demand", "demand,wind", "flow from producer to consumer"),
    ];
    for (file, from, to, rule) in cases {
        let dir = copy_fixture("toy1");
        edit(&dir, file, from, to);
        let err = load_scenario(dir.path()).unwrap_err();
        assert_eq!(err.rule(), Some(*rule), "{file}: {err}");
    }
}

#[test]
fn vintage_record_outside_domain_rejected() {
    let dir = copy_fixture("toy1");
    // 2040 vintage cannot be present in 2030
    std::fs::write(
        dir.path().join("asset_vintage.csv"),
        "asset,year,vintage,fixed_cost,initial_units\nwind,2030,2030,,1\nwind,2040,2030,,1\nwind,2030,2040,,0\n",
    )
    .unwrap();
    assert_eq!(load_scenario(dir.path()).unwrap_err().rule(), Some("vintage record inside domain"));
}

#[test]
fn domain_examples() {
    let s = load_scenario(fixture("wind3")).unwrap();
    let wind = s.asset_id("wind").unwrap();
    let d = domain_triples(&s, wind);
    let expect: Vec<(Year, Year)> = [(2030, 2030), (2040, 2030), (2040, 2040), (2050, 2030), (2050, 2040), (2050, 2050)]
        .iter()
        .map(|&(y, v)| (Year(y), Year(v)))
        .collect();
    assert_eq!(d.pairs, expect);

    let with_lifetime = |l: u32| {
        let mut t = s.tables().clone();
        t.assets[0].technical_lifetime = l;
        let s = Scenario::from_tables(t).unwrap();
        domain_triples(&s, wind).pairs
    };
    assert_eq!(with_lifetime(1), vec![(Year(2030), Year(2030)), (Year(2040), Year(2040)), (Year(2050), Year(2050))]);
    let fifteen: Vec<(Year, Year)> =
        [(2030, 2030), (2040, 2030), (2040, 2040), (2050, 2040), (2050, 2050)].iter().map(|&(y, v)| (Year(y), Year(v))).collect();
    assert_eq!(with_lifetime(15), fifteen);
}

#[test]
fn pre_horizon_vintage_joins_domain() {
    let s = load_scenario(fixture("gappy")).unwrap();
    let wind = s.asset_id("wind").unwrap();
    let d = domain_triples(&s, wind);
    assert!(d.contains(Year(2035), Year(2025)));
    assert!(!d.contains(Year(2050), Year(2025)));
    assert_eq!(d.vintages().into_iter().collect::<Vec<_>>(), years(&[2025, 2030, 2035, 2050]));
}

#[test]
fn active_window_examples() {
    let s = load_scenario(fixture("toy1")).unwrap();
    let wind = s.asset_id("wind").unwrap();
    assert_eq!(active_window(&s, wind, Year(2040)), years(&[2030, 2040]));
    let mut t = s.tables().clone();
    t.assets[0].technical_lifetime = 5;
    t.asset_vintage.clear();
    let short = Scenario::from_tables(t).unwrap();
    assert_eq!(active_window(&short, wind, Year(2040)), years(&[2040]));

    let w3 = load_scenario(fixture("wind3")).unwrap();
    assert_eq!(active_window(&w3, w3.asset_id("wind").unwrap(), Year(2050)), years(&[2030, 2040, 2050]));
}

#[test]
fn domain_matches_brute_force_on_fixtures() {
    for name in ["toy1", "toy1v", "wind3", "two_tech", "legacy", "gappy"] {
        let s = load_scenario(fixture(name)).unwrap();
        for a in s.producers() {
            let asset = s.asset(a);
            let mut legit: BTreeSet<Year> = asset.investable_years.iter().copied().collect();
            legit.extend(s.vintage_records(a).filter(|(_, p)| p.initial_units > 0.0).map(|((_, v), _)| v));
            let d = domain_triples(&s, a);
            for &y in s.years() {
                let window = active_window(&s, a, y);
                assert!(window.contains(&y));
                for v in (y.0 - 100)..=(y.0 + 10) {
                    let v = Year(v);
                    let alive = v <= y && i64::from(y.0) - i64::from(asset.technical_lifetime) + 1 <= i64::from(v.0);
                    assert_eq!(d.contains(y, v), alive && legit.contains(&v), "{name} {} ({y},{v})", asset.name);
                }
            }
        }
    }
}

#[test]
fn retargeting_keeps_operation_assets() {
    let s = load_scenario(fixture("legacy")).unwrap();
    let simple = s.with_investment_method(InvestmentMethod::Simple).unwrap();
    let coal = simple.asset_id("coal").unwrap();
    let solar = simple.asset_id("solar").unwrap();
    assert_eq!(simple.asset(coal).investment_method, InvestmentMethod::None);
    assert_eq!(simple.asset(solar).investment_method, InvestmentMethod::Simple);
}

#[test]
fn retarget_to_compact_needs_vintage_records() {
    let mut t = load_scenario(fixture("toy1")).unwrap().tables().clone();
    t.asset_vintage.clear();
    let s = Scenario::from_tables(t).unwrap();
    let err = s.with_investment_method(InvestmentMethod::Compact).unwrap_err();
    assert_eq!(err.rule(), Some("initial units consistent across tables"));
}
