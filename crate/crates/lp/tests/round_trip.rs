use plan_lp::{parse_lp, emit_lp, parse_lp_str, write_lp_string, Bounds, LinearModel, Sense};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct VarSpec {
    index: String,
    bounds: (u8, f64, f64),
    integer: bool,
    cost: f64,
}

fn coef() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-20i32..=20).prop_map(f64::from),
        -1e6..1e6f64,
        (-1.0..1.0f64).prop_map(|v| v * 1e-12),
        (1.0..10.0f64).prop_map(|v| v * 1e18),
    ]
}

fn var_spec() -> impl Strategy<Value = VarSpec> {
    ("[a-z0-9]{1,4}", 0u8..5, -50.0..50.0f64, 0.0..80.0f64, any::<bool>(), coef())
        .prop_map(|(index, kind, lo, width, integer, cost)| VarSpec { index, bounds: (kind, lo, width), integer, cost })
}

fn build(vars: Vec<VarSpec>, rows: Vec<(Vec<(usize, f64)>, u8, f64)>) -> LinearModel {
    let mut m = LinearModel::new();
    let mut ids = Vec::new();
    for v in vars {
        let (kind, lo, width) = v.bounds;
        let bounds = match kind {
            0 => Bounds::NON_NEGATIVE,
            1 => Bounds::at_least(lo),
            2 => Bounds::new(lo, lo + width),
            3 => Bounds::FREE,
            _ => Bounds::new(f64::NEG_INFINITY, lo),
        };
        if let Ok(id) = m.add_variable("v", vec![v.index.clone(), "k".into()], bounds, v.integer) {
            m.add_objective_term(id, v.cost).unwrap();
            ids.push(id);
        }
    }
    if ids.is_empty() {
        return m;
    }
    for (i, (terms, sense, rhs)) in rows.into_iter().enumerate() {
        let terms: Vec<_> = terms.into_iter().map(|(j, c)| (ids[j % ids.len()], c)).collect();
        let sense = [Sense::Le, Sense::Eq, Sense::Ge][sense as usize % 3];
        m.add_constraint("row", vec![i.to_string()], terms, sense, rhs).unwrap();
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn emit_then_parse_is_identity(
        vars in prop::collection::vec(var_spec(), 0..8),
        rows in prop::collection::vec((prop::collection::vec((0usize..8, coef()), 0..6), 0u8..3, coef()), 0..6),
    ) {
        let model = build(vars, rows);
        let text = write_lp_string(&model).unwrap();
        let back = parse_lp_str(&text).unwrap();
        prop_assert_eq!(back.canonical(), model.canonical());
        // Second pass is textually stable.
        prop_assert_eq!(write_lp_string(&back).unwrap().lines().count(), text.lines().count());
    }
}

#[test]
fn file_round_trip_and_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = LinearModel::new();
    let x = m.add_variable("inv", vec!["wind".into(), "2030".into()], Bounds::NON_NEGATIVE, true).unwrap();
    let y = m.add_variable("flow", vec!["f1".into(), "2030".into()], Bounds::new(0.0, 7.5), false).unwrap();
    m.add_objective_term(x, 12000.0).unwrap();
    m.add_objective_term(y, 150.0).unwrap();
    m.add_constraint("cap", vec!["wind".into()], [(y, 1.0), (x, -10.0)], Sense::Le, 0.0).unwrap();
    let path = dir.path().join("m.lp");
    emit_lp(&m, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("inv__wind_2030"));
    assert!(text.contains("General\n inv__wind_2030\n"));
    assert_eq!(parse_lp(&path).unwrap().canonical(), m.canonical());

    let bad = dir.path().join("missing").join("m.lp");
    assert!(matches!(emit_lp(&m, &bad), Err(plan_lp::LpFormatError::Io { .. })));
}
