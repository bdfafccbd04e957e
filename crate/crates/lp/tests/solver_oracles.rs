//! Bundled solver against brute-force oracles on small random problems.

use plan_lp::{solve, Bounds, LinearModel, Sense, SolveOptions, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Instance {
    model: LinearModel,
    upper: Vec<f64>,
    rows: Vec<(Vec<f64>, Sense, f64)>,
    cost: Vec<f64>,
}

fn random_instance(rng: &mut ChaCha8Rng, integer: bool) -> Instance {
    let n = rng.gen_range(1..=if integer { 5 } else { 6 });
    let m = rng.gen_range(1..=6);
    let upper: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=if integer { 3 } else { 8 }) as f64).collect();
    let cost: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let anchor: Vec<f64> = upper.iter().map(|u| rng.gen_range(0.0..=*u)).collect();
    let mut rows = Vec::new();
    for _ in 0..m {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-4..=4) as f64).collect();
        let act: f64 = a.iter().zip(&anchor).map(|(x, y)| x * y).sum();
        let feasible = rng.gen_bool(0.8);
        let (sense, rhs) = match rng.gen_range(0..3) {
            0 => (Sense::Le, if feasible { (act + rng.gen_range(0.0..3.0)).round() } else { -30.0 }),
            1 => (Sense::Ge, if feasible { (act - rng.gen_range(0.0..3.0)).round() } else { 30.0 }),
            _ => (Sense::Eq, if integer { act.round() } else { (act * 4.0).round() / 4.0 }),
        };
        rows.push((a, sense, rhs));
    }
    let mut model = LinearModel::new();
    let vars: Vec<_> = (0..n)
        .map(|j| model.add_variable("x", vec![j.to_string()], Bounds::new(0.0, upper[j]), integer).unwrap())
        .collect();
    for (j, c) in cost.iter().enumerate() {
        model.add_objective_term(vars[j], *c).unwrap();
    }
    for (i, (a, sense, rhs)) in rows.iter().enumerate() {
        let terms: Vec<_> = a.iter().enumerate().map(|(j, c)| (vars[j], *c)).collect();
        model.add_constraint("c", vec![i.to_string()], terms, *sense, *rhs).unwrap();
    }
    Instance { model, upper, rows, cost }
}

fn feasible(inst: &Instance, x: &[f64], tol: f64) -> bool {
    x.iter().zip(&inst.upper).all(|(v, u)| *v >= -tol && *v <= u + tol)
        && inst.rows.iter().all(|(a, s, b)| {
            let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            match s {
                Sense::Le => lhs <= b + tol,
                Sense::Ge => lhs >= b - tol,
                Sense::Eq => (lhs - b).abs() <= tol,
            }
        })
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(k: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(k, n, i + 1, cur, out);
        cur.pop();
    }
}

/// Minimum over all basic feasible points (the box keeps the region bounded).
fn vertex_enumeration(inst: &Instance) -> Option<f64> {
    let n = inst.upper.len();
    let mut planes: Vec<(Vec<f64>, f64)> = inst.rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), 0.0));
        planes.push((e, inst.upper[j]));
    }
    let mut subsets = Vec::new();
    combinations(n, planes.len(), 0, &mut Vec::new(), &mut subsets);
    let mut best: Option<f64> = None;
    for s in subsets {
        let a = s.iter().map(|&i| planes[i].0.clone()).collect();
        let b = s.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = gauss(a, b) {
            if feasible(inst, &x, 1e-9) {
                let obj: f64 = inst.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
    }
    best
}

fn lattice_enumeration(inst: &Instance) -> Option<f64> {
    let n = inst.upper.len();
    let mut best: Option<f64> = None;
    let mut x = vec![0.0; n];
    loop {
        if feasible(inst, &x, 1e-9) {
            let obj: f64 = inst.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
        let mut j = 0;
        loop {
            if j == n {
                return best;
            }
            x[j] += 1.0;
            if x[j] <= inst.upper[j] {
                break;
            }
            x[j] = 0.0;
            j += 1;
        }
    }
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut optimal = 0;
    let mut infeasible = 0;
    for case in 0..400 {
        let inst = random_instance(&mut rng, false);
        let sol = solve(&inst.model, &SolveOptions::continuous()).unwrap();
        match vertex_enumeration(&inst) {
            Some(best) => {
                assert_eq!(sol.status, Status::Optimal, "case {case}");
                assert!((sol.objective - best).abs() <= 1e-9, "case {case}: simplex {} vs vertices {best}", sol.objective);
                assert!(inst.model.max_violation(&sol.values) <= 1e-9, "case {case}");
                optimal += 1;
            }
            None => {
                assert_eq!(sol.status, Status::Infeasible, "case {case}");
                infeasible += 1;
            }
        }
    }
    assert!(optimal > 100 && infeasible > 10, "optimal {optimal}, infeasible {infeasible}");
}

#[test]
fn branch_and_bound_matches_lattice_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut optimal = 0;
    for case in 0..300 {
        let inst = random_instance(&mut rng, true);
        let sol = solve(&inst.model, &SolveOptions::integer()).unwrap();
        match lattice_enumeration(&inst) {
            Some(best) => {
                assert_eq!(sol.status, Status::Optimal, "case {case}");
                assert!((sol.objective - best).abs() <= 1e-9, "case {case}: b&b {} vs lattice {best}", sol.objective);
                assert!(sol.values.iter().all(|v| v.fract() == 0.0), "case {case}: {:?}", sol.values);
                optimal += 1;
            }
            None => assert_eq!(sol.status, Status::Infeasible, "case {case}"),
        }
    }
    assert!(optimal > 100, "optimal {optimal}");
}

#[test]
fn repeated_solves_are_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, false);
        let a = solve(&inst.model, &SolveOptions::continuous()).unwrap();
        let b = solve(&inst.model, &SolveOptions::continuous()).unwrap();
        assert_eq!(a.status, b.status);
        let bits = |s: &plan_lp::Solution| s.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }
}

#[test]
fn degenerate_cycling_example_terminates() {
    // Beale's classic cycling LP (min form); optimum -1/20 at x = (1/25, 0, 1, 0).
    let mut m = LinearModel::new();
    let x: Vec<_> = (0..4).map(|j| m.add_variable("x", vec![j.to_string()], Bounds::NON_NEGATIVE, false).unwrap()).collect();
    for (v, c) in x.iter().zip([-0.75, 150.0, -0.02, 6.0]) {
        m.add_objective_term(*v, c).unwrap();
    }
    m.add_constraint("r", vec!["1".into()], x.iter().copied().zip([0.25, -60.0, -0.04, 9.0]), Sense::Le, 0.0).unwrap();
    m.add_constraint("r", vec!["2".into()], x.iter().copied().zip([0.5, -90.0, -0.02, 3.0]), Sense::Le, 0.0).unwrap();
    m.add_constraint("r", vec!["3".into()], [(x[2], 1.0)], Sense::Le, 1.0).unwrap();
    let opts = SolveOptions { bland_after: 0, ..SolveOptions::default() };
    let sol = solve(&m, &opts).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!((sol.objective + 0.05).abs() < 1e-12);
}
