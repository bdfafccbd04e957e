//! Dense two-phase tableau simplex.
//!
//! Every variable is mapped onto non-negative columns (shifted by its lower
//! bound, mirrored around its upper bound, or split when free); finite
//! upper bounds become explicit rows. Pricing is Dantzig's rule, switching
//! to Bland's rule once the number of consecutive degenerate pivots exceeds
//! the configured threshold.

use crate::model::{Bounds, LinearModel, Sense};

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexParams {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iterations: usize,
    pub bland_after: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct LpOutcome {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub iterations: usize,
}

const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy)]
enum ColumnMap {
    /// x = offset + y
    Shift { col: usize, offset: f64 },
    /// x = offset - y
    Mirror { col: usize, offset: f64 },
    /// x = y+ - y-
    Split { pos: usize, neg: usize },
}

struct Row {
    coeffs: Vec<f64>,
    sense: Sense,
    rhs: f64,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// (rows) x (cols + 1), last column is the right-hand side.
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs / objective row, length cols + 1 (last = -objective).
    cost_row: Vec<f64>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.data[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let width = self.cols + 1;
        let piv = self.at(pr, pc);
        let start = pr * width;
        for v in &mut self.data[start..start + width] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.data[start..start + width].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let factor = self.data[r * width + pc];
            if factor != 0.0 {
                let row = &mut self.data[r * width..(r + 1) * width];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[pc] = 0.0;
            }
        }
        let factor = self.cost_row[pc];
        if factor != 0.0 {
            for (v, p) in self.cost_row.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.cost_row[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Sets the cost row to `costs` reduced against the current basis.
    fn price(&mut self, costs: &[f64]) {
        let width = self.cols + 1;
        self.cost_row = costs.to_vec();
        self.cost_row.push(0.0);
        for r in 0..self.rows {
            let cb = costs[self.basis[r]];
            if cb != 0.0 {
                for c in 0..width {
                    self.cost_row[c] -= cb * self.data[r * width + c];
                }
            }
        }
    }

    /// Runs primal simplex on the current cost row. `allowed` masks entering columns.
    fn optimize(&mut self, allowed: &[bool], params: &SimplexParams, iterations: &mut usize) -> LpStatus {
        let cost_scale = self.cost_row[..self.cols].iter().fold(1.0_f64, |m, c| m.max(c.abs()));
        let opt_tol = params.opt_tol * cost_scale;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if *iterations >= params.max_iterations {
                return LpStatus::IterationLimit;
            }
            let entering = if bland {
                (0..self.cols).find(|&c| allowed[c] && self.cost_row[c] < -opt_tol)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for c in 0..self.cols {
                    let d = self.cost_row[c];
                    if allowed[c] && d < -opt_tol && best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((c, d));
                    }
                }
                best.map(|(c, _)| c)
            };
            let Some(pc) = entering else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    match leave {
                        None => leave = Some((r, ratio)),
                        Some((lr, lratio)) => {
                            let tie = (ratio - lratio).abs() <= 1e-12 * (1.0 + lratio.abs());
                            if (ratio < lratio && !tie) || (tie && self.basis[r] < self.basis[lr]) {
                                leave = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((pr, ratio)) = leave else {
                return LpStatus::Unbounded;
            };
            if ratio <= params.feas_tol {
                degenerate_run += 1;
                if degenerate_run > params.bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(pr, pc);
            *iterations += 1;
        }
    }
}

/// Solves the continuous relaxation of `model` with variable bounds replaced by `bounds`.
pub(crate) fn solve_lp(model: &LinearModel, bounds: &[Bounds], params: &SimplexParams) -> LpOutcome {
    let n = model.num_variables();
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for b in bounds {
        if b.lower.is_finite() {
            maps.push(ColumnMap::Shift { col: ncols, offset: b.lower });
            if b.upper.is_finite() {
                bound_rows.push((ncols, b.upper - b.lower));
            }
            ncols += 1;
        } else if b.upper.is_finite() {
            maps.push(ColumnMap::Mirror { col: ncols, offset: b.upper });
            ncols += 1;
        } else {
            maps.push(ColumnMap::Split { pos: ncols, neg: ncols + 1 });
            ncols += 2;
        }
    }

    let mut costs = vec![0.0; ncols];
    for (j, &c) in model.objective().iter().enumerate() {
        match maps[j] {
            ColumnMap::Shift { col, .. } => costs[col] += c,
            ColumnMap::Mirror { col, .. } => costs[col] -= c,
            ColumnMap::Split { pos, neg } => {
                costs[pos] += c;
                costs[neg] -= c;
            }
        }
    }

    let mut rows: Vec<Row> = Vec::with_capacity(model.num_constraints() + bound_rows.len());
    for con in model.constraints() {
        let mut coeffs = vec![0.0; ncols];
        let mut rhs = con.rhs;
        for &(v, a) in &con.terms {
            match maps[v.0] {
                ColumnMap::Shift { col, offset } => {
                    coeffs[col] += a;
                    rhs -= a * offset;
                }
                ColumnMap::Mirror { col, offset } => {
                    coeffs[col] -= a;
                    rhs -= a * offset;
                }
                ColumnMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        rows.push(Row { coeffs, sense: con.sense, rhs });
    }
    for (col, ub) in bound_rows {
        let mut coeffs = vec![0.0; ncols];
        coeffs[col] = 1.0;
        rows.push(Row { coeffs, sense: Sense::Le, rhs: ub });
    }
    for row in &mut rows {
        if row.rhs < 0.0 {
            row.rhs = -row.rhs;
            for c in &mut row.coeffs {
                *c = -*c;
            }
            row.sense = match row.sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.sense != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.sense != Sense::Le).count();
    let total = ncols + n_slack + n_art;
    let width = total + 1;
    let mut data = vec![0.0; m * width];
    let mut basis = vec![0usize; m];
    let mut is_art = vec![false; total];
    let mut slack = ncols;
    let mut art = ncols + n_slack;
    for (r, row) in rows.iter().enumerate() {
        let base = r * width;
        data[base..base + ncols].copy_from_slice(&row.coeffs);
        data[base + total] = row.rhs;
        match row.sense {
            Sense::Le => {
                data[base + slack] = 1.0;
                basis[r] = slack;
                slack += 1;
            }
            Sense::Ge => {
                data[base + slack] = -1.0;
                slack += 1;
                data[base + art] = 1.0;
                basis[r] = art;
                is_art[art] = true;
                art += 1;
            }
            Sense::Eq => {
                data[base + art] = 1.0;
                basis[r] = art;
                is_art[art] = true;
                art += 1;
            }
        }
    }

    let mut tab = Tableau { rows: m, cols: total, data, basis, cost_row: Vec::new() };
    let mut iterations = 0usize;
    let bmax = rows.iter().fold(0.0_f64, |acc, r| acc.max(r.rhs.abs()));

    if n_art > 0 {
        let phase1: Vec<f64> = is_art.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        tab.price(&phase1);
        let allowed = vec![true; total];
        let status = tab.optimize(&allowed, params, &mut iterations);
        if status == LpStatus::IterationLimit {
            return LpOutcome { status, values: Vec::new(), iterations };
        }
        let infeasibility: f64 = (0..m).filter(|&r| is_art[tab.basis[r]]).map(|r| tab.rhs(r)).sum();
        if infeasibility > params.feas_tol.max(1e-9) * (1.0 + bmax) {
            return LpOutcome { status: LpStatus::Infeasible, values: Vec::new(), iterations };
        }
        // Drive remaining zero-level artificials out of the basis where possible.
        for r in 0..m {
            if is_art[tab.basis[r]] {
                let mut best: Option<(usize, f64)> = None;
                for c in 0..total {
                    let a = tab.at(r, c).abs();
                    if !is_art[c] && a > 1e-9 && best.is_none_or(|(_, ba)| a > ba) {
                        best = Some((c, a));
                    }
                }
                if let Some((c, _)) = best {
                    tab.pivot(r, c);
                }
            }
        }
    }

    let mut phase2 = costs.clone();
    phase2.resize(total, 0.0);
    tab.price(&phase2);
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    let status = tab.optimize(&allowed, params, &mut iterations);
    if status != LpStatus::Optimal {
        return LpOutcome { status, values: Vec::new(), iterations };
    }

    let mut y = vec![0.0; total];
    for r in 0..m {
        y[tab.basis[r]] = tab.rhs(r).max(0.0);
    }
    let values = maps
        .iter()
        .map(|map| match *map {
            ColumnMap::Shift { col, offset } => offset + y[col],
            ColumnMap::Mirror { col, offset } => offset - y[col],
            ColumnMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    LpOutcome { status: LpStatus::Optimal, values, iterations }
}
