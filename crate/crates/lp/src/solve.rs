//! Solver entry point: continuous simplex or exhaustive branch-and-bound.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Bounds, LinearModel, VarId};
use crate::simplex::{solve_lp, LpStatus, SimplexParams};

/// Integer-variable ceiling for the bundled branch-and-bound.
pub const MAX_INTEGER_VARIABLES: usize = 25;
/// Column ceiling for the bundled dense simplex.
pub const MAX_CONTINUOUS_VARIABLES: usize = 2000;

const INTEGRALITY_TOL: f64 = 1e-6;
const MAX_NODES: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Continuous,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub mode: Mode,
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iterations: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { mode: Mode::Continuous, feas_tol: 1e-9, opt_tol: 1e-9, max_iterations: 100_000, bland_after: 1000 }
    }
}

impl SolveOptions {
    pub fn continuous() -> Self {
        Self::default()
    }

    pub fn integer() -> Self {
        SolveOptions { mode: Mode::Integer, ..Self::default() }
    }

    fn simplex(&self) -> SimplexParams {
        SimplexParams {
            feas_tol: self.feas_tol,
            opt_tol: self.opt_tol,
            max_iterations: self.max_iterations,
            bland_after: self.bland_after,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration-limit",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("model too large for the bundled solver: {count} {what} (limit {limit}); emit an LP file for an external solver")]
    TooLargeForBundledSolver { what: &'static str, count: usize, limit: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

/// Result of a solve. `values` and `objective` are only meaningful when optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Objective contribution per variable group.
    pub objective_by_group: BTreeMap<String, f64>,
    pub iterations: usize,
}

impl Solution {
    fn without_values(status: Status, iterations: usize) -> Self {
        Solution { status, values: Vec::new(), objective: f64::NAN, objective_by_group: BTreeMap::new(), iterations }
    }

    fn optimal(model: &LinearModel, values: Vec<f64>, iterations: usize) -> Self {
        let mut by_group: BTreeMap<String, f64> = BTreeMap::new();
        for ((var, c), x) in model.variables().iter().zip(model.objective()).zip(&values) {
            if *c != 0.0 {
                *by_group.entry(var.group.clone()).or_insert(0.0) += c * x;
            }
        }
        let objective = model.objective_value(&values);
        Solution { status: Status::Optimal, values, objective, objective_by_group: by_group, iterations }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }
}

impl From<LpStatus> for Status {
    fn from(s: LpStatus) -> Self {
        match s {
            LpStatus::Optimal => Status::Optimal,
            LpStatus::Infeasible => Status::Infeasible,
            LpStatus::Unbounded => Status::Unbounded,
            LpStatus::IterationLimit => Status::IterationLimit,
        }
    }
}

/// Solves `model`. Continuous mode ignores integrality flags.
pub fn solve(model: &LinearModel, options: &SolveOptions) -> Result<Solution, SolveError> {
    if model.num_variables() > MAX_CONTINUOUS_VARIABLES {
        return Err(SolveError::TooLargeForBundledSolver {
            what: "variables",
            count: model.num_variables(),
            limit: MAX_CONTINUOUS_VARIABLES,
        });
    }
    let bounds: Vec<Bounds> = model.variables().iter().map(|v| v.bounds).collect();
    match options.mode {
        Mode::Continuous => solve_relaxation(model, &bounds, options),
        Mode::Integer => {
            let count = model.num_integer();
            if count > MAX_INTEGER_VARIABLES {
                return Err(SolveError::TooLargeForBundledSolver {
                    what: "integer variables",
                    count,
                    limit: MAX_INTEGER_VARIABLES,
                });
            }
            branch_and_bound(model, bounds, options)
        }
    }
}

fn solve_relaxation(model: &LinearModel, bounds: &[Bounds], options: &SolveOptions) -> Result<Solution, SolveError> {
    let outcome = solve_lp(model, bounds, &options.simplex());
    if outcome.status != LpStatus::Optimal {
        return Ok(Solution::without_values(outcome.status.into(), outcome.iterations));
    }
    check_feasible(model, bounds, &outcome.values)?;
    Ok(Solution::optimal(model, outcome.values, outcome.iterations))
}

fn check_feasible(model: &LinearModel, bounds: &[Bounds], values: &[f64]) -> Result<(), SolveError> {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (b, &x) in bounds.iter().zip(values) {
        worst = worst.max(b.lower - x).max(x - b.upper);
        scale = scale.max(x.abs());
    }
    for c in model.constraints() {
        scale = scale.max(c.rhs.abs());
    }
    let constraint_worst = model.max_constraint_violation(values);
    worst = worst.max(constraint_worst);
    if worst > 1e-6 * scale {
        return Err(SolveError::NumericalFailure(format!("solution violates the model by {worst:e}")));
    }
    Ok(())
}

struct Search<'a> {
    model: &'a LinearModel,
    options: &'a SolveOptions,
    integer_vars: Vec<usize>,
    best: Option<(f64, Vec<f64>)>,
    nodes: usize,
    iterations: usize,
    exhausted: bool,
}

impl Search<'_> {
    fn prune_threshold(&self) -> f64 {
        match &self.best {
            Some((obj, _)) => obj - 1e-9 * (1.0 + obj.abs()),
            None => f64::INFINITY,
        }
    }

    /// Returns the relaxation status at this node (used to detect unboundedness at the root).
    fn explore(&mut self, bounds: &mut Vec<Bounds>) -> LpStatus {
        if self.nodes >= MAX_NODES {
            self.exhausted = true;
            return LpStatus::IterationLimit;
        }
        self.nodes += 1;
        let outcome = solve_lp(self.model, bounds, &self.options.simplex());
        self.iterations += outcome.iterations;
        if outcome.status != LpStatus::Optimal {
            if outcome.status == LpStatus::IterationLimit {
                self.exhausted = true;
            }
            return outcome.status;
        }
        let obj = self.model.objective_value(&outcome.values);
        if obj >= self.prune_threshold() {
            return LpStatus::Optimal;
        }
        // Most fractional integer variable, lowest index on ties.
        let mut branch: Option<(usize, f64)> = None;
        for &j in &self.integer_vars {
            let x = outcome.values[j];
            let frac = (x - x.round()).abs();
            if frac > INTEGRALITY_TOL && branch.is_none_or(|(_, f)| frac > f + 1e-12) {
                branch = Some((j, frac));
            }
        }
        match branch {
            None => {
                self.best = Some((obj, outcome.values));
            }
            Some((j, _)) => {
                let x = outcome.values[j];
                let saved = bounds[j];
                bounds[j] = Bounds::new(saved.lower, x.floor());
                self.explore(bounds);
                bounds[j] = Bounds::new(x.ceil(), saved.upper);
                self.explore(bounds);
                bounds[j] = saved;
            }
        }
        LpStatus::Optimal
    }
}

fn branch_and_bound(model: &LinearModel, mut bounds: Vec<Bounds>, options: &SolveOptions) -> Result<Solution, SolveError> {
    let integer_vars: Vec<usize> = model.variables().iter().enumerate().filter(|(_, v)| v.integer).map(|(j, _)| j).collect();
    for &j in &integer_vars {
        let b = bounds[j];
        bounds[j] = Bounds::new(b.lower.ceil(), b.upper.floor());
        if bounds[j].lower > bounds[j].upper {
            return Ok(Solution::without_values(Status::Infeasible, 0));
        }
    }
    let mut search =
        Search { model, options, integer_vars: integer_vars.clone(), best: None, nodes: 0, iterations: 0, exhausted: false };
    let root = search.explore(&mut bounds);
    if root == LpStatus::Unbounded {
        return Ok(Solution::without_values(Status::Unbounded, search.iterations));
    }
    if search.exhausted {
        return Ok(Solution::without_values(Status::IterationLimit, search.iterations));
    }
    let Some((_, incumbent)) = search.best else {
        return Ok(Solution::without_values(Status::Infeasible, search.iterations));
    };
    // Re-solve with integers pinned so reported values are exact integers.
    for &j in &integer_vars {
        bounds[j] = Bounds::fixed(incumbent[j].round());
    }
    let outcome = solve_lp(model, &bounds, &options.simplex());
    if outcome.status != LpStatus::Optimal {
        return Err(SolveError::NumericalFailure("pinned integer re-solve lost feasibility".into()));
    }
    check_feasible(model, &bounds, &outcome.values)?;
    Ok(Solution::optimal(model, outcome.values, search.iterations + outcome.iterations))
}
