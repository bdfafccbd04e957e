use plan_lp::Mode;
use serde::Serialize;

use super::{policy_for, run_method, Table};
use crate::error::AnalysisError;
use crate::formulation::{CollapsePolicy, CostBreakdown, MethodKind, PolicyKind};
use crate::par::{self, Execution};
use crate::scenario::Scenario;

/// Relative gap at or below which two objectives count as equivalent.
pub const EQUIVALENCE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodOutcome {
    pub method: MethodKind,
    /// Set for compact.
    pub policy: Option<PolicyKind>,
    /// Solver status, or `error`.
    pub status: String,
    pub objective: Option<f64>,
    pub breakdown: Option<CostBreakdown>,
    pub error: Option<String>,
}

/// `to - from` for one ordered pair of methods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gap {
    pub from: MethodKind,
    pub to: MethodKind,
    pub absolute: f64,
    /// `|absolute| / max(|from|, |to|)`, zero when both objectives are zero.
    pub relative: f64,
    pub equivalent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub schema: u32,
    pub mode: Mode,
    pub policy: PolicyKind,
    pub outcomes: Vec<MethodOutcome>,
    /// One entry per pair of optimal methods, in request order.
    pub gaps: Vec<Gap>,
    /// All requested methods optimal and pairwise equivalent.
    pub equivalent: bool,
}

fn gap(from: &MethodOutcome, to: &MethodOutcome) -> Option<Gap> {
    let (a, b) = (from.objective?, to.objective?);
    let absolute = b - a;
    let scale = a.abs().max(b.abs());
    let relative = if scale == 0.0 { 0.0 } else { absolute.abs() / scale };
    Some(Gap { from: from.method, to: to.method, absolute, relative, equivalent: relative <= EQUIVALENCE_TOL })
}

/// Builds and solves every requested method (duplicates dropped) and tabulates gaps.
///
/// A failing method is reported with status `error` and does not stop the others.
pub fn compare_methods(
    scenario: &Scenario,
    methods: &[MethodKind],
    policy: PolicyKind,
    mode: Mode,
    execution: Execution,
) -> Result<ComparisonReport, AnalysisError> {
    let mut unique: Vec<MethodKind> = Vec::new();
    for &m in methods {
        if !unique.contains(&m) {
            unique.push(m);
        }
    }
    if unique.is_empty() {
        return Err(AnalysisError::EmptySelection);
    }
    let resolved: Result<CollapsePolicy, String> = if unique.contains(&MethodKind::Compact) {
        policy_for(scenario, policy).map_err(|e| e.to_string())
    } else {
        Ok(CollapsePolicy::Operational)
    };
    let outcomes = par::map(execution, &unique, |&method| {
        let policy_kind = (method == MethodKind::Compact).then_some(policy);
        let failed = |e: String| MethodOutcome {
            method,
            policy: policy_kind,
            status: "error".to_string(),
            objective: None,
            breakdown: None,
            error: Some(e),
        };
        let pol = match (&resolved, method) {
            (Err(e), MethodKind::Compact) => return failed(e.clone()),
            (Ok(p), MethodKind::Compact) => p.clone(),
            _ => CollapsePolicy::Operational,
        };
        match run_method(scenario, method, &pol, mode) {
            Ok(run) => {
                let optimal = run.solution.is_optimal();
                MethodOutcome {
                    method,
                    policy: policy_kind,
                    status: run.solution.status.to_string(),
                    objective: optimal.then_some(run.solution.objective),
                    breakdown: optimal.then(|| CostBreakdown::of(&run.build.model, &run.solution.values)),
                    error: None,
                }
            }
            Err(e) => failed(e.to_string()),
        }
    });
    let mut gaps = Vec::new();
    for i in 0..outcomes.len() {
        for j in i + 1..outcomes.len() {
            gaps.extend(gap(&outcomes[i], &outcomes[j]));
        }
    }
    let all_optimal = outcomes.iter().all(|o| o.objective.is_some());
    let equivalent = all_optimal && gaps.iter().all(|g| g.equivalent);
    Ok(ComparisonReport { schema: super::SCHEMA_VERSION, mode, policy, outcomes, gaps, equivalent })
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

impl ComparisonReport {
    pub fn render_text(&self) -> String {
        let mut t = Table::new(["method", "status", "objective", "investment", "fixed", "variable"]);
        for o in &self.outcomes {
            let label = match o.policy {
                Some(p) => format!("{}({p})", o.method),
                None => o.method.to_string(),
            };
            let b = o.breakdown;
            t.row([label, o.status.clone(), num(o.objective), num(b.map(|b| b.investment)), num(b.map(|b| b.fixed)), num(b.map(|b| b.variable))]);
        }
        let mut out = t.to_string();
        if !self.gaps.is_empty() {
            let mut g = Table::new(["pair", "gap", "relative", "equivalent"]);
            for gap in &self.gaps {
                g.row([
                    format!("{} -> {}", gap.from, gap.to),
                    format!("{:.6}", gap.absolute),
                    format!("{:.3e}", gap.relative),
                    if gap.equivalent { "yes" } else { "no" }.to_string(),
                ]);
            }
            out.push('\n');
            out.push_str(&g.to_string());
        }
        for o in self.outcomes.iter().filter(|o| o.error.is_some()) {
            out.push_str(&format!("{} failed: {}\n", o.method, o.error.as_deref().unwrap_or("")));
        }
        out.push_str(if self.equivalent { "verdict: equivalent\n" } else { "verdict: not equivalent\n" });
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}
