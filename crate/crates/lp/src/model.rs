//! In-memory linear model: named variables, sparse constraints and a
//! minimisation objective.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

/// Position of a variable inside its [`LinearModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Position of a constraint inside its [`LinearModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstrId(pub usize);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("duplicate variable {0}")]
    DuplicateVariable(String),
    #[error("duplicate constraint {0}")]
    DuplicateConstraint(String),
    #[error("invalid bounds for {name}: lower {lower} > upper {upper}")]
    BoundError { name: String, lower: f64, upper: f64 },
    #[error("unknown variable id {0}")]
    UnknownVariable(usize),
    #[error("non-finite coefficient or right-hand side in {0}")]
    NonFinite(String),
}

/// Variable bounds. `lower` may be `-inf`, `upper` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const NON_NEGATIVE: Bounds = Bounds { lower: 0.0, upper: f64::INFINITY };
    pub const FREE: Bounds = Bounds { lower: f64::NEG_INFINITY, upper: f64::INFINITY };

    pub fn new(lower: f64, upper: f64) -> Self {
        Bounds { lower, upper }
    }

    pub fn at_least(lower: f64) -> Self {
        Bounds { lower, upper: f64::INFINITY }
    }

    pub fn fixed(value: f64) -> Self {
        Bounds { lower: value, upper: value }
    }

    pub fn upper(&self) -> Option<f64> {
        self.upper.is_finite().then_some(self.upper)
    }

    fn is_valid(&self) -> bool {
        !self.lower.is_nan()
            && !self.upper.is_nan()
            && self.lower != f64::INFINITY
            && self.upper != f64::NEG_INFINITY
            && self.lower <= self.upper
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::NON_NEGATIVE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// A decision variable, identified by a group name and an index tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub group: String,
    pub index: Vec<String>,
    pub bounds: Bounds,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub group: String,
    pub index: Vec<String>,
    /// Sorted by variable id, no duplicates, no zeros.
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }
}

/// Builds the LP-file name `<group>__<idx1>_<idx2>...` restricted to `[A-Za-z0-9_]`.
pub fn lp_name(group: &str, index: &[String]) -> String {
    let raw = if index.is_empty() {
        group.to_string()
    } else {
        format!("{}__{}", group, index.join("_"))
    };
    raw.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

/// A linear minimisation problem.
#[derive(Debug, Clone, Default)]
pub struct LinearModel {
    variables: Vec<Variable>,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    var_lookup: HashMap<(String, Vec<String>), VarId>,
    constr_lookup: HashMap<(String, Vec<String>), ConstrId>,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(
        &mut self,
        group: &str,
        index: Vec<String>,
        bounds: Bounds,
        integer: bool,
    ) -> Result<VarId, ModelError> {
        let key = (group.to_string(), index);
        if self.var_lookup.contains_key(&key) {
            return Err(ModelError::DuplicateVariable(lp_name(&key.0, &key.1)));
        }
        if !bounds.is_valid() {
            return Err(ModelError::BoundError {
                name: lp_name(&key.0, &key.1),
                lower: bounds.lower,
                upper: bounds.upper,
            });
        }
        let id = VarId(self.variables.len());
        self.variables.push(Variable { group: key.0.clone(), index: key.1.clone(), bounds, integer });
        self.objective.push(0.0);
        self.var_lookup.insert(key, id);
        Ok(id)
    }

    /// Adds a constraint. Repeated variables are merged and exact zeros dropped.
    pub fn add_constraint(
        &mut self,
        group: &str,
        index: Vec<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConstrId, ModelError> {
        let key = (group.to_string(), index);
        if self.constr_lookup.contains_key(&key) {
            return Err(ModelError::DuplicateConstraint(lp_name(&key.0, &key.1)));
        }
        let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
        for (var, coef) in terms {
            if var.0 >= self.variables.len() {
                return Err(ModelError::UnknownVariable(var.0));
            }
            if !coef.is_finite() {
                return Err(ModelError::NonFinite(lp_name(&key.0, &key.1)));
            }
            *merged.entry(var).or_insert(0.0) += coef;
        }
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite(lp_name(&key.0, &key.1)));
        }
        let terms = merged.into_iter().filter(|&(_, c)| c != 0.0).collect();
        let id = ConstrId(self.constraints.len());
        self.constraints.push(Constraint { group: key.0.clone(), index: key.1.clone(), terms, sense, rhs });
        self.constr_lookup.insert(key, id);
        Ok(id)
    }

    /// Adds `coef * var` to the objective (accumulating).
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) -> Result<(), ModelError> {
        let slot = self.objective.get_mut(var.0).ok_or(ModelError::UnknownVariable(var.0))?;
        if !coef.is_finite() {
            return Err(ModelError::NonFinite("objective".into()));
        }
        *slot += coef;
        Ok(())
    }

    pub fn set_bounds(&mut self, var: VarId, bounds: Bounds) -> Result<(), ModelError> {
        let v = self.variables.get_mut(var.0).ok_or(ModelError::UnknownVariable(var.0))?;
        if !bounds.is_valid() {
            return Err(ModelError::BoundError { name: lp_name(&v.group, &v.index), lower: bounds.lower, upper: bounds.upper });
        }
        v.bounds = bounds;
        Ok(())
    }

    pub fn set_integer(&mut self, var: VarId, integer: bool) -> Result<(), ModelError> {
        let v = self.variables.get_mut(var.0).ok_or(ModelError::UnknownVariable(var.0))?;
        v.integer = integer;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.variables[var.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, id: ConstrId) -> &Constraint {
        &self.constraints[id.0]
    }

    /// Dense objective coefficients, one per variable.
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_integer(&self) -> usize {
        self.variables.iter().filter(|v| v.integer).count()
    }

    pub fn find_variable(&self, group: &str, index: &[String]) -> Option<VarId> {
        self.var_lookup.get(&(group.to_string(), index.to_vec())).copied()
    }

    pub fn find_constraint(&self, group: &str, index: &[String]) -> Option<ConstrId> {
        self.constr_lookup.get(&(group.to_string(), index.to_vec())).copied()
    }

    pub fn var_name(&self, var: VarId) -> String {
        let v = &self.variables[var.0];
        lp_name(&v.group, &v.index)
    }

    pub fn constraint_name(&self, id: ConstrId) -> String {
        let c = &self.constraints[id.0];
        lp_name(&c.group, &c.index)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, x)| c * x).sum()
    }

    /// Largest violation of any bound or constraint by `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = self.max_constraint_violation(values);
        for (v, &x) in self.variables.iter().zip(values) {
            worst = worst.max(v.bounds.lower - x).max(x - v.bounds.upper);
        }
        worst
    }

    /// Largest violation of any constraint row (bounds ignored).
    pub fn max_constraint_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs = c.activity(values);
            let gap = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }

    /// Name-keyed view used to compare models independent of variable ordering.
    pub fn canonical(&self) -> CanonicalModel {
        let names: Vec<String> = (0..self.variables.len()).map(|i| self.var_name(VarId(i))).collect();
        let variables = self
            .variables
            .iter()
            .zip(&names)
            .map(|(v, n)| (n.clone(), (v.bounds.lower, v.bounds.upper, v.integer)))
            .collect();
        let objective = self
            .objective
            .iter()
            .zip(&names)
            .filter(|(c, _)| **c != 0.0)
            .map(|(c, n)| (n.clone(), *c))
            .collect();
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let terms = c.terms.iter().map(|&(v, coef)| (names[v.0].clone(), coef)).collect();
                (self.constraint_name(ConstrId(i)), CanonicalRow { terms, sense: c.sense, rhs: c.rhs })
            })
            .collect();
        CanonicalModel { variables, objective, constraints }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalRow {
    pub terms: BTreeMap<String, f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Structural fingerprint of a model keyed by LP names.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalModel {
    pub variables: BTreeMap<String, (f64, f64, bool)>,
    pub objective: BTreeMap<String, f64>,
    pub constraints: BTreeMap<String, CanonicalRow>,
}
