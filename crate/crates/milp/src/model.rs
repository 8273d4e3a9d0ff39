//! Solver-agnostic MILP model: variables with bounds, linear rows and a
//! linear minimisation objective.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{MilpError, Result};

/// Handle of a variable inside a [`MilpModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Handle of a row inside a [`MilpModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstrId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub name: String,
}

impl Variable {
    pub fn is_binary(&self) -> bool {
        self.kind == VarKind::Binary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violate the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let act = self.activity(values);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }

    /// Row bounds `lo <= activity <= hi`.
    pub fn row_bounds(&self) -> (f64, f64) {
        match self.sense {
            Sense::Le => (f64::NEG_INFINITY, self.rhs),
            Sense::Ge => (self.rhs, f64::INFINITY),
            Sense::Eq => (self.rhs, self.rhs),
        }
    }
}

/// Accumulates terms, merging repeated variables.
#[derive(Debug, Clone, Default)]
pub struct LinExpr {
    terms: BTreeMap<VarId, f64>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, var: VarId, coef: f64) -> &mut Self {
        *self.terms.entry(var).or_insert(0.0) += coef;
        self
    }

    pub fn with(mut self, var: VarId, coef: f64) -> Self {
        self.add(var, coef);
        self
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    /// Adds `scale * other`, constant included.
    pub fn add_expr(&mut self, other: &LinExpr, scale: f64) -> &mut Self {
        for (&v, &c) in &other.terms {
            self.add(v, scale * c);
        }
        self.constant += scale * other.constant;
        self
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.values().all(|&c| c == 0.0)
    }

    pub fn coefficient(&self, var: VarId) -> f64 {
        self.terms.get(&var).copied().unwrap_or(0.0)
    }

    pub fn value(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(v, c)| c * values[v.0]).sum::<f64>()
    }

    /// Terms with zero coefficients dropped, ordered by variable id.
    pub fn terms(&self) -> Vec<(VarId, f64)> {
        self.terms.iter().filter(|(_, &c)| c != 0.0).map(|(&v, &c)| (v, c)).collect()
    }
}

/// A minimisation MILP.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    pub name: String,
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    objective: BTreeMap<VarId, f64>,
    objective_constant: f64,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn add_variable(
        &mut self,
        kind: VarKind,
        lower: f64,
        upper: f64,
        name: impl Into<String>,
    ) -> Result<VarId> {
        let name = name.into();
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(MilpError::Bounds { name, lower, upper });
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(MilpError::BinaryBounds { name, lower, upper });
        }
        let id = VarId(self.variables.len());
        self.variables.push(Variable { kind, lower, upper, name });
        Ok(id)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId> {
        self.add_variable(VarKind::Binary, 0.0, 1.0, name)
    }

    pub fn add_continuous(&mut self, lower: f64, upper: f64, name: impl Into<String>) -> Result<VarId> {
        self.add_variable(VarKind::Continuous, lower, upper, name)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConstrId> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for &(v, c) in &terms {
            if v.0 >= self.variables.len() {
                return Err(MilpError::UnknownVariable(v));
            }
            if !seen.insert(v) {
                return Err(MilpError::DuplicateTerm { constraint: name, var: v });
            }
            if !c.is_finite() {
                return Err(MilpError::NonFinite { context: name });
            }
        }
        if !rhs.is_finite() {
            return Err(MilpError::NonFinite { context: name });
        }
        let id = ConstrId(self.constraints.len());
        self.constraints.push(LinearConstraint { name, terms, sense, rhs });
        Ok(id)
    }

    /// Adds `expr (sense) rhs`, moving the expression constant to the right-hand side.
    pub fn add_expr_constraint(
        &mut self,
        name: impl Into<String>,
        expr: &LinExpr,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConstrId> {
        self.add_constraint(name, expr.terms(), sense, rhs - expr.constant)
    }

    /// Adds `coef * var` to the objective.
    pub fn add_objective_term(&mut self, var: VarId, coef: f64) -> Result<()> {
        if var.0 >= self.variables.len() {
            return Err(MilpError::UnknownVariable(var));
        }
        if !coef.is_finite() {
            return Err(MilpError::NonFinite { context: format!("objective term of {}", self.variables[var.0].name) });
        }
        *self.objective.entry(var).or_insert(0.0) += coef;
        Ok(())
    }

    pub fn add_objective_constant(&mut self, c: f64) {
        self.objective_constant += c;
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.is_binary()).count()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective_terms(&self) -> Vec<(VarId, f64)> {
        self.objective.iter().filter(|(_, &c)| c != 0.0).map(|(&v, &c)| (v, c)).collect()
    }

    pub fn objective_constant(&self) -> f64 {
        self.objective_constant
    }

    /// Dense objective coefficient vector.
    pub fn objective_vector(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.variables.len()];
        for (&v, &coef) in &self.objective {
            c[v.0] = coef;
        }
        c
    }

    pub fn evaluate_objective(&self, values: &[f64]) -> f64 {
        self.objective_constant + self.objective.iter().map(|(&v, &c)| c * values[v.0]).sum::<f64>()
    }

    /// Largest bound or row violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let bounds = self
            .variables
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0));
        let rows = self.constraints.iter().map(|c| c.violation(values));
        bounds.chain(rows).fold(0.0, f64::max)
    }

    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) -> Result<()> {
        let var = self.variables.get_mut(id.0).ok_or(MilpError::UnknownVariable(id))?;
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(MilpError::Bounds { name: var.name.clone(), lower, upper });
        }
        var.lower = lower;
        var.upper = upper;
        Ok(())
    }

    pub fn binary_ids(&self) -> Vec<VarId> {
        (0..self.variables.len()).map(VarId).filter(|&v| self.variables[v.0].is_binary()).collect()
    }
}

/// Returns a copy of `model` with each listed binary pinned to its assigned value.
pub fn fix_binaries<I>(model: &MilpModel, assignment: I) -> Result<MilpModel>
where
    I: IntoIterator<Item = (VarId, f64)>,
{
    let mut fixed = model.clone();
    for (id, value) in assignment {
        let var = model.variables.get(id.0).ok_or(MilpError::UnknownVariable(id))?;
        if !var.is_binary() {
            return Err(MilpError::NotBinary { id, name: var.name.clone() });
        }
        if value != 0.0 && value != 1.0 {
            return Err(MilpError::NotBooleanValue { name: var.name.clone(), value });
        }
        fixed.variables[id.0].lower = value;
        fixed.variables[id.0].upper = value;
    }
    Ok(fixed)
}
