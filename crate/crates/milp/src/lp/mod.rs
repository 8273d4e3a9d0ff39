//! LP relaxation engine.

mod data;
mod lu;
mod simplex;

use std::time::Instant;

use crate::config::SolverConfig;
use crate::model::{MilpModel, VarId};

use data::LpData;
pub(crate) use simplex::Basis;
use simplex::{Limits, Outcome, Simplex, VarStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    TimeLimit,
    /// The objective provably exceeds the requested cutoff.
    Cutoff,
}

/// Where a failed solve got stuck: a model row or a variable bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    Row(usize),
    Bound(VarId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Reduced costs of the structural variables.
    pub reduced_costs: Vec<f64>,
    /// Simplex iterations spent on this solve.
    pub iterations: u64,
    /// Row (or bound) that certifies infeasibility.
    pub certificate: Option<Certificate>,
}

/// A warm-startable LP solver bound to one model. Bounds can be changed
/// between solves; each solve starts from the last basis.
pub struct LpEngine {
    simplex: Simplex,
    original_bounds: Vec<(f64, f64)>,
    feasibility_tol: f64,
}

impl LpEngine {
    pub fn new(model: &MilpModel, config: &SolverConfig) -> LpEngine {
        let data = LpData::from_model(model, true);
        let simplex = Simplex::new(data, config.feasibility_tol, config.stall_threshold, config.refactor_interval);
        LpEngine {
            simplex,
            original_bounds: model.variables().iter().map(|v| (v.lower, v.upper)).collect(),
            feasibility_tol: config.feasibility_tol,
        }
    }

    pub fn num_variables(&self) -> usize {
        self.original_bounds.len()
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) {
        self.simplex.data.set_structural_bounds(var.0, lower, upper);
    }

    pub fn bounds(&self, var: VarId) -> (f64, f64) {
        let d = &self.simplex.data;
        (d.lower[var.0] * d.col_scale[var.0], d.upper[var.0] * d.col_scale[var.0])
    }

    /// Restores every structural bound to the model's original value.
    pub fn reset_bounds(&mut self) {
        for (j, &(l, u)) in self.original_bounds.iter().enumerate() {
            self.simplex.data.set_structural_bounds(j, l, u);
        }
    }

    pub(crate) fn basis(&self) -> Basis {
        self.simplex.snapshot()
    }

    pub(crate) fn set_basis(&mut self, basis: &Basis) {
        self.simplex.restore(basis);
    }

    pub fn iterations(&self) -> u64 {
        self.simplex.iterations
    }

    pub fn solve(&mut self) -> LpSolution {
        self.solve_with(None, None)
    }

    /// Solves with an optional deadline and an optional objective cutoff
    /// (in model units) above which the solve may stop early.
    pub fn solve_with(&mut self, deadline: Option<Instant>, cutoff: Option<f64>) -> LpSolution {
        let start = self.simplex.iterations;
        let limits = Limits {
            deadline,
            max_iterations: u64::MAX,
            cutoff: cutoff.map(|c| self.simplex.data.scale_objective(c)),
        };
        let outcome = self.simplex.solve(&limits);
        let iterations = self.simplex.iterations - start;
        let n = self.simplex.data.n;
        let data = &self.simplex.data;
        let values: Vec<f64> = (0..n).map(|j| data.unscale_value(j, self.simplex.x[j])).collect();
        let reduced_costs: Vec<f64> = (0..n)
            .map(|j| {
                if self.simplex.status[j] == VarStatus::Basic {
                    0.0
                } else {
                    self.simplex.d[j] / (data.col_scale[j] * data.obj_scale)
                }
            })
            .collect();
        let objective = data.unscale_objective(self.simplex.objective());
        let (status, certificate) = match outcome {
            Outcome::Optimal => (LpStatus::Optimal, None),
            Outcome::Infeasible(j) => {
                let cert = if j < n { Certificate::Bound(VarId(j)) } else { Certificate::Row(j - n) };
                (LpStatus::Infeasible, Some(cert))
            }
            Outcome::Unbounded => (LpStatus::Unbounded, None),
            Outcome::IterationLimit => (LpStatus::IterationLimit, None),
            Outcome::TimeLimit => (LpStatus::TimeLimit, None),
            Outcome::Cutoff => (LpStatus::Cutoff, None),
        };
        LpSolution { status, values, objective, reduced_costs, iterations, certificate }
    }

    pub fn feasibility_tol(&self) -> f64 {
        self.feasibility_tol
    }
}

/// Solves the LP relaxation of `model` (binaries relaxed to their bounds).
pub fn solve_lp(model: &MilpModel, config: &SolverConfig) -> LpSolution {
    let deadline = Instant::now().checked_add(config.time_limit);
    let mut engine = LpEngine::new(model, config);
    engine.solve_with(deadline, None)
}
