//! A small, deterministic MILP engine.
//!
//! Models are built with [`MilpModel`], relaxations are solved by a
//! bounded-variable revised simplex ([`solve_lp`], [`LpEngine`]) and integer
//! programs by branch-and-bound ([`solve_mip`]). Models can be written in LP
//! format for cross-checking against external solvers.

pub mod bnb;
pub mod config;
pub mod error;
pub mod lp;
pub mod lp_format;
pub mod model;

pub use bnb::{solve_mip, solve_mip_from, MipSolution, MipStatus};
pub use config::{BranchingRule, SearchStrategy, SolverConfig};
pub use error::{MilpError, Result};
pub use lp::{solve_lp, Certificate, LpEngine, LpSolution, LpStatus};
pub use lp_format::{export_lp_text, to_lp_string};
pub use model::{fix_binaries, ConstrId, LinExpr, LinearConstraint, MilpModel, Sense, VarId, VarKind, Variable};
