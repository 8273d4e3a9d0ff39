use std::time::Duration;

/// Rule used to pick the branching variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchingRule {
    /// Binary with fractional part closest to 0.5, ties by lowest id.
    #[default]
    MostFractional,
    /// Pseudo-cost product score, falling back to most-fractional while
    /// a variable has no history.
    PseudoCost,
}

/// Order in which open nodes are explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Best-bound node selection with depth-first dives below each selected node.
    #[default]
    BestBoundDive,
    /// Pure best-bound selection.
    BestBound,
    /// Pure depth-first.
    DepthFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relative gap `(incumbent - bound) / |incumbent|` at which search stops.
    pub relative_gap: f64,
    /// Absolute objective gap at which search stops.
    pub absolute_gap: f64,
    pub time_limit: Duration,
    pub node_limit: Option<u64>,
    pub branching: BranchingRule,
    pub search: SearchStrategy,
    /// Primal feasibility tolerance used by the simplex (scaled space).
    pub feasibility_tol: f64,
    /// Distance from {0, 1} below which a binary counts as integral.
    pub integrality_tol: f64,
    /// Iterations without objective progress before the anti-cycling rule engages.
    pub stall_threshold: usize,
    /// Basis updates between refactorisations.
    pub refactor_interval: usize,
    /// Number of worker threads the caller asked for. Branch-and-bound runs a
    /// single deterministic worker; the value is used by embarrassingly
    /// parallel helpers such as enumeration oracles.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            relative_gap: 0.0,
            absolute_gap: 1e-6,
            time_limit: Duration::from_secs(2500),
            node_limit: None,
            branching: BranchingRule::MostFractional,
            search: SearchStrategy::BestBoundDive,
            feasibility_tol: 1e-7,
            integrality_tol: 1e-6,
            stall_threshold: 200,
            refactor_interval: 100,
            threads: 1,
        }
    }
}

impl SolverConfig {
    pub fn with_time_limit(mut self, secs: f64) -> Self {
        self.time_limit = Duration::from_secs_f64(secs.max(0.0));
        self
    }

    pub fn with_gap(mut self, relative_gap: f64) -> Self {
        self.relative_gap = relative_gap.max(0.0);
        self
    }

    pub fn is_valid(&self) -> bool {
        self.relative_gap >= 0.0
            && self.absolute_gap >= 0.0
            && self.feasibility_tol >= 0.0
            && self.integrality_tol >= 0.0
    }
}
