//! LP-based branch-and-bound over the binary variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::config::{BranchingRule, SearchStrategy, SolverConfig};
use crate::lp::{Basis, LpEngine, LpSolution, LpStatus};
use crate::model::{MilpModel, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    /// Incumbent proven optimal within the configured gap.
    Optimal,
    /// A limit stopped the search with an incumbent whose gap exceeds the tolerance.
    FeasibleGap,
    Infeasible,
    /// A limit stopped the search before any integer solution was found.
    TimeLimit,
    Unbounded,
}

impl MipStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MipStatus::Optimal => "optimal",
            MipStatus::FeasibleGap => "feasible-gap",
            MipStatus::Infeasible => "infeasible",
            MipStatus::TimeLimit => "time-limit",
            MipStatus::Unbounded => "unbounded",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, MipStatus::Optimal | MipStatus::FeasibleGap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipSolution {
    pub status: MipStatus,
    /// Incumbent values (empty when no solution was found).
    pub values: Vec<f64>,
    /// Incumbent objective, `+inf` without one.
    pub objective: f64,
    /// Proven lower bound on the optimum.
    pub best_bound: f64,
    /// `(objective - best_bound) / max(|objective|, 1e-10)`, `+inf` without an incumbent.
    pub gap: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall_time: Duration,
}

struct PathLink {
    var: u32,
    lower: f64,
    upper: f64,
    parent: Option<Rc<PathLink>>,
}

struct Node {
    seq: u64,
    depth: u32,
    bound: f64,
    path: Option<Rc<PathLink>>,
    basis: Option<Rc<Basis>>,
    /// Branching variable and direction that created the node, for pseudo-costs.
    origin: Option<(usize, bool, f64)>,
}

struct Keyed {
    primary: f64,
    seq: u64,
    node: Node,
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Keyed {}
impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Keyed {
    // BinaryHeap is a max-heap: smaller primary key and older sequence come first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.primary.total_cmp(&self.primary).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct PseudoCosts {
    down_sum: Vec<f64>,
    down_n: Vec<u32>,
    up_sum: Vec<f64>,
    up_n: Vec<u32>,
}

impl PseudoCosts {
    fn new(n: usize) -> Self {
        PseudoCosts { down_sum: vec![0.0; n], down_n: vec![0; n], up_sum: vec![0.0; n], up_n: vec![0; n] }
    }

    fn record(&mut self, var: usize, up: bool, frac: f64, gain: f64) {
        if frac <= 0.0 || !gain.is_finite() {
            return;
        }
        let g = gain.max(0.0) / frac;
        if up {
            self.up_sum[var] += g;
            self.up_n[var] += 1;
        } else {
            self.down_sum[var] += g;
            self.down_n[var] += 1;
        }
    }

    fn score(&self, var: usize, x: f64) -> Option<f64> {
        if self.down_n[var] == 0 || self.up_n[var] == 0 {
            return None;
        }
        let down = self.down_sum[var] / self.down_n[var] as f64 * x;
        let up = self.up_sum[var] / self.up_n[var] as f64 * (1.0 - x);
        Some(down.max(1e-6) * up.max(1e-6))
    }
}

struct Search<'a> {
    model: &'a MilpModel,
    config: &'a SolverConfig,
    engine: LpEngine,
    binaries: Vec<usize>,
    root_bounds: Vec<(f64, f64)>,
    heap: BinaryHeap<Keyed>,
    seq: u64,
    incumbent: Option<(f64, Vec<f64>)>,
    /// Smallest bound among nodes discarded within the gap tolerance.
    pruned_bound: f64,
    nodes: u64,
    pseudo: PseudoCosts,
    deadline: Option<Instant>,
}

/// Solves `model` to the gap configured in `config`.
///
/// The search is deterministic: with the same model and configuration it
/// visits the same nodes in the same order and returns the same incumbent.
pub fn solve_mip(model: &MilpModel, config: &SolverConfig) -> MipSolution {
    solve_mip_from(model, config, None)
}

/// Like [`solve_mip`], seeded with a candidate point. Its binaries are rounded
/// and the continuous part is re-optimised; an infeasible candidate is ignored.
pub fn solve_mip_from(model: &MilpModel, config: &SolverConfig, candidate: Option<&[f64]>) -> MipSolution {
    let start = Instant::now();
    let deadline = start.checked_add(config.time_limit);
    let engine = LpEngine::new(model, config);
    let binaries: Vec<usize> = model.binary_ids().into_iter().map(|v| v.0).collect();
    let root_bounds = model.variables().iter().map(|v| (v.lower, v.upper)).collect();
    let mut search = Search {
        model,
        config,
        engine,
        binaries,
        root_bounds,
        heap: BinaryHeap::new(),
        seq: 0,
        incumbent: None,
        pruned_bound: f64::INFINITY,
        nodes: 0,
        pseudo: PseudoCosts::new(model.num_variables()),
        deadline,
    };
    if let Some(x) = candidate.filter(|x| x.len() == model.num_variables()) {
        search.seed(x);
    }
    search.run(start)
}

enum NodeResult {
    /// Subtree closed (infeasible, pruned or integral).
    Closed,
    /// Branch on `var` at value `x`; the LP bound is `bound`.
    Branch { var: usize, x: f64, bound: f64, fixings: Vec<(usize, f64, f64)> },
    Unbounded,
    Interrupted,
}

impl<'a> Search<'a> {
    fn run(&mut self, start: Instant) -> MipSolution {
        if self.binaries.is_empty() {
            return self.pure_lp(start);
        }
        let root = Node { seq: 0, depth: 0, bound: f64::NEG_INFINITY, path: None, basis: None, origin: None };
        self.seq = 1;
        let mut interrupted = false;
        let mut unbounded = false;
        let mut current = Some(root);
        // Other child of the deepest dive branching, tried before the heap.
        let mut sibling: Option<Node> = None;
        let mut warm = true;

        loop {
            let node = match current.take() {
                Some(n) => n,
                None => match sibling.take().or_else(|| self.pop()) {
                    Some(n) => {
                        warm = false;
                        n
                    }
                    None => break,
                },
            };
            if self.limit_hit() {
                self.push(node);
                if let Some(s) = sibling.take() {
                    self.push(s);
                }
                interrupted = true;
                break;
            }
            if self.prunable(node.bound) {
                self.note_pruned(node.bound);
                continue;
            }
            if !warm {
                self.load(&node);
            }
            self.nodes += 1;
            match self.evaluate(&node) {
                NodeResult::Closed => {}
                NodeResult::Unbounded => {
                    unbounded = true;
                    break;
                }
                NodeResult::Interrupted => {
                    self.push(node);
                    if let Some(s) = sibling.take() {
                        self.push(s);
                    }
                    interrupted = true;
                    break;
                }
                NodeResult::Branch { var, x, bound, fixings } => {
                    let mut path = node.path.clone();
                    for (j, l, u) in fixings {
                        path = Some(Rc::new(PathLink { var: j as u32, lower: l, upper: u, parent: path }));
                    }
                    let basis = Rc::new(self.engine.basis());
                    let make = |this: &mut Self, up: bool| {
                        let v = if up { 1.0 } else { 0.0 };
                        let link = PathLink { var: var as u32, lower: v, upper: v, parent: path.clone() };
                        this.seq += 1;
                        Node {
                            seq: this.seq,
                            depth: node.depth + 1,
                            bound,
                            path: Some(Rc::new(link)),
                            basis: Some(basis.clone()),
                            origin: Some((var, up, if up { 1.0 - x } else { x })),
                        }
                    };
                    let up_first = x >= 0.5;
                    let first = make(self, up_first);
                    let second = make(self, !up_first);
                    match self.config.search {
                        SearchStrategy::BestBound => {
                            self.push(first);
                            self.push(second);
                            warm = false;
                        }
                        SearchStrategy::BestBoundDive | SearchStrategy::DepthFirst => {
                            if let Some(s) = sibling.replace(second) {
                                self.push(s);
                            }
                            let (j, l, u) = {
                                let link = first.path.as_ref().unwrap();
                                (link.var as usize, link.lower, link.upper)
                            };
                            // The dive child differs from the current LP by one bound.
                            self.engine.set_bounds(VarId(j), l, u);
                            current = Some(first);
                            warm = true;
                        }
                    }
                }
            }
        }

        self.finish(start, interrupted, unbounded)
    }

    fn seed(&mut self, x: &[f64]) {
        if self.binaries.is_empty() {
            return;
        }
        for &j in &self.binaries {
            let v = x[j].round().clamp(self.root_bounds[j].0, self.root_bounds[j].1);
            self.engine.set_bounds(VarId(j), v, v);
        }
        let lp = self.engine.solve_with(self.deadline, None);
        if lp.status == LpStatus::Optimal {
            self.accept(&lp);
        }
        for &j in &self.binaries {
            let (l, u) = self.root_bounds[j];
            self.engine.set_bounds(VarId(j), l, u);
        }
    }

    fn pure_lp(&mut self, start: Instant) -> MipSolution {
        let lp = self.engine.solve_with(self.deadline, None);
        self.nodes = 1;
        let (status, values, objective, bound) = match lp.status {
            LpStatus::Optimal => (MipStatus::Optimal, lp.values, lp.objective, lp.objective),
            LpStatus::Infeasible => (MipStatus::Infeasible, Vec::new(), f64::INFINITY, f64::INFINITY),
            LpStatus::Unbounded => (MipStatus::Unbounded, Vec::new(), f64::NEG_INFINITY, f64::NEG_INFINITY),
            _ => (MipStatus::TimeLimit, Vec::new(), f64::INFINITY, f64::NEG_INFINITY),
        };
        MipSolution {
            status,
            values,
            objective,
            best_bound: bound,
            gap: if status == MipStatus::Optimal { 0.0 } else { f64::INFINITY },
            nodes: 1,
            lp_iterations: self.engine.iterations(),
            wall_time: start.elapsed(),
        }
    }

    fn key(&self, node: &Node) -> f64 {
        match self.config.search {
            SearchStrategy::DepthFirst => -(node.depth as f64),
            _ => node.bound,
        }
    }

    fn push(&mut self, node: Node) {
        let primary = self.key(&node);
        self.heap.push(Keyed { primary, seq: node.seq, node });
    }

    fn pop(&mut self) -> Option<Node> {
        self.heap.pop().map(|k| k.node)
    }

    fn limit_hit(&self) -> bool {
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return true;
            }
        }
        matches!(self.config.node_limit, Some(limit) if self.nodes >= limit)
    }

    fn tolerance(&self, incumbent: f64) -> f64 {
        self.config.absolute_gap.max(self.config.relative_gap * incumbent.abs())
    }

    fn prunable(&self, bound: f64) -> bool {
        match &self.incumbent {
            Some((z, _)) => bound >= z - self.tolerance(*z),
            None => false,
        }
    }

    fn note_pruned(&mut self, bound: f64) {
        if let Some((z, _)) = &self.incumbent {
            if bound < *z {
                self.pruned_bound = self.pruned_bound.min(bound);
            }
        }
    }

    /// Applies the node's bound path and basis to the engine.
    fn load(&mut self, node: &Node) {
        for &j in &self.binaries {
            let (l, u) = self.root_bounds[j];
            self.engine.set_bounds(VarId(j), l, u);
        }
        let mut changes = Vec::new();
        let mut link = node.path.as_deref();
        while let Some(l) = link {
            changes.push((l.var as usize, l.lower, l.upper));
            link = l.parent.as_deref();
        }
        for &(j, l, u) in changes.iter().rev() {
            self.engine.set_bounds(VarId(j), l, u);
        }
        if let Some(b) = &node.basis {
            self.engine.set_basis(b);
        }
    }

    fn cutoff(&self) -> Option<f64> {
        self.incumbent.as_ref().map(|(z, _)| z - self.tolerance(*z))
    }

    fn evaluate(&mut self, node: &Node) -> NodeResult {
        let lp = self.engine.solve_with(self.deadline, self.cutoff());
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return NodeResult::Closed,
            LpStatus::Cutoff => return NodeResult::Closed,
            LpStatus::Unbounded => {
                return if node.depth == 0 { NodeResult::Unbounded } else { NodeResult::Closed };
            }
            LpStatus::TimeLimit | LpStatus::IterationLimit => return NodeResult::Interrupted,
        }
        let bound = lp.objective.max(node.bound);
        if let Some((var, up, frac)) = node.origin {
            self.pseudo.record(var, up, frac, lp.objective - node.bound);
        }
        if self.prunable(bound) {
            self.note_pruned(bound);
            return NodeResult::Closed;
        }
        match self.select_branch(&lp) {
            None => {
                self.accept(&lp);
                NodeResult::Closed
            }
            Some((var, x)) => {
                let fixings = self.reduced_cost_fixings(&lp);
                for &(j, l, u) in &fixings {
                    self.engine.set_bounds(VarId(j), l, u);
                }
                NodeResult::Branch { var, x, bound, fixings }
            }
        }
    }

    fn accept(&mut self, lp: &LpSolution) {
        let better = match &self.incumbent {
            Some((z, _)) => lp.objective < *z - 1e-9 * (1.0 + z.abs()),
            None => true,
        };
        if better {
            log::debug!("incumbent {:.6} at node {}", lp.objective, self.nodes);
            let mut values = lp.values.clone();
            for &j in &self.binaries {
                values[j] = values[j].round();
            }
            self.incumbent = Some((lp.objective, values));
        }
    }

    fn select_branch(&self, lp: &LpSolution) -> Option<(usize, f64)> {
        let tol = self.config.integrality_tol;
        let mut best: Option<(usize, f64, f64)> = None;
        let mut best_pc: Option<(usize, f64, f64)> = None;
        for &j in &self.binaries {
            let x = lp.values[j];
            let frac = x.min(1.0 - x);
            if frac <= tol {
                continue;
            }
            if best.is_none_or(|(_, _, f)| frac > f) {
                best = Some((j, x, frac));
            }
            if self.config.branching == BranchingRule::PseudoCost {
                if let Some(s) = self.pseudo.score(j, x) {
                    if best_pc.is_none_or(|(_, _, b)| s > b) {
                        best_pc = Some((j, x, s));
                    }
                }
            }
        }
        best_pc.or(best).map(|(j, x, _)| (j, x))
    }

    fn reduced_cost_fixings(&self, lp: &LpSolution) -> Vec<(usize, f64, f64)> {
        let Some((z, _)) = &self.incumbent else {
            return Vec::new();
        };
        let slack = z - self.tolerance(*z) - lp.objective + 1e-9 * (1.0 + z.abs());
        if slack < 0.0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for &j in &self.binaries {
            let (l, u) = self.engine.bounds(VarId(j));
            if l == u {
                continue;
            }
            let d = lp.reduced_costs[j];
            let x = lp.values[j];
            if x <= self.config.integrality_tol && d > slack {
                out.push((j, 0.0, 0.0));
            } else if x >= 1.0 - self.config.integrality_tol && -d > slack {
                out.push((j, 1.0, 1.0));
            }
        }
        out
    }

    fn finish(&mut self, start: Instant, interrupted: bool, unbounded: bool) -> MipSolution {
        let open = self.heap.iter().map(|k| k.node.bound).fold(f64::INFINITY, f64::min);
        let lp_iterations = self.engine.iterations();
        if unbounded {
            return MipSolution {
                status: MipStatus::Unbounded,
                values: Vec::new(),
                objective: f64::NEG_INFINITY,
                best_bound: f64::NEG_INFINITY,
                gap: f64::INFINITY,
                nodes: self.nodes,
                lp_iterations,
                wall_time: start.elapsed(),
            };
        }
        let Some((z, values)) = self.incumbent.take() else {
            let status = if interrupted { MipStatus::TimeLimit } else { MipStatus::Infeasible };
            let best_bound = if interrupted { open } else { f64::INFINITY };
            return MipSolution {
                status,
                values: Vec::new(),
                objective: f64::INFINITY,
                best_bound,
                gap: f64::INFINITY,
                nodes: self.nodes,
                lp_iterations,
                wall_time: start.elapsed(),
            };
        };
        let (objective, values) = self.polish(z, values);
        let best_bound = open.min(self.pruned_bound).min(objective);
        let gap = (objective - best_bound).max(0.0) / objective.abs().max(1e-10);
        let closed = objective - best_bound <= self.tolerance(objective) * (1.0 + 1e-9) + 1e-12;
        let status = if closed { MipStatus::Optimal } else { MipStatus::FeasibleGap };
        MipSolution {
            status,
            values,
            objective,
            best_bound,
            gap,
            nodes: self.nodes,
            lp_iterations: self.engine.iterations(),
            wall_time: start.elapsed(),
        }
    }

    /// Re-solves the LP with binaries fixed at the incumbent's rounded values.
    fn polish(&mut self, z: f64, values: Vec<f64>) -> (f64, Vec<f64>) {
        for (j, &(l, u)) in self.root_bounds.iter().enumerate() {
            self.engine.set_bounds(VarId(j), l, u);
        }
        for &j in &self.binaries {
            self.engine.set_bounds(VarId(j), values[j], values[j]);
        }
        let lp = self.engine.solve_with(None, None);
        if lp.status == LpStatus::Optimal && lp.objective <= z + 1e-7 * (1.0 + z.abs()) {
            let mut v = lp.values;
            for &j in &self.binaries {
                v[j] = values[j];
            }
            let obj = self.model.evaluate_objective(&v);
            (obj, v)
        } else {
            let obj = self.model.evaluate_objective(&values);
            (obj, values)
        }
    }
}
