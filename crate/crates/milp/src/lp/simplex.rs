//! Bounded-variable revised simplex.
//!
//! The dual simplex (dual steepest-edge pricing, bound-flipping ratio test)
//! does the bulk of the work, both from the slack basis and from warm starts
//! after bound changes. A primal simplex phase cleans up residual dual
//! infeasibilities and detects unboundedness. Both fall back to Bland's
//! smallest-index rule when the objective stalls.

use std::time::Instant;

use super::data::LpData;
use super::lu::Factor;

const NONE: usize = usize::MAX;
const DUAL_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-9;
const ARTIFICIAL_BOUND: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    Fixed,
    /// Nonbasic strictly inside its bounds (or free); value kept in `x`.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Basis {
    head: Vec<u32>,
    status: Vec<VarStatus>,
    /// Values of nonbasic variables strictly between their bounds.
    interior: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    /// Basic variable (or its row) whose infeasibility cannot be repaired.
    Infeasible(usize),
    Unbounded,
    IterationLimit,
    TimeLimit,
    /// Dual objective exceeded the cutoff; the LP optimum is no better than it.
    Cutoff,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Limits {
    pub deadline: Option<Instant>,
    pub max_iterations: u64,
    /// Scaled objective above which the dual simplex may stop early.
    pub cutoff: Option<f64>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { deadline: None, max_iterations: u64::MAX, cutoff: None }
    }
}

pub(crate) struct Simplex {
    pub data: LpData,
    pub head: Vec<usize>,
    pos_of: Vec<usize>,
    pub status: Vec<VarStatus>,
    pub x: Vec<f64>,
    pub d: Vec<f64>,
    factor: Factor,
    dse: Vec<f64>,
    /// Bounds temporarily imposed on variables lacking the bound the dual needs.
    artificial: Vec<(usize, f64, f64)>,
    pub iterations: u64,
    pub primal_tol: f64,
    pub stall_threshold: usize,
    pub refactor_interval: usize,
    // scratch
    work_row: Vec<f64>,
    work_pos: Vec<f64>,
    rho: Vec<f64>,
    alpha_col: Vec<f64>,
    tau: Vec<f64>,
    alpha_row: Vec<f64>,
    row_touched: Vec<usize>,
    row_mark: Vec<bool>,
}

impl Simplex {
    pub fn new(data: LpData, primal_tol: f64, stall_threshold: usize, refactor_interval: usize) -> Simplex {
        let n = data.n;
        let m = data.m;
        let mut s = Simplex {
            head: (n..n + m).collect(),
            pos_of: vec![NONE; n + m],
            status: vec![VarStatus::AtLower; n + m],
            x: vec![0.0; n + m],
            d: vec![0.0; n + m],
            factor: Factor::default(),
            dse: vec![1.0; m],
            artificial: Vec::new(),
            iterations: 0,
            primal_tol,
            stall_threshold: stall_threshold.max(10),
            refactor_interval: refactor_interval.max(1),
            work_row: vec![0.0; m],
            work_pos: vec![0.0; m],
            rho: vec![0.0; m],
            alpha_col: vec![0.0; m],
            tau: vec![0.0; m],
            alpha_row: vec![0.0; n + m],
            row_touched: Vec::new(),
            row_mark: vec![false; n + m],
            data,
        };
        for (p, &j) in s.head.iter().enumerate() {
            s.pos_of[j] = p;
            s.status[j] = VarStatus::Basic;
        }
        for j in 0..n {
            s.status[j] = s.default_status(j);
            s.x[j] = s.nonbasic_value(j);
        }
        s
    }

    pub fn snapshot(&self) -> Basis {
        let interior = self
            .status
            .iter()
            .enumerate()
            .filter(|(_, &st)| st == VarStatus::Free)
            .map(|(j, _)| (j as u32, self.x[j]))
            .collect();
        Basis { head: self.head.iter().map(|&j| j as u32).collect(), status: self.status.clone(), interior }
    }

    pub fn restore(&mut self, basis: &Basis) {
        self.head.clear();
        self.head.extend(basis.head.iter().map(|&j| j as usize));
        self.status.clone_from(&basis.status);
        for &(j, v) in &basis.interior {
            self.x[j as usize] = v;
        }
        for j in 0..self.status.len() {
            if self.status[j] != VarStatus::Basic {
                self.x[j] = self.nonbasic_value(j);
            }
        }
        self.pos_of.iter_mut().for_each(|p| *p = NONE);
        for (p, &j) in self.head.iter().enumerate() {
            self.pos_of[j] = p;
        }
        self.dse.iter_mut().for_each(|w| *w = 1.0);
    }

    pub fn objective(&self) -> f64 {
        self.data.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    fn lower(&self, j: usize) -> f64 {
        self.data.lower[j]
    }

    fn upper(&self, j: usize) -> f64 {
        self.data.upper[j]
    }

    fn default_status(&self, j: usize) -> VarStatus {
        let (l, u) = (self.lower(j), self.upper(j));
        if l == u {
            VarStatus::Fixed
        } else if l.is_finite() && (self.data.cost[j] >= 0.0 || !u.is_finite()) {
            VarStatus::AtLower
        } else if u.is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower | VarStatus::Fixed => self.lower(j),
            VarStatus::AtUpper => self.upper(j),
            VarStatus::Free => {
                let v = self.x[j];
                if v.is_finite() {
                    v.clamp(self.lower(j), self.upper(j))
                } else {
                    0.0
                }
            }
            VarStatus::Basic => self.x[j],
        }
    }

    /// Makes nonbasic statuses consistent with the (possibly changed) bounds.
    fn sync_nonbasic(&mut self) {
        for j in 0..self.data.n + self.data.m {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let (l, u) = (self.lower(j), self.upper(j));
            let st = match self.status[j] {
                _ if l == u => VarStatus::Fixed,
                VarStatus::Fixed => {
                    if self.d[j] < 0.0 && u.is_finite() {
                        VarStatus::AtUpper
                    } else if l.is_finite() {
                        VarStatus::AtLower
                    } else if u.is_finite() {
                        VarStatus::AtUpper
                    } else {
                        VarStatus::Free
                    }
                }
                VarStatus::AtLower if !l.is_finite() => {
                    if u.is_finite() {
                        VarStatus::AtUpper
                    } else {
                        VarStatus::Free
                    }
                }
                VarStatus::AtUpper if !u.is_finite() => {
                    if l.is_finite() {
                        VarStatus::AtLower
                    } else {
                        VarStatus::Free
                    }
                }
                VarStatus::Free => {
                    let v = self.x[j];
                    if l.is_finite() && v <= l {
                        VarStatus::AtLower
                    } else if u.is_finite() && v >= u {
                        VarStatus::AtUpper
                    } else {
                        VarStatus::Free
                    }
                }
                s => s,
            };
            self.status[j] = st;
            self.x[j] = self.nonbasic_value(j);
        }
    }

    /// Factorises the current basis, swapping in logicals for dependent columns.
    fn refactor(&mut self) {
        loop {
            let data = &self.data;
            let head = &self.head;
            match Factor::new(data.m, |p, buf| data.column(head[p], buf)) {
                Ok(f) => {
                    self.factor = f;
                    return;
                }
                Err(sing) => {
                    log::debug!("repairing singular basis: {} columns", sing.positions.len());
                    for (&p, &r) in sing.positions.iter().zip(&sing.rows) {
                        let old = self.head[p];
                        let logical = self.data.n + r;
                        self.pos_of[old] = NONE;
                        self.status[old] = VarStatus::Free;
                        let (l, u) = (self.lower(old), self.upper(old));
                        self.status[old] = if l == u {
                            VarStatus::Fixed
                        } else if l.is_finite() && (self.x[old] - l).abs() <= (u - self.x[old]).abs() {
                            VarStatus::AtLower
                        } else if u.is_finite() {
                            VarStatus::AtUpper
                        } else if l.is_finite() {
                            VarStatus::AtLower
                        } else {
                            VarStatus::Free
                        };
                        self.x[old] = self.nonbasic_value(old);
                        if self.status[logical] != VarStatus::Basic {
                            self.head[p] = logical;
                            self.pos_of[logical] = p;
                            self.status[logical] = VarStatus::Basic;
                            self.dse[p] = 1.0;
                        }
                    }
                }
            }
        }
    }

    fn compute_primal(&mut self) {
        let m = self.data.m;
        let mut rhs = std::mem::take(&mut self.work_row);
        rhs.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.data.n + m {
            if self.status[j] != VarStatus::Basic && self.x[j] != 0.0 {
                self.data.add_column(j, -self.x[j], &mut rhs);
            }
        }
        let mut out = std::mem::take(&mut self.work_pos);
        self.factor.ftran(&mut rhs, &mut out);
        for p in 0..m {
            self.x[self.head[p]] = out[p];
        }
        self.work_row = rhs;
        self.work_pos = out;
    }

    fn compute_dual(&mut self) {
        let m = self.data.m;
        let mut cb = std::mem::take(&mut self.work_pos);
        for p in 0..m {
            cb[p] = self.data.cost[self.head[p]];
        }
        let mut pi = std::mem::take(&mut self.work_row);
        self.factor.btran(&mut cb, &mut pi);
        for j in 0..self.data.n + m {
            self.d[j] = if self.status[j] == VarStatus::Basic {
                0.0
            } else {
                self.data.cost[j] - self.data.dot_column(j, &pi)
            };
        }
        self.work_pos = cb;
        self.work_row = pi;
    }

    fn primal_infeasibility(&self, j: usize) -> f64 {
        let x = self.x[j];
        if x < self.lower(j) - self.primal_tol {
            x - self.lower(j)
        } else if x > self.upper(j) + self.primal_tol {
            x - self.upper(j)
        } else {
            0.0
        }
    }

    fn is_primal_feasible(&self) -> bool {
        self.head.iter().all(|&j| self.primal_infeasibility(j) == 0.0)
    }

    /// Dual infeasibility of nonbasic `j` (positive when it violates optimality).
    fn dual_infeasibility(&self, j: usize) -> f64 {
        let d = self.d[j];
        match self.status[j] {
            VarStatus::AtLower => -d,
            VarStatus::AtUpper => d,
            VarStatus::Free => {
                let (l, u, x) = (self.lower(j), self.upper(j), self.x[j]);
                let up = if x < u { -d } else { f64::NEG_INFINITY };
                let down = if x > l { d } else { f64::NEG_INFINITY };
                up.max(down)
            }
            VarStatus::Basic | VarStatus::Fixed => 0.0,
        }
    }

    fn is_boxed(&self, j: usize) -> bool {
        self.lower(j).is_finite() && self.upper(j).is_finite()
    }

    /// Flips boxed nonbasics to their dual-feasible bound; returns indices of
    /// variables whose dual infeasibility cannot be repaired by a flip.
    fn flip_to_dual_feasible(&mut self) -> Vec<usize> {
        let mut bad = Vec::new();
        let mut changed = false;
        for j in 0..self.data.n + self.data.m {
            if self.dual_infeasibility(j) <= DUAL_TOL {
                continue;
            }
            if self.is_boxed(j) {
                self.status[j] = if self.d[j] < 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                self.x[j] = self.nonbasic_value(j);
                changed = true;
            } else {
                bad.push(j);
            }
        }
        if changed {
            self.compute_primal();
        }
        bad
    }

    /// Imposes temporary bounds so every listed variable can sit at a dual-feasible bound.
    fn add_artificial_bounds(&mut self, vars: &[usize]) {
        for &j in vars {
            let (l, u) = (self.lower(j), self.upper(j));
            self.artificial.push((j, l, u));
            let anchor = if self.x[j].is_finite() { self.x[j] } else { 0.0 };
            if self.d[j] < 0.0 {
                self.data.upper[j] = anchor.max(l.max(0.0)) + ARTIFICIAL_BOUND;
                self.status[j] = VarStatus::AtUpper;
            } else {
                self.data.lower[j] = anchor.min(u.min(0.0)) - ARTIFICIAL_BOUND;
                self.status[j] = VarStatus::AtLower;
            }
            self.x[j] = self.nonbasic_value(j);
        }
        self.compute_primal();
    }

    fn remove_artificial_bounds(&mut self) -> bool {
        let had = !self.artificial.is_empty();
        for (j, l, u) in std::mem::take(&mut self.artificial) {
            self.data.lower[j] = l;
            self.data.upper[j] = u;
            if self.status[j] != VarStatus::Basic {
                self.status[j] = VarStatus::Free;
                self.x[j] = self.nonbasic_value(j);
            }
        }
        if had {
            self.compute_primal();
        }
        had
    }

    /// Solves from the current basis. Bounds may have changed since the last call.
    pub fn solve(&mut self, limits: &Limits) -> Outcome {
        let start_iter = self.iterations;
        self.sync_nonbasic();
        self.refactor();
        self.compute_primal();
        self.compute_dual();

        for _round in 0..8 {
            let bad = self.flip_to_dual_feasible();
            let outcome = if bad.is_empty() {
                self.dual_simplex(limits, start_iter)
            } else if self.is_primal_feasible() {
                self.primal_simplex(limits, start_iter)
            } else {
                self.add_artificial_bounds(&bad);
                self.dual_simplex(limits, start_iter)
            };
            let had_artificial = self.remove_artificial_bounds();
            match outcome {
                Outcome::Optimal | Outcome::Cutoff => {}
                Outcome::Infeasible(_) if had_artificial => {
                    log::debug!("infeasibility found with artificial bounds; accepting");
                    return outcome;
                }
                other => return other,
            }
            if outcome == Outcome::Cutoff && !had_artificial {
                return Outcome::Cutoff;
            }
            // Verify from a fresh factorisation.
            self.refactor();
            self.compute_primal();
            self.compute_dual();
            if !self.is_primal_feasible() {
                continue;
            }
            let dual_bad = (0..self.data.n + self.data.m).any(|j| self.dual_infeasibility(j) > DUAL_TOL);
            if !dual_bad {
                return Outcome::Optimal;
            }
            match self.primal_simplex(limits, start_iter) {
                Outcome::Optimal => {
                    self.refactor();
                    self.compute_primal();
                    self.compute_dual();
                    if self.is_primal_feasible()
                        && (0..self.data.n + self.data.m).all(|j| self.dual_infeasibility(j) <= DUAL_TOL)
                    {
                        return Outcome::Optimal;
                    }
                }
                other => return other,
            }
        }
        log::warn!("simplex did not settle after repeated cleanup rounds");
        Outcome::Optimal
    }

    fn check_limits(&self, limits: &Limits, start_iter: u64) -> Option<Outcome> {
        if self.iterations - start_iter >= limits.max_iterations {
            return Some(Outcome::IterationLimit);
        }
        if self.iterations.is_multiple_of(32) {
            if let Some(deadline) = limits.deadline {
                if Instant::now() >= deadline {
                    return Some(Outcome::TimeLimit);
                }
            }
        }
        None
    }

    /// BTRAN of unit vector at basis position `r` into `self.rho`.
    fn btran_unit(&mut self, r: usize) {
        let mut e = std::mem::take(&mut self.work_pos);
        e.iter_mut().for_each(|v| *v = 0.0);
        e[r] = 1.0;
        let mut rho = std::mem::take(&mut self.rho);
        self.factor.btran(&mut e, &mut rho);
        self.work_pos = e;
        self.rho = rho;
    }

    /// FTRAN of column `j` into `self.alpha_col`.
    fn ftran_column(&mut self, j: usize) {
        let mut rhs = std::mem::take(&mut self.work_row);
        rhs.iter_mut().for_each(|v| *v = 0.0);
        self.data.add_column(j, 1.0, &mut rhs);
        let mut out = std::mem::take(&mut self.alpha_col);
        self.factor.ftran(&mut rhs, &mut out);
        self.work_row = rhs;
        self.alpha_col = out;
    }

    /// Pivot row `rho^T [A | -I]` over nonbasic columns, stored sparsely.
    fn compute_pivot_row(&mut self) {
        for &j in &self.row_touched {
            self.alpha_row[j] = 0.0;
            self.row_mark[j] = false;
        }
        self.row_touched.clear();
        let n = self.data.n;
        for i in 0..self.data.m {
            let r = self.rho[i];
            if r == 0.0 {
                continue;
            }
            for k in self.data.row_start[i]..self.data.row_start[i + 1] {
                let j = self.data.row_col[k];
                if self.status[j] == VarStatus::Basic {
                    continue;
                }
                if !self.row_mark[j] {
                    self.row_mark[j] = true;
                    self.row_touched.push(j);
                }
                self.alpha_row[j] += r * self.data.row_val[k];
            }
            let lj = n + i;
            if self.status[lj] != VarStatus::Basic {
                if !self.row_mark[lj] {
                    self.row_mark[lj] = true;
                    self.row_touched.push(lj);
                }
                self.alpha_row[lj] -= r;
            }
        }
    }

    fn pivot_basis(&mut self, r: usize, q: usize, leaving_status: VarStatus) {
        let p = self.head[r];
        self.status[p] = leaving_status;
        self.x[p] = match leaving_status {
            VarStatus::AtLower | VarStatus::Fixed => self.lower(p),
            VarStatus::AtUpper => self.upper(p),
            _ => self.x[p],
        };
        self.pos_of[p] = NONE;
        self.head[r] = q;
        self.pos_of[q] = r;
        self.status[q] = VarStatus::Basic;
        self.d[q] = 0.0;
        let alpha = std::mem::take(&mut self.alpha_col);
        self.factor.update(r, &alpha);
        self.alpha_col = alpha;
        if self.factor.num_etas() >= self.refactor_interval {
            self.refactor();
            self.compute_primal();
            self.compute_dual();
        }
    }

    fn leaving_status(&self, p: usize, to_lower: bool) -> VarStatus {
        if self.lower(p) == self.upper(p) {
            VarStatus::Fixed
        } else if to_lower {
            VarStatus::AtLower
        } else {
            VarStatus::AtUpper
        }
    }

    fn dual_simplex(&mut self, limits: &Limits, start_iter: u64) -> Outcome {
        let m = self.data.m;
        let mut best_obj = f64::NEG_INFINITY;
        let mut stall = 0usize;
        let mut bland = false;
        let mut rejected: Vec<usize> = Vec::new();
        let mut candidates: Vec<(f64, usize, f64)> = Vec::new();
        let mut flips: Vec<usize> = Vec::new();

        loop {
            if let Some(o) = self.check_limits(limits, start_iter) {
                return o;
            }
            // Pricing.
            let mut r = NONE;
            let mut best = 0.0;
            for p in 0..m {
                if rejected.contains(&p) {
                    continue;
                }
                let j = self.head[p];
                let inf = self.primal_infeasibility(j);
                if inf == 0.0 {
                    continue;
                }
                if bland {
                    if r == NONE || j < self.head[r] {
                        r = p;
                    }
                } else {
                    let score = inf * inf / self.dse[p];
                    if score > best {
                        best = score;
                        r = p;
                    }
                }
            }
            if r == NONE {
                if !rejected.is_empty() {
                    // Rows skipped for tiny pivots: refactor and retry once more.
                    rejected.clear();
                    self.refactor();
                    self.compute_primal();
                    self.compute_dual();
                    if self.head.iter().all(|&j| self.primal_infeasibility(j) == 0.0) {
                        return Outcome::Optimal;
                    }
                    continue;
                }
                return Outcome::Optimal;
            }
            let p = self.head[r];
            let below = self.x[p] < self.lower(p);
            let bound = if below { self.lower(p) } else { self.upper(p) };
            let delta = self.x[p] - bound;
            let dir = if below { 1.0 } else { -1.0 };

            self.btran_unit(r);
            self.compute_pivot_row();

            // Ratio test with bound flipping.
            candidates.clear();
            for &j in &self.row_touched {
                let a = self.alpha_row[j];
                if a.abs() < PIVOT_TOL {
                    continue;
                }
                let at = dir * a;
                let ratio = match self.status[j] {
                    VarStatus::AtLower if at < 0.0 => self.d[j].max(0.0) / -at,
                    VarStatus::AtUpper if at > 0.0 => (-self.d[j]).max(0.0) / at,
                    VarStatus::Free => 0.0,
                    _ => continue,
                };
                candidates.push((ratio, j, a.abs()));
            }
            if candidates.is_empty() {
                return Outcome::Infeasible(p);
            }
            candidates.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap()
                    .then(b.2.partial_cmp(&a.2).unwrap())
                    .then(a.1.cmp(&b.1))
            });
            if bland {
                // Smallest index among the minimum ratios.
                let tmin = candidates[0].0;
                let mut keep: Vec<(f64, usize, f64)> =
                    candidates.iter().copied().filter(|c| c.0 <= tmin + 1e-12).collect();
                keep.sort_by_key(|c| c.1);
                candidates.clear();
                candidates.extend(keep);
            }

            flips.clear();
            let mut slope = delta.abs();
            let mut enter_idx = NONE;
            for (k, &(_, j, a)) in candidates.iter().enumerate() {
                if !bland && self.status[j] != VarStatus::Free && self.is_boxed(j) {
                    let range = self.upper(j) - self.lower(j);
                    let next = slope - a * range;
                    if next > self.primal_tol {
                        slope = next;
                        flips.push(j);
                        continue;
                    }
                }
                enter_idx = k;
                break;
            }
            if enter_idx == NONE {
                // The dual objective rises without bound along this row.
                return Outcome::Infeasible(p);
            }
            // Harris pass among the remaining breakpoints: prefer a large pivot.
            if !bland {
                let mut tmax = f64::INFINITY;
                for &(_, j, a) in &candidates[enter_idx..] {
                    tmax = tmax.min((self.d[j].abs() + DUAL_TOL) / a);
                }
                let mut best_k = enter_idx;
                for (k, &(ratio, _, a)) in candidates.iter().enumerate().skip(enter_idx) {
                    if ratio > tmax {
                        break;
                    }
                    if a > candidates[best_k].2 {
                        best_k = k;
                    }
                }
                enter_idx = best_k;
            }
            let (t_raw, q, _) = candidates[enter_idx];
            let t = t_raw.max(0.0);

            self.ftran_column(q);
            let alpha_rq = self.alpha_col[r];
            let alpha_row_q = self.alpha_row[q];
            if alpha_rq.abs() < 1e-11
                || (alpha_rq - alpha_row_q).abs() > 1e-6 * (1.0 + alpha_rq.abs())
            {
                if self.factor.num_etas() > 0 {
                    self.refactor();
                    self.compute_primal();
                    self.compute_dual();
                } else {
                    rejected.push(r);
                }
                continue;
            }
            if alpha_rq.abs() < 1e-7 {
                rejected.push(r);
                continue;
            }
            rejected.clear();

            // Bound flips of the passed breakpoints.
            if !flips.is_empty() {
                let mut rhs = std::mem::take(&mut self.work_row);
                rhs.iter_mut().for_each(|v| *v = 0.0);
                for &j in &flips {
                    let (l, u) = (self.lower(j), self.upper(j));
                    let (new_status, step) = if self.status[j] == VarStatus::AtLower {
                        (VarStatus::AtUpper, u - l)
                    } else {
                        (VarStatus::AtLower, l - u)
                    };
                    self.status[j] = new_status;
                    self.x[j] = self.nonbasic_value(j);
                    self.data.add_column(j, step, &mut rhs);
                }
                let mut dx = std::mem::take(&mut self.work_pos);
                self.factor.ftran(&mut rhs, &mut dx);
                for pos in 0..m {
                    if dx[pos] != 0.0 {
                        self.x[self.head[pos]] -= dx[pos];
                    }
                }
                self.work_row = rhs;
                self.work_pos = dx;
            }

            // DSE: tau = B^{-1} rho.
            let rho_norm2: f64 = self.rho.iter().map(|v| v * v).sum();
            {
                let mut rhs = std::mem::take(&mut self.work_row);
                rhs.copy_from_slice(&self.rho);
                let mut tau = std::mem::take(&mut self.tau);
                self.factor.ftran(&mut rhs, &mut tau);
                self.work_row = rhs;
                self.tau = tau;
            }

            // Primal step.
            let delta_now = self.x[p] - bound;
            let theta_p = delta_now / alpha_rq;
            for pos in 0..m {
                let a = self.alpha_col[pos];
                if a != 0.0 {
                    self.x[self.head[pos]] -= theta_p * a;
                }
            }
            self.x[q] += theta_p;

            // Dual step.
            for &j in &self.row_touched {
                if self.status[j] != VarStatus::Basic {
                    self.d[j] += t * dir * self.alpha_row[j];
                }
            }
            let d_p = dir * t;

            // DSE weights.
            let wr = rho_norm2.max(1e-12);
            for pos in 0..m {
                if pos == r {
                    continue;
                }
                let ratio = self.alpha_col[pos] / alpha_rq;
                if ratio != 0.0 {
                    let w = self.dse[pos] - 2.0 * ratio * self.tau[pos] + ratio * ratio * wr;
                    self.dse[pos] = w.max(1e-8);
                }
            }
            self.dse[r] = (wr / (alpha_rq * alpha_rq)).max(1e-8);

            let leaving = self.leaving_status(p, below);
            self.iterations += 1;
            self.pivot_basis(r, q, leaving);
            if self.status[p] != VarStatus::Basic && self.factor.num_etas() != 0 {
                self.d[p] = d_p;
            }

            let obj = self.objective();
            if let Some(cut) = limits.cutoff {
                if obj > cut {
                    return Outcome::Cutoff;
                }
            }
            if obj > best_obj + 1e-12 * (1.0 + best_obj.abs()) {
                best_obj = obj;
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall >= self.stall_threshold {
                    bland = true;
                }
            }
        }
    }

    fn primal_simplex(&mut self, limits: &Limits, start_iter: u64) -> Outcome {
        let m = self.data.m;
        let nt = self.data.n + m;
        let mut best_obj = f64::INFINITY;
        let mut stall = 0usize;
        let mut bland = false;
        let mut rejected: Vec<usize> = Vec::new();
        loop {
            if let Some(o) = self.check_limits(limits, start_iter) {
                return o;
            }
            // Pricing.
            let mut q = NONE;
            let mut best = 0.0;
            for j in 0..nt {
                if rejected.contains(&j) {
                    continue;
                }
                let inf = self.dual_infeasibility(j);
                if inf > DUAL_TOL {
                    if bland {
                        q = j;
                        break;
                    }
                    if inf > best {
                        best = inf;
                        q = j;
                    }
                }
            }
            if q == NONE {
                return Outcome::Optimal;
            }
            let dir = if self.d[q] < 0.0 { 1.0 } else { -1.0 };
            self.ftran_column(q);

            // Harris two-pass ratio test on the basic variables.
            let tol = self.primal_tol;
            let mut tmax = f64::INFINITY;
            for pos in 0..m {
                let a = dir * self.alpha_col[pos];
                if a.abs() < PIVOT_TOL {
                    continue;
                }
                let j = self.head[pos];
                // x_j moves by -a * theta.
                let lim = if a > 0.0 {
                    (self.x[j] - self.lower(j) + tol) / a
                } else {
                    (self.upper(j) - self.x[j] + tol) / -a
                };
                tmax = tmax.min(lim);
            }
            let mut r = NONE;
            let mut best_a = 0.0;
            let mut best_ratio = f64::INFINITY;
            for pos in 0..m {
                let a = dir * self.alpha_col[pos];
                if a.abs() < PIVOT_TOL {
                    continue;
                }
                let j = self.head[pos];
                let ratio = if a > 0.0 {
                    ((self.x[j] - self.lower(j)) / a).max(0.0)
                } else {
                    ((self.upper(j) - self.x[j]) / -a).max(0.0)
                };
                if ratio.is_finite() && ratio <= tmax {
                    let better = if bland {
                        ratio < best_ratio - 1e-12
                            || (ratio <= best_ratio + 1e-12 && (r == NONE || j < self.head[r]))
                    } else {
                        a.abs() > best_a
                    };
                    if better {
                        best_a = a.abs();
                        best_ratio = ratio;
                        r = pos;
                    }
                }
            }
            let range = self.upper(q) - self.lower(q);
            let own_limit = if self.status[q] == VarStatus::Free {
                if dir > 0.0 {
                    self.upper(q) - self.x[q]
                } else {
                    self.x[q] - self.lower(q)
                }
            } else {
                range
            };
            if r == NONE && !own_limit.is_finite() {
                return Outcome::Unbounded;
            }
            if r != NONE && self.alpha_col[r].abs() < 1e-7 && own_limit > best_ratio {
                rejected.push(q);
                continue;
            }
            rejected.clear();
            self.iterations += 1;

            if r == NONE || own_limit <= best_ratio {
                // Entering variable reaches its own opposite bound: no basis change.
                let theta = own_limit;
                for pos in 0..m {
                    let a = self.alpha_col[pos];
                    if a != 0.0 {
                        self.x[self.head[pos]] -= dir * theta * a;
                    }
                }
                self.status[q] = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                self.x[q] = self.nonbasic_value(q);
            } else {
                let theta = best_ratio;
                let alpha_rq = self.alpha_col[r];
                let p = self.head[r];
                let to_lower = dir * alpha_rq > 0.0;
                for pos in 0..m {
                    let a = self.alpha_col[pos];
                    if a != 0.0 {
                        self.x[self.head[pos]] -= dir * theta * a;
                    }
                }
                self.x[q] += dir * theta;
                // Dual update through the pivot row.
                self.btran_unit(r);
                self.compute_pivot_row();
                let theta_d = self.d[q] / alpha_rq;
                for &j in &self.row_touched {
                    if self.status[j] != VarStatus::Basic && j != q {
                        self.d[j] -= theta_d * self.alpha_row[j];
                    }
                }
                let leaving = self.leaving_status(p, to_lower);
                self.pivot_basis(r, q, leaving);
                if self.status[p] != VarStatus::Basic && self.factor.num_etas() != 0 {
                    self.d[p] = -theta_d;
                }
                self.dse[r] = 1.0;
            }

            let obj = self.objective();
            if obj < best_obj - 1e-12 * (1.0 + best_obj.abs()) {
                best_obj = obj;
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall >= self.stall_threshold {
                    bland = true;
                }
            }
        }
    }
}
