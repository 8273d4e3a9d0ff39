//! Independent schedule checks, cost recomputation and an enumeration oracle.
//!
//! Feasibility is evaluated arithmetically from the decoded schedule. Nothing
//! here depends on the model-building modules.

use std::fmt;

use mesc_milp::{LpEngine, LpStatus, MilpModel, Sense, SolverConfig, VarId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::instance::{DepartureLimit, Instance, UnitParams};
use crate::orchestrator::report::{CostBreakdown, ScheduleReport};

pub const TOLERANCE: f64 = 1e-6;

pub const FAMILIES: [&str; 14] = [
    "flow logic",
    "arrival/departure",
    "operation",
    "travel time",
    "port capacity",
    "generator limits",
    "ramping",
    "SU/SD logic",
    "min up/down",
    "DC flow",
    "balance",
    "shed",
    "limits",
    "end-of-horizon",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Unit, ship, port, line or bus the check refers to.
    pub location: String,
    /// 1-based hour; 0 for whole-horizon checks.
    pub hour: usize,
    /// MW, radians or a count, depending on the family.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyResult {
    pub family: String,
    pub max_violation: f64,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub families: Vec<FamilyResult>,
    pub recomputed_cost: CostBreakdown,
    pub passed: bool,
}

impl ValidationReport {
    pub fn family(&self, name: &str) -> Option<&FamilyResult> {
        self.families.iter().find(|f| f.family == name)
    }

    pub fn violation_count(&self) -> usize {
        self.families.iter().map(|f| f.violations.len()).sum()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fam in &self.families {
            let mark = if fam.violations.is_empty() { "ok" } else { "FAIL" };
            writeln!(f, "{:<18} {:>4}  max {:.3e}", fam.family, mark, fam.max_violation)?;
            for v in fam.violations.iter().take(5) {
                writeln!(f, "    {} hour {}: {:.6}", v.location, v.hour, v.magnitude)?;
            }
        }
        write!(f, "recomputed cost {:.6}", self.recomputed_cost.total)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ValidationError {
    #[error("report does not match the instance: {0}")]
    Dimension(String),
    #[error("report carries no schedule (status {0})")]
    NoSchedule(String),
}

struct Collector {
    families: Vec<FamilyResult>,
}

impl Collector {
    fn new() -> Self {
        let families = FAMILIES
            .iter()
            .map(|f| FamilyResult { family: f.to_string(), max_violation: 0.0, violations: Vec::new() })
            .collect();
        Collector { families }
    }

    /// Records `magnitude` if it exceeds the tolerance.
    fn check(&mut self, family: &str, location: impl FnOnce() -> String, hour: usize, magnitude: f64) {
        let fam = self.families.iter_mut().find(|f| f.family == family).expect("known family");
        if magnitude.is_nan() || magnitude > TOLERANCE {
            let magnitude = if magnitude.is_nan() { f64::INFINITY } else { magnitude };
            fam.max_violation = fam.max_violation.max(magnitude);
            fam.violations.push(Violation { location: location(), hour, magnitude });
        }
    }
}

fn dim(ok: bool, what: impl FnOnce() -> String) -> Result<(), ValidationError> {
    if ok {
        Ok(())
    } else {
        Err(ValidationError::Dimension(what()))
    }
}

fn check_dimensions(inst: &Instance, r: &ScheduleReport) -> Result<(), ValidationError> {
    let h = inst.horizon;
    dim(r.horizon == h, || format!("horizon {} vs {h}", r.horizon))?;
    dim(r.units.len() == inst.generators.len(), || "unit count".into())?;
    for (u, g) in r.units.iter().zip(&inst.generators) {
        dim(u.id == g.id, || format!("unit {} vs {}", u.id, g.id))?;
        let lens = [u.status.len(), u.startup.len(), u.shutdown.len(), u.output.len()];
        dim(lens.iter().all(|&l| l == h), || format!("unit {} hours", u.id))?;
    }
    dim(r.flows.len() == inst.lines.len() && r.flows.iter().all(|f| f.len() == h), || "flows".into())?;
    for (name, grid) in [("angles", &r.angles), ("shed", &r.shed)] {
        dim(grid.len() == inst.buses.len() && grid.iter().all(|f| f.len() == h), || name.into())?;
    }
    // Grid-only reports carry no ships.
    dim(r.ships.is_empty() || r.ships.len() == inst.ships.len(), || "ship count".into())?;
    let ports: Vec<u32> = inst.ports.iter().map(|p| p.id).collect();
    for (s, ship) in r.ships.iter().zip(&inst.ships) {
        dim(s.id == ship.id, || format!("ship {} vs {}", s.id, ship.id))?;
        dim(s.ports == ports, || format!("ship {} port order", s.id))?;
        for arc in &s.arcs {
            dim(ports.contains(&arc[0]) && ports.contains(&arc[1]) && arc[0] != arc[1], || format!("arc {arc:?}"))?;
        }
        let per_port = [&s.located, &s.operating, &s.waiting, &s.departed, &s.entered];
        for grid in per_port {
            dim(grid.len() == ports.len() && grid.iter().all(|row| row.len() == h), || format!("ship {}", s.id))?;
        }
        dim(s.output.len() == ports.len() && s.output.iter().all(|row| row.len() == h), || format!("ship {} output", s.id))?;
        dim(s.sailing.len() == s.arcs.len() && s.sailing.iter().all(|row| row.len() == h), || format!("ship {} sailing", s.id))?;
        dim(s.startup.len() == h && s.shutdown.len() == h, || format!("ship {} SU/SD", s.id))?;
    }
    Ok(())
}

/// Start-up/shut-down, ramping and minimum-time checks on one status/output trajectory.
fn check_commitment(c: &mut Collector, who: &str, prm: &UnitParams, on: &[u8], p: &[f64], su: &[u8], sd: &[u8]) {
    let h = on.len();
    let init_on = u8::from(prm.initial.on);
    for t in 0..h {
        let prev = if t == 0 { init_on } else { on[t - 1] };
        let want_su = u8::from(on[t] == 1 && prev == 0);
        let want_sd = u8::from(on[t] == 0 && prev == 1);
        c.check("SU/SD logic", || who.to_string(), t + 1, f64::from(su[t].abs_diff(want_su) + sd[t].abs_diff(want_sd)));

        let prev_p = if t == 0 { prm.initial.output } else { p[t - 1] };
        let start_limit = prm.ramp_up.map_or(f64::INFINITY, |r| r.max(prm.p_min));
        let stop_limit = prm.ramp_down.map_or(f64::INFINITY, |r| r.max(prm.p_min));
        match (prev, on[t]) {
            (1, 1) => {
                if let Some(ru) = prm.ramp_up {
                    c.check("ramping", || who.to_string(), t + 1, p[t] - prev_p - ru);
                }
                if let Some(rd) = prm.ramp_down {
                    c.check("ramping", || who.to_string(), t + 1, prev_p - p[t] - rd);
                }
            }
            (0, 1) => c.check("ramping", || who.to_string(), t + 1, p[t] - start_limit),
            (1, 0) => c.check("ramping", || who.to_string(), t + 1, prev_p - stop_limit),
            _ => {}
        }
    }
    // Runs of equal status; the first run continues the pre-horizon state.
    let mut t = 0;
    while t < h {
        let state = on[t];
        let mut end = t;
        while end < h && on[end] == state {
            end += 1;
        }
        let mut length = end - t;
        if t == 0 && state == init_on {
            length += prm.initial.hours as usize;
        }
        let required = if state == 1 { prm.min_up } else { prm.min_down } as usize;
        if end < h && length < required {
            c.check("min up/down", || who.to_string(), t + 1, (required - length) as f64);
        }
        t = end;
    }
}

/// Evaluates every constraint family of the joint model on `report`.
pub fn check_feasibility(inst: &Instance, report: &ScheduleReport) -> Result<ValidationReport, ValidationError> {
    if !report.has_schedule() {
        return Err(ValidationError::NoSchedule(report.status.clone()));
    }
    check_dimensions(inst, report)?;
    let h = inst.horizon;
    let nports = inst.ports.len();
    let mut c = Collector::new();

    for (u, g) in report.units.iter().zip(&inst.generators) {
        let prm = &g.params;
        for t in 0..h {
            let on = f64::from(u.status[t]);
            c.check("generator limits", || g.id.clone(), t + 1, prm.p_min * on - u.output[t]);
            c.check("generator limits", || g.id.clone(), t + 1, u.output[t] - prm.p_max * on);
        }
        check_commitment(&mut c, &g.id, prm, &u.status, &u.output, &u.startup, &u.shutdown);
    }

    for (si, (s, ship)) in report.ships.iter().zip(&inst.ships).enumerate() {
        let start = inst.port_index(ship.initial_port).ok_or_else(|| ValidationError::Dimension(ship.id.clone()))?;
        let at = |i: usize, t: isize| -> u8 {
            if t < 0 {
                u8::from(i == start)
            } else {
                s.located[i][t as usize]
            }
        };
        let sail = |a: usize, t: isize| -> u8 {
            if t < 0 {
                0
            } else {
                s.sailing[a][t as usize]
            }
        };
        let arc_ports: Vec<(usize, usize)> = s
            .arcs
            .iter()
            .map(|a| (inst.port_index(a[0]).expect("checked"), inst.port_index(a[1]).expect("checked")))
            .collect();
        let tag = |what: &str| format!("{} {what}", ship.id);

        for t in 0..h {
            let ti = t as isize;
            let total: u32 = (0..nports).map(|i| u32::from(s.located[i][t])).sum::<u32>()
                + s.sailing.iter().map(|row| u32::from(row[t])).sum::<u32>();
            c.check("flow logic", || ship.id.clone(), t + 1, (f64::from(total) - 1.0).abs());

            for (a, &(i, j)) in arc_ports.iter().enumerate() {
                let label = || tag(&format!("{}>{}", inst.ports[i].id, inst.ports[j].id));
                if sail(a, ti) == 1 && sail(a, ti - 1) == 0 {
                    c.check("flow logic", label, t + 1, f64::from(1 - at(i, ti - 1)));
                    c.check("arrival/departure", label, t + 1, f64::from(1 - s.departed[i][t]));
                }
                if sail(a, ti - 1) == 1 && sail(a, ti) == 0 {
                    c.check("flow logic", label, t + 1, f64::from(1 - at(j, ti)));
                }
            }
            for i in 0..nports {
                let label = || tag(&format!("port {}", inst.ports[i].id));
                let arrived = arc_ports.iter().enumerate().any(|(a, &(_, j))| j == i && sail(a, ti - 1) == 1);
                if at(i, ti) == 1 && at(i, ti - 1) == 0 && !arrived {
                    c.check("flow logic", label, t + 1, 1.0);
                }
                let (now, prev) = (at(i, ti), at(i, ti - 1));
                let want_d = u8::from(prev == 1 && now == 0);
                let want_e = u8::from(prev == 0 && now == 1);
                c.check("arrival/departure", label, t + 1, f64::from(s.departed[i][t].abs_diff(want_d)));
                c.check("arrival/departure", label, t + 1, f64::from(s.entered[i][t].abs_diff(want_e)));
                c.check("arrival/departure", label, t + 1, f64::from(s.departed[i][t] + s.entered[i][t]) - 1.0);

                let (o, w) = (s.operating[i][t], s.waiting[i][t]);
                c.check("operation", label, t + 1, (f64::from(w) - f64::from(now) + f64::from(o)).abs());
                c.check("operation", label, t + 1, f64::from(o) - f64::from(now));
                c.check("operation", label, t + 1, f64::from(s.entered[i][t]) - f64::from(o));
                if o == 0 {
                    c.check("operation", label, t + 1, s.output[i][t].abs());
                }
                let prm = &ship.generation;
                c.check("generator limits", label, t + 1, prm.p_min * f64::from(o) - s.output[i][t]);
                c.check("generator limits", label, t + 1, s.output[i][t] - prm.p_max * f64::from(o));
            }
        }

        for (a, &(i, j)) in arc_ports.iter().enumerate() {
            let label = || tag(&format!("{}>{}", inst.ports[i].id, inst.ports[j].id));
            let travel = inst.travel_hours(si, i, j).map(|t| t as usize);
            let mut t = 0;
            while t < h {
                if s.sailing[a][t] == 0 {
                    t += 1;
                    continue;
                }
                let mut end = t;
                while end < h && s.sailing[a][end] == 1 {
                    end += 1;
                }
                match travel {
                    Some(want) => c.check("travel time", label, t + 1, (end - t).abs_diff(want) as f64),
                    None => c.check("travel time", label, t + 1, (end - t) as f64),
                }
                if end < h {
                    c.check("travel time", label, end + 1, f64::from(1 - s.located[j][end]));
                }
                t = end;
            }
        }
        let last: u32 = s.sailing.iter().map(|row| u32::from(row[h - 1])).sum();
        c.check("end-of-horizon", || ship.id.clone(), h, f64::from(last));

        let status: Vec<u8> = (0..h).map(|t| (0..nports).map(|i| s.operating[i][t]).sum()).collect();
        for (t, &st) in status.iter().enumerate() {
            c.check("operation", || ship.id.clone(), t + 1, f64::from(st) - 1.0);
        }
        check_commitment(&mut c, &ship.id, &ship.generation, &status, &s.total_output(), &s.startup, &s.shutdown);
    }

    for (i, port) in inst.ports.iter().enumerate() {
        let label = || format!("port {}", port.id);
        for t in 0..h {
            let operating: u32 = report.ships.iter().map(|s| u32::from(s.operating[i][t])).sum();
            c.check("port capacity", label, t + 1, f64::from(operating) - f64::from(port.poc));
        }
        match inst.options.departure_limit {
            DepartureLimit::PerShip => {
                for s in &report.ships {
                    let n: u32 = s.departed[i].iter().map(|&d| u32::from(d)).sum();
                    c.check("port capacity", || format!("port {} {}", port.id, s.id), 0, f64::from(n) - f64::from(port.pdc));
                }
            }
            DepartureLimit::PerHour => {
                for t in 0..h {
                    let n: u32 = report.ships.iter().map(|s| u32::from(s.departed[i][t])).sum();
                    c.check("port capacity", label, t + 1, f64::from(n) - f64::from(port.pdc));
                }
            }
        }
    }

    for (l, line) in inst.lines.iter().enumerate() {
        let from = inst.bus_index(line.from).expect("validated");
        let to = inst.bus_index(line.to).expect("validated");
        for t in 0..h {
            let f = report.flows[l][t];
            let expect = inst.base_mva / line.x * (report.angles[from][t] - report.angles[to][t]);
            c.check("DC flow", || line.id.clone(), t + 1, (f - expect).abs());
            c.check("limits", || line.id.clone(), t + 1, f.abs() - line.f_max);
        }
    }
    for (b, bus) in inst.buses.iter().enumerate() {
        let label = || format!("bus {}", bus.id);
        for t in 0..h {
            let theta = report.angles[b][t];
            c.check("limits", label, t + 1, theta.abs() - bus.theta_max);
            if bus.reference {
                c.check("limits", label, t + 1, theta.abs());
            }
            let mut net = report.shed[b][t] - inst.demand_at(b, t);
            for (u, g) in report.units.iter().zip(&inst.generators) {
                if g.bus == bus.id {
                    net += u.output[t];
                }
            }
            for s in &report.ships {
                for (i, port) in inst.ports.iter().enumerate() {
                    if port.bus == bus.id {
                        net += s.output[i][t];
                    }
                }
            }
            for (l, line) in inst.lines.iter().enumerate() {
                if line.to == bus.id {
                    net += report.flows[l][t];
                }
                if line.from == bus.id {
                    net -= report.flows[l][t];
                }
            }
            c.check("balance", label, t + 1, net.abs());
            let shed = report.shed[b][t];
            c.check("shed", label, t + 1, -shed);
            c.check("shed", label, t + 1, shed - inst.shed_limit(b, t));
        }
    }

    let passed = c.families.iter().all(|f| f.violations.is_empty());
    Ok(ValidationReport { families: c.families, recomputed_cost: recompute_cost(inst, report), passed })
}

/// `c * p^2` by secants over `segments` equal pieces of `[p_min, p_max]`.
fn piecewise_square(prm: &UnitParams, segments: usize, p: f64) -> f64 {
    let width = (prm.p_max - prm.p_min) / segments as f64;
    if width <= 0.0 {
        return prm.c * prm.p_min * prm.p_min;
    }
    let k = (((p - prm.p_min) / width).floor().max(0.0) as usize).min(segments - 1);
    let lo = prm.p_min + width * k as f64;
    let hi = if k + 1 == segments { prm.p_max } else { lo + width };
    let (flo, fhi) = (prm.c * lo * lo, prm.c * hi * hi);
    flo + (fhi - flo) * (p - lo) / (hi - lo)
}

fn generation_cost(prm: &UnitParams, segments: Option<usize>, on: u8, p: f64) -> f64 {
    if on == 0 {
        return 0.0;
    }
    let quad = match segments {
        Some(k) if prm.c != 0.0 => piecewise_square(prm, k, p),
        _ => 0.0,
    };
    prm.a + prm.b * p + quad
}

/// Sums every cost item of `report` from its schedule.
pub fn recompute_cost(inst: &Instance, report: &ScheduleReport) -> CostBreakdown {
    let mut cost = CostBreakdown::default();
    let seg = report.quadratic_segments;
    for (u, g) in report.units.iter().zip(&inst.generators) {
        for t in 0..u.status.len() {
            cost.grid_energy += generation_cost(&g.params, seg, u.status[t], u.output[t]);
            cost.grid_startup_shutdown += g.params.startup_cost * f64::from(u.startup[t]);
            cost.grid_startup_shutdown += g.params.shutdown_cost * f64::from(u.shutdown[t]);
        }
    }
    cost.shed_penalty = report.shed.iter().flatten().map(|s| s * inst.penalties.shed).sum();
    for (s, ship) in report.ships.iter().zip(&inst.ships) {
        for (i, &port) in s.ports.iter().enumerate() {
            let count = |grid: &Vec<Vec<u8>>| grid[i].iter().map(|&b| f64::from(b)).sum::<f64>();
            cost.ship_entering += ship.entering_cost_at(port) * count(&s.entered);
            cost.ship_departure += ship.departure_cost_at(port) * count(&s.departed);
            cost.ship_waiting += ship.waiting_cost_at(port) * count(&s.waiting);
        }
        let sail_hours: u32 = s.sailing.iter().flatten().map(|&b| u32::from(b)).sum();
        cost.ship_sailing += ship.sailing_cost * f64::from(sail_hours);
        let total = s.total_output();
        for t in 0..s.location.len() {
            let on = s.operating.iter().map(|row| row[t]).max().unwrap_or(0);
            cost.ship_energy += generation_cost(&ship.generation, seg, on, total[t]);
            cost.ship_startup_shutdown += ship.generation.startup_cost * f64::from(s.startup[t]);
            cost.ship_startup_shutdown += ship.generation.shutdown_cost * f64::from(s.shutdown[t]);
        }
    }
    cost.total = cost.sum_items();
    cost
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("model has {found} free binaries, limit is {limit}")]
    TooManyBinaries { found: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// `None` when every assignment is infeasible.
    pub objective: Option<f64>,
    /// Free binaries in id order with their optimal values.
    pub assignment: Vec<(VarId, u8)>,
    pub values: Vec<f64>,
    pub leaves: u64,
    pub pruned: u64,
}

/// Rows whose every term is a binary, checkable before any LP.
struct LogicRow {
    terms: Vec<(usize, f64)>,
    lower: f64,
    upper: f64,
}

struct Enumerator<'a> {
    free: &'a [VarId],
    /// Rows touching free binaries, indexed by the last free position they mention.
    rows_by_last: Vec<Vec<LogicRow>>,
    tol: f64,
}

#[derive(Debug, Clone)]
struct Best {
    objective: f64,
    bits: Vec<u8>,
    values: Vec<f64>,
}

fn better(cand: &Best, best: &Option<Best>) -> bool {
    match best {
        None => true,
        Some(b) => {
            let scale = 1.0 + b.objective.abs();
            if cand.objective < b.objective - 1e-9 * scale {
                true
            } else if cand.objective <= b.objective + 1e-9 * scale {
                cand.bits < b.bits
            } else {
                false
            }
        }
    }
}

impl<'a> Enumerator<'a> {
    fn new(model: &'a MilpModel, free: &'a [VarId], tol: f64) -> Self {
        let mut position = vec![usize::MAX; model.num_variables()];
        for (k, v) in free.iter().enumerate() {
            position[v.0] = k;
        }
        let mut rows_by_last: Vec<Vec<LogicRow>> = (0..free.len()).map(|_| Vec::new()).collect();
        for row in model.constraints() {
            if row.terms.iter().any(|(v, _)| !model.variable(*v).is_binary()) {
                continue;
            }
            let mut constant = 0.0;
            let mut terms = Vec::new();
            for &(v, a) in &row.terms {
                let var = model.variable(v);
                if position[v.0] == usize::MAX {
                    constant += a * var.lower;
                } else {
                    terms.push((position[v.0], a));
                }
            }
            let Some(last) = terms.iter().map(|t| t.0).max() else { continue };
            let (lower, upper) = match row.sense {
                Sense::Le => (f64::NEG_INFINITY, row.rhs - constant),
                Sense::Ge => (row.rhs - constant, f64::INFINITY),
                Sense::Eq => (row.rhs - constant, row.rhs - constant),
            };
            rows_by_last[last].push(LogicRow { terms, lower, upper });
        }
        Enumerator { free, rows_by_last, tol }
    }

    /// Rows fully decided once position `k` is assigned.
    fn consistent(&self, k: usize, bits: &[u8]) -> bool {
        self.rows_by_last[k].iter().all(|r| {
            let act: f64 = r.terms.iter().map(|&(p, a)| a * f64::from(bits[p])).sum();
            act >= r.lower - self.tol && act <= r.upper + self.tol
        })
    }

    fn search(&self, engine: &mut LpEngine, bits: &mut Vec<u8>, best: &mut Option<Best>, stats: &mut (u64, u64)) {
        let k = bits.len();
        if k == self.free.len() {
            for (p, &v) in self.free.iter().enumerate() {
                let x = f64::from(bits[p]);
                engine.set_bounds(v, x, x);
            }
            stats.0 += 1;
            let lp = engine.solve();
            if lp.status == LpStatus::Optimal {
                let cand = Best { objective: lp.objective, bits: bits.clone(), values: lp.values };
                if better(&cand, best) {
                    *best = Some(cand);
                }
            }
            return;
        }
        for b in [0u8, 1] {
            bits.push(b);
            if self.consistent(k, bits) {
                self.search(engine, bits, best, stats);
            } else {
                stats.1 += 1;
            }
            bits.pop();
        }
    }
}

/// Enumerates every assignment of the free binaries of `model` and solves the
/// residual LP at each leaf. Assignments violating all-binary rows are
/// skipped without an LP. Work is split into fixed prefix chunks, so the
/// result does not depend on the number of workers.
pub fn brute_force_solve(model: &MilpModel, limit: usize, config: &SolverConfig) -> Result<BruteForceResult, OracleError> {
    let free: Vec<VarId> = model
        .binary_ids()
        .into_iter()
        .filter(|&v| model.variable(v).lower < model.variable(v).upper)
        .collect();
    if free.len() > limit {
        return Err(OracleError::TooManyBinaries { found: free.len(), limit });
    }
    let enumerator = Enumerator::new(model, &free, config.feasibility_tol.max(1e-9));
    let depth = free.len().min(6);
    let prefixes: Vec<Vec<u8>> = (0..1usize << depth)
        .map(|code| (0..depth).map(|p| ((code >> (depth - 1 - p)) & 1) as u8).collect())
        .collect();
    let work = |prefix: &Vec<u8>| -> (Option<Best>, (u64, u64)) {
        let mut stats = (0, 0);
        let mut bits = Vec::with_capacity(free.len());
        for (k, &b) in prefix.iter().enumerate() {
            bits.push(b);
            if !enumerator.consistent(k, &bits) {
                return (None, (0, 1));
            }
        }
        let mut engine = LpEngine::new(model, config);
        let mut best = None;
        enumerator.search(&mut engine, &mut bits, &mut best, &mut stats);
        (best, stats)
    };
    let results: Vec<(Option<Best>, (u64, u64))> = if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build();
        match pool {
            Ok(pool) => pool.install(|| prefixes.par_iter().map(work).collect()),
            Err(_) => prefixes.iter().map(work).collect(),
        }
    } else {
        prefixes.iter().map(work).collect()
    };
    let mut best: Option<Best> = None;
    let (mut leaves, mut pruned) = (0, 0);
    for (cand, (l, p)) in results {
        leaves += l;
        pruned += p;
        if let Some(c) = cand {
            if better(&c, &best) {
                best = Some(c);
            }
        }
    }
    Ok(match best {
        Some(b) => BruteForceResult {
            objective: Some(b.objective),
            assignment: free.iter().copied().zip(b.bits).collect(),
            values: b.values,
            leaves,
            pruned,
        },
        None => BruteForceResult { objective: None, assignment: Vec::new(), values: Vec::new(), leaves, pruned },
    })
}
