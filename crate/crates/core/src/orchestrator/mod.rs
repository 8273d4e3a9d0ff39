//! Solution approaches, schedule decoding and comparison tables.

pub mod output;
pub mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use mesc_milp::{solve_mip_from, MilpError, MilpModel, MipSolution, MipStatus, SolverConfig};

use crate::gcuc::{
    build_gcuc, build_gcuc_objective, build_network_constraints, build_uc_constraints, secant_quadratic, BuildError,
    CostModel, GcucVarMap, Injections,
};
use crate::instance::{validate_instance, Finding, Instance, InstanceError, UnitParams};
use crate::maritime::{add_ship_injections, build_maritime, BigM, MaritimeVarMap};
use crate::validator::{brute_force_solve, BruteForceResult, OracleError};

pub use report::{ComparisonRow, CostBreakdown, ScheduleReport, ShipSchedule, StageSummary, UnitSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Approach {
    Gcuc,
    MescI,
    MescSq,
    MescIs,
}

impl Approach {
    pub const ALL: [Approach; 4] = [Approach::Gcuc, Approach::MescI, Approach::MescSq, Approach::MescIs];

    /// Command-line spelling.
    pub fn key(self) -> &'static str {
        match self {
            Approach::Gcuc => "gcuc",
            Approach::MescI => "mesc-i",
            Approach::MescSq => "mesc-sq",
            Approach::MescIs => "mesc-is",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Approach::Gcuc => "GCUC",
            Approach::MescI => "MESC-I",
            Approach::MescSq => "MESC-Sq",
            Approach::MescIs => "MESC-IS",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Approach {
    type Err = OrchestratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Approach::ALL
            .into_iter()
            .find(|a| a.key() == lower || a.label().to_ascii_lowercase() == lower)
            .ok_or_else(|| OrchestratorError::UnknownApproach(s.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OrchestratorError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("instance fails validation: {}", .0.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Finding>),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("unknown approach '{0}' (expected gcuc, mesc-i, mesc-sq or mesc-is)")]
    UnknownApproach(String),
    #[error("no approaches requested")]
    NoApproaches,
    #[error("{0}")]
    Output(String),
}

pub type Result<T, E = OrchestratorError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub solver: SolverConfig,
    pub cost_model: CostModel,
    /// Defaults to the horizon length.
    pub big_m: Option<BigM>,
    /// Skip the GCUC-with-idle-ships starting solution for the ship models.
    pub cold_start: bool,
}

/// A model together with the handles needed to decode its solutions.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub model: MilpModel,
    pub grid: GcucVarMap,
    pub maritime: MaritimeVarMap,
}

impl BuiltModel {
    /// Pins every thermal commitment variable to the given `[unit][hour]` status.
    pub fn fix_commitment(&mut self, status: &[Vec<u8>]) -> Result<()> {
        for (uv, row) in self.grid.units.iter().zip(status) {
            for (&u, &s) in uv.u.iter().zip(row) {
                let v = f64::from(s);
                self.model.set_bounds(u, v, v)?;
            }
        }
        Ok(())
    }

    pub fn forbid_sailing(&mut self) -> Result<()> {
        let vars: Vec<_> = self.maritime.sail_vars().collect();
        for v in vars {
            self.model.set_bounds(v, 0.0, 0.0)?;
        }
        Ok(())
    }

    /// Candidate point with the given commitment and every ship idle at its
    /// initial port. Only the binaries are meaningful.
    pub fn idle_start(&self, status: &[Vec<u8>]) -> Vec<f64> {
        let mut x = vec![0.0; self.model.num_variables()];
        for (uv, row) in self.grid.units.iter().zip(status) {
            for (&u, &s) in uv.u.iter().zip(row) {
                x[u.0] = f64::from(s);
            }
        }
        for ship in &self.maritime.ships {
            for &v in &ship.v[ship.initial_port] {
                x[v.0] = 1.0;
            }
        }
        x
    }

    pub fn forbid_ship_operation(&mut self) -> Result<()> {
        let vars: Vec<_> = self.maritime.ships.iter().flat_map(|s| s.o.iter().flatten().copied()).collect();
        for v in vars {
            self.model.set_bounds(v, 0.0, 0.0)?;
        }
        Ok(())
    }
}

fn check_instance(inst: &Instance) -> Result<()> {
    let findings = validate_instance(inst);
    if findings.is_empty() {
        Ok(())
    } else {
        Err(OrchestratorError::Invalid(findings))
    }
}

/// Grid-only model.
pub fn build_gcuc_model(inst: &Instance, opts: &RunOptions) -> Result<BuiltModel> {
    let mut model = MilpModel::new(format!("{}_gcuc", inst.name));
    let grid = build_gcuc(inst, &mut model, opts.cost_model)?;
    Ok(BuiltModel { model, grid, maritime: MaritimeVarMap::default() })
}

/// Grid and maritime rows in one model.
pub fn build_integrated_model(inst: &Instance, opts: &RunOptions) -> Result<BuiltModel> {
    let mut model = MilpModel::new(format!("{}_mesc", inst.name));
    let units = build_uc_constraints(inst, &mut model)?;
    let big_m = opts.big_m.unwrap_or_else(|| BigM::for_horizon(inst.horizon));
    let maritime = build_maritime(inst, &mut model, big_m, opts.cost_model)?;
    let mut injections = Injections::thermal(inst, &units);
    add_ship_injections(inst, &maritime, &mut injections);
    let grid = build_network_constraints(inst, &mut model, &units, &injections)?;
    build_gcuc_objective(inst, &mut model, &grid, opts.cost_model)?;
    Ok(BuiltModel { model, grid, maritime })
}

/// The model an approach solves last. MESC-Sq solves the grid stage first
/// to obtain the commitment it fixes.
pub fn build_approach_model(inst: &Instance, approach: Approach, opts: &RunOptions) -> Result<BuiltModel> {
    check_instance(inst)?;
    match approach {
        Approach::Gcuc => build_gcuc_model(inst, opts),
        Approach::MescI => build_integrated_model(inst, opts),
        Approach::MescIs => {
            let mut built = build_integrated_model(inst, opts)?;
            built.forbid_sailing()?;
            Ok(built)
        }
        Approach::MescSq => {
            let stage1 = solve_gcuc(inst, opts)?;
            let mut built = build_integrated_model(inst, opts)?;
            if stage1.has_schedule() {
                built.fix_commitment(&commitment_of(&stage1))?;
            }
            Ok(built)
        }
    }
}

fn commitment_of(report: &ScheduleReport) -> Vec<Vec<u8>> {
    report.units.iter().map(|u| u.status.clone()).collect()
}

fn stage_summary(name: &str, sol: &MipSolution) -> StageSummary {
    StageSummary {
        name: name.to_string(),
        status: sol.status.as_str().to_string(),
        objective: sol.status.has_solution().then_some(sol.objective),
        best_bound: sol.best_bound.is_finite().then_some(sol.best_bound),
        nodes: sol.nodes,
        lp_iterations: sol.lp_iterations,
        wall_time: sol.wall_time.as_secs_f64(),
    }
}

fn bit(values: &[f64], v: mesc_milp::VarId) -> u8 {
    u8::from(values[v.0] > 0.5)
}

fn energy_cost(params: &UnitParams, cost_model: CostModel, on: bool, p: f64) -> f64 {
    if !on {
        return 0.0;
    }
    let mut cost = params.a + params.b * p;
    if let CostModel::Piecewise { segments } = cost_model {
        if params.c != 0.0 {
            cost += secant_quadratic(params, segments, p);
        }
    }
    cost
}

/// Turns solver values into a schedule report with cost items.
pub fn decode(
    inst: &Instance,
    built: &BuiltModel,
    sol: &MipSolution,
    approach: Approach,
    opts: &RunOptions,
) -> ScheduleReport {
    let mut report = ScheduleReport {
        instance: inst.name.clone(),
        approach: approach.label().to_string(),
        status: sol.status.as_str().to_string(),
        objective: None,
        best_bound: sol.best_bound.is_finite().then_some(sol.best_bound),
        gap: None,
        nodes: sol.nodes,
        lp_iterations: sol.lp_iterations,
        wall_time: sol.wall_time.as_secs_f64(),
        quadratic_segments: match opts.cost_model {
            CostModel::LinearOnly => None,
            CostModel::Piecewise { segments } => Some(segments),
        },
        stages: vec![stage_summary(approach.label(), sol)],
        horizon: inst.horizon,
        units: Vec::new(),
        ships: Vec::new(),
        flows: Vec::new(),
        angles: Vec::new(),
        shed: Vec::new(),
        cost: CostBreakdown::default(),
    };
    if !sol.status.has_solution() {
        return report;
    }
    report.objective = Some(sol.objective);
    report.gap = sol.gap.is_finite().then_some(sol.gap);
    let x = &sol.values;
    let h = inst.horizon;
    let mut cost = CostBreakdown::default();

    for (g, uv) in inst.generators.iter().zip(&built.grid.units) {
        let status: Vec<u8> = uv.u.iter().map(|&v| bit(x, v)).collect();
        let output: Vec<f64> = uv.p.iter().map(|&v| x[v.0]).collect();
        let startup: Vec<u8> = uv.commitment.su.iter().map(|&v| bit(x, v)).collect();
        let shutdown: Vec<u8> = uv.commitment.sd.iter().map(|&v| bit(x, v)).collect();
        for t in 0..h {
            cost.grid_energy += energy_cost(&g.params, opts.cost_model, status[t] == 1, output[t]);
            cost.grid_startup_shutdown += f64::from(startup[t]) * g.params.startup_cost
                + f64::from(shutdown[t]) * g.params.shutdown_cost;
        }
        report.units.push(UnitSchedule { id: g.id.clone(), bus: g.bus, status, startup, shutdown, output });
    }

    let grid = &built.grid;
    report.flows = grid.flow.iter().map(|row| row.iter().map(|&v| x[v.0]).collect()).collect();
    report.angles = grid.theta.iter().map(|row| row.iter().map(|&v| x[v.0]).collect()).collect();
    report.shed = grid.shed.iter().map(|row| row.iter().map(|&v| x[v.0]).collect()).collect();
    cost.shed_penalty = inst.penalties.shed * report.shed_mwh();

    let mar = &built.maritime;
    for (s, sv) in mar.ships.iter().enumerate() {
        let ship = &inst.ships[s];
        let grid_bits = |rows: &[Vec<mesc_milp::VarId>]| -> Vec<Vec<u8>> {
            rows.iter().map(|row| row.iter().map(|&v| bit(x, v)).collect()).collect()
        };
        let located = grid_bits(&sv.v);
        let sailing = grid_bits(&sv.vs);
        let operating = grid_bits(&sv.o);
        let waiting = grid_bits(&sv.w);
        let departed = grid_bits(&sv.vd);
        let entered = grid_bits(&sv.ve);
        let output: Vec<Vec<f64>> = sv.ps.iter().map(|row| row.iter().map(|&v| x[v.0]).collect()).collect();
        let startup: Vec<u8> = sv.commitment.su.iter().map(|&v| bit(x, v)).collect();
        let shutdown: Vec<u8> = sv.commitment.sd.iter().map(|&v| bit(x, v)).collect();
        let location = (0..h)
            .map(|t| {
                if let Some(i) = (0..inst.ports.len()).find(|&i| located[i][t] == 1) {
                    inst.ports[i].id.to_string()
                } else if let Some(a) = (0..mar.arcs.len()).find(|&a| sailing[a][t] == 1) {
                    let (i, j) = mar.arcs[a];
                    format!("{}>{}", inst.ports[i].id, inst.ports[j].id)
                } else {
                    "?".to_string()
                }
            })
            .collect();
        for (i, port) in inst.ports.iter().enumerate() {
            for t in 0..h {
                cost.ship_entering += f64::from(entered[i][t]) * ship.entering_cost_at(port.id);
                cost.ship_departure += f64::from(departed[i][t]) * ship.departure_cost_at(port.id);
                cost.ship_waiting += f64::from(waiting[i][t]) * ship.waiting_cost_at(port.id);
            }
        }
        cost.ship_sailing += ship.sailing_cost * sailing.iter().flatten().map(|&b| f64::from(b)).sum::<f64>();
        for t in 0..h {
            let on = (0..inst.ports.len()).any(|i| operating[i][t] == 1);
            let p: f64 = output.iter().map(|row| row[t]).sum();
            cost.ship_energy += energy_cost(&ship.generation, opts.cost_model, on, p);
            cost.ship_startup_shutdown += f64::from(startup[t]) * ship.generation.startup_cost
                + f64::from(shutdown[t]) * ship.generation.shutdown_cost;
        }
        report.ships.push(ShipSchedule {
            id: ship.id.clone(),
            ports: inst.ports.iter().map(|p| p.id).collect(),
            arcs: mar.arcs.iter().map(|&(i, j)| [inst.ports[i].id, inst.ports[j].id]).collect(),
            location,
            located,
            sailing,
            operating,
            waiting,
            departed,
            entered,
            output,
            startup,
            shutdown,
        });
    }
    cost.total = cost.sum_items();
    report.cost = cost;
    report
}

fn run(inst: &Instance, built: &BuiltModel, approach: Approach, opts: &RunOptions, start: Option<&[f64]>) -> ScheduleReport {
    log::info!(
        "{}: {} variables ({} binary), {} rows",
        approach,
        built.model.num_variables(),
        built.model.num_binaries(),
        built.model.num_constraints()
    );
    let sol = solve_mip_from(&built.model, &opts.solver, start);
    log::info!("{}: {} objective {:.6} in {:.2}s", approach, sol.status.as_str(), sol.objective, sol.wall_time.as_secs_f64());
    decode(inst, built, &sol, approach, opts)
}

pub fn solve_gcuc(inst: &Instance, opts: &RunOptions) -> Result<ScheduleReport> {
    check_instance(inst)?;
    let built = build_gcuc_model(inst, opts)?;
    Ok(run(inst, &built, Approach::Gcuc, opts, None))
}

/// Idle-ship starting point from a solved grid report, unless disabled.
fn start_from(built: &BuiltModel, opts: &RunOptions, stage1: Option<&ScheduleReport>) -> Option<Vec<f64>> {
    stage1.filter(|r| !opts.cold_start && r.has_schedule()).map(|r| built.idle_start(&commitment_of(r)))
}

fn grid_start(inst: &Instance, opts: &RunOptions) -> Result<Option<ScheduleReport>> {
    if opts.cold_start {
        Ok(None)
    } else {
        solve_gcuc(inst, opts).map(Some)
    }
}

pub fn solve_mesc_integrated(inst: &Instance, opts: &RunOptions) -> Result<ScheduleReport> {
    check_instance(inst)?;
    let stage1 = grid_start(inst, opts)?;
    integrated_from(inst, opts, Approach::MescI, stage1.as_ref())
}

pub fn solve_mesc_stationary(inst: &Instance, opts: &RunOptions) -> Result<ScheduleReport> {
    check_instance(inst)?;
    let stage1 = grid_start(inst, opts)?;
    integrated_from(inst, opts, Approach::MescIs, stage1.as_ref())
}

/// MESC-I or MESC-IS, started from the grid solution in `stage1` if given.
pub fn integrated_from(
    inst: &Instance,
    opts: &RunOptions,
    approach: Approach,
    stage1: Option<&ScheduleReport>,
) -> Result<ScheduleReport> {
    let built = build_approach_model(inst, approach, opts)?;
    let start = start_from(&built, opts, stage1);
    Ok(run(inst, &built, approach, opts, start.as_deref()))
}

/// Grid stage, then the integrated model with thermal commitment fixed.
pub fn solve_mesc_sequential(inst: &Instance, opts: &RunOptions) -> Result<ScheduleReport> {
    check_instance(inst)?;
    let stage1 = solve_gcuc(inst, opts)?;
    sequential_from(inst, opts, &stage1)
}

/// Second MESC-Sq stage from an already solved grid report.
pub fn sequential_from(inst: &Instance, opts: &RunOptions, stage1: &ScheduleReport) -> Result<ScheduleReport> {
    let first = StageSummary {
        name: "GCUC".to_string(),
        status: stage1.status.clone(),
        objective: stage1.objective,
        best_bound: stage1.best_bound,
        nodes: stage1.nodes,
        lp_iterations: stage1.lp_iterations,
        wall_time: stage1.wall_time,
    };
    let mut built = build_integrated_model(inst, opts)?;
    if !stage1.has_schedule() {
        let mut report = decode(inst, &built, &failed(stage1), Approach::MescSq, opts);
        report.stages = vec![first];
        return Ok(report);
    }
    built.fix_commitment(&commitment_of(stage1))?;
    let start = start_from(&built, opts, Some(stage1));
    let mut report = run(inst, &built, Approach::MescSq, opts, start.as_deref());
    report.stages.insert(0, first);
    report.stages[1].name = "ships".to_string();
    Ok(report)
}

fn failed(stage1: &ScheduleReport) -> MipSolution {
    let status = match stage1.status.as_str() {
        "infeasible" => MipStatus::Infeasible,
        "unbounded" => MipStatus::Unbounded,
        _ => MipStatus::TimeLimit,
    };
    MipSolution {
        status,
        values: Vec::new(),
        objective: f64::INFINITY,
        best_bound: f64::NEG_INFINITY,
        gap: f64::INFINITY,
        nodes: 0,
        lp_iterations: 0,
        wall_time: std::time::Duration::ZERO,
    }
}

/// Grid commitment from `stage1` with ships kept idle at their initial ports.
pub fn solve_idle_ships(inst: &Instance, opts: &RunOptions, stage1: &ScheduleReport) -> Result<ScheduleReport> {
    let mut built = build_integrated_model(inst, opts)?;
    if stage1.has_schedule() {
        built.fix_commitment(&commitment_of(stage1))?;
    }
    built.forbid_sailing()?;
    built.forbid_ship_operation()?;
    let mut report = run(inst, &built, Approach::MescSq, opts, None);
    report.approach = "GCUC+idle".to_string();
    report.stages[0].name = "GCUC+idle".to_string();
    Ok(report)
}

pub fn solve_approach(inst: &Instance, approach: Approach, opts: &RunOptions) -> Result<ScheduleReport> {
    match approach {
        Approach::Gcuc => solve_gcuc(inst, opts),
        Approach::MescI => solve_mesc_integrated(inst, opts),
        Approach::MescSq => solve_mesc_sequential(inst, opts),
        Approach::MescIs => solve_mesc_stationary(inst, opts),
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub reports: Vec<ScheduleReport>,
    pub rows: Vec<ComparisonRow>,
}

/// Solves each approach once. A GCUC solve is shared with MESC-Sq.
pub fn compare_approaches(inst: &Instance, opts: &RunOptions, tags: &[Approach]) -> Result<Comparison> {
    if tags.is_empty() {
        return Err(OrchestratorError::NoApproaches);
    }
    check_instance(inst)?;
    let started = Instant::now();
    let mut gcuc: Option<ScheduleReport> = None;
    let mut reports = Vec::with_capacity(tags.len());
    for &tag in tags {
        let needs_grid = tag == Approach::Gcuc || tag == Approach::MescSq || !opts.cold_start;
        if needs_grid && gcuc.is_none() {
            gcuc = Some(solve_gcuc(inst, opts)?);
        }
        let report = match tag {
            Approach::Gcuc => gcuc.clone().expect("solved above"),
            Approach::MescSq => sequential_from(inst, opts, gcuc.as_ref().expect("solved above"))?,
            other => integrated_from(inst, opts, other, gcuc.as_ref())?,
        };
        reports.push(report);
    }
    let baseline = reports.iter().find(|r| r.approach == Approach::Gcuc.label()).and_then(|r| r.objective);
    let rows = reports.iter().map(|r| ComparisonRow::from_report(r, baseline)).collect();
    log::info!("compared {} approaches in {:.2}s", tags.len(), started.elapsed().as_secs_f64());
    Ok(Comparison { reports, rows })
}

/// Enumeration oracle on the model an approach builds.
pub fn brute_force_instance(
    inst: &Instance,
    approach: Approach,
    limit: usize,
    opts: &RunOptions,
) -> Result<BruteForceResult> {
    let built = build_approach_model(inst, approach, opts)?;
    Ok(brute_force_solve(&built.model, limit, &opts.solver)?)
}
