//! Grid-constrained unit commitment: thermal unit rows, the DC network and
//! the grid objective.

use mesc_milp::{LinExpr, MilpError, MilpModel, Sense, VarId};

use crate::instance::{Instance, UnitParams};

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error("generator {generator} has no injection at bus {bus} in hour {hour}")]
    MissingInjection { generator: String, bus: u32, hour: usize },
    #[error("ship {0} has no initial port")]
    NoInitialPort(String),
    #[error("invalid cost model: {0}")]
    CostModel(String),
}

pub type Result<T, E = BuildError> = std::result::Result<T, E>;

/// Treatment of the quadratic generation cost term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostModel {
    /// Drop the quadratic term.
    #[default]
    LinearOnly,
    /// Secant approximation over `segments` equal-width pieces of `[p_min, p_max]`.
    Piecewise { segments: usize },
}

impl CostModel {
    pub fn validate(self) -> Result<()> {
        match self {
            CostModel::Piecewise { segments: 0 } => Err(BuildError::CostModel("piecewise needs k >= 1".into())),
            _ => Ok(()),
        }
    }
}

/// Segment breakpoints `p_min = x_0 < ... < x_k = p_max`.
pub fn breakpoints(params: &UnitParams, segments: usize) -> Vec<f64> {
    let w = (params.p_max - params.p_min) / segments as f64;
    (0..=segments)
        .map(|k| if k == segments { params.p_max } else { params.p_min + w * k as f64 })
        .collect()
}

/// Piecewise-linear value of `c * p^2` for a committed unit.
pub fn secant_quadratic(params: &UnitParams, segments: usize, p: f64) -> f64 {
    let xs = breakpoints(params, segments);
    let c = params.c;
    let mut value = c * params.p_min * params.p_min;
    for win in xs.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        if hi <= lo {
            continue;
        }
        let slope = c * (hi + lo);
        value += slope * (p.min(hi) - lo).max(0.0);
    }
    value
}

/// Commitment handles of one generating unit (thermal or ship aggregate).
#[derive(Debug, Clone, Default)]
pub struct Commitment {
    /// Per-hour status expression (a variable for thermal units).
    pub on: Vec<LinExpr>,
    /// Per-hour output expression, MW.
    pub output: Vec<LinExpr>,
    pub su: Vec<VarId>,
    pub sd: Vec<VarId>,
}

#[derive(Debug, Clone)]
pub struct UnitVars {
    pub u: Vec<VarId>,
    pub p: Vec<VarId>,
    pub commitment: Commitment,
}

#[derive(Debug, Clone, Default)]
pub struct GcucVarMap {
    pub units: Vec<UnitVars>,
    /// `[line][hour]`, MW.
    pub flow: Vec<Vec<VarId>>,
    /// `[bus][hour]`, radians.
    pub theta: Vec<Vec<VarId>>,
    /// `[bus][hour]`, MW.
    pub shed: Vec<Vec<VarId>>,
}

fn hour_name(t: usize) -> usize {
    t + 1
}

/// Start-up/shut-down logic, ramping and minimum up/down windows for one
/// unit whose status and output are given as expressions.
pub fn add_commitment_logic(
    model: &mut MilpModel,
    tag: &str,
    params: &UnitParams,
    on: Vec<LinExpr>,
    output: Vec<LinExpr>,
) -> Result<Commitment> {
    let horizon = on.len();
    let init = &params.initial;
    let on0 = if init.on { 1.0 } else { 0.0 };
    let prev_on = |t: usize| -> LinExpr {
        if t == 0 {
            LinExpr::new().with_constant(on0)
        } else {
            on[t - 1].clone()
        }
    };
    let prev_out = |t: usize| -> LinExpr {
        if t == 0 {
            LinExpr::new().with_constant(init.output)
        } else {
            output[t - 1].clone()
        }
    };
    let mut su = Vec::with_capacity(horizon);
    let mut sd = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let h = hour_name(t);
        let up = model.add_continuous(0.0, 1.0, format!("SU({tag},{h})"))?;
        let down = model.add_continuous(0.0, 1.0, format!("SD({tag},{h})"))?;
        su.push(up);
        sd.push(down);

        let mut logic = LinExpr::new().with(up, 1.0).with(down, -1.0);
        logic.add_expr(&on[t], -1.0).add_expr(&prev_on(t), 1.0);
        model.add_expr_constraint(format!("sulogic({tag},{h})"), &logic, Sense::Eq, 0.0)?;
        model.add_constraint(format!("suexcl({tag},{h})"), vec![(up, 1.0), (down, 1.0)], Sense::Le, 1.0)?;
        let mut su_on = LinExpr::new().with(up, 1.0);
        su_on.add_expr(&on[t], -1.0);
        model.add_expr_constraint(format!("suon({tag},{h})"), &su_on, Sense::Le, 0.0)?;
        let mut sd_off = LinExpr::new().with(down, 1.0);
        sd_off.add_expr(&on[t], 1.0);
        model.add_expr_constraint(format!("sdoff({tag},{h})"), &sd_off, Sense::Le, 1.0)?;

        if let Some(ru) = params.ramp_up {
            let mut e = output[t].clone();
            e.add_expr(&prev_out(t), -1.0).add_expr(&prev_on(t), -ru).add(up, -params.startup_ramp());
            model.add_expr_constraint(format!("rampup({tag},{h})"), &e, Sense::Le, 0.0)?;
        }
        if let Some(rd) = params.ramp_down {
            let mut e = prev_out(t);
            e.add_expr(&output[t], -1.0).add_expr(&on[t], -rd).add(down, -params.shutdown_ramp());
            model.add_expr_constraint(format!("rampdown({tag},{h})"), &e, Sense::Le, 0.0)?;
        }
    }
    let m_on = params.min_up as usize;
    let m_off = params.min_down as usize;
    for t in 0..horizon {
        let h = hour_name(t);
        if m_on > 1 {
            let mut e = LinExpr::new();
            for &v in &su[(t + 1).saturating_sub(m_on)..=t] {
                e.add(v, 1.0);
            }
            e.add_expr(&on[t], -1.0);
            model.add_expr_constraint(format!("minup({tag},{h})"), &e, Sense::Le, 0.0)?;
        }
        if m_off > 1 {
            let mut e = LinExpr::new();
            for &v in &sd[(t + 1).saturating_sub(m_off)..=t] {
                e.add(v, 1.0);
            }
            e.add_expr(&on[t], 1.0);
            model.add_expr_constraint(format!("mindown({tag},{h})"), &e, Sense::Le, 1.0)?;
        }
    }
    // Runs carried over from before the horizon.
    let held = init.hours as usize;
    let (required, sense, rhs) = if init.on { (m_on, Sense::Ge, 1.0) } else { (m_off, Sense::Le, 0.0) };
    for t in 0..required.saturating_sub(held).min(horizon) {
        model.add_expr_constraint(format!("initstate({tag},{})", hour_name(t)), &on[t], sense, rhs)?;
    }
    Ok(Commitment { on, output, su, sd })
}

/// Thermal commitment and dispatch rows for every generator.
pub fn build_uc_constraints(inst: &Instance, model: &mut MilpModel) -> Result<Vec<UnitVars>> {
    let mut units = Vec::with_capacity(inst.generators.len());
    for g in &inst.generators {
        let prm = &g.params;
        let mut u = Vec::with_capacity(inst.horizon);
        let mut p = Vec::with_capacity(inst.horizon);
        for t in 0..inst.horizon {
            let h = hour_name(t);
            let ut = model.add_binary(format!("U({},{h})", g.id))?;
            let pt = model.add_continuous(0.0, prm.p_max, format!("P({},{h})", g.id))?;
            model.add_constraint(format!("pmin({},{h})", g.id), vec![(pt, 1.0), (ut, -prm.p_min)], Sense::Ge, 0.0)?;
            model.add_constraint(format!("pmax({},{h})", g.id), vec![(pt, 1.0), (ut, -prm.p_max)], Sense::Le, 0.0)?;
            u.push(ut);
            p.push(pt);
        }
        let on = u.iter().map(|&v| LinExpr::new().with(v, 1.0)).collect();
        let output = p.iter().map(|&v| LinExpr::new().with(v, 1.0)).collect();
        let commitment = add_commitment_logic(model, &g.id, prm, on, output)?;
        units.push(UnitVars { u, p, commitment });
    }
    Ok(units)
}

/// Generation terms injected at each bus and hour.
#[derive(Debug, Clone)]
pub struct Injections {
    /// `[bus][hour]`.
    pub terms: Vec<Vec<LinExpr>>,
}

impl Injections {
    pub fn empty(inst: &Instance) -> Self {
        Injections { terms: vec![vec![LinExpr::new(); inst.horizon]; inst.buses.len()] }
    }

    /// Thermal outputs at their buses.
    pub fn thermal(inst: &Instance, units: &[UnitVars]) -> Self {
        let mut inj = Injections::empty(inst);
        for (g, uv) in inst.generators.iter().zip(units) {
            let b = inst.bus_index(g.bus).expect("validated bus reference");
            for (t, &p) in uv.p.iter().enumerate() {
                inj.terms[b][t].add(p, 1.0);
            }
        }
        inj
    }

    pub fn add(&mut self, bus: usize, hour: usize, var: VarId, coef: f64) {
        self.terms[bus][hour].add(var, coef);
    }
}

/// Network variables and rows. Every generator output in `units` must appear
/// in the injection at its bus.
pub fn build_network_constraints(
    inst: &Instance,
    model: &mut MilpModel,
    units: &[UnitVars],
    injections: &Injections,
) -> Result<GcucVarMap> {
    for (g, uv) in inst.generators.iter().zip(units) {
        let b = inst.bus_index(g.bus).expect("validated bus reference");
        for (t, &p) in uv.p.iter().enumerate() {
            if injections.terms[b][t].coefficient(p) != 1.0 {
                return Err(BuildError::MissingInjection { generator: g.id.clone(), bus: g.bus, hour: t + 1 });
            }
        }
    }
    let horizon = inst.horizon;
    let mut theta = Vec::with_capacity(inst.buses.len());
    let mut shed = Vec::with_capacity(inst.buses.len());
    for (b, bus) in inst.buses.iter().enumerate() {
        let mut th = Vec::with_capacity(horizon);
        let mut sh = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let h = hour_name(t);
            let v = model.add_continuous(-bus.theta_max, bus.theta_max, format!("theta({},{h})", bus.id))?;
            if bus.reference {
                model.add_constraint(format!("refangle({h})"), vec![(v, 1.0)], Sense::Eq, 0.0)?;
            }
            th.push(v);
            sh.push(model.add_continuous(0.0, inst.shed_limit(b, t), format!("SHD({},{h})", bus.id))?);
        }
        theta.push(th);
        shed.push(sh);
    }
    let mut flow = Vec::with_capacity(inst.lines.len());
    for line in &inst.lines {
        let from = inst.bus_index(line.from).expect("validated bus reference");
        let to = inst.bus_index(line.to).expect("validated bus reference");
        let susceptance = inst.base_mva / line.x;
        let mut fl = Vec::with_capacity(horizon);
        for t in 0..horizon {
            let h = hour_name(t);
            let f = model.add_continuous(-line.f_max, line.f_max, format!("F({},{h})", line.id))?;
            model.add_constraint(
                format!("dcflow({},{h})", line.id),
                vec![(f, 1.0), (theta[from][t], -susceptance), (theta[to][t], susceptance)],
                Sense::Eq,
                0.0,
            )?;
            fl.push(f);
        }
        flow.push(fl);
    }
    for (b, bus) in inst.buses.iter().enumerate() {
        for t in 0..horizon {
            let mut e = injections.terms[b][t].clone();
            for (l, line) in inst.lines.iter().enumerate() {
                if line.to == bus.id {
                    e.add(flow[l][t], 1.0);
                }
                if line.from == bus.id {
                    e.add(flow[l][t], -1.0);
                }
            }
            e.add(shed[b][t], 1.0);
            model.add_expr_constraint(format!("balance({},{})", bus.id, hour_name(t)), &e, Sense::Eq, inst.demand_at(b, t))?;
        }
    }
    Ok(GcucVarMap { units: units.to_vec(), flow, theta, shed })
}

/// Generation cost of one unit: no-load, energy, optional piecewise quadratic,
/// start-up and shut-down terms.
pub fn add_unit_cost(
    model: &mut MilpModel,
    tag: &str,
    params: &UnitParams,
    commitment: &Commitment,
    cost_model: CostModel,
) -> Result<()> {
    cost_model.validate()?;
    let mut obj = LinExpr::new();
    for t in 0..commitment.on.len() {
        obj.add_expr(&commitment.on[t], params.a);
        obj.add_expr(&commitment.output[t], params.b);
        obj.add(commitment.su[t], params.startup_cost);
        obj.add(commitment.sd[t], params.shutdown_cost);
        if let CostModel::Piecewise { segments } = cost_model {
            if params.c != 0.0 {
                add_piecewise_quadratic(model, tag, params, segments, t, commitment, &mut obj)?;
            }
        }
    }
    for (v, c) in obj.terms() {
        model.add_objective_term(v, c)?;
    }
    model.add_objective_constant(obj.constant);
    Ok(())
}

fn add_piecewise_quadratic(
    model: &mut MilpModel,
    tag: &str,
    params: &UnitParams,
    segments: usize,
    t: usize,
    commitment: &Commitment,
    obj: &mut LinExpr,
) -> Result<()> {
    let h = hour_name(t);
    let xs = breakpoints(params, segments);
    // output = p_min * on + sum of segment fills
    let mut link = commitment.output[t].clone();
    link.add_expr(&commitment.on[t], -params.p_min);
    obj.add_expr(&commitment.on[t], params.c * params.p_min * params.p_min);
    for (k, win) in xs.windows(2).enumerate() {
        let width = win[1] - win[0];
        if width <= 0.0 {
            continue;
        }
        let d = model.add_continuous(0.0, width, format!("seg({tag},{h},{k})"))?;
        let mut cap = LinExpr::new().with(d, 1.0);
        cap.add_expr(&commitment.on[t], -width);
        model.add_expr_constraint(format!("segcap({tag},{h},{k})"), &cap, Sense::Le, 0.0)?;
        link.add(d, -1.0);
        obj.add(d, params.c * (win[0] + win[1]));
    }
    model.add_expr_constraint(format!("segsum({tag},{h})"), &link, Sense::Eq, 0.0)?;
    Ok(())
}

/// Grid objective: unit costs plus the shedding penalty.
pub fn build_gcuc_objective(
    inst: &Instance,
    model: &mut MilpModel,
    map: &GcucVarMap,
    cost_model: CostModel,
) -> Result<()> {
    for (g, uv) in inst.generators.iter().zip(&map.units) {
        add_unit_cost(model, &g.id, &g.params, &uv.commitment, cost_model)?;
    }
    for row in &map.shed {
        for &v in row {
            model.add_objective_term(v, inst.penalties.shed)?;
        }
    }
    Ok(())
}

/// The stand-alone grid model without ships.
pub fn build_gcuc(inst: &Instance, model: &mut MilpModel, cost_model: CostModel) -> Result<GcucVarMap> {
    let units = build_uc_constraints(inst, model)?;
    let injections = Injections::thermal(inst, &units);
    let map = build_network_constraints(inst, model, &units, &injections)?;
    build_gcuc_objective(inst, model, &map, cost_model)?;
    Ok(map)
}
