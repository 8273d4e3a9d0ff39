//! Power-ship routing over a time-expanded port network: location, sailing,
//! arrival/departure and operating logic, port capacities, ship generation
//! and the ship objective.

use mesc_milp::{LinExpr, MilpModel, Sense, VarId};

use crate::gcuc::{add_commitment_logic, add_unit_cost, BuildError, Commitment, CostModel, Injections, Result};
use crate::instance::{routes, DepartureLimit, Instance};

/// Constant used to switch travel-time windows off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigM(f64);

impl BigM {
    /// Fails unless `value` covers the horizon.
    pub fn new(value: f64, horizon: usize) -> Option<BigM> {
        (value >= horizon as f64).then_some(BigM(value))
    }

    pub fn for_horizon(horizon: usize) -> BigM {
        BigM(horizon as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct ShipVars {
    /// Port position of the ship before the first hour.
    pub initial_port: usize,
    /// `[port][hour]` location indicator.
    pub v: Vec<Vec<VarId>>,
    /// `[arc][hour]` sailing indicator.
    pub vs: Vec<Vec<VarId>>,
    pub vd: Vec<Vec<VarId>>,
    pub ve: Vec<Vec<VarId>>,
    pub w: Vec<Vec<VarId>>,
    pub o: Vec<Vec<VarId>>,
    /// `[port][hour]` output, MW.
    pub ps: Vec<Vec<VarId>>,
    pub commitment: Commitment,
}

#[derive(Debug, Clone, Default)]
pub struct MaritimeVarMap {
    /// Port-position pairs, shared by every ship.
    pub arcs: Vec<(usize, usize)>,
    pub ships: Vec<ShipVars>,
}

impl MaritimeVarMap {
    pub fn sail_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.ships.iter().flat_map(|s| s.vs.iter().flatten().copied())
    }
}

/// Prior-hour values of one ship's indicators, constants before the horizon.
struct Prior<'a> {
    ship: &'a ShipVars,
    operating: bool,
}

impl Prior<'_> {
    fn v(&self, i: usize, t: usize) -> LinExpr {
        if t == 0 {
            LinExpr::new().with_constant(if i == self.ship.initial_port { 1.0 } else { 0.0 })
        } else {
            LinExpr::new().with(self.ship.v[i][t - 1], 1.0)
        }
    }

    fn o(&self, i: usize, t: usize) -> LinExpr {
        if t == 0 {
            let on = self.operating && i == self.ship.initial_port;
            LinExpr::new().with_constant(if on { 1.0 } else { 0.0 })
        } else {
            LinExpr::new().with(self.ship.o[i][t - 1], 1.0)
        }
    }

    fn w(&self, i: usize, t: usize) -> LinExpr {
        if t == 0 {
            let mut e = self.v(i, 0);
            e.add_expr(&self.o(i, 0), -1.0);
            e
        } else {
            LinExpr::new().with(self.ship.w[i][t - 1], 1.0)
        }
    }

    fn vs(&self, a: usize, t: usize) -> LinExpr {
        if t == 0 {
            LinExpr::new()
        } else {
            LinExpr::new().with(self.ship.vs[a][t - 1], 1.0)
        }
    }
}

fn tag(inst: &Instance, s: usize) -> &str {
    &inst.ships[s].id
}

/// Creates every maritime variable. Arcs whose travel time reaches the
/// horizon get sailing indicators fixed at zero.
pub fn create_variables(inst: &Instance, model: &mut MilpModel) -> Result<MaritimeVarMap> {
    let arcs = routes(inst);
    let h = inst.horizon;
    let mut ships = Vec::with_capacity(inst.ships.len());
    for (s, ship) in inst.ships.iter().enumerate() {
        let initial_port =
            inst.port_index(ship.initial_port).ok_or_else(|| BuildError::NoInitialPort(ship.id.clone()))?;
        let id = &ship.id;
        let port_grid = |model: &mut MilpModel, name: &str, binary: bool, upper: f64| -> Result<Vec<Vec<VarId>>> {
            let mut out = Vec::with_capacity(inst.ports.len());
            for p in &inst.ports {
                let mut row = Vec::with_capacity(h);
                for t in 0..h {
                    let label = format!("{name}({id},{},{})", p.id, t + 1);
                    let v = if binary { model.add_binary(label)? } else { model.add_continuous(0.0, upper, label)? };
                    row.push(v);
                }
                out.push(row);
            }
            Ok(out)
        };
        let v = port_grid(model, "V", true, 1.0)?;
        let o = port_grid(model, "O", true, 1.0)?;
        let w = port_grid(model, "W", false, 1.0)?;
        let vd = port_grid(model, "VD", false, 1.0)?;
        let ve = port_grid(model, "VE", false, 1.0)?;
        let ps = port_grid(model, "PS", false, ship.generation.p_max)?;
        let mut vs = Vec::with_capacity(arcs.len());
        for &(i, j) in &arcs {
            let usable = inst.travel_hours(s, i, j).is_some_and(|t| (t as usize) < h);
            let mut row = Vec::with_capacity(h);
            for t in 0..h {
                let label = format!("VS({id},{},{},{})", inst.ports[i].id, inst.ports[j].id, t + 1);
                let upper = if usable { 1.0 } else { 0.0 };
                row.push(model.add_variable(mesc_milp::VarKind::Binary, 0.0, upper, label)?);
            }
            vs.push(row);
        }
        ships.push(ShipVars { initial_port, v, vs, vd, ve, w, o, ps, commitment: Commitment::default() });
    }
    Ok(MaritimeVarMap { arcs, ships })
}

/// Location, sail-start, arrival and continuity rows.
pub fn build_flow_constraints(inst: &Instance, model: &mut MilpModel, map: &MaritimeVarMap) -> Result<()> {
    let h = inst.horizon;
    for (s, sv) in map.ships.iter().enumerate() {
        let id = tag(inst, s);
        let prior = Prior { ship: sv, operating: inst.ships[s].generation.initial.on };
        for t in 0..h {
            let hr = t + 1;
            let mut loc = LinExpr::new();
            for row in sv.v.iter().chain(&sv.vs) {
                loc.add(row[t], 1.0);
            }
            model.add_expr_constraint(format!("loc({id},{hr})"), &loc, Sense::Eq, 1.0)?;

            for (a, &(i, j)) in map.arcs.iter().enumerate() {
                let (pi, pj) = (inst.ports[i].id, inst.ports[j].id);
                // Sailing may only begin from a port the ship occupied the hour before.
                let mut start = LinExpr::new().with(sv.vs[a][t], 1.0);
                start.add_expr(&prior.vs(a, t), -1.0).add_expr(&prior.w(i, t), -1.0).add_expr(&prior.o(i, t), -1.0);
                model.add_expr_constraint(format!("sailstart({id},{pi},{pj},{hr})"), &start, Sense::Le, 0.0)?;
                if t > 0 {
                    let mut arrive = LinExpr::new().with(sv.v[j][t], 1.0).with(sv.vs[a][t], 1.0);
                    arrive.add_expr(&prior.vs(a, t), -1.0);
                    model.add_expr_constraint(format!("arrive({id},{pi},{pj},{hr})"), &arrive, Sense::Ge, 0.0)?;
                }
            }
            for (i, port) in inst.ports.iter().enumerate() {
                let mut stay = LinExpr::new().with(sv.v[i][t], 1.0);
                stay.add_expr(&prior.v(i, t), -1.0);
                for (a, &(_, j)) in map.arcs.iter().enumerate() {
                    if j == i {
                        stay.add_expr(&prior.vs(a, t), -1.0);
                    }
                }
                model.add_expr_constraint(format!("stay({id},{},{hr})", port.id), &stay, Sense::Le, 0.0)?;
            }
        }
    }
    Ok(())
}

/// Departure and entering indicators as exact functions of the location.
pub fn build_arrival_departure_logic(inst: &Instance, model: &mut MilpModel, map: &MaritimeVarMap) -> Result<()> {
    for (s, sv) in map.ships.iter().enumerate() {
        let id = tag(inst, s);
        let prior = Prior { ship: sv, operating: inst.ships[s].generation.initial.on };
        for (i, port) in inst.ports.iter().enumerate() {
            for t in 0..inst.horizon {
                let n = format!("{id},{},{}", port.id, t + 1);
                let (vd, ve, v) = (sv.vd[i][t], sv.ve[i][t], sv.v[i][t]);
                let prev = prior.v(i, t);

                let mut e = LinExpr::new().with(vd, 1.0).with(v, 1.0);
                e.add_expr(&prev, -1.0);
                model.add_expr_constraint(format!("depart({n})"), &e, Sense::Ge, 0.0)?;
                let mut e = LinExpr::new().with(vd, 1.0);
                e.add_expr(&prev, -1.0);
                model.add_expr_constraint(format!("departprev({n})"), &e, Sense::Le, 0.0)?;
                model.add_constraint(format!("departnow({n})"), vec![(vd, 1.0), (v, 1.0)], Sense::Le, 1.0)?;

                let mut e = LinExpr::new().with(ve, 1.0).with(v, -1.0);
                e.add_expr(&prev, 1.0);
                model.add_expr_constraint(format!("enter({n})"), &e, Sense::Ge, 0.0)?;
                model.add_constraint(format!("enternow({n})"), vec![(ve, 1.0), (v, -1.0)], Sense::Le, 0.0)?;
                let mut e = LinExpr::new().with(ve, 1.0);
                e.add_expr(&prev, 1.0);
                model.add_expr_constraint(format!("enterprev({n})"), &e, Sense::Le, 1.0)?;

                model.add_constraint(format!("enterdepart({n})"), vec![(ve, 1.0), (vd, 1.0)], Sense::Le, 1.0)?;

                for (a, &(from, to)) in map.arcs.iter().enumerate() {
                    if from != i {
                        continue;
                    }
                    let mut e = LinExpr::new().with(vd, 1.0).with(sv.vs[a][t], -1.0);
                    e.add_expr(&prior.vs(a, t), 1.0);
                    let name = format!("departarc({id},{},{},{})", port.id, inst.ports[to].id, t + 1);
                    model.add_expr_constraint(name, &e, Sense::Ge, 0.0)?;
                }
            }
        }
    }
    Ok(())
}

/// Waiting/operating partition and operate-on-arrival.
pub fn build_operation_constraints(inst: &Instance, model: &mut MilpModel, map: &MaritimeVarMap) -> Result<()> {
    for (s, sv) in map.ships.iter().enumerate() {
        let id = tag(inst, s);
        for (i, port) in inst.ports.iter().enumerate() {
            for t in 0..inst.horizon {
                let n = format!("{id},{},{}", port.id, t + 1);
                let (v, o, w, ve) = (sv.v[i][t], sv.o[i][t], sv.w[i][t], sv.ve[i][t]);
                model.add_constraint(format!("waitop({n})"), vec![(w, 1.0), (v, -1.0), (o, 1.0)], Sense::Eq, 0.0)?;
                model.add_constraint(format!("opinport({n})"), vec![(o, 1.0), (v, -1.0)], Sense::Le, 0.0)?;
                model.add_constraint(format!("oparrive({n})"), vec![(o, 1.0), (ve, -1.0)], Sense::Ge, 0.0)?;
            }
        }
    }
    Ok(())
}

/// Sail runs of exactly the travel time, and no sailing in the last hour.
pub fn build_travel_time_constraints(
    inst: &Instance,
    model: &mut MilpModel,
    map: &MaritimeVarMap,
    big_m: BigM,
) -> Result<()> {
    let h = inst.horizon;
    for (s, sv) in map.ships.iter().enumerate() {
        let id = tag(inst, s);
        let prior = Prior { ship: sv, operating: false };
        for (a, &(i, j)) in map.arcs.iter().enumerate() {
            let Some(travel) = inst.travel_hours(s, i, j).map(|t| t as usize) else {
                continue;
            };
            if travel >= h {
                continue;
            }
            let (pi, pj) = (inst.ports[i].id, inst.ports[j].id);
            let m_low = big_m.value().min(travel as f64);
            let m_high = big_m.value().min(1.0);
            for t in 0..h {
                let hr = t + 1;
                let mut start = LinExpr::new().with(sv.vs[a][t], 1.0);
                start.add_expr(&prior.vs(a, t), -1.0);

                // A sail started at t covers t .. t+travel-1.
                let mut low = LinExpr::new();
                for tau in t..(t + travel).min(h) {
                    low.add(sv.vs[a][tau], 1.0);
                }
                low.add_expr(&start, -m_low);
                model.add_expr_constraint(format!("travelmin({id},{pi},{pj},{hr})"), &low, Sense::Ge, travel as f64 - m_low)?;

                // ... and ends before t+travel.
                let mut high = LinExpr::new();
                for tau in t..=(t + travel).min(h - 1) {
                    high.add(sv.vs[a][tau], 1.0);
                }
                high.add_expr(&start, m_high);
                model.add_expr_constraint(format!("travelmax({id},{pi},{pj},{hr})"), &high, Sense::Le, travel as f64 + m_high)?;

                if t >= travel {
                    model.add_constraint(
                        format!("noextend({id},{pi},{pj},{hr})"),
                        vec![(sv.vs[a][t], 1.0), (sv.vs[a][t - travel], 1.0)],
                        Sense::Le,
                        1.0,
                    )?;
                }
            }
        }
        let mut end = LinExpr::new();
        for row in &sv.vs {
            end.add(row[h - 1], 1.0);
        }
        model.add_expr_constraint(format!("endinport({id})"), &end, Sense::Eq, 0.0)?;
    }
    Ok(())
}

pub fn build_port_capacity_constraints(inst: &Instance, model: &mut MilpModel, map: &MaritimeVarMap) -> Result<()> {
    let h = inst.horizon;
    for (i, port) in inst.ports.iter().enumerate() {
        for t in 0..h {
            let terms = map.ships.iter().map(|sv| (sv.o[i][t], 1.0)).collect();
            model.add_constraint(format!("poc({},{})", port.id, t + 1), terms, Sense::Le, f64::from(port.poc))?;
        }
        match inst.options.departure_limit {
            DepartureLimit::PerShip => {
                for (s, sv) in map.ships.iter().enumerate() {
                    let terms = sv.vd[i].iter().map(|&v| (v, 1.0)).collect();
                    let name = format!("pdc({},{})", port.id, tag(inst, s));
                    model.add_constraint(name, terms, Sense::Le, f64::from(port.pdc))?;
                }
            }
            DepartureLimit::PerHour => {
                for t in 0..h {
                    let terms = map.ships.iter().map(|sv| (sv.vd[i][t], 1.0)).collect();
                    model.add_constraint(format!("pdc({},{})", port.id, t + 1), terms, Sense::Le, f64::from(port.pdc))?;
                }
            }
        }
    }
    Ok(())
}

/// Output limits per port and commitment logic on the ship totals.
pub fn build_ship_generation(inst: &Instance, model: &mut MilpModel, map: &mut MaritimeVarMap) -> Result<()> {
    for (s, sv) in map.ships.iter_mut().enumerate() {
        let ship = &inst.ships[s];
        let prm = &ship.generation;
        let mut on = vec![LinExpr::new(); inst.horizon];
        let mut output = vec![LinExpr::new(); inst.horizon];
        for (i, port) in inst.ports.iter().enumerate() {
            for t in 0..inst.horizon {
                let n = format!("{},{},{}", ship.id, port.id, t + 1);
                let (o, ps) = (sv.o[i][t], sv.ps[i][t]);
                model.add_constraint(format!("psmin({n})"), vec![(ps, 1.0), (o, -prm.p_min)], Sense::Ge, 0.0)?;
                model.add_constraint(format!("psmax({n})"), vec![(ps, 1.0), (o, -prm.p_max)], Sense::Le, 0.0)?;
                on[t].add(o, 1.0);
                output[t].add(ps, 1.0);
            }
        }
        sv.commitment = add_commitment_logic(model, &ship.id, prm, on, output)?;
    }
    Ok(())
}

/// Entering, departure, waiting and sailing costs plus ship generation cost.
pub fn build_ship_objective(
    inst: &Instance,
    model: &mut MilpModel,
    map: &MaritimeVarMap,
    cost_model: CostModel,
) -> Result<()> {
    for (s, sv) in map.ships.iter().enumerate() {
        let ship = &inst.ships[s];
        for (i, port) in inst.ports.iter().enumerate() {
            for t in 0..inst.horizon {
                model.add_objective_term(sv.ve[i][t], ship.entering_cost_at(port.id))?;
                model.add_objective_term(sv.vd[i][t], ship.departure_cost_at(port.id))?;
                model.add_objective_term(sv.w[i][t], ship.waiting_cost_at(port.id))?;
            }
        }
        for row in &sv.vs {
            for &v in row {
                model.add_objective_term(v, ship.sailing_cost)?;
            }
        }
        add_unit_cost(model, &ship.id, &ship.generation, &sv.commitment, cost_model)?;
    }
    Ok(())
}

/// Ship outputs at the buses of their ports.
pub fn add_ship_injections(inst: &Instance, map: &MaritimeVarMap, injections: &mut Injections) {
    for sv in &map.ships {
        for (i, port) in inst.ports.iter().enumerate() {
            let b = inst.bus_index(port.bus).expect("validated bus reference");
            for t in 0..inst.horizon {
                injections.add(b, t, sv.ps[i][t], 1.0);
            }
        }
    }
}

/// All maritime rows and the ship objective.
pub fn build_maritime(
    inst: &Instance,
    model: &mut MilpModel,
    big_m: BigM,
    cost_model: CostModel,
) -> Result<MaritimeVarMap> {
    let mut map = create_variables(inst, model)?;
    build_flow_constraints(inst, model, &map)?;
    build_arrival_departure_logic(inst, model, &map)?;
    build_operation_constraints(inst, model, &map)?;
    build_travel_time_constraints(inst, model, &map, big_m)?;
    build_port_capacity_constraints(inst, model, &map)?;
    build_ship_generation(inst, model, &mut map)?;
    build_ship_objective(inst, model, &map, cost_model)?;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance_str;
    use mesc_milp::{fix_binaries, solve_lp, solve_mip, LpStatus, MipStatus, SolverConfig};

    fn ports_fixture(horizon: usize, travel: u32, ports: u32) -> Instance {
        let buses: Vec<String> =
            (1..=ports).map(|b| format!(r#"{{"id": {b}, "reference": {}}}"#, b == 1)).collect();
        let port_list: Vec<String> = (1..=ports).map(|b| format!(r#"{{"id": {b}, "bus": {b}}}"#)).collect();
        let text = format!(
            r#"{{
            "horizon": {horizon},
            "buses": [{}],
            "ports": [{}],
            "ships": [{{"id": "PS1", "initial_port": 1,
                "generation": {{"b": 15.4708, "p_min": 0, "p_max": 80}},
                "sailing_cost": 250, "entering_cost": 200, "departure_cost": 235, "waiting_cost": 55,
                "travel_time": {travel}}}],
            "demand": {:?}
        }}"#,
            buses.join(","),
            port_list.join(","),
            vec![vec![0.0; horizon]; ports as usize]
        );
        parse_instance_str(&text).unwrap()
    }

    fn build(inst: &Instance) -> (MilpModel, MaritimeVarMap) {
        let mut m = MilpModel::new("t");
        let map = build_maritime(inst, &mut m, BigM::for_horizon(inst.horizon), CostModel::LinearOnly).unwrap();
        (m, map)
    }

    #[test]
    fn big_m_must_cover_horizon() {
        assert!(BigM::new(3.0, 4).is_none());
        assert_eq!(BigM::new(4.0, 4).map(BigM::value), Some(4.0));
    }

    #[test]
    fn idle_ship_waits_at_initial_port() {
        let mut inst = ports_fixture(4, 2, 2);
        inst.ships[0].generation.a = 100.0;
        let (m, map) = build(&inst);
        let s = solve_mip(&m, &SolverConfig::default());
        assert_eq!(s.status, MipStatus::Optimal);
        let sv = &map.ships[0];
        for t in 0..4 {
            assert_eq!(s.values[sv.v[0][t].0].round(), 1.0);
            assert_eq!(s.values[sv.w[0][t].0].round(), 1.0);
        }
        assert!((s.objective - 4.0 * 55.0).abs() < 1e-9);
    }

    /// Hour states: `k < 2` is port `k`, `k >= 2` sails arc `k - 2`.
    fn accepted_by_automaton(states: &[usize], arcs: &[(usize, usize)], travel: usize) -> bool {
        let (mut port, mut arc, mut run) = (Some(0usize), 0usize, 0usize);
        for &k in states {
            match port {
                Some(p) if k < 2 => {
                    if k != p {
                        return false;
                    }
                }
                Some(p) => {
                    if arcs[k - 2].0 != p {
                        return false;
                    }
                    (port, arc, run) = (None, k - 2, 1);
                }
                None if k < 2 => {
                    if run != travel || arcs[arc].1 != k {
                        return false;
                    }
                    port = Some(k);
                }
                None => {
                    if k - 2 != arc || run == travel {
                        return false;
                    }
                    run += 1;
                }
            }
        }
        port.is_some()
    }

    #[test]
    fn location_patterns_match_path_automaton() {
        let (h, travel) = (5usize, 2u32);
        let inst = ports_fixture(h, travel, 2);
        let (m, map) = build(&inst);
        let sv = &map.ships[0];
        let mut accepted = 0;
        for code in 0..4usize.pow(h as u32) {
            let states: Vec<usize> = (0..h).map(|t| (code / 4usize.pow(t as u32)) % 4).collect();
            let mut assignment = Vec::new();
            for (t, &k) in states.iter().enumerate() {
                for p in 0..2 {
                    assignment.push((sv.v[p][t], if k == p { 1.0 } else { 0.0 }));
                    assignment.push((sv.vs[p][t], if k == 2 + p { 1.0 } else { 0.0 }));
                }
            }
            let expected = accepted_by_automaton(&states, &map.arcs, travel as usize);
            accepted += usize::from(expected);
            let fixed = fix_binaries(&m, assignment).unwrap();
            let feasible = solve_lp(&fixed, &SolverConfig::default()).status == LpStatus::Optimal;
            assert_eq!(feasible, expected, "states {states:?}");
        }
        assert!(accepted > 1);
    }

    #[test]
    fn ps2_departing_hour_three_arrives_hour_five() {
        let mut inst = ports_fixture(8, 2, 2);
        inst.ships[0].waiting_cost = 20.0;
        let (m, map) = build(&inst);
        let sv = &map.ships[0];
        let a = map.arcs.iter().position(|&(i, _)| i == 0).unwrap();
        // Force the departure at hour 3 (index 2).
        let fixed = fix_binaries(&m, [(sv.v[0][1], 1.0), (sv.vs[a][2], 1.0)]).unwrap();
        let s = solve_mip(&fixed, &SolverConfig::default());
        assert_eq!(s.status, MipStatus::Optimal);
        let sailing: Vec<usize> = (0..8).filter(|&t| s.values[sv.vs[a][t].0] > 0.5).map(|t| t + 1).collect();
        assert_eq!(sailing, vec![3, 4]);
        assert!(s.values[sv.v[1][4].0] > 0.5, "arrives at hour 5");
        assert!(s.values[sv.o[1][4].0] > 0.5, "operates on arrival");
    }

    #[test]
    fn one_departure_limit_blocks_second_trip() {
        let mut inst = ports_fixture(8, 1, 2);
        inst.ports[0].pdc = 1;
        let (m, map) = build(&inst);
        let sv = &map.ships[0];
        let out = map.arcs.iter().position(|&(i, _)| i == 0).unwrap();
        let back = map.arcs.iter().position(|&(i, _)| i == 1).unwrap();
        // 1 -> 2 -> 1 -> 2 departs twice from port 1.
        let fixed = fix_binaries(&m, [(sv.vs[out][0], 1.0), (sv.vs[back][2], 1.0), (sv.vs[out][4], 1.0)]).unwrap();
        assert_eq!(solve_lp(&fixed, &SolverConfig::default()).status, LpStatus::Infeasible);
        inst.ports[0].pdc = 2;
        let (m, map) = build(&inst);
        let sv = &map.ships[0];
        let fixed = fix_binaries(&m, [(sv.vs[out][0], 1.0), (sv.vs[back][2], 1.0), (sv.vs[out][4], 1.0)]).unwrap();
        assert_eq!(solve_lp(&fixed, &SolverConfig::default()).status, LpStatus::Optimal);
    }

    #[test]
    fn port_operating_capacity_binds() {
        let mut inst = ports_fixture(2, 1, 2);
        let mut second = inst.ships[0].clone();
        second.id = "PS2".into();
        inst.ships.push(second);
        inst.ports[0].poc = 1;
        let (m, map) = build(&inst);
        let both = [(map.ships[0].o[0][0], 1.0), (map.ships[1].o[0][0], 1.0)];
        let fixed = fix_binaries(&m, both).unwrap();
        assert_eq!(solve_lp(&fixed, &SolverConfig::default()).status, LpStatus::Infeasible);
    }

    #[test]
    fn no_sailing_in_last_hour() {
        let inst = ports_fixture(4, 1, 2);
        let (m, map) = build(&inst);
        let fixed = fix_binaries(&m, [(map.ships[0].vs[0][3], 1.0)]).unwrap();
        assert_eq!(solve_lp(&fixed, &SolverConfig::default()).status, LpStatus::Infeasible);
    }
}
