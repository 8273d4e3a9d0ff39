//! Scenario data: buses, lines, thermal units, ports, power ships and
//! hourly demand, with JSON ingestion and structural validation.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub type BusId = u32;
pub type PortId = u32;

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at `{location}`: {message}")]
    Schema { location: String, message: String },
    #[error("reference error: {0}")]
    Reference(String),
}

fn default_base_mva() -> f64 {
    100.0
}
fn default_horizon() -> usize {
    24
}
fn default_theta_max() -> f64 {
    std::f64::consts::PI
}
fn default_one() -> u32 {
    1
}
fn default_poc() -> u32 {
    2
}
fn default_pdc() -> u32 {
    4
}
fn default_shed_penalty() -> f64 {
    1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: BusId,
    #[serde(default)]
    pub reference: bool,
    /// Angle limit in radians; the lower limit is its negation.
    #[serde(default = "default_theta_max")]
    pub theta_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    pub id: String,
    pub from: BusId,
    pub to: BusId,
    /// Series reactance in per unit.
    pub x: f64,
    /// Thermal limit in MW, symmetric.
    pub f_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default)]
    pub on: bool,
    /// Hours spent in the current state before the horizon starts.
    #[serde(default = "default_one")]
    pub hours: u32,
    #[serde(default)]
    pub output: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState { on: false, hours: 1, output: 0.0 }
    }
}

/// Thermal characteristics shared by grid units and ship generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitParams {
    /// No-load cost, $/h while committed.
    #[serde(default)]
    pub a: f64,
    /// Linear energy cost, $/MWh.
    pub b: f64,
    /// Quadratic coefficient, $/MW²h.
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub p_min: f64,
    pub p_max: f64,
    /// MW/h; absent means unlimited.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_up: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_down: Option<f64>,
    #[serde(default)]
    pub startup_cost: f64,
    #[serde(default)]
    pub shutdown_cost: f64,
    #[serde(default = "default_one")]
    pub min_up: u32,
    #[serde(default = "default_one")]
    pub min_down: u32,
    #[serde(default)]
    pub initial: InitialState,
}

impl UnitParams {
    pub fn ramp_up_limit(&self) -> f64 {
        self.ramp_up.unwrap_or(f64::INFINITY)
    }

    pub fn ramp_down_limit(&self) -> f64 {
        self.ramp_down.unwrap_or(f64::INFINITY)
    }

    /// Largest output reachable in the hour a unit starts.
    pub fn startup_ramp(&self) -> f64 {
        self.ramp_up_limit().max(self.p_min).min(self.p_max)
    }

    /// Largest output from which a unit may shut down in one hour.
    pub fn shutdown_ramp(&self) -> f64 {
        self.ramp_down_limit().max(self.p_min).min(self.p_max)
    }

    fn findings(&self, who: &str, out: &mut Vec<Finding>) {
        let finite = [self.a, self.b, self.c, self.p_min, self.p_max, self.startup_cost, self.shutdown_cost];
        if finite.iter().any(|v| !v.is_finite()) {
            out.push(Finding::new("unit-finite", format!("{who}: non-finite parameter")));
        }
        if self.p_min < 0.0 || self.p_min > self.p_max {
            out.push(Finding::new("unit-limits", format!("{who}: requires 0 <= p_min <= p_max")));
        }
        let ramps = [self.ramp_up, self.ramp_down];
        if ramps.iter().flatten().any(|r| !(*r >= 0.0)) {
            out.push(Finding::new("unit-ramp", format!("{who}: ramp limits must be >= 0")));
        }
        if self.startup_cost < 0.0 || self.shutdown_cost < 0.0 {
            out.push(Finding::new("unit-costs", format!("{who}: start-up and shut-down costs must be >= 0")));
        }
        if self.min_up < 1 || self.min_down < 1 {
            out.push(Finding::new("unit-min-times", format!("{who}: minimum up and down times must be >= 1")));
        }
        if self.initial.hours < 1 {
            out.push(Finding::new("unit-initial", format!("{who}: initial hours in state must be >= 1")));
        }
        let init = &self.initial;
        if init.on && (init.output < self.p_min - 1e-9 || init.output > self.p_max + 1e-9) {
            out.push(Finding::new("unit-initial", format!("{who}: initial output outside [p_min, p_max]")));
        }
        if !init.on && init.output != 0.0 {
            out.push(Finding::new("unit-initial", format!("{who}: an offline unit must have zero initial output")));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: BusId,
    #[serde(flatten)]
    pub params: UnitParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Port {
    pub id: PortId,
    pub bus: BusId,
    /// Ships that may operate at the port in one hour.
    #[serde(default = "default_poc")]
    pub poc: u32,
    /// Departure (berth) capacity.
    #[serde(default = "default_pdc")]
    pub pdc: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortCost {
    pub port: PortId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entering: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub departure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waiting: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteTime {
    pub from: PortId,
    pub to: PortId,
    pub hours: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ship {
    pub id: String,
    pub initial_port: PortId,
    pub generation: UnitParams,
    /// $/h while sailing.
    pub sailing_cost: f64,
    /// $ per arrival.
    pub entering_cost: f64,
    /// $ per departure (berthing fee).
    pub departure_cost: f64,
    /// $/h while idle at a port.
    pub waiting_cost: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub port_costs: Vec<PortCost>,
    /// Uniform travel time between any two ports, hours.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub travel_time: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub travel_times: Vec<RouteTime>,
}

impl Ship {
    pub fn travel_hours(&self, from: PortId, to: PortId) -> Option<u32> {
        self.travel_times
            .iter()
            .find(|r| r.from == from && r.to == to)
            .map(|r| r.hours)
            .or(self.travel_time)
    }

    fn port_cost(&self, port: PortId) -> Option<&PortCost> {
        self.port_costs.iter().find(|c| c.port == port)
    }

    pub fn entering_cost_at(&self, port: PortId) -> f64 {
        self.port_cost(port).and_then(|c| c.entering).unwrap_or(self.entering_cost)
    }

    pub fn departure_cost_at(&self, port: PortId) -> f64 {
        self.port_cost(port).and_then(|c| c.departure).unwrap_or(self.departure_cost)
    }

    pub fn waiting_cost_at(&self, port: PortId) -> f64 {
        self.port_cost(port).and_then(|c| c.waiting).unwrap_or(self.waiting_cost)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Penalties {
    /// $/MWh of unserved demand.
    #[serde(default = "default_shed_penalty")]
    pub shed: f64,
}

impl Default for Penalties {
    fn default() -> Self {
        Penalties { shed: default_shed_penalty() }
    }
}

/// How the departure capacity of a port is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepartureLimit {
    /// Departures of one ship from one port over the whole horizon.
    #[default]
    PerShip,
    /// Departures of all ships from one port within one hour.
    PerHour,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub departure_limit: DepartureLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_base_mva")]
    pub base_mva: f64,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    pub buses: Vec<Bus>,
    #[serde(default)]
    pub lines: Vec<Line>,
    #[serde(default)]
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub ports: Vec<Port>,
    #[serde(default)]
    pub ships: Vec<Ship>,
    /// MW, indexed `[bus position][hour]`.
    pub demand: Vec<Vec<f64>>,
    /// Sheddable fraction of demand, `[bus position][hour]`; absent means 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shed_factor: Option<Vec<Vec<f64>>>,
    /// Allowed sailing routes as `[from, to]` port pairs; absent means all pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routes: Option<Vec<[PortId; 2]>>,
    #[serde(default)]
    pub penalties: Penalties,
    #[serde(default)]
    pub options: Options,
}

/// One violated invariant reported by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub invariant: &'static str,
    pub message: String,
}

impl Finding {
    fn new(invariant: &'static str, message: impl Into<String>) -> Self {
        Finding { invariant, message: message.into() }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.invariant, self.message)
    }
}

impl Instance {
    pub fn bus_index(&self, id: BusId) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn port_index(&self, id: PortId) -> Option<usize> {
        self.ports.iter().position(|p| p.id == id)
    }

    pub fn reference_bus(&self) -> Option<usize> {
        self.buses.iter().position(|b| b.reference)
    }

    /// Port located at bus position `b`, if any.
    pub fn port_at_bus(&self, b: usize) -> Option<usize> {
        let id = self.buses[b].id;
        self.ports.iter().position(|p| p.bus == id)
    }

    pub fn demand_at(&self, b: usize, t: usize) -> f64 {
        self.demand[b][t]
    }

    pub fn shed_factor_at(&self, b: usize, t: usize) -> f64 {
        self.shed_factor.as_ref().map_or(1.0, |s| s[b][t])
    }

    /// Upper bound on shedding at bus position `b` in hour `t`, MW.
    pub fn shed_limit(&self, b: usize, t: usize) -> f64 {
        (self.shed_factor_at(b, t) * self.demand_at(b, t)).max(0.0)
    }

    /// Travel time of `ship` on the route between port positions `i` and `j`.
    pub fn travel_hours(&self, ship: usize, i: usize, j: usize) -> Option<u32> {
        self.ships[ship].travel_hours(self.ports[i].id, self.ports[j].id)
    }

    pub fn total_demand(&self, t: usize) -> f64 {
        self.demand.iter().map(|row| row[t]).sum()
    }
}

/// Reads and cross-checks an instance file.
pub fn parse_instance(path: &Path) -> Result<Instance, InstanceError> {
    let file = File::open(path).map_err(|source| InstanceError::Io { path: path.to_path_buf(), source })?;
    let mut de = serde_json::Deserializer::from_reader(BufReader::new(file));
    let inst: Instance = serde_path_to_error::deserialize(&mut de).map_err(|e| InstanceError::Schema {
        location: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    check_references(&inst)?;
    Ok(inst)
}

/// Parses an instance from a JSON string.
pub fn parse_instance_str(text: &str) -> Result<Instance, InstanceError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let inst: Instance = serde_path_to_error::deserialize(&mut de).map_err(|e| InstanceError::Schema {
        location: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    check_references(&inst)?;
    Ok(inst)
}

pub fn write_instance(inst: &Instance, path: &Path) -> Result<(), InstanceError> {
    let text = serde_json::to_string_pretty(inst).expect("instance serialises");
    std::fs::write(path, text).map_err(|source| InstanceError::Io { path: path.to_path_buf(), source })
}

fn check_references(inst: &Instance) -> Result<(), InstanceError> {
    let buses: HashSet<BusId> = inst.buses.iter().map(|b| b.id).collect();
    let ports: HashSet<PortId> = inst.ports.iter().map(|p| p.id).collect();
    let missing_bus = |what: String, id: BusId| {
        if buses.contains(&id) {
            Ok(())
        } else {
            Err(InstanceError::Reference(format!("{what} references unknown bus {id}")))
        }
    };
    let missing_port = |what: String, id: PortId| {
        if ports.contains(&id) {
            Ok(())
        } else {
            Err(InstanceError::Reference(format!("{what} references unknown port {id}")))
        }
    };
    for l in &inst.lines {
        missing_bus(format!("line {}", l.id), l.from)?;
        missing_bus(format!("line {}", l.id), l.to)?;
    }
    for g in &inst.generators {
        missing_bus(format!("generator {}", g.id), g.bus)?;
    }
    for p in &inst.ports {
        missing_bus(format!("port {}", p.id), p.bus)?;
    }
    for s in &inst.ships {
        missing_port(format!("ship {}", s.id), s.initial_port)?;
        for r in &s.travel_times {
            missing_port(format!("ship {} travel time", s.id), r.from)?;
            missing_port(format!("ship {} travel time", s.id), r.to)?;
        }
        for c in &s.port_costs {
            missing_port(format!("ship {} port cost", s.id), c.port)?;
        }
    }
    for r in inst.routes.iter().flatten() {
        missing_port("route".to_string(), r[0])?;
        missing_port("route".to_string(), r[1])?;
    }
    Ok(())
}

/// Ordered port-position pairs a ship may sail, sorted by port ids.
pub fn routes(inst: &Instance) -> Vec<(usize, usize)> {
    let pairs: BTreeSet<(PortId, PortId)> = match &inst.routes {
        Some(list) => list.iter().filter(|r| r[0] != r[1]).map(|r| (r[0], r[1])).collect(),
        None => inst
            .ports
            .iter()
            .flat_map(|a| inst.ports.iter().map(move |b| (a.id, b.id)))
            .filter(|(a, b)| a != b)
            .collect(),
    };
    pairs
        .into_iter()
        .filter_map(|(a, b)| Some((inst.port_index(a)?, inst.port_index(b)?)))
        .collect()
}

fn duplicates<T: Eq + std::hash::Hash + Clone + fmt::Display>(items: impl Iterator<Item = T>) -> Vec<String> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for it in items {
        let n = seen.entry(it.clone()).or_insert(0);
        *n += 1;
        if *n == 2 {
            out.push(it.to_string());
        }
    }
    out
}

/// Checks every structural invariant; an empty result means the instance is valid.
pub fn validate_instance(inst: &Instance) -> Vec<Finding> {
    let mut out = Vec::new();
    let h = inst.horizon;
    if h < 1 {
        out.push(Finding::new("horizon", "horizon must be at least one hour"));
    }
    if !(inst.base_mva > 0.0) {
        out.push(Finding::new("base-mva", "MVA base must be positive"));
    }
    if !(inst.penalties.shed >= 0.0) {
        out.push(Finding::new("shed-penalty", "shed penalty must be >= 0"));
    }

    let refs = inst.buses.iter().filter(|b| b.reference).count();
    if refs != 1 {
        out.push(Finding::new("reference-bus", format!("exactly one reference bus required, found {refs}")));
    }
    for d in duplicates(inst.buses.iter().map(|b| b.id)) {
        out.push(Finding::new("unique-ids", format!("duplicate bus id {d}")));
    }
    for b in &inst.buses {
        if !(b.theta_max > 0.0) {
            out.push(Finding::new("angle-limits", format!("bus {}: theta_max must be positive", b.id)));
        }
    }

    for d in duplicates(inst.lines.iter().map(|l| l.id.clone())) {
        out.push(Finding::new("unique-ids", format!("duplicate line id {d}")));
    }
    for l in &inst.lines {
        if l.from == l.to {
            out.push(Finding::new("line-endpoints", format!("line {}: from and to buses coincide", l.id)));
        }
        if !(l.x > 0.0) || !l.x.is_finite() {
            out.push(Finding::new("line-reactance", format!("line {}: reactance must be positive", l.id)));
        }
        if !(l.f_max >= 0.0) {
            out.push(Finding::new("line-limit", format!("line {}: flow limit must be >= 0", l.id)));
        }
    }

    for d in duplicates(inst.generators.iter().map(|g| g.id.clone())) {
        out.push(Finding::new("unique-ids", format!("duplicate generator id {d}")));
    }
    for g in &inst.generators {
        g.params.findings(&format!("generator {}", g.id), &mut out);
    }

    for d in duplicates(inst.ports.iter().map(|p| p.id)) {
        out.push(Finding::new("unique-ids", format!("duplicate port id {d}")));
    }
    if !duplicates(inst.ports.iter().map(|p| p.bus)).is_empty() {
        out.push(Finding::new("port-bus-injective", "port-bus mapping not injective"));
    }
    for p in &inst.ports {
        if p.poc < 1 {
            out.push(Finding::new("port-capacity", format!("port {}: operating capacity must be >= 1", p.id)));
        }
    }

    for d in duplicates(inst.ships.iter().map(|s| s.id.clone())) {
        out.push(Finding::new("unique-ids", format!("duplicate ship id {d}")));
    }
    let route_list = routes(inst);
    for (k, s) in inst.ships.iter().enumerate() {
        let who = format!("ship {}", s.id);
        s.generation.findings(&who, &mut out);
        let costs = [s.sailing_cost, s.entering_cost, s.departure_cost, s.waiting_cost];
        let overrides = s.port_costs.iter().flat_map(|c| [c.entering, c.departure, c.waiting]).flatten();
        if costs.into_iter().chain(overrides).any(|c| !(c >= 0.0) || !c.is_finite()) {
            out.push(Finding::new("ship-costs", format!("{who}: costs must be finite and >= 0")));
        }
        for &(i, j) in &route_list {
            match inst.travel_hours(k, i, j) {
                None => out.push(Finding::new(
                    "travel-time",
                    format!("{who}: no travel time for route {}->{}", inst.ports[i].id, inst.ports[j].id),
                )),
                Some(0) => out.push(Finding::new("travel-time", format!("{who}: travel times must be >= 1 hour"))),
                Some(_) => {}
            }
        }
    }

    if inst.demand.len() != inst.buses.len() {
        out.push(Finding::new(
            "demand-shape",
            format!("demand has {} rows for {} buses", inst.demand.len(), inst.buses.len()),
        ));
    }
    for (b, row) in inst.demand.iter().enumerate() {
        if row.len() != h {
            out.push(Finding::new("demand-shape", format!("demand row {b} has {} hours, expected {h}", row.len())));
        }
        if row.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            out.push(Finding::new("demand-values", format!("demand row {b} has negative or non-finite entries")));
        }
    }
    if let Some(psi) = &inst.shed_factor {
        if psi.len() != inst.buses.len() || psi.iter().any(|r| r.len() != h) {
            out.push(Finding::new("shed-shape", "shed factor table must be [bus][hour]"));
        }
        if psi.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            out.push(Finding::new("shed-factor", "shed factor out of [0,1]"));
        }
    }
    out
}

/// Warnings that do not make an instance invalid but make parts of it unusable.
pub fn usability_warnings(inst: &Instance) -> Vec<Finding> {
    let mut out = Vec::new();
    for (k, s) in inst.ships.iter().enumerate() {
        for (i, j) in routes(inst) {
            if let Some(t) = inst.travel_hours(k, i, j) {
                if t as usize >= inst.horizon {
                    out.push(Finding::new(
                        "route-unusable",
                        format!(
                            "ship {}: route {}->{} takes {t} h, not shorter than the horizon",
                            s.id, inst.ports[i].id, inst.ports[j].id
                        ),
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{
            "horizon": 1,
            "buses": [{"id": 1, "reference": true}],
            "generators": [{"id": "G1", "bus": 1, "b": 10.0, "p_max": 50.0}],
            "demand": [[20.0]]
        }"#
    }

    #[test]
    fn minimal_file_is_valid() {
        let inst = parse_instance_str(minimal()).unwrap();
        assert_eq!(inst.buses.len(), 1);
        assert!(inst.ships.is_empty());
        assert_eq!(inst.penalties.shed, 1000.0);
        assert_eq!(inst.shed_factor_at(0, 0), 1.0);
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn dangling_bus_is_a_reference_error() {
        let text = r#"{
            "horizon": 1,
            "buses": [{"id": 1, "reference": true}, {"id": 2}],
            "lines": [{"id": "L1", "from": 1, "to": 99, "x": 0.1, "f_max": 10}],
            "demand": [[0.0], [0.0]]
        }"#;
        let err = parse_instance_str(text).unwrap_err();
        assert!(matches!(err, InstanceError::Reference(ref m) if m.contains("99")), "{err}");
    }

    #[test]
    fn schema_error_names_location() {
        let text = r#"{"buses": [{"id": "one"}], "demand": []}"#;
        match parse_instance_str(text).unwrap_err() {
            InstanceError::Schema { location, .. } => assert!(location.starts_with("buses[0].id"), "{location}"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn shed_factor_out_of_range_is_reported() {
        let mut inst = parse_instance_str(minimal()).unwrap();
        inst.shed_factor = Some(vec![vec![1.5]]);
        let f = validate_instance(&inst);
        assert!(f.iter().any(|f| f.message == "shed factor out of [0,1]"));
    }

    #[test]
    fn shared_port_bus_is_reported() {
        let mut inst = parse_instance_str(minimal()).unwrap();
        inst.ports = vec![
            Port { id: 1, bus: 1, poc: 2, pdc: 4 },
            Port { id: 2, bus: 1, poc: 2, pdc: 4 },
        ];
        let f = validate_instance(&inst);
        assert!(f.iter().any(|f| f.message == "port-bus mapping not injective"));
    }

    #[test]
    fn missing_demand_hours_are_findings() {
        let mut inst = parse_instance_str(minimal()).unwrap();
        inst.horizon = 3;
        assert!(validate_instance(&inst).iter().any(|f| f.invariant == "demand-shape"));
    }

    fn with_ports(n: u32) -> Instance {
        let mut inst = parse_instance_str(minimal()).unwrap();
        inst.buses = (1..=n).map(|id| Bus { id, reference: id == 1, theta_max: 1.0 }).collect();
        inst.demand = vec![vec![0.0]; n as usize];
        inst.ports = (1..=n).map(|id| Port { id, bus: id, poc: 2, pdc: 4 }).collect();
        inst
    }

    #[test]
    fn full_route_set_has_n_times_n_minus_one_pairs() {
        let inst = with_ports(4);
        let r = routes(&inst);
        assert_eq!(r.len(), 12);
        assert!(r.iter().all(|(a, b)| a != b));
        assert_eq!(r, routes(&inst));
        assert_eq!(routes(&with_ports(2)), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn restricted_routes_are_respected() {
        let mut inst = with_ports(3);
        inst.routes = Some(vec![[3, 2], [2, 3], [2, 2]]);
        assert_eq!(routes(&inst), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn travel_time_overrides_take_precedence() {
        let ship: Ship = serde_json::from_str(
            r#"{"id": "PS1", "initial_port": 1, "generation": {"b": 15.4708, "p_max": 80},
                "sailing_cost": 250, "entering_cost": 200, "departure_cost": 235, "waiting_cost": 55,
                "travel_time": 3, "travel_times": [{"from": 1, "to": 2, "hours": 5}]}"#,
        )
        .unwrap();
        assert_eq!(ship.travel_hours(1, 2), Some(5));
        assert_eq!(ship.travel_hours(2, 1), Some(3));
    }
}
