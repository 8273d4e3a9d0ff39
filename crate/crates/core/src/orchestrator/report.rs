//! Serializable schedule reports and comparison rows.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub grid_energy: f64,
    pub grid_startup_shutdown: f64,
    pub shed_penalty: f64,
    pub ship_sailing: f64,
    pub ship_entering: f64,
    pub ship_departure: f64,
    pub ship_waiting: f64,
    pub ship_energy: f64,
    pub ship_startup_shutdown: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn sum_items(&self) -> f64 {
        self.grid_energy
            + self.grid_startup_shutdown
            + self.shed_penalty
            + self.ship_sailing
            + self.ship_entering
            + self.ship_departure
            + self.ship_waiting
            + self.ship_energy
            + self.ship_startup_shutdown
    }

    pub fn ship_total(&self) -> f64 {
        self.ship_sailing
            + self.ship_entering
            + self.ship_departure
            + self.ship_waiting
            + self.ship_energy
            + self.ship_startup_shutdown
    }
}

/// One solve inside an approach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub name: String,
    pub status: String,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSchedule {
    pub id: String,
    pub bus: u32,
    pub status: Vec<u8>,
    pub startup: Vec<u8>,
    pub shutdown: Vec<u8>,
    /// MW.
    pub output: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShipSchedule {
    pub id: String,
    /// Port id per row of the `[port][hour]` arrays.
    pub ports: Vec<u32>,
    /// Port-id pair per row of `sailing`.
    pub arcs: Vec<[u32; 2]>,
    /// `"3"` at port 3, `"3>4"` while sailing from 3 to 4.
    pub location: Vec<String>,
    pub located: Vec<Vec<u8>>,
    pub sailing: Vec<Vec<u8>>,
    pub operating: Vec<Vec<u8>>,
    pub waiting: Vec<Vec<u8>>,
    pub departed: Vec<Vec<u8>>,
    pub entered: Vec<Vec<u8>>,
    /// `[port][hour]`, MW.
    pub output: Vec<Vec<f64>>,
    pub startup: Vec<u8>,
    pub shutdown: Vec<u8>,
}

impl ShipSchedule {
    /// Total output per hour, MW.
    pub fn total_output(&self) -> Vec<f64> {
        let h = self.location.len();
        (0..h).map(|t| self.output.iter().map(|row| row[t]).sum()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub instance: String,
    pub approach: String,
    pub status: String,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall_time: f64,
    /// Segments of the piecewise quadratic cost, if used.
    pub quadratic_segments: Option<usize>,
    pub stages: Vec<StageSummary>,
    pub horizon: usize,
    pub units: Vec<UnitSchedule>,
    pub ships: Vec<ShipSchedule>,
    /// `[line][hour]`, MW.
    pub flows: Vec<Vec<f64>>,
    /// `[bus][hour]`, radians.
    pub angles: Vec<Vec<f64>>,
    /// `[bus][hour]`, MW.
    pub shed: Vec<Vec<f64>>,
    pub cost: CostBreakdown,
}

impl ScheduleReport {
    pub fn has_schedule(&self) -> bool {
        self.objective.is_some()
    }

    pub fn shed_mwh(&self) -> f64 {
        self.shed.iter().flatten().fold(0.0, |a, b| a + b)
    }

    pub fn ship_mwh(&self) -> f64 {
        self.ships.iter().flat_map(|s| s.output.iter().flatten()).fold(0.0, |a, b| a + b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub approach: String,
    pub status: String,
    pub objective: Option<f64>,
    pub gap: Option<f64>,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub wall_time: f64,
    pub shed_mwh: f64,
    pub ship_mwh: f64,
    pub ship_cost: f64,
    /// GCUC objective minus this objective; absent without a GCUC row.
    pub saving_vs_gcuc: Option<f64>,
}

impl ComparisonRow {
    pub fn from_report(r: &ScheduleReport, gcuc_objective: Option<f64>) -> Self {
        ComparisonRow {
            approach: r.approach.clone(),
            status: r.status.clone(),
            objective: r.objective,
            gap: r.gap,
            nodes: r.nodes,
            lp_iterations: r.lp_iterations,
            wall_time: r.wall_time,
            shed_mwh: r.shed_mwh(),
            ship_mwh: r.ship_mwh(),
            ship_cost: r.cost.ship_total(),
            saving_vs_gcuc: gcuc_objective.zip(r.objective).map(|(g, o)| g - o),
        }
    }
}
