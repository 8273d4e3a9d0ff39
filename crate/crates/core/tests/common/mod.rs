//! Seeded instance generators shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use mesc_core::instance::{
    parse_instance, Bus, Generator, InitialState, Instance, Line, Options, Penalties, Port, RouteTime, Ship, UnitParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn six_bus() -> Instance {
    parse_instance(&data_path("six_bus_congestion.json")).expect("bundled dataset parses")
}

pub fn twenty_bus() -> Instance {
    parse_instance(&data_path("twenty_bus_scale.json")).expect("bundled dataset parses")
}

fn round(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn unit(rng: &mut ChaCha8Rng, p_max: f64) -> UnitParams {
    let p_min = round(rng.gen_range(0.0..0.4) * p_max);
    UnitParams {
        a: round(rng.gen_range(0.0..60.0)),
        b: round(rng.gen_range(10.0..40.0)),
        c: 0.0,
        p_min,
        p_max,
        ramp_up: None,
        ramp_down: None,
        startup_cost: round(rng.gen_range(0.0..80.0)),
        shutdown_cost: 0.0,
        min_up: rng.gen_range(1..=2),
        min_down: rng.gen_range(1..=2),
        initial: InitialState::default(),
    }
}

fn buses(n: u32) -> Vec<Bus> {
    (1..=n).map(|id| Bus { id, reference: id == 1, theta_max: std::f64::consts::PI }).collect()
}

fn line(id: usize, from: u32, to: u32, x: f64, f_max: f64) -> Line {
    Line { id: format!("L{id}"), from, to, x, f_max }
}

fn empty(name: String, horizon: usize, n_bus: u32) -> Instance {
    Instance {
        name,
        base_mva: 100.0,
        horizon,
        buses: buses(n_bus),
        lines: Vec::new(),
        generators: Vec::new(),
        ports: Vec::new(),
        ships: Vec::new(),
        demand: vec![vec![0.0; horizon]; n_bus as usize],
        shed_factor: None,
        routes: None,
        penalties: Penalties::default(),
        options: Options::default(),
    }
}

/// Single bus, three units, four hours: twelve commitment binaries.
pub fn commitment_only(seed: u64) -> Instance {
    let mut r = rng(seed);
    let mut inst = empty(format!("commitment-{seed}"), 4, 1);
    for k in 0..3 {
        let p_max = round(r.gen_range(30.0..80.0));
        inst.generators.push(Generator { id: format!("G{}", k + 1), bus: 1, params: unit(&mut r, p_max) });
    }
    inst.demand[0] = (0..4).map(|_| round(r.gen_range(20.0..120.0))).collect();
    inst
}

/// Triangle network with two units and a load bus, three hours.
pub fn network_only(seed: u64) -> Instance {
    let mut r = rng(seed);
    let mut inst = empty(format!("network-{seed}"), 3, 3);
    inst.lines = vec![
        line(1, 1, 2, round(r.gen_range(0.05..0.3)), round(r.gen_range(20.0..60.0))),
        line(2, 1, 3, round(r.gen_range(0.05..0.3)), round(r.gen_range(20.0..60.0))),
        line(3, 2, 3, round(r.gen_range(0.05..0.3)), round(r.gen_range(20.0..60.0))),
    ];
    for (k, bus) in [1u32, 2].into_iter().enumerate() {
        let p_max = round(r.gen_range(40.0..90.0));
        inst.generators.push(Generator { id: format!("G{}", k + 1), bus, params: unit(&mut r, p_max) });
    }
    inst.demand[2] = (0..3).map(|_| round(r.gen_range(30.0..100.0))).collect();
    inst.demand[0] = (0..3).map(|_| round(r.gen_range(0.0..20.0))).collect();
    inst
}

pub fn ship(rng: &mut ChaCha8Rng, id: &str, initial_port: u32, ports: &[u32]) -> Ship {
    let p_max = round(rng.gen_range(20.0..60.0));
    let mut generation = unit(rng, p_max);
    generation.min_up = 1;
    generation.min_down = 1;
    generation.shutdown_cost = round(rng.gen_range(0.0..50.0));
    let mut travel_times = Vec::new();
    for &i in ports {
        for &j in ports {
            if i != j {
                travel_times.push(RouteTime { from: i, to: j, hours: rng.gen_range(1..=3) });
            }
        }
    }
    Ship {
        id: id.to_string(),
        initial_port,
        generation,
        sailing_cost: round(rng.gen_range(5.0..60.0)),
        entering_cost: round(rng.gen_range(5.0..60.0)),
        departure_cost: round(rng.gen_range(5.0..60.0)),
        waiting_cost: round(rng.gen_range(1.0..20.0)),
        port_costs: Vec::new(),
        travel_time: None,
        travel_times,
    }
}

/// Two ports, one ship with one-hour crossings and no thermal units.
pub fn one_ship(seed: u64) -> Instance {
    let mut r = rng(seed);
    let mut inst = empty(format!("one-ship-{seed}"), 3, 2);
    inst.lines = vec![line(1, 1, 2, 0.1, round(r.gen_range(5.0..30.0)))];
    inst.ports = vec![Port { id: 1, bus: 1, poc: 1, pdc: 4 }, Port { id: 2, bus: 2, poc: 1, pdc: 4 }];
    let mut s = ship(&mut r, "PS1", 1, &[1, 2]);
    s.travel_times.iter_mut().for_each(|t| t.hours = 1);
    inst.ships.push(s);
    inst.demand[1] = (0..3).map(|_| round(r.gen_range(0.0..40.0))).collect();
    inst.penalties.shed = round(r.gen_range(40.0..120.0));
    inst
}

/// Three ports on a triangle network, one thermal unit, one or two ships.
pub fn random_maritime(seed: u64) -> Instance {
    let mut r = rng(seed);
    let horizon = r.gen_range(6..=8);
    let mut inst = empty(format!("maritime-{seed}"), horizon, 3);
    inst.lines = vec![
        line(1, 1, 2, round(r.gen_range(0.05..0.3)), round(r.gen_range(10.0..50.0))),
        line(2, 2, 3, round(r.gen_range(0.05..0.3)), round(r.gen_range(10.0..50.0))),
        line(3, 1, 3, round(r.gen_range(0.05..0.3)), round(r.gen_range(10.0..50.0))),
    ];
    let mut g = unit(&mut r, 150.0);
    g.p_min = 0.0;
    g.initial = InitialState { on: true, hours: 1, output: 0.0 };
    inst.generators.push(Generator { id: "G1".into(), bus: 1, params: g });
    let ports = [1u32, 2, 3];
    inst.ports = ports.iter().map(|&p| Port { id: p, bus: p, poc: r.gen_range(1..=2), pdc: r.gen_range(1..=3) }).collect();
    for k in 0..r.gen_range(1..=2) {
        let start = ports[r.gen_range(0..3)];
        inst.ships.push(ship(&mut r, &format!("PS{}", k + 1), start, &ports));
    }
    for b in 1..3 {
        inst.demand[b] = (0..horizon).map(|_| round(r.gen_range(5.0..60.0))).collect();
    }
    inst.penalties.shed = round(r.gen_range(80.0..300.0));
    inst
}
