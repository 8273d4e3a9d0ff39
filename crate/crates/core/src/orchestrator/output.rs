//! Report files: `report.json`, `summary.csv`, `timeline.csv` and a text table.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::report::{ComparisonRow, ScheduleReport};
use super::{OrchestratorError, Result};

fn io_err(path: &Path, e: impl std::fmt::Display) -> OrchestratorError {
    OrchestratorError::Output(format!("{}: {e}", path.display()))
}

pub fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn write_summary_csv(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    let header = [
        "approach",
        "status",
        "objective",
        "gap",
        "nodes",
        "lp_iterations",
        "wall_time_s",
        "shed_mwh",
        "ship_mwh",
        "ship_cost",
        "saving_vs_gcuc",
    ];
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record([
            r.approach.clone(),
            r.status.clone(),
            fmt_opt(r.objective),
            fmt_opt(r.gap),
            r.nodes.to_string(),
            r.lp_iterations.to_string(),
            format!("{:.3}", r.wall_time),
            format!("{:.6}", r.shed_mwh),
            format!("{:.6}", r.ship_mwh),
            format!("{:.6}", r.ship_cost),
            fmt_opt(r.saving_vs_gcuc),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// One row per approach and hour with location (`L`) and output (`P`) per ship.
pub fn write_timeline_csv(path: &Path, reports: &[ScheduleReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    let ship_ids: Vec<String> = reports.iter().flat_map(|r| r.ships.iter().map(|s| s.id.clone())).fold(
        Vec::new(),
        |mut acc, id| {
            if !acc.contains(&id) {
                acc.push(id);
            }
            acc
        },
    );
    let mut header = vec!["approach".to_string(), "hour".to_string()];
    for id in &ship_ids {
        header.push(format!("{id}_L"));
        header.push(format!("{id}_P"));
    }
    w.write_record(&header).map_err(|e| io_err(path, e))?;
    for r in reports.iter().filter(|r| r.has_schedule()) {
        let totals: Vec<Vec<f64>> = r.ships.iter().map(|s| s.total_output()).collect();
        for t in 0..r.horizon {
            let mut rec = vec![r.approach.clone(), (t + 1).to_string()];
            for id in &ship_ids {
                match r.ships.iter().position(|s| &s.id == id) {
                    Some(k) => {
                        rec.push(r.ships[k].location[t].clone());
                        let p = totals[k][t];
                        rec.push(format!("{:.4}", if p.abs() < 5e-5 { 0.0 } else { p }));
                    }
                    None => {
                        rec.push(String::new());
                        rec.push(String::new());
                    }
                }
            }
            w.write_record(&rec).map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Human-readable comparison table.
pub fn format_table(rows: &[ComparisonRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:<13} {:>16} {:>10} {:>8} {:>10} {:>9} {:>10} {:>10} {:>12} {:>14}",
        "approach", "status", "objective", "gap %", "nodes", "iters", "time s", "shed MWh", "ship MWh", "ship cost", "saving"
    );
    for r in rows {
        let obj = r.objective.map_or("-".to_string(), |o| format!("{o:.2}"));
        let gap = r.gap.map_or("-".to_string(), |g| format!("{:.4}", 100.0 * g));
        let saving = r.saving_vs_gcuc.map_or("-".to_string(), |s| format!("{s:.2}"));
        let _ = writeln!(
            out,
            "{:<10} {:<13} {:>16} {:>10} {:>8} {:>10} {:>9.2} {:>10.3} {:>10.3} {:>12.2} {:>14}",
            r.approach, r.status, obj, gap, r.nodes, r.lp_iterations, r.wall_time, r.shed_mwh, r.ship_mwh, r.ship_cost, saving
        );
    }
    out
}

/// Writes `report.json`, `summary.csv` and `timeline.csv` into `dir`. A
/// single report is written as an object, several as an array.
pub fn write_outputs(dir: &Path, reports: &[ScheduleReport], rows: &[ComparisonRow]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    match reports {
        [one] => write_json(&dir.join("report.json"), one)?,
        many => write_json(&dir.join("report.json"), many)?,
    }
    write_summary_csv(&dir.join("summary.csv"), rows)?;
    write_timeline_csv(&dir.join("timeline.csv"), reports)
}

/// Reads a `report.json`, taking the first report of an array.
pub fn read_report(path: &Path) -> Result<ScheduleReport> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| io_err(path, e))?;
    let value = match value {
        serde_json::Value::Array(mut items) if !items.is_empty() => items.swap_remove(0),
        v => v,
    };
    serde_json::from_value(value).map_err(|e| io_err(path, e))
}
