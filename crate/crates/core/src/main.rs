use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mesc_core::gcuc::CostModel;
use mesc_core::instance::{parse_instance, usability_warnings, validate_instance, Instance};
use mesc_core::orchestrator::output::{format_table, read_report, write_outputs};
use mesc_core::orchestrator::{
    build_approach_model, compare_approaches, Approach, ComparisonRow, OrchestratorError, RunOptions, ScheduleReport,
};
use mesc_core::validator::check_feasibility;
use mesc_milp::{export_lp_text, MipStatus, SolverConfig};

const EXIT_OPTIMAL: u8 = 0;
const EXIT_GAP: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "mesc", version, about = "Grid scheduling with power-ship routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Relative optimality gap at which to stop.
    #[arg(long, default_value_t = 0.0)]
    gap: f64,
    /// Wall-clock limit per solve, seconds.
    #[arg(long = "time-limit", default_value_t = 2500.0)]
    time_limit: f64,
    /// Worker threads for parallel helpers.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Force a single deterministic worker.
    #[arg(long = "seed-deterministic")]
    seed_deterministic: bool,
    /// Piecewise segments for the quadratic cost term (0 drops it).
    #[arg(long = "quadratic-segments", default_value_t = 0)]
    quadratic_segments: usize,
    /// Do not start the ship models from the grid schedule with idle ships.
    #[arg(long = "cold-start")]
    cold_start: bool,
}

impl SolveArgs {
    fn options(&self) -> Result<RunOptions, String> {
        if !(self.gap >= 0.0) || !(self.time_limit >= 0.0) {
            return Err("--gap and --time-limit must be non-negative".into());
        }
        let threads = if self.seed_deterministic { 1 } else { self.threads.max(1) };
        let solver = SolverConfig { threads, ..SolverConfig::default() }.with_gap(self.gap).with_time_limit(self.time_limit);
        let cost_model = match self.quadratic_segments {
            0 => CostModel::LinearOnly,
            segments => CostModel::Piecewise { segments },
        };
        Ok(RunOptions { solver, cost_model, big_m: None, cold_start: self.cold_start })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one approach.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        approach: Approach,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve several approaches and tabulate them.
    Compare {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated list, e.g. gcuc,mesc-i,mesc-sq,mesc-is.
        #[arg(long, value_delimiter = ',', default_value = "gcuc,mesc-i,mesc-sq,mesc-is")]
        approaches: Vec<Approach>,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the model of an approach in LP format.
    ExportLp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        approach: Approach,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an instance and optionally a solution report against it.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<Instance, u8> {
    parse_instance(path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })
}

fn status_code(status: &str) -> u8 {
    match status {
        s if s == MipStatus::Optimal.as_str() => EXIT_OPTIMAL,
        s if s == MipStatus::FeasibleGap.as_str() => EXIT_GAP,
        _ => EXIT_INFEASIBLE,
    }
}

fn report_error(e: OrchestratorError) -> u8 {
    eprintln!("error: {e}");
    match e {
        OrchestratorError::Instance(_) | OrchestratorError::Invalid(_) | OrchestratorError::UnknownApproach(_) => {
            EXIT_INPUT
        }
        OrchestratorError::NoApproaches => EXIT_INPUT,
        _ => EXIT_INFEASIBLE,
    }
}

fn finish(reports: &[ScheduleReport], out: &Path) -> Result<u8, u8> {
    let gcuc = reports.iter().find(|r| r.approach == Approach::Gcuc.label()).and_then(|r| r.objective);
    let rows: Vec<ComparisonRow> = reports.iter().map(|r| ComparisonRow::from_report(r, gcuc)).collect();
    write_outputs(out, reports, &rows).map_err(report_error)?;
    print!("{}", format_table(&rows));
    Ok(reports.iter().map(|r| status_code(&r.status)).max().unwrap_or(EXIT_OPTIMAL))
}

fn run(cli: Cli) -> Result<u8, u8> {
    match cli.command {
        Command::Solve { instance, approach, solve, out } => {
            let inst = load(&instance)?;
            let opts = solve.options().map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            let cmp = compare_approaches(&inst, &opts, &[approach]).map_err(report_error)?;
            finish(&cmp.reports, &out)
        }
        Command::Compare { instance, approaches, solve, out } => {
            let inst = load(&instance)?;
            let opts = solve.options().map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            let cmp = compare_approaches(&inst, &opts, &approaches).map_err(report_error)?;
            finish(&cmp.reports, &out)
        }
        Command::ExportLp { instance, approach, solve, out } => {
            let inst = load(&instance)?;
            let opts = solve.options().map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            let built = build_approach_model(&inst, approach, &opts).map_err(report_error)?;
            export_lp_text(&built.model, &out).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            println!(
                "wrote {} ({} variables, {} rows)",
                out.display(),
                built.model.num_variables(),
                built.model.num_constraints()
            );
            Ok(EXIT_OPTIMAL)
        }
        Command::Validate { instance, solution } => {
            let inst = load(&instance)?;
            let findings = validate_instance(&inst);
            for f in &findings {
                println!("error {f}");
            }
            for w in usability_warnings(&inst) {
                println!("warning {w}");
            }
            if !findings.is_empty() {
                return Err(EXIT_INPUT);
            }
            println!("instance ok: {} buses, {} ports, {} ships, {} hours", inst.buses.len(), inst.ports.len(), inst.ships.len(), inst.horizon);
            let Some(path) = solution else { return Ok(EXIT_OPTIMAL) };
            let report = read_report(&path).map_err(report_error)?;
            let v = check_feasibility(&inst, &report).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INPUT
            })?;
            println!("{v}");
            if let Some(obj) = report.objective {
                println!("reported objective {obj:.6}");
            }
            Ok(if v.passed { EXIT_OPTIMAL } else { EXIT_INFEASIBLE })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OPTIMAL });
        }
    };
    match run(cli) {
        Ok(code) | Err(code) => ExitCode::from(code),
    }
}
