//! `adaptmesh`: adaptive-mesh approximate-Picard solver on the built-in problems.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use adaptmesh::oracle::{self, max_local_error};
use adaptmesh::{adapt_mesh_solve, AuxStepRule, Error, SolverConfig};
use adaptmesh_cli::exit_code;
use adaptmesh_cli::order::{order_check, Mode};
use adaptmesh_cli::output::{write_mesh_csv, TrajectoryDoc};
use adaptmesh_cli::table::{run_table, write_csv, TableSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};

const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Parser)]
#[command(version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one registry problem and report m*, MAXERR and evaluation counts
    Solve(SolveArgs),
    /// Adaptive vs uniform mesh over a grid of (delta, eps, r)
    Table(TableArgs),
    /// Fit empirical orders
    OrderCheck(OrderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Experiment,
    Theory,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuxRule {
    RoundoffPower,
    EpsPower,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderMode {
    Local,
    Global,
    MeshScaling,
}

/// Integers written as reals, e.g. `1e6`.
fn count(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("expected a non-negative integer, got {s}"))
    }
}

fn order(s: &str) -> Result<usize, String> {
    count(s).map(|v| v as usize)
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "experiment")]
    preset: Preset,
    #[arg(long, value_enum, default_value = "roundoff-power")]
    aux_rule: AuxRule,
    /// Probe length for `--aux-rule fixed`
    #[arg(long)]
    aux_step: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    varphi: f64,
    /// Defaults to the preset's value for the order
    #[arg(long)]
    bar_beta: Option<f64>,
    #[arg(long, value_parser = count, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: u64,
    /// Allow --max-steps above one million
    #[arg(long)]
    allow_huge: bool,
}

impl SolverArgs {
    fn config(&self, epsilon: f64, order: usize) -> Result<SolverConfig, Error> {
        if self.max_steps > DEFAULT_MAX_STEPS && !self.allow_huge {
            return Err(Error::InvalidArgument(format!(
                "--max-steps {} exceeds {DEFAULT_MAX_STEPS}; pass --allow-huge",
                self.max_steps
            )));
        }
        let rule = match self.aux_rule {
            AuxRule::RoundoffPower => AuxStepRule::roundoff_power(),
            AuxRule::EpsPower => AuxStepRule::EpsPower,
            AuxRule::Fixed => AuxStepRule::Fixed {
                value: self.aux_step.ok_or_else(|| {
                    Error::InvalidArgument("--aux-rule fixed needs --aux-step".into())
                })?,
            },
        };
        let mut cfg = match self.preset {
            Preset::Experiment => SolverConfig::new(epsilon, order),
            Preset::Theory => SolverConfig::theory(epsilon, order, self.beta, self.varphi),
        }
        .with_aux_rule(rule)
        .with_max_steps(self.max_steps);
        cfg.beta = self.beta;
        cfg.varphi = self.varphi;
        cfg.bar_beta = self.bar_beta;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: String,
    /// Initial offset of the test problem
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_parser = order)]
    order: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Trajectory file; nothing is written without it
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value = "test")]
    problem: String,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.01])]
    deltas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-4, 1e-8])]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = order, default_values_t = [1, 2])]
    orders: Vec<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = order, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, value_enum)]
    mode: OrderMode,
    #[arg(long, value_delimiter = ',', value_parser = order, default_values_t = [1, 2, 3])]
    orders: Vec<usize>,
    /// Tolerances (mesh-scaling mode)
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Interval counts (local and global modes)
    #[arg(long, value_delimiter = ',', value_parser = count)]
    m: Vec<u64>,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Shortest decimal with at most three places: 0.22, 0.246.
fn short(x: f64) -> String {
    let s = format!("{x:.3}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("cannot write output: {e}"))
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_error)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn solve(args: &SolveArgs) -> Result<(), Error> {
    let cfg = args.solver.config(args.eps, args.order)?;
    let reg = oracle::lookup(&args.problem, args.delta)?;
    let traj = adapt_mesh_solve(&reg.problem, &cfg)?;
    let maxerr = max_local_error(&traj, &reg.oracle, false)?;
    println!(
        "m*={} maxerr_over_eps={} maxerr={:e} f_evals={} f_evals_distinct={}",
        traj.intervals(),
        short(maxerr / args.eps),
        maxerr,
        traj.f_evals,
        traj.f_evals_distinct
    );
    if let Some(path) = &args.output {
        let mut out = BufWriter::new(File::create(path).map_err(io_error)?);
        match args.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &TrajectoryDoc::new(&reg.id, &cfg, &traj))
                    .map_err(io_error)?
            }
            Format::Csv => write_mesh_csv(&mut out, &traj).map_err(io_error)?,
        }
        out.flush().map_err(io_error)?;
    }
    Ok(())
}

fn table(args: &TableArgs) -> Result<(), Error> {
    if args.deltas.is_empty() || args.eps.is_empty() || args.orders.is_empty() {
        return Err(Error::InvalidArgument(
            "--deltas, --eps and --orders must be nonempty".into(),
        ));
    }
    let config = args.solver.config(args.eps[0], args.orders[0])?;
    oracle::lookup(&args.problem, args.deltas[0])?;
    let spec = TableSpec {
        problem: args.problem.clone(),
        deltas: args.deltas.clone(),
        epsilons: args.eps.clone(),
        orders: args.orders.clone(),
        config,
    };
    let results = run_table(&spec, args.jobs);
    let mut last_err = None;
    for (row, err) in &results {
        if let Some(e) = err {
            eprintln!(
                "cell delta={} eps={:e} r={}: {}: {e}",
                row.delta,
                row.epsilon,
                row.r,
                e.name()
            );
            last_err = Some(e.clone());
        }
    }
    let rows: Vec<_> = results.iter().map(|(row, _)| row.clone()).collect();
    let mut out = sink(&args.output)?;
    match args.format {
        Format::Csv => write_csv(&mut out, &rows).map_err(io_error)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &rows).map_err(io_error)?;
            writeln!(out).map_err(io_error)?;
        }
    }
    out.flush().map_err(io_error)?;
    match last_err {
        Some(e) if rows.iter().all(|r| r.is_failed()) => Err(e),
        _ => Ok(()),
    }
}

fn order_check_cmd(args: &OrderArgs) -> Result<(), Error> {
    let reg = oracle::lookup(&args.problem, args.delta)?;
    let (mode, scales): (Mode, Vec<f64>) = match args.mode {
        OrderMode::Local => (Mode::Local, args.m.iter().map(|&m| m as f64).collect()),
        OrderMode::Global => (Mode::Global, args.m.iter().map(|&m| m as f64).collect()),
        OrderMode::MeshScaling => (Mode::MeshScaling, args.eps.clone()),
    };
    let eps = match mode {
        Mode::MeshScaling => scales.first().copied().unwrap_or(1e-2),
        _ => 1e-2,
    };
    let base = args.solver.config(eps, 1)?;
    for fit in order_check(&reg, mode, &args.orders, &scales, &base)? {
        for (s, e) in &fit.samples {
            println!("r={} scale={s:.16e} value={e:.16e}", fit.order);
        }
        println!("r={} slope={:.4}", fit.order, fit.slope);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Table(a) => table(a),
        Command::OrderCheck(a) => order_check_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
