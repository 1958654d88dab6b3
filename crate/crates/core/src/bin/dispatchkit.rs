//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 parse or input error, 2 infeasible (and
//! `check` on a deficit), 3 numerical failure, 4 `check` below the fleet
//! minimum, 5 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dispatchkit::analysis::{
    pareto_frontier, sweep_demand, sweep_lambda, uniform_lambda_grid, SweepParameter, SweepSpec,
    DEFAULT_DEMAND_STEP, DEFAULT_LAMBDA_STEP,
};
use dispatchkit::plot::{frontier_chart, sweep_chart};
use dispatchkit::problem_file::parse_problem;
use dispatchkit::table::{fmt_num, write_atomic, ResultTable};
use dispatchkit::{
    classify_regime, solve_cost_dispatch, solve_multiobjective, solve_resilience_dispatch,
    DispatchError, DispatchProblem, Regime, SolverConfig, TOL_ENV_VAR,
};

#[derive(Parser)]
#[command(
    name = "dispatchkit",
    version,
    about = "Shortage-energy dispatch for contracted generators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the problem's feasibility regime.
    Check {
        problem: PathBuf,
        /// Override the file's demand_e_kwh.
        #[arg(long)]
        demand: Option<f64>,
    },
    /// Solve one dispatch problem.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        demand: Option<f64>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep lambda (weighted dispatch) or demand (least-cost dispatch).
    Sweep {
        problem: PathBuf,
        #[arg(long, value_enum)]
        param: Param,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG plot of per-customer energies.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        demand: Option<f64>,
    },
    /// Trace the cost/energy frontier over a uniform lambda grid.
    Pareto {
        problem: PathBuf,
        #[arg(long, default_value_t = 101)]
        grid_size: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        demand: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cost,
    Resilience,
    Multi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    Lambda,
    Demand,
}

enum Failure {
    Input(String),
    Infeasible(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Infeasible(m) | Failure::Numerical(m) | Failure::Io(m) => {
                m
            }
        }
    }
}

impl From<DispatchError> for Failure {
    fn from(e: DispatchError) -> Self {
        match e {
            DispatchError::InputDomain(_) => Failure::Input(e.to_string()),
            DispatchError::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            DispatchError::Numerical(_) => Failure::Numerical(e.to_string()),
        }
    }
}

fn load(path: &Path, lambda: Option<f64>, demand: Option<f64>) -> Result<DispatchProblem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut problem =
        parse_problem(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if let Some(l) = lambda {
        problem = problem
            .with_lambda(l)
            .map_err(|e| Failure::Input(format!("--lambda: {e}")))?;
    }
    if let Some(d) = demand {
        problem = problem
            .with_demand(d)
            .map_err(|e| Failure::Input(format!("--demand: {e}")))?;
    }
    Ok(problem)
}

fn solver_config() -> Result<SolverConfig, Failure> {
    let mut cfg = SolverConfig::default();
    if let Ok(raw) = std::env::var(TOL_ENV_VAR) {
        cfg.bisection_tol = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{TOL_ENV_VAR}: not a number: {raw:?}")))?;
        cfg.validate()
            .map_err(|e| Failure::Input(format!("{TOL_ENV_VAR}: {e}")))?;
    }
    Ok(cfg)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    write_atomic(path, contents)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn check(problem: &DispatchProblem) -> u8 {
    let r = classify_regime(problem);
    let (basis, code) = match r.regime {
        Regime::EqualityFeasible => (
            "T*sum(p_min) <= demand <= T*sum(p_max): the market-clearing equality is feasible and the least-cost dispatch has a global optimum",
            0,
        ),
        Regime::Deficit => (
            "T*sum(p_max) < demand: fleet capacity cannot cover the shortage, the market-clearing equality has an empty feasible set; use the relaxed weighted dispatch",
            2,
        ),
        Regime::BelowMinimum => (
            "demand < T*sum(p_min): every customer must run at least its minimum, so the fleet over-supplies the shortage",
            4,
        ),
    };
    println!("regime: {}", r.regime);
    println!("capacity_min_kwh: {}", fmt_num(r.capacity_min));
    println!("capacity_max_kwh: {}", fmt_num(r.capacity_max));
    println!("demand_kwh: {}", fmt_num(r.demand_e));
    println!("basis: {basis}");
    code
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { problem, demand } => Ok(check(&load(&problem, None, demand)?)),
        Command::Solve {
            problem,
            mode,
            lambda,
            demand,
            out,
        } => {
            let p = load(&problem, lambda, demand)?;
            let cfg = solver_config()?;
            let sol = match mode {
                Mode::Cost => solve_cost_dispatch(&p, &cfg)?,
                Mode::Resilience => solve_resilience_dispatch(&p, &cfg)?,
                Mode::Multi => solve_multiobjective(&p, &cfg)?,
            };
            let csv = ResultTable::from_solution(&p, &sol).to_csv_string();
            match out {
                Some(path) => write_file(&path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            eprintln!("kkt_residual: {:e}", sol.kkt_residual);
            for (c, s) in p.customers().iter().zip(&sol.bound_status) {
                eprintln!("status {}: {s}", c.id());
            }
            Ok(0)
        }
        Command::Sweep {
            problem,
            param,
            start,
            stop,
            step,
            out,
            plot,
            lambda,
            demand,
        } => {
            let p = load(&problem, lambda, demand)?;
            let cfg = solver_config()?;
            let spec = match param {
                Param::Lambda => SweepSpec::new(
                    SweepParameter::Lambda,
                    start.unwrap_or(0.0),
                    stop.unwrap_or(1.0),
                    step.unwrap_or(DEFAULT_LAMBDA_STEP),
                )?,
                Param::Demand => SweepSpec::new(
                    SweepParameter::Demand,
                    start.unwrap_or_else(|| p.capacity_min()),
                    stop.unwrap_or_else(|| p.capacity_max()),
                    step.unwrap_or(DEFAULT_DEMAND_STEP),
                )?,
            };
            let result = match param {
                Param::Lambda => sweep_lambda(&p, &spec, &cfg)?,
                Param::Demand => sweep_demand(&p, &spec, &cfg)?,
            };
            write_file(
                &out,
                ResultTable::from_sweep(&p, &result)
                    .to_csv_string()
                    .as_bytes(),
            )?;
            if let Some(path) = plot {
                write_file(&path, sweep_chart(&p, &result).to_svg().as_bytes())?;
            }
            for b in &result.breakpoints {
                let who: Vec<String> = b
                    .changes
                    .iter()
                    .map(|c| format!("{} {}->{}", p.customers()[c.customer].id(), c.from, c.to))
                    .collect();
                eprintln!(
                    "breakpoint {}={}: {}",
                    spec.parameter.column_name(),
                    fmt_num(b.value),
                    who.join(", ")
                );
            }
            Ok(0)
        }
        Command::Pareto {
            problem,
            grid_size,
            out,
            plot,
            demand,
        } => {
            let p = load(&problem, None, demand)?;
            let cfg = solver_config()?;
            let grid = uniform_lambda_grid(grid_size)?;
            let points = pareto_frontier(&p, &grid, &cfg)?;
            write_file(
                &out,
                ResultTable::from_frontier(&points)
                    .to_csv_string()
                    .as_bytes(),
            )?;
            if let Some(path) = plot {
                write_file(&path, frontier_chart(&points).to_svg().as_bytes())?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
