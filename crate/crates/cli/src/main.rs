use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pqlap_cli::{render, render_plot_data, run, write_atomic, CliError, Command, Format, ParamSet, Report, RunConfig};

#[derive(Parser)]
#[command(
    name = "pqlap",
    version,
    about = "Regime classification and numerical checks for (p,q)-Laplacian equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide which theorem applies to one instance.
    Classify(RunArgs),
    /// Select the Bernstein exponent b and check it against a grid oracle.
    SearchB(RunArgs),
    /// Admissible (γ, α) window of the Ishii–Lions argument.
    IlWindow(RunArgs),
    /// Run the finite-difference identity catalog.
    VerifyIdentities(RunArgs),
    /// Solve the radial problem on an annulus and fit the gradient growth.
    SolveRadial(RunArgs),
    /// Expand parameter grids and run `task` at every point.
    Sweep(RunArgs),
    /// Extract a plot series from a JSON report.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Parameter file (`key = value` lines).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Inline parameter, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the trinomial oracle instead of the literal case C windows.
    #[arg(long)]
    optimal_search: bool,
    /// Tolerance override, e.g. `solver_tol=1e-9`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Record wall-clock time per item (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// JSON report written by another subcommand.
    #[arg(long)]
    report: PathBuf,
    /// One of gradient_profile, solution, trinomial, il_window.
    #[arg(long)]
    selector: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn config_of(command: Command, args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut params = match &args.params {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            ParamSet::parse(&text).map_err(|e| match e {
                CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
                other => other,
            })?
        }
        None => ParamSet::default(),
    };
    for s in &args.set {
        params.set_inline(s)?;
    }
    let mut config = RunConfig::new(command, params);
    config.format = args.format;
    config.jobs = args.jobs;
    config.seed = args.seed;
    config.optimal_search = args.optimal_search;
    config.timing = args.timing;
    for t in &args.tol {
        config.set_tolerance(t)?;
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let (command, args) = match cli.command {
        Cmd::Classify(a) => (Command::Classify, a),
        Cmd::SearchB(a) => (Command::SearchB, a),
        Cmd::IlWindow(a) => (Command::IlWindow, a),
        Cmd::VerifyIdentities(a) => (Command::VerifyIdentities, a),
        Cmd::SolveRadial(a) => (Command::SolveRadial, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Plot(p) => {
            let text = std::fs::read_to_string(&p.report)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.report.display())))?;
            let report: Report = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: not a JSON report: {e}", p.report.display())))?;
            emit(p.out.as_ref(), &render_plot_data(&report, &p.selector)?)?;
            return Ok(0);
        }
    };
    let config = config_of(command, &args)?;
    let report = run(&config)?;
    emit(args.out.as_ref(), &render(&report, config.format)?)?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
