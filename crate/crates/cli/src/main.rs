//! Command-line front end: run the concentration pipelines, reproduce the
//! success-probability sweeps as CSV, execute `.circ` files, and run the
//! validation suite.
//!
//! Exit codes: 0 ok, 1 validation or runtime failure, 2 degenerate
//! parameters, 3 circuit assertion failure, 64 usage, 65 circuit parse error,
//! 66 missing file, 74 output I/O error.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ecsim::dsl::{execute_circuit, parse_circuit, ExecError, ExecutionReport};
use ecsim::protocols::{
    run_ecp1, run_ecp2, Ecp1Params, Ecp2Params, ProtocolReport, ThetaParams,
};
use ecsim::sweep::{sweep_csv, SweepProtocol, SweepSpec};
use ecsim::validate::run_all_checks;
use ecsim::SimError;

const EXIT_FAILURE: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_ASSERTION: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(
    name = "ecsim",
    version,
    about = "Exact simulator of coherent-state concentration circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one concentration pipeline and print its report
    Run(RunArgs),
    /// Sweep the first pipeline's success probability over beta
    SweepEcp1(SweepEcp1Args),
    /// Sweep the second pipeline's success probability over (theta1, theta2)
    SweepEcp2(SweepEcp2Args),
    /// Run the self-check suite comparing closed forms to the exact engine
    Validate(ValidateArgs),
    /// Parse and execute a .circ circuit file
    Exec(ExecArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Ecp1,
    Ecp2,
}

#[derive(Args)]
struct RunArgs {
    /// Which pipeline to run
    protocol: Protocol,
    /// Coherent amplitude
    #[arg(long)]
    alpha: f64,
    /// First coefficient; for ecp1, gamma defaults to sqrt(1 - beta^2)
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// ecp2 alternative: angular parameterization
    #[arg(long)]
    theta1: Option<f64>,
    #[arg(long)]
    theta2: Option<f64>,
    #[arg(long)]
    theta3: Option<f64>,
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepEcp1Args {
    /// Comma-separated coherent amplitudes
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    alpha: Vec<f64>,
    /// Grid points over beta in [0, 1]
    #[arg(long, default_value_t = 201)]
    steps: usize,
    /// Output CSV path
    #[arg(long, default_value = "sweep-ecp1.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepEcp2Args {
    /// Comma-separated coherent amplitudes
    #[arg(long, value_delimiter = ',', default_value = "2")]
    alpha: Vec<f64>,
    /// Grid points per theta axis over [0, pi/2]
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Fixed theta3 in radians
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
    theta3: f64,
    /// Output CSV path
    #[arg(long, default_value = "sweep-ecp2.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Seed for the randomized checks
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct ExecArgs {
    /// Circuit file (.circ)
    path: PathBuf,
    /// Print the execution report as JSON
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap handles --help/--version as "errors" that exit 0
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::SweepEcp1(args) => cmd_sweep_ecp1(args),
        Command::SweepEcp2(args) => cmd_sweep_ecp2(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Exec(args) => cmd_exec(args),
    };
    ExitCode::from(code)
}

fn usage_error(message: &str) -> u8 {
    eprintln!("usage error: {message}");
    eprintln!("run `ecsim --help` for details");
    EXIT_USAGE
}

fn degenerate(message: impl std::fmt::Display) -> u8 {
    eprintln!("degenerate parameters: {message}");
    EXIT_DEGENERATE
}

fn cmd_run(args: RunArgs) -> u8 {
    let report = match args.protocol {
        Protocol::Ecp1 => {
            if args.delta.is_some()
                || args.eta.is_some()
                || args.theta1.is_some()
                || args.theta2.is_some()
                || args.theta3.is_some()
            {
                return usage_error("ecp1 takes only --alpha, --beta, and --gamma");
            }
            let Some(beta) = args.beta else {
                return usage_error("ecp1 needs --beta");
            };
            let gamma = match args.gamma {
                Some(g) => g,
                None if beta.abs() <= 1.0 => (1.0 - beta * beta).sqrt(),
                None => return usage_error("--gamma is required when |beta| > 1"),
            };
            let params = match Ecp1Params::new(args.alpha, beta, gamma) {
                Ok(p) => p,
                Err(err) => return degenerate(err),
            };
            if params.beta() * params.gamma() == 0.0 {
                return degenerate("beta*gamma = 0, the success probability vanishes");
            }
            match run_ecp1(&params) {
                Ok(report) => report,
                Err(err) => return degenerate(err),
            }
        }
        Protocol::Ecp2 => {
            let coefficients = [args.beta, args.gamma, args.delta, args.eta];
            let thetas = [args.theta1, args.theta2, args.theta3];
            let params = if thetas.iter().all(Option::is_some) {
                if coefficients.iter().any(Option::is_some) {
                    return usage_error("give either --theta1/2/3 or --beta/--gamma/--delta/--eta");
                }
                let theta = match ThetaParams::new(
                    args.theta1.unwrap(),
                    args.theta2.unwrap(),
                    args.theta3.unwrap(),
                ) {
                    Ok(t) => t,
                    Err(err) => return degenerate(err),
                };
                Ecp2Params::from_theta(args.alpha, &theta)
            } else if coefficients.iter().all(Option::is_some) {
                if thetas.iter().any(Option::is_some) {
                    return usage_error("give either --theta1/2/3 or --beta/--gamma/--delta/--eta");
                }
                Ecp2Params::new(
                    args.alpha,
                    args.beta.unwrap(),
                    args.gamma.unwrap(),
                    args.delta.unwrap(),
                    args.eta.unwrap(),
                )
            } else {
                return usage_error(
                    "ecp2 needs all of --theta1/--theta2/--theta3 or all of --beta/--gamma/--delta/--eta",
                );
            };
            let params = match params {
                Ok(q) => q,
                Err(err) => return degenerate(err),
            };
            if params.beta() * params.gamma() * params.delta() * params.eta() == 0.0 {
                return degenerate("beta*gamma*delta*eta = 0, the success probability vanishes");
            }
            match run_ecp2(&params) {
                Ok(report) => report,
                Err(err) => return degenerate(err),
            }
        }
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print_report(&report);
    }
    0
}

fn print_report(report: &ProtocolReport) {
    println!("protocol: {} (ecsim {})", report.protocol, report.library_version);
    println!(
        "parameters: {}",
        serde_json::to_string(&report.parameters).expect("parameters serialize")
    );
    println!();
    println!("{:<42} {:>5}  {:>12}  modes", "stage", "terms", "norm²");
    for stage in &report.stages {
        let modes: Vec<&str> = stage.modes.iter().map(|m| m.as_str()).collect();
        println!(
            "{:<42} {:>5}  {:>12.9}  {}",
            stage.name,
            stage.term_count,
            stage.norm_squared,
            modes.join(" ")
        );
    }
    println!();
    println!("p_exact        = {:.17}", report.p_exact);
    println!("p_formula      = {:.17}", report.p_formula);
    println!("final fidelity = {:.12}", report.final_fidelity);
}

fn write_output(path: &Path, contents: &str) -> u8 {
    match fs::write(path, contents) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("cannot write `{}`: {err}", path.display());
            EXIT_IO
        }
    }
}

fn cmd_sweep_ecp1(args: SweepEcp1Args) -> u8 {
    let spec = match SweepSpec::new(SweepProtocol::Ecp1, args.alpha, args.steps, 0.0) {
        Ok(spec) => spec,
        Err(err) => return degenerate(err),
    };
    let csv = match sweep_csv(&spec) {
        Ok(csv) => csv,
        Err(err) => return degenerate(err),
    };
    let code = write_output(&args.out, &csv);
    if code == 0 {
        println!(
            "wrote {} rows to {} (beta in [0,1], gamma = sqrt(1 - beta^2))",
            csv.lines().count() - 1,
            args.out.display()
        );
    }
    code
}

fn cmd_sweep_ecp2(args: SweepEcp2Args) -> u8 {
    let spec = match SweepSpec::new(SweepProtocol::Ecp2, args.alpha, args.steps, args.theta3) {
        Ok(spec) => spec,
        Err(err) => return degenerate(err),
    };
    let csv = match sweep_csv(&spec) {
        Ok(csv) => csv,
        Err(err) => return degenerate(err),
    };
    let code = write_output(&args.out, &csv);
    if code == 0 {
        println!(
            "wrote {} rows to {} (theta1, theta2 in [0, pi/2], theta3 = {})",
            csv.lines().count() - 1,
            args.out.display(),
            args.theta3
        );
    }
    code
}

fn cmd_validate(args: ValidateArgs) -> u8 {
    let results = run_all_checks(args.seed);
    let mut failures = Vec::new();
    for check in &results {
        println!(
            "{:<4} {:<45} max deviation {:>12.3e}  (tolerance {:.1e})",
            if check.passed { "ok" } else { "FAIL" },
            check.name,
            check.max_deviation,
            check.tolerance
        );
        if !check.passed {
            failures.push(check.name);
        }
    }
    if failures.is_empty() {
        println!("all {} checks passed (seed {})", results.len(), args.seed);
        0
    } else {
        eprintln!("{} check(s) failed: {}", failures.len(), failures.join(", "));
        EXIT_FAILURE
    }
}

fn cmd_exec(args: ExecArgs) -> u8 {
    let source = match fs::read_to_string(&args.path) {
        Ok(source) => source,
        Err(err) if err.kind() == ErrorKind::NotFound => {
            eprintln!("no such file: {}", args.path.display());
            return EXIT_NO_INPUT;
        }
        Err(err) => {
            eprintln!("cannot read `{}`: {err}", args.path.display());
            return EXIT_NO_INPUT;
        }
    };
    let name = args.path.display().to_string();
    let program = match parse_circuit(&source, &name) {
        Ok(program) => program,
        Err(err) => {
            eprintln!("parse error: {err}");
            return EXIT_PARSE;
        }
    };
    match execute_circuit(&program) {
        Ok(report) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print_execution(&report);
            }
            0
        }
        Err(ExecError::Assertion { line, message }) => {
            eprintln!("{name}:{line}: assertion failed: {message}");
            EXIT_ASSERTION
        }
        Err(ExecError::State { line, source: SimError::Degenerate(message) }) => {
            eprintln!("{name}:{line}: degenerate state: {message}");
            EXIT_DEGENERATE
        }
        Err(err) => {
            eprintln!("{name}:{}: {err}", err.line());
            EXIT_FAILURE
        }
    }
}

fn print_execution(report: &ExecutionReport) {
    println!("circuit: {} (alpha = {})", report.source_name, report.alpha);
    println!();
    println!("{:>4}  {:<40} {:>5}  {:>12}  probability", "line", "statement", "terms", "norm²");
    for step in &report.steps {
        let probability =
            step.probability.map(|p| format!("{p:.12}")).unwrap_or_else(|| "-".into());
        println!(
            "{:>4}  {:<40} {:>5}  {:>12.9}  {}",
            step.line, step.statement, step.term_count, step.norm_squared, probability
        );
    }
    println!();
    for snapshot in &report.snapshots {
        let fidelity =
            snapshot.fidelity.map(|f| format!("{f:.12}")).unwrap_or_else(|| "-".into());
        let modes: Vec<&str> = snapshot.modes.iter().map(|m| m.as_str()).collect();
        println!(
            "report at line {}: {} terms over [{}], norm² = {:.12}, fidelity = {}",
            snapshot.line,
            snapshot.term_count,
            modes.join(" "),
            snapshot.norm_squared,
            fidelity
        );
    }
    println!("cumulative probability = {:.17}", report.cumulative_probability);
    println!("final state: {} terms over {} modes", report.final_state.term_count(),
        report.final_state.mode_count());
}
