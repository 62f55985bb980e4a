//! `troplab`: JSON in, JSON out front end for the limit computations.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use troplab_cli::commands::{self, CliError, Config, CurveGluing, HybridGluing, Output};

#[derive(Parser)]
#[command(name = "troplab", version, about = "Gromov-Hausdorff and hybrid limits of degenerating ppavs and curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Relative tolerance for numeric decisions; must be positive.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Iteration cap for Siegel reduction.
    #[arg(long, global = true, default_value_t = troplab::siegel::DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    /// Seed for randomized steps. Every current command is deterministic, so
    /// this only pins behaviour for future use.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the command's series (if it has one) as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    emit_csv: Option<PathBuf>,
}

#[derive(Args)]
struct Input {
    /// JSON input file; standard input when omitted or `-`.
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CollapseMode {
    Symbolic,
    Numeric,
}

#[derive(Subcommand)]
enum Command {
    /// Move a point of the Siegel space into the Siegel set.
    Reduce(Input),
    /// Diameter-one limit of a monomial path or of a sample sequence.
    Collapse {
        #[arg(long, value_enum, default_value = "symbolic")]
        mode: CollapseMode,
        #[command(flatten)]
        input: Input,
    },
    /// Pointed limit with the volume held fixed.
    VolumeLimit(Input),
    /// Pointed limit with the injectivity radius held fixed.
    InjradLimit(Input),
    /// Limit of a family of ppavs given by its valuation matrix.
    AvLimit(Input),
    /// Limit of a family of curves given by its dual graph.
    CurveLimit {
        #[arg(long, value_enum, default_value = "gh")]
        gluing: CurveGluing,
        #[command(flatten)]
        input: Input,
    },
    /// Tropical Jacobian of a metric graph.
    TropJac(Input),
    /// Compare the curve limit and the Jacobian limit of a family.
    TorelliCheck(Input),
    /// Dual complex of incidence data, and its quotient by a group action.
    DualComplex(Input),
    /// Hybrid limit of a monomial path, optionally pushed along a monomial map.
    HybridLimit {
        #[arg(long, value_enum, default_value = "log")]
        gluing: HybridGluing,
        #[command(flatten)]
        input: Input,
    },
    /// Coordinatewise −log|z| of a sample sequence and its limit direction.
    Tropicalize(Input),
    /// Length of the hyperbolic collar around a node.
    Collar(Input),
}

impl Command {
    fn input(&self) -> &Input {
        match self {
            Command::Reduce(i)
            | Command::VolumeLimit(i)
            | Command::InjradLimit(i)
            | Command::AvLimit(i)
            | Command::TropJac(i)
            | Command::TorelliCheck(i)
            | Command::DualComplex(i)
            | Command::Tropicalize(i)
            | Command::Collar(i) => i,
            Command::Collapse { input, .. }
            | Command::CurveLimit { input, .. }
            | Command::HybridLimit { input, .. } => input,
        }
    }
}

fn read_input(input: &Input) -> Result<String, CliError> {
    let mut text = String::new();
    match &input.input {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn write_csv(path: &PathBuf, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|v| if v.fract() == 0.0 && v.abs() < 1e15 { format!("{v}") } else { format!("{v:e}") })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)));
    }
    let cfg = Config {
        tol: cli.tol,
        max_iterations: cli.max_iterations,
    };
    log::debug!("seed {}", cli.seed);
    let text = read_input(cli.command.input())?;
    match &cli.command {
        Command::Reduce(_) => commands::reduce(&text, &cfg),
        Command::Collapse { mode: CollapseMode::Symbolic, .. } => commands::collapse_symbolic(&text, &cfg),
        Command::Collapse { mode: CollapseMode::Numeric, .. } => commands::collapse_numeric(&text, &cfg),
        Command::VolumeLimit(_) => commands::volume_limit(&text, &cfg),
        Command::InjradLimit(_) => commands::injrad_limit(&text, &cfg),
        Command::AvLimit(_) => commands::av_limit(&text, &cfg),
        Command::CurveLimit { gluing, .. } => commands::curve_limit(&text, *gluing),
        Command::TropJac(_) => commands::trop_jac(&text, &cfg),
        Command::TorelliCheck(_) => commands::torelli_check(&text, &cfg),
        Command::DualComplex(_) => commands::dual_complex_cmd(&text, &cfg),
        Command::HybridLimit { gluing, .. } => commands::hybrid_limit_cmd(&text, *gluing),
        Command::Tropicalize(_) => commands::tropicalize_cmd(&text, &cfg),
        Command::Collar(_) => commands::collar(&text, &cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TROPLAB_LOG", "error")).init();
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        if let Some(path) = &cli.emit_csv {
            match &out.table {
                Some((header, rows)) => write_csv(path, header, rows)?,
                None => return Err(CliError::Input("this command has no tabular series for --emit-csv".into())),
            }
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let text = serde_json::to_string_pretty(&out.json).expect("values serialize");
            if writeln!(stdout, "{text}").is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("troplab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
