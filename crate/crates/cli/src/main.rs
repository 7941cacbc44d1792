use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypodecay_cli::{
    analyze, decay, example, parse_eps_geo, read_document, selftest, sweep, CliError, Grid, MatrixInput, Outcome,
    OutputFormat, RunConfig,
};

/// Hypocoercivity index, short-time decay and waiting times of x' = -Bx.
#[derive(Parser)]
#[command(name = "hypodecay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand)]
enum Command {
    /// Index, coefficient and spectrum of one system.
    Analyze,
    /// Propagator norm on a time grid, with waiting time and short-time fit.
    Decay,
    /// Coefficient scaling and waiting times across eps for a split document.
    Sweep,
    /// Seeded consistency checks.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputArg {
    Json,
    Csv,
}

#[derive(Clone)]
struct EpsList(Vec<f64>);

fn eps_list(s: &str) -> Result<EpsList, String> {
    parse_eps_geo(s).map(EpsList)
}

#[derive(Args)]
struct Options {
    /// Matrix document (JSON); `-` reads standard input.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "example")]
    input: Option<PathBuf>,
    /// Built-in example: b1, b2, ek:<k>, envelope, num1, num2.
    #[arg(long, global = true, value_name = "NAME")]
    example: Option<String>,
    /// Use eps A + C from the document's split.
    #[arg(long, global = true, value_name = "F", allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Geometric eps list from A to B with N values.
    #[arg(long, global = true, value_name = "A:B:N", value_parser = eps_list, conflicts_with = "eps")]
    eps_geo: Option<EpsList>,
    #[arg(long, global = true, value_name = "F", default_value_t = 1e-10)]
    tol_rank: f64,
    #[arg(long, global = true, value_name = "F", default_value_t = 1e-12)]
    tol_psd: f64,
    #[arg(long, global = true, value_name = "F")]
    t_min: Option<f64>,
    #[arg(long, global = true, value_name = "F")]
    t_max: Option<f64>,
    #[arg(long, global = true, value_name = "N", default_value_t = 400)]
    points: usize,
    #[arg(long, global = true, value_enum, default_value = "linear")]
    grid: GridArg,
    #[arg(long, global = true, value_enum, default_value = "json")]
    output: OutputArg,
    /// Write the document here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,
}

impl Options {
    fn config(&self) -> RunConfig {
        RunConfig {
            tol_rank: self.tol_rank,
            tol_psd: self.tol_psd,
            t_min: self.t_min,
            t_max: self.t_max,
            points: self.points,
            grid: match self.grid {
                GridArg::Linear => Grid::Linear,
                GridArg::Log => Grid::Log,
            },
            output: match self.output {
                OutputArg::Json => OutputFormat::Json,
                OutputArg::Csv => OutputFormat::Csv,
            },
            seed: self.seed,
        }
    }

    fn source(&self, config: &RunConfig) -> Result<MatrixInput, CliError> {
        match (&self.input, &self.example) {
            (Some(path), _) => read_document(path, config.tol_psd),
            (None, Some(name)) => example(name),
            (None, None) => Err(CliError::Usage("one of --input or --example is required".into())),
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let config = cli.opts.config();
    config.validate()?;
    match cli.command {
        Command::Analyze => analyze(&cli.opts.source(&config)?, cli.opts.eps, &config),
        Command::Decay => decay(&cli.opts.source(&config)?, cli.opts.eps, &config),
        Command::Sweep => {
            let eps = match (&cli.opts.eps_geo, cli.opts.eps) {
                (Some(list), _) => list.0.clone(),
                (None, Some(e)) => vec![e],
                (None, None) => Vec::new(),
            };
            sweep(&cli.opts.source(&config)?, &eps, &config)
        }
        Command::Selftest => selftest(&config),
    }
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, &outcome.body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(outcome.body.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    let mut stderr = std::io::stderr().lock();
    for note in &outcome.notes {
        let _ = writeln!(stderr, "{note}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| emit(&o, cli.opts.out.as_ref()).map(|_| o.exit)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
