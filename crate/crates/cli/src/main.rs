mod error;
mod input;
mod output;
mod sweep;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use starres_core::discord::discord_quantifier;
use starres_core::games::simulate_gi_game;
use starres_core::markov::markov_quantifier;
use starres_core::total_corr::{tc_quantifier, tc_witness};
use starres_core::unistochastic::nu_quantifier;
use starres_core::WitnessReport;

use error::CliError;
use input::{Format, Input};
use output::{emit_json, Table};

const EXIT_WITNESS_POSITIVE: u8 = 2;
const EXIT_CHECKS_FAILED: u8 = 1;

#[derive(Parser)]
#[command(name = "starres", version, about = "Star resource theory witnesses, sweeps and validation suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true, env = "STARRES_WORKERS")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum App {
    Discord,
    Totalcorr,
    Unisto,
    Markov,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a witness; exits 2 when the resource is certified.
    Witness {
        app: App,
        /// Path, `-` for stdin, or inline JSON.
        #[arg(long)]
        input: String,
        /// Input format; inferred from the extension otherwise.
        #[arg(long, value_enum)]
        input_format: Option<Format>,
        /// Tolerance for structural validation of matrix inputs.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Quantifier grid over the app's parameter space.
    Sweep {
        app: App,
        /// Grid points per axis.
        #[arg(long, default_value_t = 50)]
        resolution: usize,
    },
    /// Run property suites; exits 0 iff every check passes.
    Validate {
        #[arg(value_enum, default_value = "all")]
        suite: validate::Suite,
        /// Remove a cone from the geometry fixture to exercise failure reporting.
        #[arg(long)]
        broken_fixture: bool,
    },
    /// Monte Carlo estimate of the XOR discrimination game.
    GameSim {
        /// Comma-separated distinguishabilities in [0, 1].
        #[arg(long, value_delimiter = ',', required = true)]
        ls: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
}

fn witness(app: App, input: &Input, tol: f64) -> Result<WitnessReport, CliError> {
    if !(tol > 0.0) {
        return Err(CliError::Input(format!("tolerance must be positive, got {tol}")));
    }
    Ok(match app {
        App::Discord => discord_quantifier(&input::fano(input)?)?,
        App::Totalcorr => {
            let p = input::joint(input)?;
            tc_witness(&p)?;
            tc_quantifier(&p)?
        }
        App::Unisto => nu_quantifier(&input::circulant(input, tol)?),
        App::Markov => markov_quantifier(&input::mixture(input, tol)?)?,
    })
}

fn report_table(r: &WitnessReport) -> Table {
    let mut header = vec!["value".to_string(), "margin".into(), "critical".into(), "domain_index".into()];
    header.extend((1..=r.per_section.len()).map(|k| format!("d{k}")));
    let mut row = vec![r.value, r.margin, r.critical, r.domain_index as f64];
    row.extend(&r.per_section);
    Table { header, rows: vec![row] }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let output = cli.output.as_deref();
    match cli.command {
        Command::Witness { app, input, input_format, tol } => {
            let input = Input::load(&input, input_format)?;
            let report = witness(app, &input, tol)?;
            let positive = report.margin > 0.0;
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let mut value = serde_json::to_value(&report).map_err(|e| CliError::Internal(e.to_string()))?;
                    if let Value::Object(map) = &mut value {
                        map.insert("app".into(), json!(app_name(app)));
                        map.insert("witness_positive".into(), json!(positive));
                    }
                    emit_json(&value, output)?;
                }
                Format::Csv => report_table(&report).emit(Format::Csv, output)?,
            }
            Ok(if positive { EXIT_WITNESS_POSITIVE } else { 0 })
        }
        Command::Sweep { app, resolution } => {
            let table = sweep::sweep(app, resolution)?;
            table.emit(cli.format.unwrap_or(Format::Csv), output)?;
            Ok(0)
        }
        Command::Validate { suite, broken_fixture } => {
            let summary = validate::run(suite, cli.seed, broken_fixture)?;
            let value = serde_json::to_value(&summary).map_err(|e| CliError::Internal(e.to_string()))?;
            emit_json(&value, output)?;
            Ok(if summary.passed { 0 } else { EXIT_CHECKS_FAILED })
        }
        Command::GameSim { ls, trials } => {
            let sim = simulate_gi_game(&ls, trials, cli.seed)?;
            let value = serde_json::to_value(&sim).map_err(|e| CliError::Internal(e.to_string()))?;
            emit_json(&value, output)?;
            Ok(0)
        }
    }
}

fn app_name(app: App) -> &'static str {
    match app {
        App::Discord => "discord",
        App::Totalcorr => "totalcorr",
        App::Unisto => "unisto",
        App::Markov => "markov",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.workers.unwrap_or(0)).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => Err(CliError::Internal(e.to_string())),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("starres: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
