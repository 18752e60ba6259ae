use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ftb_cli::run::{EXIT_ERROR, EXIT_OK};
use ftb_cli::{run, to_json, CliError, Mode, RunConfig};
use ftb_core::{Metric, SuiteKind};

#[derive(Parser)]
#[command(
    name = "ftb",
    version,
    about = "Tangent-bundle geometry checks for Finsler metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and judge every verdict (exit 2 on any failure)
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// restrict to these suites (repeatable); overrides `suites` in the config
        #[arg(long = "suite")]
        suites: Vec<SuiteKind>,
        /// write JSON here instead of `output.path` or stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the same quantities without verdicts
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "suite")]
        suites: Vec<SuiteKind>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in metrics
    ListMetrics,
}

fn execute(
    mode: Mode,
    config: PathBuf,
    suites: Vec<SuiteKind>,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let cfg = RunConfig::load(&config)?;
    let outcome = run(&cfg, mode, (!suites.is_empty()).then_some(&suites[..]))?;
    let bytes = to_json(&outcome.report)?;
    match out.or(cfg.output) {
        Some(path) => {
            std::fs::write(&path, &bytes).map_err(|source| CliError::Io { path, source })?
        }
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    let mut err = std::io::stderr().lock();
    for v in &outcome.report.verdicts {
        let tag = if v.verdict.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            err,
            "{tag} {}/{} [{}] witness={:e}",
            v.suite, v.verdict.id, v.verdict.metric, v.verdict.witness_value
        );
    }
    let s = &outcome.report.summary;
    if mode == Mode::Verify {
        let _ = writeln!(err, "{} of {} verdicts passed", s.passed, s.total);
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify {
            config,
            suites,
            out,
        } => execute(Mode::Verify, config, suites, out),
        Command::Report {
            config,
            suites,
            out,
        } => execute(Mode::Report, config, suites, out),
        Command::ListMetrics => {
            for m in Metric::registry() {
                println!("{:<14} {:<8} {}", m.name, m.dims, m.description);
                if !m.params.is_empty() {
                    println!("{:<14} {:<8} params: {}", "", "", m.params);
                }
            }
            Ok(EXIT_OK)
        }
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
