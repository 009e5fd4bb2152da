use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use onebit_cli::commands::loss_text;
use onebit_cli::{run, CliError, CliResult, Command, Overrides};

#[derive(Parser)]
#[command(name = "onebit", version, about = "One-bit MIMO radar detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// False-alarm probability of the Rao test and GLRT versus threshold.
    PfaCurve(Overrides),
    /// Detection probability versus threshold, empirical and theoretical.
    PdCurve(Overrides),
    /// Detection probability versus SNR at the configured false-alarm rate.
    SweepSnr(Overrides),
    /// Detection probability versus block length n.
    SweepN(Overrides),
    /// Cramér–von Mises errors of every approximation.
    Gof(Overrides),
    /// One-bit loss constants.
    Loss(Overrides),
}

impl Sub {
    fn split(&self) -> (Command, &Overrides) {
        match self {
            Sub::PfaCurve(o) => (Command::PfaCurve, o),
            Sub::PdCurve(o) => (Command::PdCurve, o),
            Sub::SweepSnr(o) => (Command::SweepSnr, o),
            Sub::SweepN(o) => (Command::SweepN, o),
            Sub::Gof(o) => (Command::Gof, o),
            Sub::Loss(o) => (Command::Loss, o),
        }
    }
}

fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn execute(sub: &Sub) -> CliResult<()> {
    let (command, overrides) = sub.split();
    let cfg = overrides.resolve(command)?;
    let report = run(&cfg)?;
    if command == Command::Loss {
        print!("{}", loss_text());
    }
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Write { path: path.clone(), source })?;
            let mut w = BufWriter::new(file);
            report.write_csv(&cfg, &mut w)?;
            w.flush().map_err(|source| CliError::Write { path: path.clone(), source })?;
        }
        None if command != Command::Loss => report.write_csv(&cfg, io::stdout().lock())?,
        None => {}
    }
    eprintln!("summary: {}", report.summary_json());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprintln!("{}", error_line("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            ExitCode::FAILURE
        }
    }
}
