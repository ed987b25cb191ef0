use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use surfcert::{
    check_document, parse_config, run_command, to_json, CliError, Command, RunConfig, RunOptions,
};
use surfcert_core::certify::Verdict;

/// Covering towers and minimality certificates for closed geodesics on
/// hyperbolic surfaces.
#[derive(Parser)]
#[command(name = "surfcert", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Curve as a word, e.g. "a1 a2 A1 A2" (capitals are inverses).
    #[arg(long, global = true)]
    curve: Option<String>,
    /// Length cutoff for `lengths` and the search hint elsewhere.
    #[arg(long, global = true)]
    length_cutoff: Option<f64>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Leave out the timestamp so identical runs give identical bytes.
    #[arg(long, global = true)]
    reproducible: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// CSV of all closed geodesics up to the length cutoff.
    Lengths,
    /// Coset table of the configured finite cover.
    Cover,
    /// Closed lifts of the curve to the configured cover.
    Lift,
    /// Shortest disjoint partition of a homology class.
    PartitionMin,
    /// Periodic invariant measure of a curve or of a minimal partition.
    Measure,
    /// Build a covering tower and certify the curve's lift.
    Certify,
    /// Re-verify a certificate document with the independent checker.
    Check {
        /// Certificate document written by `certify`.
        certificate: PathBuf,
    },
}

fn load_config(cli: &Cli) -> Result<(RunConfig, PathBuf), CliError> {
    let Some(path) = &cli.config else {
        return Ok((RunConfig::default(), PathBuf::from(".")));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let cfg = parse_config(&text).map_err(|mut e| {
        e.file = Some(path.display().to_string());
        CliError::Config(e)
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{}", body);
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Cmd::Check { certificate } = &cli.command {
        let text = std::fs::read_to_string(certificate).map_err(|e| CliError::Io {
            path: certificate.display().to_string(),
            message: e.to_string(),
        })?;
        let base = certificate
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        let (report, verdict) = check_document(&text, &base)?;
        emit(&cli.out, &to_json(&report)?)?;
        if !report.passed() {
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            return Err(CliError::Usage(format!(
                "certificate failed checks: {}",
                failed.join(", ")
            )));
        }
        return Ok(verdict != Verdict::Certified);
    }
    let (mut cfg, base_dir) = load_config(cli)?;
    if let Some(c) = &cli.curve {
        cfg.curve = Some(c.parse().map_err(CliError::Core)?);
    }
    if let Some(l) = cli.length_cutoff {
        cfg.length_cutoff = Some(l);
    }
    let command = match cli.command {
        Cmd::Lengths => Command::Lengths,
        Cmd::Cover => Command::Cover,
        Cmd::Lift => Command::Lift,
        Cmd::PartitionMin => Command::PartitionMin,
        Cmd::Measure => Command::Measure,
        Cmd::Certify => Command::Certify,
        Cmd::Check { .. } => unreachable!(),
    };
    let opts = RunOptions {
        reproducible: cli.reproducible,
        base_dir,
    };
    let report = run_command(&cfg, command, &opts)?;
    emit(&cli.out, &report.body)?;
    Ok(report.inconclusive)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let _ = e.print();
            return match e.kind() {
                DisplayHelp | DisplayVersion => ExitCode::SUCCESS,
                _ => {
                    if !e.to_string().contains("Usage:") {
                        eprintln!("{}", Cli::command().render_usage());
                    }
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e);
            ExitCode::from(1)
        }
    }
}
