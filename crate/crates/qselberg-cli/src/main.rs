//! `qselberg`: emit closed-form matrices and run verification suites.

mod cli;
mod error;
mod matrices;
mod output;
mod source;
mod suites;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command, CommonOpts, MatrixKind};
use error::CliError;

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("QSELBERG_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Invalid(format!("QSELBERG_THREADS must be a positive integer, got `{text}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))
}

fn kind_name(kind: MatrixKind) -> String {
    use clap::ValueEnum;
    kind.to_possible_value().expect("every kind has a name").get_name().to_string()
}

fn matrix(kind: MatrixKind, opts: &CommonOpts) -> Result<(), CliError> {
    let resolved = source::resolve(opts)?;
    let p = resolved.params;
    let blocks = matrices::blocks(kind, &p)?;
    let text = output::matrices(opts.format, &kind_name(kind), &p, opts.seed, &blocks);
    output::write(opts.out.as_deref(), &text)
}

fn verify(suite: cli::Suite, opts: &CommonOpts) -> Result<(), CliError> {
    let plan = suites::Plan {
        resolved: source::resolve(opts)?,
        n: opts.n,
        n_max: opts.n_max,
        m: opts.m,
        tol: opts.tol,
        seed: opts.seed,
        draws: opts.draws,
    };
    let reports = suites::run(suite, &plan)?;
    output::write(opts.out.as_deref(), &output::reports(opts.format, opts.seed, &reports))?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("{} checks, {failed} failed", reports.len());
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total: reports.len() });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Matrix { kind, opts } => matrix(*kind, opts),
        Command::Verify { suite, opts } => verify(*suite, opts),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qselberg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
