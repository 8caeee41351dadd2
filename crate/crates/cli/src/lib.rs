//! Batch front end for the `pd2` toolkit.
//!
//! Exit codes: 0 on success, 1 on a usage or domain error, 2 on a
//! numerical failure. Errors are reported on standard error as a single
//! line starting with `error:`.

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use sha2::{Digest, Sha256};

pub mod args;
pub mod commands;
pub mod grid;
pub mod output;

use args::Cli;
use commands::execute;
use output::Format;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn report(message: &str) {
    let line = message.split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("error: {line}");
}

/// Hash of the version, seed and resolved subcommand arguments.
pub fn config_hash(cli: &Cli) -> String {
    let mut h = Sha256::new();
    h.update(format!("pd2/config/v1\n{VERSION}\n{:?}\n{:?}\n", cli.seed, cli.command));
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    let text = e.to_string();
                    let first = text.lines().next().unwrap_or("invalid arguments");
                    report(first.trim_start_matches("error: "));
                    ExitCode::from(1)
                }
            };
        }
    };
    if cli.command.is_stochastic() && cli.seed.is_none() {
        report(&format!("--seed is required for {}", cli.command.name()));
        return ExitCode::from(1);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            report("--workers must be at least 1");
            return ExitCode::from(1);
        }
        pool = pool.num_threads(w);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            report(&format!("cannot start worker pool: {e}"));
            return ExitCode::from(1);
        }
    };

    let outcome = match pool.install(|| execute(&cli.command, cli.seed)) {
        Ok(o) => o,
        Err(f) => {
            report(&f.message());
            return ExitCode::from(f.exit_code());
        }
    };

    let mut table = outcome.table;
    let mut meta = vec![
        ("pd2_version".to_owned(), VERSION.to_owned()),
        ("command".to_owned(), cli.command.name().to_owned()),
    ];
    if let Some(seed) = cli.seed {
        meta.push(("seed".into(), seed.to_string()));
    }
    meta.push(("config_hash".into(), config_hash(&cli)));
    meta.push(("config".into(), format!("{:?}", cli.command)));
    if outcome.failure.is_some() {
        meta.push(("partial".into(), "true".into()));
    }
    meta.append(&mut table.meta);
    table.meta = meta;

    let text = if outcome.scalar && cli.format == Format::Columnar {
        format!("{}\n", plain(&table.rows[0][1]))
    } else {
        table.emit(cli.format)
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(m) = written {
        report(&m);
        return ExitCode::from(1);
    }
    match outcome.failure {
        Some(f) => {
            report(&f.message());
            ExitCode::from(f.exit_code())
        }
        None => ExitCode::SUCCESS,
    }
}

/// Shortest round-trip rendering of a scalar result.
fn plain(c: &output::Cell) -> String {
    match c.as_f64() {
        Some(v) => format!("{v}"),
        None => c.to_string(),
    }
}
