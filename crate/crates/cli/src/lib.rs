//! Command-line front end: figure data, sweeps and disorder ensembles as
//! CSV, JSON or SVG.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod svg;

use std::io::Write;

use args::Cli;
use config::RunConfig;
use error::{CliError, CliResult};

/// Dense eigensolvers recurse deeply on 1024-state problems.
const WORKER_STACK_BYTES: usize = 64 << 20;

/// Resolve flags against the optional config file and defaults.
pub fn resolve(cli: Cli) -> CliResult<RunConfig> {
    let file = match &cli.options.config {
        Some(path) => config::read_config_file(path)?,
        None => args::Options::default(),
    };
    config::resolve(cli.command, config::merge(cli.options, file))
}

/// Rendered output for a resolved configuration.
pub fn produce(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let mut builder = rayon::ThreadPoolBuilder::new().stack_size(WORKER_STACK_BYTES);
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let report = pool.install(|| commands::execute(cfg))?;
    report::render(&report, cfg)
}

pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = resolve(cli)?;
    let bytes = produce(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}
