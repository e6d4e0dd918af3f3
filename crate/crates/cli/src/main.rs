mod args;
mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::{env_pairs, parse_config_file, Layers, RunConfig, Source};
use report::{Failure, EXIT_USAGE};

fn configure(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut layers = Layers::default();
    if let Some(path) = &cli.options.config {
        layers.apply(parse_config_file(path)?, Source::File(path.clone()))?;
    }
    for (key, value, name) in env_pairs(std::env::vars()) {
        layers.apply(vec![(key, value)], Source::Env(name))?;
    }
    layers.apply(cli.options.pairs(), Source::Flag)?;
    RunConfig::resolve(&layers)
}

#[cfg(feature = "parallel")]
fn set_threads(threads: Option<usize>) -> Result<(), Failure> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::config(format!("cannot start {n} threads: {e}")))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn set_threads(threads: Option<usize>) -> Result<(), Failure> {
    if threads.is_some_and(|n| n > 1) {
        eprintln!("warning: built without the parallel feature; running on one thread");
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = configure(cli)?;
    set_threads(cfg.threads)?;
    match &cli.command {
        Command::Reduce { input } => commands::cmd_reduce(input, &cfg),
        Command::Compare { original, reduced } => commands::cmd_compare(original, reduced, &cfg),
        Command::Validate { input } => commands::cmd_validate(input, &cfg),
        Command::Freqresp { input } => commands::cmd_freqresp(input, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            Failure::usage(e.kind().to_string()).emit();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.emit();
            ExitCode::from(f.exit)
        }
    }
}
