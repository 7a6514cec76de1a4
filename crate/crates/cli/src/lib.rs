//! Command-line front end: a TOML run configuration, flag overrides and one
//! function per subcommand.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

use std::path::Path;

pub use args::{Cli, Command};
pub use commands::{
    cmd_evaluate, cmd_extract, cmd_select, cmd_simulate, cmd_synth, cmd_train, FeatureSource,
};
pub use config::RunConfig;
pub use error::{CliError, Result};

/// Defaults, then the config file, then flags.
pub fn effective_config(command: &Command) -> Result<RunConfig> {
    let mut cfg = match &command.common().config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    command.apply(&mut cfg);
    Ok(cfg)
}

fn source(args: &args::SourceArgs) -> Result<FeatureSource> {
    match (&args.corpus, &args.features) {
        (Some(c), None) => Ok(FeatureSource::Corpus(c.clone())),
        (None, Some(f)) => Ok(FeatureSource::Features(f.clone())),
        _ => Err(CliError::Config("give exactly one of --corpus or --features".into())),
    }
}

/// Run a parsed command line, printing a short result to stdout.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = effective_config(&cli.command)?;
    let common = cli.command.common();
    if common.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    cfg.validate()?;
    let out = common.out.as_deref().expect("clap requires --out unless --dump-config");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("workers: {e}")))?;
    pool.install(|| dispatch(&cli.command, &cfg, out))
}

fn dispatch(command: &Command, cfg: &RunConfig, out: &Path) -> Result<()> {
    match command {
        Command::Synth(_) => {
            let files = cmd_synth(cfg, out)?;
            println!("wrote {} participant files to {}", files.len(), out.display());
        }
        Command::Extract(a) => {
            let corpus = a.corpus.as_deref().expect("clap requires --corpus");
            println!("{}", cmd_extract(cfg, corpus, out)?.display());
        }
        Command::Select(a) => println!("{}", cmd_select(cfg, &source(&a.source)?, out)?.display()),
        Command::Train(a) => println!("{}", cmd_train(cfg, &source(&a.source)?, out)?.display()),
        Command::Evaluate(a) => {
            let report = cmd_evaluate(cfg, &source(&a.source)?, out)?;
            print!("{}", affect_dda::classify::render_accuracy_table(&report.outcomes));
        }
        Command::Simulate(_) => {
            let summary = cmd_simulate(cfg, out)?;
            print!("{}", commands::render_simulation_summary(&summary));
        }
    }
    Ok(())
}
