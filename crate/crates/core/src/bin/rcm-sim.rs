use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rcm_simplicial::config::Task;
use rcm_simplicial::runner::{exit_code, run_file, Overrides};

/// Runs one simulation task from a TOML config.
#[derive(Parser, Debug)]
#[command(name = "rcm-sim", version)]
struct Cli {
    /// Config file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// sample, moments, gamma, clt or render (overrides the config).
    #[arg(long)]
    task: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).init();
    let cli = Cli::parse();
    let task = match cli.task.as_deref().map(str::parse::<Task>).transpose() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let overrides = Overrides { seed: cli.seed, out: cli.out, threads: cli.threads, task };
    match run_file(&cli.config, &overrides) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
