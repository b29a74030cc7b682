use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use simalloc::alloc::Strategy;
use simalloc::harness::{self, ExperimentConfig};
use simalloc::Result;

#[derive(Parser)]
#[command(name = "simalloc", version, about = "Replication budget allocation for treatment-effect estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Comma-separated strategy list (brute_force, greedy, model_greedy,
    /// model_greedy_no_interaction).
    #[arg(long, global = true, value_delimiter = ',')]
    strategies: Option<Vec<String>>,

    /// Worker threads for replications (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Run the selected strategies concurrently.
    #[arg(long, global = true)]
    parallel_strategies: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment and write CSV reports.
    Run { config: PathBuf },
    /// Parse and validate a configuration only.
    Validate { config: PathBuf },
    /// Print the expected outcome at every grid condition.
    Oracle { config: PathBuf },
}

fn load(cli: &Cli, path: &PathBuf) -> Result<ExperimentConfig> {
    let mut config = harness::load_config(path)?;
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        config.out_dir = dir.clone();
    }
    if let Some(names) = &cli.strategies {
        config.strategies = names
            .iter()
            .filter(|n| !n.is_empty())
            .map(|n| Strategy::parse(n.trim()))
            .collect::<Result<_>>()?;
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }
    if cli.parallel_strategies {
        config.parallel_strategies = true;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let config = load(cli, config)?;
            let bundle = harness::run_experiment(&config)?;
            if bundle.outcomes.is_empty() {
                println!("no strategies selected; nothing written");
                return Ok(());
            }
            println!("{:<30} {:>12} {:>10} {:>10}", "strategy", "total runs", "max width", "time");
            for o in &bundle.outcomes {
                println!(
                    "{:<30} {:>12} {:>10.2} {:>9.2}s",
                    o.strategy.name(),
                    o.report.total_runs,
                    o.report.max_ci_width(),
                    o.wall_time.as_secs_f64()
                );
            }
            println!("reports written to {}", config.out_dir.display());
        }
        Command::Validate { config } => {
            let config = load(cli, config)?;
            let grid = config.build_grid()?;
            println!(
                "ok: {} active of {} conditions, strategies: {}",
                grid.active().len(),
                grid.full_size(),
                config
                    .strategies
                    .iter()
                    .map(|s| s.name())
                    .collect::<Vec<_>>()
                    .join(",")
            );
        }
        Command::Oracle { config } => {
            let config = load(cli, config)?;
            println!("TC,x1,x2,expected");
            for (cond, value) in harness::oracle_table(&config)? {
                println!(
                    "{},{},{},{}",
                    cond.label, cond.buprenorphine_index, cond.naloxone_index, value
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
