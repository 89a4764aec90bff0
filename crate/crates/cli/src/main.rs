//! `voxelforge` command-line driver.
//!
//! ```text
//! voxelforge evolve   --config run.json --seed 1 --out runs/stress-1 [--jobs 4]
//! voxelforge simulate --genome runs/stress-1/gen50_id812.json --rule stress --out sim/ [--config run.json]
//! voxelforge analyze  --champions runs/ --kind compare --out report/ [--samples 10]
//! ```
//!
//! Logging is controlled by `VOXELFORGE_LOG` (`error`, `info`, `debug`).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use voxelforge::DevelopmentRule;

#[derive(Parser, Debug)]
#[command(name = "voxelforge", version, about = "Evolve, simulate and analyse developing voxel soft robots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one seeded evolutionary trial.
    Evolve {
        /// Flat JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for evaluation; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Express and simulate a single genome.
    Simulate {
        #[arg(long)]
        genome: PathBuf,
        #[arg(long, value_enum)]
        rule: Rule,
        #[arg(long)]
        out: PathBuf,
        /// Run configuration supplying lattice dims and physics.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Analyse the champions of finished runs.
    Analyze {
        /// Directory searched recursively for run manifests.
        #[arg(long)]
        champions: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
        /// Stiffness redraws per champion (robustness).
        #[arg(long)]
        samples: Option<usize>,
        /// Bootstrap resamples (compare).
        #[arg(long)]
        resamples: Option<usize>,
        /// Seed for redraws and resampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Population used to normalise development gains.
        #[arg(long, value_enum, default_value_t = Bounds::Treatment)]
        gain_bounds: Bounds,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Rule {
    None,
    Stress,
    Pressure,
}

impl From<Rule> for DevelopmentRule {
    fn from(rule: Rule) -> Self {
        match rule {
            Rule::None => DevelopmentRule::None,
            Rule::Stress => DevelopmentRule::Stress,
            Rule::Pressure => DevelopmentRule::Pressure,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Diversity,
    Robustness,
    Canalization,
    Compare,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Bounds {
    Treatment,
    Global,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("VOXELFORGE_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Evolve { config, seed, out, jobs } => commands::evolve(&config, seed, &out, jobs),
        Command::Simulate { genome, rule, out, config } => {
            commands::simulate(&genome, rule.into(), &out, config.as_deref())
        }
        Command::Analyze { champions, kind, out, samples, resamples, seed, gain_bounds, jobs } => {
            let options = commands::AnalyzeOptions {
                kind,
                samples,
                resamples,
                seed,
                gain_bounds: match gain_bounds {
                    Bounds::Treatment => voxelforge::analysis::GainBounds::Treatment,
                    Bounds::Global => voxelforge::analysis::GainBounds::Global,
                },
                jobs,
            };
            commands::analyze(&champions, &out, &options)
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
