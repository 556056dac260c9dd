use std::path::PathBuf;
use std::process::ExitCode;

use callroute::config::{load_experiment, TopologySpec};
use callroute::output::write_outputs;
use callroute::report::{coverage_table, delay_table, parse_values};
use callroute::runner::run_experiment;
use callroute::topofile::write_topology;
use callroute::Result;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "callroute", version, about = "Discrete-time simulator of learning-agent call routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (strategy, load, seed) of an experiment and write CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `experiment.seeds`.
        #[arg(long)]
        seeds: Option<u32>,
        /// Overrides `experiment.output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; runs are independent so results do not depend on it.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
    /// Closed-form staleness and coverage tables.
    Analyze {
        #[command(subcommand)]
        table: Table,
    },
    /// Write a random geometric topology in the file format.
    Topology {
        #[arg(long, default_value_t = 50)]
        nodes: usize,
        #[arg(long, default_value_t = 0.19)]
        radius: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Destination file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Table {
    /// Staleness of nearest-neighbour versus path-carried state.
    Delays {
        /// Hops to the information source: `N`, `a,b,c` or `a..b`.
        #[arg(long, default_value = "1..10")]
        k: String,
        /// Ticks between tasks.
        #[arg(long, default_value = "3..50")]
        tc: String,
        /// Ticks per hop.
        #[arg(long, default_value = "1..3")]
        dt: String,
    },
    /// Chance that h+1 state changes fall between two observations.
    Coverage {
        /// State durations, comma-separated.
        #[arg(long)]
        durations: String,
        /// Observation gaps.
        #[arg(long)]
        td: String,
        #[arg(long, default_value = "1")]
        h: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, seeds, out, parallel } => {
            let mut spec = load_experiment(&config)?;
            if let Some(s) = seeds {
                spec.seeds = s;
            }
            let out = out.unwrap_or_else(|| spec.output.clone());
            let topo = spec.topology.build()?;
            let records = run_experiment(&spec, &topo, parallel.max(1));
            let failed = records.iter().filter(|r| r.outcome.is_err()).count();
            let written = write_outputs(&spec, &topo, &records, &out)?;
            eprintln!("{} runs, {failed} failed, {} files under {}", records.len(), written.len(), out.display());
            Ok(())
        }
        Command::Analyze { table: Table::Delays { k, tc, dt } } => {
            print!("{}", delay_table(&parse_values(&k)?, &parse_values(&tc)?, &parse_values(&dt)?)?);
            Ok(())
        }
        Command::Analyze { table: Table::Coverage { durations, td, h } } => {
            print!("{}", coverage_table(&parse_values(&durations)?, &parse_values(&td)?, &parse_values(&h)?)?);
            Ok(())
        }
        Command::Topology { nodes, radius, seed, out } => {
            let spec = TopologySpec::Geometric { nodes, radius, seed };
            let topo = spec.build()?;
            let text = write_topology(
                &topo,
                &[format!("{spec} mean_degree={} diameter={}", topo.mean_degree(), topo.min_hop_distances().diameter())],
            );
            match out {
                Some(p) => std::fs::write(&p, text).map_err(|e| callroute::CliError::Io { path: p, source: e }),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}
