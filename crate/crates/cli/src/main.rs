mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "chunkwm", version, about = "Run and evaluate chunked-memory agent experiments")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Output directory (overrides the config's `out_dir`).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Allow HTTP backends to send real requests.
    #[arg(long, global = true)]
    live: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Metric {
    Pr,
    Steps,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every trial in an experiment config.
    Run {
        config: PathBuf,
        /// Request ceiling for --live runs (overrides the config).
        #[arg(long)]
        max_requests: Option<u64>,
    },
    /// Metrics table, step series and JSON bundle from a records file.
    Report {
        records: PathBuf,
        /// Variant that relative metrics are measured against.
        #[arg(long, default_value = "STD")]
        baseline: String,
        /// Skip relative metrics.
        #[arg(long, conflicts_with = "baseline")]
        absolute: bool,
    },
    /// Wilcoxon signed-rank test between two variants, paired on (task, instance, seed).
    Stats {
        records: PathBuf,
        #[arg(long, value_enum, default_value = "pr")]
        metric: Metric,
        #[arg(long = "a")]
        variant_a: String,
        #[arg(long = "b")]
        variant_b: String,
    },
    /// Environment self-checks for one task, or `all`.
    Envcheck { task: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = commands::GlobalOpts {
        json: cli.json,
        out_dir: cli.out_dir,
        live: cli.live,
    };
    let code = match cli.command {
        Command::Run { config, max_requests } => commands::cmd_run(&opts, &config, max_requests),
        Command::Report {
            records,
            baseline,
            absolute,
        } => commands::cmd_report(&opts, &records, (!absolute).then_some(baseline.as_str())),
        Command::Stats {
            records,
            metric,
            variant_a,
            variant_b,
        } => commands::cmd_stats(&opts, &records, matches!(metric, Metric::Steps), &variant_a, &variant_b),
        Command::Envcheck { task } => commands::cmd_envcheck(&opts, &task),
    };
    ExitCode::from(code)
}
