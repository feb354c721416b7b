use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zdungeon::assets::{load_pool, load_weights, CORPUS_ENV, WEIGHTS_ENV};
use zdungeon::commands::{self, GenerateArgs, Source};
use zdungeon::service::{self, ServiceConfig};
use zdungeon::CliError;

#[derive(Parser)]
#[command(name = "zdungeon", version, about = "Generate, verify, measure and play grid dungeons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a corpus into rooms; write the unique-room pool and one-hot export.
    Ingest {
        /// Directory of dungeon text files.
        #[arg(env = CORPUS_ENV)]
        corpus: PathBuf,
        #[arg(long, default_value = "pool")]
        out: PathBuf,
    },
    /// Build, repair and write dungeons.
    Generate {
        #[arg(long, value_enum)]
        source: Source,
        /// First seed; later dungeons use the following seeds. Random when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = WEIGHTS_ENV)]
        weights: Option<PathBuf>,
        /// Pool file from `ingest`, or a corpus directory.
        #[arg(long, env = CORPUS_ENV)]
        pool: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "dungeons")]
        out: PathBuf,
    },
    /// Check dungeon files for a winning plan.
    Solve {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Novelty summary over dungeon files or the corpus.
    Metrics {
        paths: Vec<PathBuf>,
        /// Include the corpus dungeons from this directory.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "Original")]
        label: String,
    },
    /// Run the HTTP play service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, env = WEIGHTS_ENV)]
        weights: Option<PathBuf>,
        #[arg(long, env = CORPUS_ENV)]
        pool: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Ingest { corpus, out: dir } => commands::ingest(&corpus, &dir, &mut out),
        Command::Generate { source, seed, weights, pool, count, out: dir } => {
            let seed = seed.unwrap_or_else(rand::random);
            commands::generate(&GenerateArgs { source, seed, weights, pool, count, out: dir }, &mut out)
        }
        Command::Solve { paths } => commands::solve_files(&paths, &mut out),
        Command::Metrics { paths, corpus, label } => commands::metrics(&paths, corpus.as_deref(), &label, &mut out),
        Command::Serve { port, weights, pool } => {
            let config = ServiceConfig {
                weights: weights.as_deref().map(load_weights).transpose()?,
                pool: pool.as_deref().map(load_pool).transpose()?,
                ..ServiceConfig::default()
            };
            if config.weights.is_none() && config.pool.is_none() {
                return Err(CliError::Input(format!("serve needs --weights or --pool (or {WEIGHTS_ENV} / {CORPUS_ENV})")));
            }
            let _ = out.flush();
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Input(e.to_string()))?;
            runtime
                .block_on(service::serve(port, config))
                .map_err(|e| CliError::Input(format!("cannot serve on port {port}: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
