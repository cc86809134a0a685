//! `mswt`: parameter sweeps for the modified Schrieffer-Wolff study.
//!
//! Each subcommand writes `<command>.csv` and the resolved
//! `<command>.config.toml` into `--out`. Exit codes: 0 success, 2 config
//! error, 3 every grid point failed, 4 partial results.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{BackendName, RunConfig};
use mswt::Exec;

const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "mswt", version, about = "Modified Schrieffer-Wolff sweeps for Hubbard dimers and rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config file; missing keys take their defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for the grid (1 runs sequentially)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Master seed, overrides the config file
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Expectation-value backend, overrides the config file
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendName>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Variational θ per U/t for the dimer
    DimerVar,
    /// Iterated transformation per U/t for the dimer
    DimerIter,
    /// Relative ground-state errors on half-filled rings
    RingSweep,
    /// Circuit eigensolver (exact, statevector or noisy) per U/t
    Vqe,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::DimerVar => "dimer-var",
            Command::DimerIter => "dimer-iter",
            Command::RingSweep => "ring-sweep",
            Command::Vqe => "vqe",
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.backend {
        cfg.backend = b;
    }
    if cli.jobs == Some(0) {
        return Err("--jobs must be at least 1".into());
    }
    cfg.validate()?;
    commands::check_command(&cfg, cli.command.name())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("mswt {name}: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("mswt {name}: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let exec = if cli.jobs == Some(1) { Exec::Sequential } else { Exec::Parallel };

    let outcome = pool.install(|| match cli.command {
        Command::DimerVar => commands::dimer_var(&cfg, exec),
        Command::DimerIter => commands::dimer_iter(&cfg, exec),
        Command::RingSweep => commands::ring_sweep(&cfg, exec),
        Command::Vqe => commands::vqe(&cfg, exec),
    });

    let csv = match output::write_outputs(&cli.out, name, &cfg.to_toml(), &outcome.table) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("mswt {name}: cannot write to {}: {e}", cli.out.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    for n in &outcome.table.notes {
        eprintln!("mswt {name}: {n}");
    }
    eprintln!("mswt {name}: {} rows -> {}", outcome.table.rows.len(), csv.display());

    ExitCode::from(outcome.exit_code())
}
