use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bosonlab::cli::{
    cmd_check, cmd_compile, cmd_evolve, cmd_phase_diagram, cmd_sample, cmd_tvd, exit_code,
    read_matrix, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "bosonlab", about = "Sampling-complexity experiments for free bosons on a lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for exact-distribution sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the time grid and emit tvd(D_U, D_DP) rows with bound context.
    PhaseDiagram {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the envelope / bound battery; non-zero exit on any failed row.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a unitary into a nearest-neighbour gate circuit.
    Compile {
        /// Matrix file to decompose.
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        /// Circuit output file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Hopping-schedule output file.
        #[arg(long)]
        out_schedule: Option<PathBuf>,
        /// Boson count used for the hardness scale in the report.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// Write the propagator for the configured schedule.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw samples (one occupation vector per line).
    Sample {
        #[arg(long)]
        config: PathBuf,
        /// Which sampler: "exact" (bosonic) or "dp" (distinguishable).
        #[arg(long, default_value = "exact")]
        sampler: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print tvd(D_U, D_DP) for each time on the grid.
    Tvd {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> bosonlab::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> bosonlab::Result<bool> {
    if let Some(threads) = cli.threads {
        // Ignore the error if a pool already exists (e.g. repeated init).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match cli.command {
        Command::PhaseDiagram { config, seed, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            emit(&cmd_phase_diagram(&cfg)?, out.as_ref())?;
            Ok(true)
        }
        Command::Check { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (csv, pass) = cmd_check(&cfg)?;
            emit(&csv, out.as_ref())?;
            Ok(pass)
        }
        Command::Compile { r#in, out, out_schedule, n, beta, d } => {
            let u = read_matrix(&r#in)?;
            let result = cmd_compile(&u, n, beta, d)?;
            if let Some(path) = &out {
                std::fs::write(path, &result.circuit_text)?;
            }
            if let Some(path) = &out_schedule {
                std::fs::write(path, &result.schedule_text)?;
            }
            print!("{}", result.report_text);
            Ok(true)
        }
        Command::Evolve { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            emit(&cmd_evolve(&cfg)?, out.as_ref())?;
            Ok(true)
        }
        Command::Sample { config, sampler, count, seed, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            emit(&cmd_sample(&cfg, &sampler, count)?, out.as_ref())?;
            Ok(true)
        }
        Command::Tvd { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            emit(&cmd_tvd(&cfg)?, out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
