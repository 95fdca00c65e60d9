use std::io::stdout;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hyperelastic_gp::datagen::{make_dataset, DatasetSpec, ProblemKind, SamplingMode, StretchRange};
use hyperelastic_gp::experiments::{self, results::write_summary, ExperimentConfig};
use hyperelastic_gp::io::{metadata_path, save_pairs, DatasetMetadata};
use hyperelastic_gp::Error;

/// Gaussian-process regression of hyperelastic stress: data generation,
/// experiments and reports.
#[derive(Parser)]
#[command(name = "hgp", version)]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    MooneyRivlin,
    MatrixExp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampling {
    UniformStretch,
    UniformSquaredStretch,
}

#[derive(Subcommand)]
enum Command {
    /// Write a labeled (B, σ) dataset as CSV plus a .meta.json sidecar.
    GenData {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bounds on the eigenvalues of B.
        #[arg(long, num_args = 2, value_names = ["L2", "U2"], default_values_t = [1.0, 1.5])]
        range: Vec<f64>,
        #[arg(long, value_enum, default_value = "uniform-stretch")]
        sampling: Sampling,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the experiment described by a TOML config.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Median/IQR summary of a results.csv, one row per (regressor, size).
    Report {
        results: PathBuf,
        /// Defaults to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn gen_data(kind: Kind, n: usize, seed: u64, range: &[f64], sampling: Sampling, output: PathBuf) -> hyperelastic_gp::Result<()> {
    let kind = match kind {
        Kind::MooneyRivlin => ProblemKind::MooneyRivlin,
        Kind::MatrixExp => ProblemKind::MatrixExp,
    };
    let mut spec = DatasetSpec::new(kind, n, StretchRange::new(range[0], range[1])?);
    spec.sampling = match sampling {
        Sampling::UniformStretch => SamplingMode::UniformStretch,
        Sampling::UniformSquaredStretch => SamplingMode::UniformSquaredStretch,
    };
    let pairs = make_dataset(&spec, &mut ChaCha8Rng::seed_from_u64(seed))?;
    save_pairs(&output, &pairs)?;
    DatasetMetadata::new(seed, spec).save(metadata_path(&output))?;
    eprintln!("wrote {} pairs to {}", pairs.len(), output.display());
    Ok(())
}

fn run(config: PathBuf, output_dir: Option<PathBuf>) -> hyperelastic_gp::Result<ExitCode> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    let out = experiments::run_learning_curve(&cfg)?;
    eprintln!(
        "{} trials run, {} resumed, {} failed; results in {}, summary in {}",
        out.executed.len(),
        out.resumed,
        out.failures,
        out.results_path.display(),
        out.summary_path.display()
    );
    Ok(if out.failures > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn report(results: PathBuf, output: Option<PathBuf>) -> hyperelastic_gp::Result<()> {
    let summary = experiments::report(&results)?;
    match output {
        Some(path) => write_summary(std::fs::File::create(path)?, &summary),
        None => write_summary(stdout().lock(), &summary),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = match cli.command {
        Command::GenData { kind, n, seed, range, sampling, output } => {
            gen_data(kind, n, seed, &range, sampling, output).map(|()| ExitCode::SUCCESS)
        }
        Command::Run { config, output_dir } => run(config, output_dir),
        Command::Report { results, output } => report(results, output).map(|()| ExitCode::SUCCESS),
    };
    outcome.unwrap_or_else(|e: Error| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
