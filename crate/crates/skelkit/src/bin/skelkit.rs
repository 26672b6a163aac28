//! Command line entry point: benchmark and one-shot skeletonization runs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skelkit::cli::{self, ExperimentConfig, PivotBenchKind};
use skelkit::embed::EmbedKind;
use skelkit::factors::Norm;

#[derive(Parser)]
#[command(
    name = "skelkit",
    about = "Randomized matrix skeletonization toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Experiment config file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the trial count
    #[arg(long)]
    trials: Option<usize>,
    /// Override the error norm (fro | spec)
    #[arg(long)]
    norm: Option<String>,
    /// Sketch dimension surplus: l = k + oversample
    #[arg(long)]
    oversample: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Error-versus-rank curves for the configured algorithms (CSV)
    ErrVsRank(ConfigArgs),
    /// Time the randomized embeddings (CSV: kind,m,n,l,seconds)
    BenchEmbed {
        /// Embedding kinds (gaussian | srtt | sparse-sign)
        #[arg(long, value_delimiter = ',', default_values_t = vec![
            "gaussian".to_string(), "srtt".to_string(), "sparse-sign".to_string()
        ])]
        kinds: Vec<String>,
        /// Ambient dimensions m
        #[arg(long, value_delimiter = ',', default_values_t = vec![1024usize, 2048, 4096])]
        m: Vec<usize>,
        /// Embedding dimensions l
        #[arg(long, value_delimiter = ',', default_values_t = vec![50usize, 100])]
        l: Vec<usize>,
        /// Number of embedded vectors (columns)
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the pivoting kernels on pre-generated sketches (CSV: kind,l,n,seconds)
    BenchPivot {
        /// Pivot paths (lupp | cpqr | deim)
        #[arg(long, value_delimiter = ',', default_values_t = vec![
            "lupp".to_string(), "cpqr".to_string(), "deim".to_string()
        ])]
        kinds: Vec<String>,
        /// Sketch dimensions l
        #[arg(long, value_delimiter = ',', default_values_t = vec![100usize, 200, 400])]
        l: Vec<usize>,
        /// Problem sizes n
        #[arg(long, value_delimiter = ',', default_values_t = vec![1000usize, 2000, 4000])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Select skeletons once and write the skeleton document
    Skeleton(ConfigArgs),
    /// Select skeletons, build the stable CUR, and export the factors
    Cur {
        #[command(flatten)]
        config: ConfigArgs,
        /// Directory for the exported factor files
        #[arg(long)]
        export_dir: Option<PathBuf>,
    },
}

fn load_with_overrides(args: &ConfigArgs) -> skelkit::Result<ExperimentConfig> {
    let mut cfg = cli::load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.display().to_string());
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(norm) = &args.norm {
        cfg.norm = norm.parse::<Norm>()?;
    }
    if let Some(oversample) = args.oversample {
        cfg.oversample = oversample;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_or_print(
    out: Option<&PathBuf>,
    cfg_out: Option<&String>,
    text: &str,
) -> skelkit::Result<()> {
    let target = out
        .map(|p| p.display().to_string())
        .or_else(|| cfg_out.cloned());
    match target {
        Some(path) => {
            std::fs::write(&path, text)?;
            eprintln!("wrote {path}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run() -> skelkit::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::ErrVsRank(args) => {
            let cfg = load_with_overrides(&args)?;
            let csv = cli::cmd_err_vs_rank(&cfg)?;
            write_or_print(args.out.as_ref(), cfg.out.as_ref(), &csv)?;
        }
        Command::BenchEmbed {
            kinds,
            m,
            l,
            n,
            trials,
            out,
        } => {
            let kinds: Vec<EmbedKind> = kinds
                .iter()
                .map(|s| s.parse())
                .collect::<skelkit::Result<_>>()?;
            let csv = cli::cmd_bench_embed(&kinds, &m, &l, n, trials)?;
            write_or_print(out.as_ref(), None, &csv)?;
        }
        Command::BenchPivot {
            kinds,
            l,
            n,
            trials,
            out,
        } => {
            let kinds: Vec<PivotBenchKind> = kinds
                .iter()
                .map(|s| s.parse())
                .collect::<skelkit::Result<_>>()?;
            let csv = cli::cmd_bench_pivot(&kinds, &l, &n, trials)?;
            write_or_print(out.as_ref(), None, &csv)?;
        }
        Command::Skeleton(args) => {
            let cfg = load_with_overrides(&args)?;
            let (skel, doc) = cli::cmd_skeleton(&cfg)?;
            eprintln!(
                "algorithm {}: |J_s| = {}, eta_col = {}, eta_row = {}",
                skel.algorithm,
                skel.rank(),
                skel.eta_col
                    .map(|e| format!("{e:.4e}"))
                    .unwrap_or_else(|| "-".into()),
                skel.eta_row
                    .map(|e| format!("{e:.4e}"))
                    .unwrap_or_else(|| "-".into()),
            );
            write_or_print(args.out.as_ref(), cfg.out.as_ref(), &doc)?;
        }
        Command::Cur { config, export_dir } => {
            let cfg = load_with_overrides(&config)?;
            let outcome = cli::cmd_cur(&cfg, export_dir.as_deref())?;
            eprintln!(
                "algorithm {}: eta_col = {}, eta_row = {}",
                outcome.skeleton.algorithm,
                outcome
                    .skeleton
                    .eta_col
                    .map(|e| format!("{e:.4e}"))
                    .unwrap_or_else(|| "-".into()),
                outcome
                    .skeleton
                    .eta_row
                    .map(|e| format!("{e:.4e}"))
                    .unwrap_or_else(|| "-".into()),
            );
            if let Some(rep) = outcome.report {
                eprintln!(
                    "err = {:.6e}, opt_err = {:.6e}, ratio = {:.4}",
                    rep.err, rep.opt_err, rep.ratio
                );
            }
            write_or_print(config.out.as_ref(), cfg.out.as_ref(), &outcome.document)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
