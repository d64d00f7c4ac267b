use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nhsub_cli::config::{self, ExperimentConfig};
use nhsub_cli::{experiments, parallel, Outcome};

#[derive(Parser)]
#[command(name = "nhsub", about = "Experiments on non-homogeneous subordinators", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a config file
    Run {
        /// Path to the `key = value` config
        config: PathBuf,
        /// Output directory (overrides the config's `outdir`)
        #[arg(long)]
        outdir: Option<PathBuf>,
        /// Seed override
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (fallback: NHSUB_THREADS, then all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in Lévy families and their parameters
    ListFamilies,
    /// Parse and validate a config, reporting every error found
    Validate { config: PathBuf },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(Outcome::UsageError.exit_code() as u8));
        }
    };
    match config::parse_config(&text) {
        Ok(c) => Ok(c),
        Err(errors) => {
            eprintln!("error: invalid config {}:", path.display());
            for e in errors {
                eprintln!("  {e}");
            }
            Err(ExitCode::from(Outcome::UsageError.exit_code() as u8))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, outdir, seed, threads } => {
            let mut cfg = match load_config(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let outdir = outdir
                .or_else(|| cfg.outdir.clone())
                .unwrap_or_else(|| PathBuf::from("nhsub-out"));
            let threads = parallel::thread_count(threads);
            let out = experiments::run(&cfg, &outdir, threads);
            match out.outcome {
                Outcome::Pass => {
                    println!("pass: artifacts in {}", out.out_dir.display());
                }
                Outcome::CheckFailed => {
                    println!("check failed: see {}", out.out_dir.join("summary.txt").display());
                }
                _ => {
                    eprintln!("error: {}", out.error.unwrap_or_default());
                }
            }
            ExitCode::from(out.outcome.exit_code() as u8)
        }
        Command::ListFamilies => {
            print!("{}", FAMILIES);
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load_config(&config) {
            Ok(cfg) => {
                println!(
                    "ok: {} experiment on the {} family",
                    cfg.experiment.name(),
                    family_label(&cfg)
                );
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
    }
}

fn family_label(cfg: &ExperimentConfig) -> &'static str {
    match cfg.family.name {
        config::FamilyName::Multistable => "multistable",
        config::FamilyName::GammaLike => "gammalike",
        config::FamilyName::Tempered => "tempered",
        config::FamilyName::DriftOnly => "driftonly",
        config::FamilyName::CustomTable => "custom-table",
    }
}

const FAMILIES: &str = "\
multistable   alpha: stability index in (0,1)          f(l,t) = l^alpha(t)
gammalike     alpha: rate > 0                          f(l,t) = log(1 + l/alpha(t))
tempered      alpha in (0,1), theta: tempering > 0     f(l,t) = (l+theta(t))^alpha(t) - theta(t)^alpha(t)
driftonly     drift: rate b'(t) >= 0                   f(l,t) = l b'(t)
custom-table  density_csv: s,t,nu grid (bilinear)      tail and exponent by quadrature

index grammar: constant c | affine a b lo hi | sinusoidal base amp [omega [phase]] | tabulated t:v,t:v,...
";
