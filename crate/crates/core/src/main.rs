//! Thin command-line front end: one subcommand per lab, each driven by a
//! JSON config (inline preset or file). Exit codes: 0 success, 2 validation
//! error, 3 numerical non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fracnls::run::{execute, parse_config, preset, JobConfig, MlEvalJob, RunConfig, PRESET_NAMES};
use fracnls::RunError;

#[derive(Parser)]
#[command(name = "fracnls", about = "Space-time fractional NLS laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON config file for this subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Embedded preset name (thm11, masslimit, smoothing_kpv, illposed_p3, illposed_scaled).
    #[arg(long)]
    preset: Option<String>,
    /// Seed override for randomized labs.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, default_value = "fracnls_out")]
    out: PathBuf,
    /// Worker-thread cap.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Point-evaluate the Mittag-Leffler function (debugging aid).
    MlEval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 0.0)]
        z_re: f64,
        #[arg(long, default_value_t = 0.0)]
        z_im: f64,
    },
    /// Linear-flow time sweep: mass ratio, Sobolev norm, remainder decay.
    Linear {
        #[command(flatten)]
        common: Common,
    },
    /// Fixed-point solve of the nonlinear integral equation.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Solve and report the mixed-norm diagnostics.
    Norms {
        #[command(flatten)]
        common: Common,
    },
    /// Randomized smoothing-effect ratio experiment.
    Smoothing {
        #[command(flatten)]
        common: Common,
    },
    /// Randomized maximal-function ratio experiment.
    Maximal {
        #[command(flatten)]
        common: Common,
    },
    /// Frequency-growth experiment across a dyadic N sweep.
    Illposed {
        #[command(flatten)]
        common: Common,
    },
    /// Band autocorrelation: quadrature vs closed form, scaling law.
    HFunc {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::MlEval { common, .. }
            | Command::Linear { common }
            | Command::Solve { common }
            | Command::Norms { common }
            | Command::Smoothing { common }
            | Command::Maximal { common }
            | Command::Illposed { common }
            | Command::HFunc { common } => common,
        }
    }

    fn expected_job(&self) -> &'static str {
        match self {
            Command::MlEval { .. } => "ml-eval",
            Command::Linear { .. } => "linear",
            Command::Solve { .. } => "solve",
            Command::Norms { .. } => "norms",
            Command::Smoothing { .. } => "smoothing",
            Command::Maximal { .. } => "maximal",
            Command::Illposed { .. } => "illposed",
            Command::HFunc { .. } => "h-func",
        }
    }
}

fn load_config(command: &Command) -> Result<RunConfig, RunError> {
    let common = command.common();
    if common.config.is_some() && common.preset.is_some() {
        return Err(RunError::validation(
            "--config/--preset",
            "choose one of --config and --preset, not both",
        ));
    }
    let text = if let Some(path) = &common.config {
        std::fs::read_to_string(path)?
    } else if let Some(name) = &common.preset {
        preset(name)
            .ok_or_else(|| {
                RunError::validation(
                    "--preset",
                    format!("unknown preset `{name}` (available: {})", PRESET_NAMES.join(", ")),
                )
            })?
            .to_string()
    } else if let Command::MlEval {
        beta: Some(beta),
        rho,
        z_re,
        z_im,
        ..
    } = command
    {
        // inline point evaluation
        let config = RunConfig {
            seed: fracnls::run::DEFAULT_SEED,
            time_budget_secs: None,
            job: JobConfig::MlEval(MlEvalJob {
                beta: *beta,
                rho: *rho,
                z_re: *z_re,
                z_im: *z_im,
            }),
        };
        return Ok(config);
    } else {
        return Err(RunError::validation(
            "--config",
            "no configuration given (use --config, --preset, or inline flags for ml-eval)",
        ));
    };
    let mut config = parse_config(&text)?;
    if config.job.name() != command.expected_job() {
        return Err(RunError::validation(
            "subcommand",
            format!(
                "config is for `{}` but the command line says `{}`",
                config.job.name(),
                command.expected_job()
            ),
        ));
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common().clone();
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    match load_config(&cli.command).and_then(|config| execute(&config, &common.out)) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
