//! `ringflock <stability|spectrum|velocities|simulate|wave-verify>`.
//!
//! Exit codes: 0 stable or ok, 1 usage, configuration or I/O failure,
//! 2 negative result (unstable parameters, violated bound), 3 inconclusive.

mod commands;
mod config;
mod output;

pub use config::{
    ConfigError, NearestWeights, ParamsConfig, RunConfig, SimulateOptions, SpectrumOptions, StabilityOptions, WaveOptions,
    Weights,
};
pub use output::{num, write_atomic, Csv};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "RINGFLOCK_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ringflock", version, about = "Stability and wave propagation in ring formations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file; defaults are used for anything it omits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Ring size (overrides `params.n`).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Seed for random data (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Closed-form and spectral stability verdict.
    Stability,
    /// Eigenvalues, eigencurve and Hausdorff convergence.
    Spectrum,
    /// Phase, signal and group velocities.
    Velocities,
    /// Impulse experiment with wavefront detection.
    Simulate,
    /// Numerical check of the two-wave error bound over a ring-size sweep.
    WaveVerify,
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    configure_threads();

    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
        },
        None => RunConfig::default(),
    };
    if let Some(dir) = cli.out {
        cfg.output_dir = dir;
    }
    if let Some(n) = cli.n {
        cfg.params.n = n;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }

    let result = write_atomic(&cfg.output_dir, "resolved_config.toml", &cfg.to_toml())
        .map_err(commands::CliError::from)
        .and_then(|()| match cli.command {
            Command::Stability => commands::stability(&cfg, out),
            Command::Spectrum => commands::spectrum(&cfg, out),
            Command::Velocities => commands::velocities(&cfg, out),
            Command::Simulate => commands::simulate(&cfg, out),
            Command::WaveVerify => commands::wave_verify(&cfg, out),
        });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
