use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bgk_cli::commands::read_text;
use bgk_cli::{
    cmd_converge, cmd_riemann_exact, cmd_run, cmd_stability, init_threads, parse_config, CliError,
    ConfigError, Method, Report, StabilityOptions,
};
use bgk_core::scenarios::Scenario;
use bgk_core::stability::StabilityScan;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bgk", version, about = "Semi-Lagrangian BGK solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write snapshots, history and a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated output times.
        #[arg(long, value_delimiter = ',')]
        snapshots: Option<Vec<f64>>,
        /// Also sample the exact Euler solution at the final time.
        #[arg(long)]
        exact: bool,
    },
    /// Self-convergence study over doubling resolutions.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
    /// Linear stability bounds of a time integrator.
    Stability {
        #[arg(value_enum)]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scan gamma over the admissible interval (dirk3).
        #[arg(long)]
        scan_gamma: bool,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        gamma_step: f64,
        #[arg(long, default_value_t = 2001)]
        xi_samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        a_step: f64,
        #[arg(long, default_value_t = 4.0)]
        a_max: f64,
    },
    /// Exact Euler solution of a Riemann scenario.
    RiemannExact {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sampling time, the scenario's final time by default.
        #[arg(long)]
        t: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Dirk2,
    Dirk3,
    Bdf2,
    Bdf3,
}

const DEFAULT_OUT: &str = "out";

const DEFAULT_RESOLUTIONS: [usize; 4] = [160, 320, 640, 1280];

fn out_dir(flag: Option<PathBuf>, config: Option<&Path>) -> PathBuf {
    flag.or_else(|| config.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn load(path: &Path) -> Result<bgk_cli::RunConfig, CliError> {
    Ok(parse_config(&read_text(path)?)?)
}

fn execute(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Run {
            config,
            out,
            snapshots,
            exact,
        } => {
            let mut cfg = load(&config)?;
            if let Some(times) = snapshots {
                if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                    return Err(
                        ConfigError::Invalid("snapshot times must be non-negative".into()).into(),
                    );
                }
                cfg.snapshots = times;
            }
            if exact {
                if cfg.scenario.riemann_states().is_none() {
                    return Err(ConfigError::Invalid(format!(
                        "--exact needs a Riemann-type scenario, not {}",
                        cfg.scenario.id
                    ))
                    .into());
                }
                cfg.exact = true;
            }
            let out = out_dir(out, cfg.out.as_deref());
            cmd_run(&cfg, &out)
        }
        Command::Converge {
            config,
            out,
            resolutions,
        } => {
            let cfg = load(&config)?;
            let resolutions = resolutions
                .or_else(|| (!cfg.resolutions.is_empty()).then(|| cfg.resolutions.clone()))
                .unwrap_or_else(|| DEFAULT_RESOLUTIONS.to_vec());
            let out = out_dir(out, cfg.out.as_deref());
            cmd_converge(&cfg, &resolutions, &out)
        }
        Command::Stability {
            method,
            out,
            scan_gamma,
            gamma,
            gamma_step,
            xi_samples,
            a_step,
            a_max,
        } => {
            let method = match method {
                MethodArg::Dirk2 => Method::Dirk2,
                MethodArg::Dirk3 => Method::Dirk3,
                MethodArg::Bdf2 => Method::Bdf2,
                MethodArg::Bdf3 => Method::Bdf3,
            };
            let opts = StabilityOptions {
                scan: StabilityScan::new(xi_samples, a_step, a_max)?,
                gamma,
                scan_gamma,
                gamma_step,
            };
            cmd_stability(method, &opts, &out_dir(out, None))
        }
        Command::RiemannExact { config, out, t } => {
            let (scenario, cfg_out) = match config {
                Some(path) => {
                    let cfg = load(&path)?;
                    (cfg.scenario, cfg.out)
                }
                None => (Scenario::riemann(), None),
            };
            let t = t.unwrap_or(scenario.t_final);
            cmd_riemann_exact(&scenario, t, &out_dir(out, cfg_out.as_deref()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads(std::env::var("BGK_THREADS").ok().as_deref())
        .and_then(|()| execute(cli.command));
    match result {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
