//! Configuration parsing and subcommands of the `bgk` driver.

pub mod commands;
pub mod config;

pub use commands::{
    cmd_converge, cmd_riemann_exact, cmd_run, cmd_stability, CliError, Method, Report,
    StabilityOptions,
};
pub use config::{parse_config, ConfigError, RunConfig};

/// Caps the rayon pool at `BGK_THREADS` workers when the variable is set.
pub fn init_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(value) = value else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            ConfigError::Invalid(format!("BGK_THREADS = {value:?} is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::Invalid(format!("cannot size the thread pool: {e}")))?;
    Ok(())
}
