//! Subcommand implementations; each returns the text printed on success.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bgk_core::integrators::{run, BdfCoeffs, Tableau, Trajectory};
use bgk_core::io::{
    exact_rows, history_rows, rate_rows, snapshot_rows, write_history, write_rates, write_snapshot,
    write_table,
};
use bgk_core::scenarios::{
    conservation_error, convergence_table, RiemannSolution, Scenario, GAMMA,
};
use bgk_core::stability::{
    bdf_max_cfl, bdf_scan, dirk3_from_gamma, fs_scan, gamma_interval, optimize_gamma, rk_y_star,
    StabilityScan,
};
use bgk_core::{Error as CoreError, NewtonConfig};

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("I/O error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    /// 2 for configuration, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(CoreError::Io(_) | CoreError::Parse(_)) => 4,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 4,
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

/// Output listing shared by all commands.
#[derive(Debug, Default)]
pub struct Report {
    pub text: String,
    pub files: Vec<PathBuf>,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn file(&mut self, p: PathBuf) {
        self.files.push(p);
    }

    fn finish(mut self) -> Self {
        for f in &self.files {
            let _ = writeln!(self.text, "wrote {}", f.display());
        }
        self
    }
}

fn simulate(cfg: &RunConfig, snapshots: &[f64]) -> Result<(Trajectory, f64), CliError> {
    let s = &cfg.scenario;
    let grid = s.grid()?;
    let f0 = s.initial_data(&grid)?;
    let mut settings = s.settings()?.with_snapshots(snapshots.to_vec());
    if let Some(tol) = cfg.newton_tol {
        settings = settings.with_newton(NewtonConfig::with_tol(tol)?);
    }
    let start = Instant::now();
    let traj = run(cfg.scheme, &f0, &grid, &settings)?;
    Ok((traj, start.elapsed().as_secs_f64()))
}

/// Exact solution and jump position of a Riemann-type scenario.
fn riemann_setup(s: &Scenario) -> Result<(RiemannSolution, f64), CliError> {
    match (s.riemann_states(), s.jump_position()) {
        (Some((l, r)), Some(x0)) => Ok((RiemannSolution::solve(l, r, GAMMA)?, x0)),
        _ => {
            Err(ConfigError::Invalid(format!("scenario {} is not a Riemann problem", s.id)).into())
        }
    }
}

fn time_label(t: f64) -> String {
    format!("{t}").replace('-', "m")
}

/// Runs one scenario and writes snapshots, the conservation history and a summary.
pub fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    ensure_dir(out)?;
    let (traj, wall) = simulate(cfg, &cfg.snapshots)?;
    let grid = &traj.grid;
    let s = &cfg.scenario;
    let mut report = Report::default();

    for snap in &traj.snapshots {
        let path = out.join(format!("snapshot_t{}.csv", time_label(snap.requested)));
        write_snapshot(&path, &snapshot_rows(&snap.f, grid)?)?;
        report.file(path);
    }
    let path = out.join("final.csv");
    write_snapshot(&path, &snapshot_rows(&traj.final_state, grid)?)?;
    report.file(path);
    let path = out.join("history.csv");
    write_history(&path, &history_rows(&traj))?;
    report.file(path);
    if cfg.exact {
        let (solution, x0) = riemann_setup(s)?;
        let path = out.join("exact.csv");
        write_snapshot(&path, &exact_rows(&solution, grid, x0, traj.final_time()))?;
        report.file(path);
    }

    let drift = conservation_error(&traj)?;
    let stats = traj.newton;
    let mut summary = Report::default();
    summary.line(format!("scheme      {}", cfg.scheme));
    summary.line(format!(
        "scenario    {} (nx = {}, nv = {}, cfl = {}, kappa = {:e})",
        s.id, s.nx, s.nv, s.cfl, s.kappa
    ));
    summary.line(format!(
        "time        t = {} in {} steps, dt = {:e}",
        traj.final_time(),
        traj.steps(),
        traj.dt
    ));
    summary.line(format!("wall time   {wall:.3} s"));
    if stats.solves > 0 {
        summary.line(format!(
            "newton      {} solves, mean {:.2} and max {} iterations, max residual {:.2e}",
            stats.solves,
            stats.mean_iterations(),
            stats.max_iterations,
            stats.max_residual
        ));
    } else {
        summary.line("newton      continuous Maxwellian, no solves");
    }
    let names = ["mass", "momentum", "energy"];
    let parts: Vec<String> = (0..3)
        .map(|l| {
            format!(
                "{} {:.3e}{}",
                names[l],
                drift.values[l],
                if drift.absolute[l] { " (absolute)" } else { "" }
            )
        })
        .collect();
    summary.line(format!("drift       {}", parts.join(", ")));
    let path = out.join("summary.txt");
    fs::write(&path, &summary.text).map_err(|e| io_error(&path, e))?;
    report.text = summary.text;
    report.file(path);
    Ok(report.finish())
}

/// Self-convergence study on the configured scenario.
pub fn cmd_converge(
    cfg: &RunConfig,
    resolutions: &[usize],
    out: &Path,
) -> Result<Report, CliError> {
    ensure_dir(out)?;
    let table = convergence_table(cfg.scheme, &cfg.scenario, resolutions)?;
    let rows = rate_rows(&table);
    let path = out.join("rates.csv");
    write_rates(&path, &rows)?;
    let mut report = Report::default();
    report.line(format!(
        "{} on {} (kappa = {:e}, cfl = {}, t = {})",
        cfg.scheme, cfg.scenario.id, cfg.scenario.kappa, cfg.scenario.cfl, cfg.scenario.t_final
    ));
    report.line(format!("{:>12} {:>12} {:>8}", "pair", "error", "rate"));
    for r in &rows {
        report.line(format!(
            "{:>12} {:>12.3e} {:>8}",
            format!("{}-{}", r.nx_coarse, r.nx_fine),
            r.error,
            r.rate.map_or("-".to_string(), |x| format!("{x:.2}"))
        ));
    }
    report.file(path);
    Ok(report.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dirk2,
    Dirk3,
    Bdf2,
    Bdf3,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Dirk2 => "dirk2",
            Method::Dirk3 => "dirk3",
            Method::Bdf2 => "bdf2",
            Method::Bdf3 => "bdf3",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityOptions {
    pub scan: StabilityScan,
    /// Replaces the default `gamma = 0.3` of DIRK3.
    pub gamma: Option<f64>,
    pub scan_gamma: bool,
    pub gamma_step: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            scan: StabilityScan::default(),
            gamma: None,
            scan_gamma: false,
            gamma_step: 1e-3,
        }
    }
}

/// CFL numbers of the `a, max_root` table.
const BDF_TABLE_STEP: f64 = 0.01;

pub fn cmd_stability(
    method: Method,
    opts: &StabilityOptions,
    out: &Path,
) -> Result<Report, CliError> {
    opts.scan.validate()?;
    if opts.scan_gamma && method != Method::Dirk3 {
        return Err(ConfigError::Invalid("--scan-gamma applies to dirk3 only".into()).into());
    }
    if opts.gamma.is_some() && method != Method::Dirk3 {
        return Err(ConfigError::Invalid("--gamma applies to dirk3 only".into()).into());
    }
    ensure_dir(out)?;
    let mut report = Report::default();
    match method {
        Method::Dirk2 | Method::Dirk3 => {
            let tab = match (method, opts.gamma) {
                (Method::Dirk2, _) => Tableau::dirk2(),
                (_, Some(g)) => dirk3_from_gamma(g)?,
                _ => Tableau::dirk3(),
            };
            let y = rk_y_star(tab.b(), tab.c(), &opts.scan);
            report.line(format!(
                "{}: y* = {y:.9}, a* = {:.6}",
                method.name(),
                y / std::f64::consts::PI
            ));
            let rows: Vec<Vec<f64>> = fs_scan(tab.b(), tab.c(), &opts.scan)
                .into_iter()
                .map(|(y, f)| vec![y, f])
                .collect();
            let path = out.join(format!("fs_{}.csv", method.name()));
            write_table(&path, &["y", "F_s"], &rows)?;
            report.file(path);
            if opts.scan_gamma {
                let scan = optimize_gamma(gamma_interval(), opts.gamma_step, &opts.scan)?;
                report.line(format!(
                    "optimal gamma = {} with y* = {:.9}",
                    scan.gamma_opt, scan.y_star_opt
                ));
                let rows: Vec<Vec<f64>> = scan.rows.iter().map(|&(g, y)| vec![g, y]).collect();
                let path = out.join("gamma_scan.csv");
                write_table(&path, &["gamma", "y_star"], &rows)?;
                report.file(path);
            }
        }
        Method::Bdf2 | Method::Bdf3 => {
            let coeffs = if method == Method::Bdf2 {
                BdfCoeffs::bdf2()
            } else {
                BdfCoeffs::bdf3()
            };
            let a = bdf_max_cfl(&coeffs, &opts.scan)?;
            report.line(format!("{}: a* = {a:.6}", method.name()));
            let n = (opts.scan.a_max / BDF_TABLE_STEP + 1e-9).floor() as usize;
            let cfls: Vec<f64> = (1..=n).map(|k| k as f64 * BDF_TABLE_STEP).collect();
            let rows: Vec<Vec<f64>> = bdf_scan(&coeffs, &cfls, &opts.scan)?
                .into_iter()
                .map(|(a, r)| vec![a, r])
                .collect();
            let path = out.join(format!("max_root_{}.csv", method.name()));
            write_table(&path, &["a", "max_root"], &rows)?;
            report.file(path);
        }
    }
    Ok(report.finish())
}

/// Exact Euler solution of the scenario's Riemann problem on its grid at `t`.
pub fn cmd_riemann_exact(scenario: &Scenario, t: f64, out: &Path) -> Result<Report, CliError> {
    let (solution, x0) = riemann_setup(scenario)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(ConfigError::Invalid(format!("time must be positive, got {t}")).into());
    }
    ensure_dir(out)?;
    let grid = scenario.grid()?;
    let mut report = Report::default();
    report.line(format!(
        "p* = {:.10}, u* = {:.10}, rho*L = {:.10}, rho*R = {:.10}",
        solution.p_star,
        solution.u_star,
        solution.rho_star_left(),
        solution.rho_star_right()
    ));
    report.line(format!("left wave  {:?}", solution.left_wave()));
    report.line(format!("right wave {:?}", solution.right_wave()));
    let path = out.join("exact.csv");
    write_snapshot(&path, &exact_rows(&solution, &grid, x0, t))?;
    report.file(path);
    Ok(report.finish())
}
