//! Continuous Maxwellians and the discrete Maxwellian projection.
//!
//! The discrete Maxwellian of a cell is the exponential-family row
//! `exp(a . phi(v_j))` whose midpoint-rule moments match a target triple
//! `(rho, rho U, E)`. The coefficients `a` are found by a damped Newton iteration
//! seeded with the log-parameters of the continuous Maxwellian.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{mirrored_sum, row_moments, Distribution, Moments, PhaseGrid};

/// Pivot ratio below which the 3x3 Newton system is treated as singular.
const MIN_PIVOT_RATIO: f64 = 1e-15;

/// Which equilibrium closes the collision operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxwellianKind {
    Continuous,
    Discrete,
}

/// Settings of the moment-matching Newton solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Bound on `max_l |target_l - sum_j dM_j phi_l(v_j) dv|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Step-halving cap of the backtracking line search.
    pub max_halvings: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iter: 50,
            max_halvings: 8,
        }
    }
}

impl NewtonConfig {
    pub fn with_tol(tol: f64) -> Result<Self> {
        let cfg = Self {
            tol,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Newton tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "Newton iteration cap must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Exponential-family coefficients `a` with `dM_j = exp(a . phi(v_j))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DMaxCoeffs(pub [f64; 3]);

impl DMaxCoeffs {
    /// Log-parameters of the continuous Maxwellian with density, velocity and temperature.
    pub fn from_primitive(rho: f64, u: f64, temperature: f64) -> Self {
        Self([
            (rho / (2.0 * PI * temperature).sqrt()).ln() - u * u / (2.0 * temperature),
            u / temperature,
            -1.0 / temperature,
        ])
    }

    #[inline]
    pub fn eval(&self, v: f64) -> f64 {
        (self.0[0] + self.0[1] * v + self.0[2] * 0.5 * v * v).exp()
    }

    pub fn row(&self, velocities: &[f64]) -> Vec<f64> {
        velocities.iter().map(|&v| self.eval(v)).collect()
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }
}

/// Result of one discrete-Maxwellian solve.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMaxwellian {
    pub coeffs: DMaxCoeffs,
    pub row: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Newton bookkeeping aggregated over many cells.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NewtonStats {
    pub solves: usize,
    pub total_iterations: usize,
    pub max_iterations: usize,
    pub max_residual: f64,
}

impl NewtonStats {
    fn record(&mut self, iterations: usize, residual: f64) {
        self.solves += 1;
        self.total_iterations += iterations;
        self.max_iterations = self.max_iterations.max(iterations);
        self.max_residual = self.max_residual.max(residual);
    }

    pub fn merge(&mut self, other: &NewtonStats) {
        self.solves += other.solves;
        self.total_iterations += other.total_iterations;
        self.max_iterations = self.max_iterations.max(other.max_iterations);
        self.max_residual = self.max_residual.max(other.max_residual);
    }

    pub fn mean_iterations(&self) -> f64 {
        if self.solves == 0 {
            0.0
        } else {
            self.total_iterations as f64 / self.solves as f64
        }
    }
}

fn check_realizable(m: &Moments) -> Result<(f64, f64, f64)> {
    let rho = m.rho;
    let temperature = if rho > 0.0 { m.temperature() } else { f64::NAN };
    if !(rho > 0.0 && temperature > 0.0 && rho.is_finite() && temperature.is_finite()) {
        return Err(Error::NonpositiveState {
            cell: None,
            rho,
            temperature,
        });
    }
    Ok((rho, m.velocity(), temperature))
}

/// `rho / sqrt(2 pi T) exp(-(v - U)^2 / (2T))` with `(rho, U, T)` derived from `m`.
pub fn continuous_maxwellian(m: &Moments, velocities: &[f64]) -> Result<Vec<f64>> {
    let (rho, u, t) = check_realizable(m)?;
    Ok(maxwellian_row(rho, u, t, velocities))
}

/// Continuous Maxwellian directly from primitive variables.
pub fn maxwellian_row(rho: f64, u: f64, temperature: f64, velocities: &[f64]) -> Vec<f64> {
    let scale = rho / (2.0 * PI * temperature).sqrt();
    velocities
        .iter()
        .map(|&v| scale * (-(v - u) * (v - u) / (2.0 * temperature)).exp())
        .collect()
}

/// Analytic Jacobian `J_lm = sum_j phi_l phi_m exp(a . phi(v_j)) dv` of the moment map.
pub fn newton_jacobian(a: &DMaxCoeffs, velocities: &[f64], dv: f64) -> [[f64; 3]; 3] {
    let weights: Vec<f64> = velocities.iter().map(|&v| a.eval(v)).collect();
    jacobian_from_weights(&weights, velocities, dv)
}

/// `target - sum_j exp(a . phi(v_j)) phi(v_j) dv`.
pub fn moment_residual(a: &DMaxCoeffs, target: &Moments, velocities: &[f64], dv: f64) -> [f64; 3] {
    let weights: Vec<f64> = velocities.iter().map(|&v| a.eval(v)).collect();
    residual_from_weights(&weights, target, velocities, dv)
}

fn jacobian_from_weights(w: &[f64], velocities: &[f64], dv: f64) -> [[f64; 3]; 3] {
    // distinct entries of phi phi^T: 1, v, v^2/2, v^3/2, v^4/4
    let s = mirrored_sum(w.len(), |j| {
        let (wj, v) = (w[j], velocities[j]);
        let v2 = v * v;
        [
            wj,
            wj * v,
            wj * 0.5 * v2,
            wj * 0.5 * v2 * v,
            wj * 0.25 * v2 * v2,
        ]
    })
    .map(|x| x * dv);
    [
        [s[0], s[1], s[2]],
        [s[1], 2.0 * s[2], s[3]],
        [s[2], s[3], s[4]],
    ]
}

fn residual_from_weights(w: &[f64], target: &Moments, velocities: &[f64], dv: f64) -> [f64; 3] {
    let m = row_moments(w, velocities, dv);
    [
        target.rho - m.rho,
        target.momentum - m.momentum,
        target.energy - m.energy,
    ]
}

fn max_abs(r: &[f64; 3]) -> f64 {
    r.iter().fold(0.0f64, |acc, x| {
        if x.is_nan() {
            f64::NAN
        } else {
            acc.max(x.abs())
        }
    })
}

/// Gaussian elimination with partial pivoting on a 3x3 system.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    let mut pivots = [0.0f64; 3];
    for col in 0..3 {
        let p = (col..3)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap_or(col);
        a.swap(col, p);
        b.swap(col, p);
        let pivot = a[col][col];
        pivots[col] = pivot.abs();
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularJacobian {
                cell: None,
                pivot_ratio: 0.0,
            });
        }
        for row in col + 1..3 {
            let factor = a[row][col] / pivot;
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let largest = pivots.iter().copied().fold(0.0, f64::max);
    let smallest = pivots.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = smallest / largest;
    if ratio < MIN_PIVOT_RATIO {
        return Err(Error::SingularJacobian {
            cell: None,
            pivot_ratio: ratio,
        });
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

#[inline]
fn fill_weights(a: &[f64; 3], velocities: &[f64], out: &mut [f64]) {
    for (w, &v) in out.iter_mut().zip(velocities) {
        *w = (a[0] + a[1] * v + a[2] * 0.5 * v * v).exp();
    }
}

/// Per-solve summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveInfo {
    pub coeffs: DMaxCoeffs,
    pub iterations: usize,
    pub residual: f64,
}

/// Newton solve writing the discrete Maxwellian row into `out`.
pub fn discrete_maxwellian_into(
    target: &Moments,
    velocities: &[f64],
    dv: f64,
    cfg: &NewtonConfig,
    out: &mut [f64],
) -> Result<SolveInfo> {
    if velocities.len() < 3 {
        return Err(Error::RankDeficientGrid {
            nodes: velocities.len(),
        });
    }
    let (rho, u, t) = check_realizable(target)?;
    let mut a = DMaxCoeffs::from_primitive(rho, u, t).0;
    let n = velocities.len();
    let mut trial = vec![0.0; n];

    fill_weights(&a, velocities, out);
    let mut r = residual_from_weights(out, target, velocities, dv);
    let mut rn = max_abs(&r);
    let mut iterations = 0;
    while !(rn < cfg.tol) {
        if iterations == cfg.max_iter || !rn.is_finite() {
            return Err(Error::NewtonDiverged {
                cell: None,
                residual: rn,
                iterations,
            });
        }
        let jac = jacobian_from_weights(out, velocities, dv);
        let step = solve3(jac, r)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            let a_try = [
                a[0] + lambda * step[0],
                a[1] + lambda * step[1],
                a[2] + lambda * step[2],
            ];
            fill_weights(&a_try, velocities, &mut trial);
            let r_try = residual_from_weights(&trial, target, velocities, dv);
            let rn_try = max_abs(&r_try);
            if rn_try < rn {
                a = a_try;
                r = r_try;
                rn = rn_try;
                out.copy_from_slice(&trial);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        iterations += 1;
        if !accepted {
            return Err(Error::NewtonDiverged {
                cell: None,
                residual: rn,
                iterations,
            });
        }
    }
    if !(a[2] < 0.0) {
        return Err(Error::NonDecaying {
            cell: None,
            quadratic: a[2],
        });
    }
    Ok(SolveInfo {
        coeffs: DMaxCoeffs(a),
        iterations,
        residual: rn,
    })
}

/// Discrete Maxwellian whose discrete moments match `target` within `cfg.tol`.
pub fn discrete_maxwellian(
    target: &Moments,
    velocities: &[f64],
    dv: f64,
    cfg: &NewtonConfig,
) -> Result<DiscreteMaxwellian> {
    let mut row = vec![0.0; velocities.len()];
    let info = discrete_maxwellian_into(target, velocities, dv, cfg, &mut row)?;
    Ok(DiscreteMaxwellian {
        coeffs: info.coeffs,
        row,
        iterations: info.iterations,
        residual: info.residual,
    })
}

/// Equilibrium row of kind `kind` with the moments `target`, written into `out`.
///
/// Returns the Newton summary for the discrete Maxwellian and `None` for the continuous one.
pub fn local_equilibrium_into(
    target: &Moments,
    velocities: &[f64],
    dv: f64,
    kind: MaxwellianKind,
    cfg: &NewtonConfig,
    out: &mut [f64],
) -> Result<Option<SolveInfo>> {
    match kind {
        MaxwellianKind::Continuous => {
            let (rho, u, t) = check_realizable(target)?;
            let scale = rho / (2.0 * PI * t).sqrt();
            for (d, &v) in out.iter_mut().zip(velocities) {
                *d = scale * (-(v - u) * (v - u) / (2.0 * t)).exp();
            }
            Ok(None)
        }
        MaxwellianKind::Discrete => {
            discrete_maxwellian_into(target, velocities, dv, cfg, out).map(Some)
        }
    }
}

/// Folds per-cell outcomes in cell order, reporting the first failing cell.
pub(crate) fn collect_cell_results(results: Vec<Result<Option<SolveInfo>>>) -> Result<NewtonStats> {
    let mut stats = NewtonStats::default();
    for (i, r) in results.into_iter().enumerate() {
        if let Some(info) = r.map_err(|e| e.in_cell(i))? {
            stats.record(info.iterations, info.residual);
        }
    }
    Ok(stats)
}

/// Local equilibrium of every cell of `f`.
pub fn equilibrium(
    f: &Distribution,
    grid: &PhaseGrid,
    kind: MaxwellianKind,
    cfg: &NewtonConfig,
) -> Result<(Distribution, NewtonStats)> {
    f.ensure_matches(grid)?;
    let n_vel = grid.n_vel();
    let dv = grid.dv();
    let velocities = grid.velocities();
    let mut out = Distribution::zeros(grid);
    let results: Vec<_> = out
        .values_mut()
        .par_chunks_mut(n_vel)
        .zip(f.values().par_chunks(n_vel))
        .map(|(dst, src)| {
            let m = row_moments(src, velocities, dv);
            local_equilibrium_into(&m, velocities, dv, kind, cfg, dst)
        })
        .collect();
    let stats = collect_cell_results(results)?;
    Ok((out, stats))
}
