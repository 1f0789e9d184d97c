//! Conservation drift, distance to equilibrium, convergence tables and shock diagnostics.

use crate::error::{Error, Result};
use crate::grid::{compute_moments, BoundaryCondition, Distribution, PhaseGrid};
use crate::integrators::{run, SchemeSpec, StepRecord, Trajectory};
use crate::maxwellian::{equilibrium, MaxwellianKind, NewtonConfig};
use crate::scenarios::riemann::RiemannSolution;
use crate::scenarios::Scenario;

/// Drift of the three moment totals.
///
/// Moments whose initial total vanishes report the absolute drift and are flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationError {
    pub values: [f64; 3],
    pub absolute: [bool; 3],
}

impl ConservationError {
    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Drift of `totals` from `reference`, measured relative to `initial`.
    pub fn between(initial: [f64; 3], totals: [f64; 3], reference: [f64; 3]) -> Self {
        let scale = initial[0].abs().max(initial[2].abs());
        let mut values = [0.0; 3];
        let mut absolute = [false; 3];
        for l in 0..3 {
            let diff = (totals[l] - reference[l]).abs();
            if initial[l].abs() <= 1e-13 * scale {
                values[l] = diff;
                absolute[l] = true;
            } else {
                values[l] = diff / initial[l].abs();
            }
        }
        Self { values, absolute }
    }
}

/// Final drift of a run.
///
/// The reference is the initial totals advanced by the boundary fluxes the scheme
/// reports, so on periodic grids it is simply the initial totals.
pub fn conservation_error(traj: &Trajectory) -> Result<ConservationError> {
    if traj.records.len() < 2 {
        return Err(Error::InsufficientData(
            "conservation error needs at least one step".into(),
        ));
    }
    let last = traj.records.last().expect("non-empty");
    Ok(ConservationError::between(
        traj.initial_totals(),
        last.totals,
        last.reference,
    ))
}

/// Drift after every step, entry 0 being the initial state.
pub fn conservation_history(traj: &Trajectory) -> Vec<(StepRecord, ConservationError)> {
    let initial = traj.initial_totals();
    traj.records
        .iter()
        .map(|r| {
            (
                *r,
                ConservationError::between(initial, r.totals, r.reference),
            )
        })
        .collect()
}

/// `sum |f - M| dv dx` with the continuous or discrete local Maxwellian.
pub fn distance_to_equilibrium(
    f: &Distribution,
    grid: &PhaseGrid,
    kind: MaxwellianKind,
    newton: &NewtonConfig,
) -> Result<f64> {
    let (m, _) = equilibrium(f, grid, kind, newton)?;
    Ok(f.l1_distance(&m, grid))
}

const MIDPOINT_WEIGHTS: [f64; 6] = [
    3.0 / 256.0,
    -25.0 / 256.0,
    150.0 / 256.0,
    150.0 / 256.0,
    -25.0 / 256.0,
    3.0 / 256.0,
];

/// Values of a fine cell-centred field at the centres of the twice coarser grid.
///
/// Coarse centres sit halfway between fine centres `2i` and `2i + 1`, so they are
/// interpolated with the sixth-order midpoint rule.
pub fn restrict_to_coarse(fine: &[f64], bc: BoundaryCondition) -> Result<Vec<f64>> {
    let n = fine.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "fine field needs an even number of cells, got {n}"
        )));
    }
    let at = |k: isize| -> f64 {
        let idx = match bc {
            BoundaryCondition::Periodic => k.rem_euclid(n as isize),
            BoundaryCondition::FreeFlow => k.clamp(0, n as isize - 1),
        };
        fine[idx as usize]
    };
    Ok((0..n / 2)
        .map(|i| {
            let base = 2 * i as isize - 2;
            MIDPOINT_WEIGHTS
                .iter()
                .enumerate()
                .map(|(k, w)| w * at(base + k as isize))
                .sum()
        })
        .collect())
}

/// Self-convergence errors and rates.
///
/// `errors[k]` compares resolutions `k` and `k + 1`; `rates[k]` is
/// `log2(errors[k] / errors[k + 1])` and is `None` when undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub resolutions: Vec<usize>,
    pub errors: Vec<f64>,
    pub rates: Vec<Option<f64>>,
}

impl ConvergenceTable {
    pub fn finest_rate(&self) -> Option<f64> {
        self.rates.last().copied().flatten()
    }
}

fn relative_l1(a: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).abs()).sum();
    let den: f64 = reference.iter().map(|y| y.abs()).sum();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Builds the table from densities on successively doubled grids.
pub fn convergence_from_levels(
    levels: &[Vec<f64>],
    bc: BoundaryCondition,
) -> Result<ConvergenceTable> {
    if levels.len() < 2 {
        return Err(Error::InsufficientData(
            "convergence needs at least two resolutions".into(),
        ));
    }
    let mut errors = Vec::with_capacity(levels.len() - 1);
    for pair in levels.windows(2) {
        if pair[1].len() != 2 * pair[0].len() {
            return Err(Error::InvalidParameter(format!(
                "resolutions must double, got {} then {}",
                pair[0].len(),
                pair[1].len()
            )));
        }
        let restricted = restrict_to_coarse(&pair[1], bc)?;
        errors.push(relative_l1(&pair[0], &restricted));
    }
    let rates = errors
        .windows(2)
        .map(|e| {
            let r = (e[0] / e[1]).log2();
            (e[0] > 0.0 && e[1] > 0.0 && r.is_finite()).then_some(r)
        })
        .collect();
    Ok(ConvergenceTable {
        resolutions: levels.iter().map(Vec::len).collect(),
        errors,
        rates,
    })
}

/// Runs `scenario` at each `N_x` and compares final densities on consecutive grids.
pub fn convergence_table(
    spec: SchemeSpec,
    scenario: &Scenario,
    resolutions: &[usize],
) -> Result<ConvergenceTable> {
    if resolutions.len() < 2 {
        return Err(Error::InsufficientData(
            "convergence needs at least two resolutions".into(),
        ));
    }
    if let Some(w) = resolutions.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidParameter(format!(
            "resolutions must double, got {} then {}",
            w[0], w[1]
        )));
    }
    let settings = scenario.settings()?;
    let mut levels = Vec::with_capacity(resolutions.len());
    for &nx in resolutions {
        let grid = scenario.clone().with_resolution(nx, scenario.nv).grid()?;
        let f0 = scenario.initial_data(&grid)?;
        let traj = run(spec, &f0, &grid, &settings)?;
        levels.push(compute_moments(&traj.final_state, &grid)?.rho());
    }
    convergence_from_levels(&levels, scenario.bc)
}

/// `sum |rho_i - rho_exact(x_i)| dx` against the exact solution centred at `x0`.
pub fn l1_density_error(
    rho: &[f64],
    grid: &PhaseGrid,
    exact: &RiemannSolution,
    x0: f64,
    t: f64,
) -> f64 {
    rho.iter()
        .enumerate()
        .map(|(i, r)| (r - exact.sample_at(grid.x(i), x0, t).rho).abs())
        .sum::<f64>()
        * grid.dx()
}

/// Rightmost point where `values` drops from at least `level` to below it,
/// linearly interpolated between cell centres.
pub fn front_position(x: &[f64], values: &[f64], level: f64) -> Option<f64> {
    (0..values.len().saturating_sub(1)).rev().find_map(|i| {
        let (a, b) = (values[i], values[i + 1]);
        (a >= level && b < level).then(|| x[i] + (a - level) / (a - b) * (x[i + 1] - x[i]))
    })
}
