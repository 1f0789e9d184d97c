//! Benchmark problems, the exact Euler reference and solution diagnostics.

pub mod diagnostics;
pub mod riemann;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub use diagnostics::{
    conservation_error, conservation_history, convergence_from_levels, convergence_table,
    distance_to_equilibrium, front_position, l1_density_error, restrict_to_coarse,
    ConservationError, ConvergenceTable,
};
pub use riemann::{exact_euler_riemann, EulerState, RiemannSolution, Wave};

use crate::error::{Error, Result};
use crate::grid::{BoundaryCondition, Distribution, PhaseGrid};
use crate::integrators::RunSettings;
use crate::maxwellian::maxwellian_row;

/// Polytropic constant of the 1D monoatomic gas.
pub const GAMMA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    SingleShock,
    SmoothAccuracy,
    APRelaxation,
    Riemann,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 4] = [
        ScenarioId::SingleShock,
        ScenarioId::SmoothAccuracy,
        ScenarioId::APRelaxation,
        ScenarioId::Riemann,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::SingleShock => "single-shock",
            ScenarioId::SmoothAccuracy => "smooth",
            ScenarioId::APRelaxation => "ap",
            ScenarioId::Riemann => "riemann",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match key.as_str() {
            "singleshock" | "shock" | "test1" | "1" => Ok(ScenarioId::SingleShock),
            "smooth" | "smoothaccuracy" | "accuracy" | "test2" | "2" => {
                Ok(ScenarioId::SmoothAccuracy)
            }
            "ap" | "aprelaxation" | "relaxation" | "test3" | "3" => Ok(ScenarioId::APRelaxation),
            "riemann" | "test4" | "4" => Ok(ScenarioId::Riemann),
            _ => Err(Error::InvalidParameter(format!("unknown scenario '{s}'"))),
        }
    }
}

/// A test problem with its default discretization and physical parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: ScenarioId,
    pub x_min: f64,
    pub x_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub nx: usize,
    /// Velocity intervals.
    pub nv: usize,
    pub bc: BoundaryCondition,
    pub t_final: f64,
    pub kappa: f64,
    pub cfl: f64,
    /// Mach number of the single shock.
    pub mach: f64,
}

impl Scenario {
    pub fn new(id: ScenarioId) -> Self {
        match id {
            ScenarioId::SingleShock => Self {
                id,
                x_min: 0.0,
                x_max: 5.0,
                v_min: -20.0,
                v_max: 20.0,
                nx: 100,
                nv: 40,
                bc: BoundaryCondition::FreeFlow,
                t_final: 0.4,
                kappa: 1e-6,
                cfl: 2.0,
                mach: 2.0,
            },
            ScenarioId::SmoothAccuracy => Self {
                id,
                x_min: -1.0,
                x_max: 1.0,
                v_min: -10.0,
                v_max: 10.0,
                nx: 160,
                nv: 20,
                bc: BoundaryCondition::Periodic,
                t_final: 0.32,
                kappa: 1e-6,
                cfl: 2.0,
                mach: 2.0,
            },
            ScenarioId::APRelaxation => Self {
                id,
                x_min: -1.0,
                x_max: 1.0,
                v_min: -8.0,
                v_max: 8.0,
                nx: 100,
                nv: 20,
                bc: BoundaryCondition::Periodic,
                t_final: 0.02,
                kappa: 1e-4,
                cfl: 1.0,
                mach: 2.0,
            },
            ScenarioId::Riemann => Self {
                id,
                x_min: 0.0,
                x_max: 1.0,
                v_min: -10.0,
                v_max: 10.0,
                nx: 200,
                nv: 30,
                bc: BoundaryCondition::FreeFlow,
                t_final: 0.16,
                kappa: 1e-6,
                cfl: 2.0,
                mach: 2.0,
            },
        }
    }

    pub fn single_shock() -> Self {
        Self::new(ScenarioId::SingleShock)
    }

    pub fn smooth() -> Self {
        Self::new(ScenarioId::SmoothAccuracy)
    }

    pub fn ap() -> Self {
        Self::new(ScenarioId::APRelaxation)
    }

    pub fn riemann() -> Self {
        Self::new(ScenarioId::Riemann)
    }

    pub fn with_resolution(mut self, nx: usize, nv: usize) -> Self {
        self.nx = nx;
        self.nv = nv;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn grid(&self) -> Result<PhaseGrid> {
        PhaseGrid::new(
            self.x_min, self.x_max, self.nx, self.v_min, self.v_max, self.nv, self.bc,
        )
    }

    pub fn settings(&self) -> Result<RunSettings> {
        RunSettings::new(self.kappa, self.cfl, self.t_final)
    }

    /// Location of the initial discontinuity, if any.
    pub fn jump_position(&self) -> Option<f64> {
        match self.id {
            ScenarioId::SingleShock | ScenarioId::Riemann => Some(0.5),
            _ => None,
        }
    }

    /// Left and right states of the two discontinuous problems.
    pub fn riemann_states(&self) -> Option<(EulerState, EulerState)> {
        match self.id {
            ScenarioId::SingleShock => Some((
                shock_upstream_state(self.mach, GAMMA),
                EulerState {
                    rho: 1.0,
                    u: 0.0,
                    p: 1.0,
                },
            )),
            ScenarioId::Riemann => Some((
                EulerState {
                    rho: 2.25,
                    u: 0.0,
                    p: 1.125,
                },
                EulerState {
                    rho: 3.0 / 7.0,
                    u: 0.0,
                    p: 1.0 / 6.0,
                },
            )),
            _ => None,
        }
    }

    /// Initial distribution on `grid`.
    pub fn initial_data(&self, grid: &PhaseGrid) -> Result<Distribution> {
        match self.id {
            ScenarioId::SingleShock => init_single_shock(grid, self.mach, GAMMA),
            ScenarioId::SmoothAccuracy => init_smooth(grid),
            ScenarioId::APRelaxation => init_ap(grid),
            ScenarioId::Riemann => init_riemann(grid),
        }
    }
}

/// State behind a shock of Mach number `mach` running into `(1, 0, 1)`.
pub fn shock_upstream_state(mach: f64, gamma: f64) -> EulerState {
    let m2 = mach * mach;
    EulerState {
        rho: (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0),
        u: 2.0 * gamma.sqrt() * (m2 - 1.0) / ((gamma + 1.0) * mach),
        p: 1.0 + 2.0 * gamma * (m2 - 1.0) / (gamma + 1.0),
    }
}

/// Speed of that shock, `M sqrt(gamma p_R / rho_R)` with `p_R = rho_R = 1`.
pub fn shock_speed(mach: f64, gamma: f64) -> f64 {
    mach * gamma.sqrt()
}

fn maxwellian_from_state(s: &EulerState, v: &[f64]) -> Result<Vec<f64>> {
    s.validate()?;
    Ok(maxwellian_row(s.rho, s.u, s.temperature(), v))
}

fn init_step(
    grid: &PhaseGrid,
    left: EulerState,
    right: EulerState,
    x0: f64,
) -> Result<Distribution> {
    let v = grid.velocities().to_vec();
    Distribution::from_rows(grid, |_, x| {
        maxwellian_from_state(if x <= x0 { &left } else { &right }, &v)
    })
}

pub fn init_single_shock(grid: &PhaseGrid, mach: f64, gamma: f64) -> Result<Distribution> {
    if !(mach > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Mach number must exceed 1, got {mach}"
        )));
    }
    let right = EulerState {
        rho: 1.0,
        u: 0.0,
        p: 1.0,
    };
    init_step(grid, shock_upstream_state(mach, gamma), right, 0.5)
}

/// Velocity profile of the smooth problem.
pub fn smooth_velocity(x: f64) -> f64 {
    0.1 * (-(10.0 * x - 1.0).powi(2)).exp() - 2.0 * (-(10.0 * x + 3.0).powi(2)).exp()
}

pub fn init_smooth(grid: &PhaseGrid) -> Result<Distribution> {
    let v = grid.velocities().to_vec();
    Distribution::from_rows(grid, |_, x| {
        Ok(maxwellian_row(1.0, smooth_velocity(x), 1.0, &v))
    })
}

/// Density, velocity and temperature of the two-beam initial data.
pub fn ap_fields(x: f64) -> (f64, f64, f64) {
    let s = 2.0 * PI * x;
    ((2.0 + s.sin()) / 3.0, s.cos() / 5.0, (3.0 + s.cos()) / 4.0)
}

pub fn init_ap(grid: &PhaseGrid) -> Result<Distribution> {
    let v = grid.velocities().to_vec();
    Distribution::from_rows(grid, |_, x| {
        let (rho, u, t) = ap_fields(x);
        let plus = maxwellian_row(rho, u, t, &v);
        let minus = maxwellian_row(rho, -u, t, &v);
        Ok(plus
            .iter()
            .zip(&minus)
            .map(|(a, b)| 0.5 * (a + b))
            .collect())
    })
}

pub fn init_riemann(grid: &PhaseGrid) -> Result<Distribution> {
    let (l, r) = Scenario::riemann()
        .riemann_states()
        .expect("two-state problem");
    init_step(grid, l, r, 0.5)
}
