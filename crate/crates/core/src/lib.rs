//! Conservative semi-Lagrangian solvers for the 1D-1V BGK equation.

pub mod error;
pub mod grid;
pub mod integrators;
pub mod io;
pub mod maxwellian;
pub mod reconstruction;
pub mod scenarios;
pub mod stability;

pub use error::{Error, Result};
pub use grid::{
    compute_moments, phi, row_moments, total_moments, BoundaryCondition, CollisionParams,
    Distribution, MomentField, Moments, PhaseGrid,
};
pub use maxwellian::{
    continuous_maxwellian, discrete_maxwellian, equilibrium, DMaxCoeffs, MaxwellianKind,
    NewtonConfig, NewtonStats,
};
