//! Point-value interpolation at characteristic feet and face-flux reconstruction.

pub mod flux;
pub mod gweno;

pub use flux::{flux_divergence, flux_split, upwind_faces, weno_flux_faces, FluxOrder};
pub use gweno::{gweno_interpolate, locate_foot, shift_row, GwenoOrder, WenoParams};
