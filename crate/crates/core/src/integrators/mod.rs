//! Time integrators for the BGK equation along characteristics.

pub mod driver;
pub mod ops;
pub mod scheme;
pub mod step;
pub mod tableau;

pub use driver::{run, RunSettings, Snapshot, StepRecord, Trajectory};
pub use scheme::{SchemeSpec, TimeScheme};
pub use step::{bdf_startup, step_bdf, step_dirk, step_ie, StepContext, StepOutput};
pub use tableau::{BdfCoeffs, Tableau};
