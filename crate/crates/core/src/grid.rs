//! Phase-space grid, distribution storage and discrete velocity moments.
//!
//! Space is cell-centered, `x_i = x_min + (i + 1/2) dx` for `i = 0..nx`, and the
//! velocity grid is node-based, `v_j = v_min + j dv` for `j = 0..=nv`.
//! Distribution values are stored row-major over `(i, j)` with the velocity index
//! contiguous.

use crate::error::{Error, Result};

/// Boundary treatment in x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Periodic,
    /// Zero-gradient ghost cells (copy of the boundary cell).
    FreeFlow,
}

/// Uniform 1D-1V phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    x_min: f64,
    x_max: f64,
    nx: usize,
    v_min: f64,
    v_max: f64,
    nv: usize,
    bc: BoundaryCondition,
    velocities: Vec<f64>,
}

impl PhaseGrid {
    /// Builds a grid with `nx` cells in space and `nv` velocity intervals (`nv + 1` nodes).
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        v_min: f64,
        v_max: f64,
        nv: usize,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && v_min.is_finite() && v_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if nx == 0 {
            return Err(Error::InvalidGrid("nx must be positive".into()));
        }
        if x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "x_max ({x_max}) must exceed x_min ({x_min})"
            )));
        }
        if v_max <= v_min {
            return Err(Error::InvalidGrid(format!(
                "v_max ({v_max}) must exceed v_min ({v_min})"
            )));
        }
        if nv + 1 < 3 {
            return Err(Error::RankDeficientGrid { nodes: nv + 1 });
        }
        let dv = (v_max - v_min) / nv as f64;
        // offsets from the centre so that symmetric domains give exactly mirrored nodes
        let centre = 0.5 * (v_min + v_max);
        let half = 0.5 * nv as f64;
        let velocities = (0..=nv).map(|j| centre + (j as f64 - half) * dv).collect();
        Ok(Self {
            x_min,
            x_max,
            nx,
            v_min,
            v_max,
            nv,
            bc,
            velocities,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    /// Number of spatial cells.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Number of velocity intervals; the grid has `nv + 1` nodes.
    pub fn nv(&self) -> usize {
        self.nv
    }

    /// Number of velocity nodes.
    pub fn n_vel(&self) -> usize {
        self.nv + 1
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dv(&self) -> f64 {
        (self.v_max - self.v_min) / self.nv as f64
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Cell center `x_i`, zero-based.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    /// Velocity node `v_j`.
    pub fn v(&self, j: usize) -> f64 {
        self.velocities[j]
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    /// Largest velocity magnitude on the grid, used for the CFL time step.
    pub fn speed_max(&self) -> f64 {
        self.v_min.abs().max(self.v_max.abs())
    }

    /// Same grid with a different number of cells.
    pub fn with_nx(&self, nx: usize) -> Result<Self> {
        Self::new(
            self.x_min, self.x_max, nx, self.v_min, self.v_max, self.nv, self.bc,
        )
    }
}

/// Collision invariants `(1, v, v^2/2)`.
#[inline]
pub fn phi(v: f64) -> [f64; 3] {
    [1.0, v, 0.5 * v * v]
}

/// Distribution values `f(x_i, v_j)` on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    nx: usize,
    n_vel: usize,
    values: Vec<f64>,
}

impl Distribution {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        Self {
            nx: grid.nx(),
            n_vel: grid.n_vel(),
            values: vec![0.0; grid.nx() * grid.n_vel()],
        }
    }

    /// Wraps raw row-major values; rejects wrong lengths and non-finite entries.
    pub fn from_values(grid: &PhaseGrid, values: Vec<f64>) -> Result<Self> {
        let expected = grid.nx() * grid.n_vel();
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: values.len(),
            });
        }
        let d = Self {
            nx: grid.nx(),
            n_vel: grid.n_vel(),
            values,
        };
        d.check_finite("distribution")?;
        Ok(d)
    }

    /// Samples `f(x, v)` at every grid point.
    pub fn from_fn(grid: &PhaseGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.nx() * grid.n_vel());
        for i in 0..grid.nx() {
            let x = grid.x(i);
            for &v in grid.velocities() {
                values.push(f(x, v));
            }
        }
        Self::from_values(grid, values)
    }

    /// Builds the field cell by cell from a velocity-row generator.
    pub fn from_rows(
        grid: &PhaseGrid,
        mut row: impl FnMut(usize, f64) -> Result<Vec<f64>>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.nx() * grid.n_vel());
        for i in 0..grid.nx() {
            let r = row(i, grid.x(i))?;
            if r.len() != grid.n_vel() {
                return Err(Error::ShapeMismatch {
                    expected: grid.n_vel(),
                    actual: r.len(),
                });
            }
            values.extend_from_slice(&r);
        }
        Self::from_values(grid, values)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn n_vel(&self) -> usize {
        self.n_vel
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_vel + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.values[i * self.n_vel + j] = value;
    }

    /// Velocity row of cell `i`.
    pub fn cell(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_vel..(i + 1) * self.n_vel]
    }

    pub fn cell_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.n_vel..(i + 1) * self.n_vel]
    }

    /// Spatial profile at velocity node `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nx).map(|i| self.get(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, column: &[f64]) {
        for (i, &value) in column.iter().enumerate() {
            self.set(i, j, value);
        }
    }

    pub fn matches(&self, grid: &PhaseGrid) -> bool {
        self.nx == grid.nx() && self.n_vel == grid.n_vel()
    }

    pub fn ensure_matches(&self, grid: &PhaseGrid) -> Result<()> {
        if self.matches(grid) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: grid.nx() * grid.n_vel(),
                actual: self.values.len(),
            })
        }
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => Err(Error::NonFinite {
                context: format!(
                    "{context} at cell {}, velocity node {}",
                    k / self.n_vel,
                    k % self.n_vel
                ),
            }),
        }
    }

    /// Smallest value, useful to flag negativity after high-order reconstruction.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `sum |f - g| dv dx`.
    pub fn l1_distance(&self, other: &Distribution, grid: &PhaseGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * grid.dv()
            * grid.dx()
    }
}

/// Conserved moments `(rho, rho U, E)` of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub rho: f64,
    pub momentum: f64,
    pub energy: f64,
}

impl Moments {
    pub fn new(rho: f64, momentum: f64, energy: f64) -> Self {
        Self {
            rho,
            momentum,
            energy,
        }
    }

    /// Conserved triple of a 1D gas with density, velocity and temperature.
    pub fn from_primitive(rho: f64, u: f64, temperature: f64) -> Self {
        Self {
            rho,
            momentum: rho * u,
            energy: 0.5 * rho * temperature + 0.5 * rho * u * u,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho, self.momentum, self.energy]
    }

    pub fn from_array(m: [f64; 3]) -> Self {
        Self::new(m[0], m[1], m[2])
    }

    pub fn velocity(&self) -> f64 {
        self.momentum / self.rho
    }

    /// `T = 2E/rho - U^2`.
    pub fn temperature(&self) -> f64 {
        let u = self.velocity();
        2.0 * self.energy / self.rho - u * u
    }

    pub fn pressure(&self) -> f64 {
        self.rho * self.temperature()
    }

    /// Density and temperature both strictly positive.
    pub fn is_realizable(&self) -> bool {
        self.rho > 0.0 && self.temperature() > 0.0
    }
}

/// Per-cell moment field.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentField {
    cells: Vec<Moments>,
}

impl MomentField {
    pub fn cells(&self) -> &[Moments] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn rho(&self) -> Vec<f64> {
        self.cells.iter().map(|m| m.rho).collect()
    }

    /// Velocity, or NaN in cells with non-positive density.
    pub fn velocity(&self) -> Vec<f64> {
        self.cells
            .iter()
            .map(|m| if m.rho > 0.0 { m.velocity() } else { f64::NAN })
            .collect()
    }

    pub fn temperature(&self) -> Vec<f64> {
        self.cells
            .iter()
            .map(|m| {
                if m.rho > 0.0 {
                    m.temperature()
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    pub fn pressure(&self) -> Vec<f64> {
        self.cells
            .iter()
            .map(|m| if m.rho > 0.0 { m.pressure() } else { f64::NAN })
            .collect()
    }

    /// Cells where a Maxwellian cannot be built.
    pub fn nonrealizable_cells(&self) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_realizable())
            .map(|(i, _)| i)
            .collect()
    }

    /// `sum_i m_i dx`, summed sequentially in cell order.
    pub fn totals(&self, dx: f64) -> [f64; 3] {
        let mut t = [0.0; 3];
        for m in &self.cells {
            t[0] += m.rho;
            t[1] += m.momentum;
            t[2] += m.energy;
        }
        [t[0] * dx, t[1] * dx, t[2] * dx]
    }
}

/// Knudsen number, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionParams {
    kappa: f64,
}

impl CollisionParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa > 0.0 && kappa.is_finite() {
            Ok(Self { kappa })
        } else {
            Err(Error::InvalidParameter(format!(
                "Knudsen number must be positive and finite, got {kappa}"
            )))
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Midpoint-rule moments of a single velocity row.
pub fn row_moments(row: &[f64], velocities: &[f64], dv: f64) -> Moments {
    let m = mirrored_sum(row.len(), |j| {
        let (f, v) = (row[j], velocities[j]);
        [f, f * v, f * 0.5 * v * v]
    });
    Moments::new(m[0] * dv, m[1] * dv, m[2] * dv)
}

/// Sums `term(j)` over `0..n`, pairing `j` with `n - 1 - j` before accumulating.
///
/// Odd integrands on mirrored nodes then cancel exactly.
#[inline]
pub(crate) fn mirrored_sum<const K: usize>(n: usize, term: impl Fn(usize) -> [f64; K]) -> [f64; K] {
    let mut acc = [0.0; K];
    for j in 0..n / 2 {
        let lo = term(j);
        let hi = term(n - 1 - j);
        for k in 0..K {
            acc[k] += lo[k] + hi[k];
        }
    }
    if n % 2 == 1 {
        let mid = term(n / 2);
        for k in 0..K {
            acc[k] += mid[k];
        }
    }
    acc
}

/// Discrete moments `sum_j f_ij phi(v_j) dv` of every cell.
pub fn compute_moments(f: &Distribution, grid: &PhaseGrid) -> Result<MomentField> {
    f.ensure_matches(grid)?;
    let dv = grid.dv();
    let cells = (0..grid.nx())
        .map(|i| row_moments(f.cell(i), grid.velocities(), dv))
        .collect();
    Ok(MomentField { cells })
}

/// Domain totals `sum_i m_i dx` of a distribution.
pub fn total_moments(f: &Distribution, grid: &PhaseGrid) -> Result<[f64; 3]> {
    Ok(compute_moments(f, grid)?.totals(grid.dx()))
}
