//! G-WENO interpolation with polynomial linear weights.
//!
//! All formulas use local coordinates in which the base node `x_j` sits at 0
//! and `x_{j+1}` at 1, so the evaluation point is `x_j + theta dx`.

use crate::error::{Error, Result};
use crate::grid::BoundaryCondition;

/// Spatial interpolation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GwenoOrder {
    /// Piecewise linear on `{x_j, x_{j+1}}`.
    Linear,
    /// Two quadratics, third order.
    W23,
    /// Three cubics, fifth order.
    W35,
}

impl GwenoOrder {
    /// Stencil nodes to the left of the base node.
    pub fn left_radius(self) -> usize {
        match self {
            GwenoOrder::Linear => 0,
            GwenoOrder::W23 => 1,
            GwenoOrder::W35 => 2,
        }
    }

    /// Stencil nodes to the right of the base node.
    pub fn right_radius(self) -> usize {
        match self {
            GwenoOrder::Linear => 1,
            GwenoOrder::W23 => 2,
            GwenoOrder::W35 => 3,
        }
    }

    pub fn stencil_width(self) -> usize {
        self.left_radius() + self.right_radius() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            GwenoOrder::Linear => "Linear",
            GwenoOrder::W23 => "W23",
            GwenoOrder::W35 => "W35",
        }
    }
}

/// Regularization shared by the interpolation and the flux reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WenoParams {
    pub epsilon: f64,
}

impl Default for WenoParams {
    fn default() -> Self {
        Self { epsilon: 1e-6 }
    }
}

impl WenoParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "WENO epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }
}

/// Linear weights `(C_L, C_R)` of the third-order interpolant at offset `s`.
pub fn w23_linear_weights(s: f64) -> [f64; 2] {
    [(2.0 - s) / 3.0, (s + 1.0) / 3.0]
}

/// Linear weights `(C_L, C_C, C_R)` of the fifth-order interpolant at offset `s`.
pub fn w35_linear_weights(s: f64) -> [f64; 3] {
    [
        (s - 2.0) * (s - 3.0) / 20.0,
        -(s + 2.0) * (s - 3.0) / 10.0,
        (s + 2.0) * (s + 1.0) / 20.0,
    ]
}

/// Smoothness indicators of the two quadratics; `u` holds `u_{j-1..j+2}`.
pub fn w23_smoothness(u: &[f64; 4]) -> [f64; 2] {
    let [a, b, c, d] = *u;
    let left = 13.0 / 12.0 * a * a + 16.0 / 3.0 * b * b + 25.0 / 12.0 * c * c - 13.0 / 3.0 * a * b
        + 13.0 / 6.0 * a * c
        - 19.0 / 3.0 * b * c;
    let right = 25.0 / 12.0 * b * b + 16.0 / 3.0 * c * c + 13.0 / 12.0 * d * d - 19.0 / 3.0 * b * c
        + 13.0 / 6.0 * b * d
        - 13.0 / 3.0 * c * d;
    [left, right]
}

/// Smoothness indicators of the three cubics; `u` holds `u_{j-2..j+3}`.
pub fn w35_smoothness(u: &[f64; 6]) -> [f64; 3] {
    let [m2, m1, z, p1, p2, p3] = *u;
    let left = 61.0 / 45.0 * m2 * m2
        + 248.0 / 15.0 * m1 * m1
        + 721.0 / 30.0 * z * z
        + 407.0 / 90.0 * p1 * p1
        - 553.0 / 60.0 * m2 * m1
        + 103.0 / 10.0 * m2 * z
        - 683.0 / 180.0 * m2 * p1
        - 2309.0 / 60.0 * m1 * z
        + 439.0 / 30.0 * m1 * p1
        - 1193.0 / 60.0 * z * p1;
    let centre = 61.0 / 45.0 * m1 * m1
        + 331.0 / 30.0 * z * z
        + 331.0 / 30.0 * p1 * p1
        + 61.0 / 45.0 * p2 * p2
        - 141.0 / 20.0 * m1 * z
        + 179.0 / 30.0 * m1 * p1
        - 293.0 / 180.0 * m1 * p2
        - 1259.0 / 60.0 * z * p1
        + 179.0 / 30.0 * z * p2
        - 141.0 / 20.0 * p1 * p2;
    let right = 407.0 / 90.0 * z * z
        + 721.0 / 30.0 * p1 * p1
        + 248.0 / 15.0 * p2 * p2
        + 61.0 / 45.0 * p3 * p3
        - 1193.0 / 60.0 * z * p1
        + 439.0 / 30.0 * z * p2
        - 683.0 / 180.0 * z * p3
        - 2309.0 / 60.0 * p1 * p2
        + 103.0 / 10.0 * p1 * p3
        - 553.0 / 60.0 * p2 * p3;
    [left, centre, right]
}

fn normalize<const K: usize>(linear: [f64; K], beta: [f64; K], eps: f64) -> [f64; K] {
    let mut alpha = [0.0; K];
    let mut total = 0.0;
    for k in 0..K {
        let d = eps + beta[k];
        alpha[k] = linear[k] / (d * d);
        total += alpha[k];
    }
    alpha.map(|a| a / total)
}

/// Nonlinear weights of the third-order interpolant.
pub fn w23_weights(u: &[f64; 4], s: f64, eps: f64) -> [f64; 2] {
    normalize(w23_linear_weights(s), w23_smoothness(u), eps)
}

/// Nonlinear weights of the fifth-order interpolant.
pub fn w35_weights(u: &[f64; 6], s: f64, eps: f64) -> [f64; 3] {
    normalize(w35_linear_weights(s), w35_smoothness(u), eps)
}

/// Cubic through the values at local nodes `n0, n0+1, n0+2, n0+3`, evaluated at `s`.
#[inline]
fn cubic(n0: f64, u: [f64; 4], s: f64) -> f64 {
    let t = s - n0;
    // Newton divided differences on unit spacing
    let d1 = [u[1] - u[0], u[2] - u[1], u[3] - u[2]];
    let d2 = [(d1[1] - d1[0]) / 2.0, (d1[2] - d1[1]) / 2.0];
    let d3 = (d2[1] - d2[0]) / 3.0;
    u[0] + t * (d1[0] + (t - 1.0) * (d2[0] + (t - 2.0) * d3))
}

#[inline]
fn quadratic(n0: f64, u: [f64; 3], s: f64) -> f64 {
    let t = s - n0;
    let d1 = [u[1] - u[0], u[2] - u[1]];
    let d2 = (d1[1] - d1[0]) / 2.0;
    u[0] + t * (d1[0] + (t - 1.0) * d2)
}

/// Interpolates at `x_j + theta dx` from the window `u_{j-l..j+r}` of the order's stencil.
#[inline]
pub fn interpolate_window(window: &[f64], theta: f64, order: GwenoOrder, eps: f64) -> f64 {
    match order {
        GwenoOrder::Linear => (1.0 - theta) * window[0] + theta * window[1],
        GwenoOrder::W23 => {
            let u = [window[0], window[1], window[2], window[3]];
            let w = w23_weights(&u, theta, eps);
            let pl = quadratic(-1.0, [u[0], u[1], u[2]], theta);
            let pr = quadratic(0.0, [u[1], u[2], u[3]], theta);
            w[0] * pl + w[1] * pr
        }
        GwenoOrder::W35 => {
            let u = [
                window[0], window[1], window[2], window[3], window[4], window[5],
            ];
            let w = w35_weights(&u, theta, eps);
            let pl = cubic(-2.0, [u[0], u[1], u[2], u[3]], theta);
            let pc = cubic(-1.0, [u[1], u[2], u[3], u[4]], theta);
            let pr = cubic(0.0, [u[2], u[3], u[4], u[5]], theta);
            w[0] * pl + w[1] * pc + w[2] * pr
        }
    }
}

/// Resolves a possibly out-of-range cell index under the boundary mode.
#[inline]
pub fn resolve_index(i: isize, n: usize, bc: BoundaryCondition) -> usize {
    let n = n as isize;
    match bc {
        BoundaryCondition::Periodic => i.rem_euclid(n) as usize,
        BoundaryCondition::FreeFlow => i.clamp(0, n - 1) as usize,
    }
}

/// `I[U](x_j + theta dx)` with the stencil resolved by periodic wrap or edge clamping.
pub fn gweno_interpolate(
    u: &[f64],
    j: isize,
    theta: f64,
    order: GwenoOrder,
    bc: BoundaryCondition,
    params: &WenoParams,
) -> f64 {
    let l = order.left_radius() as isize;
    let window: Vec<f64> = (j - l..=j + order.right_radius() as isize)
        .map(|k| u[resolve_index(k, u.len(), bc)])
        .collect();
    interpolate_window(&window, theta, order, params.epsilon)
}

/// Splits a displacement of `offset` cells into the base shift and the fractional part.
///
/// The foot of cell `i` is `x_i - offset dx`, which lies in `[x_{i+k}, x_{i+k+1})`
/// at fraction `theta`.
pub fn locate_foot(offset: f64) -> Result<(isize, f64)> {
    if !offset.is_finite() || offset.abs() > (isize::MAX / 4) as f64 {
        return Err(Error::StencilOutOfDomain { offset, halo: 0 });
    }
    let p = -offset;
    let mut k = p.floor();
    let mut theta = p - k;
    if theta >= 1.0 {
        k += 1.0;
        theta = 0.0;
    }
    Ok((k as isize, theta))
}

/// Interpolated values `out_i = I[u](x_i - offset dx)` for every cell of the row.
pub fn shift_row(
    u: &[f64],
    offset: f64,
    order: GwenoOrder,
    bc: BoundaryCondition,
    params: &WenoParams,
    out: &mut [f64],
) -> Result<()> {
    let n = u.len();
    if out.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            actual: out.len(),
        });
    }
    let (k, theta) = locate_foot(offset)?;
    let l = order.left_radius() as isize;
    let width = order.stencil_width();
    if theta == 0.0 {
        for (i, o) in out.iter_mut().enumerate() {
            *o = u[resolve_index(i as isize + k, n, bc)];
        }
        return Ok(());
    }
    // padded copy covering every stencil: index p holds u[start + p]
    let start = k - l;
    let len = n + width - 1;
    let padded: Vec<f64> = (0..len)
        .map(|p| u[resolve_index(start + p as isize, n, bc)])
        .collect();
    for (i, o) in out.iter_mut().enumerate() {
        *o = interpolate_window(&padded[i..i + width], theta, order, params.epsilon);
    }
    Ok(())
}
