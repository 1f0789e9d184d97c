//! Conservative finite-difference face fluxes with upwind flux splitting.

use crate::grid::BoundaryCondition;
use crate::reconstruction::gweno::{resolve_index, GwenoOrder, WenoParams};

/// Accuracy of the face reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxOrder {
    /// Donor cell.
    First,
    /// Two-stencil WENO, weights 1/3 and 2/3.
    Weno3,
    /// Three-stencil WENO, weights 1/10, 6/10 and 3/10.
    Weno5,
}

impl FluxOrder {
    /// Face reconstruction paired with an interpolation order.
    pub fn matching(order: GwenoOrder) -> Self {
        match order {
            GwenoOrder::Linear => FluxOrder::First,
            GwenoOrder::W23 => FluxOrder::Weno3,
            GwenoOrder::W35 => FluxOrder::Weno5,
        }
    }

    /// Cells needed on the upwind side of a face, including the donor cell.
    pub fn radius(self) -> usize {
        match self {
            FluxOrder::First => 1,
            FluxOrder::Weno3 => 2,
            FluxOrder::Weno5 => 3,
        }
    }
}

/// `(F+, F-)` for one velocity node: the whole flux `v f` goes to the upwind part.
pub fn flux_split_value(f: f64, v: f64) -> (f64, f64) {
    if v > 0.0 {
        (v * f, 0.0)
    } else if v < 0.0 {
        (0.0, v * f)
    } else {
        (0.0, 0.0)
    }
}

/// Split fluxes of a whole spatial row at velocity `v`.
pub fn flux_split(f_row: &[f64], v: f64) -> (Vec<f64>, Vec<f64>) {
    f_row.iter().map(|&f| flux_split_value(f, v)).unzip()
}

/// Left-biased value at the right face of the middle cell of `g` (`g[2]` is the donor).
#[inline]
fn weno5_face(g: [f64; 5], eps: f64) -> f64 {
    let [a, b, c, d, e] = g;
    let q0 = (2.0 * a - 7.0 * b + 11.0 * c) / 6.0;
    let q1 = (-b + 5.0 * c + 2.0 * d) / 6.0;
    let q2 = (2.0 * c + 5.0 * d - e) / 6.0;
    let s0 = 13.0 / 12.0 * (a - 2.0 * b + c).powi(2) + 0.25 * (a - 4.0 * b + 3.0 * c).powi(2);
    let s1 = 13.0 / 12.0 * (b - 2.0 * c + d).powi(2) + 0.25 * (b - d).powi(2);
    let s2 = 13.0 / 12.0 * (c - 2.0 * d + e).powi(2) + 0.25 * (3.0 * c - 4.0 * d + e).powi(2);
    let a0 = 0.1 / (eps + s0).powi(2);
    let a1 = 0.6 / (eps + s1).powi(2);
    let a2 = 0.3 / (eps + s2).powi(2);
    (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)
}

/// Third-order analogue of [`weno5_face`]; `g[1]` is the donor.
#[inline]
fn weno3_face(g: [f64; 3], eps: f64) -> f64 {
    let [a, b, c] = g;
    let q0 = (-a + 3.0 * b) / 2.0;
    let q1 = (b + c) / 2.0;
    let a0 = (1.0 / 3.0) / (eps + (b - a).powi(2)).powi(2);
    let a1 = (2.0 / 3.0) / (eps + (c - b).powi(2)).powi(2);
    (a0 * q0 + a1 * q1) / (a0 + a1)
}

/// Upwind reconstruction at face `i + 1/2` of data flowing to the right.
#[inline]
fn face_from_left(at: impl Fn(isize) -> f64, i: isize, order: FluxOrder, eps: f64) -> f64 {
    match order {
        FluxOrder::First => at(i),
        FluxOrder::Weno3 => weno3_face([at(i - 1), at(i), at(i + 1)], eps),
        FluxOrder::Weno5 => weno5_face([at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2)], eps),
    }
}

/// Mirror image: face `i + 1/2` of data flowing to the left, donor cell `i + 1`.
#[inline]
fn face_from_right(at: impl Fn(isize) -> f64, i: isize, order: FluxOrder, eps: f64) -> f64 {
    match order {
        FluxOrder::First => at(i + 1),
        FluxOrder::Weno3 => weno3_face([at(i + 2), at(i + 1), at(i)], eps),
        FluxOrder::Weno5 => weno5_face([at(i + 3), at(i + 2), at(i + 1), at(i), at(i - 1)], eps),
    }
}

/// Face fluxes `F_{i+1/2} = F+_i(x_{i+1/2}) + F-_{i+1}(x_{i+1/2})`, `i = -1..N-1`.
///
/// Entry `k` of the result is the face between cells `k - 1` and `k`, so there are
/// `N + 1` faces. Ghost cells come from periodic wrap or copies of the edge cells.
pub fn weno_flux_faces(
    f_plus: &[f64],
    f_minus: &[f64],
    bc: BoundaryCondition,
    order: FluxOrder,
    params: &WenoParams,
) -> Vec<f64> {
    let n = f_plus.len();
    assert_eq!(n, f_minus.len(), "split flux rows differ in length");
    let plus = |k: isize| f_plus[resolve_index(k, n, bc)];
    let minus = |k: isize| f_minus[resolve_index(k, n, bc)];
    (0..=n as isize)
        .map(|k| {
            let i = k - 1;
            face_from_left(plus, i, order, params.epsilon)
                + face_from_right(minus, i, order, params.epsilon)
        })
        .collect()
}

/// Faces of the flux `v f` for a row with a single velocity, writing `N + 1` values.
///
/// Only the upwind half of the split flux is nonzero, so only it is reconstructed.
pub fn upwind_faces(
    f_row: &[f64],
    v: f64,
    bc: BoundaryCondition,
    order: FluxOrder,
    params: &WenoParams,
    faces: &mut [f64],
) {
    let n = f_row.len();
    assert_eq!(faces.len(), n + 1, "face buffer must hold N + 1 values");
    let flux = |k: isize| v * f_row[resolve_index(k, n, bc)];
    for (k, face) in faces.iter_mut().enumerate() {
        let i = k as isize - 1;
        *face = if v > 0.0 {
            face_from_left(flux, i, order, params.epsilon)
        } else if v < 0.0 {
            face_from_right(flux, i, order, params.epsilon)
        } else {
            0.0
        };
    }
}

/// `(F_{i+1/2} - F_{i-1/2}) / dx` for every cell.
pub fn flux_divergence(faces: &[f64], dx: f64) -> Vec<f64> {
    faces.windows(2).map(|w| (w[1] - w[0]) / dx).collect()
}
