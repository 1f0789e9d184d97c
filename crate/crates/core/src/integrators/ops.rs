//! Field-level building blocks shared by the time steppers.

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{row_moments, BoundaryCondition, Distribution, PhaseGrid};
use crate::maxwellian::{
    collect_cell_results, local_equilibrium_into, MaxwellianKind, NewtonConfig, NewtonStats,
};
use crate::reconstruction::{shift_row, upwind_faces, FluxOrder, GwenoOrder, WenoParams};

/// Values of `f` at the feet `x_i - tau v_j` for every cell and velocity.
pub fn transport(
    f: &Distribution,
    grid: &PhaseGrid,
    tau: f64,
    order: GwenoOrder,
    weno: &WenoParams,
) -> Result<Distribution> {
    if tau == 0.0 {
        return Ok(f.clone());
    }
    let nx = grid.nx();
    let dx = grid.dx();
    let columns: Vec<Result<Vec<f64>>> = grid
        .velocities()
        .par_iter()
        .enumerate()
        .map(|(j, &v)| {
            let column = f.column(j);
            let mut out = vec![0.0; nx];
            shift_row(&column, tau * v / dx, order, grid.bc(), weno, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut out = Distribution::zeros(grid);
    for (j, column) in columns.into_iter().enumerate() {
        out.set_column(j, &column?);
    }
    Ok(out)
}

/// Flux differences `D_ij = F_{i+1/2,j} - F_{i-1/2,j}` and the moments of the net
/// boundary inflow `sum_j (F_{1/2,j} - F_{N+1/2,j}) phi(v_j) dv`.
pub fn flux_difference(
    f: &Distribution,
    grid: &PhaseGrid,
    order: FluxOrder,
    weno: &WenoParams,
) -> (Distribution, [f64; 3]) {
    let nx = grid.nx();
    let velocities = grid.velocities();
    let per_velocity: Vec<(Vec<f64>, f64)> = velocities
        .par_iter()
        .enumerate()
        .map(|(j, &v)| {
            let column = f.column(j);
            let mut faces = vec![0.0; nx + 1];
            upwind_faces(&column, v, grid.bc(), order, weno, &mut faces);
            let diff: Vec<f64> = faces.windows(2).map(|w| w[1] - w[0]).collect();
            (diff, faces[0] - faces[nx])
        })
        .collect();
    let mut out = Distribution::zeros(grid);
    let mut inflow = vec![0.0; velocities.len()];
    for (j, (diff, net)) in per_velocity.into_iter().enumerate() {
        out.set_column(j, &diff);
        inflow[j] = net;
    }
    let budget = if grid.bc() == BoundaryCondition::Periodic {
        [0.0; 3]
    } else {
        let m = row_moments(&inflow, velocities, grid.dv());
        [m.rho, m.momentum, m.energy]
    };
    (out, budget)
}

/// Change of the moment totals under first-order transport by `tau`.
///
/// Linear interpolation with a cell-independent fraction telescopes in the interior,
/// so this is exactly what crosses the two ends of a free-flow grid; it is zero on
/// periodic grids.
pub fn shift_budget(
    f: &Distribution,
    grid: &PhaseGrid,
    tau: f64,
    weno: &WenoParams,
) -> Result<[f64; 3]> {
    if grid.bc() == BoundaryCondition::Periodic || tau == 0.0 {
        return Ok([0.0; 3]);
    }
    let shifted = transport(f, grid, tau, GwenoOrder::Linear, weno)?;
    let n_vel = grid.n_vel();
    let mut change = vec![0.0; n_vel];
    for i in 0..grid.nx() {
        for (j, c) in change.iter_mut().enumerate() {
            *c += shifted.get(i, j) - f.get(i, j);
        }
    }
    let m = row_moments(&change, grid.velocities(), grid.dv());
    Ok([m.rho, m.momentum, m.energy].map(|x| x * grid.dx()))
}

/// Result of an implicit relaxation sweep.
pub struct Relaxed {
    /// `(kappa x + h dM) / (kappa + h)`.
    pub f: Distribution,
    /// `(dM - f) / kappa`, evaluated as `(dM - x) / (kappa + h)`.
    pub k: Distribution,
    pub stats: NewtonStats,
}

/// Solves `f = x + (h / kappa)(dM - f)` cell by cell, with `dM` carrying the moments of `target`.
pub fn relax(
    x: &Distribution,
    target: &Distribution,
    grid: &PhaseGrid,
    kappa: f64,
    h: f64,
    kind: MaxwellianKind,
    newton: &NewtonConfig,
) -> Result<Relaxed> {
    let n_vel = grid.n_vel();
    let dv = grid.dv();
    let velocities = grid.velocities();
    let mut f = Distribution::zeros(grid);
    let mut k = Distribution::zeros(grid);
    let denom = kappa + h;
    let results: Vec<_> = f
        .values_mut()
        .par_chunks_mut(n_vel)
        .zip(k.values_mut().par_chunks_mut(n_vel))
        .zip(x.values().par_chunks(n_vel))
        .zip(target.values().par_chunks(n_vel))
        .map(|(((f_row, k_row), x_row), t_row)| {
            let m = row_moments(t_row, velocities, dv);
            // the equilibrium is staged in f_row, then overwritten
            let info = local_equilibrium_into(&m, velocities, dv, kind, newton, f_row)?;
            for j in 0..n_vel {
                let dm = f_row[j];
                k_row[j] = (dm - x_row[j]) / denom;
                f_row[j] = (kappa * x_row[j] + h * dm) / denom;
            }
            Ok(info)
        })
        .collect();
    let stats = collect_cell_results(results)?;
    Ok(Relaxed { f, k, stats })
}

/// `y += alpha x`.
pub fn axpy(y: &mut Distribution, alpha: f64, x: &Distribution) {
    for (a, b) in y.values_mut().iter_mut().zip(x.values()) {
        *a += alpha * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::total_moments;
    use crate::maxwellian::equilibrium;
    use proptest::prelude::*;

    fn periodic(nx: usize) -> PhaseGrid {
        PhaseGrid::new(0.0, 1.0, nx, -4.0, 4.0, 8, BoundaryCondition::Periodic).unwrap()
    }

    #[test]
    fn shift_budget_matches_edge_fluxes() {
        let g = PhaseGrid::new(0.0, 1.0, 12, -4.0, 4.0, 8, BoundaryCondition::FreeFlow).unwrap();
        let f = Distribution::from_fn(&g, |x, v| {
            (1.0 + (x > 0.5) as u8 as f64) * (-v * v / 2.0).exp()
        })
        .unwrap();
        let w = WenoParams::default();
        // below one cell per step only the edge cells cross: tau sum_j v_j (f_1 - f_N) phi dv
        let tau = 0.5 * g.dx() / g.speed_max();
        let budget = shift_budget(&f, &g, tau, &w).unwrap();
        let mut oracle = [0.0; 3];
        for j in 0..g.n_vel() {
            let v = g.v(j);
            let flux = tau * v * (f.get(0, j) - f.get(11, j)) * g.dv();
            oracle[0] += flux;
            oracle[1] += flux * v;
            oracle[2] += flux * 0.5 * v * v;
        }
        for l in 0..3 {
            assert!((budget[l] - oracle[l]).abs() < 1e-13);
        }
        assert!(
            budget[1] < 0.0,
            "pressure pushes momentum out on the denser side"
        );
        for order in [FluxOrder::First, FluxOrder::Weno3, FluxOrder::Weno5] {
            let (_, faces) = flux_difference(&f, &g, order, &w);
            for l in 0..3 {
                assert!((tau * faces[l] - oracle[l]).abs() < 1e-13);
            }
        }
        let periodic_grid = periodic(12);
        let fp = Distribution::from_fn(&periodic_grid, |x, v| (1.0 + x) * (-v * v).exp()).unwrap();
        assert_eq!(
            shift_budget(&fp, &periodic_grid, tau, &w).unwrap(),
            [0.0; 3]
        );
    }

    #[test]
    fn shift_budget_is_exact_for_long_linear_shifts() {
        let g = PhaseGrid::new(0.0, 1.0, 20, -4.0, 4.0, 8, BoundaryCondition::FreeFlow).unwrap();
        let f = Distribution::from_fn(&g, |x, v| (1.0 + x * x) * (-(v - 0.5) * (v - 0.5)).exp())
            .unwrap();
        let w = WenoParams::default();
        let tau = 3.7 * g.dx() / g.speed_max();
        let moved = transport(&f, &g, tau, GwenoOrder::Linear, &w).unwrap();
        let before = total_moments(&f, &g).unwrap();
        let after = total_moments(&moved, &g).unwrap();
        let budget = shift_budget(&f, &g, tau, &w).unwrap();
        for l in 0..3 {
            assert!((after[l] - before[l] - budget[l]).abs() < 1e-13);
        }
    }

    #[test]
    fn relaxation_conserves_target_moments() {
        let g = periodic(6);
        let x = Distribution::from_fn(&g, |x, v| {
            1.0 + 0.5 * (6.0 * x).sin() * (-(v - 1.0) * (v - 1.0)).exp() + (-v * v).exp()
        })
        .unwrap();
        let r = relax(
            &x,
            &x,
            &g,
            1e-3,
            0.05,
            MaxwellianKind::Discrete,
            &NewtonConfig::default(),
        )
        .unwrap();
        let a = total_moments(&x, &g).unwrap();
        let b = total_moments(&r.f, &g).unwrap();
        for l in 0..3 {
            assert!((a[l] - b[l]).abs() < 1e-13);
        }
        let zero = total_moments(&r.k, &g).unwrap();
        assert!(zero.iter().all(|m| m.abs() < 1e-9));
    }

    #[test]
    fn relaxation_limits() {
        let g = periodic(3);
        let x = Distribution::from_fn(&g, |_, v| {
            (-(v - 0.5) * (v - 0.5)).exp() + 0.3 * (-(v + 1.0) * (v + 1.0)).exp()
        })
        .unwrap();
        let cfg = NewtonConfig::default();
        let (dm, _) = equilibrium(&x, &g, MaxwellianKind::Discrete, &cfg).unwrap();
        let stiff = relax(&x, &x, &g, 1e-14, 1.0, MaxwellianKind::Discrete, &cfg).unwrap();
        assert!(stiff.f.l1_distance(&dm, &g) < 1e-12);
        let free = relax(&x, &x, &g, 1e14, 1.0, MaxwellianKind::Discrete, &cfg).unwrap();
        assert!(free.f.l1_distance(&x, &g) < 1e-12);
    }

    proptest! {
        #[test]
        fn linear_transport_telescopes_per_row(
            seed in proptest::collection::vec(0.1f64..2.0, 10 * 9),
            tau in -0.9f64..0.9,
        ) {
            let g = periodic(10);
            let f = Distribution::from_values(&g, seed).unwrap();
            let moved = transport(&f, &g, tau, GwenoOrder::Linear, &WenoParams::default()).unwrap();
            for j in 0..g.n_vel() {
                let before: f64 = f.column(j).iter().sum();
                let after: f64 = moved.column(j).iter().sum();
                prop_assert!((before - after).abs() < 1e-13 * before.max(1.0));
            }
        }

        #[test]
        fn flux_differences_sum_to_zero_on_periodic_grids(
            seed in proptest::collection::vec(0.0f64..2.0, 10 * 9),
        ) {
            let g = periodic(10);
            let f = Distribution::from_values(&g, seed).unwrap();
            let (d, budget) = flux_difference(&f, &g, FluxOrder::Weno5, &WenoParams::default());
            prop_assert_eq!(budget, [0.0; 3]);
            for j in 0..g.n_vel() {
                prop_assert!(d.column(j).iter().sum::<f64>().abs() < 1e-12);
            }
        }
    }
}
