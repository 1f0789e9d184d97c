//! One-step (DIRK) and multistep (BDF) updates, classical or with conservative correction.

use crate::error::{Error, Result};
use crate::grid::{Distribution, PhaseGrid};
use crate::integrators::ops::{axpy, flux_difference, relax, shift_budget, transport};
use crate::integrators::scheme::SchemeSpec;
use crate::integrators::tableau::{BdfCoeffs, Tableau};
use crate::maxwellian::{NewtonConfig, NewtonStats};
use crate::reconstruction::{FluxOrder, WenoParams};

/// Everything a step needs besides the state and the time step.
#[derive(Debug, Clone)]
pub struct StepContext {
    pub grid: PhaseGrid,
    pub kappa: f64,
    pub spec: SchemeSpec,
    pub newton: NewtonConfig,
    pub weno: WenoParams,
}

impl StepContext {
    pub fn new(grid: PhaseGrid, kappa: f64, spec: SchemeSpec) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        spec.validate()?;
        Ok(Self {
            grid,
            kappa,
            spec,
            newton: NewtonConfig::default(),
            weno: WenoParams::default(),
        })
    }

    pub fn with_newton(mut self, newton: NewtonConfig) -> Self {
        self.newton = newton;
        self
    }

    fn flux_order(&self) -> FluxOrder {
        FluxOrder::matching(self.spec.space)
    }
}

/// New state plus bookkeeping of one step.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub f: Distribution,
    pub stats: NewtonStats,
    /// Moments that entered through the boundary during the step, scaled by `dt` and,
    /// for BDF, by the history weights, so that the expected totals follow
    /// `R^{n+1} = sum_k w_k R^{n+1-k} + budget` with the step's weights `w`.
    pub budget: [f64; 3],
}

fn scaled(m: [f64; 3], s: f64) -> [f64; 3] {
    m.map(|x| x * s)
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Implicit-Euler semi-Lagrangian step; the one-stage case of [`step_dirk`].
pub fn step_ie(f: &Distribution, ctx: &StepContext, dt: f64) -> Result<StepOutput> {
    step_dirk(f, &Tableau::implicit_euler(), ctx, dt)
}

/// DIRK step along the characteristics; stage `k` starts from `f^n` at `x_i - c_k v_j dt`.
pub fn step_dirk(
    f: &Distribution,
    tableau: &Tableau,
    ctx: &StepContext,
    dt: f64,
) -> Result<StepOutput> {
    let grid = &ctx.grid;
    f.ensure_matches(grid)?;
    let s = tableau.stages();
    let c = tableau.c();
    let order = ctx.spec.space;
    let mut stats = NewtonStats::default();
    let mut k_values: Vec<Distribution> = Vec::with_capacity(s);
    let mut flux_sum = ctx.spec.conservative.then(|| Distribution::zeros(grid));
    let mut face_budget = [0.0; 3];
    let mut last = None;
    for k in 0..s {
        let mut x = transport(f, grid, c[k] * dt, order, &ctx.weno)?;
        for (l, kl) in k_values.iter().enumerate() {
            let a = tableau.a(k, l);
            if a != 0.0 {
                let moved = transport(kl, grid, (c[k] - c[l]) * dt, order, &ctx.weno)?;
                axpy(&mut x, dt * a, &moved);
            }
        }
        let relaxed = relax(
            &x,
            &x,
            grid,
            ctx.kappa,
            tableau.a(k, k) * dt,
            ctx.spec.maxwellian,
            &ctx.newton,
        )?;
        stats.merge(&relaxed.stats);
        if let Some(sum) = flux_sum.as_mut() {
            let (d, inflow) = flux_difference(&relaxed.f, grid, ctx.flux_order(), &ctx.weno);
            axpy(sum, tableau.b()[k], &d);
            face_budget = add(face_budget, scaled(inflow, tableau.b()[k]));
        }
        k_values.push(relaxed.k);
        last = Some(relaxed.f);
    }
    let Some(flux_sum) = flux_sum else {
        return Ok(StepOutput {
            f: last.expect("at least one stage"),
            stats,
            budget: shift_budget(f, grid, dt, &ctx.weno)?,
        });
    };
    let mut f_star = f.clone();
    axpy(&mut f_star, -dt / grid.dx(), &flux_sum);
    let mut y = f_star.clone();
    for (l, kl) in k_values.iter().enumerate().take(s - 1) {
        axpy(&mut y, dt * tableau.b()[l], kl);
    }
    let relaxed = relax(
        &y,
        &f_star,
        grid,
        ctx.kappa,
        tableau.b_last() * dt,
        ctx.spec.maxwellian,
        &ctx.newton,
    )?;
    stats.merge(&relaxed.stats);
    relaxed.f.check_finite("DIRK update")?;
    Ok(StepOutput {
        f: relaxed.f,
        stats,
        budget: scaled(face_budget, dt),
    })
}

/// BDF step; `history[k]` holds `f^{n-k}`, newest first.
pub fn step_bdf(
    history: &[&Distribution],
    coeffs: &BdfCoeffs,
    ctx: &StepContext,
    dt: f64,
) -> Result<StepOutput> {
    let grid = &ctx.grid;
    let steps = coeffs.steps();
    if history.len() < steps {
        return Err(Error::InsufficientData(format!(
            "BDF{steps} needs {steps} history levels, got {}",
            history.len()
        )));
    }
    let beta = coeffs.beta();
    let mut f_star = Distribution::zeros(grid);
    for (k, (&a, level)) in coeffs.a().iter().zip(history).enumerate() {
        level.ensure_matches(grid)?;
        let moved = transport(level, grid, (k + 1) as f64 * dt, ctx.spec.space, &ctx.weno)?;
        axpy(&mut f_star, a, &moved);
    }
    let predicted = relax(
        &f_star,
        &f_star,
        grid,
        ctx.kappa,
        beta * dt,
        ctx.spec.maxwellian,
        &ctx.newton,
    )?;
    let mut stats = predicted.stats;
    if !ctx.spec.conservative {
        let mut budget = [0.0; 3];
        for (k, (&a, level)) in coeffs.a().iter().zip(history).enumerate() {
            budget = add(
                budget,
                scaled(
                    shift_budget(level, grid, (k + 1) as f64 * dt, &ctx.weno)?,
                    a,
                ),
            );
        }
        return Ok(StepOutput {
            f: predicted.f,
            stats,
            budget,
        });
    }
    let (d, inflow) = flux_difference(&predicted.f, grid, ctx.flux_order(), &ctx.weno);
    let mut f_2star = Distribution::zeros(grid);
    for (&a, level) in coeffs.a().iter().zip(history) {
        axpy(&mut f_2star, a, level);
    }
    axpy(&mut f_2star, -beta * dt / grid.dx(), &d);
    let relaxed = relax(
        &f_2star,
        &f_2star,
        grid,
        ctx.kappa,
        beta * dt,
        ctx.spec.maxwellian,
        &ctx.newton,
    )?;
    stats.merge(&relaxed.stats);
    relaxed.f.check_finite("BDF update")?;
    Ok(StepOutput {
        f: relaxed.f,
        stats,
        budget: scaled(inflow, beta * dt),
    })
}

/// The `s - 1` starting levels of a BDF scheme from DIRK steps of the same order.
///
/// Returns `[f^0, f^1, ..., f^{s-1}]` with the output of each starting step.
pub fn bdf_startup(
    f0: &Distribution,
    ctx: &StepContext,
    dt: f64,
) -> Result<(Vec<Distribution>, Vec<StepOutput>)> {
    let coeffs = ctx.spec.time.bdf_coeffs().ok_or_else(|| {
        Error::InvalidParameter(format!("{} is not a multistep scheme", ctx.spec))
    })?;
    let tableau = ctx.spec.time.tableau();
    let mut levels = vec![f0.clone()];
    let mut outputs = Vec::new();
    for _ in 1..coeffs.steps() {
        let out = step_dirk(levels.last().expect("non-empty"), &tableau, ctx, dt)?;
        levels.push(out.f.clone());
        outputs.push(out);
    }
    Ok((levels, outputs))
}
