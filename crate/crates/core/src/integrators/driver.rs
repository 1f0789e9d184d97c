//! Time loop with uniform steps, conservation bookkeeping and snapshots.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::{total_moments, Distribution, PhaseGrid};
use crate::integrators::scheme::SchemeSpec;
use crate::integrators::step::{step_bdf, step_dirk, StepContext, StepOutput};
use crate::maxwellian::{NewtonConfig, NewtonStats};
use crate::reconstruction::WenoParams;

/// Physical and numerical parameters of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub kappa: f64,
    pub cfl: f64,
    pub t_final: f64,
    /// Times at which the state is kept; each is taken at the first step end at or after it.
    pub snapshot_times: Vec<f64>,
    pub newton: NewtonConfig,
    pub weno: WenoParams,
}

impl RunSettings {
    pub fn new(kappa: f64, cfl: f64, t_final: f64) -> Result<Self> {
        let s = Self {
            kappa,
            cfl,
            t_final,
            snapshot_times: Vec::new(),
            newton: NewtonConfig::default(),
            weno: WenoParams::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn with_newton(mut self, newton: NewtonConfig) -> Self {
        self.newton = newton;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {x}"
                )))
            }
        };
        positive("kappa", self.kappa)?;
        positive("CFL", self.cfl)?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "final time must be non-negative, got {}",
                self.t_final
            )));
        }
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|&&t| !(t >= 0.0 && t <= self.t_final))
        {
            return Err(Error::InvalidParameter(format!(
                "snapshot time {t} outside [0, {}]",
                self.t_final
            )));
        }
        self.newton.validate()
    }
}

/// `dt = CFL dx / max |v|`.
pub fn time_step(grid: &PhaseGrid, cfl: f64) -> f64 {
    cfl * grid.dx() / grid.speed_max()
}

/// Number of full steps and the length of the final partial step (0 if none).
pub fn step_plan(t_final: f64, dt: f64) -> (usize, f64) {
    let ratio = t_final / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        return (nearest as usize, 0.0);
    }
    let full = ratio.floor();
    (full as usize, t_final - full * dt)
}

/// Totals after a step and the totals expected from the boundary budget alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub totals: [f64; 3],
    pub reference: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub requested: f64,
    pub t: f64,
    pub f: Distribution,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: SchemeSpec,
    pub grid: PhaseGrid,
    pub dt: f64,
    pub full_steps: usize,
    /// Entry 0 is the initial state.
    pub records: Vec<StepRecord>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: Distribution,
    pub newton: NewtonStats,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    pub fn final_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }

    pub fn initial_totals(&self) -> [f64; 3] {
        self.records[0].totals
    }

    pub fn final_totals(&self) -> [f64; 3] {
        self.records.last().expect("initial record").totals
    }

    pub fn final_reference(&self) -> [f64; 3] {
        self.records.last().expect("initial record").reference
    }
}

struct Recorder<'a> {
    grid: &'a PhaseGrid,
    records: Vec<StepRecord>,
    /// reference totals, newest first
    refs: VecDeque<[f64; 3]>,
    pending: Vec<f64>,
    snapshots: Vec<Snapshot>,
    newton: NewtonStats,
    tol_t: f64,
}

impl<'a> Recorder<'a> {
    fn new(
        grid: &'a PhaseGrid,
        f0: &Distribution,
        snapshot_times: &[f64],
        tol_t: f64,
    ) -> Result<Self> {
        let totals = total_moments(f0, grid)?;
        let mut pending = snapshot_times.to_vec();
        pending.sort_by(f64::total_cmp);
        let mut r = Self {
            grid,
            records: vec![StepRecord {
                step: 0,
                t: 0.0,
                totals,
                reference: totals,
            }],
            refs: VecDeque::from([totals]),
            pending,
            snapshots: Vec::new(),
            newton: NewtonStats::default(),
            tol_t,
        };
        r.take_snapshots(0.0, f0);
        Ok(r)
    }

    fn take_snapshots(&mut self, t: f64, f: &Distribution) {
        while let Some(&req) = self.pending.first() {
            if t + self.tol_t < req {
                break;
            }
            self.snapshots.push(Snapshot {
                requested: req,
                t,
                f: f.clone(),
            });
            self.pending.remove(0);
        }
    }

    /// Records a step whose reference totals combine `weights` of the recent references.
    fn push(&mut self, t: f64, out: &StepOutput, weights: &[f64]) -> Result<()> {
        let mut reference = out.budget;
        for (w, r) in weights.iter().zip(&self.refs) {
            for l in 0..3 {
                reference[l] += w * r[l];
            }
        }
        self.refs.push_front(reference);
        self.refs.truncate(4);
        let totals = total_moments(&out.f, self.grid)?;
        self.records.push(StepRecord {
            step: self.records.len(),
            t,
            totals,
            reference,
        });
        self.newton.merge(&out.stats);
        self.take_snapshots(t, &out.f);
        Ok(())
    }
}

fn at_step(step: usize, t: f64) -> impl FnOnce(Error) -> Error {
    move |e| Error::StepFailed {
        step,
        t,
        source: Box::new(e),
    }
}

/// Advances `f0` to `settings.t_final` with `dt = CFL dx / max|v|` and a final partial step.
///
/// Multistep schemes start from DIRK steps of the same order and fall back to one DIRK
/// step for the shortened last step.
pub fn run(
    spec: SchemeSpec,
    f0: &Distribution,
    grid: &PhaseGrid,
    settings: &RunSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    f0.ensure_matches(grid)?;
    f0.check_finite("initial data")?;
    let mut ctx =
        StepContext::new(grid.clone(), settings.kappa, spec)?.with_newton(settings.newton);
    ctx.weno = settings.weno;
    let dt = time_step(grid, settings.cfl);
    let (full_steps, remainder) = step_plan(settings.t_final, dt);
    let mut rec = Recorder::new(grid, f0, &settings.snapshot_times, 1e-9 * dt)?;
    let tableau = spec.time.tableau();
    let bdf = spec.time.bdf_coeffs();

    // newest first
    let mut levels: VecDeque<Distribution> = VecDeque::from([f0.clone()]);
    for n in 0..full_steps {
        let t = (n + 1) as f64 * dt;
        let (out, weights) = match &bdf {
            Some(coeffs) if levels.len() >= coeffs.steps() => {
                let hist: Vec<&Distribution> = levels.iter().take(coeffs.steps()).collect();
                let out = step_bdf(&hist, coeffs, &ctx, dt).map_err(at_step(n + 1, t))?;
                (out, coeffs.a().to_vec())
            }
            _ => {
                let out = step_dirk(&levels[0], &tableau, &ctx, dt).map_err(at_step(n + 1, t))?;
                (out, vec![1.0])
            }
        };
        rec.push(t, &out, &weights)?;
        levels.push_front(out.f);
        levels.truncate(3);
    }
    if remainder > 0.0 {
        let n = full_steps + 1;
        let out = step_dirk(&levels[0], &tableau, &ctx, remainder)
            .map_err(at_step(n, settings.t_final))?;
        rec.push(settings.t_final, &out, &[1.0])?;
        levels.push_front(out.f);
    }
    let final_state = levels.pop_front().expect("at least the initial level");
    Ok(Trajectory {
        spec,
        grid: grid.clone(),
        dt,
        full_steps,
        records: rec.records,
        snapshots: rec.snapshots,
        final_state,
        newton: rec.newton,
    })
}
