//! Exact solution of the Riemann problem for the gamma-law Euler equations.

use crate::error::{Error, Result};
use crate::grid::Moments;

/// Primitive state `(rho, u, p)` of a gamma-law gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl EulerState {
    pub fn new(rho: f64, u: f64, p: f64) -> Result<Self> {
        let s = Self { rho, u, p };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho > 0.0
            && self.p > 0.0
            && self.u.is_finite()
            && self.rho.is_finite()
            && self.p.is_finite()
        {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "Euler state needs rho > 0 and p > 0, got ({}, {}, {})",
                self.rho, self.u, self.p
            )))
        }
    }

    /// Kinetic temperature `p / rho`.
    pub fn temperature(&self) -> f64 {
        self.p / self.rho
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }

    /// Conserved moments of the matching 1D Maxwellian.
    pub fn moments(&self) -> Moments {
        Moments::from_primitive(self.rho, self.u, self.temperature())
    }
}

/// One of the two nonlinear waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

/// Star-region state and wave structure of a solved Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: EulerState,
    pub right: EulerState,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
    pub iterations: usize,
    /// True when Newton failed and the star pressure came from bisection.
    pub bisected: bool,
}

const NEWTON_MAX: usize = 50;
const NEWTON_TOL: f64 = 1e-15;

/// Velocity jump across the wave connecting `k` to pressure `p`, and its derivative.
pub fn wave_function(p: f64, k: &EulerState, gamma: f64) -> (f64, f64) {
    if p > k.p {
        let a = 2.0 / ((gamma + 1.0) * k.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * k.p;
        let q = (a / (p + b)).sqrt();
        ((p - k.p) * q, q * (1.0 - 0.5 * (p - k.p) / (b + p)))
    } else {
        let c = k.sound_speed(gamma);
        let z = (gamma - 1.0) / (2.0 * gamma);
        let r = p / k.p;
        (
            2.0 * c / (gamma - 1.0) * (r.powf(z) - 1.0),
            r.powf(-(gamma + 1.0) / (2.0 * gamma)) / (k.rho * c),
        )
    }
}

/// `f(p) = f_L(p) + f_R(p) + u_R - u_L`, whose root is the star pressure.
pub fn pressure_function(p: f64, left: &EulerState, right: &EulerState, gamma: f64) -> (f64, f64) {
    let (fl, dl) = wave_function(p, left, gamma);
    let (fr, dr) = wave_function(p, right, gamma);
    (fl + fr + right.u - left.u, dl + dr)
}

fn two_rarefaction_guess(left: &EulerState, right: &EulerState, gamma: f64) -> f64 {
    let z = (gamma - 1.0) / (2.0 * gamma);
    let cl = left.sound_speed(gamma);
    let cr = right.sound_speed(gamma);
    let num = cl + cr - 0.5 * (gamma - 1.0) * (right.u - left.u);
    let den = cl / left.p.powf(z) + cr / right.p.powf(z);
    (num / den).powf(1.0 / z)
}

fn newton(left: &EulerState, right: &EulerState, gamma: f64) -> Option<(f64, usize)> {
    let mut p = two_rarefaction_guess(left, right, gamma);
    if !(p.is_finite() && p > 0.0) {
        p = 0.5 * (left.p + right.p);
    }
    for it in 1..=NEWTON_MAX {
        let (f, df) = pressure_function(p, left, right, gamma);
        if f == 0.0 {
            return Some((p, it));
        }
        let mut next = p - f / df;
        if !next.is_finite() {
            return None;
        }
        if next <= 0.0 {
            next = 0.5 * p;
        }
        let change = 2.0 * (next - p).abs() / (next + p);
        p = next;
        if change < NEWTON_TOL {
            return Some((p, it));
        }
    }
    None
}

fn bisection(left: &EulerState, right: &EulerState, gamma: f64) -> Result<(f64, usize)> {
    let g = |p: f64| pressure_function(p, left, right, gamma).0;
    let mut lo = 0.0;
    let mut hi = left.p.max(right.p);
    let mut it = 0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        it += 1;
        if it > 2000 || !hi.is_finite() {
            return Err(Error::Riemann(
                "no upper bracket for the star pressure".into(),
            ));
        }
    }
    while hi - lo > 1e-16 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    Ok((0.5 * (lo + hi), it))
}

impl RiemannSolution {
    /// Solves for the star region, Newton first with a bisection fallback.
    pub fn solve(left: EulerState, right: EulerState, gamma: f64) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must exceed 1, got {gamma}"
            )));
        }
        let cl = left.sound_speed(gamma);
        let cr = right.sound_speed(gamma);
        if 2.0 / (gamma - 1.0) * (cl + cr) <= right.u - left.u {
            return Err(Error::VacuumFormed);
        }
        let (p_star, iterations, bisected) = match newton(&left, &right, gamma) {
            Some((p, it)) => (p, it, false),
            None => {
                let (p, it) = bisection(&left, &right, gamma)?;
                (p, it, true)
            }
        };
        let (fl, _) = wave_function(p_star, &left, gamma);
        let (fr, _) = wave_function(p_star, &right, gamma);
        let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
        Ok(Self {
            left,
            right,
            gamma,
            p_star,
            u_star,
            iterations,
            bisected,
        })
    }

    fn star_density(&self, k: &EulerState) -> f64 {
        let g = self.gamma;
        let r = self.p_star / k.p;
        if self.p_star > k.p {
            let m = (g - 1.0) / (g + 1.0);
            k.rho * (r + m) / (m * r + 1.0)
        } else {
            k.rho * r.powf(1.0 / g)
        }
    }

    pub fn rho_star_left(&self) -> f64 {
        self.star_density(&self.left)
    }

    pub fn rho_star_right(&self) -> f64 {
        self.star_density(&self.right)
    }

    pub fn left_wave(&self) -> Wave {
        let g = self.gamma;
        let l = &self.left;
        let cl = l.sound_speed(g);
        if self.p_star > l.p {
            let q = ((g + 1.0) / (2.0 * g) * self.p_star / l.p + (g - 1.0) / (2.0 * g)).sqrt();
            Wave::Shock {
                speed: l.u - cl * q,
            }
        } else {
            let c_star = cl * (self.p_star / l.p).powf((g - 1.0) / (2.0 * g));
            Wave::Rarefaction {
                head: l.u - cl,
                tail: self.u_star - c_star,
            }
        }
    }

    pub fn right_wave(&self) -> Wave {
        let g = self.gamma;
        let r = &self.right;
        let cr = r.sound_speed(g);
        if self.p_star > r.p {
            let q = ((g + 1.0) / (2.0 * g) * self.p_star / r.p + (g - 1.0) / (2.0 * g)).sqrt();
            Wave::Shock {
                speed: r.u + cr * q,
            }
        } else {
            let c_star = cr * (self.p_star / r.p).powf((g - 1.0) / (2.0 * g));
            Wave::Rarefaction {
                head: r.u + cr,
                tail: self.u_star + c_star,
            }
        }
    }

    /// Self-similar solution at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> EulerState {
        let g = self.gamma;
        if xi <= self.u_star {
            let l = &self.left;
            let star = EulerState {
                rho: self.rho_star_left(),
                u: self.u_star,
                p: self.p_star,
            };
            match self.left_wave() {
                Wave::Shock { speed } => {
                    if xi <= speed {
                        *l
                    } else {
                        star
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi <= head {
                        *l
                    } else if xi >= tail {
                        star
                    } else {
                        let cl = l.sound_speed(g);
                        let c = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * (l.u - xi));
                        let u = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * l.u + xi);
                        let rho = l.rho * (c / cl).powf(2.0 / (g - 1.0));
                        let p = l.p * (c / cl).powf(2.0 * g / (g - 1.0));
                        EulerState { rho, u, p }
                    }
                }
            }
        } else {
            let r = &self.right;
            let star = EulerState {
                rho: self.rho_star_right(),
                u: self.u_star,
                p: self.p_star,
            };
            match self.right_wave() {
                Wave::Shock { speed } => {
                    if xi >= speed {
                        *r
                    } else {
                        star
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi >= head {
                        *r
                    } else if xi <= tail {
                        star
                    } else {
                        let cr = r.sound_speed(g);
                        let c = 2.0 / (g + 1.0) * (cr - 0.5 * (g - 1.0) * (r.u - xi));
                        let u = 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * r.u + xi);
                        let rho = r.rho * (c / cr).powf(2.0 / (g - 1.0));
                        let p = r.p * (c / cr).powf(2.0 * g / (g - 1.0));
                        EulerState { rho, u, p }
                    }
                }
            }
        }
    }

    /// Solution at time `t > 0` with the initial jump at `x0`.
    pub fn sample_at(&self, x: f64, x0: f64, t: f64) -> EulerState {
        self.sample((x - x0) / t)
    }
}

/// Samples the exact solution of the Riemann problem at `xi = x / t`.
pub fn exact_euler_riemann(
    left: EulerState,
    right: EulerState,
    gamma: f64,
    xi: f64,
) -> Result<EulerState> {
    Ok(RiemannSolution::solve(left, right, gamma)?.sample(xi))
}
