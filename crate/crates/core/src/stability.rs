//! Linear stability of the conservative schemes on `u_t + u_x = 0`.
//!
//! A Fourier mode `exp(i xi j)` with CFL number `a` is multiplied per step by
//! `rho = 1 - i xi a sum_l b_l exp(-i c_l a xi)` for the DIRK schemes, and by the
//! roots of a degree-k characteristic polynomial for BDF-k.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrators::{BdfCoeffs, Tableau};

/// `F_s` values above `-UNSTABLE_TOL` count as non-negative.
const UNSTABLE_TOL: f64 = 1e-13;
/// Root moduli up to `1 + ROOT_TOL` count as bounded.
const ROOT_TOL: f64 = 1e-12;
const BISECTION_TOL: f64 = 1e-9;
const VIETA_TOL: f64 = 1e-10;
const DEGENERATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityScan {
    /// Number of equispaced samples of `xi` on `[-pi, pi]`; odd so that `xi = 0` is included.
    pub xi_samples: usize,
    /// CFL increment of the coarse scans.
    pub a_step: f64,
    /// Largest CFL number scanned.
    pub a_max: f64,
}

impl Default for StabilityScan {
    fn default() -> Self {
        Self {
            xi_samples: 2001,
            a_step: 1e-3,
            a_max: 4.0,
        }
    }
}

impl StabilityScan {
    pub fn new(xi_samples: usize, a_step: f64, a_max: f64) -> Result<Self> {
        let s = Self {
            xi_samples,
            a_step,
            a_max,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.xi_samples < 3 || self.xi_samples % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "xi_samples must be odd and at least 3, got {}",
                self.xi_samples
            )));
        }
        if !(self.a_step > 0.0 && self.a_step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "a_step must be positive, got {}",
                self.a_step
            )));
        }
        if !(self.a_max >= self.a_step && self.a_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "a_max = {} must be at least a_step = {}",
                self.a_max, self.a_step
            )));
        }
        Ok(())
    }

    pub fn xi_values(&self) -> Vec<f64> {
        let n = self.xi_samples - 1;
        (0..=n)
            .map(|k| PI * (2.0 * k as f64 - n as f64) / n as f64)
            .collect()
    }

    /// `a_step, 2 a_step, ...` up to `a_max`.
    pub fn cfl_values(&self) -> Vec<f64> {
        let n = (self.a_max / self.a_step + 1e-9).floor() as usize;
        (1..=n).map(|k| k as f64 * self.a_step).collect()
    }
}

/// Per-step amplification of the DIRK scheme with weights `b` and nodes `c`.
pub fn rk_amp(b: &[f64], c: &[f64], a: f64, xi: f64) -> Complex64 {
    let sum: Complex64 = b
        .iter()
        .zip(c)
        .map(|(&bl, &cl)| bl * Complex64::from_polar(1.0, -cl * a * xi))
        .sum();
    1.0 - Complex64::i() * xi * a * sum
}

/// `R(z) = 1 + z sum_l b_l exp(c_l z)`, so that `rk_amp = R(-i a xi)`.
pub fn stability_function(b: &[f64], c: &[f64], z: Complex64) -> Complex64 {
    let sum: Complex64 = b.iter().zip(c).map(|(&bl, &cl)| bl * (cl * z).exp()).sum();
    1.0 + z * sum
}

/// `(C_s(y), S_s(y)) = (sum b cos(c y), sum b sin(c y))`.
pub fn cs_ss(b: &[f64], c: &[f64], y: f64) -> (f64, f64) {
    b.iter().zip(c).fold((0.0, 0.0), |(cs, ss), (&bl, &cl)| {
        let (s, co) = (cl * y).sin_cos();
        (cs + bl * co, ss + bl * s)
    })
}

/// `F_s(y) = S_s - (y/2)(C_s^2 + S_s^2)`, with `|rho|^2 - 1 = -2 y F_s(y)` at `y = a xi`.
pub fn fs_function(b: &[f64], c: &[f64], y: f64) -> f64 {
    let (cs, ss) = cs_ss(b, c, y);
    ss - 0.5 * y * (cs * cs + ss * ss)
}

fn fs_unstable(b: &[f64], c: &[f64], y: f64) -> bool {
    fs_function(b, c, y) < -UNSTABLE_TOL
}

/// Bisects `unstable` between a stable `lo` and an unstable `hi`.
fn bisect(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut unstable: impl FnMut(f64) -> Result<bool>,
) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if unstable(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// End of the first interval `[0, y*]` on which `F_s >= 0`, searched on `(0, pi a_max]`.
pub fn rk_y_star(b: &[f64], c: &[f64], scan: &StabilityScan) -> f64 {
    let h = PI * scan.a_step;
    let y_max = PI * scan.a_max;
    let mut prev = 0.0;
    let mut k = 1;
    loop {
        let y = (k as f64 * h).min(y_max);
        if fs_unstable(b, c, y) {
            if k == 1 {
                return 0.0;
            }
            return bisect(prev, y, BISECTION_TOL, |m| Ok(fs_unstable(b, c, m)))
                .expect("infallible predicate");
        }
        if y >= y_max {
            return y_max;
        }
        prev = y;
        k += 1;
    }
}

/// Maximal CFL number `a* = y*/pi`.
pub fn rk_max_cfl(b: &[f64], c: &[f64], scan: &StabilityScan) -> f64 {
    rk_y_star(b, c, scan) / PI
}

/// Monic coefficients `[1, q_1, ..., q_k]` with `q_l = -a_l (1 - beta a i xi exp(-i xi l a))`.
pub fn bdf_characteristic(coeffs: &BdfCoeffs, a: f64, xi: f64) -> Vec<Complex64> {
    let beta = coeffs.beta();
    let mut p = vec![Complex64::one()];
    for (l, &al) in coeffs.a().iter().enumerate() {
        let shift = Complex64::from_polar(1.0, -xi * (l + 1) as f64 * a);
        p.push(-al * (1.0 - beta * a * Complex64::i() * xi * shift));
    }
    p
}

/// Roots of a monic polynomial `[1, q_1, ..., q_k]` from its companion matrix.
pub fn monic_roots(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let k = p.len().saturating_sub(1);
    if k == 0 || p[0] != Complex64::one() {
        return Err(Error::InvalidParameter(
            "expected a monic polynomial of degree at least 1".into(),
        ));
    }
    let mut m = DMatrix::<Complex64>::zeros(k, k);
    for j in 0..k {
        m[(0, j)] = -p[j + 1];
    }
    for i in 1..k {
        m[(i, i - 1)] = Complex64::one();
    }
    let roots: Vec<Complex64> = m
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
        .ok_or_else(|| Error::RootFinder(format!("Schur iteration failed for coefficients {p:?}")))?
        .iter()
        .copied()
        .collect();
    let product: Complex64 = roots.iter().product();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let expected = sign * p[k];
    if (product - expected).norm() > VIETA_TOL * expected.norm().max(1.0) {
        return Err(Error::RootFinder(format!(
            "root product {product} differs from {expected} for coefficients {p:?}"
        )));
    }
    Ok(roots)
}

/// Largest root modulus of the BDF characteristic polynomial at `(a, xi)`.
pub fn bdf_max_root(coeffs: &BdfCoeffs, a: f64, xi: f64) -> Result<f64> {
    let roots = monic_roots(&bdf_characteristic(coeffs, a, xi))?;
    Ok(roots.iter().map(|r| r.norm()).fold(0.0, f64::max))
}

/// `max_xi max|rho|` over the scan's `xi` samples.
pub fn bdf_max_amplification(coeffs: &BdfCoeffs, a: f64, scan: &StabilityScan) -> Result<f64> {
    scan.xi_values()
        .par_iter()
        .map(|&xi| bdf_max_root(coeffs, a, xi))
        .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
}

fn bdf_unstable(coeffs: &BdfCoeffs, a: f64, scan: &StabilityScan) -> Result<bool> {
    Ok(bdf_max_amplification(coeffs, a, scan)? > 1.0 + ROOT_TOL)
}

/// Largest CFL number whose roots stay in the closed unit disc; zero if unstable at `a_step`.
pub fn bdf_max_cfl(coeffs: &BdfCoeffs, scan: &StabilityScan) -> Result<f64> {
    scan.validate()?;
    let mut prev = 0.0;
    for a in scan.cfl_values() {
        if bdf_unstable(coeffs, a, scan)? {
            if prev == 0.0 {
                return Ok(0.0);
            }
            return bisect(prev, a, BISECTION_TOL, |m| bdf_unstable(coeffs, m, scan));
        }
        prev = a;
    }
    Ok(prev)
}

/// `(a, max_xi max|rho|)` rows for the given CFL numbers.
pub fn bdf_scan(coeffs: &BdfCoeffs, cfls: &[f64], scan: &StabilityScan) -> Result<Vec<(f64, f64)>> {
    cfls.iter()
        .map(|&a| Ok((a, bdf_max_amplification(coeffs, a, scan)?)))
        .collect()
}

/// `(y, F_s(y))` rows on `[0, pi a_max]` with spacing `pi a_step`.
pub fn fs_scan(b: &[f64], c: &[f64], scan: &StabilityScan) -> Vec<(f64, f64)> {
    std::iter::once(0.0)
        .chain(scan.cfl_values().into_iter().map(|a| PI * a))
        .map(|y| (y, fs_function(b, c, y)))
        .collect()
}

/// Free parameters of the third-order family with `c_1 = b_3 = gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dirk3Params {
    pub gamma: f64,
    pub gamma2: f64,
    pub b2: f64,
    pub c2: f64,
}

impl Dirk3Params {
    pub fn tableau(&self) -> Result<Tableau> {
        Tableau::dirk3_family(self.gamma, self.gamma2, self.b2, self.c2)
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The rational with the smallest denominator among the continued-fraction
/// convergents of `x` that rounds back to `x`, so that `0.3` maps to `3/10`.
pub fn simplest_rational(x: f64) -> Result<BigRational> {
    let exact = BigRational::from_float(x).ok_or_else(|| Error::NonFinite {
        context: format!("rational conversion of {x}"),
    })?;
    let (mut h0, mut h1) = (BigRational::zero(), BigRational::one());
    let (mut k0, mut k1) = (BigRational::one(), BigRational::zero());
    let mut rest = exact.clone();
    loop {
        let a = rest.floor();
        let h = &a * &h1 + &h0;
        let k = &a * &k1 + &k0;
        let candidate = &h / &k;
        if candidate.to_f64() == Some(x) {
            return Ok(candidate);
        }
        let frac = &rest - &a;
        if frac.is_zero() {
            return Ok(exact);
        }
        rest = frac.recip();
        (h0, h1) = (h1, h);
        (k0, k1) = (k1, k);
    }
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Closed-form `(gamma_2, b_2, c_2)` evaluated in exact rational arithmetic.
pub fn dirk3_params(gamma: f64) -> Result<Dirk3Params> {
    if !gamma.is_finite() {
        return Err(Error::NonFinite {
            context: "DIRK3 gamma".into(),
        });
    }
    let g = simplest_rational(gamma)?;
    let g2 = &g * &g;
    let g3 = &g2 * &g;
    let d1 = ratio(2, 1) * &g2 - ratio(4, 1) * &g + ratio(1, 1);
    let d2 = ratio(3, 1) * &g3 - ratio(9, 1) * &g2 + ratio(6, 1) * &g - ratio(1, 1);
    if to_f64(&d1).abs() < DEGENERATE_TOL || to_f64(&d2).abs() < DEGENERATE_TOL {
        return Err(Error::DegenerateGamma { gamma });
    }
    let b2 = -ratio(3, 4) * &d1 * &d1 / &d2;
    let c2 = (ratio(6, 1) * &g2 - ratio(9, 1) * &g + ratio(2, 1)) / (ratio(3, 1) * &d1);
    let gamma2 = (ratio(6, 1) * &g2 - ratio(6, 1) * &g + ratio(1, 1)) / (ratio(3, 1) * &d1);
    Ok(Dirk3Params {
        gamma,
        gamma2: to_f64(&gamma2),
        b2: to_f64(&b2),
        c2: to_f64(&c2),
    })
}

/// Third-order stiffly accurate DIRK tableau for the given `gamma`.
pub fn dirk3_from_gamma(gamma: f64) -> Result<Tableau> {
    dirk3_params(gamma)?.tableau()
}

/// Lower end of the admissible `gamma` interval, `1 - sqrt(2)/2`.
pub fn gamma_interval() -> (f64, f64) {
    (1.0 - std::f64::consts::SQRT_2 / 2.0, 1.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IStability {
    /// `E_4 = 8 q_1 - 12 q_2 - 3`.
    pub e4: f64,
    /// `c_1 <= 1/3` and `c_2 >= 1`.
    pub region: bool,
}

impl IStability {
    pub fn a_stable(&self) -> bool {
        self.e4 >= 0.0 && self.region
    }
}

/// `q_1`, `q_2` are the first two elementary symmetric functions of the diagonal.
pub fn istability_check(tab: &Tableau) -> Result<IStability> {
    if tab.stages() != 3 {
        return Err(Error::InvalidParameter(format!(
            "I-stability check needs a 3-stage tableau, got {}",
            tab.stages()
        )));
    }
    let d = [tab.a(0, 0), tab.a(1, 1), tab.a(2, 2)];
    let q1 = d[0] + d[1] + d[2];
    let q2 = d[0] * d[1] + d[0] * d[2] + d[1] * d[2];
    let c = tab.c();
    Ok(IStability {
        e4: 8.0 * q1 - 12.0 * q2 - 3.0,
        region: c[0] <= 1.0 / 3.0 && c[1] >= 1.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaScan {
    pub gamma_opt: f64,
    pub y_star_opt: f64,
    /// `(gamma, y*)` for every grid point with a valid tableau.
    pub rows: Vec<(f64, f64)>,
}

/// Maximizes `y*(gamma)` over the multiples of `step` inside the open `interval`.
pub fn optimize_gamma(interval: (f64, f64), step: f64, scan: &StabilityScan) -> Result<GammaScan> {
    scan.validate()?;
    let (lo, hi) = interval;
    let (min, max) = gamma_interval();
    if !(lo < hi && lo >= min - 1e-15 && hi <= max + 1e-15) {
        return Err(Error::InvalidParameter(format!(
            "gamma interval [{lo}, {hi}] must lie inside ]{min}, {max}["
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma step must be positive, got {step}"
        )));
    }
    // exact grid points such as 0.3 rather than 300 * 0.001
    let inv = (1.0 / step).round();
    let at = |k: i64| {
        if ((1.0 / step) - inv).abs() < 1e-9 * inv {
            k as f64 / inv
        } else {
            k as f64 * step
        }
    };
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil() as i64;
    let gammas: Vec<f64> = (first..=last)
        .map(at)
        .filter(|&g| g > lo && g < hi && g > min && g < max)
        .collect();
    let rows: Vec<(f64, f64)> = gammas
        .par_iter()
        .filter_map(|&g| match dirk3_from_gamma(g) {
            Ok(tab) => Some(Ok((g, rk_y_star(tab.b(), tab.c(), scan)))),
            Err(Error::DegenerateGamma { .. }) | Err(Error::InvalidParameter(_)) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    let &(gamma_opt, y_star_opt) = rows
        .iter()
        .fold(None, |best: Option<&(f64, f64)>, r| match best {
            Some(b) if b.1 >= r.1 => Some(b),
            _ => Some(r),
        })
        .ok_or_else(|| Error::InsufficientData("no admissible gamma on the scan grid".into()))?;
    Ok(GammaScan {
        gamma_opt,
        y_star_opt,
        rows,
    })
}

/// Spectral-interpolation harness on a periodic grid of unit cells.
///
/// Cell `j` is centred at `x = j`. Point values come from the cell averages by
/// dividing each Fourier coefficient by `sinc(xi/2)`.
pub mod fourier {
    use super::*;

    fn wavenumber(k: usize, n: usize) -> f64 {
        let k = k as i64;
        let n = n as i64;
        let signed = if k <= n / 2 { k } else { k - n };
        2.0 * PI * signed as f64 / n as f64
    }

    /// `(1/N) sum_j u_j exp(-i xi_m j)`.
    pub fn dft_coefficient(u: &[f64], m: usize) -> Complex64 {
        let n = u.len();
        let xi = wavenumber(m, n);
        u.iter()
            .enumerate()
            .map(|(j, &uj)| uj * Complex64::from_polar(1.0, -xi * j as f64))
            .sum::<Complex64>()
            / n as f64
    }

    /// Point values of the trigonometric interpolant whose cell averages are `u`.
    pub struct PointValues {
        coeffs: Vec<(f64, Complex64)>,
    }

    impl PointValues {
        /// The Nyquist mode of an even grid is dropped; test data should not excite it.
        pub fn new(u: &[f64]) -> Self {
            let n = u.len();
            let coeffs = (0..n)
                .filter(|&k| !(n % 2 == 0 && k == n / 2))
                .map(|k| {
                    let xi = wavenumber(k, n);
                    let half = 0.5 * xi;
                    let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
                    (xi, dft_coefficient(u, k) / sinc)
                })
                .collect();
            Self { coeffs }
        }

        pub fn at(&self, x: f64) -> f64 {
            self.coeffs
                .iter()
                .map(|&(xi, c)| (c * Complex64::from_polar(1.0, xi * x)).re)
                .sum()
        }

        /// `u(j + 1/2 - s) - u(j - 1/2 - s)`, the flux difference of a shift by `s` cells.
        pub fn face_difference(&self, j: usize, s: f64) -> f64 {
            let x = j as f64;
            self.at(x + 0.5 - s) - self.at(x - 0.5 - s)
        }
    }

    /// One conservative DIRK step at CFL `a` with unit speed and no collisions.
    pub fn rk_step(b: &[f64], c: &[f64], a: f64, u: &[f64]) -> Vec<f64> {
        let pv = PointValues::new(u);
        (0..u.len())
            .map(|j| {
                let flux: f64 = b
                    .iter()
                    .zip(c)
                    .map(|(&bl, &cl)| bl * pv.face_difference(j, cl * a))
                    .sum();
                u[j] - a * flux
            })
            .collect()
    }

    /// One BDF step; `levels[0]` is the newest level.
    pub fn bdf_step(coeffs: &BdfCoeffs, a: f64, levels: &[Vec<f64>]) -> Result<Vec<f64>> {
        let k = coeffs.steps();
        if levels.len() < k {
            return Err(Error::InsufficientData(format!(
                "BDF{k} needs {k} levels, got {}",
                levels.len()
            )));
        }
        let n = levels[0].len();
        let beta = coeffs.beta();
        let mut next = vec![0.0; n];
        for (l, (&al, u)) in coeffs.a().iter().zip(levels).enumerate() {
            let pv = PointValues::new(u);
            let shift = (l + 1) as f64 * a;
            for (j, v) in next.iter_mut().enumerate() {
                *v += al * (u[j] - beta * a * pv.face_difference(j, shift));
            }
        }
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::fourier::*;
    use super::*;
    use proptest::prelude::*;

    fn dirk2() -> Tableau {
        Tableau::dirk2()
    }

    #[test]
    fn trivial_modes_are_not_amplified() {
        let t = Tableau::dirk3();
        assert_eq!(rk_amp(t.b(), t.c(), 1.3, 0.0), Complex64::one());
        assert_eq!(rk_amp(t.b(), t.c(), 0.0, 2.0), Complex64::one());
    }

    #[test]
    fn dirk2_is_stable_at_unit_cfl() {
        let t = dirk2();
        assert!(rk_amp(t.b(), t.c(), 1.0, PI).norm() <= 1.0);
    }

    #[test]
    fn fs_at_zero_vanishes_with_unit_weights() {
        // S(0) = 0, so F_s(0) = 0 and |rho|^2 - 1 = -2 y F_s vanishes to second order
        let t = Tableau::dirk3();
        assert_eq!(fs_function(t.b(), t.c(), 0.0), 0.0);
        let (cs, ss) = cs_ss(t.b(), t.c(), 0.0);
        assert!((cs - 1.0).abs() < 1e-15 && ss == 0.0);
    }

    #[test]
    fn dirk_golden_y_star() {
        let scan = StabilityScan::default();
        let t = dirk2();
        let y = rk_y_star(t.b(), t.c(), &scan);
        assert!((y - 4.586_275_880).abs() < 1e-3, "{y}");
        assert!((rk_max_cfl(t.b(), t.c(), &scan) - 1.46).abs() < 0.01);
        let t = Tableau::dirk3();
        let y = rk_y_star(t.b(), t.c(), &scan);
        assert!((y - 4.715_426_442).abs() < 1e-3, "{y}");
        assert!((y / PI - 1.5).abs() < 0.01);
    }

    #[test]
    fn y_star_is_a_sign_change() {
        let t = dirk2();
        let y = rk_y_star(t.b(), t.c(), &StabilityScan::default());
        assert!(fs_function(t.b(), t.c(), y - 1e-6) > 0.0);
        assert!(fs_function(t.b(), t.c(), y + 1e-6) < 0.0);
    }

    #[test]
    fn bdf2_at_zero_frequency() {
        let mut roots: Vec<f64> = monic_roots(&bdf_characteristic(&BdfCoeffs::bdf2(), 0.7, 0.0))
            .unwrap()
            .iter()
            .map(|r| {
                assert!(r.im.abs() < 1e-14);
                r.re
            })
            .collect();
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((roots[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn companion_roots_solve_the_polynomial() {
        let p = bdf_characteristic(&BdfCoeffs::bdf3(), 0.4, 1.1);
        for r in monic_roots(&p).unwrap() {
            let v = p.iter().fold(Complex64::zero(), |acc, &q| acc * r + q);
            assert!(v.norm() < 1e-13, "{v}");
        }
    }

    #[test]
    fn monic_roots_rejects_bad_input() {
        assert!(monic_roots(&[]).is_err());
        assert!(monic_roots(&[Complex64::new(2.0, 0.0), Complex64::one()]).is_err());
    }

    #[test]
    fn bdf2_critical_cfl() {
        let scan = StabilityScan::default();
        let a = bdf_max_cfl(&BdfCoeffs::bdf2(), &scan).unwrap();
        assert!((a - 0.5678).abs() < 0.005, "{a}");
        assert!(bdf_max_amplification(&BdfCoeffs::bdf2(), 0.5, &scan).unwrap() <= 1.0 + 1e-12);
        assert!(bdf_max_amplification(&BdfCoeffs::bdf2(), 0.6, &scan).unwrap() > 1.0);
    }

    #[test]
    fn bdf3_is_unstable_for_small_cfl() {
        let scan = StabilityScan::default();
        for a in [0.01, 0.05, 0.1, 0.2] {
            assert!(bdf_max_amplification(&BdfCoeffs::bdf3(), a, &scan).unwrap() > 1.0);
        }
        assert_eq!(bdf_max_cfl(&BdfCoeffs::bdf3(), &scan).unwrap(), 0.0);
    }

    #[test]
    fn gamma_three_tenths() {
        let p = dirk3_params(0.3).unwrap();
        assert_eq!(p.gamma2, 13.0 / 3.0);
        assert_eq!(p.b2, -3.0 / 710.0);
        assert_eq!(p.c2, 8.0 / 3.0);
        assert_eq!(dirk3_from_gamma(0.3).unwrap(), Tableau::dirk3());
    }

    #[test]
    fn simplest_rational_recovers_decimals() {
        assert_eq!(simplest_rational(0.3).unwrap(), ratio(3, 10));
        assert_eq!(simplest_rational(-1.25).unwrap(), ratio(-5, 4));
        assert_eq!(simplest_rational(7.0).unwrap(), ratio(7, 1));
        let x = std::f64::consts::E;
        assert_eq!(simplest_rational(x).unwrap().to_f64(), Some(x));
        assert!(simplest_rational(f64::NAN).is_err());
    }

    #[test]
    fn degenerate_gamma() {
        let root = 1.0 - std::f64::consts::SQRT_2 / 2.0;
        assert!(matches!(
            dirk3_params(root),
            Err(Error::DegenerateGamma { .. })
        ));
        assert!(dirk3_params(f64::INFINITY).is_err());
    }

    #[test]
    fn near_interval_end_tableau_is_valid() {
        let t = dirk3_from_gamma(0.293).unwrap();
        for r in t.order_residuals() {
            assert!(r.abs() < 1e-12, "{r}");
        }
        let e = istability_check(&t).unwrap();
        assert!(e.a_stable(), "{e:?}");
    }

    #[test]
    fn istability_of_dirk3() {
        let e = istability_check(&Tableau::dirk3()).unwrap();
        // q1 = 2/5 + 13/3, q2 = 2 (3/10)(13/3) + 9/100
        let q1 = 0.6 + 13.0 / 3.0;
        let q2 = 2.6 + 0.09;
        assert!((e.e4 - (8.0 * q1 - 12.0 * q2 - 3.0)).abs() < 1e-13);
        assert!(e.e4 >= 0.0 && e.region && e.a_stable());
        assert!(istability_check(&Tableau::dirk2()).is_err());
    }

    #[test]
    fn rejected_branch_is_flagged() {
        // beyond 1/3 the closed forms give c1 > 1/3 and c2 < 1
        let t = dirk3_from_gamma(0.35).unwrap();
        assert!(t.c()[1] < 1.0);
        assert!(!istability_check(&t).unwrap().region);
    }

    #[test]
    fn optimal_gamma() {
        let (lo, hi) = gamma_interval();
        let s = optimize_gamma((lo, hi), 1e-3, &StabilityScan::default()).unwrap();
        assert!((s.gamma_opt - 0.3).abs() <= 0.005, "{}", s.gamma_opt);
        assert!((s.y_star_opt - 4.715).abs() <= 0.01);
        for &(g, y) in &s.rows {
            if (g - 0.3).abs() <= 0.002 + 1e-12 {
                assert!(y.is_finite() && y > 4.0, "{g} {y}");
            }
        }
        assert!(optimize_gamma((0.2, 0.3), 1e-3, &StabilityScan::default()).is_err());
        assert!(optimize_gamma((0.3, 0.31), 0.0, &StabilityScan::default()).is_err());
    }

    #[test]
    fn sdirk3_is_never_stable() {
        let g = 0.435_866_521_5;
        let b = [
            -1.5 * g * g + 4.0 * g - 0.25,
            1.5 * g * g - 5.0 * g + 1.25,
            g,
        ];
        let c = [g, 0.5 * (1.0 + g), 1.0];
        assert_eq!(rk_max_cfl(&b, &c, &StabilityScan::default()), 0.0);
    }

    #[test]
    fn scan_validation() {
        assert!(StabilityScan::new(2000, 1e-3, 4.0).is_err());
        assert!(StabilityScan::new(11, 0.0, 4.0).is_err());
        assert!(StabilityScan::new(11, 1e-3, 1e-4).is_err());
        let s = StabilityScan::new(5, 0.5, 1.0).unwrap();
        assert_eq!(s.xi_values()[2], 0.0);
        assert_eq!(s.cfl_values(), vec![0.5, 1.0]);
        assert_eq!(fs_scan(&[1.0], &[1.0], &s).len(), 3);
    }

    #[test]
    fn fourier_harness_matches_rk_amplification() {
        let n = 24;
        for t in [
            Tableau::dirk2(),
            Tableau::dirk3(),
            Tableau::implicit_euler(),
        ] {
            for (m, a) in [(1, 0.4), (3, 1.2), (7, 2.7), (11, 0.9)] {
                let xi = 2.0 * PI * m as f64 / n as f64;
                let u: Vec<f64> = (0..n).map(|j| (xi * j as f64 + 0.3).cos()).collect();
                let next = rk_step(t.b(), t.c(), a, &u);
                let measured = dft_coefficient(&next, m) / dft_coefficient(&u, m);
                let predicted = rk_amp(t.b(), t.c(), a, xi);
                assert!(
                    (measured - predicted).norm() < 1e-8,
                    "{measured} {predicted}"
                );
            }
        }
    }

    #[test]
    fn fourier_harness_follows_bdf_recurrence() {
        let n = 16;
        let m = 3;
        let xi = 2.0 * PI * m as f64 / n as f64;
        for coeffs in [BdfCoeffs::bdf2(), BdfCoeffs::bdf3()] {
            let a = 0.8;
            let levels: Vec<Vec<f64>> = (0..coeffs.steps())
                .map(|l| {
                    (0..n)
                        .map(|j| (xi * j as f64 - 0.2 * l as f64).sin())
                        .collect()
                })
                .collect();
            let next = bdf_step(&coeffs, a, &levels).unwrap();
            let p = bdf_characteristic(&coeffs, a, xi);
            let predicted: Complex64 = levels
                .iter()
                .zip(&p[1..])
                .map(|(u, &q)| -q * dft_coefficient(u, m))
                .sum();
            assert!((dft_coefficient(&next, m) - predicted).norm() < 1e-8);
        }
        assert!(bdf_step(&BdfCoeffs::bdf3(), 0.5, &[vec![0.0; 4]]).is_err());
    }

    #[test]
    fn point_values_reproduce_cell_averages() {
        let u: Vec<f64> = (0..9)
            .map(|j| (0.7 * j as f64).sin() + 0.1 * j as f64)
            .collect();
        let pv = PointValues::new(&u);
        // integral over each cell by the exact antiderivative of each mode
        for (j, &uj) in u.iter().enumerate() {
            let x = j as f64;
            let quad: f64 = (0..200)
                .map(|q| pv.at(x - 0.5 + (q as f64 + 0.5) / 200.0))
                .sum::<f64>()
                / 200.0;
            assert!((quad - uj).abs() < 1e-4, "{quad} {uj}");
        }
    }

    proptest! {
        #[test]
        fn amplification_is_the_stability_function(
            b in proptest::collection::vec(-2.0f64..2.0, 3),
            c in proptest::collection::vec(0.0f64..3.0, 3),
            a in 0.0f64..4.0,
            xi in -PI..PI,
        ) {
            let rho = rk_amp(&b, &c, a, xi);
            let r = stability_function(&b, &c, Complex64::new(0.0, -a * xi));
            prop_assert!((rho - r).norm() < 1e-13 * (1.0 + r.norm()));
        }

        #[test]
        fn modulus_rearrangement(
            b in proptest::collection::vec(-2.0f64..2.0, 3),
            c in proptest::collection::vec(0.0f64..3.0, 3),
            a in 0.0f64..2.0,
            xi in -PI..PI,
        ) {
            let y = a * xi;
            let (cs, ss) = cs_ss(&b, &c, y);
            let direct = rk_amp(&b, &c, a, xi).norm_sqr() - 1.0;
            let rearranged = y * (y * (cs * cs + ss * ss) - 2.0 * ss);
            prop_assert!((direct - rearranged).abs() < 1e-12 * (1.0 + direct.abs()));
            prop_assert!((rearranged + 2.0 * y * fs_function(&b, &c, y)).abs() < 1e-12 * (1.0 + direct.abs()));
        }

        #[test]
        fn bdf_vieta(a in 0.0f64..3.0, xi in -PI..PI) {
            for coeffs in [BdfCoeffs::bdf2(), BdfCoeffs::bdf3()] {
                let p = bdf_characteristic(&coeffs, a, xi);
                let roots = monic_roots(&p).unwrap();
                let k = roots.len();
                let prod: Complex64 = roots.iter().product();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                prop_assert!((prod - sign * p[k]).norm() < 1e-10 * p[k].norm().max(1.0));
            }
        }

        #[test]
        fn admissible_gammas_are_third_order(g in 0.2935f64..0.333) {
            let t = dirk3_from_gamma(g).unwrap();
            for r in t.order_residuals() {
                prop_assert!(r.abs() < 1e-12, "{}", r);
            }
        }
    }
}
