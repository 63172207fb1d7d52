//! Isochronous extension
//!
//! ```text
//! x~' = i omega x~ + f(x~)
//! ```
//!
//! where `f` is the cubic right-hand side. With `tau = (exp(2 i omega t) - 1) / (2 i omega)`
//! one has `x~(t) = exp(i omega t) x(tau)`, so every solution whose base
//! trajectory is holomorphic in the disk bounded by the circle `tau(t)` is
//! periodic with period `2 pi / |omega|`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::algebra::{C64, ZERO};
use crate::integrator::{integrate, OdeProblem, Tolerances};
use crate::inversion::invert;
use crate::model::{rhs_eval, spectral, CoefficientSet, ParameterSet, SpectralData};
use crate::solver::{solve_ivp, IvpSpec, Trajectory};
use crate::{Error, Result};

/// Default number of periods searched by [`detect_period`].
pub const DEFAULT_K_MAX: u32 = 24;
/// Chords per full turn of the `tau` circle used by [`solve_tilde`].
pub const CHORDS_PER_TURN: usize = 256;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IsochronousSystem {
    pub base: CoefficientSet,
    pub omega: f64,
    /// `pi / |omega|`, the period of `tau(t)`.
    pub period: f64,
    /// `2 pi / |omega|`.
    pub period_tilde: f64,
}

impl IsochronousSystem {
    pub fn new(base: CoefficientSet, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega != 0.0) {
            return Err(Error::Validation("omega must be finite and nonzero".into()));
        }
        if !base.is_finite() {
            return Err(Error::Validation("non-finite coefficients".into()));
        }
        Ok(IsochronousSystem { base, omega, period: PI / omega.abs(), period_tilde: 2.0 * PI / omega.abs() })
    }

    pub fn rhs(&self, x: [C64; 2]) -> [C64; 2] {
        let (d1, d2) = rhs_eval(&self.base, x[0], x[1]);
        let iw = C64::new(0.0, self.omega);
        [iw * x[0] + d1, iw * x[1] + d2]
    }

    /// Runge-Kutta solution sampled at the real times `ts` (starting at 0).
    pub fn integrate(&self, x0: [C64; 2], ts: &[f64], tol: Tolerances) -> Result<crate::integrator::Solution> {
        let rhs = |_: C64, x: &[C64], d: &mut [C64]| {
            let r = self.rhs([x[0], x[1]]);
            d[0] = r[0];
            d[1] = r[1];
        };
        let path = ts.iter().map(|&t| C64::new(t, 0.0)).collect();
        integrate(&OdeProblem { rhs: &rhs, y0: x0.to_vec(), path, tol })
    }
}

pub fn tau_of_t(omega: f64, t: f64) -> C64 {
    let iw = C64::new(0.0, omega);
    ((2.0 * iw * t).exp() - 1.0) / (2.0 * iw)
}

/// Closed-form isochronous trajectory at the real times `ts`, obtained by
/// continuing the base solution along the circle `tau(t)`.
pub fn solve_tilde(p: &ParameterSet, omega: f64, x0: [C64; 2], ts: &[f64]) -> Result<Trajectory> {
    if !(omega.is_finite() && omega != 0.0) {
        return Err(Error::Validation("omega must be finite and nonzero".into()));
    }
    if ts.windows(2).any(|w| w[1] <= w[0]) || ts.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Validation("times must be nonnegative and increasing".into()));
    }
    // refine so that consecutive tau points are short chords of the circle
    let dt_max = PI / (omega.abs() * CHORDS_PER_TURN as f64);
    let mut fine = vec![0.0];
    let mut keep = Vec::with_capacity(ts.len());
    for &t in ts {
        let last = *fine.last().unwrap();
        if t > last {
            let n = ((t - last) / dt_max).ceil().max(1.0) as usize;
            for k in 1..=n {
                fine.push(last + (t - last) * k as f64 / n as f64);
            }
        }
        keep.push(fine.len() - 1);
    }
    let taus: Vec<C64> = fine.iter().map(|&t| tau_of_t(omega, t)).collect();
    let base = solve_ivp(&IvpSpec::new(*p, x0, taus))?;
    if let Some(ts) = base.singularity {
        return Err(Error::BlowUp { t: ts });
    }
    let mut out = Trajectory {
        times: Vec::with_capacity(ts.len()),
        states: Vec::with_capacity(ts.len()),
        u_values: Vec::with_capacity(ts.len()),
        winding: Vec::with_capacity(ts.len()),
        implicit_residuals: Vec::with_capacity(ts.len()),
        singularity: None,
    };
    for (&t, &k) in ts.iter().zip(&keep) {
        let phase = C64::new(0.0, omega * t).exp();
        out.times.push(C64::new(t, 0.0));
        out.states.push([phase * base.states[k][0], phase * base.states[k][1]]);
        out.u_values.push(base.u_values[k]);
        out.winding.push(base.winding[k]);
        out.implicit_residuals.push(base.implicit_residuals[k]);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalLambdas {
    pub rational: bool,
    /// `(N_j, M_j)` with `lambda_j = N_j / M_j`, when all three succeed.
    pub fractions: Option<[(i64, i64); 3]>,
}

/// Best rational approximation with denominator at most `max_den` within
/// `tol`, via continued-fraction convergents.
pub fn approximate_fraction(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() < tol {
            return Some((h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

pub fn rationality_check(s: &SpectralData, max_denominator: i64, tol: f64) -> RationalLambdas {
    let fail = RationalLambdas { rational: false, fractions: None };
    let Some(lambda) = s.lambda else { return fail };
    let mut out = [(0, 1); 3];
    for j in 0..3 {
        if lambda[j].im.abs() >= tol {
            return fail;
        }
        match approximate_fraction(lambda[j].re, max_denominator, tol) {
            Some(f) => out[j] = f,
            None => return fail,
        }
    }
    RationalLambdas { rational: true, fractions: Some(out) }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodReport {
    /// Smallest `k` with `x~(k T~)` back at `x0`, if any up to `k_max`.
    pub k: Option<u32>,
    /// Relative recurrence defect at `T~, 2 T~, ...` (as far as reached).
    pub defect_at_kt: Vec<f64>,
    /// Rationality of the `lambda_j`, when `C` could be inverted.
    pub rational_lambdas: Option<RationalLambdas>,
}

/// Measure the period of the isochronous flow through `x0` by integrating
/// it numerically and checking recurrence at multiples of `2 pi / |omega|`.
pub fn detect_period(c: &CoefficientSet, omega: f64, x0: [C64; 2], k_max: u32, eps: f64) -> Result<PeriodReport> {
    if k_max < 1 {
        return Err(Error::Validation("k_max must be at least 1".into()));
    }
    let sys = IsochronousSystem::new(*c, omega)?;
    let rational_lambdas = invert(c).ok().map(|r| {
        let p = r.parameters;
        rationality_check(&spectral(p.gamma1, p.gamma2, p.gamma3), 64, 1e-9)
    });
    let xn = x0[0].norm().max(x0[1].norm());
    if xn == 0.0 {
        return Ok(PeriodReport { k: Some(1), defect_at_kt: vec![0.0], rational_lambdas });
    }
    let ts: Vec<f64> = (0..=k_max).map(|k| k as f64 * sys.period_tilde).collect();
    let sol = sys.integrate(x0, &ts, Tolerances::default())?;
    if sol.states.len() < 2 {
        return Err(Error::BlowUp { t: sol.blowup.unwrap_or(ZERO) });
    }
    let defect_at_kt: Vec<f64> =
        sol.states[1..].iter().map(|x| (x[0] - x0[0]).norm().max((x[1] - x0[1]).norm()) / xn).collect();
    let k = defect_at_kt.iter().position(|&d| d < eps).map(|i| i as u32 + 1);
    Ok(PeriodReport { k, defect_at_kt, rational_lambdas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::re;

    #[test]
    fn tau_examples() {
        assert_eq!(tau_of_t(1.0, 0.0), ZERO);
        assert!(tau_of_t(1.0, PI).norm() < 1e-15);
        assert!((tau_of_t(1.0, PI / 2.0) - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn fractions() {
        assert_eq!(approximate_fraction(0.333333331, 64, 1e-6), Some((1, 3)));
        assert_eq!(approximate_fraction(-1.0, 64, 1e-9), Some((-1, 1)));
        assert_eq!(approximate_fraction(0.5, 64, 1e-9), Some((1, 2)));
        assert_eq!(approximate_fraction(PI, 64, 1e-9), None);
    }

    #[test]
    fn lambdas_of_decoupled_case_are_rational() {
        let r = rationality_check(&spectral(ZERO, ZERO, ZERO), 64, 1e-9);
        assert!(r.rational);
        let mut f = r.fractions.unwrap().to_vec();
        f.sort();
        assert_eq!(f, vec![(-1, 1), (1, 2), (1, 2)]);
        assert!(!rationality_check(&spectral(re(1.0), re(1.0), re(1.0)), 64, 1e-9).rational);
    }

    #[test]
    fn zero_omega_rejected() {
        assert!(IsochronousSystem::new(CoefficientSet::from_real([0.0; 8]), 0.0).is_err());
    }
}
