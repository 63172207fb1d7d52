//! Adaptive Dormand-Prince 5(4) integration of complex ODEs along
//! polygonal paths in the complex time plane.
//!
//! Used as an independent oracle for the closed-form solutions.

use serde::Serialize;

use crate::algebra::{C64, ZERO};
use crate::{Error, Result};

/// State norm above which integration stops with a blow-up flag.
pub const BLOWUP_NORM: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

/// Right-hand side `dy/dt = f(t, y)` over complex time and state.
pub trait Rhs {
    fn eval(&self, t: C64, y: &[C64], dy: &mut [C64]);
}

impl<F: Fn(C64, &[C64], &mut [C64])> Rhs for F {
    fn eval(&self, t: C64, y: &[C64], dy: &mut [C64]) {
        self(t, y, dy)
    }
}

/// Initial-value problem along the polyline through `path`, which must
/// start at the initial time.
pub struct OdeProblem<'a, F: Rhs> {
    pub rhs: &'a F,
    pub y0: Vec<C64>,
    pub path: Vec<C64>,
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    /// Path points actually reached.
    pub times: Vec<C64>,
    pub states: Vec<Vec<C64>>,
    /// Time at which the state left the admissible range, if it did.
    pub blowup: Option<C64>,
    pub steps: usize,
    pub rejected: usize,
}

impl Solution {
    pub fn last(&self) -> &[C64] {
        self.states.last().expect("solution holds the initial state")
    }
}

// Dormand-Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stepper<'a, F: Rhs> {
    rhs: &'a F,
    n: usize,
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
}

impl<'a, F: Rhs> Stepper<'a, F> {
    fn new(rhs: &'a F, n: usize) -> Self {
        Stepper { rhs, n, k: std::array::from_fn(|_| vec![ZERO; n]), tmp: vec![ZERO; n] }
    }

    /// Derivative with respect to the real segment parameter `s`, where
    /// `t = t0 + s * dt`.
    fn f(&mut self, t0: C64, dt: C64, s: f64, y_idx: Option<&[C64]>, out: usize) {
        let y = y_idx.unwrap_or(&self.tmp);
        let mut d = vec![ZERO; self.n];
        self.rhs.eval(t0 + dt * s, y, &mut d);
        for (o, v) in self.k[out].iter_mut().zip(d) {
            *o = v * dt;
        }
    }

    fn combo(&mut self, y: &[C64], h: f64, coeffs: &[(usize, f64)]) {
        for (i, (t, &yi)) in self.tmp.iter_mut().zip(y).enumerate() {
            let mut acc = ZERO;
            for &(j, a) in coeffs {
                acc += self.k[j][i] * a;
            }
            *t = yi + acc * h;
        }
    }

    /// One trial step of size `h` from `s`. Returns the new state and the
    /// scaled error norm; `k[0]` must hold the derivative at `(s, y)`.
    fn step(&mut self, t0: C64, dt: C64, s: f64, y: &[C64], h: f64, tol: &Tolerances) -> (Vec<C64>, f64) {
        self.combo(y, h, &[(0, A21)]);
        self.f(t0, dt, s + C2 * h, None, 1);
        self.combo(y, h, &[(0, A31), (1, A32)]);
        self.f(t0, dt, s + C3 * h, None, 2);
        self.combo(y, h, &[(0, A41), (1, A42), (2, A43)]);
        self.f(t0, dt, s + C4 * h, None, 3);
        self.combo(y, h, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
        self.f(t0, dt, s + C5 * h, None, 4);
        self.combo(y, h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
        self.f(t0, dt, s + h, None, 5);
        self.combo(y, h, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)]);
        let ynew = self.tmp.clone();
        self.f(t0, dt, s + h, Some(&ynew), 6);
        let mut err = 0.0;
        for i in 0..self.n {
            let e = (self.k[0][i] * E1
                + self.k[2][i] * E3
                + self.k[3][i] * E4
                + self.k[4][i] * E5
                + self.k[5][i] * E6
                + self.k[6][i] * E7)
                * h;
            let sc = tol.atol + tol.rtol * y[i].norm().max(ynew[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        (ynew, (err / self.n as f64).sqrt())
    }
}

fn norm(y: &[C64]) -> f64 {
    y.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrate along one straight segment `t0 -> t1`. On blow-up returns the
/// last good state and the time reached.
fn segment<F: Rhs>(
    st: &mut Stepper<'_, F>,
    t0: C64,
    t1: C64,
    y0: &[C64],
    tol: &Tolerances,
    counters: &mut (usize, usize),
) -> std::result::Result<Vec<C64>, (Vec<C64>, C64)> {
    let dt = t1 - t0;
    if dt.norm() == 0.0 {
        return Ok(y0.to_vec());
    }
    let mut y = y0.to_vec();
    let mut s = 0.0;
    let mut h = 0.05;
    let floor = 1e-12;
    let mut err_old: f64 = 1e-4;
    st.f(t0, dt, 0.0, Some(&y), 0);
    // initial step from the derivative scale
    let d0 = norm(&st.k[0]);
    let y_n = norm(&y);
    if d0 > 0.0 {
        h = (0.01 * (y_n + tol.atol) / d0).clamp(1e-6, 0.1);
    }
    while s < 1.0 {
        if h < floor {
            return Err((y, t0 + dt * s));
        }
        let h_try = h.min(1.0 - s);
        let (ynew, err) = st.step(t0, dt, s, &y, h_try, tol);
        let finite = ynew.iter().all(|z| z.is_finite());
        if finite && err <= 1.0 {
            counters.0 += 1;
            s = if h_try >= 1.0 - s { 1.0 } else { s + h_try };
            if norm(&ynew) > BLOWUP_NORM {
                return Err((y, t0 + dt * s));
            }
            y = ynew;
            st.k[0] = st.k[6].clone();
            // PI controller
            let e = err.max(1e-10);
            let fac = (0.9 * e.powf(-0.7 / 5.0) * err_old.powf(0.4 / 5.0)).clamp(0.2, 5.0);
            err_old = e;
            h = h_try * fac;
        } else {
            counters.1 += 1;
            let fac = if finite { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h = h_try * fac;
        }
    }
    Ok(y)
}

/// Integrate along the polyline `path`, recording the state at every
/// vertex. A blow-up truncates the solution and sets `blowup`.
pub fn integrate<F: Rhs>(problem: &OdeProblem<'_, F>) -> Result<Solution> {
    if problem.path.is_empty() {
        return Err(Error::Validation("empty integration path".into()));
    }
    if !(problem.tol.rtol > 0.0 && problem.tol.atol > 0.0) {
        return Err(Error::Validation("tolerances must be positive".into()));
    }
    let n = problem.y0.len();
    let mut st = Stepper::new(problem.rhs, n);
    let mut out = Solution {
        times: vec![problem.path[0]],
        states: vec![problem.y0.clone()],
        blowup: None,
        steps: 0,
        rejected: 0,
    };
    let mut counters = (0, 0);
    for w in problem.path.windows(2) {
        let y = out.states.last().unwrap().clone();
        match segment(&mut st, w[0], w[1], &y, &problem.tol, &mut counters) {
            Ok(ynew) => {
                out.times.push(w[1]);
                out.states.push(ynew);
            }
            Err((_, t)) => {
                log::debug!("integration stopped near t = {t}");
                out.blowup = Some(t);
                break;
            }
        }
    }
    out.steps = counters.0;
    out.rejected = counters.1;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleSolution {
    pub taus: Vec<C64>,
    pub states: Vec<Vec<C64>>,
    /// `max |y(end) - y(start)|`; infinite when the circle was not closed.
    pub closure_defect: f64,
    /// Set when integration blew up on the circle, which signals a branch
    /// point on or near it.
    pub near_branch_point: bool,
}

/// Integrate once around the circle through `0` with the given center,
/// sampled at `samples` equal angles.
pub fn integrate_circle<F: Rhs>(
    rhs: &F,
    y0: &[C64],
    radius: f64,
    center: C64,
    samples: usize,
    tol: Tolerances,
) -> Result<CircleSolution> {
    if (center.norm() - radius).abs() > 1e-12 * radius.max(1.0) {
        return Err(Error::Validation("circle must pass through the initial time 0".into()));
    }
    if radius == 0.0 {
        return Ok(CircleSolution {
            taus: vec![ZERO],
            states: vec![y0.to_vec()],
            closure_defect: 0.0,
            near_branch_point: false,
        });
    }
    let samples = samples.max(8);
    let taus: Vec<C64> = (0..=samples)
        .map(|k| center - center * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / samples as f64))
        .collect();
    let sol = integrate(&OdeProblem { rhs, y0: y0.to_vec(), path: taus.clone(), tol })?;
    let closed = sol.blowup.is_none();
    let closure_defect =
        if closed { sol.last().iter().zip(y0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) } else { f64::INFINITY };
    Ok(CircleSolution { taus: sol.times, states: sol.states, closure_defect, near_branch_point: !closed })
}
