//! Exact initial-value solutions.
//!
//! With `y = a1 x1 + a2 x2`, `w = b1 x1 + b2 x2` and `u = w / y` the system
//! becomes `y' = y^3` and `u' = y^2 (u^3 + g1 u^2 + (g2 - 1) u + g3)`. The
//! first is solved explicitly; `u` satisfies the implicit relation
//!
//! ```text
//! prod_j ((u - u_j) / (u0 - u_j))^(-2 lambda_j) = 1 - 2 y0^2 t
//! ```
//!
//! and is continued along the time path by an ODE predictor with a Newton
//! corrector on that relation, keeping track of the sheet of each factor.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::algebra::{tracked_cpow, tracked_power, ArgTracker, C64, ONE, ZERO};
use crate::integrator::{integrate, OdeProblem, Tolerances};
use crate::inversion::invert;
use crate::model::{spectral, CoefficientSet, ParameterSet, SpectralData, ROOT_SEPARATION};
use crate::{Error, Result};

/// Accepted size of the implicit-relation residual at every sample.
pub const CORRECTOR_TOL: f64 = 1e-10;
/// Distance to a root `u_j` below which `u0` is treated as a fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Serialize)]
pub struct IvpSpec {
    pub parameters: ParameterSet,
    pub x0: [C64; 2],
    /// Times along the path, in order. A leading `0` is implied.
    pub time_grid: Vec<C64>,
}

impl IvpSpec {
    pub fn new(parameters: ParameterSet, x0: [C64; 2], time_grid: Vec<C64>) -> Self {
        IvpSpec { parameters, x0, time_grid }
    }

    /// Build from coefficients by inverting them first.
    pub fn from_coefficients(c: &CoefficientSet, x0: [C64; 2], time_grid: Vec<C64>) -> Result<Self> {
        Ok(IvpSpec { parameters: invert(c)?.parameters, x0, time_grid })
    }

    pub fn y0(&self) -> C64 {
        self.parameters.a1 * self.x0[0] + self.parameters.a2 * self.x0[1]
    }

    pub fn w0(&self) -> C64 {
        self.parameters.b1 * self.x0[0] + self.parameters.b2 * self.x0[1]
    }
}

/// `n` equally spaced real times from `t0` to `t1` inclusive.
pub fn real_grid(t0: f64, t1: f64, n: usize) -> Vec<C64> {
    match n {
        0 => Vec::new(),
        1 => vec![C64::new(t0, 0.0)],
        _ => (0..n).map(|k| C64::new(t0 + (t1 - t0) * k as f64 / (n - 1) as f64, 0.0)).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<C64>,
    pub states: Vec<[C64; 2]>,
    /// `u = w / y`; `None` when `y` vanishes identically.
    pub u_values: Vec<Option<C64>>,
    /// Sheet counters of the three factors of the implicit relation.
    pub winding: Vec<[i64; 3]>,
    pub implicit_residuals: Vec<f64>,
    /// Set when the trajectory was truncated at a singularity.
    pub singularity: Option<C64>,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            u_values: Vec::with_capacity(n),
            winding: Vec::with_capacity(n),
            implicit_residuals: Vec::with_capacity(n),
            singularity: None,
        }
    }

    fn push(&mut self, t: C64, x: [C64; 2], u: Option<C64>, w: [i64; 3], r: f64) {
        self.times.push(t);
        self.states.push(x);
        self.u_values.push(u);
        self.winding.push(w);
        self.implicit_residuals.push(r);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<[C64; 2]> {
        self.states.last().copied()
    }
}

/// `y0 (1 - 2 y0^2 t)^(-1/2)` on the principal branch.
pub fn y_exact(y0: C64, t: C64) -> Result<C64> {
    let base = ONE - 2.0 * y0 * y0 * t;
    if base.norm() < 1e-14 {
        return Err(Error::BlowUp { t: ONE / (2.0 * y0 * y0) });
    }
    Ok(y0 * tracked_power(base, -0.5, 0)?)
}

/// Left side minus right side of the implicit relation for `u`.
pub fn u_implicit_residual(u: C64, t: C64, u0: C64, y0: C64, s: &SpectralData, winding: [i64; 3]) -> Result<C64> {
    let lambda = s.lambda.ok_or_else(|| Error::Degenerate("repeated roots u_j".into()))?;
    Ok(implicit_lhs(u, u0, s, &lambda, winding)? - (ONE - 2.0 * y0 * y0 * t))
}

fn implicit_lhs(u: C64, u0: C64, s: &SpectralData, lambda: &[C64; 3], winding: [i64; 3]) -> Result<C64> {
    let mut p = ONE;
    for j in 0..3 {
        let d = u - s.u[j];
        if d.norm() < 1e-12 * s.u[j].norm().max(1.0) {
            return Err(Error::Domain(format!("u touches the root u_{}", j + 1)));
        }
        p *= tracked_cpow(d / (u0 - s.u[j]), -2.0 * lambda[j], winding[j])?;
    }
    Ok(p)
}

/// Continuation state at one point of the path.
#[derive(Debug, Clone, Copy)]
struct Point {
    t: C64,
    u: C64,
    factors: [ArgTracker; 3],
    residual: f64,
}

struct Continuation<'a> {
    y0: C64,
    u0: C64,
    s: &'a SpectralData,
    lambda: [C64; 3],
    tol: Tolerances,
}

enum Stop {
    Singular(C64),
    Failed(C64, String),
}

impl<'a> Continuation<'a> {
    fn ratios(&self, u: C64) -> [C64; 3] {
        std::array::from_fn(|j| (u - self.s.u[j]) / (self.u0 - self.s.u[j]))
    }

    fn start(&self) -> Point {
        Point { t: ZERO, u: self.u0, factors: [ArgTracker::new(ONE); 3], residual: 0.0 }
    }

    fn windings(f: &[ArgTracker; 3]) -> [i64; 3] {
        [f[0].winding, f[1].winding, f[2].winding]
    }

    fn predict(&self, a: &Point, tb: C64) -> std::result::Result<C64, Stop> {
        let y0sq = self.y0 * self.y0;
        let s = self.s;
        let rhs = move |t: C64, u: &[C64], du: &mut [C64]| {
            du[0] = y0sq / (ONE - 2.0 * y0sq * t) * s.cubic_at(u[0]);
        };
        let sol = integrate(&OdeProblem { rhs: &rhs, y0: vec![a.u], path: vec![a.t, tb], tol: self.tol })
            .map_err(|e| Stop::Failed(a.t, e.to_string()))?;
        match sol.blowup {
            Some(t) => Err(Stop::Singular(t)),
            None => Ok(sol.last()[0]),
        }
    }

    fn track(&self, from: &[ArgTracker; 3], u: C64) -> ([ArgTracker; 3], f64) {
        let mut f = *from;
        let r = self.ratios(u);
        let mut jump: f64 = 0.0;
        for j in 0..3 {
            jump = jump.max(f[j].advance(r[j]).abs());
        }
        (f, jump)
    }

    /// Newton on the implicit relation at time `t` with fixed sheets.
    fn correct(&self, mut u: C64, t: C64, from: &[ArgTracker; 3]) -> Option<(C64, [ArgTracker; 3], f64)> {
        let rhs = ONE - 2.0 * self.y0 * self.y0 * t;
        let scale = rhs.norm().max(1.0);
        let (mut f, _) = self.track(from, u);
        let mut res = f64::INFINITY;
        for _ in 0..12 {
            let lhs = implicit_lhs(u, self.u0, self.s, &self.lambda, Self::windings(&f)).ok()?;
            let g = lhs - rhs;
            res = g.norm() / scale;
            if res < 1e-14 {
                break;
            }
            let dlog: C64 = (0..3).map(|j| -2.0 * self.lambda[j] / (u - self.s.u[j])).sum();
            let dg = lhs * dlog;
            if dg.norm() == 0.0 || !dg.is_finite() {
                break;
            }
            let step = g / dg;
            u -= step;
            f = self.track(from, u).0;
            if step.norm() < 1e-15 * u.norm().max(1.0) {
                let lhs = implicit_lhs(u, self.u0, self.s, &self.lambda, Self::windings(&f)).ok()?;
                res = (lhs - rhs).norm() / scale;
                break;
            }
        }
        (res < CORRECTOR_TOL).then_some((u, f, res))
    }

    fn advance(&self, a: &Point, tb: C64, depth: u32) -> std::result::Result<Point, Stop> {
        let split = |this: &Self| -> std::result::Result<Point, Stop> {
            if depth >= MAX_DEPTH {
                return Err(Stop::Failed(a.t, "step-halving floor reached".into()));
            }
            let mid = (a.t + tb) * 0.5;
            let m = this.advance(a, mid, depth + 1)?;
            this.advance(&m, tb, depth + 1)
        };
        let pred = match self.predict(a, tb) {
            Ok(u) => u,
            Err(Stop::Singular(t)) if depth >= MAX_DEPTH => return Err(Stop::Singular(t)),
            Err(Stop::Singular(_)) => return split(self),
            Err(e) => return Err(e),
        };
        let (_, jump) = self.track(&a.factors, pred);
        if jump > FRAC_PI_2 {
            return split(self);
        }
        match self.correct(pred, tb, &a.factors) {
            Some((u, factors, residual)) => Ok(Point { t: tb, u, factors, residual }),
            None => split(self),
        }
    }
}

/// `u` values, sheet counters and implicit residuals, one per sample.
pub type USamples = (Vec<C64>, Vec<[i64; 3]>, Vec<f64>);

/// Values of `u` along `grid` (which must start at `0`), with the sheet
/// counters and implicit residuals at each sample.
pub fn u_of_t(u0: C64, y0: C64, s: &SpectralData, grid: &[C64]) -> Result<USamples> {
    let lambda = s.lambda.ok_or_else(|| Error::Degenerate("repeated roots u_j".into()))?;
    if grid.first().is_none_or(|t| t.norm() != 0.0) {
        return Err(Error::Validation("time grid must start at 0".into()));
    }
    let cont = Continuation { y0, u0, s, lambda, tol: Tolerances::default() };
    let mut p = cont.start();
    let mut us = vec![u0];
    let mut ws = vec![[0; 3]];
    let mut rs = vec![0.0];
    for &t in &grid[1..] {
        p = cont.advance(&p, t, 0).map_err(|e| match e {
            Stop::Singular(t) => Error::BlowUp { t },
            Stop::Failed(t, reason) => Error::Continuation { t, reason },
        })?;
        us.push(p.u);
        ws.push(Continuation::windings(&p.factors));
        rs.push(p.residual);
    }
    Ok((us, ws, rs))
}

/// Does the straight segment `a -> b` pass through `z`?
fn segment_hits(a: C64, b: C64, z: C64) -> bool {
    let d = b - a;
    if d.norm() == 0.0 {
        return (z - a).norm() <= 1e-14 * z.norm().max(1.0);
    }
    let s = (z - a) / d;
    let tol = 1e-12 * (z.norm().max(1.0) / d.norm());
    s.im.abs() <= tol && s.re >= -tol && s.re <= 1.0 + tol
}

fn reconstruct(p: &ParameterSet, y: C64, w: C64) -> [C64; 2] {
    let c = p.c();
    [(p.b2 * y - p.a2 * w) / c, -(p.b1 * y - p.a1 * w) / c]
}

/// The explicit factor `(1 - 2 z0^2 t)^(-1/2)` tracked along the path.
struct Explicit {
    z0: C64,
    tracker: ArgTracker,
}

impl Explicit {
    fn new(z0: C64) -> Self {
        Explicit { z0, tracker: ArgTracker::new(ONE) }
    }

    fn singular_time(&self) -> C64 {
        ONE / (2.0 * self.z0 * self.z0)
    }

    /// Value at `t`, reached by a straight segment from the previous call.
    fn at(&mut self, t: C64) -> Result<C64> {
        let base = ONE - 2.0 * self.z0 * self.z0 * t;
        self.tracker.advance(base);
        Ok(self.z0 * tracked_power(base, -0.5, self.tracker.winding)?)
    }
}

/// Solve the initial-value problem along the (possibly complex) time grid.
/// A singularity on the path truncates the trajectory and is reported in
/// [`Trajectory::singularity`].
pub fn solve_ivp(spec: &IvpSpec) -> Result<Trajectory> {
    let p = &spec.parameters;
    p.validate()?;
    if spec.x0.iter().any(|z| !z.is_finite()) || spec.time_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Validation("non-finite initial data or time".into()));
    }
    let mut grid = spec.time_grid.clone();
    let implied_zero = grid.first().is_none_or(|t| t.norm() != 0.0);
    if implied_zero {
        grid.insert(0, ZERO);
    }
    let mut out = solve_on_grid(p, spec.x0, &grid)?;
    if implied_zero {
        out.times.remove(0);
        out.states.remove(0);
        out.u_values.remove(0);
        out.winding.remove(0);
        out.implicit_residuals.remove(0);
    }
    Ok(out)
}

fn solve_on_grid(p: &ParameterSet, x0: [C64; 2], grid: &[C64]) -> Result<Trajectory> {
    let mut out = Trajectory::with_capacity(grid.len());
    let y0 = p.a1 * x0[0] + p.a2 * x0[1];
    let w0 = p.b1 * x0[0] + p.b2 * x0[1];
    let xscale = x0[0].norm().max(x0[1].norm());
    if xscale == 0.0 {
        for &t in grid {
            out.push(t, [ZERO; 2], None, [0; 3], 0.0);
        }
        return Ok(out);
    }
    if y0.norm() <= 1e-14 * ((p.a1 * x0[0]).norm() + (p.a2 * x0[1]).norm()) {
        // y vanishes identically and w' = w^3
        let mut w = Explicit::new(w0);
        let ts = w.singular_time();
        let mut prev = ZERO;
        for &t in grid {
            if segment_hits(prev, t, ts) {
                out.singularity = Some(ts);
                break;
            }
            out.push(t, reconstruct(p, ZERO, w.at(t)?), None, [0; 3], 0.0);
            prev = t;
        }
        return Ok(out);
    }
    let s = spectral(p.gamma1, p.gamma2, p.gamma3);
    let u0 = w0 / y0;
    let mut y = Explicit::new(y0);
    let ty = y.singular_time();
    if let Some(j) = (0..3).find(|&j| (u0 - s.u[j]).norm() <= FIXED_POINT_TOL * s.u[j].norm().max(1.0)) {
        // u stays at the root u_j
        let uj = s.u[j];
        let mut prev = ZERO;
        for &t in grid {
            if segment_hits(prev, t, ty) {
                out.singularity = Some(ty);
                break;
            }
            let yt = y.at(t)?;
            out.push(t, reconstruct(p, yt, uj * yt), Some(u0), [0; 3], 0.0);
            prev = t;
        }
        return Ok(out);
    }
    let lambda = s.lambda.ok_or_else(|| {
        Error::Degenerate(format!(
            "repeated roots u_j (separation below {ROOT_SEPARATION:e}); implicit relation undefined"
        ))
    })?;
    let cont = Continuation { y0, u0, s: &s, lambda, tol: Tolerances::default() };
    let mut pt = cont.start();
    for (k, &t) in grid.iter().enumerate() {
        if k > 0 {
            if segment_hits(pt.t, t, ty) {
                out.singularity = Some(ty);
                break;
            }
            match cont.advance(&pt, t, 0) {
                Ok(next) => pt = next,
                Err(Stop::Singular(ts)) => {
                    log::debug!("u left every bounded region near t = {ts}");
                    out.singularity = Some(ts);
                    break;
                }
                Err(Stop::Failed(t, reason)) => return Err(Error::Continuation { t, reason }),
            }
        } else if t.norm() != 0.0 {
            return Err(Error::Validation("time grid must start at 0".into()));
        }
        let yt = y.at(t)?;
        out.push(t, reconstruct(p, yt, pt.u * yt), Some(pt.u), Continuation::windings(&pt.factors), pt.residual);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityReport {
    /// Zero of `1 - 2 y0^2 t`, where `y` blows up.
    pub t_y: Option<C64>,
    /// Time at which `u`, hence `w`, reaches infinity on the principal
    /// sheet of the implicit relation.
    pub t_w: Option<C64>,
    /// The candidate of smallest modulus.
    pub earliest: Option<C64>,
}

/// Candidate singular times. `u` can reach a root `u_j` only where the
/// right side `1 - 2 y0^2 t` vanishes, so only `t_y` and the time at which
/// `u` escapes to infinity occur.
pub fn singularity_time(spec: &IvpSpec) -> Result<SingularityReport> {
    let p = &spec.parameters;
    let (y0, w0) = (spec.y0(), spec.w0());
    let scale = (p.a1 * spec.x0[0]).norm() + (p.a2 * spec.x0[1]).norm();
    let report = |t_y: Option<C64>, t_w: Option<C64>| {
        let earliest = [t_y, t_w].into_iter().flatten().min_by(|a, b| a.norm().total_cmp(&b.norm()));
        SingularityReport { t_y, t_w, earliest }
    };
    if y0.norm() <= 1e-14 * scale {
        let t_w = (w0.norm() > 0.0).then(|| ONE / (2.0 * w0 * w0));
        return Ok(report(None, t_w));
    }
    let t_y = ONE / (2.0 * y0 * y0);
    let s = spectral(p.gamma1, p.gamma2, p.gamma3);
    let u0 = w0 / y0;
    let Some(lambda) = s.lambda else {
        return Ok(report(Some(t_y), None));
    };
    if (0..3).any(|j| (u0 - s.u[j]).norm() <= FIXED_POINT_TOL * s.u[j].norm().max(1.0)) {
        return Ok(report(Some(t_y), None));
    }
    let mut limit = ONE;
    for (&uj, &lj) in s.u.iter().zip(&lambda) {
        limit *= tracked_cpow(u0 - uj, 2.0 * lj, 0)?;
    }
    let t_w = (ONE - limit) / (2.0 * y0 * y0);
    Ok(report(Some(t_y), t_w.is_finite().then_some(t_w)))
}
