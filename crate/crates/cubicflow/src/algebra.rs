//! Complex scalar helpers, low-degree polynomial solvers and branch-aware powers.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Normalized discriminant below which a cubic is flagged near-degenerate.
pub const DEGENERATE_DISCRIMINANT: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Shorthand for a real-valued complex number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Roots of a monic cubic in deterministic order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicRoots {
    pub roots: [C64; 3],
    /// `|prod (r_i - r_j)|^2 / max|r|^6`; zero for repeated roots.
    pub discriminant_magnitude: f64,
}

impl CubicRoots {
    pub fn is_near_degenerate(&self) -> bool {
        self.discriminant_magnitude < DEGENERATE_DISCRIMINANT
    }
}

/// Lexicographic order on (re, im) with a small tolerance on the real part,
/// so that conjugate pairs are ordered by imaginary part.
pub fn lex_cmp(a: &C64, b: &C64) -> Ordering {
    let scale = 1.0 + a.norm().max(b.norm());
    if (a.re - b.re).abs() > 1e-12 * scale {
        a.re.total_cmp(&b.re)
    } else {
        a.im.total_cmp(&b.im)
    }
}

fn sort3(r: &mut [C64; 3]) {
    // explicit network: the fuzzy comparison is not a strict total order
    for (i, j) in [(0, 1), (1, 2), (0, 1)] {
        if lex_cmp(&r[i], &r[j]) == Ordering::Greater {
            r.swap(i, j);
        }
    }
}

/// Both roots of `z^2 + p1 z + p0`, ordered lexicographically.
pub fn solve_quadratic(p1: C64, p0: C64) -> [C64; 2] {
    let sd = (p1 * p1 - 4.0 * p0).sqrt();
    // pick the sign that avoids cancellation
    let big = if (p1 + sd).norm() >= (p1 - sd).norm() { p1 + sd } else { p1 - sd };
    let mut r = if big == ZERO {
        [ZERO, ZERO]
    } else {
        let r1 = -big / 2.0;
        [r1, p0 / r1]
    };
    if lex_cmp(&r[0], &r[1]) == Ordering::Greater {
        r.swap(0, 1);
    }
    r
}

/// The three complex cube roots of `z`, principal one first.
pub fn cube_roots(z: C64) -> [C64; 3] {
    let r = z.cbrt();
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    [r, r * w, r * w * w]
}

fn eval_monic_cubic(p2: C64, p1: C64, p0: C64, z: C64) -> (C64, C64) {
    let f = ((z + p2) * z + p1) * z + p0;
    let df = (3.0 * z + 2.0 * p2) * z + p1;
    (f, df)
}

/// Roots of the monic cubic `u^3 + p2 u^2 + p1 u + p0` via Cardano, each
/// polished by Newton steps.
pub fn solve_cubic(p2: C64, p1: C64, p0: C64) -> CubicRoots {
    let shift = p2 / 3.0;
    let p = p1 - p2 * p2 / 3.0;
    let q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    let sd = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let w = if (-q / 2.0 + sd).norm() >= (-q / 2.0 - sd).norm() { -q / 2.0 + sd } else { -q / 2.0 - sd };
    let mut roots = if w == ZERO {
        [-shift; 3]
    } else {
        let a = cube_roots(w);
        let mut out = [ZERO; 3];
        for k in 0..3 {
            out[k] = a[k] - p / (3.0 * a[k]) - shift;
        }
        out
    };
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (f, df) = eval_monic_cubic(p2, p1, p0, *r);
            if df == ZERO || f == ZERO {
                break;
            }
            let cand = *r - f / df;
            if eval_monic_cubic(p2, p1, p0, cand).0.norm() < f.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    sort3(&mut roots);
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let prod = (roots[0] - roots[1]) * (roots[0] - roots[2]) * (roots[1] - roots[2]);
    let discriminant_magnitude = if scale > 0.0 { prod.norm_sqr() / scale.powi(6) } else { 0.0 };
    CubicRoots { roots, discriminant_magnitude }
}

/// `exp(exponent * (Log(base) + 2 pi i winding))`.
pub fn tracked_power(base: C64, exponent: f64, winding: i64) -> Result<C64, Error> {
    tracked_cpow(base, C64::new(exponent, 0.0), winding)
}

/// Complex-exponent variant of [`tracked_power`].
pub fn tracked_cpow(base: C64, exponent: C64, winding: i64) -> Result<C64, Error> {
    if base == ZERO || !base.is_finite() {
        return Err(Error::Domain(format!("power of non-invertible base {base}")));
    }
    let log = base.ln() + C64::new(0.0, 2.0 * PI * winding as f64);
    Ok((log * exponent).exp())
}

/// Follows the continuous argument of a nonvanishing path `z(s)` sampled
/// finely enough that consecutive true increments stay below `pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgTracker {
    pub arg: f64,
    pub winding: i64,
}

impl ArgTracker {
    pub fn new(z: C64) -> Self {
        ArgTracker { arg: z.arg(), winding: 0 }
    }

    /// Move to `z`; returns the continuous increment of the argument.
    pub fn advance(&mut self, z: C64) -> f64 {
        let a = z.arg();
        let mut d = a - self.arg;
        if d > PI {
            self.winding -= 1;
            d -= 2.0 * PI;
        } else if d < -PI {
            self.winding += 1;
            d += 2.0 * PI;
        }
        self.arg = a;
        d
    }
}

/// Evaluate a polynomial given by ascending coefficients.
pub fn poly_eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

fn poly_deriv_eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().enumerate().skip(1).rev().fold(ZERO, |acc, (k, c)| acc * z + c * k as f64)
}

/// All roots of a polynomial with ascending coefficients. Trailing
/// coefficients below `1e-13` of the largest are treated as zero.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let big = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if big == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-13 * big {
        deg -= 1;
    }
    let c = &coeffs[..=deg];
    match deg {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => solve_quadratic(c[1] / c[2], c[0] / c[2]).to_vec(),
        3 => solve_cubic(c[2] / c[3], c[1] / c[3], c[0] / c[3]).roots.to_vec(),
        _ => {
            let lead = c[deg];
            let mut m = DMatrix::<C64>::zeros(deg, deg);
            for i in 1..deg {
                m[(i, i - 1)] = ONE;
            }
            for i in 0..deg {
                m[(i, deg - 1)] = -c[i] / lead;
            }
            let schur = match nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000) {
                Some(s) => s,
                None => return Vec::new(),
            };
            let (_, t) = schur.unpack();
            let mut roots: Vec<C64> = (0..deg).map(|i| t[(i, i)]).collect();
            for r in roots.iter_mut() {
                for _ in 0..3 {
                    let f = poly_eval(c, *r);
                    let df = poly_deriv_eval(c, *r);
                    if df == ZERO {
                        break;
                    }
                    let cand = *r - f / df;
                    if poly_eval(c, cand).norm() < f.norm() {
                        *r = cand;
                    } else {
                        break;
                    }
                }
            }
            roots.sort_by(lex_cmp);
            roots
        }
    }
}
