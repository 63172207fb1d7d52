//! The two polynomial constraints that a coefficient set must satisfy to
//! belong to the solvable family, their scale-normalized residuals, and
//! completion of one or two missing coefficients.
//!
//! All displayed forms of the first constraint are multiples of a single
//! cubic `K` (see [`first_core`]):
//!
//! ```text
//! P S - R Q = -c22 K,   R V - U S = c23 K,   U Q - P V = 3 c21 K
//! ```
//!
//! and the quintic "cross" form equals `-c14 c21 K`. `K` is linear in
//! c11, c14, c21, c24 and at most quadratic in the other coefficients, as is
//! the second constraint, which makes pair completion a problem in two
//! bivariate quadratics.

use serde::Serialize;

use crate::algebra::{lex_cmp, poly_roots, solve_quadratic, C64, ZERO};
use crate::closed_forms;
use crate::model::{Coeff, CoefficientSet};
use crate::{Error, Result};

/// A coefficient set is on the constraint manifold when every residual is
/// below this value.
pub const SATISFIED_TOL: f64 = 1e-9;

/// Acceptance threshold for completed coefficient sets.
pub const COMPLETION_TOL: f64 = 1e-8;

/// Tolerance used to merge duplicate completions.
pub const DEDUP_TOL: f64 = 1e-8;

/// Number of deterministic Newton starts used by [`complete_pair`].
pub const NEWTON_SEEDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintReport {
    /// `|P S - R Q| / |C|^4`
    pub residual_first_a: f64,
    /// `|R V - U S| / |C|^4`
    pub residual_first_b: f64,
    /// `|U Q - P V| / |C|^4`
    pub residual_first_c: f64,
    /// Quintic form of the first constraint, divided by `|C|^5`.
    pub residual_cross: f64,
    /// Second constraint divided by `|C|^4`.
    pub residual_second: f64,
    pub satisfied: bool,
}

impl ConstraintReport {
    pub fn max_first(&self) -> f64 {
        self.residual_first_a.max(self.residual_first_b).max(self.residual_first_c).max(self.residual_cross)
    }

    pub fn max_residual(&self) -> f64 {
        self.max_first().max(self.residual_second)
    }
}

/// Auxiliary quantities shared by the first constraint and by the ratio
/// `alpha = a2/a1 = P/Q = R/S = U/V`.
#[derive(Debug, Clone, Copy)]
pub struct Building {
    pub p: C64,
    pub q: C64,
    pub r: C64,
    pub s: C64,
    pub u: C64,
    pub v: C64,
}

pub fn building_blocks(c: &CoefficientSet) -> Building {
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    Building {
        p: c12 * c22 - 3.0 * c13 * c21,
        q: 3.0 * (c11 * c22 - c12 * c21 + c21 * c23) - c22 * c22,
        r: c13 * c23 - 3.0 * c14 * c22,
        s: c12 * c23 - c13 * c22 - c23 * c23 + 3.0 * c22 * c24,
        u: c12 * c23 - 9.0 * c14 * c21,
        v: 3.0 * (c11 * c23 - c13 * c21) + 9.0 * c21 * c24 - c22 * c23,
    }
}

/// The irreducible cubic behind every form of the first constraint.
pub fn first_core(c: &CoefficientSet) -> C64 {
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    3.0 * c11 * c13 * c23 - 9.0 * c11 * c14 * c22 - c12 * c12 * c23 + c12 * c13 * c22 + 9.0 * c12 * c14 * c21
        - 3.0 * c12 * c22 * c24
        + c12 * c23 * c23
        - 3.0 * c13 * c13 * c21
        + 9.0 * c13 * c21 * c24
        - c13 * c22 * c23
        - 9.0 * c14 * c21 * c23
        + 3.0 * c14 * c22 * c22
}

/// The three quartic forms and the quintic form of the first constraint,
/// each written as `lhs - rhs`.
pub fn first_forms(c: &CoefficientSet) -> [C64; 4] {
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let Building { p, q, r, s, u, v } = building_blocks(c);
    let cross_l = c14 * (c11 * c23 - c13 * c21) * p + c21 * (c14 * c22 - c12 * c24) * r;
    let cross_r = u * (c14 * (c11 * c22 - c12 * c21) + c21 * (c14 * c23 - c13 * c24));
    [p * s - r * q, r * v - u * s, u * q - p * v, cross_l - cross_r]
}

/// Second constraint as `lhs - rhs`.
pub fn second_form(c: &CoefficientSet) -> C64 {
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let u = c12 * c23 - 9.0 * c14 * c21;
    (c12 * (c13 - 3.0 * c24) + 3.0 * c14 * (c22 - 3.0 * c11))
        * (3.0 * c21 * (c13 - 3.0 * c24) + c23 * (c22 - 3.0 * c11))
        - u * u
}

pub fn constraint_residuals(c: &CoefficientSet) -> ConstraintReport {
    let n = c.norm();
    if n == 0.0 {
        return ConstraintReport {
            residual_first_a: 0.0,
            residual_first_b: 0.0,
            residual_first_c: 0.0,
            residual_cross: 0.0,
            residual_second: 0.0,
            satisfied: true,
        };
    }
    let f = first_forms(c);
    let n4 = n.powi(4);
    let mut rep = ConstraintReport {
        residual_first_a: f[0].norm() / n4,
        residual_first_b: f[1].norm() / n4,
        residual_first_c: f[2].norm() / n4,
        residual_cross: f[3].norm() / (n4 * n),
        residual_second: second_form(c).norm() / n4,
        satisfied: false,
    };
    rep.satisfied = rep.max_residual() < SATISFIED_TOL;
    rep
}

/// Square roots appearing in the explicit completion formulas. The last
/// three use the re-indexing of the `c14 = c21 = 0` subcase and are only
/// meaningful there.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Radicals {
    /// `sqrt((c13 - 3 c24)^2 + 12 c14 c23)`
    pub r1: C64,
    /// `sqrt((3 c11 - c22)^2 + 12 c12 c21)`
    pub r2: C64,
    pub r3: C64,
    /// `sqrt((c12 - c23)^2 + 4 c13 c22)`
    pub r4: C64,
    pub g1: C64,
    pub g2: C64,
    pub g_ratio: Option<C64>,
}

pub fn radicals(c: &CoefficientSet) -> Radicals {
    let g = crate::reduced::ReducedCoefficients::from_full_unchecked(c);
    let rr = g.radicals();
    Radicals {
        r1: closed_forms::r1(c),
        r2: closed_forms::r2(c),
        r3: closed_forms::r3(c),
        r4: closed_forms::r4(c),
        g1: rr.g1,
        g2: rr.g2,
        g_ratio: rr.g_ratio,
    }
}

fn finite_or_inapplicable(v: Vec<C64>, what: &str) -> Result<Vec<C64>> {
    let v: Vec<C64> = v.into_iter().filter(|z| z.is_finite()).collect();
    if v.is_empty() {
        Err(Error::Inapplicable(format!("{what}: vanishing denominator")))
    } else {
        Ok(v)
    }
}

/// Candidate values of coefficient `k` implied by the first constraint, the
/// other seven being given. Two candidates (square-root branches) for
/// c12, c13, c22, c23; one otherwise.
pub fn solve_first_for(c: &CoefficientSet, k: Coeff) -> Result<Vec<C64>> {
    finite_or_inapplicable(closed_forms::first_single(c, k), &format!("first constraint for {k}"))
}

/// Candidate values of `k` implied by the second constraint (both
/// square-root branches).
pub fn solve_second_for(c: &CoefficientSet, k: Coeff) -> Result<Vec<C64>> {
    finite_or_inapplicable(closed_forms::second_single(c, k), &format!("second constraint for {k}"))
}

/// How a completion was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    ClosedForm,
    Elimination,
    NewtonSeed,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Completion {
    pub coefficients: CoefficientSet,
    /// Largest constraint residual of the completed set.
    pub residual: f64,
    /// True on the component where `c12 c23 = 9 c14 c21`; such points do not
    /// determine `a2/a1` from the rational expressions.
    pub special: bool,
    pub origin: Origin,
    /// For a same-column pair `(c1l, c2l)` the completions are not isolated:
    /// every point of the line `c1l + alpha c2l = const` through this one
    /// also satisfies both constraints. Holds that `alpha`.
    pub family_alpha: Option<C64>,
}

/// Degree of [`first_core`] in each coefficient.
const FIRST_DEGREE: [usize; 8] = [1, 2, 2, 1, 1, 2, 2, 1];

struct PairProblem {
    base: CoefficientSet,
    p: Coeff,
    q: Coeff,
    scale: f64,
}

impl PairProblem {
    fn at(&self, x: C64, y: C64) -> CoefficientSet {
        self.base.with(self.p, x).with(self.q, y)
    }

    /// Normalized residual pair.
    fn eval(&self, x: C64, y: C64) -> [C64; 2] {
        let c = self.at(x, y);
        let s = self.scale;
        [first_core(&c) / s.powi(3), second_form(&c) / s.powi(4)]
    }

    fn size(&self, f: [C64; 2]) -> f64 {
        f[0].norm().max(f[1].norm())
    }

    /// Coefficients in `z = y / scale` of both equations for fixed `x`.
    fn in_q(&self, x: C64) -> ([C64; 3], [C64; 3]) {
        let s = self.scale;
        let f0 = self.eval(x, ZERO);
        let fp = self.eval(x, C64::new(s, 0.0));
        let fm = self.eval(x, C64::new(-s, 0.0));
        let mut out = [[ZERO; 3]; 2];
        for i in 0..2 {
            out[i] = [f0[i], (fp[i] - fm[i]) / 2.0, (fp[i] + fm[i]) / 2.0 - f0[i]];
        }
        if FIRST_DEGREE[self.q.index()] < 2 {
            out[0][2] = ZERO;
        }
        (out[0], out[1])
    }

    fn newton(&self, mut x: C64, mut y: C64, iters: usize) -> (C64, C64) {
        let h = 1e-3 * self.scale;
        let mut f = self.eval(x, y);
        for _ in 0..iters {
            let n0 = self.size(f);
            if n0 < 1e-16 {
                break;
            }
            // central differences are exact: both equations are at most
            // quadratic in each unknown
            let (fx1, fx2) = (self.eval(x + h, y), self.eval(x - h, y));
            let (fy1, fy2) = (self.eval(x, y + h), self.eval(x, y - h));
            let j = [
                [(fx1[0] - fx2[0]) / (2.0 * h), (fy1[0] - fy2[0]) / (2.0 * h)],
                [(fx1[1] - fx2[1]) / (2.0 * h), (fy1[1] - fy2[1]) / (2.0 * h)],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.norm() == 0.0 || !det.is_finite() {
                break;
            }
            let dx = (-f[0] * j[1][1] + f[1] * j[0][1]) / det;
            let dy = (-f[1] * j[0][0] + f[0] * j[1][0]) / det;
            let mut lam = 1.0;
            let mut accepted = false;
            while lam > 1e-4 {
                let (xn, yn) = (x + dx * lam, y + dy * lam);
                let fnew = self.eval(xn, yn);
                if self.size(fnew) < n0 {
                    x = xn;
                    y = yn;
                    f = fnew;
                    accepted = true;
                    break;
                }
                lam *= 0.5;
            }
            if !accepted || (dx.norm() + dy.norm()) * lam < 1e-15 * self.scale {
                break;
            }
        }
        (x, y)
    }

    /// Starting points from the resultant of the two equations with respect
    /// to the second unknown.
    fn elimination_starts(&self) -> Vec<(C64, C64)> {
        const N: usize = 16;
        const DEG: usize = 8;
        let s = self.scale;
        let resultant = |x: C64| -> C64 {
            let (a, b) = self.in_q(x);
            let m = if a[2] == ZERO { 1 } else { 2 };
            let n = 2;
            let dim = m + n;
            let mut syl = nalgebra::DMatrix::<C64>::zeros(dim, dim);
            for row in 0..n {
                for k in 0..=m {
                    syl[(row, row + k)] = a[m - k];
                }
            }
            for row in 0..m {
                for k in 0..=n {
                    syl[(n + row, row + k)] = b[n - k];
                }
            }
            syl.determinant()
        };
        let samples: Vec<C64> =
            (0..N).map(|k| resultant(C64::from_polar(s, 2.0 * std::f64::consts::PI * k as f64 / N as f64))).collect();
        let coeffs: Vec<C64> = (0..=DEG)
            .map(|j| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / N as f64))
                    .sum::<C64>()
                    / N as f64
            })
            .collect();
        let mut out = Vec::new();
        for w in poly_roots(&coeffs) {
            let x = w * s;
            if !x.is_finite() {
                continue;
            }
            let (a, b) = self.in_q(x);
            let mut zs = Vec::new();
            for poly in [a, b] {
                if poly[2] != ZERO {
                    zs.extend(solve_quadratic(poly[1] / poly[2], poly[0] / poly[2]));
                } else if poly[1] != ZERO {
                    zs.push(-poly[0] / poly[1]);
                }
            }
            for z in zs {
                if z.is_finite() {
                    out.push((x, z * s));
                }
            }
        }
        out
    }

    fn seeds(&self) -> Vec<(C64, C64)> {
        let g: Vec<C64> =
            (0..4).map(|k| C64::from_polar(0.5 * self.scale, std::f64::consts::PI * (0.5 * k as f64 + 0.25))).collect();
        g.iter().flat_map(|&x| g.iter().map(move |&y| (x, y))).collect()
    }
}

/// Whether `p`, `q` are the two entries of one column. The constraints
/// only fix such a pair up to a line, since the other three columns
/// already determine `a` and the remaining column enters through the single
/// linear relation `a1 c1l + a2 c2l = m_l(a)`.
pub fn is_column_pair(p: Coeff, q: Coeff) -> bool {
    p != q && p.index() % 4 == q.index() % 4
}

/// Slope `alpha` of the solution line through a completed column pair.
fn family_alpha(c: &CoefficientSet, p: Coeff, q: Coeff) -> Option<C64> {
    let s = c.norm();
    crate::inversion::alpha_candidates(c).ok()?.into_iter().find(|&alpha| {
        let probe = c.with(p, c.get(p) - alpha * 0.5 * s).with(q, c.get(q) + 0.5 * s);
        constraint_residuals(&probe).max_residual() < COMPLETION_TOL
    })
}

fn canonical(p: Coeff, q: Coeff) -> Result<(Coeff, Coeff)> {
    match p.cmp(&q) {
        std::cmp::Ordering::Less => Ok((p, q)),
        std::cmp::Ordering::Greater => Ok((q, p)),
        std::cmp::Ordering::Equal => {
            Err(Error::Validation(format!("pair needs two distinct coefficients, got {p} twice")))
        }
    }
}

/// Whether an explicit formula exists for the pair (directly or through the
/// exchange symmetry).
pub fn has_closed_form(p: Coeff, q: Coeff) -> bool {
    let Ok((p, q)) = canonical(p, q) else { return false };
    let (mp, mq) = if p.mirror() < q.mirror() { (p.mirror(), q.mirror()) } else { (q.mirror(), p.mirror()) };
    let hit = |a, b| closed_forms::DISPLAYED.contains(&(a, b));
    (hit(p, q) || hit(mp, mq)) && !matches!((p, q), (Coeff::C13, Coeff::C22))
}

/// All completions of the pair `(p, q)` that satisfy both constraints.
///
/// Values already stored at `p` and `q` in `partial` are ignored. Explicit
/// formulas are tried first; every pair is additionally solved by
/// eliminating `q` (resultant of two quadratics, a polynomial of degree at
/// most eight in `p`) and by Newton iteration from [`NEWTON_SEEDS`] fixed
/// starting points. Results are deduplicated and sorted by residual. For
/// same-column pairs (see [`is_column_pair`]) one point per solution line
/// is returned, with the slope in [`Completion::family_alpha`].
pub fn complete_pair(partial: &CoefficientSet, p: Coeff, q: Coeff) -> Result<Vec<Completion>> {
    let (p, q) = canonical(p, q)?;
    let base = partial.with(p, ZERO).with(q, ZERO);
    if !base.is_finite() {
        return Err(Error::Validation("non-finite coefficient".into()));
    }
    let scale = base.norm();
    if scale == 0.0 {
        return Err(Error::Validation("the six given coefficients vanish".into()));
    }
    let prob = PairProblem { base, p, q, scale };
    let column = is_column_pair(p, q);

    let mut raw: Vec<(C64, C64, Origin)> = Vec::new();
    for cand in closed_forms::pair(&base, p, q) {
        if !cand.p.is_finite() {
            continue;
        }
        match cand.q {
            Some(y) if y.is_finite() => raw.push((cand.p, y, Origin::ClosedForm)),
            Some(_) => {}
            None => {
                // fill the open member from the first constraint
                let (a, _) = prob.in_q(cand.p);
                let zs: Vec<C64> = if a[2] != ZERO {
                    solve_quadratic(a[1] / a[2], a[0] / a[2]).to_vec()
                } else if a[1] != ZERO {
                    vec![-a[0] / a[1]]
                } else {
                    Vec::new()
                };
                raw.extend(zs.into_iter().map(|z| (cand.p, z * scale, Origin::ClosedForm)));
            }
        }
    }
    let n_closed = raw.len();
    raw.extend(prob.elimination_starts().into_iter().map(|(x, y)| (x, y, Origin::Elimination)));
    raw.extend(prob.seeds().into_iter().map(|(x, y)| (x, y, Origin::NewtonSeed)));
    let tried = raw.len();

    let mut found: Vec<Completion> = Vec::new();
    for (i, (x, y, origin)) in raw.into_iter().enumerate() {
        let iters = if i < n_closed { 4 } else { 60 };
        let (x, y) = prob.newton(x, y, iters);
        if !x.is_finite() || !y.is_finite() {
            continue;
        }
        let coefficients = prob.at(x, y);
        let report = constraint_residuals(&coefficients);
        let residual = report.max_residual();
        if residual >= COMPLETION_TOL {
            continue;
        }
        let family = if column { family_alpha(&coefficients, p, q) } else { None };
        let dup = found.iter().any(|f| {
            let (dx, dy) = (f.coefficients.get(p) - x, f.coefficients.get(q) - y);
            match (f.family_alpha, family) {
                (Some(a), Some(b)) => {
                    (a - b).norm() < DEDUP_TOL * a.norm().max(1.0) && (dx + a * dy).norm() < DEDUP_TOL * scale
                }
                _ => dx.norm() + dy.norm() < DEDUP_TOL * scale,
            }
        });
        if dup {
            continue;
        }
        let u = building_blocks(&coefficients).u;
        let special = u.norm() < 1e-9 * coefficients.norm().powi(2);
        found.push(Completion { coefficients, residual, special, origin, family_alpha: family });
    }
    if found.is_empty() {
        log::debug!("pair ({p}, {q}): no completion from {tried} starts");
        return Err(Error::CompletionFailure { seeds: tried });
    }
    found.sort_by(|a, b| {
        a.residual.total_cmp(&b.residual).then_with(|| lex_cmp(&a.coefficients.get(p), &b.coefficients.get(p)))
    });
    Ok(found)
}
