//! Recovery of parameters from coefficients on the solvable manifold:
//! `alpha = a2/a1`, then `a`, then `b` on the slice `b1 = 1`, then `gamma`.

use serde::Serialize;

use crate::algebra::{lex_cmp, solve_cubic, solve_quadratic, C64, ONE};
use crate::constraints::{building_blocks, constraint_residuals};
use crate::model::{forward, k_values, spectral, CoefficientSet, ParameterSet};
use crate::{Error, Result};

/// Agreement required between the rational expressions for `alpha`.
pub const ALPHA_SPREAD_TOL: f64 = 1e-8;
/// Largest accepted residual of the `K`-consistency equations for a triad.
pub const GAMMA_RESIDUAL_TOL: f64 = 1e-7;
/// Relative round-trip error accepted by [`invert`].
pub const ROUND_TRIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct InversionResult {
    pub parameters: ParameterSet,
    pub alpha: C64,
    /// Roots `b2` of the cubic on the slice `b1 = 1` (or `b1` on the
    /// fallback slice `b2 = 1`).
    pub beta_candidates: Vec<C64>,
    /// Largest disagreement among the four `gamma` triads.
    pub triad_spread: f64,
    /// Worst scale-normalized residual of `K_l(a, b, gamma) = b1 c1l + b2 c2l`.
    pub residual_k: f64,
    /// `relative_distance(forward(parameters), C)`.
    pub forward_residual: f64,
}

fn agree(x: C64, y: C64) -> bool {
    (x - y).norm() <= ALPHA_SPREAD_TOL * x.norm().max(y.norm()).max(1.0)
}

/// Candidate values of `alpha`. The three rational expressions are used
/// when any is determinate; otherwise the common roots of the three
/// quadratics are returned (possibly several).
pub fn alpha_candidates(c: &CoefficientSet) -> Result<Vec<C64>> {
    let n = c.norm();
    if n == 0.0 {
        return Err(Error::Inversion("zero coefficient set".into()));
    }
    let b = building_blocks(c);
    let floor = 1e-10 * n * n;
    let ratios: Vec<C64> = [(b.p, b.q), (b.r, b.s), (b.u, b.v)]
        .into_iter()
        .filter(|(_, d)| d.norm() > floor)
        .map(|(num, d)| num / d)
        .collect();
    if !ratios.is_empty() {
        for &r in &ratios {
            let cluster: Vec<C64> = ratios.iter().copied().filter(|&s| agree(r, s)).collect();
            if cluster.len() * 2 > ratios.len() || ratios.len() == 1 {
                let mean = cluster.iter().sum::<C64>() / cluster.len() as f64;
                return Ok(vec![mean]);
            }
        }
        return Err(Error::Inversion(format!("alpha expressions disagree: {ratios:?}")));
    }
    // 0/0 everywhere: common roots of the alpha quadratics
    let quads = [
        [3.0 * c.c21, 3.0 * c.c11 - c.c22, -c.c12],
        [c.c22, c.c12 - c.c23, -c.c13],
        [c.c23, c.c13 - 3.0 * c.c24, -3.0 * c.c14],
    ];
    let informative: Vec<[C64; 3]> = quads.into_iter().filter(|q| q.iter().any(|z| z.norm() > 1e-12 * n)).collect();
    let mut cands: Vec<C64> = Vec::new();
    for q in &informative {
        if q[0].norm() > 1e-12 * n {
            cands.extend(solve_quadratic(q[1] / q[0], q[2] / q[0]));
        } else if q[1].norm() > 1e-12 * n {
            cands.push(-q[2] / q[1]);
        }
    }
    let vanishes = |q: &[C64; 3], a: C64| {
        let v = q[0] * a * a + q[1] * a + q[2];
        let s = q[0].norm() * a.norm_sqr() + q[1].norm() * a.norm() + q[2].norm();
        v.norm() <= 1e-8 * s.max(f64::MIN_POSITIVE)
    };
    let mut out: Vec<C64> = Vec::new();
    for a in cands {
        if a.is_finite() && informative.iter().all(|q| vanishes(q, a)) && !out.iter().any(|&o| agree(o, a)) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err(Error::Inversion("no consistent alpha".into()));
    }
    out.sort_by(lex_cmp);
    Ok(out)
}

/// The first candidate from [`alpha_candidates`], after checking that `C`
/// lies on the manifold.
pub fn alpha_of(c: &CoefficientSet) -> Result<C64> {
    require_manifold(c)?;
    Ok(alpha_candidates(c)?[0])
}

fn require_manifold(c: &CoefficientSet) -> Result<()> {
    let rep = constraint_residuals(c);
    if !rep.satisfied {
        return Err(Error::Constraint(format!(
            "coefficients off the manifold (max residual {:.3e})",
            rep.max_residual()
        )));
    }
    Ok(())
}

/// Squares `a1^2`, `a2^2` as rational functions of `C`, defined when
/// `c12 c23 - 9 c14 c21 != 0`.
pub fn a_squares(c: &CoefficientSet) -> Option<(C64, C64)> {
    let u = c.c12 * c.c23 - 9.0 * c.c14 * c.c21;
    if u.norm() <= 1e-10 * c.norm().powi(2) {
        return None;
    }
    let e = c.c11 * c.c23 - c.c13 * c.c21;
    let f = c.c14 * c.c22 - c.c12 * c.c24;
    Some(((c.c12 * e - 3.0 * c.c21 * f) / u, (3.0 * c.c14 * e - c.c23 * f) / u))
}

pub fn a_of(c: &CoefficientSet, alpha: C64) -> Result<(C64, C64)> {
    let n = c.norm();
    let a1_sq = c.c11 + alpha * c.c21;
    if a1_sq.norm() <= 1e-14 * n {
        return Err(Error::Degenerate("a1 vanishes".into()));
    }
    let a1 = a1_sq.sqrt();
    let den = 3.0 * a1_sq - c.c22;
    let a2 = if den.norm() > 1e-12 * n { a1 * c.c12 / den } else { alpha * a1 };
    if let Some((s1, s2)) = a_squares(c) {
        let bad = |x: C64, y: C64| (x - y).norm() > 1e-7 * x.norm().max(y.norm()).max(f64::MIN_POSITIVE);
        if bad(s1, a1_sq) || bad(s2, a2 * a2) {
            return Err(Error::Inversion(format!(
                "a disagrees with its rational cross-check: ({a1_sq}, {}) vs ({s1}, {s2})",
                a2 * a2
            )));
        }
    }
    Ok((a1, a2))
}

/// The brackets `A`, `B` of the relation `(a1 b2 - a2 b1)^3 = b2 A + b1 B`.
fn bb_brackets(c: &CoefficientSet, a1: C64, a2: C64) -> (C64, C64) {
    let a = a1.powi(3) * c.c24 - a2.powi(3) * c.c21 - a1 * a2 * (a1 * c.c23 - a2 * c.c22);
    let b = a1.powi(3) * c.c14 - a2.powi(3) * c.c11 - a1 * a2 * (a1 * c.c13 - a2 * c.c12);
    (a, b)
}

fn c_ok(a1: C64, a2: C64, b1: C64, b2: C64) -> bool {
    let scale = (a1 * b2).norm() + (a2 * b1).norm();
    (a1 * b2 - a2 * b1).norm() > 1e-12 * scale
}

/// Candidates `(1, b2)` solving the cubic relation for `b`.
pub fn b_of(c: &CoefficientSet, a1: C64, a2: C64) -> Result<Vec<(C64, C64)>> {
    b_on_slice(c, a1, a2, false)
}

/// Same relation on the slice `b2 = 1`, returning `(b1, 1)`.
pub fn b_of_fallback(c: &CoefficientSet, a1: C64, a2: C64) -> Result<Vec<(C64, C64)>> {
    b_on_slice(c, a1, a2, true)
}

fn b_on_slice(c: &CoefficientSet, a1: C64, a2: C64, fallback: bool) -> Result<Vec<(C64, C64)>> {
    if a1.norm() == 0.0 || a2.norm() == 0.0 {
        return Err(Error::Degenerate("a1 and a2 must be nonzero".into()));
    }
    let (aa, bb) = bb_brackets(c, a1, a2);
    let roots = if !fallback {
        // a1^3 b2^3 - 3 a1^2 a2 b2^2 + (3 a1 a2^2 - A) b2 - a2^3 - B = 0
        let l = a1.powi(3);
        solve_cubic(-3.0 * a2 / a1, (3.0 * a1 * a2 * a2 - aa) / l, (-a2.powi(3) - bb) / l).roots
    } else {
        // -a2^3 b1^3 + 3 a1 a2^2 b1^2 - (3 a1^2 a2 + B) b1 + a1^3 - A = 0
        let l = -a2.powi(3);
        solve_cubic(3.0 * a1 * a2 * a2 / l, -(3.0 * a1 * a1 * a2 + bb) / l, (a1.powi(3) - aa) / l).roots
    };
    let out: Vec<(C64, C64)> = roots
        .iter()
        .map(|&r| if fallback { (r, ONE) } else { (ONE, r) })
        .filter(|&(b1, b2)| r_finite(b1, b2) && c_ok(a1, a2, b1, b2))
        .collect();
    if out.is_empty() {
        return Err(Error::Inversion("every b-root makes a1 b2 - a2 b1 vanish".into()));
    }
    Ok(out)
}

fn r_finite(b1: C64, b2: C64) -> bool {
    b1.is_finite() && b2.is_finite()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaEstimate {
    pub gamma: [C64; 3],
    pub triad_spread: f64,
    pub residual_k: f64,
}

/// The four triads, each obtained from three of the four `K` equations.
#[allow(clippy::all)]
fn triads(c: &CoefficientSet, a1: C64, a2: C64, b1: C64, b2: C64) -> Vec<[C64; 3]> {
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let c = a1 * b2 - a2 * b1;
    let mut t = Vec::with_capacity(4);
    let g1 = (-3.0 * a2.powi(2) * b1.powi(3) + 6.0 * a1 * a2 * b1.powi(2) * b2 - 3.0 * a1.powi(2) * b1 * b2.powi(2)
        + 3.0 * a2.powi(2) * (b1 * c11 + b2 * c21)
        - 2.0 * a1 * a2 * (b1 * c12 + b2 * c22)
        + a1.powi(2) * (b1 * c13 + b2 * c23))
        / (a1 * c.powi(2));
    let g2 = (3.0 * a2.powi(2) * b1.powi(4) - 6.0 * a1 * a2 * b1.powi(3) * b2 + 3.0 * (a1 * b1 * b2).powi(2)
        - 3.0 * a2.powi(2) * b1 * (b1 * c11 + b2 * c21)
        + 3.0 * a1 * a2 * (b1.powi(2) * c12 - b2.powi(2) * c21 + b1 * b2 * (-c11 + c22))
        + a1.powi(2) * (-2.0 * b1.powi(2) * c13 + b2.powi(2) * c22 + b1 * b2 * (c12 - 2.0 * c23)))
        / (a1 * c).powi(2);
    let g3 = (-a2.powi(2) * b1.powi(5) + 2.0 * a1 * a2 * b1.powi(4) * b2 - a1.powi(2) * b1.powi(3) * b2.powi(2)
        + (a2 * b1).powi(2) * (b1 * c11 + b2 * c21)
        - a1 * a2 * b1 * (b1.powi(2) * c12 - b2.powi(2) * c21 + b1 * b2 * (-c11 + c22))
        + a1.powi(2)
            * (b1.powi(3) * c13 + b2.powi(3) * c21 + b1 * b2.powi(2) * (c11 - c22) - b1.powi(2) * b2 * (c12 - c23)))
        / (a1.powi(3) * c.powi(2));
    t.push([g1, g2, g3]);
    let g1 = (-2.0 * (a2 * b1).powi(3) + 3.0 * a1 * (a2 * b1).powi(2) * b2 - (a1 * b2).powi(3)
        + 2.0 * a2.powi(3) * (b1 * c11 + b2 * c21)
        - a1 * a2.powi(2) * (b1 * c12 + b2 * c22)
        + a1.powi(3) * (b1 * c14 + b2 * c24))
        / (a1 * a2 * c.powi(2));
    let g2 = (a2.powi(3) * b1.powi(4) + 2.0 * a1.powi(3) * b1 * b2.powi(3)
        - 3.0 * a1.powi(2) * a2 * (b1 * b2).powi(2)
        - a2.powi(3) * b1 * (b1 * c11 + b2 * c21)
        + a1.powi(2) * a2 * b2 * (b1 * c12 + b2 * c22)
        + a1 * a2.powi(2) * (b1.powi(2) * c12 - 3.0 * b2.powi(2) * c21 + b1 * b2 * (-3.0 * c11 + c22))
        - 2.0 * a1.powi(3) * b1 * (b1 * c14 + b2 * c24))
        / (a1.powi(2) * a2 * c.powi(2));
    let g3 = (-a2.powi(2) * b1.powi(4) * b2 + 2.0 * a1 * a2 * b1.powi(3) * b2.powi(2) - (a1 * b1).powi(2) * b2.powi(3)
        + a2.powi(2) * b1 * b2 * (b1 * c11 + b2 * c21)
        + a1 * a2 * b2 * (-b1.powi(2) * c12 + b2.powi(2) * c21 + b1 * b2 * (c11 - c22))
        + (a1 * b1).powi(2) * (b1 * c14 + b2 * c24))
        / (a1.powi(2) * a2 * c.powi(2));
    t.push([g1, g2, g3]);
    let g1 = (-(a2 * b1).powi(3) + 3.0 * a1.powi(2) * a2 * b1 * b2.powi(2) - 2.0 * (a1 * b2).powi(3)
        + a2.powi(3) * (b1 * c11 + b2 * c21)
        - a1.powi(2) * a2 * (b1 * c13 + b2 * c23)
        + 2.0 * a1.powi(3) * (b1 * c14 + b2 * c24))
        / (a1 * a2 * c.powi(2));
    let g2 = (2.0 * (a2 * b1).powi(3) * b2 - 3.0 * a1 * (a2 * b1 * b2).powi(2)
        + a1.powi(3) * b2.powi(4)
        + a1 * a2.powi(2) * b1 * (b1 * c13 + b2 * c23)
        - 2.0 * a2.powi(3) * b2 * (b1 * c11 + b2 * c21)
        + a1.powi(2) * a2 * (-3.0 * b1.powi(2) * c14 + b2.powi(2) * c23 + b1 * b2 * (c13 - 3.0 * c24))
        - a1.powi(3) * b2 * (b1 * c14 + b2 * c24))
        / (a1 * a2.powi(2) * c.powi(2));
    let g3 = (-a2.powi(2) * b1.powi(3) * b2.powi(2) - a1.powi(2) * b1 * b2.powi(4)
        + 2.0 * a1 * a2 * b1.powi(2) * b2.powi(3)
        + (a2 * b2).powi(2) * (b1 * c11 + b2 * c21)
        + a1.powi(2) * b1 * b2 * (b1 * c14 + b2 * c24)
        + a1 * a2 * b1 * (b1.powi(2) * c14 - b2.powi(2) * c23 - b1 * b2 * (c13 - c24)))
        / (a1 * a2.powi(2) * c.powi(2));
    t.push([g1, g2, g3]);
    let g1 = (-3.0 * (a2 * b1).powi(2) * b2 + 6.0 * a1 * a2 * b1 * b2.powi(2) - 3.0 * a1.powi(2) * b2.powi(3)
        + a2.powi(2) * (b1 * c12 + b2 * c22)
        - 2.0 * a1 * a2 * (b1 * c13 + b2 * c23)
        + 3.0 * a1.powi(2) * (b1 * c14 + b2 * c24))
        / (a2 * c.powi(2));
    let g2 = (3.0 * (a2 * b1 * b2).powi(2) + 3.0 * a1.powi(2) * b2.powi(4)
        - 6.0 * a1 * a2 * b1 * b2.powi(3)
        - 3.0 * a1.powi(2) * b2 * (b1 * c14 + b2 * c24)
        + a2.powi(2) * (b1.powi(2) * c13 - 2.0 * b2.powi(2) * c22 + b1 * b2 * (-2.0 * c12 + c23))
        - 3.0 * a1 * a2 * (b1.powi(2) * c14 - b2.powi(2) * c23 + b1 * b2 * (-c13 + c24)))
        / (a2 * c).powi(2);
    let g3 = (-a1.powi(2) * b2.powi(5) - a2.powi(2) * b1.powi(2) * b2.powi(3)
        + 2.0 * a1 * a2 * b1 * b2.powi(4)
        + (a1 * b2).powi(2) * (b1 * c14 + b2 * c24)
        + a2.powi(2) * (b2.powi(3) * c22 + b1.powi(3) * c14)
        + a2.powi(2) * b1 * b2 * (b1 * (-c13 + c24) + b2 * (c12 - c23))
        + a1 * a2 * b2 * (b1.powi(2) * c14 - b2.powi(2) * c23 + b1 * b2 * (-c13 + c24)))
        / (a2.powi(3) * c.powi(2));
    t.push([g1, g2, g3]);
    t
}

/// Scale-normalized residual of `K_l(a, b, gamma) = b1 c1l + b2 c2l`.
pub fn k_residual(c: &CoefficientSet, a1: C64, a2: C64, b1: C64, b2: C64, gamma: [C64; 3]) -> f64 {
    let p = ParameterSet { a1, a2, b1, b2, gamma1: gamma[0], gamma2: gamma[1], gamma3: gamma[2] };
    let k = k_values(&p);
    let k = [k.k1, k.k2, k.k3, k.k4];
    let row1 = [c.c11, c.c12, c.c13, c.c14];
    let row2 = [c.c21, c.c22, c.c23, c.c24];
    let bn = b1.norm().max(b2.norm());
    let an = a1.norm().max(a2.norm());
    let gn = gamma.iter().map(|g| g.norm()).fold(1.0, f64::max);
    let scale = (bn.powi(3) + gn * an * bn * bn + gn * an.powi(3)).max(bn * c.norm()).max(f64::MIN_POSITIVE);
    (0..4).map(|l| (k[l] - b1 * row1[l] - b2 * row2[l]).norm() / scale).fold(0.0, f64::max)
}

pub fn gamma_of(c: &CoefficientSet, a1: C64, a2: C64, b1: C64, b2: C64) -> Result<GammaEstimate> {
    if !c_ok(a1, a2, b1, b2) {
        return Err(Error::Degenerate("c = a1 b2 - a2 b1 vanishes".into()));
    }
    let all: Vec<[C64; 3]> =
        triads(c, a1, a2, b1, b2).into_iter().filter(|g| g.iter().all(|z| z.is_finite())).collect();
    let mut best: Option<([C64; 3], f64)> = None;
    for g in &all {
        let r = k_residual(c, a1, a2, b1, b2, *g);
        if best.is_none_or(|(_, br)| r < br) {
            best = Some((*g, r));
        }
    }
    let (gamma, residual_k) = best.ok_or_else(|| Error::Inversion("no finite gamma triad".into()))?;
    if residual_k > GAMMA_RESIDUAL_TOL {
        return Err(Error::Inversion(format!("gamma triads leave residual {residual_k:.3e}")));
    }
    let gscale = gamma.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut triad_spread: f64 = 0.0;
    for (i, x) in all.iter().enumerate() {
        for y in &all[i + 1..] {
            for k in 0..3 {
                triad_spread = triad_spread.max((x[k] - y[k]).norm() / gscale);
            }
        }
    }
    Ok(GammaEstimate { gamma, triad_spread, residual_k })
}

/// Complete a decomposition for known `a`: try every `b` root on the
/// primary slice, then on the fallback slice, keeping candidates whose
/// `gamma` passes the residual filter and whose forward image reproduces
/// `C`. Non-degenerate spectral data is preferred, then smaller residual,
/// then lexicographic order of `b`.
pub fn complete_from_a(c: &CoefficientSet, a1: C64, a2: C64) -> Result<InversionResult> {
    let alpha = a2 / a1;
    let mut reasons = Vec::new();
    for fallback in [false, true] {
        let bs = match b_on_slice(c, a1, a2, fallback) {
            Ok(b) => b,
            Err(e) => {
                reasons.push(e.to_string());
                continue;
            }
        };
        let beta_candidates: Vec<C64> = bs.iter().map(|&(b1, b2)| if fallback { b1 } else { b2 }).collect();
        let mut accepted: Vec<(bool, f64, InversionResult)> = Vec::new();
        for &(b1, b2) in &bs {
            let est = match gamma_of(c, a1, a2, b1, b2) {
                Ok(e) => e,
                Err(e) => {
                    reasons.push(format!("b = ({b1}, {b2}): {e}"));
                    continue;
                }
            };
            let [g1, g2, g3] = est.gamma;
            let p = match ParameterSet::new(a1, a2, b1, b2, g1, g2, g3) {
                Ok(p) => p,
                Err(e) => {
                    reasons.push(e.to_string());
                    continue;
                }
            };
            let fwd = forward(&p)?;
            let forward_residual = fwd.relative_distance(c);
            if forward_residual >= ROUND_TRIP_TOL {
                reasons.push(format!("b = ({b1}, {b2}): round trip {forward_residual:.3e}"));
                continue;
            }
            let degenerate = spectral(g1, g2, g3).degenerate;
            accepted.push((
                degenerate,
                est.residual_k,
                InversionResult {
                    parameters: p,
                    alpha,
                    beta_candidates: beta_candidates.clone(),
                    triad_spread: est.triad_spread,
                    residual_k: est.residual_k,
                    forward_residual,
                },
            ));
        }
        if !accepted.is_empty() {
            accepted.sort_by(|x, y| {
                x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)).then_with(|| {
                    let (p, q) = (&x.2.parameters, &y.2.parameters);
                    lex_cmp(&p.b1, &q.b1).then(lex_cmp(&p.b2, &q.b2))
                })
            });
            return Ok(accepted.swap_remove(0).2);
        }
    }
    Err(Error::Inversion(format!("no b candidate passed: {}", reasons.join("; "))))
}

/// Full inversion of a manifold point.
pub fn invert(c: &CoefficientSet) -> Result<InversionResult> {
    require_manifold(c)?;
    let mut reasons = Vec::new();
    for alpha in alpha_candidates(c)? {
        match a_of(c, alpha).and_then(|(a1, a2)| complete_from_a(c, a1, a2)) {
            Ok(r) => return Ok(r),
            Err(e) => reasons.push(format!("alpha = {alpha}: {e}")),
        }
    }
    Err(Error::Inversion(reasons.join(" | ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::re;

    fn golden() -> CoefficientSet {
        forward(&ParameterSet::real([1.0, 2.0], [3.0, 1.0], [1.0, 1.0, 1.0]).unwrap()).unwrap()
    }

    #[test]
    fn golden_alpha_and_a() {
        let c = golden();
        let b = building_blocks(&c);
        assert!((b.p - re(112.0)).norm() < 1e-12 && (b.q - re(56.0)).norm() < 1e-12);
        let alpha = alpha_of(&c).unwrap();
        assert!((alpha - re(2.0)).norm() < 1e-12);
        let (a1, a2) = a_of(&c, alpha).unwrap();
        assert!((a1 - re(1.0)).norm() < 1e-12 && (a2 - re(2.0)).norm() < 1e-12);
    }

    #[test]
    fn golden_b_relation() {
        let c = golden();
        let (a, b) = bb_brackets(&c, re(1.0), re(2.0));
        assert!((a - re(25.0)).norm() < 1e-11, "{a}");
        assert!((b - re(-50.0)).norm() < 1e-11, "{b}");
    }

    #[test]
    fn golden_triads_agree() {
        let c = golden();
        let est = gamma_of(&c, re(1.0), re(2.0), re(3.0), re(1.0)).unwrap();
        for g in est.gamma {
            assert!((g - re(1.0)).norm() < 1e-12);
        }
        assert!(est.triad_spread < 1e-12);
    }

    #[test]
    fn perturbed_b_is_rejected() {
        let c = golden();
        assert!(gamma_of(&c, re(1.0), re(2.0), re(3.0), re(1.01)).is_err());
    }

    #[test]
    fn decoupled_case_falls_back_to_quadratics() {
        let c = CoefficientSet::from_real([1.0, 0.0, -6.0, -6.0, 0.0, 3.0, 9.0, 7.0]);
        let alphas = alpha_candidates(&c).unwrap();
        assert!(alphas.iter().any(|a| (a - re(1.0)).norm() < 1e-12));
        let r = invert(&c).unwrap();
        assert!(r.forward_residual < 1e-10);
    }

    #[test]
    fn off_manifold_is_a_constraint_error() {
        let c = CoefficientSet::from_real([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert!(matches!(invert(&c), Err(Error::Constraint(_))));
    }

    #[test]
    fn boundary_point_is_not_invertible() {
        let c = CoefficientSet::from_real([1.0; 8]);
        assert!(matches!(invert(&c), Err(Error::Inversion(_))));
    }
}
