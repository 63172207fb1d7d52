//! The subcase `c14 = c21 = 0`, in which each rate is proportional to its
//! own state:
//!
//! ```text
//! x1' = x1 (g11 x1^2 + g12 x1 x2 + g13 x2^2)
//! x2' = x2 (g21 x1^2 + g22 x1 x2 + g23 x2^2)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{solve_quadratic, C64, ZERO};
use crate::inversion;
use crate::model::{CoefficientSet, ParameterSet};
use crate::{Error, Result};

/// Residual bound for accepting a reduced completion.
pub const REDUCED_COMPLETION_TOL: f64 = 1e-10;

/// Relative size below which `c14`, `c21` count as zero.
pub const REDUCED_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedCoefficients {
    pub g11: C64,
    pub g12: C64,
    pub g13: C64,
    pub g21: C64,
    pub g22: C64,
    pub g23: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GIndex {
    G11,
    G12,
    G13,
    G21,
    G22,
    G23,
}

impl GIndex {
    pub const ALL: [GIndex; 6] = [GIndex::G11, GIndex::G12, GIndex::G13, GIndex::G21, GIndex::G22, GIndex::G23];

    pub fn index(self) -> usize {
        GIndex::ALL.iter().position(|&g| g == self).unwrap()
    }

    /// Partner under the `x1 <-> x2` exchange.
    pub fn mirror(self) -> GIndex {
        GIndex::ALL[5 - self.index()]
    }

    pub fn name(self) -> &'static str {
        ["g11", "g12", "g13", "g21", "g22", "g23"][self.index()]
    }
}

impl fmt::Display for GIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GIndex::ALL
            .into_iter()
            .find(|g| g.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Validation(format!("unknown reduced coefficient '{s}'")))
    }
}

impl ReducedCoefficients {
    pub fn from_array(g: [C64; 6]) -> Self {
        ReducedCoefficients { g11: g[0], g12: g[1], g13: g[2], g21: g[3], g22: g[4], g23: g[5] }
    }

    pub fn from_real(g: [f64; 6]) -> Self {
        Self::from_array(g.map(|x| C64::new(x, 0.0)))
    }

    pub fn to_array(&self) -> [C64; 6] {
        [self.g11, self.g12, self.g13, self.g21, self.g22, self.g23]
    }

    pub fn get(&self, k: GIndex) -> C64 {
        self.to_array()[k.index()]
    }

    pub fn with(&self, k: GIndex, v: C64) -> Self {
        let mut a = self.to_array();
        a[k.index()] = v;
        Self::from_array(a)
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `C = (g11, g12, g13, 0; 0, g21, g22, g23)`.
    pub fn to_full(&self) -> CoefficientSet {
        CoefficientSet::from_array([self.g11, self.g12, self.g13, ZERO, ZERO, self.g21, self.g22, self.g23])
    }

    pub fn from_full(c: &CoefficientSet) -> Result<Self> {
        let bound = REDUCED_ZERO_TOL * c.norm();
        if c.c14.norm() > bound || c.c21.norm() > bound {
            return Err(Error::Validation("coefficients c14 and c21 must vanish".into()));
        }
        Ok(Self::from_full_unchecked(c))
    }

    /// Re-index ignoring `c14` and `c21`.
    pub fn from_full_unchecked(c: &CoefficientSet) -> Self {
        ReducedCoefficients { g11: c.c11, g12: c.c12, g13: c.c13, g21: c.c22, g22: c.c23, g23: c.c24 }
    }

    /// `g11 <-> g23`, `g12 <-> g22`, `g13 <-> g21`.
    pub fn swapped(&self) -> Self {
        let mut a = self.to_array();
        a.reverse();
        Self::from_array(a)
    }

    pub fn radicals(&self) -> ReducedRadicals {
        let ReducedCoefficients { g11, g12, g13, g21, g22, g23 } = *self;
        let d = g12 - g22;
        let g1 = (g12 * g12 + 4.0 * g13 * g21 - 2.0 * g12 * g22 + g22 * g22).sqrt();
        let g2 = (g12 * g12 + 12.0 * g21 * g23).sqrt();
        let g_ratio = if g23.norm() > 0.0 { Some((g11 / g23).sqrt()) } else { None };
        let fr4 = (g21 * (g13 - 3.0 * g23) - g22 * d) * (d * d + 4.0 * g13 * g21).sqrt();
        ReducedRadicals { g1, g2, g_ratio, fr4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedRadicals {
    /// `sqrt(g12^2 + 4 g13 g21 - 2 g12 g22 + g22^2)`
    pub g1: C64,
    /// `sqrt(g12^2 + 12 g21 g23)`
    pub g2: C64,
    /// `sqrt(g11 / g23)`, undefined when `g23 = 0`.
    pub g_ratio: Option<C64>,
    /// `(g21 (g13 - 3 g23) - g22 (g12 - g22)) sqrt((g12 - g22)^2 + 4 g13 g21)`
    pub fr4: C64,
}

/// Scale-normalized residuals of the reduced constraint set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedReport {
    /// The two relations that cut out the reduced manifold.
    pub dcons: [f64; 2],
    /// Single cubic relation on the six coefficients.
    pub single: f64,
    /// The auxiliary pair of relations, for each sign of the radical in
    /// `fr4`; only one sign is expected to vanish.
    pub auxiliary: [[f64; 2]; 2],
    pub satisfied: bool,
}

impl ReducedReport {
    pub fn max_dcons(&self) -> f64 {
        self.dcons[0].max(self.dcons[1])
    }

    /// Better of the two auxiliary sign choices.
    pub fn auxiliary_best(&self) -> f64 {
        self.auxiliary.iter().map(|r| r[0].max(r[1])).fold(f64::INFINITY, f64::min)
    }
}

fn dcons_raw(g: &ReducedCoefficients) -> [C64; 2] {
    let ReducedCoefficients { g11, g12, g13, g21, g22, g23 } = *g;
    let d1 = -3.0 * g11 * g13 * g22 + (g12 - g22) * (g12 * g22 - g13 * g21) + 3.0 * g12 * g21 * g23;
    let gg = g12 * g22;
    let d2 = gg * (g13 - 3.0 * g23) * (g21 - 3.0 * g11) - gg * gg;
    [d1, d2]
}

fn auxiliary_raw(g: &ReducedCoefficients, fr4: C64) -> [C64; 2] {
    let ReducedCoefficients { g11, g12, g13, g21, g22, g23 } = *g;
    let n1 = -g12 * (2.0 * g22 * g22 + g21 * (g13 - 3.0 * g23))
        + g22 * (g12 * g12 + g22 * g22 + 3.0 * g21 * (g13 - g23))
        + fr4;
    let g12_2 = g12 * g12;
    let g22_2 = g22 * g22;
    let n2 = -g12_2 * g12_2 * g22
        + g13 * (3.0 * g11 - g21) * (g22 * (g22_2 + g21 * (g13 - 3.0 * g23)) - fr4)
        + g12_2 * g12 * (3.0 * g22_2 + g21 * (g13 - 3.0 * g23))
        + g12
            * (-3.0 * g13 * g13 * g21 * (g11 - g21) + g22_2 * g22_2 - g22 * fr4 - 3.0 * g21 * g22_2 * g23
                + g13 * (9.0 * g21 * g23 * (g11 - g21) - g22_2 * (6.0 * g11 - 5.0 * g21)))
        + g12_2 * (-3.0 * g22_2 * g22 + fr4 + g22 * (3.0 * g11 * g13 - g21 * (5.0 * g13 - 6.0 * g23)));
    [n1, n2]
}

pub fn reduced_constraint_residuals(g: &ReducedCoefficients) -> ReducedReport {
    let n = g.norm();
    if n == 0.0 {
        return ReducedReport { dcons: [0.0; 2], single: 0.0, auxiliary: [[0.0; 2]; 2], satisfied: true };
    }
    let ReducedCoefficients { g11, g12, g13, g21, g22, g23 } = *g;
    let d = dcons_raw(g);
    let single = g12 * (g12 * g22 - g13 * g21 - g22 * g22 + 3.0 * g21 * g23) - g13 * g22 * (3.0 * g11 - g21);
    let fr4 = g.radicals().fr4;
    let aux = [auxiliary_raw(g, fr4), auxiliary_raw(g, -fr4)];
    let dcons = [d[0].norm() / n.powi(3), d[1].norm() / n.powi(4)];
    ReducedReport {
        dcons,
        single: single.norm() / n.powi(3),
        auxiliary: aux.map(|a| [a[0].norm() / n.powi(3), a[1].norm() / n.powi(5)]),
        satisfied: dcons[0] < crate::constraints::SATISFIED_TOL && dcons[1] < crate::constraints::SATISFIED_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedCompletion {
    pub coefficients: ReducedCoefficients,
    /// Worse of the two normalized manifold residuals.
    pub residual: f64,
    /// Exact-zero branch valid only for special values.
    pub special: bool,
}

/// Pairs with a displayed closed form; the other six are their mirrors.
pub const DISPLAYED_PAIRS: [(GIndex, GIndex); 9] = [
    (GIndex::G11, GIndex::G23),
    (GIndex::G12, GIndex::G22),
    (GIndex::G13, GIndex::G21),
    (GIndex::G11, GIndex::G12),
    (GIndex::G11, GIndex::G13),
    (GIndex::G11, GIndex::G21),
    (GIndex::G11, GIndex::G22),
    (GIndex::G12, GIndex::G13),
    (GIndex::G12, GIndex::G21),
];

const SIGNS: [f64; 2] = [1.0, -1.0];

/// Raw candidates `(p, q, special)` for a displayed pair.
fn displayed(g: &ReducedCoefficients, p: GIndex, q: GIndex) -> Vec<(C64, C64, bool)> {
    use GIndex::*;
    let ReducedCoefficients { g11, g12, g13, g21, g22, g23 } = *g;
    let r = g.radicals();
    let mut out = Vec::new();
    let ratio = |out: &mut Vec<(C64, C64, bool)>, f: &dyn Fn(C64) -> (C64, C64)| {
        if let Some(gr) = r.g_ratio {
            for s in SIGNS {
                let (x, y) = f(gr * s);
                out.push((x, y, false));
            }
        }
    };
    let e = g13 - 3.0 * g23;
    match (p, q) {
        (G11, G23) => {
            for s in SIGNS {
                let g1 = r.g1 * s;
                out.push((
                    (g12 * g12 + 2.0 * g13 * g21 - g12 * g22 + g12 * g1) / (6.0 * g13),
                    (2.0 * g13 * g21 - g12 * g22 + g22 * g22 + g22 * g1) / (6.0 * g21),
                    false,
                ));
            }
        }
        (G12, G22) => ratio(&mut out, &|gr| (-(3.0 * g11 - g21) / gr, e * gr)),
        (G13, G21) => ratio(&mut out, &|gr| (3.0 * g23 - g22 / gr, 3.0 * g11 - g12 * gr)),
        (G11, G12) => {
            out.push((g21 / 3.0, ZERO, true));
            out.push((
                g22 * g22 * g23 / (e * e),
                (g13 * g13 * g21 - 6.0 * g13 * g21 * g23 - 3.0 * (g22 * g22 * g23 - 3.0 * g21 * g23 * g23)) / (g22 * e),
                false,
            ));
        }
        (G11, G13) => {
            for s in SIGNS {
                for t in SIGNS {
                    out.push((
                        (g12 * g12 + 6.0 * g21 * g23 + g12 * r.g2 * s) / (18.0 * g23),
                        (g12 * g22 + 6.0 * g21 * g23 - g22 * r.g2 * t) / (2.0 * g21),
                        false,
                    ));
                }
            }
        }
        (G11, G21) => {
            out.push((g22 * g22 * g23 / (e * e), g22 * (g12 * e + 3.0 * g22 * g23) / (e * e), false));
        }
        (G11, G22) => {
            for s in SIGNS {
                for t in SIGNS {
                    out.push((
                        (6.0 * g21 * g23 + g12 * (g12 + r.g2 * s)) / (18.0 * g23),
                        -e * (g12 + r.g2 * t) / (6.0 * g23),
                        false,
                    ));
                }
            }
        }
        (G12, G13) => ratio(&mut out, &|gr| ((3.0 * g11 - g21) / gr, 3.0 * g23 - g22 / gr)),
        (G12, G21) => out.push((ZERO, 3.0 * g11, true)),
        _ => unreachable!("not a displayed pair"),
    }
    out
}

/// Fill the unknown pair `(p, q)` of `g` with every closed-form completion
/// that satisfies the reduced constraints. Mirrored pairs are handled by
/// exchanging `x1` and `x2`.
pub fn reduced_pair_solve(g: &ReducedCoefficients, p: GIndex, q: GIndex) -> Result<Vec<ReducedCompletion>> {
    if p == q {
        return Err(Error::Validation("pair must name two distinct coefficients".into()));
    }
    let find = |a: GIndex, b: GIndex| {
        DISPLAYED_PAIRS.iter().find_map(|&(x, y)| ((x, y) == (a, b) || (x, y) == (b, a)).then_some((x, y)))
    };
    let (base, dp, dq, mirrored) = if let Some((x, y)) = find(p, q) {
        (*g, x, y, false)
    } else if let Some((x, y)) = find(p.mirror(), q.mirror()) {
        (g.swapped(), x, y, true)
    } else {
        unreachable!("every pair is displayed or mirrored")
    };
    let raw = displayed(&base, dp, dq);
    let mut out: Vec<ReducedCompletion> = Vec::new();
    for (x, y, special) in raw {
        if !(x.is_finite() && y.is_finite()) {
            continue;
        }
        let mut filled = base.with(dp, x).with(dq, y);
        if mirrored {
            filled = filled.swapped();
        }
        let rep = reduced_constraint_residuals(&filled);
        let residual = rep.max_dcons();
        if residual >= REDUCED_COMPLETION_TOL {
            continue;
        }
        let scale = filled.norm().max(f64::MIN_POSITIVE);
        let dup = out.iter().any(|o| {
            (o.coefficients.get(p) - filled.get(p)).norm() < 1e-9 * scale
                && (o.coefficients.get(q) - filled.get(q)).norm() < 1e-9 * scale
        });
        if !dup {
            out.push(ReducedCompletion { coefficients: filled, residual, special });
        }
    }
    if out.is_empty() {
        let alternatives: Vec<String> =
            DISPLAYED_PAIRS.iter().filter(|&&(x, y)| (x, y) != (dp, dq)).map(|(x, y)| format!("({x},{y})")).collect();
        return Err(Error::Inapplicable(format!(
            "no admissible completion for ({p},{q}); try one of {}",
            alternatives.join(" ")
        )));
    }
    out.sort_by(|a, b| a.special.cmp(&b.special).then(a.residual.total_cmp(&b.residual)));
    Ok(out)
}

/// Parameters for a reduced system: given `a`, `b` and `gamma1`, solve the
/// two linear conditions `c14 = c21 = 0` for `gamma2`, `gamma3`.
pub fn impose_reduced(a1: C64, a2: C64, b1: C64, b2: C64, gamma1: C64) -> Result<ParameterSet> {
    let m = [[a1 * a1 * b1, a1 * a1 * a1], [a2 * a2 * b2, a2 * a2 * a2]];
    let rhs =
        [a1 * a1 * b1 - b1 * b1 * b1 - gamma1 * a1 * b1 * b1, a2 * a2 * b2 - b2 * b2 * b2 - gamma1 * a2 * b2 * b2];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].norm() * m[1][1].norm() + m[0][1].norm() * m[1][0].norm();
    if det.norm() <= 1e-14 * scale || scale == 0.0 {
        return Err(Error::Degenerate("reduced conditions are singular for this a, b".into()));
    }
    let gamma2 = (rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det;
    let gamma3 = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
    ParameterSet::new(a1, a2, b1, b2, gamma1, gamma2, gamma3)
}

/// Parameters reproducing a reduced system. `a1 = sqrt(g11)` (principal);
/// `a2 = +-sqrt(g23)` with the sign fixed by `a2/a1 = g12/(3 g11 - g21)`
/// when that ratio is defined. `b` and `gamma` follow the general pipeline.
pub fn reduced_invert(g: &ReducedCoefficients) -> Result<ParameterSet> {
    let rep = reduced_constraint_residuals(g);
    if !rep.satisfied {
        return Err(Error::Constraint(format!(
            "reduced constraints violated (residuals {:.3e}, {:.3e})",
            rep.dcons[0], rep.dcons[1]
        )));
    }
    let n = g.norm();
    if g.g11.norm() <= 1e-14 * n || g.g23.norm() <= 1e-14 * n {
        return Err(Error::Validation("g11 and g23 must be nonzero".into()));
    }
    let a1 = g.g11.sqrt();
    let a2p = g.g23.sqrt();
    let den = 3.0 * g.g11 - g.g21;
    let mut signs = vec![1.0, -1.0];
    if den.norm() > 1e-10 * n {
        let alpha = g.g12 / den;
        if (a2p / a1 - alpha).norm() > (-a2p / a1 - alpha).norm() {
            signs.reverse();
        }
    }
    let c = g.to_full();
    let mut last_err = None;
    for s in signs {
        match inversion::complete_from_a(&c, a1, a2p * s) {
            Ok(r) => return Ok(r.parameters),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Inversion("no reduced decomposition".into())))
}

/// `alpha = a2 / a1` read off a reduced system.
pub fn reduced_alpha(g: &ReducedCoefficients) -> Option<C64> {
    let den = 3.0 * g.g11 - g.g21;
    if den.norm() > 1e-12 * g.norm() {
        Some(g.g12 / den)
    } else {
        // g12 = 0 and g21 = 3 g11: alpha from the g22/g13 quadratic
        let q = solve_quadratic((g.g12 - g.g22) / g.g22, -g.g13 / g.g22);
        q.into_iter().find(|z| z.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::re;

    #[test]
    fn reindexing_round_trip() {
        let g = ReducedCoefficients::from_real([1.0, 0.0, -6.0, 3.0, 9.0, 7.0]);
        let c = g.to_full();
        assert_eq!(c.to_array().map(|z| z.re), [1.0, 0.0, -6.0, 0.0, 0.0, 3.0, 9.0, 7.0]);
        assert_eq!(ReducedCoefficients::from_full(&c).unwrap(), g);
        assert!(ReducedCoefficients::from_full(&c.with(crate::Coeff::C14, re(1.0))).is_err());
    }

    #[test]
    fn exact_zero_branch_kills_dcons() {
        let g = ReducedCoefficients::from_real([0.7, 0.0, -1.3, 2.1, 0.4, 1.9]);
        let g = g.with(GIndex::G21, 3.0 * g.g11);
        assert_eq!(dcons_raw(&g), [ZERO, ZERO]);
    }

    #[test]
    fn radicals_square_back() {
        let g = ReducedCoefficients::from_real([0.7, 0.2, -1.3, 2.1, 0.4, 1.9]);
        let r = g.radicals();
        let rad = g.g12 * g.g12 + 4.0 * g.g13 * g.g21 - 2.0 * g.g12 * g.g22 + g.g22 * g.g22;
        assert!((r.g1 * r.g1 - rad).norm() < 1e-12);
        assert!((r.g_ratio.unwrap().powi(2) - g.g11 / g.g23).norm() < 1e-12);
    }

    #[test]
    fn index_names_parse() {
        for k in GIndex::ALL {
            assert_eq!(k.name().parse::<GIndex>().unwrap(), k);
            assert_eq!(k.mirror().mirror(), k);
        }
    }
}
