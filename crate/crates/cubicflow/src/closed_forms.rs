// Explicit formulas for one or two missing coefficients. Values of the
// missing entries in the input are ignored. Each function returns every
// branch (square-root signs, cube-root choices); callers filter by residual.

use crate::algebra::{cube_roots, C64};
use crate::model::{swap_symmetry, Coeff, CoefficientSet};

const SIGNS: [f64; 2] = [1.0, -1.0];

pub(crate) fn r1(c: &CoefficientSet) -> C64 {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    ((c13 - 3.0 * c24).powi(2) + 12.0 * c14 * c23).sqrt()
}

pub(crate) fn r2(c: &CoefficientSet) -> C64 {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    ((3.0 * c11 - c22).powi(2) + 12.0 * c12 * c21).sqrt()
}

pub(crate) fn r3(c: &CoefficientSet) -> C64 {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let t = c11 * c11 * (9.0 * c14 * c21 + c13 * c22 - 3.0 * c22 * c24) + (c13 * c21).powi(2);
    let u = 9.0 * c13 * c14 * c21 * c21 + 9.0 * c11 * c11 * c14 * c22 + c13 * c13 * c21 * c22
        - 3.0 * c11 * c14 * c22 * c22
        - 9.0 * c11 * c13 * c21 * c24;
    (t * t - 4.0 * c11 * c11 * c13 * c21 * u).sqrt()
}

pub(crate) fn r4(c: &CoefficientSet) -> C64 {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    ((c12 - c23).powi(2) + 4.0 * c13 * c22).sqrt()
}

// ---------------------------------------------------------------------------
// single coefficient from the first constraint

fn first_c11(c: &CoefficientSet) -> Vec<C64> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let num = -3.0 * c13 * c13 * c21 - c12 * c12 * c23
        + 3.0 * c14 * (c22 * c22 - 3.0 * c21 * c23)
        + c13 * (c22 * (c12 - c23) + 9.0 * c21 * c24)
        + c12 * (9.0 * c14 * c21 + c23 * c23 - 3.0 * c22 * c24);
    vec![num / (3.0 * (3.0 * c14 * c22 - c13 * c23))]
}

fn first_c12(c: &CoefficientSet) -> Vec<C64> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let m = 9.0 * c14 * c21 + c13 * c22 + c23 * c23 - 3.0 * c22 * c24;
    let d = m * m
        - 4.0
            * c23
            * (3.0 * c13 * c13 * c21 + 9.0 * c11 * c14 * c22 - 3.0 * c14 * c22 * c22
                + 9.0 * c14 * c21 * c23
                + c13 * (-3.0 * c11 * c23 + c22 * c23 - 9.0 * c21 * c24));
    let s = d.sqrt();
    SIGNS.iter().map(|k| (m + k * s) / (2.0 * c23)).collect()
}

fn first_c13(c: &CoefficientSet) -> Vec<C64> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let m = 9.0 * c21 * c24 + c12 * c22 + 3.0 * c11 * c23 - c22 * c23;
    let d = m * m
        + 12.0
            * c21
            * (3.0 * c22 * c22 * c14 - 9.0 * c11 * c14 * c22 + c12 * c23 * c23 - 3.0 * c12 * c22 * c24
                + 9.0 * c12 * c14 * c21
                - c12 * c12 * c23
                - 9.0 * c14 * c21 * c23);
    let s = d.sqrt();
    SIGNS.iter().map(|k| (m + k * s) / (6.0 * c21)).collect()
}

fn first_c14(c: &CoefficientSet) -> Vec<C64> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let num = -3.0 * c13 * c13 * c21 - c12 * (c12 * c23 + 3.0 * c22 * c24 - c23 * c23)
        + c13 * (c12 * c22 + 3.0 * c11 * c23 - c22 * c23 + 9.0 * c21 * c24);
    vec![num / (3.0 * (3.0 * (c11 * c22 - c12 * c21) + 3.0 * c21 * c23 - c22 * c22))]
}

/// Candidates for `k` from the first constraint; the mirrored half uses the
/// `x1 <-> x2` exchange.
pub(crate) fn first_single(c: &CoefficientSet, k: Coeff) -> Vec<C64> {
    match k {
        Coeff::C11 => first_c11(c),
        Coeff::C12 => first_c12(c),
        Coeff::C13 => first_c13(c),
        Coeff::C14 => first_c14(c),
        _ => first_single(&swap_symmetry(c), k.mirror()),
    }
}

// ---------------------------------------------------------------------------
// single coefficient from the second constraint

fn second_c11(c: &CoefficientSet) -> Vec<C64> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let r = r1(c);
    SIGNS
        .iter()
        .map(|s| {
            (6.0 * c14 * c22 * c23
                + (c12 * c23 + 9.0 * c14 * c21) * (c13 - 3.0 * c24)
                + (c12 * c23 - 9.0 * c14 * c21) * s * r)
                / (18.0 * c14 * c23)
        })
        .collect()
}

fn second_c12(c: &CoefficientSet) -> Vec<C64> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let r = r1(c);
    let t = c23 * (3.0 * c11 - c22);
    SIGNS
        .iter()
        .map(|s| {
            (3.0 * c13 * c13 * c21 + 18.0 * c21 * (c14 * c23 - c13 * c24) - c13 * t
                + 3.0 * c24 * (t + 9.0 * c21 * c24)
                + (t - 3.0 * c13 * c21 + 9.0 * c21 * c24) * s * r)
                / (2.0 * c23 * c23)
        })
        .collect()
}

fn second_c13(c: &CoefficientSet) -> Vec<C64> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let r = r2(c);
    SIGNS
        .iter()
        .map(|s| {
            (c12 * c23 * (3.0 * c11 - c22)
                + 9.0 * c21 * (3.0 * c11 * c14 - c14 * c22 + 2.0 * c12 * c24)
                + (c12 * c23 - 9.0 * c14 * c21) * s * r)
                / (6.0 * c12 * c21)
        })
        .collect()
}

fn second_c14(c: &CoefficientSet) -> Vec<C64> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let r = r2(c);
    let e = 3.0 * c11 - c22;
    SIGNS
        .iter()
        .map(|s| {
            (-3.0 * e * (c13 * c21 - 3.0 * c21 * c24)
                + c23 * (e * e + 6.0 * c12 * c21)
                + (3.0 * c21 * (c13 - 3.0 * c24) - c23 * e) * s * r)
                / (54.0 * c21 * c21)
        })
        .collect()
}

pub(crate) fn second_single(c: &CoefficientSet, k: Coeff) -> Vec<C64> {
    match k {
        Coeff::C11 => second_c11(c),
        Coeff::C12 => second_c12(c),
        Coeff::C13 => second_c13(c),
        Coeff::C14 => second_c14(c),
        _ => second_single(&swap_symmetry(c), k.mirror()),
    }
}

// ---------------------------------------------------------------------------
// pairs

/// One closed-form candidate for a missing pair. `q` may be left open when
/// only the first member has an explicit expression.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairCandidate {
    pub p: C64,
    pub q: Option<C64>,
}

fn pc(p: C64, q: C64) -> PairCandidate {
    PairCandidate { p, q: Some(q) }
}

fn pairs_c11_c24(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let r = r4(c);
    let mut out = Vec::new();
    for s in SIGNS {
        let x11 = (2.0 * c13 * c22 * c22
            + (c12 - c23) * (c12 * c22 + 3.0 * c13 * c21)
            + s * r * (c12 * c22 - 3.0 * c13 * c21))
            / (6.0 * c13 * c22);
        for t in SIGNS {
            let x24 = -(6.0 * c13.powi(3) * c21 * c22
                + c13 * c13 * (3.0 * c21 * c23 * c23 - c12 * (2.0 * c22 * c22 + 3.0 * c21 * c23))
                + (c12 - c23) * (3.0 * c12 * c14 * c22 * c22 + c13 * c22 * (c12 * c23 - 9.0 * c14 * c21))
                + (c13 * c23 - 3.0 * c14 * c22) * (c12 * c22 - 3.0 * c13 * c21) * t * r)
                / (6.0 * c13 * c22 * (c12 * c22 - 3.0 * c13 * c21));
            out.push(pc(x11, x24));
        }
    }
    out
}

fn pairs_c12_c23(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    vec![PairCandidate { p: 3.0 * c14 * (3.0 * c11 - c22) / (c13 - 3.0 * c24), q: None }]
}

fn pairs_c14_c21(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let e = 3.0 * c11 - c22;
    let mut out = vec![pc(c12 * (c13 - 3.0 * c24) / (3.0 * e), c23 * e / (3.0 * (c13 - 3.0 * c24)))];
    let f = c22 * (c13 - 3.0 * c24) - c23 * (c12 - c23);
    let r = r4(c);
    for s in SIGNS {
        let fr = f * s * r;
        let x14 = (c12 * c12 * c23 - c12 * (2.0 * c23 * c23 + c22 * (c13 - 3.0 * c24))
            + c23 * (c23 * c23 + 3.0 * c22 * (c13 - c24))
            + fr)
            / (6.0 * c22 * c22);
        for t in SIGNS {
            let fr = f * t * r;
            let x21 = (-c12.powi(4) * c23
                + c13 * e * (c23 * (c23 * c23 + c22 * (c13 - 3.0 * c24)) - fr)
                + c12.powi(3) * (3.0 * c23 * c23 + c22 * (c13 - 3.0 * c24))
                + c12
                    * (-3.0 * c13 * c13 * c22 * (c11 - c22) + c23.powi(4) - c23 * fr - 3.0 * c22 * c23 * c23 * c24
                        + c13 * (9.0 * c22 * c24 * (c11 - c22) - c23 * c23 * (6.0 * c11 - 5.0 * c22)))
                + c12 * c12 * (-3.0 * c23.powi(3) + fr + c23 * (3.0 * c11 * c13 - c22 * (5.0 * c13 - 6.0 * c24))))
                / (6.0 * f * c13 * c13);
            out.push(pc(x14, x21));
        }
    }
    out
}

fn pairs_c11_c12(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let mut out = vec![pc((c22 * c23 + 3.0 * c21 * (c13 - 3.0 * c24)) / (3.0 * c23), 9.0 * c14 * c21 / c23)];
    let r = r1(c);
    for s in SIGNS {
        let x11 = (c13 * c13 * c23 * (c13 - 6.0 * c24)
            + 27.0 * c14 * c14 * c21 * (c13 - 3.0 * c24)
            + 9.0 * c23 * (c13 * c24 * c24 + c14 * c23 * (c13 - c24))
            - (c13 * c23 * (c13 - 3.0 * c24) + 3.0 * c14 * (c23 * c23 - 9.0 * c14 * c21)) * s * r)
            / (54.0 * c14 * c14 * c23);
        for t in SIGNS {
            let x12 = (c13 * (c13 * c23 + 3.0 * c14 * c22 - 3.0 * c23 * c24)
                + 3.0 * c14 * (2.0 * c23 * c23 - 3.0 * c22 * c24)
                + (3.0 * c14 * c22 - c13 * c23) * t * r)
                / (6.0 * c14 * c23);
            out.push(pc(x11, x12));
        }
    }
    out
}

fn pairs_c11_c13(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let a2 = 27.0
        * c14
        * c22
        * (-9.0 * c14 * c22.powi(3) + 2.0 * c12 * c12 * c22 * c23 - 3.0 * c12 * c22 * c23 * c23
            + 3.0 * c22 * c23.powi(3)
            + 3.0 * c22 * c22 * c24 * (c12 + 3.0 * c23))
        - 9.0 * c12 * c22 * c23 * c23 * c24 * (c12 + 3.0 * c23)
        + 27.0 * c22 * c22 * c23 * c24 * c24 * (c12 - 6.0 * c23)
        + 54.0 * (c22 * c24).powi(3)
        - 2.0 * (c12 * c23).powi(3);
    let a3 = 9.0 * c14 * c22 * c22 * (3.0 * c23 - c12)
        - c12 * c23 * (c12 * c23 + 3.0 * c22 * c24)
        - 9.0 * c22 * c24 * (c23 * c23 + c22 * c24);
    let disc = (a2 * a2 + 4.0 * a3.powi(3)).sqrt();
    let k = 2f64.cbrt();
    let mut out = Vec::new();
    for s in SIGNS {
        for a4 in cube_roots(a2 + s * disc) {
            if a4.norm() == 0.0 {
                continue;
            }
            let x13 = 2.0 * c24 + (c12 * c23 + k * a3 / a4 - a4 / k) / (3.0 * c22);
            let num = 9.0 * c14 * c14 * c22 * (3.0 * c12 * c21 + c22 * c22 - 6.0 * c21 * c23)
                + 3.0 * c12 * c12 * c23 * (c23 * c24 - c14 * c22)
                + 3.0 * c14 * c22 * c23 * c23 * (c12 + c23)
                - 9.0 * c14 * c22 * c22 * c24 * (c12 + c23)
                - 3.0 * c12 * c23 * c24 * (c23 * c23 - 3.0 * c22 * c24)
                + x13
                    * (3.0 * c14 * c22 * (c12 * c22 + 9.0 * c21 * c24) - c12 * c23 * (c12 * c23 + 6.0 * c22 * c24)
                        + 9.0 * c14 * c21 * c23 * c23)
                + x13 * x13 * c22 * (c12 * c23 - 9.0 * c14 * c21);
            let den = 9.0 * c14 * (3.0 * c22 * (c14 * c22 - c23 * c24) + c23 * c23 * (c23 - c12));
            out.push(pc(num / den, x13));
        }
    }
    out
}

fn pairs_c11_c14(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let mut out = vec![pc((3.0 * c13 * c21 + c22 * c23 - 9.0 * c21 * c24) / (3.0 * c23), c12 * c23 / (9.0 * c21))];
    let r = r4(c);
    let d = c13 * c22 - c12 * c23 + c23 * c23 - 3.0 * c22 * c24;
    for s in SIGNS {
        let x11 = (-c12.powi(3) * c22 * c23
            + c13 * (2.0 * c22 * c22 - 3.0 * c21 * c23) * (c13 * c22 + c23 * c23 - 3.0 * c22 * c24)
            + c12 * c12 * (c13 * (c22 * c22 - 3.0 * c21 * c23) + c22 * (2.0 * c23 * c23 - 3.0 * c22 * c24))
            + c12
                * (3.0 * c13 * c13 * c21 * c22
                    - c22 * c23 * (c23 * c23 - 3.0 * c22 * c24)
                    - 3.0 * c13 * (c23 * (c22 * c22 - 2.0 * c21 * c23) + 3.0 * c21 * c22 * c24))
            + (3.0 * c13 * c21 - c12 * c22) * d * s * r)
            / (6.0 * c13 * c22 * d);
        for t in SIGNS {
            let x14 = (c12 * c23 * (c12 - 2.0 * c23) + 3.0 * c22 * (c12 * c24 + c23 * (c13 - c24)) - c12 * c13 * c22
                + c23.powi(3)
                + d * t * r)
                / (6.0 * c22 * c22);
            out.push(pc(x11, x14));
        }
    }
    out
}

fn pairs_c11_c21(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    vec![pc((c12 * c13 + 3.0 * c14 * c22 - 3.0 * c12 * c24) / (9.0 * c14), c12 * c23 / (9.0 * c14))]
}

fn pairs_c11_c22(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let r = r1(c);
    let mut out = Vec::new();
    for s in SIGNS {
        let x11 = (c13.powi(3) * c23 - 6.0 * c13 * c13 * c23 * c24
            + 9.0 * c13 * (3.0 * c14 * c14 * c21 + c14 * c23 * c23 + c23 * c24 * c24)
            - 9.0 * c14 * (c23 * c23 * c24 + 9.0 * c14 * c21 * c24)
            + (-c13 * c13 * c23 + 3.0 * c13 * c23 * c24 - 3.0 * c14 * c23 * c23 + 27.0 * c14 * c14 * c21) * s * r)
            / (54.0 * c14 * c14 * c23);
        for t in SIGNS {
            let x22 = (c13.powi(3)
                + 3.0 * c14 * (-c12 * c13 + 3.0 * c13 * c23 + 3.0 * c12 * c24 - 3.0 * c23 * c24)
                + 3.0 * c13 * c24 * (3.0 * c24 - 2.0 * c13)
                + (c13 * (c13 - 3.0 * c24) - 3.0 * c14 * (c12 - c23)) * t * r)
                / (18.0 * c14 * c14);
            out.push(pc(x11, x22));
        }
    }
    out
}

fn pairs_c11_c23(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let mut out = vec![pc((c12 * c13 + 3.0 * (c14 * c22 - c12 * c24)) / (9.0 * c14), 9.0 * c14 * c21 / c12)];
    let e1 = 27.0
        * ((c12 * c14).powi(2) * (6.0 * c13 * c13 - 2.0 * c12 * c14 - 3.0 * c13 * c24)
            + 9.0 * (c13 * c14).powi(2) * c22 * (3.0 * c24 - c13)
            + 3.0 * c12 * c14 * c24 * (c13.powi(3) - 9.0 * c14 * c14 * c22)
            + 27.0 * c14.powi(3) * c22 * (3.0 * c14 * c22 - c12 * c13)
            + c13 * c24 * c24 * (3.0 * c12 * c13 * c14 - 54.0 * c14 * c14 * c22 + 2.0 * c13 * c13 * c24));
    let e2 =
        9.0 * (c14 * c14 * (9.0 * c22 * (c13 - c24) - c12 * c12) - (c13 * c24).powi(2) - c12 * c13 * c14 * (c13 + c24));
    let disc = (e1 * e1 + 4.0 * e2.powi(3)).sqrt();
    let k = 2f64.cbrt();
    for s in SIGNS {
        for e3 in cube_roots(e1 + s * disc) {
            if e3.norm() == 0.0 {
                continue;
            }
            let x23 = 2.0 * c12 / 3.0 + (3.0 * c13 * c24 - k * e2 / e3 + e3 / k) / (9.0 * c14);
            // c11 follows from the first constraint, which is linear in it
            let filled = c.with(Coeff::C23, x23);
            for x11 in first_c11(&filled) {
                out.push(pc(x11, x23));
            }
        }
    }
    out
}

fn pairs_c12_c13(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    vec![pc(9.0 * c14 * c21 / c23, (3.0 * c11 * c23 - c22 * c23 + 9.0 * c21 * c24) / (3.0 * c21))]
}

fn pairs_c12_c14(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let b2 = 27.0
        * (c13
            * c21
            * c21
            * (-81.0 * c13 * c21 * c21 + 54.0 * c11 * c11 * c22 - 27.0 * c11 * c22 * c22
                + 9.0 * c22.powi(3)
                + 27.0 * c21 * c23 * (c11 + c22))
            - 2.0 * ((c11 * c22).powi(3) - (c21 * c23).powi(3))
            - 3.0 * c11 * c21 * c22 * c23 * (c11 * c22 + c22 * c22 - c21 * c23)
            - 6.0 * (c21 * c22 * c23).powi(2));
    let b3 = -81.0 * c13 * c21 * c21 * (c11 - c22)
        - 9.0 * c21 * c22 * c23 * (c11 + c22)
        - 9.0 * ((c11 * c22).powi(2) + (c21 * c23).powi(2));
    let disc = (b2 * b2 + 4.0 * b3.powi(3)).sqrt();
    let k = 2f64.cbrt();
    let mut out = Vec::new();
    for s in SIGNS {
        for b4 in cube_roots(b2 + s * disc) {
            if b4.norm() == 0.0 {
                continue;
            }
            let x12 = 2.0 * c23 / 3.0 + (3.0 * c11 * c22 + k * b3 / b4 - b4 / k) / (9.0 * c21);
            let num = 3.0 * c13 * c13 * c21 * (3.0 * c11 - 2.0 * c22)
                - 9.0 * c11 * c13 * c23 * (c11 - c22)
                - 2.0 * c13 * c22 * c22 * c23
                - 9.0 * c13 * c21 * c24 * (3.0 * c11 - 2.0 * c22)
                + x12 * (c22 * c22 * (c13 - 3.0 * c24) - c23 * c23 * (3.0 * c11 - 2.0 * c22) - 9.0 * c21 * c23 * c24)
                + x12 * x12 * (-3.0 * c21 * (c13 - 3.0 * c24) + c23 * (3.0 * c11 - c22));
            let den = 3.0 * (c22 * c22 * (3.0 * c11 - c22) + 3.0 * c21 * (c22 * c23 - 3.0 * c13 * c21));
            out.push(pc(x12, num / den));
        }
    }
    out
}

fn pairs_c12_c21(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let mut out = vec![pc(
        (9.0 * c11 * c14 - 3.0 * c14 * c22) / (c13 - 3.0 * c24),
        (3.0 * c11 * c23 - c22 * c23) / (3.0 * (c13 - 3.0 * c24)),
    )];
    let r = r1(c);
    for s in SIGNS {
        let x12 = ((c13 - 3.0 * c24) * (c13 * c23 + 3.0 * c14 * c22)
            + 6.0 * c14 * c23 * c23
            + (3.0 * c14 * c22 - c13 * c23) * s * r)
            / (6.0 * c14 * c23);
        for t in SIGNS {
            let x21 = (c13.powi(3) * (c13 - 9.0 * c24)
                + 9.0 * c14 * c14 * (2.0 * c23 * c23 + 9.0 * c11 * c24)
                + 27.0 * c14 * c23 * c24 * c24
                + 3.0 * c13 * c13 * (4.0 * c14 * c23 + 9.0 * c24 * c24)
                - 9.0 * c13 * (3.0 * c11 * c14 * c14 + 3.0 * c24.powi(3) + 5.0 * c14 * c23 * c24)
                + (-c13.powi(3) + 6.0 * c13 * c13 * c24 - 9.0 * c13 * c24 * c24 - 6.0 * c13 * c14 * c23
                    + 9.0 * c14 * (3.0 * c11 * c14 + c23 * c24))
                    * t
                    * r)
                / (162.0 * c14.powi(3));
            out.push(pc(x12, x21));
        }
    }
    out
}

fn pairs_c12_c22(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    vec![pc(9.0 * c14 * c21 / c23, 3.0 * (c11 * c23 - c13 * c21 + 3.0 * c21 * c24) / c23)]
}

fn pairs_c13_c14(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    let mut out = vec![pc((3.0 * c11 * c23 - c22 * c23) / (3.0 * c21), c12 * c23 / (9.0 * c21))];
    let r = r2(c);
    for s in SIGNS {
        let x13 = (c22 * (9.0 * c11 * c11 + 9.0 * c12 * c21 + c22 * c22 - 3.0 * c21 * c23)
            - 3.0 * c11 * (3.0 * c12 * c21 + 2.0 * c22 * c22 - 3.0 * c21 * c23)
            + (3.0 * c21 * (c12 - c23) + c22 * (c22 - 3.0 * c11)) * s * r)
            / (18.0 * c21 * c21);
        for t in SIGNS {
            let x14 = (27.0 * c11 * c11 * (c12 * c21 - c11 * c22 + c22 * c22)
                + 9.0 * c12 * c21 * (2.0 * c12 * c21 - 5.0 * c11 * c22)
                + c22 * c22 * (12.0 * c12 * c21 - 9.0 * c11 * c22 + c22 * c22)
                + c21 * c21 * c24 * (81.0 * c11 - 27.0 * c22)
                - (9.0 * c21 * (c11 * c12 + 3.0 * c21 * c24) - c22 * (6.0 * c12 * c21 + c22 * c22)
                    + 3.0 * c11 * c22 * (2.0 * c22 - 3.0 * c11))
                    * t
                    * r)
                / (162.0 * c21.powi(3));
            out.push(pc(x13, x14));
        }
    }
    out
}

fn pairs_c13_c21(c: &CoefficientSet) -> Vec<PairCandidate> {
    #[allow(unused_variables)]
    let CoefficientSet { c11, c12, c13, c14, c21, c22, c23, c24 } = *c;
    vec![pc(3.0 * (3.0 * c11 * c14 + c12 * c24 - c14 * c22) / c12, c12 * c23 / (9.0 * c14))]
}

/// Pairs (in index order) that carry explicit formulas; the remaining pairs
/// outside their mirror images have none.
pub(crate) const DISPLAYED: [(Coeff, Coeff); 16] = [
    (Coeff::C11, Coeff::C24),
    (Coeff::C12, Coeff::C23),
    (Coeff::C13, Coeff::C22),
    (Coeff::C14, Coeff::C21),
    (Coeff::C11, Coeff::C12),
    (Coeff::C11, Coeff::C13),
    (Coeff::C11, Coeff::C14),
    (Coeff::C11, Coeff::C21),
    (Coeff::C11, Coeff::C22),
    (Coeff::C11, Coeff::C23),
    (Coeff::C12, Coeff::C13),
    (Coeff::C12, Coeff::C14),
    (Coeff::C12, Coeff::C21),
    (Coeff::C12, Coeff::C22),
    (Coeff::C13, Coeff::C14),
    (Coeff::C13, Coeff::C21),
];

fn direct(c: &CoefficientSet, p: Coeff, q: Coeff) -> Option<Vec<PairCandidate>> {
    use Coeff::*;
    let f: fn(&CoefficientSet) -> Vec<PairCandidate> = match (p, q) {
        (C11, C24) => pairs_c11_c24,
        (C12, C23) => pairs_c12_c23,
        (C13, C22) => return Some(Vec::new()),
        (C14, C21) => pairs_c14_c21,
        (C11, C12) => pairs_c11_c12,
        (C11, C13) => pairs_c11_c13,
        (C11, C14) => pairs_c11_c14,
        (C11, C21) => pairs_c11_c21,
        (C11, C22) => pairs_c11_c22,
        (C11, C23) => pairs_c11_c23,
        (C12, C13) => pairs_c12_c13,
        (C12, C14) => pairs_c12_c14,
        (C12, C21) => pairs_c12_c21,
        (C12, C22) => pairs_c12_c22,
        (C13, C14) => pairs_c13_c14,
        (C13, C21) => pairs_c13_c21,
        _ => return None,
    };
    Some(f(c))
}

/// Closed-form candidates for the pair `(p, q)` with `p < q`, using the
/// exchange symmetry for mirrored pairs. Candidates are returned as
/// `(value of p, value of q)`.
pub(crate) fn pair(c: &CoefficientSet, p: Coeff, q: Coeff) -> Vec<PairCandidate> {
    if let Some(v) = direct(c, p, q) {
        return v;
    }
    let (mp, mq) = (p.mirror(), q.mirror());
    let (lo, hi, flipped) = if mp < mq { (mp, mq, false) } else { (mq, mp, true) };
    let sw = swap_symmetry(c);
    match direct(&sw, lo, hi) {
        Some(v) => v
            .into_iter()
            .filter_map(|cand| {
                if flipped {
                    // the formula's first member is the image of q
                    cand.q.map(|qv| PairCandidate { p: qv, q: Some(cand.p) })
                } else {
                    Some(cand)
                }
            })
            .collect(),
        None => Vec::new(),
    }
}
