//! Coefficient and parameter types, the forward map from parameters to
//! coefficients, spectral data of the auxiliary cubic, and right-hand side
//! evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{solve_cubic, C64, ONE};
use crate::{Error, Result};

/// Root separation (relative) below which spectral data is degenerate.
pub const ROOT_SEPARATION: f64 = 1e-9;

/// The eight coefficients of the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub c11: C64,
    pub c12: C64,
    pub c13: C64,
    pub c14: C64,
    pub c21: C64,
    pub c22: C64,
    pub c23: C64,
    pub c24: C64,
}

/// Index of a single coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coeff {
    C11,
    C12,
    C13,
    C14,
    C21,
    C22,
    C23,
    C24,
}

impl Coeff {
    pub const ALL: [Coeff; 8] =
        [Coeff::C11, Coeff::C12, Coeff::C13, Coeff::C14, Coeff::C21, Coeff::C22, Coeff::C23, Coeff::C24];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Image under the exchange `x1 <-> x2`.
    pub fn mirror(self) -> Coeff {
        Coeff::ALL[7 - self.index()]
    }

    pub fn name(self) -> &'static str {
        ["c11", "c12", "c13", "c14", "c21", "c22", "c23", "c24"][self.index()]
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Coeff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Coeff::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Validation(format!("unknown coefficient `{s}`")))
    }
}

impl CoefficientSet {
    pub fn from_array(c: [C64; 8]) -> Self {
        CoefficientSet { c11: c[0], c12: c[1], c13: c[2], c14: c[3], c21: c[4], c22: c[5], c23: c[6], c24: c[7] }
    }

    pub fn from_real(c: [f64; 8]) -> Self {
        Self::from_array(c.map(|x| C64::new(x, 0.0)))
    }

    pub fn to_array(&self) -> [C64; 8] {
        [self.c11, self.c12, self.c13, self.c14, self.c21, self.c22, self.c23, self.c24]
    }

    pub fn get(&self, k: Coeff) -> C64 {
        self.to_array()[k.index()]
    }

    pub fn set(&mut self, k: Coeff, v: C64) {
        let mut a = self.to_array();
        a[k.index()] = v;
        *self = Self::from_array(a);
    }

    pub fn with(mut self, k: Coeff, v: C64) -> Self {
        self.set(k, v);
        self
    }

    /// Max-modulus norm.
    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, eta: C64) -> Self {
        Self::from_array(self.to_array().map(|c| c * eta))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// `max |c - other| / max(|c|, |other|)`.
    pub fn relative_distance(&self, other: &CoefficientSet) -> f64 {
        let d = self.to_array().iter().zip(other.to_array()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        d / self.norm().max(other.norm()).max(f64::MIN_POSITIVE)
    }
}

#[derive(Deserialize)]
struct RawParameters {
    a1: C64,
    a2: C64,
    b1: C64,
    b2: C64,
    gamma1: C64,
    gamma2: C64,
    gamma3: C64,
}

/// Parameters `a1, a2, b1, b2, gamma1, gamma2, gamma3` of the solvable family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParameters")]
pub struct ParameterSet {
    pub a1: C64,
    pub a2: C64,
    pub b1: C64,
    pub b2: C64,
    pub gamma1: C64,
    pub gamma2: C64,
    pub gamma3: C64,
}

impl TryFrom<RawParameters> for ParameterSet {
    type Error = Error;

    fn try_from(r: RawParameters) -> Result<Self> {
        ParameterSet::new(r.a1, r.a2, r.b1, r.b2, r.gamma1, r.gamma2, r.gamma3)
    }
}

impl ParameterSet {
    pub fn new(a1: C64, a2: C64, b1: C64, b2: C64, gamma1: C64, gamma2: C64, gamma3: C64) -> Result<Self> {
        let p = ParameterSet { a1, a2, b1, b2, gamma1, gamma2, gamma3 };
        p.validate()?;
        Ok(p)
    }

    /// Real-valued convenience constructor.
    pub fn real(a: [f64; 2], b: [f64; 2], gamma: [f64; 3]) -> Result<Self> {
        let c = |x: f64| C64::new(x, 0.0);
        Self::new(c(a[0]), c(a[1]), c(b[0]), c(b[1]), c(gamma[0]), c(gamma[1]), c(gamma[2]))
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a1, self.a2, self.b1, self.b2, self.gamma1, self.gamma2, self.gamma3];
        if !all.iter().all(|z| z.is_finite()) {
            return Err(Error::Validation("non-finite parameter".into()));
        }
        for (name, v) in [("a1", self.a1), ("a2", self.a2), ("b1", self.b1), ("b2", self.b2)] {
            if v.norm() == 0.0 {
                return Err(Error::Validation(format!("{name} must be nonzero")));
            }
        }
        let scale = (self.a1 * self.b2).norm() + (self.a2 * self.b1).norm();
        if self.c().norm() < 1e-12 * scale {
            return Err(Error::Degenerate("c = a1 b2 - a2 b1 vanishes".into()));
        }
        Ok(())
    }

    /// `c = a1 b2 - a2 b1`.
    pub fn c(&self) -> C64 {
        self.a1 * self.b2 - self.a2 * self.b1
    }

    pub fn gammas(&self) -> [C64; 3] {
        [self.gamma1, self.gamma2, self.gamma3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KValues {
    pub k1: C64,
    pub k2: C64,
    pub k3: C64,
    pub k4: C64,
}

pub fn k_values(p: &ParameterSet) -> KValues {
    let ParameterSet { a1, a2, b1, b2, gamma1: g1, gamma2: g2, gamma3: g3 } = *p;
    KValues {
        k1: g1 * a1 * b1 * b1 + g2 * a1 * a1 * b1 + g3 * a1 * a1 * a1 + b1 * b1 * b1,
        k2: g1 * (a2 * b1 * b1 + 2.0 * a1 * b1 * b2)
            + g2 * (a1 * a1 * b2 + 2.0 * a1 * a2 * b1)
            + 3.0 * g3 * a1 * a1 * a2
            + 3.0 * b1 * b1 * b2,
        k3: g1 * (a1 * b2 * b2 + 2.0 * a2 * b1 * b2)
            + g2 * (a2 * a2 * b1 + 2.0 * a1 * a2 * b2)
            + 3.0 * g3 * a1 * a2 * a2
            + 3.0 * b1 * b2 * b2,
        k4: g1 * a2 * b2 * b2 + g2 * a2 * a2 * b2 + g3 * a2 * a2 * a2 + b2 * b2 * b2,
    }
}

/// Coefficients of the system generated by `p`.
pub fn forward(p: &ParameterSet) -> Result<CoefficientSet> {
    p.validate()?;
    let KValues { k1, k2, k3, k4 } = k_values(p);
    let (a1, a2, b1, b2) = (p.a1, p.a2, p.b1, p.b2);
    let c = p.c();
    // monomials a1^(3-j) a2^j with binomial weights
    let m = [a1 * a1 * a1, 3.0 * a1 * a1 * a2, 3.0 * a1 * a2 * a2, a2 * a2 * a2];
    let k = [k1, k2, k3, k4];
    let mut out = [C64::new(0.0, 0.0); 8];
    for j in 0..4 {
        out[j] = (m[j] * b2 - a2 * k[j]) / c;
        out[4 + j] = (-m[j] * b1 + a1 * k[j]) / c;
    }
    Ok(CoefficientSet::from_array(out))
}

/// Roots `u_j` of `u^3 + g1 u^2 + (g2 - 1) u + g3` and weights
/// `lambda_j = 1 / prod_{l != j} (u_j - u_l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralData {
    pub u: [C64; 3],
    pub lambda: Option<[C64; 3]>,
    pub degenerate: bool,
}

impl SpectralData {
    /// The three identities `sum lambda`, `sum lambda u`, and
    /// `lambda1 u2 u3 + lambda2 u3 u1 + lambda3 u1 u2 - 1`; all vanish.
    pub fn identity_residuals(&self) -> Option<[C64; 3]> {
        let l = self.lambda?;
        let u = self.u;
        Some([
            l[0] + l[1] + l[2],
            l[0] * u[0] + l[1] * u[1] + l[2] * u[2],
            l[0] * u[1] * u[2] + l[1] * u[2] * u[0] + l[2] * u[0] * u[1] - ONE,
        ])
    }

    /// Value of the auxiliary cubic at `u`.
    pub fn cubic_at(&self, u: C64) -> C64 {
        (u - self.u[0]) * (u - self.u[1]) * (u - self.u[2])
    }
}

pub fn spectral(gamma1: C64, gamma2: C64, gamma3: C64) -> SpectralData {
    let roots = solve_cubic(gamma1, gamma2 - ONE, gamma3);
    let u = roots.roots;
    let scale = u.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let sep = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| (u[i] - u[j]).norm()).fold(f64::INFINITY, f64::min);
    // a rounded double root splits by about sqrt(eps); the discriminant catches it
    if sep < ROOT_SEPARATION * scale || roots.is_near_degenerate() {
        return SpectralData { u, lambda: None, degenerate: true };
    }
    let lambda = [
        ONE / ((u[0] - u[1]) * (u[0] - u[2])),
        ONE / ((u[1] - u[0]) * (u[1] - u[2])),
        ONE / ((u[2] - u[0]) * (u[2] - u[1])),
    ];
    SpectralData { u, lambda: Some(lambda), degenerate: false }
}

/// Exchange `x1 <-> x2`: c11<->c24, c12<->c23, c13<->c22, c14<->c21.
pub fn swap_symmetry(c: &CoefficientSet) -> CoefficientSet {
    let mut a = c.to_array();
    a.reverse();
    CoefficientSet::from_array(a)
}

pub fn rhs_eval(c: &CoefficientSet, x1: C64, x2: C64) -> (C64, C64) {
    let m = [x1 * x1 * x1, x1 * x1 * x2, x1 * x2 * x2, x2 * x2 * x2];
    let d1 = c.c11 * m[0] + c.c12 * m[1] + c.c13 * m[2] + c.c14 * m[3];
    let d2 = c.c21 * m[0] + c.c22 * m[1] + c.c23 * m[2] + c.c24 * m[3];
    (d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::re;

    #[test]
    fn k_values_worked_examples() {
        let p = ParameterSet::real([1.0, 1.0], [1.0, 2.0], [0.0; 3]).unwrap();
        let k = k_values(&p);
        assert_eq!([k.k1, k.k2, k.k3, k.k4], [re(1.0), re(6.0), re(12.0), re(8.0)]);
        let p = ParameterSet::real([1.0, 2.0], [3.0, 1.0], [1.0; 3]).unwrap();
        let k = k_values(&p);
        assert_eq!([k.k1, k.k2, k.k3, k.k4], [re(40.0), re(70.0), re(50.0), re(15.0)]);
    }

    #[test]
    fn forward_decoupled() {
        let p = ParameterSet::real([1.0, 1.0], [1.0, 2.0], [0.0; 3]).unwrap();
        let c = forward(&p).unwrap();
        assert_eq!(c, CoefficientSet::from_real([1.0, 0.0, -6.0, -6.0, 0.0, 3.0, 9.0, 7.0]));
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(matches!(ParameterSet::real([1.0, 1.0], [1.0, 1.0], [0.3; 3]), Err(Error::Degenerate(_))));
        assert!(matches!(ParameterSet::real([0.0, 1.0], [1.0, 2.0], [0.0; 3]), Err(Error::Validation(_))));
    }

    #[test]
    fn spectral_zero_gamma() {
        let s = spectral(re(0.0), re(0.0), re(0.0));
        assert!(!s.degenerate);
        let want_u = [-1.0, 0.0, 1.0];
        let want_l = [0.5, -1.0, 0.5];
        let l = s.lambda.unwrap();
        for j in 0..3 {
            assert!((s.u[j] - re(want_u[j])).norm() < 1e-15);
            assert!((l[j] - re(want_l[j])).norm() < 1e-14);
        }
        assert!(s.identity_residuals().unwrap().iter().all(|r| r.norm() < 1e-14));
    }

    #[test]
    fn spectral_double_root_is_degenerate() {
        let s = spectral(re(-4.0), re(6.0), re(-2.0));
        assert!(s.degenerate);
        assert!(s.lambda.is_none());
    }

    #[test]
    fn swap_and_rhs() {
        let c = CoefficientSet::from_real([1.0, 0.0, -6.0, -6.0, 0.0, 3.0, 9.0, 7.0]);
        assert_eq!(swap_symmetry(&c), CoefficientSet::from_real([7.0, 9.0, 3.0, 0.0, -6.0, -6.0, 0.0, 1.0]));
        assert_eq!(swap_symmetry(&swap_symmetry(&c)), c);
        assert_eq!(rhs_eval(&c, re(1.0), re(1.0)), (re(-11.0), re(19.0)));
        assert_eq!(rhs_eval(&c, re(0.0), re(0.0)), (re(0.0), re(0.0)));
    }

    #[test]
    fn coeff_names_round_trip() {
        for k in Coeff::ALL {
            assert_eq!(k.name().parse::<Coeff>().unwrap(), k);
            assert_eq!(k.mirror().mirror(), k);
        }
        assert_eq!(Coeff::C13.mirror(), Coeff::C22);
    }
}
