#![allow(dead_code)]

use cubicflow::algebra::C64;
use cubicflow::integrator::{integrate, OdeProblem, Tolerances};
use cubicflow::model::{forward, rhs_eval, CoefficientSet, ParameterSet};
use cubicflow::reduced::{impose_reduced, ReducedCoefficients};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with modulus in `[lo, hi]` and uniform phase.
pub fn cplx(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(r.gen_range(lo..=hi), r.gen_range(0.0..std::f64::consts::TAU))
}

/// Parameters of modulus at most 3, away from the degenerate set.
pub fn random_parameters(r: &mut ChaCha8Rng) -> ParameterSet {
    loop {
        let a1 = cplx(r, 0.3, 3.0);
        let a2 = cplx(r, 0.3, 3.0);
        let b1 = cplx(r, 0.3, 3.0);
        let b2 = cplx(r, 0.3, 3.0);
        let g = [cplx(r, 0.0, 3.0), cplx(r, 0.0, 3.0), cplx(r, 0.0, 3.0)];
        let scale = (a1 * b2).norm() + (a2 * b1).norm();
        if (a1 * b2 - a2 * b1).norm() < 0.1 * scale {
            continue;
        }
        if let Ok(p) = ParameterSet::new(a1, a2, b1, b2, g[0], g[1], g[2]) {
            return p;
        }
    }
}

pub fn random_manifold(r: &mut ChaCha8Rng) -> (ParameterSet, CoefficientSet) {
    let p = random_parameters(r);
    (p, forward(&p).unwrap())
}

/// Real-valued variant, for checks that want real coefficients.
pub fn random_real_parameters(r: &mut ChaCha8Rng) -> ParameterSet {
    loop {
        let mut x = || {
            let v: f64 = r.gen_range(0.3..3.0);
            if r.gen_bool(0.5) {
                v
            } else {
                -v
            }
        };
        let (a, b) = ([x(), x()], [x(), x()]);
        let g = [x(), x(), x()];
        if (a[0] * b[1] - a[1] * b[0]).abs() < 0.1 * ((a[0] * b[1]).abs() + (a[1] * b[0]).abs()) {
            continue;
        }
        if let Ok(p) = ParameterSet::real(a, b, g) {
            return p;
        }
    }
}

/// A reduced system generated from random `a`, `b`, `gamma1`.
pub fn random_reduced(r: &mut ChaCha8Rng) -> (ParameterSet, ReducedCoefficients) {
    loop {
        let (a1, a2, b1, b2) = (cplx(r, 0.5, 2.0), cplx(r, 0.5, 2.0), cplx(r, 0.5, 2.0), cplx(r, 0.5, 2.0));
        let scale = (a1 * b2).norm() + (a2 * b1).norm();
        if (a1 * b2 - a2 * b1).norm() < 0.1 * scale {
            continue;
        }
        let Ok(p) = impose_reduced(a1, a2, b1, b2, cplx(r, 0.0, 2.0)) else { continue };
        if p.gamma2.norm() > 50.0 || p.gamma3.norm() > 50.0 {
            continue;
        }
        if let Ok(g) = ReducedCoefficients::from_full(&forward(&p).unwrap()) {
            return (p, g);
        }
    }
}

/// Runge-Kutta solution of the cubic system on the real grid `ts`.
pub fn rk_trajectory(c: &CoefficientSet, x0: [C64; 2], ts: &[C64]) -> Vec<[C64; 2]> {
    let rhs = |_: C64, x: &[C64], d: &mut [C64]| {
        let (d1, d2) = rhs_eval(c, x[0], x[1]);
        d[0] = d1;
        d[1] = d2;
    };
    let sol =
        integrate(&OdeProblem { rhs: &rhs, y0: x0.to_vec(), path: ts.to_vec(), tol: Tolerances::default() }).unwrap();
    sol.states.iter().map(|s| [s[0], s[1]]).collect()
}

pub fn max_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn state_dist(a: [C64; 2], b: [C64; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}
