mod common;

use std::f64::consts::PI;

use common::*;
use cubicflow::algebra::{re, C64, ZERO};
use cubicflow::integrator::{integrate, OdeProblem, Tolerances};
use cubicflow::isochronous::{detect_period, solve_tilde, IsochronousSystem};
use cubicflow::model::{forward, rhs_eval, CoefficientSet, ParameterSet};
use cubicflow::solver::{singularity_time, solve_ivp, IvpSpec};

fn decoupled() -> ParameterSet {
    ParameterSet::real([1.0, 1.0], [1.0, 2.0], [0.0, 0.0, 0.0]).unwrap()
}

#[test]
fn integrator_error_tracks_tolerance() {
    let rhs = |_: C64, y: &[C64], d: &mut [C64]| d[0] = y[0] * y[0] * y[0];
    let exact = 1.0 / (1.0f64 - 0.8).sqrt();
    let mut errs = Vec::new();
    for rtol in [1e-5, 1e-8, 1e-11] {
        let tol = Tolerances { rtol, atol: 1e-2 * rtol };
        let sol = integrate(&OdeProblem { rhs: &rhs, y0: vec![re(1.0)], path: vec![ZERO, re(0.4)], tol }).unwrap();
        let err = (sol.last()[0] - re(exact)).norm() / exact;
        assert!(err < 1e3 * rtol, "rtol {rtol}: error {err}");
        errs.push(err);
    }
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn integrator_follows_complex_path() {
    // y' = y^3 has y = (1 - 2t)^(-1/2); a detour around t = 1/2 lands on the other sheet
    let rhs = |_: C64, y: &[C64], d: &mut [C64]| d[0] = y[0] * y[0] * y[0];
    let path = vec![ZERO, C64::new(0.25, -0.5), C64::new(0.75, -0.5), re(1.0)];
    let sol = integrate(&OdeProblem { rhs: &rhs, y0: vec![re(1.0)], path, tol: Tolerances::default() }).unwrap();
    let want = C64::new(0.0, -1.0);
    assert!((sol.last()[0] - want).norm() < 1e-8 || (sol.last()[0] + want).norm() < 1e-8);
    assert!(sol.last()[0].re.abs() < 1e-8);
}

#[test]
fn closed_form_satisfies_ode_by_finite_differences() {
    let mut r = rng(41);
    for _ in 0..20 {
        let (p, c) = random_manifold(&mut r);
        let x0 = [cplx(&mut r, 0.1, 0.7), cplx(&mut r, 0.1, 0.7)];
        let t_star = singularity_time(&IvpSpec::new(p, x0, vec![])).unwrap().earliest.unwrap().norm();
        let (t, h) = (0.3 * t_star, 1e-4 * t_star);
        let tr = solve_ivp(&IvpSpec::new(p, x0, vec![re(t - h), re(t), re(t + h)])).unwrap();
        let s = &tr.states;
        let (d1, d2) = rhs_eval(&c, s[1][0], s[1][1]);
        let fd = [(s[2][0] - s[0][0]) / (2.0 * h), (s[2][1] - s[0][1]) / (2.0 * h)];
        let scale = d1.norm().max(d2.norm()).max(1e-12);
        assert!(state_dist(fd, [d1, d2]) < 1e-6 * scale, "fd {fd:?} vs {:?}", (d1, d2));
    }
}

#[test]
fn closed_form_matches_integrator_on_complex_times() {
    let mut r = rng(42);
    for _ in 0..15 {
        let (p, c) = random_manifold(&mut r);
        let x0 = [cplx(&mut r, 0.1, 0.6), cplx(&mut r, 0.1, 0.6)];
        let t_star = singularity_time(&IvpSpec::new(p, x0, vec![])).unwrap().earliest.unwrap().norm();
        let s = 0.3 * t_star;
        let grid = vec![C64::new(0.5 * s, 0.5 * s), C64::new(s, 0.0), C64::new(0.5 * s, -0.5 * s)];
        let an = solve_ivp(&IvpSpec::new(p, x0, grid.clone())).unwrap();
        let mut path = vec![ZERO];
        path.extend(&grid);
        let rk = rk_trajectory(&c, x0, &path);
        for (a, b) in an.states.iter().zip(&rk[1..]) {
            assert!(state_dist(*a, *b) < 1e-7 * max_norm(b).max(1e-3), "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn decoupled_hand_values() {
    let tr = solve_ivp(&IvpSpec::new(decoupled(), [re(1.0), re(1.0)], vec![re(1.0 / 32.0)])).unwrap();
    let x = tr.last_state().unwrap();
    // x1 = 2y - w, x2 = w - y with y = 4/sqrt(3), w = 12/sqrt(7)
    let (y, w) = (4.0 / 3f64.sqrt(), 12.0 / 7f64.sqrt());
    assert!(state_dist(x, [re(2.0 * y - w), re(w - y)]) < 1e-10);
    let fixed = solve_ivp(&IvpSpec::new(decoupled(), [re(1.0), ZERO], vec![re(0.375)])).unwrap();
    assert!(state_dist(fixed.last_state().unwrap(), [re(2.0), ZERO]) < 1e-12);
}

#[test]
fn isochronous_closed_form_matches_integrator() {
    let mut r = rng(43);
    for _ in 0..8 {
        let (p, c) = random_manifold(&mut r);
        let x0 = [cplx(&mut r, 0.01, 0.05), cplx(&mut r, 0.01, 0.05)];
        let omega = 1.0;
        let ts: Vec<f64> = (0..=16).map(|k| k as f64 * PI / 8.0).collect();
        let an = solve_tilde(&p, omega, x0, &ts).unwrap();
        let sol = IsochronousSystem::new(c, omega).unwrap().integrate(x0, &ts, Tolerances::default()).unwrap();
        for (a, b) in an.states.iter().zip(&sol.states) {
            let b = [b[0], b[1]];
            assert!(state_dist(*a, b) < 1e-8 * max_norm(&b).max(1e-6));
        }
    }
}

#[test]
fn isochronous_period_of_decoupled_small_data() {
    let c = CoefficientSet::from_real([1.0, 0.0, -6.0, -6.0, 0.0, 3.0, 9.0, 7.0]);
    let rep = detect_period(&c, 1.0, [re(0.01), re(0.02)], 4, 1e-6).unwrap();
    assert_eq!(rep.k, Some(1));
    assert!(rep.rational_lambdas.unwrap().rational);
    // half period flips the sign
    let tr = solve_tilde(&decoupled(), 1.0, [re(0.01), re(0.02)], &[PI]).unwrap();
    let x = tr.last_state().unwrap();
    assert!(state_dist(x, [re(-0.01), re(-0.02)]) < 1e-10);
}

#[test]
fn forward_of_real_parameters_is_real() {
    let mut r = rng(44);
    for _ in 0..50 {
        let c = forward(&random_real_parameters(&mut r)).unwrap();
        assert!(c.to_array().iter().all(|z| z.im == 0.0));
    }
}
