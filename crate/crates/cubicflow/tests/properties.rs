mod common;

use common::*;
use cubicflow::algebra::{re, C64};
use cubicflow::constraints::{complete_pair, constraint_residuals, is_column_pair};
use cubicflow::inversion::invert;
use cubicflow::model::{forward, rhs_eval, spectral, swap_symmetry, Coeff, ParameterSet};
use cubicflow::reduced::reduced_constraint_residuals;
use cubicflow::solver::{real_grid, singularity_time, solve_ivp, IvpSpec};
use proptest::prelude::*;

fn swapped_parameters(p: &ParameterSet) -> ParameterSet {
    ParameterSet::new(p.a2, p.a1, p.b2, p.b1, p.gamma1, p.gamma2, p.gamma3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forward_output_satisfies_constraints(seed in any::<u64>()) {
        let (_, c) = random_manifold(&mut rng(seed));
        let rep = constraint_residuals(&c);
        prop_assert!(rep.satisfied, "{rep:?}");
    }

    #[test]
    fn inversion_round_trip(seed in any::<u64>()) {
        let (_, c) = random_manifold(&mut rng(seed));
        let res = invert(&c).unwrap();
        prop_assert!(forward(&res.parameters).unwrap().relative_distance(&c) < 1e-8);
    }

    #[test]
    fn projection_of_the_field_is_the_pure_cubic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (p, c) = random_manifold(&mut r);
        let (x1, x2) = (cplx(&mut r, 0.0, 2.0), cplx(&mut r, 0.0, 2.0));
        let (d1, d2) = rhs_eval(&c, x1, x2);
        let y = p.a1 * x1 + p.a2 * x2;
        let w = p.b1 * x1 + p.b2 * x2;
        let u = w / y;
        let scale = c.norm() * (x1.norm() + x2.norm()).powi(3) * (p.a1.norm() + p.a2.norm() + p.b1.norm() + p.b2.norm());
        // y' = y^3 and w' = y^3 (u^3 + g1 u^2 + g2 u + g3)
        prop_assert!((p.a1 * d1 + p.a2 * d2 - y * y * y).norm() < 1e-12 * scale);
        let wdot = y * y * y * (u * u * u + p.gamma1 * u * u + p.gamma2 * u + p.gamma3);
        prop_assert!((p.b1 * d1 + p.b2 * d2 - wdot).norm() < 1e-11 * scale.max(wdot.norm()));
    }

    #[test]
    fn swapping_variables_commutes_with_forward(seed in any::<u64>()) {
        let (p, c) = random_manifold(&mut rng(seed));
        let swapped = forward(&swapped_parameters(&p)).unwrap();
        prop_assert!(swap_symmetry(&c).relative_distance(&swapped) < 1e-13);
        prop_assert!(constraint_residuals(&swap_symmetry(&c)).satisfied);
    }

    #[test]
    fn constraints_are_homogeneous(seed in any::<u64>(), eta in 0.2f64..5.0) {
        let (_, c) = random_manifold(&mut rng(seed));
        let a = constraint_residuals(&c).max_residual();
        let b = constraint_residuals(&c.scale(C64::new(eta, -0.5 * eta))).max_residual();
        prop_assert!(b < 1e-9 && a < 1e-9);
    }

    #[test]
    fn off_manifold_perturbation_is_detected(seed in any::<u64>(), k in 0usize..8) {
        let (_, c) = random_manifold(&mut rng(seed));
        let k = Coeff::ALL[k];
        let bumped = c.with(k, c.get(k) + 1e-3 * c.norm());
        prop_assert!(!constraint_residuals(&bumped).satisfied);
    }

    #[test]
    fn pair_completion_recovers_original_off_columns(seed in any::<u64>(), i in 0usize..8, j in 0usize..8) {
        let (p, q) = (Coeff::ALL[i], Coeff::ALL[j]);
        prop_assume!(p != q && !is_column_pair(p, q));
        let (_, c) = random_manifold(&mut rng(seed));
        let list = complete_pair(&c, p, q).unwrap();
        prop_assert!(list.iter().any(|m| m.coefficients.relative_distance(&c) < 1e-8));
        prop_assert!(list.iter().all(|m| constraint_residuals(&m.coefficients).max_residual() < 1e-8));
    }

    #[test]
    fn column_pair_completion_contains_original_line(seed in any::<u64>(), l in 0usize..4) {
        let (p, q) = (Coeff::ALL[l], Coeff::ALL[l + 4]);
        let (_, c) = random_manifold(&mut rng(seed));
        let n = c.norm();
        let list = complete_pair(&c, p, q).unwrap();
        let on_line = list.iter().any(|m| {
            m.family_alpha.is_some_and(|a| ((m.coefficients.get(p) - c.get(p)) + a * (m.coefficients.get(q) - c.get(q))).norm() < 1e-8 * n)
        });
        prop_assert!(on_line);
    }

    #[test]
    fn reduced_swap_is_covariant(seed in any::<u64>()) {
        let (_, g) = random_reduced(&mut rng(seed));
        let a = reduced_constraint_residuals(&g).max_dcons();
        let b = reduced_constraint_residuals(&g.swapped()).max_dcons();
        prop_assert!(a < 1e-10 && b < 1e-10, "{a} {b}");
    }

    #[test]
    fn spectral_identities(g1 in -3.0f64..3.0, g2 in -3.0f64..3.0, g3 in -3.0f64..3.0) {
        let s = spectral(re(g1), re(g2), re(g3));
        for u in s.u {
            prop_assert!(s.cubic_at(u).norm() < 1e-9 * u.norm().max(1.0).powi(3));
        }
        if let Some(res) = s.identity_residuals() {
            let l = s.lambda.unwrap();
            let scale = (0..3).map(|j| l[j].norm() * s.u[j].norm().max(1.0).powi(2)).fold(1.0, f64::max);
            prop_assert!(res.iter().all(|z| z.norm() < 1e-10 * scale));
        }
    }

    #[test]
    fn scaling_covariance(seed in any::<u64>(), eta in prop::sample::select(vec![0.5f64, 2.0, 0.75, 1.5])) {
        let mut r = rng(seed);
        let (p, _) = random_manifold(&mut r);
        let x0 = [cplx(&mut r, 0.05, 0.5), cplx(&mut r, 0.05, 0.5)];
        let t_star = singularity_time(&IvpSpec::new(p, x0, vec![])).unwrap().earliest.unwrap().norm();
        let t = 0.3 * t_star / (eta * eta).max(1.0);
        let big = solve_ivp(&IvpSpec::new(p, [x0[0] * eta, x0[1] * eta], vec![re(t)])).unwrap();
        let small = solve_ivp(&IvpSpec::new(p, x0, vec![re(eta * eta * t)])).unwrap();
        let (xb, xs) = (big.last_state().unwrap(), small.last_state().unwrap());
        let want = [xs[0] * eta, xs[1] * eta];
        prop_assert!(state_dist(xb, want) < 1e-8 * max_norm(&want).max(1e-300));
    }

    #[test]
    fn implicit_relation_holds_along_trajectory(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (p, _) = random_manifold(&mut r);
        let x0 = [cplx(&mut r, 0.0, 0.7), cplx(&mut r, 0.0, 0.7)];
        let t_star = singularity_time(&IvpSpec::new(p, x0, vec![])).unwrap().earliest.unwrap().norm();
        let tr = solve_ivp(&IvpSpec::new(p, x0, real_grid(0.0, 0.5 * t_star, 25))).unwrap();
        prop_assert!(tr.implicit_residuals.iter().all(|&v| v < 1e-8));
    }
}
