//! Property tests over randomly generated parameters, colligations and
//! Blaschke products. Complex objects are drawn from a seeded generator so a
//! failing case shrinks to a seed and a size.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unitary_schur::colligation::UnitaryColligation;
use unitary_schur::hessenberg::{self, ReflectorBranch};
use unitary_schur::linalg::{self, CMatrix, C64, ONE, ZERO};
use unitary_schur::random;
use unitary_schur::rational::{circle_samples, disc_samples, RationalInner};
use unitary_schur::realization::{self, KernelBasis};
use unitary_schur::redheffer::{self, PartitionedColligation};
use unitary_schur::schur_state;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Block-diagonal colligation whose last `extra` state coordinates are
/// decoupled, hence not minimal when `extra > 0`.
fn padded_colligation(r: &mut ChaCha8Rng, n: usize, extra: usize) -> UnitaryColligation {
    let core = random::haar_unitary(r, n + 1);
    let tail = random::haar_unitary(r, extra);
    let mut m = CMatrix::zeros(n + 1 + extra, n + 1 + extra);
    m.view_mut((0, 0), (n + 1, n + 1)).copy_from(&core);
    m.view_mut((n + 1, n + 1), (extra, extra)).copy_from(&tail);
    UnitaryColligation::new(m).unwrap()
}

/// Numerical rank of the Hankel matrix of Markov parameters `h_{i+j+1}`.
fn hankel_rank(u: &UnitaryColligation, size: usize) -> usize {
    let m = u.markov_parameters(2 * size + 1);
    let h = CMatrix::from_fn(size, size, |i, j| m[i + j + 1]);
    let sv = linalg::singular_values(&h);
    let top = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > 1e-8 * top.max(1e-300)).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parameter_round_trip(seed in any::<u64>(), n in 0usize..=8) {
        let p = random::schur_parameters(&mut rng(seed), n, 0.95);
        let s = RationalInner::from_schur_parameters(&p).unwrap();
        prop_assert_eq!(s.degree(), n);
        let back = s.schur_parameters().unwrap();
        for (a, b) in back.as_slice().iter().zip(p.as_slice()) {
            prop_assert!((a - b).norm() <= 1e-8);
        }
    }

    #[test]
    fn each_transform_drops_degree_by_one(seed in any::<u64>(), n in 1usize..=8) {
        let p = random::schur_parameters(&mut rng(seed), n, 0.9);
        let mut s = RationalInner::from_schur_parameters(&p).unwrap();
        for k in (0..n).rev() {
            let (_, omega) = s.schur_transform().unwrap();
            prop_assert_eq!(omega.degree(), k);
            s = omega;
        }
    }

    #[test]
    fn inverse_transform_preserves_inner(seed in any::<u64>(), n in 0usize..=6) {
        let mut r = rng(seed);
        let p = random::schur_parameters(&mut r, n, 0.9);
        let omega = RationalInner::from_schur_parameters(&p).unwrap();
        let s0 = random::disc_point(&mut r, 0.9);
        let s = RationalInner::inverse_schur_transform(s0, &omega).unwrap();
        prop_assert!(s.is_inner_sampled(1e-10).passed());
    }

    #[test]
    fn blaschke_vanishes_at_zeros(seed in any::<u64>(), n in 1usize..=8) {
        let b = random::blaschke(&mut rng(seed), n, 0.9, 0.01).unwrap();
        let s = b.to_rational();
        for z in b.zeros() {
            prop_assert!(s.eval(*z).unwrap().norm() <= 1e-12);
        }
        // Expanded coefficients lose a little near the circle as the degree
        // grows (up to ~1e-11 at degree 8); up to degree 4 it stays below 1e-12.
        let tolerance = if n <= 4 { 1e-12 } else { unitary_schur::tol::INNER };
        prop_assert!(s.is_inner_sampled(tolerance).passed());
    }

    #[test]
    fn characteristic_function_is_inner(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let u = random::colligation(&mut r, n);
        for _ in 0..100 {
            let z = random::disc_point(&mut r, 0.99);
            prop_assert!(u.characteristic_function(z).unwrap().norm() <= 1.0 + 1e-10);
        }
        for t in circle_samples(64) {
            // roots of unity can sit on an eigenvalue of D only for
            // non-minimal colligations, which Haar samples are not
            let s = u.characteristic_function(t).unwrap();
            prop_assert!((s.norm() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn minimal_exactly_when_degree_is_n(seed in any::<u64>(), n in 1usize..=5, extra in 0usize..=2) {
        let u = padded_colligation(&mut rng(seed), n, extra);
        let report = u.minimality_report();
        prop_assert_eq!(report.rank_controllability, report.rank_observability);
        prop_assert_eq!(report.rank_controllability, report.rank_simplicity);
        prop_assert_eq!(report.rank_simplicity, n);
        prop_assert_eq!(hankel_rank(&u, n + extra), n);
        prop_assert_eq!(u.is_minimal().unwrap(), extra == 0);
    }

    #[test]
    fn gauge_leaves_characteristic_function_invariant(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let u = random::colligation(&mut r, n);
        let v = random::haar_unitary(&mut r, n);
        let g = u.apply_state_gauge(&v).unwrap();
        for z in disc_samples(20) {
            let diff = g.characteristic_function(z).unwrap() - u.characteristic_function(z).unwrap();
            prop_assert!(diff.norm() <= 1e-12);
        }
        let e = u.find_equivalence(&g).unwrap().unwrap();
        prop_assert!(e.residual <= 1e-9);
    }

    #[test]
    fn energy_is_conserved(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let u = random::colligation(&mut r, n);
        let inputs: Vec<C64> = (0..1000).map(|_| random::disc_point(&mut r, 1.0)).collect();
        let sim = u.simulate_time_domain(&inputs, &vec![ZERO; n]).unwrap();
        prop_assert!(sim.energy_defect(&inputs).abs() <= 1e-10);
    }

    #[test]
    fn reduction_properties(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let u = random::colligation(&mut r, n);
        let cert = hessenberg::reduce_to_special_lower_hessenberg(u.matrix()).unwrap();
        prop_assert_eq!(cert.h[(0, 0)], u.matrix()[(0, 0)]);
        prop_assert!(linalg::unitarity_residual(&cert.v) <= 1e-12);
        prop_assert!(cert.reproduction_residual <= 1e-12);
        prop_assert!(hessenberg::is_hl_nonsingular(&cert.h, 1e-12));

        let other = hessenberg::reduce_lower_with(u.matrix(), ReflectorBranch::Householder).unwrap();
        prop_assert!(linalg::max_abs_diff(&cert.h, &other.h) <= 1e-10);

        let h = UnitaryColligation::new(cert.h.clone()).unwrap();
        for z in disc_samples(20) {
            let diff = h.characteristic_function(z).unwrap() - u.characteristic_function(z).unwrap();
            prop_assert!(diff.norm() <= 1e-10);
        }

        let upper = hessenberg::reduce_to_special_upper_hessenberg(u.matrix()).unwrap();
        prop_assert!(upper.structural_residual() <= 1e-12);
        prop_assert!(hessenberg::is_special_lower_hessenberg(&upper.h.adjoint(), 1e-12));
    }

    #[test]
    fn hessenberg_minimality_agrees_with_ranks(seed in any::<u64>(), n in 1usize..=6, extra in 0usize..=2) {
        let u = padded_colligation(&mut rng(seed), n, extra);
        let by_ranks = u.is_minimal().unwrap();
        prop_assert_eq!(hessenberg::hessenberg_minimality(u.matrix()).unwrap(), by_ranks);
    }

    #[test]
    fn coupling_of_inner_factors_is_inner(seed in any::<u64>(), h1 in 0usize..=4, h2 in 0usize..=4) {
        let mut r = rng(seed);
        let u1 = PartitionedColligation::new(1, 1, h1, random::haar_unitary(&mut r, 2 + h1)).unwrap();
        let u2 = random::colligation(&mut r, h2);
        let coupled = redheffer::redheffer_product(&u1, &u2).unwrap();
        prop_assert_eq!(coupled.n(), h1 + h2);
        // energy: a unitary coupled matrix preserves the norm of any vector
        let x = CMatrix::from_fn(1 + h1 + h2, 1, |_, _| random::disc_point(&mut r, 1.0));
        let y = coupled.matrix() * &x;
        prop_assert!((y.norm_squared() - x.norm_squared()).abs() <= 1e-10);
        if coupled.n() > 0 && coupled.is_minimal().unwrap() {
            for t in circle_samples(32) {
                let s = coupled.characteristic_function(t).unwrap();
                prop_assert!((s.norm() - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn inverse_schur_adds_one_to_degree(seed in any::<u64>(), n in 0usize..=6) {
        let mut r = rng(seed);
        let p = random::schur_parameters(&mut r, n, 0.9);
        let u_omega = schur_state::colligation_from_schur_parameters(&p).unwrap();
        let s0 = random::disc_point(&mut r, 0.9);
        let u = redheffer::inverse_schur_colligation(s0, &u_omega).unwrap();
        prop_assert_eq!(u.minimality_report().rank_simplicity, n + 1);
        let omega = RationalInner::from_schur_parameters(&p).unwrap();
        let s = RationalInner::inverse_schur_transform(s0, &omega).unwrap();
        for z in disc_samples(20) {
            prop_assert!((u.characteristic_function(z).unwrap() - s.eval(z).unwrap()).norm() <= 1e-10);
        }
    }

    #[test]
    fn gauge_family_matches_gauge_action(seed in any::<u64>(), k in 1usize..=4) {
        let mut r = rng(seed);
        let u_omega = random::colligation(&mut r, k);
        let s0 = random::disc_point(&mut r, 0.9);
        let eps = random::unimodular(&mut r);
        let v = random::haar_unitary(&mut r, k);
        let report = redheffer::verify_gauge_family(s0, &u_omega, eps, &v, &disc_samples(20)).unwrap();
        prop_assert!(report.closed_form_residual <= 1e-12);
        prop_assert!(report.b_row_residual <= 1e-12);
        prop_assert!(report.invariance_residual <= 1e-11);
    }

    #[test]
    fn nested_matrices_follow_parameter_tails(seed in any::<u64>(), n in 1usize..=8) {
        let p = random::schur_parameters(&mut rng(seed), n, 0.9);
        let u = schur_state::colligation_from_schur_parameters(&p).unwrap();
        let trace = schur_state::schur_algorithm_state_space(&u, false).unwrap();
        for (k, m) in trace.matrices.iter().enumerate() {
            let tail = unitary_schur::SchurParameterSequence::new(p.as_slice()[k..].to_vec()).unwrap();
            prop_assert!(linalg::max_abs_diff(m, &schur_state::closed_form_matrix(&tail)) <= 1e-10);
            if m.nrows() > 1 {
                prop_assert!(hessenberg::is_hl_nonsingular(m, 1e-12));
            }
            // D^p is the lower-right corner of D^0
            let corner = trace.matrices[0].view((k + 1, k + 1), (n - k, n - k)).into_owned();
            let d_p = m.view((1, 1), (n - k, n - k)).into_owned();
            prop_assert!(linalg::max_abs_diff(&corner, &d_p) <= 1e-12);
            prop_assert!((trace.denominators[k][0] - ONE).norm() <= 1e-12);
        }
    }

    #[test]
    fn each_state_step_is_a_function_level_transform(seed in any::<u64>(), n in 1usize..=6) {
        let u = random::colligation(&mut rng(seed), n);
        let trace = schur_state::schur_algorithm_state_space(&u, false).unwrap();
        for p in 0..n {
            let outer = UnitaryColligation::new(trace.matrices[p].clone()).unwrap();
            let inner = UnitaryColligation::new(trace.matrices[p + 1].clone()).unwrap();
            let s0 = trace.parameters[p];
            for z in disc_samples(20) {
                let s = outer.characteristic_function(z).unwrap();
                let omega = (s - s0) / (z * (ONE - s0.conj() * s));
                if z.norm() > 1e-3 {
                    prop_assert!((inner.characteristic_function(z).unwrap() - omega).norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn renormalizing_each_step_changes_nothing(seed in any::<u64>(), n in 1usize..=6) {
        let u = random::colligation(&mut rng(seed), n);
        let once = schur_state::schur_algorithm_state_space(&u, false).unwrap();
        let every = schur_state::schur_algorithm_state_space(&u, true).unwrap();
        for (a, b) in once.parameters.iter().zip(&every.parameters) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn model_realization_properties(seed in any::<u64>(), n in 1usize..=8) {
        let b = random::blaschke(&mut rng(seed), n, 0.9, 0.05).unwrap();
        let basis = KernelBasis::new(b.zeros()).unwrap();
        prop_assert!(basis.min_eigenvalue() > 0.0);
        for j in 0..n {
            for k in 0..n {
                // <e_k, e_j> = e_k(z_j)
                let value = basis.kernel(k, b.zeros()[j]);
                prop_assert!((value - basis.gram()[(j, k)]).norm() <= 1e-12 * value.norm());
            }
        }
        let (u, basis) = realization::model_colligation_with_basis(&b).unwrap();
        let report = realization::verify_realization(&u, &b.to_rational(), &disc_samples(30), Some(&basis)).unwrap();
        prop_assert!(report.transfer_error <= 1e-10);
        prop_assert!(report.resolvent_residual.unwrap() <= 1e-10);
        let ranks = u.minimality_report();
        prop_assert_eq!((ranks.rank_controllability, ranks.rank_observability), (n, n));
    }
}

#[test]
fn perturbed_realization_is_flagged() {
    let mut r = rng(5);
    let b = random::blaschke(&mut r, 4, 0.8, 0.1).unwrap();
    let u = realization::model_colligation(&b).unwrap();
    let noise = CMatrix::from_fn(5, 5, |_, _| random::disc_point(&mut r, 1e-3));
    let perturbed = UnitaryColligation::new(linalg::polar_unitary(&(u.matrix() + noise))).unwrap();
    let report =
        realization::verify_realization(&perturbed, &b.to_rational(), &disc_samples(30), None)
            .unwrap();
    assert!(report.transfer_error > 1e-4, "{}", report.transfer_error);
}

#[test]
fn state_space_parameters_match_function_level_for_fixed_zeros() {
    let b = unitary_schur::BlaschkeProduct::new(ONE, vec![C64::new(0.3, 0.0), C64::new(0.0, -0.4)])
        .unwrap();
    let expected = b.to_rational().schur_parameters().unwrap();
    let u = realization::model_colligation(&b).unwrap();
    let trace = schur_state::schur_algorithm_state_space(&u, false).unwrap();
    for (a, e) in trace.parameters.iter().zip(expected.as_slice()) {
        assert!((a - e).norm() <= 1e-8);
    }
}

#[test]
fn three_parameter_colligation_is_minimal_and_already_reduced() {
    let p = unitary_schur::SchurParameterSequence::new(vec![
        C64::new(0.5, 0.0),
        C64::new(0.0, 0.3),
        ONE,
    ])
    .unwrap();
    let u = schur_state::colligation_from_schur_parameters(&p).unwrap();
    let r = u.minimality_report();
    assert_eq!(
        (
            r.rank_controllability,
            r.rank_observability,
            r.rank_simplicity
        ),
        (2, 2, 2)
    );
    assert!(u.is_minimal().unwrap());
    assert!(hessenberg::hessenberg_minimality(u.matrix()).unwrap());
    let cert = hessenberg::reduce_to_special_lower_hessenberg(u.matrix()).unwrap();
    assert!(linalg::max_abs_diff(&cert.h, u.matrix()) <= 1e-15);
    assert!(linalg::max_abs_diff(&cert.v, &linalg::identity(2)) <= 1e-15);
    let upper = hessenberg::reduce_to_special_upper_hessenberg(&u.matrix().adjoint()).unwrap();
    assert!(linalg::max_abs_diff(&upper.h, &u.matrix().adjoint()) <= 1e-15);

    let trace = schur_state::schur_algorithm_state_space(&u, false).unwrap();
    for (a, e) in trace.parameters.iter().zip(p.as_slice()) {
        assert!((a - e).norm() <= 1e-15);
    }

    // two inverse-Schur steps from the terminal value
    let last = UnitaryColligation::new(CMatrix::from_element(1, 1, ONE)).unwrap();
    let mid = redheffer::inverse_schur_colligation(C64::new(0.0, 0.3), &last).unwrap();
    let top = redheffer::inverse_schur_colligation(C64::new(0.5, 0.0), &mid).unwrap();
    assert!(linalg::max_abs_diff(top.matrix(), u.matrix()) <= 1e-12);
}

#[test]
fn normalize_b_row_keeps_characteristic_function() {
    let mut r = rng(11);
    let u = random::colligation(&mut r, 3);
    let (g, v) = schur_state::normalize_b_row(&u).unwrap();
    assert!(linalg::unitarity_residual(&v) <= 1e-12);
    let delta = (1.0 - u.a().norm_sqr()).sqrt();
    let b = g.b();
    assert!((b[(0, 0)] - C64::new(delta, 0.0)).norm() <= 1e-12);
    assert!(b[(0, 1)].norm() <= 1e-12 && b[(0, 2)].norm() <= 1e-12);
    for z in disc_samples(10) {
        let diff = g.characteristic_function(z).unwrap() - u.characteristic_function(z).unwrap();
        assert!(diff.norm() <= 1e-12);
    }
}

#[test]
fn denominators_of_random_parameters_match_rational() {
    let mut r = rng(13);
    for n in 1..=6 {
        let p = random::schur_parameters(&mut r, n, 0.9);
        let s = RationalInner::from_schur_parameters(&p).unwrap();
        let u = schur_state::colligation_from_schur_parameters(&p).unwrap();
        let chi = &schur_state::schur_algorithm_state_space(&u, false)
            .unwrap()
            .denominators[0];
        for (k, coeff) in chi.iter().enumerate() {
            let expected = s.denominator().get(k).copied().unwrap_or(ZERO);
            assert!((coeff - expected).norm() <= 1e-9);
        }
    }
}

#[test]
fn gauged_colligations_are_found_equivalent_up_to_gauge() {
    let mut r = rng(17);
    let p = random::schur_parameters(&mut r, 4, 0.9);
    let u = schur_state::colligation_from_schur_parameters(&p).unwrap();
    let v0 = random::haar_unitary(&mut r, 4);
    let g = u.apply_state_gauge(&v0).unwrap();
    let e = u.find_equivalence(&g).unwrap().unwrap();
    assert!(e.residual <= 1e-9);
    let different = random::colligation(&mut r, 4);
    assert!(u.find_equivalence(&different).unwrap().is_none());
}
