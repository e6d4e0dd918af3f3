mod common;

use common::*;
use mor_core::bt_dense::{gramians_dense, DEFAULT_DENSE_CAP};
use mor_core::eksm::*;
use mor_core::model::{DescriptorSystem, ParameterKind};
use mor_core::synth::random_dissipative_system;
use mor_core::MorError;
use nalgebra::{dmatrix, DMatrix};
use proptest::prelude::*;

const FORMULATIONS: [Formulation; 2] = [Formulation::Symmetrized, Formulation::Descriptor];
const SIDES: [Side; 2] = [Side::Controllability, Side::Observability];

fn relative_gramian_error(z: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    (z * z.transpose() - p).norm() / p.norm()
}

#[test]
fn scalar_operator_applies() {
    let sys = scalar(-1.0, 2.0, 1.0, 1.0);
    for f in FORMULATIONS {
        let op = build_operator(&sys, Side::Controllability, f).unwrap();
        let v = dmatrix![1.0];
        assert!((op.apply(&v)[(0, 0)] + 0.5).abs() < 1e-15);
        assert!((op.apply_inv(&v)[(0, 0)] + 2.0).abs() < 1e-15);
    }
}

#[test]
fn observability_rhs_is_output_transpose() {
    let sys = scalar(-1.0, 1.0, 1.0, 1.0);
    let op = build_operator(&sys, Side::Observability, Formulation::Descriptor).unwrap();
    assert_eq!(op.rhs(), &dmatrix![1.0]);
    let op = build_operator(&sys, Side::Observability, Formulation::Symmetrized).unwrap();
    assert_eq!(op.rhs(), &dmatrix![1.0]);
}

#[test]
fn forward_and_inverse_round_trip() {
    let sys = random_dissipative_system(50, 2, 4).unwrap();
    let probes = DMatrix::from_fn(50, 3, |i, j| ((i * 3 + j * 7) as f64).sin());
    for f in FORMULATIONS {
        for side in SIDES {
            let op = build_operator(&sys, side, f).unwrap();
            let back = op.apply(&op.apply_inv(&probes));
            assert!((back - &probes).norm() <= 1e-10 * probes.norm(), "{f:?} {side:?}");
        }
    }
}

#[test]
fn symmetrized_operator_is_similar_to_state_matrix() {
    // R⁻¹ G R⁻ᵀ = Rᵀ (C⁻¹G) R⁻ᵀ, so both operators share a spectrum.
    let sys = random_dissipative_system(12, 1, 8).unwrap();
    let (a, _) = state_space(&sys);
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let mut e1: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.re).collect();
    let mut e2: Vec<f64> = op.to_dense().complex_eigenvalues().iter().map(|z| z.re).collect();
    e1.sort_by(f64::total_cmp);
    e2.sort_by(f64::total_cmp);
    for (x, y) in e1.iter().zip(&e2) {
        assert!((x - y).abs() <= 1e-10 * a.norm());
    }
    let dense = op.to_dense();
    let sym = &dense + dense.transpose();
    assert!(sym.symmetric_eigenvalues().max() < 0.0, "dissipative after symmetrization");
}

#[test]
fn singular_matrices_are_named() {
    let sys = DescriptorSystem::from_dense(
        &dmatrix![-1.0, 0.0; 0.0, 0.0],
        &DMatrix::identity(2, 2),
        &dmatrix![1.0; 1.0],
        &dmatrix![1.0, 1.0],
        ParameterKind::Impedance,
    )
    .unwrap();
    match build_operator(&sys, Side::Controllability, Formulation::Symmetrized) {
        Err(MorError::Singular { name, .. }) => assert_eq!(name, "G"),
        other => panic!("unexpected {:?}", other.err()),
    }
}

#[test]
fn scalar_basis_deflates_to_one_column() {
    let sys = scalar(-1.0, 1.0, 1.0, 1.0);
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let mut state = initialize_basis(&op).unwrap();
    assert_eq!(state.basis_size(), 1);
    assert!((state.basis()[(0, 0)].abs() - 1.0).abs() < 1e-15);
    assert_eq!(extend_basis(&mut state, &op).unwrap(), Extension::Stagnated);
}

#[test]
fn two_inputs_give_four_orthonormal_columns() {
    let sys = random_dissipative_system(30, 2, 1).unwrap();
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let state = initialize_basis(&op).unwrap();
    assert_eq!(state.basis_size(), 4);
    assert!(orthonormality_error(state.basis()) <= 1e-12);
}

#[test]
fn repeated_input_columns_deflate() {
    let base = random_dissipative_system(20, 1, 2).unwrap();
    let b = base.b().to_dense();
    let b2 = DMatrix::from_fn(20, 2, |i, _| b[(i, 0)]);
    let sys = DescriptorSystem::from_dense(&base.g().to_dense(), &base.c().to_dense(), &b2, &b2.transpose(), ParameterKind::Impedance).unwrap();
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let state = initialize_basis(&op).unwrap();
    assert!(state.basis_size() <= 3);
    assert!(state.deflated() >= 1);
}

#[test]
fn zero_input_is_no_excitation() {
    let sys = DescriptorSystem::from_dense(
        &dmatrix![-1.0],
        &dmatrix![1.0],
        &dmatrix![0.0],
        &dmatrix![1.0],
        ParameterKind::Generic,
    )
    .unwrap();
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    assert!(matches!(initialize_basis(&op), Err(MorError::NoExcitation)));
}

#[test]
fn diagonal_extension_adds_two_columns() {
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(10, |i, _| -(1.0 + i as f64)));
    let b = DMatrix::from_element(10, 1, 1.0);
    let sys = DescriptorSystem::from_dense(&a, &DMatrix::identity(10, 10), &b, &b.transpose(), ParameterKind::Impedance).unwrap();
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let mut state = initialize_basis(&op).unwrap();
    let old = state.basis().clone();
    assert_eq!(extend_basis(&mut state, &op).unwrap(), Extension::Extended(2));
    assert_eq!(state.basis_size(), 4);
    assert_eq!(state.iteration(), 2);
    assert!(orthonormality_error(state.basis()) <= 1e-12);
    // Append-only: the old basis is a prefix of the new one.
    assert_eq!(state.basis().columns(0, 2), old.columns(0, 2));
    // The new block spans A b and A⁻² b modulo the old basis.
    let k = state.basis();
    let d = a.diagonal();
    let ab = DMatrix::from_fn(10, 1, |i, _| d[i]);
    let a2b = DMatrix::from_fn(10, 1, |i, _| 1.0 / (d[i] * d[i]));
    for v in [ab, a2b] {
        let resid = &v - k * k.tr_mul(&v);
        assert!(resid.norm() <= 1e-12 * v.norm());
    }
}

#[test]
fn scalar_projection_and_residual() {
    let sys = scalar(-1.0, 1.0, 1.0, 1.0);
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let state = initialize_basis(&op).unwrap();
    assert_eq!(state.projected_matrix(), &dmatrix![-1.0]);
    assert_eq!(state.projected_rhs().abs(), dmatrix![1.0]);
    let x = project_and_solve(&state).unwrap();
    assert!((x[(0, 0)] - 0.5).abs() < 1e-15);
    assert_eq!(residual_norm(&state, &x, &op), 0.0);
}

#[test]
fn full_subspace_reproduces_dense_gramian() {
    let sys = random_dissipative_system(5, 1, 3).unwrap();
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let mut state = initialize_basis(&op).unwrap();
    while state.basis_size() < 5 {
        assert!(matches!(extend_basis(&mut state, &op).unwrap(), Extension::Extended(_)));
    }
    let k = state.basis();
    assert!(orthonormality_error(k) <= 1e-12);
    let x = project_and_solve(&state).unwrap();
    let p_hat = lyapunov_kron(&op.to_dense(), op.rhs());
    assert!((&x - k.transpose() * &p_hat * k).norm() <= 1e-10 * p_hat.norm());
    assert!(residual_norm(&state, &x, &op) <= 1e-12);
}

#[test]
fn projected_ladder_equation_is_solved() {
    let sys = ladder(1, 3, 5);
    assert_eq!(sys.order(), 10);
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let mut state = initialize_basis(&op).unwrap();
    extend_basis(&mut state, &op).unwrap();
    assert_eq!(state.iteration(), 2);
    let x = project_and_solve(&state).unwrap();
    let a = state.projected_matrix();
    let r = state.projected_rhs();
    assert!(lyapunov_residual(a, r, &x) <= 1e-12);
}

/// Dense assembly of `‖G_C K X Kᵀ + K X Kᵀ G_Cᵀ + B_C B_Cᵀ‖_F / ‖B_C B_Cᵀ‖_F`.
fn assembled_residual(state: &EksState, x: &DMatrix<f64>, op: &OperatorPair) -> f64 {
    let a = op.to_dense();
    let k = state.basis().columns(0, x.nrows()).into_owned();
    let p = &k * x * k.transpose();
    lyapunov_residual(&a, op.rhs(), &p)
}

#[test]
fn factored_residual_matches_dense_assembly() {
    for (sys, label) in [
        (random_dissipative_system(20, 1, 6).unwrap(), "random p=1"),
        (random_dissipative_system(20, 2, 7).unwrap(), "random p=2"),
        (ladder(2, 4, 1), "ladder"),
    ] {
        for f in FORMULATIONS {
            for side in SIDES {
                let op = build_operator(&sys, side, f).unwrap();
                let mut state = initialize_basis(&op).unwrap();
                for _ in 0..3 {
                    let x = match project_and_solve(&state) {
                        Ok(x) => x,
                        Err(MorError::ProjectedUnstable { .. }) => break,
                        Err(e) => panic!("{e}"),
                    };
                    let fast = residual_norm(&state, &x, &op);
                    let slow = assembled_residual(&state, &x, &op);
                    assert!(
                        (fast - slow).abs() <= 1e-12 * slow.max(1.0),
                        "{label} {f:?} {side:?} j={}: {fast} vs {slow}",
                        state.iteration()
                    );
                    if extend_basis(&mut state, &op).unwrap() == Extension::Stagnated {
                        break;
                    }
                }
            }
        }
    }
}

#[test]
fn scalar_factor() {
    let sys = scalar(-1.0, 1.0, 1.0, 1.0);
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let f = eksm_solve(&op, &EksmOptions::default()).unwrap();
    assert!(f.converged);
    assert_eq!(f.rank(), 1);
    assert!((f.z[(0, 0)].abs() - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn ladder_gramians_match_dense_oracle() {
    let sys = ladder(1, 33, 12);
    assert_eq!(sys.order(), 100);
    let dense = gramians_dense(&sys, DEFAULT_DENSE_CAP).unwrap();
    let factors = std::sync::Arc::new(SystemFactors::new(&sys, Formulation::Symmetrized).unwrap());
    for (side, oracle) in [(Side::Controllability, &dense.p), (Side::Observability, &dense.q)] {
        let op = OperatorPair::new(factors.clone(), side);
        let f = eksm_solve(&op, &EksmOptions { tol: 1e-10, maxiter: 100 }).unwrap();
        assert!(f.converged, "{side:?} residual {}", f.residual);
        assert!(f.residual <= 1e-10);
        let err = relative_gramian_error(&f.z, oracle);
        assert!(err <= 1e-8, "{side:?}: {err:e}");
        assert!(f.rank() <= 2 * f.iterations);
        assert!(f.rank() <= f.basis_size);
    }
}

#[test]
fn descriptor_formulation_agrees_on_rc_model() {
    // The literal formulation reaches the same Gramian on an RC model.
    let sys = rc_ladder(30);
    let dense = gramians_dense(&sys, DEFAULT_DENSE_CAP).unwrap();
    for (side, oracle) in [(Side::Controllability, &dense.p), (Side::Observability, &dense.q)] {
        let op = build_operator(&sys, side, Formulation::Descriptor).unwrap();
        match eksm_solve(&op, &EksmOptions::default()) {
            Ok(f) => {
                assert!(f.converged);
                let err = relative_gramian_error(&f.z, oracle);
                assert!(err <= 1e-8, "{side:?}: {err:e}");
            }
            Err(e) => panic!("{side:?}: {e}"),
        }
    }
}

#[test]
fn unstable_projection_reports_iteration() {
    // Stable but far from normal: the first projection lands in the part of
    // the field of values with positive real part.
    let a = dmatrix![-1.0, 10.0, 0.0; 0.0, -1.0, 10.0; 0.0, 0.0, -1.0];
    let b = dmatrix![1.0; 4.0; 4.0];
    let sys = DescriptorSystem::from_dense(&a, &DMatrix::identity(3, 3), &b, &b.transpose(), ParameterKind::Generic).unwrap();
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    match eksm_solve(&op, &EksmOptions::default()) {
        Err(MorError::ProjectedUnstable { iteration, .. }) => assert_eq!(iteration, 1),
        other => panic!("unexpected {:?}", other.map(|f| f.residual)),
    }
}

#[test]
fn maxiter_exhaustion_returns_best_iterate() {
    let sys = ladder(2, 40, 3);
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    let f = eksm_solve(&op, &EksmOptions { tol: 1e-10, maxiter: 3 }).unwrap();
    assert!(!f.converged);
    assert_eq!(f.iterations, 3);
    assert_eq!(f.residual_history.len(), 3);
    let best = f.residual_history.iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(f.residual, best);
    assert!(f.rank() <= f.basis_size);
}

#[test]
fn invalid_options_are_rejected() {
    let sys = scalar(-1.0, 1.0, 1.0, 1.0);
    let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
    assert!(matches!(eksm_solve(&op, &EksmOptions { tol: 0.0, maxiter: 10 }), Err(MorError::InvalidArgument(_))));
    assert!(matches!(eksm_solve(&op, &EksmOptions { tol: 1e-10, maxiter: 0 }), Err(MorError::InvalidArgument(_))));
}

#[test]
fn progress_reports_every_iteration() {
    let sys = ladder(1, 10, 2);
    let op = build_operator(&sys, Side::Observability, Formulation::Symmetrized).unwrap();
    let seen = std::sync::Mutex::new(Vec::new());
    let f = eksm_solve_with_progress(&op, &EksmOptions::default(), &|p| seen.lock().unwrap().push(*p)).unwrap();
    let seen = seen.into_inner().unwrap();
    assert_eq!(seen.len(), f.iterations);
    assert!(seen.iter().all(|p| p.side == Side::Observability));
    assert_eq!(seen.iter().map(|p| p.residual).collect::<Vec<_>>(), f.residual_history);
    assert!(seen.windows(2).all(|w| w[1].basis_size > w[0].basis_size));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basis_stays_orthonormal(n in 8usize..40, p in 1usize..4, seed in 0u64..1000) {
        let sys = random_dissipative_system(n, p, seed).unwrap();
        let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
        let mut state = initialize_basis(&op).unwrap();
        prop_assert!(state.basis_size() <= 2 * p);
        for _ in 0..6 {
            prop_assert!(orthonormality_error(state.basis()) <= 1e-10);
            prop_assert!(state.basis_size() <= 2 * p * state.iteration());
            if extend_basis(&mut state, &op).unwrap() == Extension::Stagnated {
                break;
            }
        }
    }

    #[test]
    fn exhausting_the_space_is_exact(n in 3usize..12, p in 1usize..3, seed in 0u64..1000) {
        let sys = random_dissipative_system(n, p, seed).unwrap();
        let dense = gramians_dense(&sys, DEFAULT_DENSE_CAP).unwrap();
        let op = build_operator(&sys, Side::Controllability, Formulation::Symmetrized).unwrap();
        let f = eksm_solve(&op, &EksmOptions { tol: 1e-14, maxiter: n }).unwrap();
        if f.basis_size == n {
            prop_assert!(relative_gramian_error(&f.z, &dense.p) <= 1e-10);
        }
    }

    #[test]
    fn converged_factors_approximate_the_gramian(sections in 5usize..30, lines in 1usize..3, seed in 0u64..1000) {
        let sys = ladder(lines, sections, seed);
        let dense = gramians_dense(&sys, DEFAULT_DENSE_CAP).unwrap();
        let tol = 1e-10;
        for (side, oracle) in [(Side::Controllability, &dense.p), (Side::Observability, &dense.q)] {
            let op = build_operator(&sys, side, Formulation::Symmetrized).unwrap();
            let f = eksm_solve(&op, &EksmOptions { tol, maxiter: 100 }).unwrap();
            prop_assert!(f.converged);
            prop_assert!(relative_gramian_error(&f.z, oracle) <= 100.0 * tol);
        }
    }
}
