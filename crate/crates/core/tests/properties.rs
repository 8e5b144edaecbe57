//! Property tests across the kernel, SLD, model and measurement layers.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use helstrom::matkernel::{eig_hermitian, sqrt_psd, trace};
use helstrom::measure::{
    fisher_info, info_inequality, optimal_measurement, probs, projective_from_axis, projector_axis, random_povm,
    uniform_attainability,
};
use helstrom::sld::{model_sld, qfi_of, sld_lyapunov, sld_residual, SldMethod};
use helstrom::{BlochVector, ComplexMatrix, DerivativeMethod, PureFamily, QubitModel, WeightFamily, C64};
use proptest::prelude::*;

fn matrix(n: usize, vals: &[f64]) -> ComplexMatrix {
    let zs: Vec<C64> = vals.chunks(2).take(n * n).map(|p| C64::new(p[0], p[1])).collect();
    ComplexMatrix::from_row_major(n, &zs).unwrap()
}

fn hermitian(n: usize, vals: &[f64]) -> ComplexMatrix {
    matrix(n, vals).hermitian_part()
}

fn sized_entries(max_n: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1..=max_n).prop_flat_map(|n| (Just(n), prop::collection::vec(-1.0..1.0f64, 2 * n * n)))
}

/// Rank-`rank` density matrix in dimension `n` and a derivative `i[H, rho]`
/// with no kernel-kernel block.
fn synthetic_state(n: usize, rank: usize, vals: &[f64], weights: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let basis = eig_hermitian(&hermitian(n, &vals[..2 * n * n])).unwrap();
    let total: f64 = weights[..rank].iter().sum();
    let mut rho = ComplexMatrix::zeros(n);
    for (k, w) in weights[..rank].iter().enumerate() {
        let v = basis.eigenvector(k);
        rho = &rho + &ComplexMatrix::outer(&v, &v).scale(w / total);
    }
    let rho = rho.hermitian_part();
    let h = hermitian(n, &vals[2 * n * n..]);
    let comm = &(&h * &rho) - &(&rho * &h);
    (rho, comm.scale_c(C64::new(0.0, 1.0)).hermitian_part())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eig_reconstructs_hermitian((n, vals) in sized_entries(8)) {
        let h = hermitian(n, &vals);
        let eig = eig_hermitian(&h).unwrap();
        let back = eig.map_spectrum(|l| l);
        prop_assert!((&back - &h).frob_norm() <= 1e-12 * h.frob_norm().max(1.0));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let v = &eig.eigenvectors;
        prop_assert!((&(&v.adjoint() * v) - &ComplexMatrix::identity(n)).frob_norm() <= 1e-12);
    }

    #[test]
    fn sqrt_psd_squares_back((n, vals) in sized_entries(8)) {
        let a = matrix(n, &vals);
        let h = (&a * &a.adjoint()).hermitian_part();
        let s = sqrt_psd(&h).unwrap();
        prop_assert!(s.is_hermitian(1e-12));
        prop_assert!((&(&s * &s) - &h).frob_norm() <= 1e-10 * h.frob_norm().max(1.0));
        prop_assert!(eig_hermitian(&s).unwrap().eigenvalues[0] >= 0.0);
    }

    #[test]
    fn trace_is_cyclic(vals in prop::collection::vec(-5.0..5.0f64, 24)) {
        let (a, b, c) = (matrix(2, &vals[..8]), matrix(2, &vals[8..16]), matrix(2, &vals[16..]));
        let lhs = trace(&(&(&a * &b) * &c));
        let rhs = trace(&(&(&b * &c) * &a));
        let scale = a.frob_norm() * b.frob_norm() * c.frob_norm();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn lyapunov_solves_rank_deficient_states(
        n in 2usize..=8,
        rank_frac in 0.0..1.0f64,
        vals in prop::collection::vec(-1.0..1.0f64, 4 * 64),
        weights in prop::collection::vec(0.05..1.0f64, 8),
        kernel_noise in prop::collection::vec(-1.0..1.0f64, 2 * 64),
    ) {
        let rank = 1 + ((n - 1) as f64 * rank_frac) as usize;
        let (rho, d) = synthetic_state(n, rank, &vals[..4 * n * n], &weights);
        let res = sld_lyapunov(&rho, &d).unwrap();
        prop_assert!(res.residual <= 1e-10 * d.frob_norm().max(1.0));
        prop_assert!(trace(&(&rho * &res.l)).norm() <= 1e-10);

        // any Hermitian kernel-block change leaves the information untouched
        let eig = eig_hermitian(&rho).unwrap();
        let mut kernel = ComplexMatrix::zeros(n);
        for k in 0..n - rank {
            let v = eig.eigenvector(k);
            kernel = &kernel + &ComplexMatrix::outer(&v, &v);
        }
        let x = hermitian(n, &kernel_noise[..2 * n * n]);
        let perturbed = &res.l + &(&(&kernel * &x) * &kernel);
        let dq = (qfi_of(&rho, &perturbed) - res.qfi).abs();
        prop_assert!(dq <= 1e-12 * res.qfi.max(1.0), "qfi moved by {:e}", dq);
        prop_assert!(sld_residual(&rho, &d, &perturbed) <= 1e-10 * d.frob_norm().max(1.0));
    }

    #[test]
    fn random_povm_probabilities_sum_to_one(k in 2usize..=6, seed in any::<u64>(), model_seed in any::<u64>()) {
        let povm = random_povm(k, seed).unwrap();
        let (m, t) = common::random_model(&mut common::rng(model_seed));
        let ps = probs(&m.rho(t).unwrap(), &povm).unwrap();
        prop_assert_eq!(ps.len(), k);
        prop_assert!((ps.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert!(info_inequality(&m, t, &povm).unwrap().holds);
    }

    #[test]
    fn sld_properties_on_models(seed in any::<u64>()) {
        let (m, t) = common::random_moving_model(&mut common::rng(seed), false);
        let rho = m.rho(t).unwrap();
        let d = m.drho(t, DerivativeMethod::Analytic).unwrap();
        for method in [SldMethod::Lyapunov, if m.is_pure() { SldMethod::PureClosed } else { SldMethod::MixedClosed }] {
            let r = model_sld(&m, t, method).unwrap();
            prop_assert!(r.residual <= 1e-10 * d.frob_norm().max(1.0));
            prop_assert!(trace(&(&rho * &r.l)).norm() <= 1e-10);
        }
        if m.is_pure() {
            let l = model_sld(&m, t, SldMethod::PureClosed).unwrap().l;
            prop_assert!((&l - &d.scale(2.0)).frob_norm() <= 1e-10);
            prop_assert!((&(&rho * &d) * &rho).frob_norm() <= 1e-10);
        }
    }

    #[test]
    fn optimal_outcomes_are_complementary_projectors(seed in any::<u64>()) {
        let (m, t) = common::random_moving_model(&mut common::rng(seed), false);
        let povm = optimal_measurement(&m, t).unwrap();
        let [a, b] = [&povm.elements()[0].m, &povm.elements()[1].m];
        prop_assert!((&(a * a) - a).frob_norm() <= 1e-10);
        prop_assert!((a * b).frob_norm() <= 1e-10);
        prop_assert!((&(a + b) - &ComplexMatrix::identity(2)).frob_norm() <= 1e-10);
        let chk = info_inequality(&m, t, &povm).unwrap();
        prop_assert!((chk.qfi - chk.fisher).abs() <= 1e-9 * chk.qfi.max(1.0));
    }

    #[test]
    fn pure_plane_axes_attain(seed in any::<u64>(), alpha in 0.0..PI) {
        let mut rng = common::rng(seed);
        let family = common::random_family(&mut rng);
        let t = common::random_theta(&mut rng);
        prop_assume!(family.qfi(t) > 1e-3);
        let m = QubitModel::pure(family);
        let u = family.bloch(t);
        let e = family.bloch_dot(t).normalized();
        let axis = BlochVector::new(
            alpha.cos() * u.0[0] + alpha.sin() * e.0[0],
            alpha.cos() * u.0[1] + alpha.sin() * e.0[1],
            alpha.cos() * u.0[2] + alpha.sin() * e.0[2],
        ).normalized();
        prop_assume!(alpha.sin().abs() > 1e-3);
        let chk = info_inequality(&m, t, &projective_from_axis(&axis).unwrap()).unwrap();
        prop_assert!((chk.fisher - chk.qfi).abs() <= 1e-9, "fisher {} qfi {}", chk.fisher, chk.qfi);
    }

    #[test]
    fn mixed_plane_axes_fall_short(
        w in prop_oneof![0.05..0.45f64, 0.55..0.95f64],
        t in -PI..PI,
        delta in prop_oneof![0.05..FRAC_PI_2 - 0.05, FRAC_PI_2 + 0.05..PI - 0.05],
    ) {
        let m = QubitModel::mixed(PureFamily::xz_circle(), WeightFamily::Const { value: w });
        let axis = BlochVector::new((t + delta).sin(), 0.0, (t + delta).cos());
        let chk = info_inequality(&m, t, &projective_from_axis(&axis).unwrap()).unwrap();
        prop_assert!(chk.fisher < chk.qfi - 1e-6, "fisher {} qfi {}", chk.fisher, chk.qfi);
    }
}

/// Sparse and rank-one Hermitian matrices, which random dense draws rarely hit.
#[test]
fn eig_reconstructs_structured_matrices() {
    use rand::Rng;
    let mut rng = common::rng(77);
    let mut worst: f64 = 0.0;
    for trial in 0..6000 {
        let n = rng.gen_range(2..=8);
        let mut entry = || {
            let mut x = || if trial % 2 == 0 && rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(-1.0..1.0) };
            C64::new(x(), x())
        };
        let zs: Vec<C64> = (0..n * n).map(|_| entry()).collect();
        let a = ComplexMatrix::from_row_major(n, &zs).unwrap();
        let h = if trial % 3 == 0 {
            let col: Vec<C64> = (0..n).map(|i| a[(i, 0)]).collect();
            ComplexMatrix::outer(&col, &col).hermitian_part()
        } else {
            a.hermitian_part()
        };
        let eig = eig_hermitian(&h).unwrap();
        let err = (&eig.map_spectrum(|l| l) - &h).frob_norm() / h.frob_norm().max(1.0);
        worst = worst.max(err);
    }
    assert!(worst <= 1e-12, "worst relative reconstruction error {worst:e}");
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64).collect()
}

#[test]
fn uniform_pure_models_attain_with_one_fixed_axis() {
    let g = grid(24);
    let mid = g[g.len() / 2];
    for family in [
        PureFamily::xz_circle(),
        PureFamily::longitude(FRAC_PI_2),
        PureFamily::colatitude(0.7),
    ] {
        let m = QubitModel::pure(family);
        assert!(uniform_attainability(&m, &g).unwrap().uniform);
        let axis = projector_axis(&optimal_measurement(&m, mid).unwrap()).unwrap();
        let povm = projective_from_axis(&axis).unwrap();
        let mut checked = 0;
        for &t in &g {
            if (family.bloch(t).dot(&axis).abs() - 1.0).abs() <= 1e-6 {
                continue;
            }
            let chk = info_inequality(&m, t, &povm).unwrap();
            assert!((chk.fisher - chk.qfi).abs() <= 1e-8, "{family:?} θ={t}: {} vs {}", chk.fisher, chk.qfi);
            checked += 1;
        }
        assert!(checked >= 20);
    }
}

#[test]
fn uniform_mixed_great_circle_needs_a_moving_axis() {
    let g = grid(24);
    let mid = g[g.len() / 2];
    let m = QubitModel::mixed(PureFamily::xz_circle(), WeightFamily::Const { value: 0.75 });
    assert!(uniform_attainability(&m, &g).unwrap().uniform);
    let axis = projector_axis(&optimal_measurement(&m, mid).unwrap()).unwrap();
    let povm = projective_from_axis(&axis).unwrap();
    let rho = m.rho(mid + 0.5).unwrap();
    let d = m.drho(mid + 0.5, DerivativeMethod::Analytic).unwrap();
    let fisher = fisher_info(&d, &rho, &povm).unwrap();
    // the fixed axis is 0.5 rad away from perpendicular to the Bloch vector
    let delta = FRAC_PI_2 - 0.5;
    let expected = 0.25 * delta.sin().powi(2) / (1.0 - 0.25 * delta.cos().powi(2));
    assert!((fisher - expected).abs() <= 1e-10);
    assert!(fisher < 0.25 - 1e-3);
}
