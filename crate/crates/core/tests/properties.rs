//! Property tests for the state constructors, the L₂ engine, the closed forms
//! and the posterior.

use std::f64::consts::{PI, TAU};

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mzbayes::closed_form::{
    fock_inverse_dth2, squeezed_inverse_dth2, squeezed_optimal, standard_quantum_limit,
    SqueezedConfig,
};
use mzbayes::fock::{
    make_coherent, make_fock, make_squeezed_vacuum, mean_photon_number, quadrature_moments, Cutoff,
    QuadratureSpec,
};
use mzbayes::interferometer::{
    copies_for_budget, evolve, exact_p_theta, inverse_delta_theta_sq, l2_sector_matrix, tensor,
    L2Spectrum, TwoModeState,
};
use mzbayes::posterior::{
    gaussian_approx, posterior_from_null_results, total_variation_distance, PhaseGrid,
};
use mzbayes::verify::random_state;

fn engine(state: &TwoModeState, total_photons_n: f64) -> f64 {
    let m = copies_for_budget(state, total_photons_n).unwrap();
    inverse_delta_theta_sq(state, m).unwrap().inverse_dth2
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructors_are_normalized(b in 0.0f64..12.0, phi in 0.0..TAU, r in 0.0f64..2.0, psi in 0.0..TAU) {
        let c = make_coherent(b, phi, Cutoff::Auto).unwrap();
        let s = make_squeezed_vacuum(r, psi, Cutoff::Auto).unwrap();
        prop_assert!((c.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(c.tail_mass_bound() < 1e-12 && s.tail_mass_bound() < 1e-12);
    }

    #[test]
    fn coherent_quadratures_have_unit_variance(b in 0.0f64..8.0, phi in 0.0..TAU, beta in -10.0f64..10.0) {
        let c = make_coherent(b, phi, Cutoff::Auto).unwrap();
        let q = quadrature_moments(&c, QuadratureSpec::new(beta)).unwrap();
        prop_assert!((q.variance - 1.0).abs() < 1e-9, "variance {}", q.variance);
        prop_assert!((q.mean - 2.0 * b * (phi - beta).cos()).abs() < 1e-9);
        prop_assert!((mean_photon_number(&c) - b * b).abs() < 1e-9 * (1.0 + b * b));
    }

    #[test]
    fn squeezed_quadrature_variance(r in 0.0f64..1.8, psi in 0.0..TAU, beta in 0.0..TAU) {
        let s = make_squeezed_vacuum(r, psi, Cutoff::Auto).unwrap();
        let var = quadrature_moments(&s, QuadratureSpec::new(beta)).unwrap().variance;
        let expected = (2.0 * r).cosh() - (2.0 * r).sinh() * (psi - 2.0 * beta).cos();
        prop_assert!(rel(var, expected) < 1e-9, "{var} vs {expected}");

        let min = quadrature_moments(&s, QuadratureSpec::new(psi / 2.0)).unwrap().variance;
        prop_assert!(rel(min, (-2.0 * r).exp()) < 1e-9);
        prop_assert!((mean_photon_number(&s) - r.sinh().powi(2)).abs() < 1e-9 * (1.0 + r.sinh().powi(2)));
    }

    #[test]
    fn squeezed_vacuum_has_even_parity(r in 0.05f64..2.0, psi in 0.0..TAU) {
        let s = make_squeezed_vacuum(r, psi, Cutoff::Auto).unwrap();
        for (n, a) in s.amplitudes().iter().enumerate() {
            if n % 2 == 1 {
                prop_assert_eq!(a.norm(), 0.0);
            }
        }
    }

    #[test]
    fn evolution_is_unitary(seed in any::<u64>(), max in 1usize..10, theta in -PI..PI) {
        let state = random_state(&mut ChaCha8Rng::seed_from_u64(seed), max, false);
        let out = evolve(&state, theta);
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!((state.inner(&out).norm_sqr() - exact_p_theta(&state, theta)).abs() < 1e-10);
        let back = evolve(&out, -theta);
        prop_assert!((state.inner(&back).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn real_states_have_symmetric_fringes(seed in any::<u64>(), max in 1usize..10, theta in 0.0..PI) {
        let state = random_state(&mut ChaCha8Rng::seed_from_u64(seed), max, true);
        prop_assert!((exact_p_theta(&state, theta) - exact_p_theta(&state, -theta)).abs() < 1e-10);
    }

    /// `1 − P(θ) = E[1 − cos θD]` with `D = λ − λ'` for independent draws from
    /// the spectral weights, so `P(θ) = 1 − θ²σ² + θ⁴(σ⁴/4 + μ₄/12) + R` with
    /// `|R| ≤ θ⁶E[D⁶]/720 ≤ θ⁶·max²·E[D⁴]/720`, since `|D| ≤ max`.
    #[test]
    fn fringe_matches_moment_expansion(seed in any::<u64>(), max in 1usize..8) {
        let state = random_state(&mut ChaCha8Rng::seed_from_u64(seed), max, false);
        let spectrum = L2Spectrum::new(&state);
        let var = spectrum.central_moment(2);
        let mu4 = spectrum.central_moment(4);
        prop_assume!(var > 1e-3);

        let report = inverse_delta_theta_sq(&state, 1.0).unwrap();
        prop_assert!((report.inverse_dth2 - 2.0 * var).abs() < 1e-10 * (1.0 + var));

        let theta: f64 = 3e-2;
        let quartic = (1.0 - spectrum.p_theta(theta) - theta * theta * var) / theta.powi(4);
        let expected = -(var * var / 4.0 + mu4 / 12.0);
        // E[D⁴] = 2μ₄ + 6σ⁴ = 24|expected|; 1e-14 covers rounding in P(θ)
        let remainder = theta * theta * (max * max) as f64 * 24.0 * expected.abs() / 720.0;
        let bound = remainder + 1e-14 / theta.powi(4);
        prop_assert!((quartic - expected).abs() <= bound, "{quartic} vs {expected}, bound {bound}");
    }

    #[test]
    fn fock_pairs_match_closed_form(na in 0usize..=6, nb in 0usize..=6, n_total in 1.0f64..1e4) {
        prop_assume!(na + nb > 0);
        let state = tensor(&make_fock(na, na).unwrap(), &make_fock(nb, nb).unwrap());
        let closed = fock_inverse_dth2(na as u64, nb as u64, n_total).unwrap();
        prop_assert!(rel(engine(&state, n_total), closed) < 1e-12);
    }

    #[test]
    fn squeezed_coherent_matches_closed_form(
        r in 0.0f64..1.2, psi in 0.0..TAU, phi in 0.0..TAU, b in 0.2f64..4.0,
    ) {
        let state = tensor(
            &make_squeezed_vacuum(r, psi, Cutoff::Auto).unwrap(),
            &make_coherent(b, phi, Cutoff::Auto).unwrap(),
        );
        let cfg = SqueezedConfig::new(r, psi, phi, b * b, 100.0).unwrap();
        let closed = squeezed_inverse_dth2(&cfg).unwrap();
        prop_assert!(rel(engine(&state, 100.0), closed) < 1e-8);
    }

    #[test]
    fn optimal_angle_dominates(r in 0.0f64..2.0, psi in 0.0..TAU, phi in 0.0..TAU, n_b in 0.1f64..1e4) {
        let cfg = SqueezedConfig::new(r, psi, phi, n_b, 1000.0).unwrap();
        let best = squeezed_optimal(r, n_b, 1000.0).unwrap();
        prop_assert!(squeezed_inverse_dth2(&cfg).unwrap() <= best * (1.0 + 1e-12));
        prop_assert!(best <= 1000.0 / 2.0 * (2.0 * r).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn coherent_split_reaches_sql(total in 0.5f64..25.0, split in 0.0f64..1.0, pa in 0.0..TAU, pb in 0.0..TAU) {
        let a = make_coherent((total * split).sqrt(), pa, Cutoff::Auto).unwrap();
        let b = make_coherent((total * (1.0 - split)).sqrt(), pb, Cutoff::Auto).unwrap();
        let value = engine(&tensor(&a, &b), 100.0);
        prop_assert!(rel(value, standard_quantum_limit(100.0)) < 1e-9, "{value}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sectors_are_hermitian(n in 0usize..40) {
        let m = l2_sector_matrix(n);
        for i in 0..=n {
            for j in 0..=n {
                prop_assert_eq!(m[i][j], m[j][i].conj());
            }
        }
    }

    #[test]
    fn posterior_is_normalized_and_peaks_at_zero(na in 1usize..4, nb in 0usize..4, m in 1u64..500) {
        let state = tensor(&make_fock(na, na).unwrap(), &make_fock(nb, nb).unwrap());
        let report = inverse_delta_theta_sq(&state, m as f64).unwrap();
        let grid = PhaseGrid::around_prediction(report.delta_theta).unwrap();
        let post = posterior_from_null_results(&state, m, grid).unwrap();
        prop_assert!((post.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(post.masses().iter().all(|&p| p >= 0.0));
        prop_assert_eq!(post.mode_index(), grid.index_nearest_zero());
        prop_assert!(post.mean().abs() < 1e-9 * report.delta_theta);
    }
}

#[test]
fn posterior_narrows_with_copies() {
    let state = tensor(&make_fock(2, 2).unwrap(), &make_fock(1, 1).unwrap());
    let grid = PhaseGrid::symmetric(1.0, 4001).unwrap();
    let widths: Vec<f64> = [10u64, 40, 160, 640]
        .iter()
        .map(|&m| {
            posterior_from_null_results(&state, m, grid)
                .unwrap()
                .std_dev()
        })
        .collect();
    for w in widths.windows(2) {
        assert!(w[1] < w[0], "{widths:?}");
    }
}

#[test]
fn gaussian_approximation_improves_with_copies() {
    let state = tensor(&make_fock(1, 1).unwrap(), &make_fock(0, 0).unwrap());
    let mut tv = Vec::new();
    for m in [25u64, 100, 400] {
        let report = inverse_delta_theta_sq(&state, m as f64).unwrap();
        let grid = PhaseGrid::around_prediction(report.delta_theta).unwrap();
        let exact = posterior_from_null_results(&state, m, grid).unwrap();
        let gauss = gaussian_approx(&report, grid).unwrap();
        tv.push(total_variation_distance(&exact, &gauss).unwrap());
    }
    assert!(tv[0] >= tv[1] && tv[1] >= tv[2], "{tv:?}");
}

#[test]
fn zero_copies_give_flat_posterior() {
    let state = tensor(&make_fock(1, 1).unwrap(), &make_fock(0, 0).unwrap());
    let grid = PhaseGrid::symmetric(0.5, 101).unwrap();
    let post = posterior_from_null_results(&state, 0, grid).unwrap();
    let d = post.densities();
    for x in &d {
        assert_relative_eq!(*x, d[0], max_relative = 1e-12);
    }
}
