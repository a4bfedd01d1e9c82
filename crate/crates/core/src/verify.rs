//! Self-checks run by `mzbayes verify`.
//!
//! Each check returns a [`CheckResult`]; failures are reported, never raised.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_form::{
    fock_inverse_dth2, general_coherent_b, squeezed_inverse_dth2, SqueezedConfig,
};
use crate::fock::{
    make_coherent, make_fock, make_squeezed_vacuum, mean_photon_number, quadrature_moments, Cutoff,
    QuadratureSpec,
};
use crate::interferometer::{
    apply_l2, apply_ladders, copies_for_budget, evolve, exact_p_theta, inverse_delta_theta_sq,
    l2_sector_matrix, normal_ordered_residual, tensor, Ladder, NormalOrderedTerms, TwoModeState,
};

/// Relative tolerance of the closed-form oracle grid.
pub const ORACLE_RELATIVE_TOLERANCE: f64 = 1e-8;
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst deviation observed.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn new(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub max_total_photons: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Options for [`run_suite`].
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub max_total_photons: usize,
    pub seed: u64,
    /// Terms used on the right of the normal-ordering identity. Anything but
    /// the default is a fault injected to show that the harness can fail.
    pub identity_terms: NormalOrderedTerms,
}

pub fn run_suite(opts: SuiteOptions) -> VerifyReport {
    let max = opts.max_total_photons.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let checks = vec![
        CheckResult::new(
            "normal_ordered_identity",
            normal_ordered_residual(max, opts.identity_terms),
            IDENTITY_TOLERANCE,
        ),
        CheckResult::new("hermiticity", hermiticity_defect(max), 0.0),
        CheckResult::new(
            "number_conservation",
            number_conservation_defect(max, &mut rng),
            IDENTITY_TOLERANCE,
        ),
        CheckResult::new(
            "unitarity",
            unitarity_defect(max, &mut rng),
            UNITARITY_TOLERANCE,
        ),
        CheckResult::new(
            "reflection_symmetry",
            reflection_defect(max, &mut rng),
            UNITARITY_TOLERANCE,
        ),
        CheckResult::new(
            "closed_form_oracle_grid",
            closed_form_defect(max.min(6), &mut rng),
            ORACLE_RELATIVE_TOLERANCE,
        ),
    ];
    VerifyReport {
        max_total_photons: max,
        seed: opts.seed,
        checks,
    }
}

/// Random normalized state on a random non-empty subset of sectors `0..=max`.
pub fn random_state<R: Rng>(rng: &mut R, max_total_photons: usize, real: bool) -> TwoModeState {
    loop {
        let mut sectors: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for n in 0..=max_total_photons {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let amps = (0..=n)
                .map(|_| {
                    let re = rng.gen_range(-1.0..1.0);
                    let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
                    Complex64::new(re, im)
                })
                .collect();
            sectors.push((n, amps));
        }
        if let Ok(state) = TwoModeState::from_sectors(sectors) {
            return state;
        }
    }
}

fn hermiticity_defect(max: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 0..=max {
        let m = l2_sector_matrix(n);
        for i in 0..=n {
            for j in 0..=n {
                worst = worst.max((m[i][j] - m[j][i].conj()).norm());
            }
        }
    }
    worst
}

/// Applies `L₂ = (a†b − b†a)/2i` built from ladder operators on the full
/// truncated two-mode grid, and measures (a) amplitude leaking out of the
/// input sector and (b) disagreement with the sector engine.
fn number_conservation_defect<R: Rng>(max: usize, rng: &mut R) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let state = random_state(rng, max, false);
        for sector in state.sectors() {
            let n = sector.total();
            // dense grid index (na, nb) with na, nb ≤ max + 1
            let dim = max + 2;
            let mut image = vec![Complex64::new(0.0, 0.0); dim * dim];
            for k in 0..=n {
                let c = sector.amplitude(k);
                for (weight, ops) in [
                    (1.0, [Ladder::ADag, Ladder::B]),
                    (-1.0, [Ladder::BDag, Ladder::A]),
                ] {
                    if let Some((coef, na, nb)) = apply_ladders(&ops, n - k, k) {
                        image[na * dim + nb] += c * coef * weight / Complex64::new(0.0, 2.0);
                    }
                }
            }
            let engine = apply_l2(sector);
            for na in 0..dim {
                for nb in 0..dim {
                    let v = image[na * dim + nb];
                    if na + nb != n {
                        worst = worst.max(v.norm());
                    } else {
                        worst = worst.max((v - engine.amplitude(nb)).norm());
                    }
                }
            }
        }
    }
    worst
}

fn unitarity_defect<R: Rng>(max: usize, rng: &mut R) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..6 {
        let state = random_state(rng, max, false);
        let theta = rng.gen_range(-PI..PI);
        let out = evolve(&state, theta);
        worst = worst.max((out.norm_sqr() - 1.0).abs());
        let p = state.inner(&out).norm_sqr();
        worst = worst.max((p - exact_p_theta(&state, theta)).abs());
    }
    worst
}

fn reflection_defect<R: Rng>(max: usize, rng: &mut R) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..6 {
        let state = random_state(rng, max, true);
        let theta = rng.gen_range(0.0..PI);
        worst = worst.max((exact_p_theta(&state, theta) - exact_p_theta(&state, -theta)).abs());
    }
    worst
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Engine versus closed forms over Fock pairs, coherent pairs and squeezed
/// vacuum with a coherent partner. Returns the worst relative deviation.
fn closed_form_defect<R: Rng>(max_fock: usize, rng: &mut R) -> f64 {
    let n_total = 100.0;
    let mut worst: f64 = 0.0;
    let engine = |state: &TwoModeState| -> f64 {
        let m = copies_for_budget(state, n_total).expect("state has photons");
        inverse_delta_theta_sq(state, m)
            .expect("valid report")
            .inverse_dth2
    };

    for na in 0..=max_fock {
        for nb in 0..=max_fock {
            if na + nb == 0 {
                continue;
            }
            let state = tensor(&make_fock(na, na).unwrap(), &make_fock(nb, nb).unwrap());
            let closed = fock_inverse_dth2(na as u64, nb as u64, n_total).unwrap();
            worst = worst.max(relative(engine(&state), closed));
        }
    }

    for _ in 0..8 {
        let (ba, bb) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
        let (pa, pb) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        let a = make_coherent(ba, pa, Cutoff::Auto).unwrap();
        let b = make_coherent(bb, pb, Cutoff::Auto).unwrap();
        worst = worst.max(relative(engine(&tensor(&a, &b)), n_total / 2.0));
    }

    for r in [0.3, 0.8, 1.2] {
        for b in [1.0, 3.0] {
            let phi = rng.gen_range(0.0..TAU);
            for j in 0..8 {
                let psi = j as f64 * TAU / 8.0;
                let a = make_squeezed_vacuum(r, psi, Cutoff::Auto).unwrap();
                let coh = make_coherent(b, phi, Cutoff::Auto).unwrap();
                let value = engine(&tensor(&a, &coh));

                let cfg = SqueezedConfig::new(r, psi, phi, b * b, n_total).unwrap();
                worst = worst.max(relative(value, squeezed_inverse_dth2(&cfg).unwrap()));

                let var = quadrature_moments(&a, QuadratureSpec::new(phi - PI / 2.0))
                    .unwrap()
                    .variance;
                let general = general_coherent_b(
                    var,
                    mean_photon_number(&a),
                    mean_photon_number(&coh),
                    n_total,
                )
                .unwrap();
                worst = worst.max(relative(value, general));
            }
        }
    }
    worst
}
