//! Analytic `1/Δθ²` for the input families that admit one.
//!
//! All functions take the photon budget `N` directly, i.e. `M = N/(n_a+n_b)`
//! has already been substituted. Mean photon numbers are real because
//! coherent and squeezed inputs have non-integer means.

use std::f64::consts::{PI, TAU};

use crate::error::{invalid_argument, Error, Result};
use crate::fock::reduce_angle;

/// Fock `|n_a⟩ ⊗ |n_b⟩` input: `N (2 n_a n_b + n_a + n_b) / (2 (n_a + n_b))`.
pub fn fock_inverse_dth2(n_a: u64, n_b: u64, total_photons_n: f64) -> Result<f64> {
    check_budget(total_photons_n)?;
    if n_a + n_b == 0 {
        return Err(Error::ZeroPhotons(
            "n_a = n_b = 0 leaves M undefined".into(),
        ));
    }
    let (na, nb) = (n_a as f64, n_b as f64);
    Ok(total_photons_n * (2.0 * na * nb + na + nb) / (2.0 * (na + nb)))
}

/// Arbitrary mode-a state with a coherent state in mode b:
/// `N (n_b ⟨ΔQ(φ−π/2)²⟩ + n_a) / (2 (n_a + n_b))`.
///
/// `quad_variance` is the mode-a quadrature variance at `β = φ − π/2`.
pub fn general_coherent_b(
    quad_variance: f64,
    n_a: f64,
    n_b: f64,
    total_photons_n: f64,
) -> Result<f64> {
    check_budget(total_photons_n)?;
    if !(quad_variance >= 0.0) {
        return Err(invalid_argument(format!(
            "quadrature variance must be non-negative, got {quad_variance}"
        )));
    }
    check_mean_photons(n_a, "n_a")?;
    check_mean_photons(n_b, "n_b")?;
    if n_a + n_b <= 0.0 {
        return Err(Error::ZeroPhotons("n_a + n_b = 0".into()));
    }
    Ok(total_photons_n * (n_b * quad_variance + n_a) / (2.0 * (n_a + n_b)))
}

/// Squeezed vacuum `z = r e^{iψ}` in mode a, coherent `|b e^{iφ}⟩` in mode b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedConfig {
    r: f64,
    psi: f64,
    phi: f64,
    n_b: f64,
    total_photons_n: f64,
}

impl SqueezedConfig {
    pub fn new(r: f64, psi: f64, phi: f64, n_b: f64, total_photons_n: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(invalid_argument(format!(
                "squeeze magnitude r must be ≥ 0, got {r}"
            )));
        }
        if !psi.is_finite() || !phi.is_finite() {
            return Err(invalid_argument("angles must be finite"));
        }
        check_mean_photons(n_b, "n_b")?;
        check_budget(total_photons_n)?;
        Ok(Self {
            r,
            psi: reduce_angle(psi),
            phi: reduce_angle(phi),
            n_b,
            total_photons_n,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn psi(&self) -> f64 {
        self.psi
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn n_b(&self) -> f64 {
        self.n_b
    }
    pub fn total_photons_n(&self) -> f64 {
        self.total_photons_n
    }

    pub fn with_psi(self, psi: f64) -> Self {
        Self {
            psi: reduce_angle(psi),
            ..self
        }
    }
}

/// `N {n_b [cosh 2r − sinh 2r cos(ψ − 2φ + π)] + sinh² r} / (2 (n_b + sinh² r))`.
pub fn squeezed_inverse_dth2(cfg: &SqueezedConfig) -> Result<f64> {
    let sinh_sq = cfg.r.sinh().powi(2);
    if cfg.n_b + sinh_sq <= 0.0 {
        return Err(Error::ZeroPhotons("n_b = 0 and r = 0".into()));
    }
    let two_r = 2.0 * cfg.r;
    let quad = two_r.cosh() - two_r.sinh() * (cfg.psi - 2.0 * cfg.phi + PI).cos();
    Ok(cfg.total_photons_n * (cfg.n_b * quad + sinh_sq) / (2.0 * (cfg.n_b + sinh_sq)))
}

/// Value at the optimal angle `ψ = 2φ`:
/// `N (n_b e^{2r} + sinh² r) / (2 (n_b + sinh² r))`.
pub fn squeezed_optimal(r: f64, n_b: f64, total_photons_n: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid_argument(format!(
            "squeeze magnitude r must be ≥ 0, got {r}"
        )));
    }
    check_mean_photons(n_b, "n_b")?;
    check_budget(total_photons_n)?;
    let sinh_sq = r.sinh().powi(2);
    if n_b + sinh_sq <= 0.0 {
        return Err(Error::ZeroPhotons("n_b = 0 and r = 0".into()));
    }
    Ok(total_photons_n * (n_b * (2.0 * r).exp() + sinh_sq) / (2.0 * (n_b + sinh_sq)))
}

/// Squeezing angle `ψ = 2φ (mod 2π)` that maximizes [`squeezed_inverse_dth2`].
pub fn optimal_squeezing_angle(phi: f64) -> f64 {
    reduce_angle(2.0 * phi.rem_euclid(TAU))
}

/// Ratio of [`squeezed_optimal`] to the SQL `N/2` with `n_b = 10⁴ sinh² r`;
/// approaches `e^{2r}` as `n_b / sinh² r` grows.
pub fn squeezing_gain_diagnostic(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(invalid_argument("the gain diagnostic needs r > 0"));
    }
    let n_b = 1e4 * r.sinh().powi(2);
    Ok(squeezed_optimal(r, n_b, 2.0)?)
}

/// Standard quantum limit `N/2`.
pub fn standard_quantum_limit(total_photons_n: f64) -> f64 {
    0.5 * total_photons_n
}

fn check_budget(total_photons_n: f64) -> Result<()> {
    if total_photons_n > 0.0 && total_photons_n.is_finite() {
        Ok(())
    } else {
        Err(invalid_argument(format!(
            "total photon budget N must be positive and finite, got {total_photons_n}"
        )))
    }
}

fn check_mean_photons(n: f64, name: &str) -> Result<()> {
    if n >= 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(invalid_argument(format!(
            "{name} must be finite and non-negative, got {n}"
        )))
    }
}
