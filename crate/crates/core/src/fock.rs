//! Single-mode Fock-space states.
//!
//! A [`ModeState`] is a truncated amplitude vector over photon numbers
//! `0..=cutoff`. The built-in constructors pick the cutoff adaptively so that
//! the probability mass discarded by truncation stays below
//! [`TAIL_TOLERANCE`], then renormalize.
//!
//! The quadrature is `Q(β) = e^{-iβ} a + e^{iβ} a†` with no `1/√2` factor, so
//! coherent states (and the vacuum) have unit quadrature variance.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{invalid_argument, Error, Result};

/// Largest probability mass an adaptive cutoff may discard.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// What adaptive cutoffs actually aim for. A 1e-12 tail still shifts
/// `⟨L₂²⟩` of bright states by ~1e-10 relative, so stay well inside the bound.
const AUTO_TAIL_TARGET: f64 = 1e-16;

/// Tolerance on `Σ|amp|² = 1` when an operation validates its input.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Hard ceiling for adaptive cutoffs (about 64 MiB of amplitudes).
pub const MAX_AUTO_CUTOFF: usize = 1 << 22;

/// Truncation rule for a state constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Cutoff {
    /// Grow the basis until the discarded tail mass drops below [`TAIL_TOLERANCE`].
    #[default]
    Auto,
    /// Truncate at this photon number and renormalize.
    Fixed(usize),
}

/// Pure single-mode state over the Fock basis `|0⟩..|cutoff⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    amplitudes: Vec<Complex64>,
    tail_mass_bound: f64,
}

impl ModeState {
    /// Wraps raw amplitudes without normalizing them.
    ///
    /// Operations that need a normalized state check the norm and return
    /// [`Error::InvalidState`] otherwise; call [`ModeState::normalized`] first.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(invalid_argument(
                "a mode state needs at least one amplitude",
            ));
        }
        if amplitudes
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(invalid_argument("amplitudes must be finite"));
        }
        Ok(Self {
            amplitudes,
            tail_mass_bound: 0.0,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            amplitudes: vec![Complex64::new(1.0, 0.0)],
            tail_mass_bound: 0.0,
        }
    }

    /// Rescales to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState(
                "zero vector cannot be normalized".into(),
            ));
        }
        for c in &mut self.amplitudes {
            *c /= norm;
        }
        Ok(self)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// Probability mass discarded by truncation before renormalizing.
    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Photon-number probabilities `|amp_n|²`.
    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes.iter().map(|c| c.norm_sqr())
    }

    pub fn photon_number_variance(&self) -> f64 {
        let mean = mean_photon_number(self);
        self.probabilities()
            .enumerate()
            .map(|(n, p)| (n as f64 - mean).powi(2) * p)
            .sum()
    }

    fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "state norm² is {}, expected 1",
                self.norm_sqr()
            )))
        }
    }
}

/// Quadrature angle β, reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    beta: f64,
}

impl QuadratureSpec {
    pub fn new(beta: f64) -> Self {
        Self {
            beta: reduce_angle(beta),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// First two moments of `Q(β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2π
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Fock state `|n⟩` in a basis truncated at `cutoff`.
pub fn make_fock(n: usize, cutoff: usize) -> Result<ModeState> {
    if n > cutoff {
        return Err(invalid_argument(format!(
            "photon number {n} exceeds cutoff {cutoff}"
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    amplitudes[n] = Complex64::new(1.0, 0.0);
    Ok(ModeState {
        amplitudes,
        tail_mass_bound: 0.0,
    })
}

/// Coherent state `|b e^{iφ}⟩` with real amplitude `b ≥ 0`.
pub fn make_coherent(b: f64, phi: f64, cutoff: Cutoff) -> Result<ModeState> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(invalid_argument(format!(
            "coherent amplitude b must be finite and non-negative, got {b}"
        )));
    }
    if !phi.is_finite() {
        return Err(invalid_argument("coherent phase must be finite"));
    }
    if b == 0.0 {
        return vacuum_with_cutoff(cutoff);
    }

    let mean = b * b;
    let ln_mean = mean.ln();
    let mut ln_fact = LnFactorial::new();
    // ln p_n for the Poisson distribution with mean b²
    let ln_prob = |n: usize, lf: &mut LnFactorial| n as f64 * ln_mean - mean - lf.get(n);

    let (cutoff, tail) = match cutoff {
        Cutoff::Fixed(c) => (c, None),
        Cutoff::Auto => {
            let mut n = 0usize;
            loop {
                // Beyond the mean the terms shrink at least geometrically with
                // ratio b²/(n+2), which bounds the remaining tail.
                if (n + 2) as f64 > mean {
                    let ratio = mean / (n + 2) as f64;
                    let bound = ln_prob(n + 1, &mut ln_fact).exp() / (1.0 - ratio);
                    if bound < AUTO_TAIL_TARGET {
                        break (n, Some(bound));
                    }
                }
                n += 1;
                if n > MAX_AUTO_CUTOFF {
                    return Err(invalid_argument(format!(
                        "coherent amplitude b = {b} needs a cutoff beyond {MAX_AUTO_CUTOFF}"
                    )));
                }
            }
        }
    };

    let amplitudes: Vec<Complex64> = (0..=cutoff)
        .map(|n| {
            let magnitude = (0.5 * ln_prob(n, &mut ln_fact)).exp();
            Complex64::from_polar(magnitude, n as f64 * phi)
        })
        .collect();
    finish_truncated(amplitudes, tail)
}

/// Squeezed vacuum `exp((z* a² − z a†²)/2)|0⟩` with `z = r e^{iψ}`.
///
/// Only even photon numbers are populated:
/// `amp_{2n} = (−e^{iψ} tanh r)^n √((2n)!) / (2^n n! √cosh r)`.
pub fn make_squeezed_vacuum(r: f64, psi: f64, cutoff: Cutoff) -> Result<ModeState> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid_argument(format!(
            "squeeze magnitude r must be finite and non-negative, got {r}"
        )));
    }
    if !psi.is_finite() {
        return Err(invalid_argument("squeeze angle must be finite"));
    }
    if r == 0.0 {
        return vacuum_with_cutoff(cutoff);
    }

    let ln_tanh = r.tanh().ln();
    let ln_cosh = r.cosh().ln();
    let mut ln_fact = LnFactorial::new();
    let ln_prob = |pairs: usize, lf: &mut LnFactorial| {
        let m = pairs as f64;
        -ln_cosh + 2.0 * m * ln_tanh + lf.get(2 * pairs)
            - 2.0 * m * std::f64::consts::LN_2
            - 2.0 * lf.get(pairs)
    };

    let (cutoff, tail) = match cutoff {
        Cutoff::Fixed(c) => (c, None),
        Cutoff::Auto => {
            // p_{2m+2}/p_{2m} < tanh² r, so the tail past 2m is at most p_{2m+2} cosh² r.
            let cosh_sq = r.cosh().powi(2);
            let mut pairs = 0usize;
            loop {
                let bound = ln_prob(pairs + 1, &mut ln_fact).exp() * cosh_sq;
                if bound < AUTO_TAIL_TARGET {
                    break (2 * pairs, Some(bound));
                }
                pairs += 1;
                if 2 * pairs > MAX_AUTO_CUTOFF {
                    return Err(invalid_argument(format!(
                        "squeeze magnitude r = {r} needs a cutoff beyond {MAX_AUTO_CUTOFF}"
                    )));
                }
            }
        }
    };

    let amplitudes: Vec<Complex64> = (0..=cutoff)
        .map(|n| {
            if n % 2 == 1 {
                return Complex64::new(0.0, 0.0);
            }
            let pairs = n / 2;
            let magnitude = (0.5 * ln_prob(pairs, &mut ln_fact)).exp();
            // (−e^{iψ})^m = e^{im(ψ+π)}
            Complex64::from_polar(magnitude, pairs as f64 * (psi + PI))
        })
        .collect();
    finish_truncated(amplitudes, tail)
}

/// `Σ n |amp_n|²`.
pub fn mean_photon_number(state: &ModeState) -> f64 {
    state
        .probabilities()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// Mean and variance of `Q(β) = e^{-iβ} a + e^{iβ} a†`.
pub fn quadrature_moments(state: &ModeState, q: QuadratureSpec) -> Result<QuadratureMoments> {
    state.ensure_normalized()?;
    let psi = state.amplitudes();
    let q_psi = apply_quadrature(psi, q.beta());

    let mean: f64 = psi.iter().zip(&q_psi).map(|(a, b)| (a.conj() * b).re).sum();
    // ‖(Q − ⟨Q⟩)ψ‖², which avoids cancelling ⟨Q²⟩ against ⟨Q⟩²
    let variance = q_psi
        .iter()
        .enumerate()
        .map(|(n, qn)| {
            let shifted = psi.get(n).map_or(*qn, |p| qn - p * mean);
            shifted.norm_sqr()
        })
        .sum();
    Ok(QuadratureMoments { mean, variance })
}

/// `Q(β)ψ`; the result has one more entry than `psi` since `a†` raises the cutoff.
fn apply_quadrature(psi: &[Complex64], beta: f64) -> Vec<Complex64> {
    let lower = Complex64::from_polar(1.0, -beta);
    let raise = Complex64::from_polar(1.0, beta);
    (0..=psi.len())
        .map(|n| {
            let mut out = Complex64::new(0.0, 0.0);
            if let Some(next) = psi.get(n + 1) {
                out += lower * ((n + 1) as f64).sqrt() * next;
            }
            if n >= 1 {
                out += raise * (n as f64).sqrt() * psi[n - 1];
            }
            out
        })
        .collect()
}

fn vacuum_with_cutoff(cutoff: Cutoff) -> Result<ModeState> {
    match cutoff {
        Cutoff::Auto => Ok(ModeState::vacuum()),
        Cutoff::Fixed(c) => make_fock(0, c),
    }
}

/// Renormalizes a truncated expansion of a unit-norm state. Without an
/// analytic tail bound the discarded mass is taken as `1 − Σ|amp|²`.
fn finish_truncated(amplitudes: Vec<Complex64>, tail: Option<f64>) -> Result<ModeState> {
    let retained: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let tail_mass_bound = tail.unwrap_or_else(|| (1.0 - retained).max(0.0));
    ModeState {
        amplitudes,
        tail_mass_bound,
    }
    .normalized()
    .map_err(|_| invalid_argument("cutoff too small: no probability mass retained"))
}

/// Memoized `ln n!`, accumulated as a running sum of logs.
struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    fn new() -> Self {
        Self { table: vec![0.0] }
    }

    fn get(&mut self, n: usize) -> f64 {
        while self.table.len() <= n {
            let k = self.table.len();
            let prev = self.table[k - 1];
            self.table.push(prev + (k as f64).ln());
        }
        self.table[n]
    }
}
