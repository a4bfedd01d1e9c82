//! Two-mode engine for the interferometer generator
//! `L₂ = (a†b − b†a) / 2i`.
//!
//! `a†b` and `b†a` both conserve the total photon number, so `L₂` is block
//! diagonal over sectors of fixed `n = n_a + n_b`. Sector `n` has the basis
//! `|n−k⟩_a ⊗ |k⟩_b` for `k = 0..=n`, and within it `L₂` is tridiagonal:
//!
//! ```text
//! (L₂ψ)_j = −(i/2) (c_{j+1} ψ_{j+1} − c_j ψ_{j−1}),   c_k = √((n−k+1) k)
//! ```
//!
//! Conjugating by `D = diag(i^k)` turns the sector block into a real
//! symmetric tridiagonal matrix with off-diagonal `c_k / 2`, which is what
//! [`L2Spectrum`] diagonalizes to evaluate `e^{iθL₂}` exactly.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{invalid_argument, Error, Result};
use crate::fock::{ModeState, NORM_TOLERANCE};

/// Mass trimmed from each end of a single-mode amplitude vector before the
/// tensor product is formed.
const SUPPORT_TRIM: f64 = 1e-16;

/// Upper bound on the total probability mass discarded as whole sectors.
pub const SECTOR_DROP_TOLERANCE: f64 = 1e-10;

/// Mass actually dropped. Sector contributions to `⟨L₂²⟩` grow like `n²`, so
/// the drop budget is kept well below [`SECTOR_DROP_TOLERANCE`] to hold
/// `1/Δθ²` to about 1e-10 relative.
const SECTOR_DROP_BUDGET: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitudes of one total-photon-number sector.
///
/// Only the window `offset..offset + amplitudes.len()` of the full
/// `n + 1` basis is stored; everything outside it is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    total: usize,
    offset: usize,
    amplitudes: Vec<Complex64>,
}

impl Sector {
    fn new(total: usize, offset: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert!(offset + amplitudes.len() <= total + 1);
        Self {
            total,
            offset,
            amplitudes,
        }
    }

    /// Total photon number `n` of the sector.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Index `k` (photons in mode b) of the first stored amplitude.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn stored(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of `|n−k⟩_a ⊗ |k⟩_b`.
    pub fn amplitude(&self, k: usize) -> Complex64 {
        k.checked_sub(self.offset)
            .and_then(|i| self.amplitudes.get(i).copied())
            .unwrap_or(ZERO)
    }

    /// Dense amplitude vector of length `n + 1`.
    pub fn to_dense(&self) -> Vec<Complex64> {
        (0..=self.total).map(|k| self.amplitude(k)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    fn indexed(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.offset + i, *c))
    }

    fn inner(&self, other: &Sector) -> Complex64 {
        debug_assert_eq!(self.total, other.total);
        self.indexed()
            .map(|(k, c)| c.conj() * other.amplitude(k))
            .sum()
    }
}

/// Pure two-mode state stored sector by sector.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    sectors: BTreeMap<usize, Sector>,
    retained_mass: f64,
}

impl TwoModeState {
    /// Builds a state from dense sector vectors `(n, amplitudes)` where each
    /// vector has length `n + 1`, then normalizes it.
    pub fn from_sectors<I>(sectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Vec<Complex64>)>,
    {
        let mut map = BTreeMap::new();
        for (n, amps) in sectors {
            if amps.len() != n + 1 {
                return Err(invalid_argument(format!(
                    "sector {n} needs {} amplitudes, got {}",
                    n + 1,
                    amps.len()
                )));
            }
            if map.insert(n, Sector::new(n, 0, amps)).is_some() {
                return Err(invalid_argument(format!("sector {n} given twice")));
            }
        }
        let mass: f64 = map.values().map(Sector::norm_sqr).sum();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidState(
                "state has no finite non-zero norm".into(),
            ));
        }
        let mut state = Self {
            sectors: map,
            retained_mass: 1.0,
        };
        state.scale(1.0 / mass.sqrt());
        Ok(state)
    }

    pub fn sectors(&self) -> impl Iterator<Item = &Sector> {
        self.sectors.values()
    }

    pub fn sector(&self, total: usize) -> Option<&Sector> {
        self.sectors.get(&total)
    }

    /// Probability mass kept when the state was built, before renormalizing.
    pub fn retained_mass(&self) -> f64 {
        self.retained_mass
    }

    pub fn max_total_photons(&self) -> usize {
        self.sectors.keys().next_back().copied().unwrap_or(0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sectors.values().map(Sector::norm_sqr).sum()
    }

    /// Mean photon numbers `(⟨a†a⟩, ⟨b†b⟩)`.
    pub fn mean_photons(&self) -> (f64, f64) {
        let mut na = 0.0;
        let mut nb = 0.0;
        for s in self.sectors.values() {
            for (k, c) in s.indexed() {
                let p = c.norm_sqr();
                na += (s.total - k) as f64 * p;
                nb += k as f64 * p;
            }
        }
        (na, nb)
    }

    pub fn mean_total_photons(&self) -> f64 {
        let (na, nb) = self.mean_photons();
        na + nb
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &TwoModeState) -> Complex64 {
        self.sectors
            .iter()
            .filter_map(|(n, s)| other.sectors.get(n).map(|o| s.inner(o)))
            .sum()
    }

    /// True if every amplitude has zero imaginary part.
    pub fn has_real_amplitudes(&self) -> bool {
        self.sectors
            .values()
            .all(|s| s.amplitudes.iter().all(|c| c.im == 0.0))
    }

    fn scale(&mut self, factor: f64) {
        for s in self.sectors.values_mut() {
            for c in &mut s.amplitudes {
                *c *= factor;
            }
        }
    }

    fn ensure_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() <= NORM_TOLERANCE {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "two-mode norm² is {n}, expected 1"
            )))
        }
    }
}

/// Direct product `|a⟩ ⊗ |b⟩` regrouped into total-photon-number sectors.
///
/// Negligible edges of each input are trimmed, and the lightest sectors are
/// dropped while their cumulative mass stays far below [`SECTOR_DROP_TOLERANCE`].
/// The result is renormalized; the kept mass is recorded.
pub fn tensor(a_state: &ModeState, b_state: &ModeState) -> TwoModeState {
    let a = a_state.amplitudes();
    let b = b_state.amplitudes();
    let (a_lo, a_hi) = support(a);
    let (b_lo, b_hi) = support(b);

    let mut candidates: Vec<(Sector, f64)> = Vec::with_capacity(a_hi - a_lo + b_hi - b_lo + 1);
    for n in (a_lo + b_lo)..=(a_hi + b_hi) {
        let k_lo = b_lo.max(n.saturating_sub(a_hi));
        let k_hi = b_hi.min(n - a_lo);
        let amps: Vec<Complex64> = (k_lo..=k_hi).map(|k| a[n - k] * b[k]).collect();
        let sector = Sector::new(n, k_lo, amps);
        let mass = sector.norm_sqr();
        candidates.push((sector, mass));
    }

    let total_mass: f64 = candidates.iter().map(|(_, m)| m).sum();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| candidates[i].1.total_cmp(&candidates[j].1).then(i.cmp(&j)));
    let mut keep = vec![true; candidates.len()];
    let mut dropped = 0.0;
    for i in order {
        let m = candidates[i].1;
        if dropped + m >= SECTOR_DROP_BUDGET * total_mass {
            break;
        }
        dropped += m;
        keep[i] = false;
    }

    let sectors: BTreeMap<usize, Sector> = candidates
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|((s, _), _)| (s.total, s))
        .collect();
    let retained: f64 = sectors.values().map(Sector::norm_sqr).sum();
    let mut state = TwoModeState {
        sectors,
        retained_mass: retained,
    };
    state.scale(1.0 / retained.sqrt());
    state
}

/// Index range holding all but [`SUPPORT_TRIM`] of the mass at either end.
fn support(amps: &[Complex64]) -> (usize, usize) {
    let total: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let limit = SUPPORT_TRIM * total;
    let mut lo = 0;
    let mut acc = 0.0;
    while lo + 1 < amps.len() && acc + amps[lo].norm_sqr() < limit {
        acc += amps[lo].norm_sqr();
        lo += 1;
    }
    let mut hi = amps.len() - 1;
    acc = 0.0;
    while hi > lo && acc + amps[hi].norm_sqr() < limit {
        acc += amps[hi].norm_sqr();
        hi -= 1;
    }
    (lo, hi)
}

/// `c_k = √((n−k+1) k)`, the matrix element of `a†b` from `k` to `k−1`.
#[inline]
fn hop(total: usize, k: usize) -> f64 {
    (((total + 1 - k) * k) as f64).sqrt()
}

/// `L₂` applied to one sector. The window grows by one on each side.
pub fn apply_l2(sector: &Sector) -> Sector {
    let n = sector.total;
    let lo = sector.offset.saturating_sub(1);
    let hi = (sector.offset + sector.amplitudes.len()).min(n); // inclusive
    let half_i = Complex64::new(0.0, -0.5);
    let amps = (lo..=hi)
        .map(|j| {
            let up = if j < n {
                hop(n, j + 1) * sector.amplitude(j + 1)
            } else {
                ZERO
            };
            let down = if j > 0 {
                hop(n, j) * sector.amplitude(j - 1)
            } else {
                ZERO
            };
            half_i * (up - down)
        })
        .collect();
    Sector::new(n, lo, amps)
}

/// Moments of `L₂` in a normalized state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Moments {
    pub mean: f64,
    pub mean_sq: f64,
    /// `⟨(L₂ − ⟨L₂⟩)²⟩`, evaluated as a squared norm.
    pub variance: f64,
    /// Largest imaginary part seen in `⟨L₂⟩` or `⟨L₂²⟩`; zero up to rounding.
    pub imaginary_residue: f64,
}

/// `⟨L₂⟩` and `⟨L₂²⟩`, applying the sector action twice.
pub fn l2_moments(state: &TwoModeState) -> L2Moments {
    let applied: Vec<(Sector, Sector)> = state
        .sectors
        .values()
        .map(|s| {
            let once = apply_l2(s);
            let twice = apply_l2(&once);
            (once, twice)
        })
        .collect();

    let mut mean = ZERO;
    let mut mean_sq = ZERO;
    for (s, (once, twice)) in state.sectors.values().zip(&applied) {
        mean += s.inner(once);
        mean_sq += s.inner(twice);
    }

    let mu = mean.re;
    let variance = state
        .sectors
        .values()
        .zip(&applied)
        .map(|(s, (once, _))| {
            once.indexed()
                .map(|(k, c)| (c - s.amplitude(k) * mu).norm_sqr())
                .sum::<f64>()
        })
        .sum();

    L2Moments {
        mean: mean.re,
        mean_sq: mean_sq.re,
        variance,
        imaginary_residue: mean.im.abs().max(mean_sq.im.abs()),
    }
}

/// Phase sensitivity for `M` independent copies of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyReport {
    #[serde(rename = "copies_M")]
    pub copies_m: f64,
    #[serde(rename = "total_photons_N")]
    pub total_photons_n: f64,
    #[serde(rename = "mean_L2")]
    pub mean_l2: f64,
    #[serde(rename = "mean_L2_sq")]
    pub mean_l2_sq: f64,
    pub inverse_dth2: f64,
    /// Infinite when the state carries no phase information.
    #[serde(serialize_with = "finite_or_null")]
    pub delta_theta: f64,
}

impl AccuracyReport {
    /// True when `1/Δθ² = 0`, i.e. `Δθ` is unbounded.
    pub fn is_degenerate(&self) -> bool {
        self.inverse_dth2 <= 0.0
    }
}

fn finite_or_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

/// `1/Δθ² = (M/2)(⟨4L₂²⟩ − 4⟨L₂⟩²)` for `M` copies of `state`.
///
/// A state with zero `L₂` variance (e.g. the two-mode vacuum) gives
/// `inverse_dth2 = 0` and an infinite `delta_theta` rather than an error.
pub fn inverse_delta_theta_sq(state: &TwoModeState, copies_m: f64) -> Result<AccuracyReport> {
    if !(copies_m > 0.0) || !copies_m.is_finite() {
        return Err(invalid_argument(format!(
            "number of copies M must be positive and finite, got {copies_m}"
        )));
    }
    state.ensure_normalized()?;
    let moments = l2_moments(state);
    let inverse_dth2 = 0.5 * copies_m * 4.0 * moments.variance.max(0.0);
    let delta_theta = if inverse_dth2 > 0.0 {
        inverse_dth2.sqrt().recip()
    } else {
        f64::INFINITY
    };
    Ok(AccuracyReport {
        copies_m,
        total_photons_n: copies_m * state.mean_total_photons(),
        mean_l2: moments.mean,
        mean_l2_sq: moments.mean_sq,
        inverse_dth2,
        delta_theta,
    })
}

/// Number of copies `M = N / (n_a + n_b)` that spends a photon budget `N`.
pub fn copies_for_budget(state: &TwoModeState, total_photons_n: f64) -> Result<f64> {
    if !(total_photons_n > 0.0) || !total_photons_n.is_finite() {
        return Err(invalid_argument(format!(
            "total photon budget N must be positive and finite, got {total_photons_n}"
        )));
    }
    let per_copy = state.mean_total_photons();
    if per_copy <= 0.0 {
        return Err(Error::ZeroPhotons(
            "input state has no photons, so M = N/(n_a + n_b) is undefined".into(),
        ));
    }
    Ok(total_photons_n / per_copy)
}

/// Eigendecomposition of the real symmetric form of one `L₂` sector block.
#[derive(Debug, Clone)]
pub struct SectorEigen {
    total: usize,
    eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector for `eigenvalues[j]`.
    eigenvectors: DMatrix<f64>,
}

impl SectorEigen {
    pub fn new(total: usize) -> Self {
        let dim = total + 1;
        let mut j = DMatrix::<f64>::zeros(dim, dim);
        for k in 1..=total {
            let v = 0.5 * hop(total, k);
            j[(k - 1, k)] = v;
            j[(k, k - 1)] = v;
        }
        let eig = SymmetricEigen::new(j);
        Self {
            total,
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Coefficients `V^T D† ψ` of a sector vector in the eigenbasis.
    fn project(&self, sector: &Sector) -> Vec<Complex64> {
        (0..=self.total)
            .map(|j| {
                sector
                    .indexed()
                    .map(|(k, c)| self.eigenvectors[(k, j)] * minus_i_pow(k) * c)
                    .sum()
            })
            .collect()
    }

    /// `e^{iθL₂}` applied to a sector, returned densely.
    fn evolve(&self, sector: &Sector, theta: f64) -> Sector {
        let coeffs: Vec<Complex64> = self
            .project(sector)
            .into_iter()
            .zip(&self.eigenvalues)
            .map(|(c, &lambda)| c * Complex64::from_polar(1.0, theta * lambda))
            .collect();
        let amps = (0..=self.total)
            .map(|k| {
                let v: Complex64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| self.eigenvectors[(k, j)] * c)
                    .sum();
                minus_i_pow(k).conj() * v
            })
            .collect();
        Sector::new(self.total, 0, amps)
    }
}

/// `(−i)^k = conj(i^k)`.
fn minus_i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Spectral weights of a state with respect to `L₂`.
///
/// `⟨Ψ|e^{iθL₂}|Ψ⟩ = Σ_j w_j e^{iθλ_j}`, so once the weights are known the
/// overlap is cheap to evaluate on a whole grid of phases.
#[derive(Debug, Clone)]
pub struct L2Spectrum {
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
}

impl L2Spectrum {
    /// Diagonalizes every sector of `state`. Cost is `O(n³)` per sector.
    pub fn new(state: &TwoModeState) -> Self {
        let per_sector: Vec<(Vec<f64>, Vec<f64>)> = state
            .sectors
            .values()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|s| {
                let eig = SectorEigen::new(s.total);
                let weights = eig.project(s).iter().map(|c| c.norm_sqr()).collect();
                (eig.eigenvalues, weights)
            })
            .collect();
        let mut eigenvalues = Vec::new();
        let mut weights = Vec::new();
        for (e, w) in per_sector {
            eigenvalues.extend(e);
            weights.extend(w);
        }
        Self {
            eigenvalues,
            weights,
        }
    }

    /// `⟨Ψ|e^{iθL₂}|Ψ⟩`.
    pub fn overlap(&self, theta: f64) -> Complex64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(&lambda, &w)| Complex64::from_polar(w, theta * lambda))
            .sum()
    }

    /// `P(θ) = |⟨Ψ|e^{iθL₂}|Ψ⟩|²`.
    pub fn p_theta(&self, theta: f64) -> f64 {
        self.overlap(theta).norm_sqr()
    }

    pub fn mean(&self) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| l * w)
            .sum()
    }

    /// `⟨(L₂ − ⟨L₂⟩)^k⟩`.
    pub fn central_moment(&self, k: i32) -> f64 {
        let mu = self.mean();
        self.eigenvalues
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| (l - mu).powi(k) * w)
            .sum()
    }
}

/// Probability `P(θ) = |⟨Ψ|e^{iθL₂}|Ψ⟩|²` that the input state is observed
/// again at the output. Exact: each sector is diagonalized, no series is
/// truncated.
pub fn exact_p_theta(state: &TwoModeState, theta: f64) -> f64 {
    L2Spectrum::new(state).p_theta(theta)
}

/// `e^{iθL₂}|Ψ⟩`, sector by sector.
pub fn evolve(state: &TwoModeState, theta: f64) -> TwoModeState {
    let sectors = state
        .sectors
        .values()
        .map(|s| (s.total, SectorEigen::new(s.total).evolve(s, theta)))
        .collect();
    TwoModeState {
        sectors,
        retained_mass: state.retained_mass,
    }
}

/// Dense `(n+1)×(n+1)` matrix of `L₂` on sector `n`, built by applying
/// [`apply_l2`] to each basis vector. Row/column index is `k`.
pub fn l2_sector_matrix(total: usize) -> Vec<Vec<Complex64>> {
    let dim = total + 1;
    let mut m = vec![vec![ZERO; dim]; dim];
    for col in 0..dim {
        let mut basis = vec![ZERO; dim];
        basis[col] = Complex64::new(1.0, 0.0);
        let image = apply_l2(&Sector::new(total, 0, basis));
        for (row, c) in image.indexed() {
            m[row][col] = c;
        }
    }
    m
}

/// Single-mode ladder operators acting on a two-mode Fock basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    A,
    ADag,
    B,
    BDag,
}

/// Applies a product of ladder operators (rightmost first) to `|na, nb⟩`.
/// Returns the coefficient and resulting occupation, or `None` if it vanishes.
pub fn apply_ladders(ops: &[Ladder], na: usize, nb: usize) -> Option<(f64, usize, usize)> {
    let mut coeff = 1.0;
    let (mut na, mut nb) = (na, nb);
    for op in ops.iter().rev() {
        match op {
            Ladder::A => {
                if na == 0 {
                    return None;
                }
                coeff *= (na as f64).sqrt();
                na -= 1;
            }
            Ladder::ADag => {
                na += 1;
                coeff *= (na as f64).sqrt();
            }
            Ladder::B => {
                if nb == 0 {
                    return None;
                }
                coeff *= (nb as f64).sqrt();
                nb -= 1;
            }
            Ladder::BDag => {
                nb += 1;
                coeff *= (nb as f64).sqrt();
            }
        }
    }
    Some((coeff, na, nb))
}

/// Terms of the normal-ordered expansion
/// `4L₂² = −b†²a² − a†²b² + 2a†b†ba + a†a + b†b`.
///
/// Every flag is set by [`NormalOrderedTerms::default`]; clearing one yields a
/// deliberately wrong operator for exercising the identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalOrderedTerms {
    pub b_dag2_a2: bool,
    pub a_dag2_b2: bool,
    pub cross_number: bool,
    pub a_number: bool,
    pub b_number: bool,
}

impl Default for NormalOrderedTerms {
    fn default() -> Self {
        Self {
            b_dag2_a2: true,
            a_dag2_b2: true,
            cross_number: true,
            a_number: true,
            b_number: true,
        }
    }
}

impl NormalOrderedTerms {
    fn products(&self) -> Vec<(f64, &'static [Ladder])> {
        use Ladder::*;
        let mut terms: Vec<(f64, &'static [Ladder])> = Vec::new();
        if self.b_dag2_a2 {
            terms.push((-1.0, &[BDag, BDag, A, A]));
        }
        if self.a_dag2_b2 {
            terms.push((-1.0, &[ADag, ADag, B, B]));
        }
        if self.cross_number {
            terms.push((2.0, &[ADag, BDag, B, A]));
        }
        if self.a_number {
            terms.push((1.0, &[ADag, A]));
        }
        if self.b_number {
            terms.push((1.0, &[BDag, B]));
        }
        terms
    }

    /// Dense matrix of the selected terms on sector `n`.
    pub fn sector_matrix(&self, total: usize) -> Vec<Vec<Complex64>> {
        let dim = total + 1;
        let mut m = vec![vec![ZERO; dim]; dim];
        for col in 0..dim {
            for (weight, ops) in self.products() {
                if let Some((c, na, nb)) = apply_ladders(ops, total - col, col) {
                    debug_assert_eq!(na + nb, total);
                    m[nb][col] += weight * c;
                }
            }
        }
        m
    }
}

/// Largest entrywise deviation between `4·L₂·L₂` and the given normal-ordered
/// terms over sectors `1..=max_total_photons`.
pub fn normal_ordered_residual(max_total_photons: usize, terms: NormalOrderedTerms) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 0..=max_total_photons {
        let l2 = l2_sector_matrix(n);
        let rhs = terms.sector_matrix(n);
        let dim = n + 1;
        for i in 0..dim {
            for j in 0..dim {
                let sq: Complex64 = (0..dim).map(|k| l2[i][k] * l2[k][j]).sum();
                worst = worst.max((4.0 * sq - rhs[i][j]).norm());
            }
        }
    }
    worst
}

/// Checks `4L₂² = −b†²a² − a†²b² + 2a†b†ba + a†a + b†b` entrywise to 1e-12.
pub fn verify_normal_ordered_identity(max_total_photons: usize) -> bool {
    verify_normal_ordered_identity_with(max_total_photons, NormalOrderedTerms::default())
}

pub fn verify_normal_ordered_identity_with(
    max_total_photons: usize,
    terms: NormalOrderedTerms,
) -> bool {
    normal_ordered_residual(max_total_photons, terms) <= 1e-12
}
