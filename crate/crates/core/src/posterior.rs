//! Grid posterior over the phase after `M` null results.
//!
//! With a flat prior on a finite grid around zero, the posterior after `M`
//! observations of the input state at the output is proportional to
//! `P(θ)^M`. Masses are trapezoidal-rule weights times density, normalized
//! so that they sum to one.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid_argument, Error, Result};
use crate::interferometer::{AccuracyReport, L2Spectrum, TwoModeState};

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 2001;

/// Default half-width of the grid in units of the predicted `Δθ`.
pub const DEFAULT_WIDTH_IN_SIGMAS: f64 = 6.0;

/// Uniform grid of phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseGrid {
    theta_min: f64,
    theta_max: f64,
    points: usize,
}

impl PhaseGrid {
    pub fn new(theta_min: f64, theta_max: f64, points: usize) -> Result<Self> {
        if !theta_min.is_finite() || !theta_max.is_finite() || theta_min >= theta_max {
            return Err(invalid_argument(format!(
                "grid bounds must satisfy theta_min < theta_max, got [{theta_min}, {theta_max}]"
            )));
        }
        if points < 3 {
            return Err(invalid_argument(format!(
                "grid needs at least 3 points, got {points}"
            )));
        }
        Ok(Self {
            theta_min,
            theta_max,
            points,
        })
    }

    /// Grid on `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, points)
    }

    /// Default grid `±6 Δθ` with 2001 points around a predicted accuracy,
    /// clipped to `[−π, π]` when the prediction is that poor.
    pub fn around_prediction(delta_theta: f64) -> Result<Self> {
        if !(delta_theta > 0.0) || !delta_theta.is_finite() {
            return Err(invalid_argument(format!(
                "predicted Δθ must be positive and finite, got {delta_theta}"
            )));
        }
        Self::symmetric(
            (DEFAULT_WIDTH_IN_SIGMAS * delta_theta).min(PI),
            DEFAULT_POINTS,
        )
    }

    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.theta_max - self.theta_min) / (self.points - 1) as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.theta_max
        } else {
            self.theta_min + i as f64 * self.step()
        }
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.theta(i)).collect()
    }

    /// Trapezoidal quadrature weights.
    fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.points {
            0.5 * self.step()
        } else {
            self.step()
        }
    }

    /// Index of the grid point closest to zero.
    pub fn index_nearest_zero(&self) -> usize {
        (0..self.points)
            .min_by(|&a, &b| self.theta(a).abs().total_cmp(&self.theta(b).abs()))
            .unwrap_or(0)
    }
}

/// Normalized posterior masses on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePosterior {
    grid: PhaseGrid,
    masses: Vec<f64>,
}

impl PhasePosterior {
    /// Normalizes unnormalized densities with trapezoidal weights.
    fn from_density(grid: PhaseGrid, density: Vec<f64>) -> Result<Self> {
        let mut masses: Vec<f64> = density
            .iter()
            .enumerate()
            .map(|(i, d)| d * grid.trapezoid_weight(i))
            .collect();
        let total: f64 = masses.iter().sum();
        let resolved = masses.iter().filter(|&&m| m > 0.0).count();
        if !(total > 0.0) || !total.is_finite() || resolved < 3 {
            return Err(Error::DegeneratePosterior(format!(
                "only {resolved} of {} grid points carry probability; use a narrower grid",
                grid.len()
            )));
        }
        for m in &mut masses {
            *m /= total;
        }
        Ok(Self { grid, masses })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Probability density at each grid point (mass divided by quadrature weight).
    pub fn densities(&self) -> Vec<f64> {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, m)| m / self.grid.trapezoid_weight(i))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, m)| self.grid.theta(i) * m)
            .sum()
    }

    pub fn std_dev(&self) -> f64 {
        let mean = self.mean();
        self.masses
            .iter()
            .enumerate()
            .map(|(i, m)| (self.grid.theta(i) - mean).powi(2) * m)
            .sum::<f64>()
            .sqrt()
    }

    /// Index of the largest density. Ties go to the point nearest the grid centre.
    pub fn mode_index(&self) -> usize {
        let densities = self.densities();
        let centre = 0.5 * (self.grid.theta_min + self.grid.theta_max);
        let mut best = 0;
        for i in 1..densities.len() {
            let better = densities[i] > densities[best]
                || (densities[i] == densities[best]
                    && (self.grid.theta(i) - centre).abs()
                        < (self.grid.theta(best) - centre).abs());
            if better {
                best = i;
            }
        }
        best
    }

    pub fn mode(&self) -> f64 {
        self.grid.theta(self.mode_index())
    }

    /// Smallest grid interval, symmetric about the mode, holding at least `mass`.
    pub fn credible_interval(&self, mass: f64) -> Result<(f64, f64)> {
        credible_interval(self, mass)
    }
}

/// Posterior `∝ P(θ)^M` after `M` null results with a flat prior.
///
/// `M·ln P(θ)` is accumulated in log space; points with `P(θ) = 0` get zero
/// mass. `M = 0` yields the uniform posterior.
pub fn posterior_from_null_results(
    state: &TwoModeState,
    copies_m: u64,
    grid: PhaseGrid,
) -> Result<PhasePosterior> {
    if grid.theta_min < -PI || grid.theta_max > PI {
        return Err(invalid_argument("phase grid must lie within [−π, π]"));
    }
    let spectrum = L2Spectrum::new(state);
    posterior_from_spectrum(&spectrum, copies_m, grid)
}

/// Same as [`posterior_from_null_results`] for a precomputed spectrum.
pub fn posterior_from_spectrum(
    spectrum: &L2Spectrum,
    copies_m: u64,
    grid: PhaseGrid,
) -> Result<PhasePosterior> {
    if copies_m == 0 {
        return PhasePosterior::from_density(grid, vec![1.0; grid.len()]);
    }
    let m = copies_m as f64;
    let log_density: Vec<f64> = grid
        .thetas()
        .par_iter()
        .map(|&theta| {
            let p = spectrum.p_theta(theta).min(1.0);
            if p > 0.0 {
                m * p.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let peak = log_density
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Err(Error::DegeneratePosterior(
            "P(θ) vanishes on every grid point; use a narrower grid".into(),
        ));
    }
    let density = log_density.iter().map(|l| (l - peak).exp()).collect();
    PhasePosterior::from_density(grid, density)
}

/// Zero-mean Gaussian with variance `Δθ²` from an [`AccuracyReport`].
///
/// The Gaussian is considered unrepresentable when the grid does not reach
/// one `Δθ` on either side of zero or when fewer than three points carry mass.
pub fn gaussian_approx(report: &AccuracyReport, grid: PhaseGrid) -> Result<PhasePosterior> {
    if !(report.inverse_dth2 > 0.0) {
        return Err(invalid_argument("Gaussian approximation needs 1/Δθ² > 0"));
    }
    let sigma = report.delta_theta;
    if grid.theta_min > -sigma || grid.theta_max < sigma {
        return Err(Error::DegeneratePosterior(format!(
            "grid [{}, {}] is narrower than Δθ = {sigma}; widen the grid",
            grid.theta_min, grid.theta_max
        )));
    }
    let density = grid
        .thetas()
        .iter()
        .map(|t| (-0.5 * (t / sigma).powi(2)).exp())
        .collect();
    PhasePosterior::from_density(grid, density)
}

/// Smallest grid interval symmetric about the mode with mass ≥ `mass`.
/// Near a grid edge the interval is clipped to the grid.
pub fn credible_interval(post: &PhasePosterior, mass: f64) -> Result<(f64, f64)> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(invalid_argument(format!(
            "credible mass must lie in (0, 1), got {mass}"
        )));
    }
    let centre = post.mode_index();
    let last = post.masses.len() - 1;
    let mut acc = post.masses[centre];
    let mut k = 0;
    // a tiny slack absorbs rounding in the normalization
    while acc < mass - 1e-12 && (centre >= k + 1 || centre + k + 1 <= last) {
        k += 1;
        if centre >= k {
            acc += post.masses[centre - k];
        }
        if centre + k <= last {
            acc += post.masses[centre + k];
        }
    }
    let lo = post.grid.theta(centre.saturating_sub(k));
    let hi = post.grid.theta((centre + k).min(last));
    Ok((lo, hi))
}

/// `½ Σ |p − q|` for posteriors on the same grid.
pub fn total_variation_distance(p: &PhasePosterior, q: &PhasePosterior) -> Result<f64> {
    if p.grid != q.grid {
        return Err(invalid_argument("posteriors live on different grids"));
    }
    Ok(0.5
        * p.masses
            .iter()
            .zip(&q.masses)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}
