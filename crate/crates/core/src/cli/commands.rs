use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Budget, ConfigError, ConfigMap, RunConfig, StateSpec};
use super::CliError;
use crate::closed_form::{
    fock_inverse_dth2, general_coherent_b, squeezed_inverse_dth2, standard_quantum_limit,
    SqueezedConfig,
};
use crate::error::Error;
use crate::fock::{mean_photon_number, quadrature_moments, ModeState, QuadratureSpec};
use crate::interferometer::{
    copies_for_budget, inverse_delta_theta_sq, tensor, AccuracyReport, L2Spectrum, TwoModeState,
};
use crate::posterior::{
    gaussian_approx, posterior_from_spectrum, total_variation_distance, PhaseGrid, PhasePosterior,
};

/// Largest sector the exact posterior will diagonalize.
pub const MAX_EXACT_SECTOR: usize = 1500;

/// A closed-form value set beside the engine result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormValue {
    pub formula: &'static str,
    pub inverse_dth2: f64,
    pub relative_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputeOutput {
    pub mode_a: StateSpec,
    pub mode_b: StateSpec,
    pub report: AccuracyReport,
    pub sql_ratio: f64,
    pub closed_forms: Vec<ClosedFormValue>,
}

impl ComputeOutput {
    /// The most specific closed form: Fock pair, then squeezed, then general.
    pub fn primary_closed_form(&self) -> Option<&ClosedFormValue> {
        self.closed_forms.first()
    }
}

struct Prepared {
    state: TwoModeState,
    a: ModeState,
    b: ModeState,
}

fn prepare(config: &RunConfig) -> Result<Prepared, CliError> {
    let a = config
        .mode_a
        .build()
        .map_err(|e| field_error("a.kind", e))?;
    let b = config
        .mode_b
        .build()
        .map_err(|e| field_error("b.kind", e))?;
    let state = tensor(&a, &b);
    Ok(Prepared { state, a, b })
}

fn field_error(field: &str, e: Error) -> CliError {
    CliError::Config(ConfigError::new(field, e.to_string()))
}

fn zero_photon_error() -> CliError {
    CliError::Library(Error::ZeroPhotons(
        "both modes are empty, so there is no phase information".into(),
    ))
}

/// Engine report plus every closed form that applies to the input pair.
pub fn compute(config: &RunConfig) -> Result<ComputeOutput, CliError> {
    let prepared = prepare(config)?;
    if config.mode_a.mean_photons() + config.mode_b.mean_photons() == 0.0 {
        return Err(zero_photon_error());
    }
    let copies = match config.budget {
        Budget::Copies(m) => m,
        Budget::TotalPhotons(n) => copies_for_budget(&prepared.state, n)?,
    };
    let report = inverse_delta_theta_sq(&prepared.state, copies)?;
    // closed forms are evaluated with the analytic photon numbers
    let total_n = match config.budget {
        Budget::TotalPhotons(n) => n,
        Budget::Copies(m) => m * (config.mode_a.mean_photons() + config.mode_b.mean_photons()),
    };
    let closed_forms = closed_forms(config, &prepared, total_n)?
        .into_iter()
        .map(|(formula, value)| ClosedFormValue {
            formula,
            inverse_dth2: value,
            relative_difference: (report.inverse_dth2 - value).abs() / value.abs(),
        })
        .collect();
    Ok(ComputeOutput {
        mode_a: config.mode_a,
        mode_b: config.mode_b,
        sql_ratio: report.inverse_dth2 / standard_quantum_limit(report.total_photons_n),
        report,
        closed_forms,
    })
}

fn closed_forms(
    config: &RunConfig,
    prepared: &Prepared,
    total_n: f64,
) -> Result<Vec<(&'static str, f64)>, CliError> {
    let mut out = Vec::new();
    if !(total_n > 0.0) {
        return Ok(out);
    }
    if let (StateSpec::Fock { n: na }, StateSpec::Fock { n: nb }) = (config.mode_a, config.mode_b) {
        out.push((
            "fock_pair",
            fock_inverse_dth2(na as u64, nb as u64, total_n)?,
        ));
        return Ok(out);
    }
    // L₂ only changes sign when the modes are swapped, so a coherent state
    // in mode a is handled by exchanging the roles of the two modes.
    let (other_spec, other_state, coherent) = match (config.mode_a, config.mode_b) {
        (_, StateSpec::Coherent { b, phi }) => (config.mode_a, &prepared.a, (b, phi)),
        (StateSpec::Coherent { b, phi }, _) => (config.mode_b, &prepared.b, (b, phi)),
        _ => return Ok(out),
    };
    let (b, phi) = coherent;
    let n_b = b * b;
    if let StateSpec::SqueezedVacuum { r, psi } = other_spec {
        if n_b + r.sinh().powi(2) > 0.0 {
            let cfg = SqueezedConfig::new(r, psi, phi, n_b, total_n)?;
            out.push(("squeezed_coherent", squeezed_inverse_dth2(&cfg)?));
        }
    }
    let n_other = other_spec.mean_photons();
    if n_other + n_b > 0.0 {
        let variance =
            quadrature_moments(other_state, QuadratureSpec::new(phi - PI / 2.0))?.variance;
        out.push((
            "general_coherent_b",
            general_coherent_b(
                variance,
                mean_photon_number(other_state).max(0.0),
                n_b,
                total_n,
            )?,
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub inv_dth2_engine: f64,
    pub inv_dth2_closed: Option<f64>,
    pub sql_ratio: Option<f64>,
}

/// One row per swept value, in input order. Rows without photons report
/// `1/Δθ² = 0` instead of aborting the sweep.
pub fn sweep(base: &ConfigMap, config: &RunConfig) -> Result<Vec<SweepRow>, CliError> {
    let spec = config.sweep.as_ref().ok_or_else(|| {
        ConfigError::new(
            "sweep.param",
            "missing: the sweep command needs a sweep section",
        )
    })?;
    spec.values()
        .par_iter()
        .map(|&value| {
            let mut map = base.clone();
            map.insert(spec.param.clone(), serde_json::json!(value));
            let row_config = RunConfig::from_map(&map)?;
            let row = match compute(&row_config) {
                Ok(out) => SweepRow {
                    param: spec.param.clone(),
                    value,
                    inv_dth2_engine: out.report.inverse_dth2,
                    inv_dth2_closed: out.primary_closed_form().map(|c| c.inverse_dth2),
                    sql_ratio: Some(out.sql_ratio),
                },
                Err(CliError::Library(Error::ZeroPhotons(_))) => SweepRow {
                    param: spec.param.clone(),
                    value,
                    inv_dth2_engine: 0.0,
                    inv_dth2_closed: None,
                    sql_ratio: None,
                },
                Err(e) => return Err(e),
            };
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    #[serde(rename = "copies_M")]
    pub copies_m: u64,
    /// `None` when `M = 0` or the state has zero `L₂` variance.
    pub predicted_delta_theta: Option<f64>,
    pub exact_mean: f64,
    pub exact_std_dev: f64,
    pub exact_interval_68: (f64, f64),
    pub exact_interval_95: (f64, f64),
    pub gaussian_interval_68: Option<(f64, f64)>,
    pub gaussian_interval_95: Option<(f64, f64)>,
    pub total_variation_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorOutput {
    pub grid: PhaseGrid,
    pub exact: PhasePosterior,
    pub gaussian: Option<PhasePosterior>,
    pub summary: PosteriorSummary,
}

pub fn posterior(config: &RunConfig) -> Result<PosteriorOutput, CliError> {
    let grid = config.grid.ok_or_else(|| {
        ConfigError::new(
            "grid.min",
            "missing: the posterior command needs a phase grid",
        )
    })?;
    let copies = match config.budget {
        Budget::Copies(m) if m.fract() == 0.0 => m as u64,
        Budget::Copies(m) => {
            return Err(ConfigError::new(
                "copies",
                format!("must be an integer for a posterior, got {m}"),
            )
            .into())
        }
        Budget::TotalPhotons(_) => {
            return Err(ConfigError::new(
                "copies",
                "the posterior command needs the `copies` budget",
            )
            .into())
        }
    };
    if grid.theta_min() < -PI || grid.theta_max() > PI {
        return Err(ConfigError::new("grid.min", "phase grid must lie within [-pi, pi]").into());
    }
    let prepared = prepare(config)?;
    if prepared.state.max_total_photons() > MAX_EXACT_SECTOR {
        return Err(ConfigError::new(
            "a.kind",
            format!(
                "input reaches {} photons; the exact posterior is limited to {MAX_EXACT_SECTOR}",
                prepared.state.max_total_photons()
            ),
        )
        .into());
    }

    let spectrum = L2Spectrum::new(&prepared.state);
    let exact = posterior_from_spectrum(&spectrum, copies, grid)?;

    let gaussian = if copies > 0 {
        let report = inverse_delta_theta_sq(&prepared.state, copies as f64)?;
        if report.is_degenerate() {
            None
        } else {
            Some((report.delta_theta, gaussian_approx(&report, grid)?))
        }
    } else {
        None
    };

    let summary = PosteriorSummary {
        copies_m: copies,
        predicted_delta_theta: gaussian.as_ref().map(|(d, _)| *d),
        exact_mean: exact.mean(),
        exact_std_dev: exact.std_dev(),
        exact_interval_68: exact.credible_interval(0.6827)?,
        exact_interval_95: exact.credible_interval(0.95)?,
        gaussian_interval_68: gaussian
            .as_ref()
            .map(|(_, g)| g.credible_interval(0.6827))
            .transpose()?,
        gaussian_interval_95: gaussian
            .as_ref()
            .map(|(_, g)| g.credible_interval(0.95))
            .transpose()?,
        total_variation_distance: gaussian
            .as_ref()
            .map(|(_, g)| total_variation_distance(&exact, g))
            .transpose()?,
    };
    Ok(PosteriorOutput {
        grid,
        exact,
        gaussian: gaussian.map(|(_, g)| g),
        summary,
    })
}
