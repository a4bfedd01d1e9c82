//! Phase-estimation accuracy of a Mach-Zehnder interferometer from Bayes'
//! theorem.
//!
//! The observation is a "null result": the two-mode input state `|Ψ⟩` is
//! found again at the output. For a phase `θ` this happens with probability
//! `P(θ) = |⟨Ψ|e^{iθL₂}|Ψ⟩|²`, and after `M` such results the phase
//! posterior is `∝ P(θ)^M ≈ exp(−θ²/2Δθ²)` with
//! `1/Δθ² = (M/2)(⟨4L₂²⟩ − 4⟨L₂⟩²)`.
//!
//! - [`fock`]: single-mode Fock, coherent and squeezed-vacuum states
//! - [`interferometer`]: the sector-block engine for `L₂`, `P(θ)` and `1/Δθ²`
//! - [`closed_form`]: analytic `1/Δθ²` for Fock pairs and coherent partners
//! - [`posterior`]: grid posteriors, Gaussian approximation, diagnostics
//! - [`verify`]: invariant suites backing `mzbayes verify`
//! - [`cli`]: the `mzbayes` command-line tool

pub mod cli;
pub mod closed_form;
mod error;
pub mod fock;
pub mod interferometer;
pub mod posterior;
pub mod verify;

pub use error::{Error, Result};
