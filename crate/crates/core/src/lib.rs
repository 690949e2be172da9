//! Spectral response, retrieval and figures of merit for atomic-frequency-comb
//! (AFC) optical quantum memories.
//!
//! All frequencies are dimensionless, measured in units of the comb envelope
//! width `Δ_in`; times are measured in units of `1/Δ_in`.
//!
//! The crate is organized bottom-up:
//!
//! * [`profiles`] builds normalized line shapes and sampled comb profiles.
//! * [`response`] turns an absorption profile into the normalized absorption
//!   `a(ω)` and the phase-mismatch ratio `r(ω) = χ′/χ″`, and designs the
//!   side-line compensated comb.
//! * [`retrieval`] builds the backward-retrieval transfer function `Γ(ω)` and
//!   reconstructs retrieved spectra and echoes.
//! * [`metrics`] computes quantum efficiency and fidelity.
//! * [`oracle`] integrates the linearized Maxwell–Bloch equations directly and
//!   provides an independent z-ODE solution for `Γ(ω)`.

pub mod error;
pub mod metrics;
pub mod optimize;
pub mod oracle;
pub mod profiles;
pub mod quad;
pub mod response;
pub mod retrieval;
pub mod special;

pub use num_complex::Complex64;

pub use error::{Error, Result, Warning};
pub use metrics::{Estimate, MetricsResult};
pub use profiles::{CombSpec, DetuningGrid, LineShape, ProfileRole, SampledProfile};
pub use response::{MafcDesign, MediumResponse};
pub use retrieval::{SignalSpec, TimeTrace, TransferSpectrum};

/// `ζ = 4 ln 2`, the Gaussian FWHM constant.
pub const ZETA: f64 = 4.0 * std::f64::consts::LN_2;
