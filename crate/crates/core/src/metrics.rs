//! Quantum efficiency and fidelity of the memory for a given signal.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{trapezoid, trapezoid_coarse, trapezoid_coarse_complex, trapezoid_complex};
use crate::retrieval::{TransferSpectrum, SignalSpec};
use crate::special::{erf, erfcx};
use crate::ZETA;

/// Trapezoid value with the Richardson estimate `|I_h − I_2h|/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsResult {
    /// `κ̃² Q̃`.
    pub q: Estimate,
    /// Dispersion-limited efficiency `∫|Γ|² I / ∫ I`.
    pub q_tilde: Estimate,
    pub fidelity: Estimate,
    /// Signal energy inside the retrievable band.
    pub inband_fraction: f64,
}

fn integrate(values: &[f64], h: f64) -> Estimate {
    let value = trapezoid(values, h);
    let error = trapezoid_coarse(values, h).map_or(0.0, |c| (value - c).abs() / 3.0);
    Estimate { value, error }
}

fn integrate_complex(values: &[Complex64], h: f64) -> (Complex64, Option<Complex64>) {
    (trapezoid_complex(values, h), trapezoid_coarse_complex(values, h))
}

fn ratio(num: Estimate, den: Estimate) -> Estimate {
    let value = num.value / den.value;
    let error = value.abs() * (num.error / num.value.abs().max(f64::MIN_POSITIVE) + den.error / den.value);
    Estimate { value, error }
}

fn check(transfer: &TransferSpectrum, signal: &SignalSpec) -> Result<()> {
    if transfer.grid != signal.grid {
        return Err(Error::InvalidInput("transfer and signal live on different grids".into()));
    }
    Ok(())
}

/// `Q = κ̃² ∫|Γ|² I dω / ∫ I dω` for the intensity `I` sampled on the transfer grid.
pub fn quantum_efficiency(transfer: &TransferSpectrum, intensity: &[f64]) -> Result<(Estimate, Estimate)> {
    if intensity.len() != transfer.grid.len() {
        return Err(Error::InvalidInput("intensity must match the grid".into()));
    }
    if intensity.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput("intensity must be finite and >= 0".into()));
    }
    let h = transfer.grid.spacing();
    let input = integrate(intensity, h);
    if !(input.value > 0.0) {
        return Err(Error::UndefinedMetric("zero input energy".into()));
    }
    let weighted: Vec<f64> = transfer.gamma.iter().zip(intensity).map(|(g, i)| g.norm_sqr() * i).collect();
    let q_tilde = ratio(integrate(&weighted, h), input);
    let k2 = transfer.dephasing.norm_sqr();
    let q = Estimate { value: k2 * q_tilde.value, error: k2 * q_tilde.error };
    Ok((q, q_tilde))
}

/// `F = |∫ Γ |f|²|² / (∫ |Γ f|² · ∫ |f|²)`.
pub fn fidelity(transfer: &TransferSpectrum, signal: &SignalSpec) -> Result<Estimate> {
    check(transfer, signal)?;
    let h = transfer.grid.spacing();
    let p = signal.intensity();
    let overlap: Vec<Complex64> = transfer.gamma.iter().zip(&p).map(|(g, i)| g * i).collect();
    let out: Vec<f64> = transfer.gamma.iter().zip(&p).map(|(g, i)| g.norm_sqr() * i).collect();
    let (o, o_coarse) = integrate_complex(&overlap, h);
    let norm = trapezoid(&out, h);
    let input = trapezoid(&p, h);
    if !(norm > 0.0) || !(input > 0.0) {
        return Err(Error::UndefinedMetric("nothing is retrieved".into()));
    }
    let value = (o.norm_sqr() / (norm * input)).min(1.0);
    let coarse = match (o_coarse, trapezoid_coarse(&out, h), trapezoid_coarse(&p, h)) {
        (Some(oc), Some(nc), Some(ic)) if nc > 0.0 && ic > 0.0 => Some(oc.norm_sqr() / (nc * ic)),
        _ => None,
    };
    let error = coarse.map_or(0.0, |c| (value - c.min(1.0)).abs() / 3.0);
    Ok(Estimate { value, error })
}

/// Efficiency, fidelity and in-band fraction of `signal` through `transfer`.
pub fn evaluate(transfer: &TransferSpectrum, signal: &SignalSpec) -> Result<MetricsResult> {
    check(transfer, signal)?;
    let p = signal.intensity();
    let (q, q_tilde) = quantum_efficiency(transfer, &p)?;
    let fidelity = fidelity(transfer, signal)?;
    let h = transfer.grid.spacing();
    let inside: Vec<f64> = p.iter().zip(&transfer.band_mask).map(|(v, m)| if *m { *v } else { 0.0 }).collect();
    let inband_fraction = trapezoid(&inside, h) / trapezoid(&p, h);
    Ok(MetricsResult { q, q_tilde, fidelity, inband_fraction })
}

/// Gaussian-signal efficiency estimate
/// `κ̃² √(π/2)/(0.9y) e^{1/(2(0.9y)²)} erfc(1/(0.9√2 y))`.
pub fn qe_gaussian_paper(y: f64, dephasing: f64) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Domain(format!("bandwidth ratio must be positive, got {y}")));
    }
    let a = 0.9 * y;
    Ok(dephasing * dephasing * (PI / 2.0).sqrt() / a * erfcx(1.0 / (a * 2f64.sqrt())))
}

/// In-band energy `erf(√ζ w/Δ_p)` of a unit Gaussian signal for a band `|ω| ≤ w`.
pub fn ideal_inband_fraction(half_width: f64, fwhm: f64) -> Result<f64> {
    if !(half_width > 0.0 && fwhm > 0.0) {
        return Err(Error::InvalidInput("band and signal widths must be positive".into()));
    }
    Ok(erf(ZETA.sqrt() * half_width / fwhm))
}
