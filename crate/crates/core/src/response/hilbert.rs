//! Principal-value Hilbert transform on a uniform grid.

use std::f64::consts::PI;

use crate::error::Warning;
use crate::profiles::{DetuningGrid, SampledProfile};
use crate::quad::trapezoid;

/// Edge decay required before the transform is considered untruncated.
pub const EDGE_TOLERANCE: f64 = 1e-6;

/// Dispersion shape `D(ω) = (1/π) P∫ p(Δ)/(ω − Δ) dΔ` sampled on the profile grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispersion {
    pub grid: DetuningGrid,
    pub values: Vec<f64>,
    pub warnings: Vec<Warning>,
}

/// Principal-value transform of `profile`.
///
/// At each node the integrand is split as
/// `p(Δ)/(ω − Δ) = [p(Δ) − p(ω)]/(ω − Δ) + p(ω)/(ω − Δ)`. The first term is
/// regular with limit `−p′(ω)` at the singular node (central difference) and
/// is integrated by trapezoid; the second is integrated analytically over the
/// grid span, giving `p(ω) ln((ω − lo)/(hi − ω))`. End nodes use half a
/// spacing as their distance to the boundary.
pub fn pv_hilbert(profile: &SampledProfile) -> Dispersion {
    let grid = profile.grid;
    let p = &profile.values;
    let n = p.len();
    let h = grid.spacing();
    let xs = grid.to_vec();
    let mut integrand = vec![0.0; n];
    let values = (0..n)
        .map(|i| {
            let w = xs[i];
            let pi = p[i];
            for j in 0..n {
                integrand[j] = if j == i {
                    -derivative(p, i, h)
                } else {
                    (p[j] - pi) / (w - xs[j])
                };
            }
            let regular = trapezoid(&integrand, h);
            let log_term = if pi == 0.0 {
                0.0
            } else {
                let left = (w - grid.lo()).max(0.5 * h);
                let right = (grid.hi() - w).max(0.5 * h);
                pi * (left / right).ln()
            };
            (regular + log_term) / PI
        })
        .collect();
    let mut warnings = Vec::new();
    let edge_ratio = profile.edge_ratio();
    if edge_ratio > EDGE_TOLERANCE {
        warnings.push(Warning::EdgeTruncation { edge_ratio });
    }
    Dispersion { grid, values, warnings }
}

fn derivative(p: &[f64], i: usize, h: f64) -> f64 {
    let n = p.len();
    if i == 0 {
        (p[1] - p[0]) / h
    } else if i == n - 1 {
        (p[n - 1] - p[n - 2]) / h
    } else {
        (p[i + 1] - p[i - 1]) / (2.0 * h)
    }
}
