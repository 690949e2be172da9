//! Linear response of the prepared medium: normalized absorption `a(ω)` and
//! phase-mismatch ratio `r(ω) = χ′/χ″`.
//!
//! Sign convention: `χ″ < 0` with `α > 0`, so `r = −D/p` where `D` is the
//! principal-value transform of the density `p`. Inside a single absorption
//! line `r` decreases through zero (fast light).

mod hilbert;
mod mafc;

use std::f64::consts::PI;

pub use hilbert::{pv_hilbert, Dispersion, EDGE_TOLERANCE};
pub use mafc::{
    compensation_params, dispersion_components, mafc_response, optimize_compensation,
    optimize_compensation_from, residual_absorption_ratio, series_coefficient, sideline_response_closed,
    CompensationCriterion, DispersionRow, MafcDesign, Optimized, DEFAULT_SIDE_HWHM,
    RESIDUAL_WARNING,
};

use crate::error::{Error, Result, Warning};
use crate::profiles::{DetuningGrid, SampledProfile};
use crate::special::erfi;
use crate::ZETA;

/// Everything retrieval needs from the medium.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumResponse {
    pub grid: DetuningGrid,
    /// `α(ω)/α(0)`.
    pub a: Vec<f64>,
    /// `χ′/χ″`; meaningful only where `r_defined` is set.
    pub r: Vec<f64>,
    pub r_defined: Vec<bool>,
    /// Peak optical depth `α(0)L`; may be `+∞`.
    pub d0: f64,
    /// Half width of a hard-edged band outside which nothing is retrieved.
    pub hard_edge: Option<f64>,
    pub warnings: Vec<Warning>,
}

impl MediumResponse {
    pub fn new(grid: DetuningGrid, a: Vec<f64>, r: Vec<f64>, d0: f64) -> Result<Self> {
        if a.len() != grid.len() || r.len() != grid.len() {
            return Err(Error::InvalidInput("response arrays must match the grid".into()));
        }
        if a.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("absorption must be finite and >= 0".into()));
        }
        check_depth(d0)?;
        let r_defined = a.iter().zip(&r).map(|(a, r)| *a > 0.0 && r.is_finite()).collect();
        Ok(Self { grid, a, r, r_defined, d0, hard_edge: None, warnings: Vec::new() })
    }

    /// Response of an arbitrary sampled density via [`pv_hilbert`].
    ///
    /// `a` is normalized by the density at `ω = 0` (or by the peak when the
    /// grid does not reach zero). `r` is undefined where the density vanishes.
    pub fn from_profile(profile: &SampledProfile, d0: f64) -> Result<Self> {
        check_depth(d0)?;
        let reference = match profile.grid.locate(0.0) {
            Some(_) if profile.value_at(0.0) > 0.0 => profile.value_at(0.0),
            _ => profile.peak(),
        };
        if reference <= 0.0 {
            return Err(Error::InvalidInput("profile carries no absorption".into()));
        }
        let d = pv_hilbert(profile);
        let mut r = vec![0.0; profile.values.len()];
        let mut r_defined = vec![false; profile.values.len()];
        for (i, (&p, &dv)) in profile.values.iter().zip(&d.values).enumerate() {
            if p > 0.0 {
                r[i] = -dv / p;
                r_defined[i] = true;
            }
        }
        let a = profile.values.iter().map(|p| p / reference).collect();
        Ok(Self {
            grid: profile.grid,
            a,
            r,
            r_defined,
            d0,
            hard_edge: None,
            warnings: d.warnings,
        })
    }

    /// Gaussian envelope (FWHM 1) sampled from the closed forms.
    pub fn gaussian_closed(grid: DetuningGrid, d0: f64) -> Result<Self> {
        check_depth(d0)?;
        let (a, r): (Vec<f64>, Vec<f64>) = grid.points().map(gaussian_response_closed).unzip();
        let r_defined = r.iter().map(|r| r.is_finite()).collect();
        Ok(Self { grid, a, r, r_defined, d0, hard_edge: None, warnings: Vec::new() })
    }

    /// Rectangular comb band of unit width; zero absorption outside.
    pub fn rect_afc_closed(grid: DetuningGrid, d0: f64) -> Result<Self> {
        check_depth(d0)?;
        let n = grid.len();
        let mut a = vec![0.0; n];
        let mut r = vec![0.0; n];
        let mut r_defined = vec![false; n];
        for (i, w) in grid.points().enumerate() {
            if let Ok((ai, ri)) = rect_afc_response_closed(w) {
                a[i] = ai;
                r[i] = ri;
                r_defined[i] = true;
            }
        }
        Ok(Self { grid, a, r, r_defined, d0, hard_edge: Some(0.5), warnings: Vec::new() })
    }

    pub fn with_d0(mut self, d0: f64) -> Result<Self> {
        check_depth(d0)?;
        self.d0 = d0;
        Ok(self)
    }

    /// Same medium with `r → −r`.
    pub fn sign_flipped(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.r {
            *r = -*r;
        }
        out
    }

    /// Local `(a, r)` by linear interpolation. Outside the grid, outside a
    /// hard edge, or next to an undefined `r` the medium is transparent.
    pub fn sample(&self, omega: f64) -> (f64, f64) {
        if let Some(edge) = self.hard_edge {
            if omega.abs() >= edge {
                return (0.0, 0.0);
            }
        }
        let Some((i, t)) = self.grid.locate(omega) else {
            return (0.0, 0.0);
        };
        if t == 0.0 {
            return self.node(i);
        }
        if !(self.r_defined[i] && self.r_defined[i + 1]) {
            return if t < 0.5 { self.node(i) } else { self.node(i + 1) };
        }
        let lerp = |v: &[f64]| v[i] * (1.0 - t) + v[i + 1] * t;
        (lerp(&self.a), lerp(&self.r))
    }

    /// Exact `(a, r)` at node `i`; undefined `r` reads as transparent.
    pub fn node(&self, i: usize) -> (f64, f64) {
        if !self.r_defined[i] {
            return (0.0, 0.0);
        }
        if let Some(edge) = self.hard_edge {
            if self.grid.point(i).abs() >= edge {
                return (0.0, 0.0);
            }
        }
        (self.a[i], self.r[i])
    }

    /// Indicator of bins that can be retrieved at all.
    pub fn band_mask(&self) -> Vec<bool> {
        (0..self.grid.len()).map(|i| self.node(i).0 > 0.0).collect()
    }
}

fn check_depth(d0: f64) -> Result<()> {
    if d0 >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("optical depth must be >= 0, got {d0}")))
    }
}

/// `(a, r)` of the unit-FWHM Gaussian envelope: `a = e^{−ζω²}`, `r = −erfi(√ζ ω)`.
pub fn gaussian_response_closed(omega: f64) -> (f64, f64) {
    ((-ZETA * omega * omega).exp(), -erfi(ZETA.sqrt() * omega))
}

/// Dispersion shape `D/G(0)` of the Gaussian envelope, `e^{−ζω²} erfi(√ζ ω)`.
pub fn gaussian_dispersion_closed(omega: f64) -> f64 {
    let (a, r) = gaussian_response_closed(omega);
    -a * r
}

/// Least-squares slope `ρ` of `e^{−ζω²} erfi(√ζ ω) ≈ ρ ω` over `|ω| ≤ half_width`,
/// in the continuum sense `∫ ω D dω / ∫ ω² dω`.
pub fn gaussian_slope_fit(half_width: f64) -> Result<f64> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidInput(format!("fit window must be positive, got {half_width}")));
    }
    let n = 4000;
    let h = half_width / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let x = i as f64 * h;
        num += w * x * gaussian_dispersion_closed(x);
        den += w * x * x;
    }
    Ok(num / den)
}

/// Positive detuning where the Gaussian dispersion shape equals the
/// absorption, i.e. the root of `erfi(√ζ ω) = 1`.
pub fn gaussian_crossing() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if erfi(ZETA.sqrt() * mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(a, r)` inside the unit rectangular band: `a = 1`, `r = −(1/π) ln((1/2+ω)/(1/2−ω))`.
pub fn rect_afc_response_closed(omega: f64) -> Result<(f64, f64)> {
    if !(omega.abs() < 0.5) {
        return Err(Error::OutOfBand { omega });
    }
    Ok((1.0, -2.0 / PI * (2.0 * omega).atanh()))
}
