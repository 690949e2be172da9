//! Backward-retrieval transfer function `Γ(ω)` and the retrieved field in
//! frequency and time.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::profiles::{CombSpec, DetuningGrid, LineShape};
use crate::quad::trapezoid;
use crate::response::MediumResponse;
use crate::special::erf;
use crate::ZETA;

/// Largest signal energy fraction allowed outside the grid.
pub const COVERAGE_LIMIT: f64 = 0.01;
/// Minimum time window in units of the signal duration.
pub const WINDOW_FACTOR: f64 = 4.0;
/// Signal duration over the coarsest accepted time step.
pub const RESOLUTION_FACTOR: f64 = 32.0;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Single-pass field factor `exp(−(d/2)(1 − i r))` for `d = d0·a`.
pub fn transmission_closed(d: f64, r: f64) -> Complex64 {
    if d == 0.0 {
        return ONE;
    }
    if d.is_infinite() {
        return Complex64::new(0.0, 0.0);
    }
    (-(0.5 * d) * Complex64::new(1.0, -r)).exp()
}

/// `Γ = [1 − exp(−d(1 − i r))] / (1 − i r)`, with `Γ = 1/(1 − i r)` at `d = ∞`.
///
/// Vanishes for `d = 0` or non-finite `r`.
pub fn gamma_closed(d: f64, r: f64) -> Complex64 {
    if !(d > 0.0) || !r.is_finite() {
        return Complex64::new(0.0, 0.0);
    }
    let k = Complex64::new(1.0, -r);
    if d.is_infinite() {
        return k.inv();
    }
    (ONE - (-d * k).exp()) / k
}

fn depth(response: &MediumResponse, a: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        response.d0 * a
    }
}

pub fn transmission(response: &MediumResponse, omega: f64) -> Complex64 {
    let (a, r) = response.sample(omega);
    transmission_closed(depth(response, a), r)
}

pub fn gamma(response: &MediumResponse, omega: f64) -> Complex64 {
    let (a, r) = response.sample(omega);
    gamma_closed(depth(response, a), r)
}

/// End-to-end memory transfer function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferSpectrum {
    pub grid: DetuningGrid,
    pub gamma: Vec<Complex64>,
    /// `κ̃(2π/δ)`.
    pub dephasing: Complex64,
    pub band_mask: Vec<bool>,
}

impl TransferSpectrum {
    pub fn from_response(response: &MediumResponse, dephasing: Complex64) -> Self {
        let gamma = (0..response.grid.len())
            .map(|i| {
                let (a, r) = response.node(i);
                gamma_closed(depth(response, a), r)
            })
            .collect();
        Self { grid: response.grid, gamma, dephasing, band_mask: response.band_mask() }
    }

    /// Transfer of `response` with the dephasing of `comb`'s teeth.
    pub fn with_comb(response: &MediumResponse, comb: &CombSpec) -> Self {
        Self::from_response(response, comb.dephasing())
    }

    /// `Γ ≡ c` everywhere.
    pub fn constant(grid: DetuningGrid, c: Complex64, dephasing: Complex64) -> Self {
        Self { grid, gamma: vec![c; grid.len()], dephasing, band_mask: vec![true; grid.len()] }
    }

    /// `κ̃ Γ(ω)` per bin.
    pub fn total(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.gamma.iter().map(move |g| self.dephasing * g)
    }
}

/// Input spectral amplitude `f_p(ω)` on a grid, normalized to `∫|f_p|² dω = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub grid: DetuningGrid,
    pub amplitude: Vec<Complex64>,
    /// Intensity FWHM `Δ_p` when known.
    pub fwhm: Option<f64>,
    /// Fraction of the signal energy that lies on the grid.
    pub coverage: f64,
}

impl SignalSpec {
    /// Transform-limited Gaussian with intensity `I_p ∝ e^{−ζ(ω−ω_c)²/Δ_p²}`.
    pub fn gaussian(fwhm: f64, center: f64, grid: DetuningGrid) -> Result<Self> {
        let shape = LineShape::gaussian(fwhm)?;
        let amplitude = grid
            .points()
            .map(|w| Complex64::new(shape.density(w - center).sqrt(), 0.0))
            .collect();
        let s = ZETA.sqrt() / fwhm;
        let coverage = 0.5 * (erf(s * (grid.hi() - center)) + erf(s * (center - grid.lo())));
        let mut out = Self::from_amplitude(grid, amplitude)?;
        out.fwhm = Some(fwhm);
        out.coverage = coverage;
        Ok(out)
    }

    /// Arbitrary amplitude, normalized by trapezoid; assumed fully on the grid.
    pub fn from_amplitude(grid: DetuningGrid, amplitude: Vec<Complex64>) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::InvalidInput("amplitude must match the grid".into()));
        }
        if amplitude.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("amplitude must be finite".into()));
        }
        let energy = trapezoid(&amplitude.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>(), grid.spacing());
        if !(energy > 0.0) {
            return Err(Error::UndefinedMetric("signal carries no energy".into()));
        }
        let scale = energy.sqrt().recip();
        let amplitude = amplitude.into_iter().map(|z| z * scale).collect();
        Ok(Self { grid, amplitude, fwhm: None, coverage: 1.0 })
    }

    /// Train of copies delayed by `delays`, `f(ω) Σ_k e^{iω t_k}`, renormalized.
    pub fn train(&self, delays: &[f64]) -> Result<Self> {
        let amplitude = self
            .grid
            .points()
            .zip(&self.amplitude)
            .map(|(w, f)| delays.iter().map(|t| f * Complex64::from_polar(1.0, w * t)).sum())
            .collect();
        let mut out = Self::from_amplitude(self.grid, amplitude)?;
        out.coverage = self.coverage;
        Ok(out)
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.amplitude.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Intensity-weighted spectral standard deviation.
    pub fn spectral_width(&self) -> f64 {
        let h = self.grid.spacing();
        let i = self.intensity();
        let xs = self.grid.to_vec();
        let m0 = trapezoid(&i, h);
        let w1: Vec<f64> = i.iter().zip(&xs).map(|(p, x)| p * x).collect();
        let mean = trapezoid(&w1, h) / m0;
        let w2: Vec<f64> = i.iter().zip(&xs).map(|(p, x)| p * (x - mean).powi(2)).collect();
        (trapezoid(&w2, h) / m0).sqrt()
    }

    /// Intensity FWHM in time for a transform-limited Gaussian of the same
    /// spectral variance, `√(ζ/2)/σ_ω`.
    pub fn duration(&self) -> f64 {
        (0.5 * ZETA).sqrt() / self.spectral_width()
    }
}

fn check_pair(transfer: &TransferSpectrum, signal: &SignalSpec) -> Result<()> {
    if transfer.grid != signal.grid {
        return Err(Error::InvalidInput("transfer and signal live on different grids".into()));
    }
    if 1.0 - signal.coverage > COVERAGE_LIMIT {
        return Err(Error::Coverage { outside: 1.0 - signal.coverage });
    }
    Ok(())
}

/// `κ̃ Γ(ω) f_p(ω)` per bin.
pub fn retrieve_spectrum(transfer: &TransferSpectrum, signal: &SignalSpec) -> Result<Vec<Complex64>> {
    check_pair(transfer, signal)?;
    Ok(transfer.total().zip(&signal.amplitude).map(|(g, f)| g * f).collect())
}

/// Sampled complex field in time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace {
    pub times: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    pub dt: f64,
}

impl TimeTrace {
    /// `Σ |A|² dt`.
    pub fn energy(&self) -> f64 {
        self.amplitude.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dt
    }

    pub fn peak_index(&self) -> usize {
        self.amplitude
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn peak_time(&self) -> f64 {
        self.times[self.peak_index()]
    }

    /// Full width at half maximum of `|A|²`, linearly interpolated.
    pub fn fwhm(&self) -> f64 {
        half_width(&self.amplitude.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>(), self.dt)
    }
}

pub(crate) fn half_width(p: &[f64], dt: f64) -> f64 {
    let Some((k, &peak)) = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return 0.0;
    };
    if peak <= 0.0 {
        return 0.0;
    }
    let half = 0.5 * peak;
    let mut left = 0.0;
    for i in (0..k).rev() {
        if p[i] < half {
            left = (k - i - 1) as f64 + (p[i + 1] - half) / (p[i + 1] - p[i]);
            break;
        }
    }
    let mut right = 0.0;
    for i in k + 1..p.len() {
        if p[i] < half {
            right = (i - k - 1) as f64 + (p[i - 1] - half) / (p[i - 1] - p[i]);
            break;
        }
    }
    (left + right) * dt
}

/// Time-domain amplitude `A(t) = ∫ (dω/2π) X(ω) e^{−iω(t−T)}` of a spectrum
/// on `grid`, centered on `delay` and zero-padded to a power of two with at
/// least `min_len` samples.
pub fn spectrum_to_time(grid: DetuningGrid, spectrum: &[Complex64], delay: f64, min_len: usize) -> TimeTrace {
    let h = grid.spacing();
    let big = min_len.max(spectrum.len()).next_power_of_two();
    let dt = 2.0 * PI / (big as f64 * h);
    let t0 = -0.5 * big as f64 * dt;
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); big];
    for (k, (x, w)) in spectrum.iter().zip(grid.points()).enumerate() {
        buf[k] = x * Complex64::from_polar(1.0, -w * t0);
    }
    FftPlanner::new().plan_fft_forward(big).process(&mut buf);
    let lo = grid.lo();
    let scale = h / (2.0 * PI);
    let amplitude = buf
        .iter()
        .enumerate()
        .map(|(j, z)| z * Complex64::from_polar(scale, -lo * j as f64 * dt))
        .collect();
    let times = (0..big).map(|j| delay + t0 + j as f64 * dt).collect();
    TimeTrace { times, amplitude, dt }
}

/// Retrieved echo in time, delayed by the storage time `delay`.
///
/// The frequency grid must span a time window of at least
/// [`WINDOW_FACTOR`] signal durations; the transform is padded so that the
/// time step is at most a [`RESOLUTION_FACTOR`]th of the duration.
pub fn retrieve_time(transfer: &TransferSpectrum, signal: &SignalSpec, delay: f64) -> Result<TimeTrace> {
    let spectrum = retrieve_spectrum(transfer, signal)?;
    let h = signal.grid.spacing();
    let duration = signal.duration();
    let window = 2.0 * PI / h;
    if !(window >= WINDOW_FACTOR * duration) {
        return Err(Error::Sampling(format!(
            "time window {window} shorter than {WINDOW_FACTOR} signal durations ({duration})"
        )));
    }
    let min_len = (RESOLUTION_FACTOR * window / duration).ceil() as usize;
    Ok(spectrum_to_time(signal.grid, &spectrum, delay, min_len))
}

/// Input pulse in time, centered on zero, sampled like [`retrieve_time`].
pub fn signal_time(signal: &SignalSpec) -> Result<TimeTrace> {
    let transfer = TransferSpectrum::constant(signal.grid, ONE, ONE);
    retrieve_time(&transfer, signal, 0.0)
}
