//! Normalized line shapes, uniform detuning grids and sampled comb profiles.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result, Warning};
use crate::quad::trapezoid;
use crate::ZETA;

/// Envelope weight below which comb teeth are dropped (relative to the envelope peak).
pub const TOOTH_TRUNCATION: f64 = 1e-6;
/// Ratio above which `b/δ` or `δ/Δ_in` triggers a separation warning.
pub const SEPARATION_WARNING: f64 = 0.2;
/// Minimum number of grid samples per tooth width.
pub const SAMPLES_PER_TOOTH: f64 = 5.0;

/// Uniform detuning grid `lo, lo + h, …, hi` with `n ≥ 2` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningGrid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl DetuningGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidInput("grid bounds must be finite".into()));
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!("grid needs n >= 2, got {n}")));
        }
        if hi <= lo {
            return Err(Error::InvalidInput(format!("grid bounds not increasing: {lo} >= {hi}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// Grid on `[-half_width, half_width]`. Odd `n` places `ω = 0` on a node exactly.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Symmetric odd grid whose spacing divides `half_width` exactly.
    pub fn with_spacing(half_width: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && half_width > 0.0) {
            return Err(Error::InvalidInput("spacing and half width must be positive".into()));
        }
        let half = (half_width / spacing).round() as usize;
        Self::symmetric(half as f64 * spacing, 2 * half.max(1) + 1)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// Node `i`, computed so that symmetric grids are exactly antisymmetric.
    pub fn point(&self, i: usize) -> f64 {
        let m = (self.n - 1) as f64;
        let i = i as f64;
        (self.lo * (m - i) + self.hi * i) / m
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.lo == -self.hi
    }

    /// Fractional index of `omega`; `None` outside the grid.
    pub fn locate(&self, omega: f64) -> Option<(usize, f64)> {
        if !(omega >= self.lo && omega <= self.hi) {
            return None;
        }
        let x = (omega - self.lo) / self.spacing();
        let i = (x.floor() as usize).min(self.n - 2);
        Some((i, x - i as f64))
    }

    pub fn nearest(&self, omega: f64) -> Option<usize> {
        self.locate(omega).map(|(i, t)| if t > 0.5 { i + 1 } else { i })
    }

    /// Same bounds with the spacing halved.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n - 1, ..*self }
    }
}

/// Unit-area line shape centered at zero. Widths are in `Δ_in` units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineShape {
    Gaussian { fwhm: f64 },
    Lorentzian { hwhm: f64 },
    Rectangular { width: f64 },
}

impl LineShape {
    pub fn gaussian(fwhm: f64) -> Result<Self> {
        Self::Gaussian { fwhm }.validated()
    }

    pub fn lorentzian(hwhm: f64) -> Result<Self> {
        Self::Lorentzian { hwhm }.validated()
    }

    pub fn rectangular(width: f64) -> Result<Self> {
        Self::Rectangular { width }.validated()
    }

    fn validated(self) -> Result<Self> {
        let w = self.parameter();
        if w > 0.0 && w.is_finite() {
            Ok(self)
        } else {
            Err(Error::InvalidInput(format!("line width must be positive and finite, got {w}")))
        }
    }

    fn parameter(&self) -> f64 {
        match *self {
            LineShape::Gaussian { fwhm } => fwhm,
            LineShape::Lorentzian { hwhm } => hwhm,
            LineShape::Rectangular { width } => width,
        }
    }

    /// Full width at half maximum.
    pub fn fwhm(&self) -> f64 {
        match *self {
            LineShape::Gaussian { fwhm } => fwhm,
            LineShape::Lorentzian { hwhm } => 2.0 * hwhm,
            LineShape::Rectangular { width } => width,
        }
    }

    /// Normalized density. Rectangular edges take half the plateau value.
    pub fn density(&self, delta: f64) -> f64 {
        match *self {
            LineShape::Gaussian { fwhm } => {
                (ZETA / PI).sqrt() / fwhm * (-ZETA * delta * delta / (fwhm * fwhm)).exp()
            }
            LineShape::Lorentzian { hwhm } => hwhm / (PI * (delta * delta + hwhm * hwhm)),
            LineShape::Rectangular { width } => {
                let edge = 0.5 * width;
                let d = delta.abs();
                if d < edge {
                    1.0 / width
                } else if d == edge {
                    0.5 / width
                } else {
                    0.0
                }
            }
        }
    }

    pub fn peak(&self) -> f64 {
        self.density(0.0)
    }

    /// Half width of the region outside which the density is below `rel` of its peak.
    pub fn support_half_width(&self, rel: f64) -> f64 {
        match *self {
            LineShape::Gaussian { fwhm } => fwhm * ((1.0 / rel).ln() / ZETA).sqrt(),
            LineShape::Lorentzian { hwhm } => hwhm * (1.0 / rel - 1.0).max(0.0).sqrt(),
            LineShape::Rectangular { width } => 0.5 * width,
        }
    }

    /// Fourier transform `κ̃(t) = ∫ dΔ κ(Δ) e^{-iΔt}`; real for these even shapes.
    pub fn fourier(&self, t: f64) -> Complex64 {
        let v = match *self {
            LineShape::Gaussian { fwhm } => (-t * t * fwhm * fwhm / (4.0 * ZETA)).exp(),
            LineShape::Lorentzian { hwhm } => (-hwhm * t.abs()).exp(),
            LineShape::Rectangular { width } => {
                let x = 0.5 * width * t;
                if x == 0.0 {
                    1.0
                } else {
                    x.sin() / x
                }
            }
        };
        Complex64::new(v, 0.0)
    }
}

/// Density of `shape` at `delta`, rejecting non-finite detunings.
pub fn eval_shape(shape: &LineShape, delta: f64) -> Result<f64> {
    if !delta.is_finite() {
        return Err(Error::InvalidInput(format!("detuning must be finite, got {delta}")));
    }
    Ok(shape.density(delta))
}

/// Tooth dephasing factor `κ̃(t)`; `κ̃(0) = 1`.
pub fn tooth_transform(tooth: &LineShape, t: f64) -> Complex64 {
    tooth.fourier(t)
}

/// Engraved comb: envelope `G`, tooth profile `κ`, spacing `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombSpec {
    pub envelope: LineShape,
    pub tooth: LineShape,
    pub spacing: f64,
}

impl CombSpec {
    /// Requires `b < δ < Δ_env`; returns separation warnings alongside.
    pub fn new(envelope: LineShape, tooth: LineShape, spacing: f64) -> Result<(Self, Vec<Warning>)> {
        let spec = Self { envelope, tooth, spacing };
        let warnings = spec.validate()?;
        Ok((spec, warnings))
    }

    pub fn validate(&self) -> Result<Vec<Warning>> {
        let b = self.tooth_width();
        let env = self.envelope.fwhm();
        if !(self.spacing.is_finite() && b < self.spacing && self.spacing < env) {
            return Err(Error::InvalidInput(format!(
                "comb requires b < δ < Δ_in, got b = {b}, δ = {}, Δ_in = {env}",
                self.spacing
            )));
        }
        let mut warnings = Vec::new();
        if b / self.spacing > SEPARATION_WARNING {
            warnings.push(Warning::CombRatio { name: "b/δ", ratio: b / self.spacing });
        }
        if self.spacing / env > SEPARATION_WARNING {
            warnings.push(Warning::CombRatio { name: "δ/Δ_in", ratio: self.spacing / env });
        }
        Ok(warnings)
    }

    pub fn tooth_width(&self) -> f64 {
        self.tooth.fwhm()
    }

    pub fn finesse(&self) -> f64 {
        self.spacing / self.tooth_width()
    }

    /// `κ̃(2π/δ)`, the tooth dephasing factor at the first revival.
    pub fn dephasing(&self) -> Complex64 {
        self.tooth.fourier(self.revival_time())
    }

    pub fn revival_time(&self) -> f64 {
        2.0 * PI / self.spacing
    }

    /// `1/(κ(0)δ)`, the fraction of the initial line kept by the engraving.
    pub fn engraving_factor(&self) -> f64 {
        1.0 / (self.tooth.peak() * self.spacing)
    }

    /// Tooth indices whose envelope weight exceeds [`TOOTH_TRUNCATION`] of the peak.
    pub fn tooth_indices(&self) -> std::ops::RangeInclusive<i64> {
        let reach = self.envelope.support_half_width(TOOTH_TRUNCATION);
        let n = (reach / self.spacing + 1e-9).floor() as i64;
        -n..=n
    }

    /// `C(Δ) = G(Δ) Σₙ κ(Δ − nδ) / κ(0)`.
    pub fn density(&self, delta: f64) -> f64 {
        let g = self.envelope.density(delta);
        if g == 0.0 {
            return 0.0;
        }
        let k0 = self.tooth.peak();
        let teeth = self.tooth_indices();
        // nearest teeth dominate; Lorentzian teeth need the full sum
        let near = match self.tooth {
            LineShape::Lorentzian { .. } => None,
            _ => {
                let reach = self.tooth.support_half_width(1e-17);
                Some((reach / self.spacing).ceil() as i64 + 1)
            }
        };
        let center = (delta / self.spacing).round() as i64;
        let (lo, hi) = match near {
            Some(k) => ((center - k).max(*teeth.start()), (center + k).min(*teeth.end())),
            None => (*teeth.start(), *teeth.end()),
        };
        let sum: f64 = (lo..=hi)
            .map(|n| self.tooth.density(delta - n as f64 * self.spacing))
            .sum();
        g * sum / k0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileRole {
    Envelope,
    Tooth,
    Comb,
    SideLines,
    Composite,
}

impl ProfileRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileRole::Envelope => "envelope",
            ProfileRole::Tooth => "tooth",
            ProfileRole::Comb => "comb",
            ProfileRole::SideLines => "side-lines",
            ProfileRole::Composite => "composite",
        }
    }
}

/// Non-negative spectral density sampled on a [`DetuningGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    pub grid: DetuningGrid,
    pub values: Vec<f64>,
    pub role: ProfileRole,
}

impl SampledProfile {
    pub fn from_values(grid: DetuningGrid, values: Vec<f64>, role: ProfileRole) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!("densities must be finite and >= 0, got {v}")));
        }
        Ok(Self { grid, values, role })
    }

    /// `shape` centered at `center`, sampled on `grid`.
    pub fn sample(shape: &LineShape, center: f64, grid: DetuningGrid, role: ProfileRole) -> Self {
        let values = grid.points().map(|d| shape.density(d - center)).collect();
        Self { grid, values, role }
    }

    /// Pair of side lines `G_s(Δ + c) + G_s(Δ − c)` scaled by `weight`.
    pub fn side_lines(line: &LineShape, separation: f64, weight: f64, grid: DetuningGrid) -> Self {
        let c = 0.5 * separation;
        let values = grid
            .points()
            .map(|d| weight * (line.density(d - c) + line.density(d + c)))
            .collect();
        Self { grid, values, role: ProfileRole::SideLines }
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.grid.spacing())
    }

    /// Linear interpolation; zero outside the grid.
    pub fn value_at(&self, omega: f64) -> f64 {
        match self.grid.locate(omega) {
            Some((i, t)) => self.values[i] * (1.0 - t) + self.values[i + 1] * t,
            None => 0.0,
        }
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Largest edge sample relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        self.values[0].max(self.values[self.values.len() - 1]) / peak
    }

    /// `self + weight · other` on a shared grid.
    pub fn combined(&self, other: &SampledProfile, weight: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput("profiles live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + weight * b)
            .collect();
        Ok(Self { grid: self.grid, values, role: ProfileRole::Composite })
    }
}

/// Sample the engraved comb `C(Δ)` on `grid`.
pub fn build_comb(spec: &CombSpec, grid: DetuningGrid) -> Result<SampledProfile> {
    let b = spec.tooth_width();
    if grid.spacing() > b / SAMPLES_PER_TOOTH {
        let required_n = ((grid.hi() - grid.lo()) * SAMPLES_PER_TOOTH / b).ceil() as usize + 1;
        return Err(Error::Resolution { required_n });
    }
    let values = grid.points().map(|d| spec.density(d)).collect();
    Ok(SampledProfile { grid, values, role: ProfileRole::Comb })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_comb() -> CombSpec {
        CombSpec::new(
            LineShape::gaussian(1.0).unwrap(),
            LineShape::gaussian(0.005).unwrap(),
            0.05,
        )
        .unwrap()
        .0
    }

    #[test]
    fn symmetric_odd_grid_contains_zero_and_is_antisymmetric() {
        let g = DetuningGrid::symmetric(3.0, 601).unwrap();
        assert_eq!(g.point(300), 0.0);
        for i in 0..g.len() {
            assert_eq!(g.point(i), -g.point(g.len() - 1 - i));
        }
        assert!(DetuningGrid::new(1.0, 0.0, 10).is_err());
        assert!(DetuningGrid::new(0.0, 1.0, 1).is_err());
        let s = DetuningGrid::with_spacing(2.0, 0.001).unwrap();
        assert_eq!(s.point(1500), -0.5);
    }

    #[test]
    fn shape_values() {
        let g = LineShape::gaussian(1.0).unwrap();
        assert!((eval_shape(&g, 0.0).unwrap() - 0.939437278699651).abs() < 1e-12);
        let r = LineShape::rectangular(1.0).unwrap();
        assert_eq!(eval_shape(&r, 0.6).unwrap(), 0.0);
        assert_eq!(eval_shape(&r, 0.5).unwrap(), 0.5);
        let l = LineShape::lorentzian(0.2).unwrap();
        assert!((eval_shape(&l, 0.0).unwrap() - 1.0 / (PI * 0.2)).abs() < 1e-14);
        assert!(eval_shape(&g, f64::NAN).is_err());
        assert!(eval_shape(&g, f64::INFINITY).is_err());
        assert!(LineShape::gaussian(0.0).is_err());
        assert!(LineShape::lorentzian(-1.0).is_err());
    }

    #[test]
    fn shapes_have_unit_area() {
        for shape in [
            LineShape::gaussian(0.7).unwrap(),
            LineShape::rectangular(0.75).unwrap(),
        ] {
            // binary spacing puts the rectangular edges on nodes
            let grid = DetuningGrid::with_spacing(4.0 * shape.fwhm(), 1.0 / 8192.0).unwrap();
            let p = SampledProfile::sample(&shape, 0.0, grid, ProfileRole::Envelope);
            assert!((p.integral() - 1.0).abs() < 1e-6, "{shape:?}: {}", p.integral());
        }
        // Lorentzian tails carry 1/x mass; over ±4·FWHM the missing part is
        // (2/π)·atan-complement, so compare against the analytic window mass.
        let l = LineShape::lorentzian(0.1).unwrap();
        let grid = DetuningGrid::with_spacing(0.8, 1e-4).unwrap();
        let p = SampledProfile::sample(&l, 0.0, grid, ProfileRole::Envelope);
        let window = 2.0 / PI * (0.8f64 / 0.1).atan();
        assert!((p.integral() - window).abs() < 1e-6);
    }

    #[test]
    fn tooth_transform_examples() {
        let g = LineShape::gaussian(0.005).unwrap();
        assert_eq!(tooth_transform(&g, 0.0), Complex64::new(1.0, 0.0));
        let comb = gaussian_comb();
        let expected = (-PI * PI / (ZETA * 100.0)).exp();
        assert!((comb.dephasing().re - expected).abs() < 1e-15);
        assert!((expected - 0.9650).abs() < 5e-5);
        let r = LineShape::rectangular(0.005).unwrap();
        let x = PI * 0.005 / 0.05;
        assert!((tooth_transform(&r, 2.0 * PI / 0.05).re - x.sin() / x).abs() < 1e-15);
    }

    #[test]
    fn comb_requires_strict_ordering() {
        let env = LineShape::gaussian(1.0).unwrap();
        assert!(CombSpec::new(env, LineShape::gaussian(0.06).unwrap(), 0.05).is_err());
        assert!(CombSpec::new(env, LineShape::gaussian(0.005).unwrap(), 1.5).is_err());
        let (_, w) = CombSpec::new(env, LineShape::gaussian(0.1).unwrap(), 0.3).unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn comb_tooth_tops_follow_the_envelope() {
        let spec = gaussian_comb();
        let grid = DetuningGrid::with_spacing(3.0, 0.0005).unwrap();
        let comb = build_comb(&spec, grid).unwrap();
        let g = spec.envelope;
        let zero = grid.nearest(0.0).unwrap();
        assert!((comb.values[zero] / g.density(0.0) - 1.0).abs() < 0.01);
        for n in [3, 10] {
            let d = n as f64 * spec.spacing;
            let i = grid.nearest(d).unwrap();
            assert!((comb.values[i] / g.density(d) - 1.0).abs() < 0.01);
        }
        let mid = grid.nearest(0.025).unwrap();
        let bound = (-ZETA * (0.05f64 / (2.0 * 0.005)).powi(2)).exp() + 1e-12;
        assert!(comb.values[mid] / g.density(0.025) <= bound);
    }

    #[test]
    fn comb_mass_matches_engraving_factor() {
        let spec = gaussian_comb();
        let grid = DetuningGrid::with_spacing(3.0, 0.0005).unwrap();
        let comb = build_comb(&spec, grid).unwrap();
        let expected = 0.005 / 0.05 * (PI / ZETA).sqrt();
        assert!((spec.engraving_factor() - expected).abs() < 1e-14);
        assert!((comb.integral() / expected - 1.0).abs() < 0.02);
    }

    #[test]
    fn under_resolved_grid_reports_required_size() {
        let spec = gaussian_comb();
        let grid = DetuningGrid::symmetric(3.0, 1001).unwrap();
        match build_comb(&spec, grid) {
            Err(Error::Resolution { required_n }) => {
                assert_eq!(required_n, 6001);
                let ok = DetuningGrid::symmetric(3.0, required_n).unwrap();
                assert!(build_comb(&spec, ok).is_ok());
            }
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn comb_is_stable_under_refinement() {
        let spec = gaussian_comb();
        let coarse = DetuningGrid::with_spacing(2.0, 0.001).unwrap();
        let fine = coarse.refined();
        let a = build_comb(&spec, coarse).unwrap();
        let b = build_comb(&spec, fine).unwrap();
        for n in [0.0, 0.25, 0.5] {
            let (i, j) = (coarse.nearest(n).unwrap(), fine.nearest(n).unwrap());
            assert!((a.values[i] / b.values[j] - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn rectangular_envelope_comb_stays_inside_the_band() {
        let (spec, _) = CombSpec::new(
            LineShape::rectangular(1.0).unwrap(),
            LineShape::gaussian(0.005).unwrap(),
            0.05,
        )
        .unwrap();
        assert_eq!(spec.tooth_indices(), -10..=10);
        let grid = DetuningGrid::with_spacing(1.0, 0.0005).unwrap();
        let comb = build_comb(&spec, grid).unwrap();
        assert_eq!(comb.value_at(0.7), 0.0);
        assert!(comb.value_at(0.0) > 0.99);
    }
}
