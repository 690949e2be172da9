//! Modified comb: rectangular band flanked by two Lorentzian side lines at
//! `±Δ_o/2` whose dispersion cancels the band's.

use std::f64::consts::PI;

use super::{check_depth, rect_afc_response_closed, MediumResponse};
use crate::error::{Error, Result, Warning};
use crate::optimize::{golden_section, NelderMead};
use crate::profiles::{DetuningGrid, LineShape};

/// Side-line half width used when the caller has no preference.
pub const DEFAULT_SIDE_HWHM: f64 = 0.01;
/// Residual-absorption ratio above which side-line absorption is kept in `a(ω)`.
pub const RESIDUAL_WARNING: f64 = 0.1;
/// Fraction of the gap `Δ_o − 1` above which the side-line width draws a warning.
const WIDTH_WARNING: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MafcDesign {
    /// Center separation `Δ_o` of the two side lines.
    pub separation: f64,
    /// Side-line weight `f_s κ(0)δ` relative to the band height.
    pub strength: f64,
    /// Side-line half width `Ω`.
    pub hwhm: f64,
}

impl MafcDesign {
    pub fn new(separation: f64, strength: f64, hwhm: f64) -> Result<(Self, Vec<Warning>)> {
        let d = Self { separation, strength, hwhm };
        let w = d.validate()?;
        Ok((d, w))
    }

    pub fn validate(&self) -> Result<Vec<Warning>> {
        if !(self.separation.is_finite() && self.separation > 1.0) {
            return Err(Error::InvalidInput(format!(
                "side lines must sit outside the band: Δ_o = {} <= 1",
                self.separation
            )));
        }
        if !(self.strength.is_finite() && self.strength >= 0.0) {
            return Err(Error::InvalidInput(format!("side-line strength must be >= 0, got {}", self.strength)));
        }
        let gap = self.separation - 1.0;
        if !(self.hwhm > 0.0 && self.hwhm < gap) {
            return Err(Error::InvalidInput(format!(
                "side-line width must satisfy 0 < Ω < Δ_o − 1 = {gap}, got {}",
                self.hwhm
            )));
        }
        let mut warnings = Vec::new();
        if self.hwhm > WIDTH_WARNING * gap {
            warnings.push(Warning::SideLineWidth { omega: self.hwhm, gap });
        }
        let ratio = residual_absorption_ratio(self);
        if ratio >= RESIDUAL_WARNING {
            warnings.push(Warning::ResidualAbsorption { ratio });
        }
        Ok(warnings)
    }

    pub fn center(&self) -> f64 {
        0.5 * self.separation
    }

    /// Side-line absorption inside the band relative to the band height.
    pub fn side_absorption(&self, omega: f64) -> f64 {
        let l = LineShape::Lorentzian { hwhm: self.hwhm };
        let c = self.center();
        self.strength * (l.density(omega - c) + l.density(omega + c))
    }
}

/// Third-order cancellation design `Δ_o = √3`, `f_s κ(0)δ = 3/2`.
pub fn compensation_params(hwhm: f64) -> MafcDesign {
    MafcDesign { separation: 3f64.sqrt(), strength: 1.5, hwhm }
}

/// `2α_s(0)/α_o = (4/π) f_s κ(0)δ Ω / (Δ_o/2)²`.
pub fn residual_absorption_ratio(design: &MafcDesign) -> f64 {
    let c = design.center();
    4.0 / PI * design.strength * design.hwhm / (c * c)
}

/// Side-line contribution `r_s(ω) = (1/π) f 2ω / ((Δ_o/2)² − ω²)`.
pub fn sideline_response_closed(omega: f64, design: &MafcDesign) -> Result<f64> {
    let c = design.center();
    let denom = c * c - omega * omega;
    if !omega.is_finite() {
        return Err(Error::InvalidInput(format!("detuning must be finite, got {omega}")));
    }
    if denom.abs() <= 1e-14 * c * c {
        return Err(Error::Pole { omega });
    }
    Ok(design.strength * 2.0 * omega / (PI * denom))
}

fn composite(omega: f64, design: &MafcDesign) -> Result<(f64, f64, f64)> {
    let (_, ra) = rect_afc_response_closed(omega)?;
    let rs = sideline_response_closed(omega, design)?;
    Ok((ra, rs, ra + rs))
}

/// Coefficient of `ω^k` in the Taylor series of `r_M` about zero.
pub fn series_coefficient(design: &MafcDesign, k: u32) -> f64 {
    if k % 2 == 0 {
        return 0.0;
    }
    let c2 = design.center().powi(2);
    let band = -2.0 / PI * 2f64.powi(k as i32) / k as f64;
    let side = 2.0 * design.strength / PI / c2.powi((k as i32 + 1) / 2);
    band + side
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRow {
    pub omega: f64,
    pub r_a: f64,
    pub r_s: f64,
    pub r_m: f64,
}

/// `(r_A, r_s, r_M)` on the in-band nodes of `grid`.
pub fn dispersion_components(design: &MafcDesign, grid: DetuningGrid) -> Vec<DispersionRow> {
    grid.points()
        .filter_map(|omega| {
            composite(omega, design)
                .ok()
                .map(|(r_a, r_s, r_m)| DispersionRow { omega, r_a, r_s, r_m })
        })
        .collect()
}

/// Composite response of the modified comb, hard-edged at `|ω| = 1/2`.
///
/// While the residual-absorption ratio stays below [`RESIDUAL_WARNING`] the
/// in-band absorption is exactly 1. Otherwise the side-line absorption is
/// added to `a` and `r` is rescaled accordingly; a warning is attached.
pub fn mafc_response(design: &MafcDesign, grid: DetuningGrid, d0: f64) -> Result<MediumResponse> {
    check_depth(d0)?;
    let warnings = design.validate()?;
    let keep_side = residual_absorption_ratio(design) >= RESIDUAL_WARNING;
    let n = grid.len();
    let mut a = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut r_defined = vec![false; n];
    for (i, w) in grid.points().enumerate() {
        if let Ok((_, _, rm)) = composite(w, design) {
            let extra = if keep_side { design.side_absorption(w) } else { 0.0 };
            a[i] = 1.0 + extra;
            r[i] = rm / (1.0 + extra);
            r_defined[i] = true;
        }
    }
    Ok(MediumResponse { grid, a, r, r_defined, d0, hard_edge: Some(0.5), warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompensationCriterion {
    /// Minimize `max |r_M|` over the band.
    Minimax,
    /// Minimize `max |r_M(ω)| (w/ω)⁵`, which favors cancelling the low orders.
    LowOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub design: MafcDesign,
    pub objective: f64,
    /// Minimax `max |r_M|` over the band for the returned design.
    pub max_abs_r: f64,
    pub iterations: usize,
}

const BAND_SAMPLES: usize = 400;

fn max_abs_r(separation: f64, strength: f64, half_width: f64, weighted: bool) -> f64 {
    let design = MafcDesign { separation, strength, hwhm: 0.0 };
    let mut worst = 0.0f64;
    for j in 1..=BAND_SAMPLES {
        let omega = half_width * j as f64 / BAND_SAMPLES as f64;
        let Ok((_, _, rm)) = composite(omega, &design) else {
            return f64::INFINITY;
        };
        let scale = if weighted { (BAND_SAMPLES as f64 / j as f64).powi(5) } else { 1.0 };
        worst = worst.max(rm.abs() * scale);
    }
    worst
}

/// Optimize `(Δ_o, f_s κ(0)δ)` over the band `|ω| ≤ half_width`, starting
/// from [`compensation_params`].
pub fn optimize_compensation(half_width: f64, hwhm: f64, criterion: CompensationCriterion) -> Result<Optimized> {
    let seed = compensation_params(hwhm);
    optimize_compensation_from(half_width, hwhm, criterion, (seed.separation, seed.strength))
}

const SCAN_POINTS: usize = 64;
const SEPARATION_MAX: f64 = 4.0;

/// As [`optimize_compensation`]; the result is never worse than `start`.
///
/// `r_M` is affine in the strength, so for fixed `Δ_o` the objective is
/// convex in it and a golden-section search finds the best strength. The
/// outer problem in `Δ_o` is scanned, bracketed and refined the same way,
/// and the pair is finally polished with Nelder–Mead.
pub fn optimize_compensation_from(
    half_width: f64,
    hwhm: f64,
    criterion: CompensationCriterion,
    start: (f64, f64),
) -> Result<Optimized> {
    if !(half_width > 0.0 && half_width < 0.5) {
        return Err(Error::InvalidInput(format!("band half width must lie in (0, 1/2), got {half_width}")));
    }
    if !(hwhm > 0.0 && hwhm < SEPARATION_MAX - 1.0) {
        return Err(Error::InvalidInput(format!("side-line width out of range, got {hwhm}")));
    }
    let weighted = criterion == CompensationCriterion::LowOrder;
    let lower = (1.0 + hwhm).max(2.0 * half_width) * (1.0 + 1e-9);
    let objective = |sep: f64, strength: f64| {
        if sep <= lower || strength < 0.0 {
            return f64::INFINITY;
        }
        max_abs_r(sep, strength, half_width, weighted)
    };
    let best_strength = |sep: f64| {
        // the first-order cancellation 2c² sits well inside this bracket
        let top = sep * sep + 1.0;
        golden_section(|f| objective(sep, f), 0.0, top, 1e-12)
    };
    let h = (SEPARATION_MAX - lower) / SCAN_POINTS as f64;
    let scan: Vec<(f64, f64)> = (1..=SCAN_POINTS)
        .map(|i| {
            let sep = lower + i as f64 * h;
            (sep, best_strength(sep).1)
        })
        .collect();
    let (k, _) = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty scan");
    let lo = scan[k].0 - h;
    let hi = (scan[k].0 + h).min(SEPARATION_MAX);
    let (sep, _) = golden_section(|s| best_strength(s).1, lo.max(lower), hi, 1e-12);
    let (strength, _) = best_strength(sep);

    let nm = NelderMead { max_iterations: 5_000, x_tolerance: 1e-12 };
    let polished = nm.minimize(|x| objective(x[0], x[1]), &[sep, strength], &[1e-4, 1e-4])?;
    let mut x = polished.x;
    let mut value = polished.value;
    let from_start = objective(start.0, start.1);
    if from_start < value {
        x = vec![start.0, start.1];
        value = from_start;
    }
    let design = MafcDesign { separation: x[0], strength: x[1], hwhm };
    design.validate()?;
    Ok(Optimized {
        design,
        objective: value,
        max_abs_r: max_abs_r(x[0], x[1], half_width, false),
        iterations: polished.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design() -> MafcDesign {
        compensation_params(DEFAULT_SIDE_HWHM)
    }

    #[test]
    fn analytic_design_values() {
        let d = design();
        assert!((d.separation - 1.7321).abs() < 1e-4);
        assert_eq!(d.strength, 1.5);
        assert!(d.validate().unwrap().is_empty());
    }

    #[test]
    fn low_orders_cancel() {
        let d = design();
        assert!(series_coefficient(&d, 1).abs() < 1e-14);
        assert!(series_coefficient(&d, 3).abs() < 1e-8);
        let c5 = series_coefficient(&d, 5);
        assert!((c5 + 256.0 / (45.0 * PI)).abs() < 1e-12);
        assert_eq!(series_coefficient(&d, 4), 0.0);
    }

    #[test]
    fn series_matches_direct_evaluation() {
        let d = MafcDesign { separation: 2.2, strength: 0.7, hwhm: 0.01 };
        let w: f64 = 0.02;
        let (_, _, rm) = composite(w, &d).unwrap();
        let sum: f64 = (1..=9).step_by(2).map(|k| series_coefficient(&d, k) * w.powi(k as i32)).sum();
        assert!((rm - sum).abs() < 1e-14);
    }

    #[test]
    fn side_lines_oppose_band_dispersion() {
        let d = design();
        for w in [0.05, 0.2, 0.44] {
            let (ra, rs, _) = composite(w, &d).unwrap();
            assert!(ra < 0.0 && rs > 0.0);
        }
        assert_eq!(sideline_response_closed(0.0, &d).unwrap(), 0.0);
        assert!(matches!(sideline_response_closed(d.center(), &d), Err(Error::Pole { .. })));
    }

    #[test]
    fn residual_ratio_examples() {
        let d = design();
        assert!((residual_absorption_ratio(&d) - 0.0254648).abs() < 1e-6);
        let wide = compensation_params(0.1);
        assert!((residual_absorption_ratio(&wide) - 0.254648).abs() < 1e-5);
        assert!(wide
            .validate()
            .unwrap()
            .iter()
            .any(|w| matches!(w, Warning::ResidualAbsorption { .. })));
    }

    #[test]
    fn design_validation() {
        assert!(MafcDesign::new(0.9, 1.5, 0.01).is_err());
        assert!(MafcDesign::new(1.2, 1.5, 0.3).is_err());
        let (_, w) = MafcDesign::new(1.2, 1.5, 0.05).unwrap();
        assert!(w.iter().any(|w| matches!(w, Warning::SideLineWidth { .. })));
    }

    #[test]
    fn response_in_and_out_of_band() {
        let grid = DetuningGrid::with_spacing(0.8, 0.01).unwrap();
        let resp = mafc_response(&design(), grid, f64::INFINITY).unwrap();
        let mid = grid.nearest(0.0).unwrap();
        assert_eq!(resp.a[mid], 1.0);
        assert_eq!(resp.sample(0.6), (0.0, 0.0));
        let worst = (0..grid.len())
            .filter(|&i| grid.point(i).abs() <= 0.3)
            .map(|i| resp.r[i].abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.02);
        assert!(resp.warnings.is_empty());
        let strong = mafc_response(&compensation_params(0.1), grid, 5.0).unwrap();
        assert!(strong.a[mid] > 1.0);
        assert!(!strong.warnings.is_empty());
    }

    #[test]
    fn low_order_optimum_is_the_analytic_design() {
        let o = optimize_compensation_from(0.25, 0.01, CompensationCriterion::LowOrder, (1.5, 1.0)).unwrap();
        assert!((o.design.separation / 3f64.sqrt() - 1.0).abs() < 0.01, "{o:?}");
        assert!((o.design.strength / 1.5 - 1.0).abs() < 0.01, "{o:?}");
    }

    #[test]
    fn minimax_never_loses_to_the_seed() {
        for w in [0.01, 0.1, 0.25, 0.45] {
            let seed = compensation_params(0.01);
            let seeded = max_abs_r(seed.separation, seed.strength, w, false);
            let o = optimize_compensation(w, 0.01, CompensationCriterion::Minimax).unwrap();
            assert!(o.max_abs_r <= seeded, "w = {w}: {} > {seeded}", o.max_abs_r);
        }
        let o = optimize_compensation(0.25, 0.01, CompensationCriterion::Minimax).unwrap();
        assert!((o.design.separation - 1.65341).abs() < 1e-3, "{o:?}");
        assert!((o.design.strength - 1.36373).abs() < 1e-3, "{o:?}");
    }
}
