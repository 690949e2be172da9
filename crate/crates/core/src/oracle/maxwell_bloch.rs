//! Linearized Maxwell–Bloch integration for a discretized atomic ensemble.
//!
//! Scaled coherences `s_k(τ, z)` of atoms at detuning `Δ_k` and the field
//! `A(τ, z)` obey, on `z ∈ [0, 1]`,
//!
//! ```text
//! ∂_τ s_k = −iΔ_k s_k + A,        ±∂_z A = −K Σ_k w_k s_k,
//! ```
//!
//! with `+` for the forward probe and `−` for the backward retrieved field.
//! The coherences are advanced with an exponential integrator that is exact
//! for a field linear over each time step; the field is swept along `z` with
//! the implicit trapezoid rule. Coarse-grained, the medium transmits
//! `exp(−(d/2)(1 − i r))` with `d = 2πK⟨C⟩`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profiles::{CombSpec, LineShape};
use crate::response::MafcDesign;
use crate::ZETA;

/// Atom weights below this fraction of the largest one are dropped.
pub const WEIGHT_CUTOFF: f64 = 1e-7;
/// Required `dt · max|Δ|` bound.
pub const STEP_LIMIT: f64 = 0.1;
/// Minimum number of z slabs.
pub const MIN_SLABS: usize = 100;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Discretized ensemble: detunings, weights `C(Δ_k) dΔ`, z slabs and the
/// coupling `K` fixing the optical depth.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomGrid {
    pub detunings: Vec<f64>,
    pub weights: Vec<f64>,
    pub slabs: usize,
    pub coupling: f64,
    pub d0: f64,
    /// First rephasing time `2π/δ` for combs.
    pub revival: Option<f64>,
}

fn check_slabs(slabs: usize) -> Result<()> {
    if slabs < MIN_SLABS {
        return Err(Error::InvalidInput(format!("need at least {MIN_SLABS} slabs, got {slabs}")));
    }
    Ok(())
}

fn check_d0(d0: f64) -> Result<()> {
    if !(d0 > 0.0 && d0.is_finite()) {
        return Err(Error::InvalidInput(format!("oracle optical depth must be finite and > 0, got {d0}")));
    }
    Ok(())
}

fn prune(nodes: BTreeMap<i64, f64>, h: f64) -> (Vec<f64>, Vec<f64>) {
    let max = nodes.values().copied().fold(0.0, f64::max);
    nodes
        .into_iter()
        .filter(|(_, w)| *w > WEIGHT_CUTOFF * max)
        .map(|(k, w)| (k as f64 * h, w))
        .unzip()
}

/// Lattice step that divides the tooth spacing and resolves each tooth with
/// at least `bins_per_tooth` bins.
fn lattice_step(comb: &CombSpec, bins_per_tooth: usize) -> Result<(f64, i64)> {
    if bins_per_tooth < 5 {
        return Err(Error::InvalidInput(format!("need at least 5 bins per tooth, got {bins_per_tooth}")));
    }
    let per_spacing = (comb.spacing * bins_per_tooth as f64 / comb.tooth_width()).ceil() as i64;
    Ok((comb.spacing / per_spacing as f64, per_spacing))
}

fn comb_nodes(comb: &CombSpec, h: f64) -> BTreeMap<i64, f64> {
    let teeth = comb.tooth_indices();
    let reach = *teeth.end() as f64 * comb.spacing + comb.tooth.support_half_width(1e-12);
    let kmax = (reach / h).ceil() as i64;
    (-kmax..=kmax)
        .map(|k| (k, comb.density(k as f64 * h) * h))
        .filter(|(_, w)| *w > 0.0)
        .collect()
}

/// Mean density over one tooth period centered at zero.
fn coarse_density_at_zero(nodes: &BTreeMap<i64, f64>, per_spacing: i64, spacing: f64) -> f64 {
    let half = per_spacing / 2;
    let mut sum = 0.0;
    for (&k, &w) in nodes.range(-half..=half) {
        let edge = per_spacing % 2 == 0 && k.abs() == half;
        sum += if edge { 0.5 * w } else { w };
    }
    sum / spacing
}

impl AtomGrid {
    /// Ensemble with explicit coupling.
    pub fn new(detunings: Vec<f64>, weights: Vec<f64>, slabs: usize, coupling: f64) -> Result<Self> {
        check_slabs(slabs)?;
        if detunings.len() != weights.len() {
            return Err(Error::InvalidInput("detunings and weights must match".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || !(coupling >= 0.0) {
            return Err(Error::InvalidInput("weights and coupling must be >= 0".into()));
        }
        Ok(Self { detunings, weights, slabs, coupling, d0: f64::NAN, revival: None })
    }

    /// No atoms at all.
    pub fn vacuum(slabs: usize) -> Result<Self> {
        let mut g = Self::new(Vec::new(), Vec::new(), slabs, 0.0)?;
        g.d0 = 0.0;
        Ok(g)
    }

    /// Engraved comb on a lattice commensurate with the tooth spacing,
    /// calibrated so that the coarse-grained depth at `ω = 0` is `d0`.
    pub fn comb(comb: &CombSpec, bins_per_tooth: usize, slabs: usize, d0: f64) -> Result<Self> {
        check_slabs(slabs)?;
        check_d0(d0)?;
        let (h, per) = lattice_step(comb, bins_per_tooth)?;
        let nodes = comb_nodes(comb, h);
        let reference = coarse_density_at_zero(&nodes, per, comb.spacing);
        let (detunings, weights) = prune(nodes, h);
        Ok(Self {
            detunings,
            weights,
            slabs,
            coupling: d0 / (2.0 * PI * reference),
            d0,
            revival: Some(comb.revival_time()),
        })
    }

    /// Comb flanked by two Lorentzian side lines of weight `f_s κ(0)δ`
    /// relative to the comb band, sampled within `side_reach` of their centers.
    pub fn mafc(
        comb: &CombSpec,
        design: &MafcDesign,
        bins_per_tooth: usize,
        side_reach: f64,
        slabs: usize,
        d0: f64,
    ) -> Result<Self> {
        check_slabs(slabs)?;
        check_d0(d0)?;
        design.validate()?;
        let (h, per) = lattice_step(comb, bins_per_tooth)?;
        let mut nodes = comb_nodes(comb, h);
        let band = coarse_density_at_zero(&nodes, per, comb.spacing);
        let side = LineShape::lorentzian(design.hwhm)?;
        let c = design.center();
        for center in [-c, c] {
            let lo = ((center - side_reach) / h).ceil() as i64;
            let hi = ((center + side_reach) / h).floor() as i64;
            for k in lo..=hi {
                let w = design.strength * band * side.density(k as f64 * h - center) * h;
                *nodes.entry(k).or_insert(0.0) += w;
            }
        }
        let (detunings, weights) = prune(nodes, h);
        Ok(Self {
            detunings,
            weights,
            slabs,
            coupling: d0 / (2.0 * PI * band),
            d0,
            revival: Some(comb.revival_time()),
        })
    }

    /// Smooth single line sampled with spacing `h`, peak depth `d0`.
    pub fn line(shape: &LineShape, h: f64, slabs: usize, d0: f64) -> Result<Self> {
        check_slabs(slabs)?;
        check_d0(d0)?;
        if !(h > 0.0) {
            return Err(Error::InvalidInput("detuning step must be positive".into()));
        }
        let kmax = (shape.support_half_width(1e-9) / h).ceil() as i64;
        let nodes = (-kmax..=kmax).map(|k| (k, shape.density(k as f64 * h) * h)).collect();
        let (detunings, weights) = prune(nodes, h);
        Ok(Self {
            detunings,
            weights,
            slabs,
            coupling: d0 / (2.0 * PI * shape.peak()),
            d0,
            revival: None,
        })
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn max_detuning(&self) -> f64 {
        self.detunings.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Largest stable time step.
    pub fn max_step(&self) -> f64 {
        let m = self.max_detuning();
        if m == 0.0 {
            f64::INFINITY
        } else {
            STEP_LIMIT / m
        }
    }
}

/// Transform-limited Gaussian probe with intensity FWHM `fwhm` in frequency,
/// centered at time `center`; `∫|A|² dτ = 1/(2π)`, matching a unit-norm spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputPulse {
    pub fwhm: f64,
    pub center: f64,
}

impl InputPulse {
    pub fn new(fwhm: f64, center: f64) -> Result<Self> {
        if !(fwhm > 0.0 && fwhm.is_finite() && center.is_finite()) {
            return Err(Error::InvalidInput("pulse width must be positive and center finite".into()));
        }
        Ok(Self { fwhm, center })
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        let x = t - self.center;
        let peak = (ZETA / PI).powf(0.25) * (2.0 * PI / ZETA).sqrt() * self.fwhm.sqrt() / (2.0 * PI);
        peak * (-self.fwhm * self.fwhm * x * x / (2.0 * ZETA)).exp()
    }

    /// Spectral amplitude `∫ A(τ) e^{iωτ} dτ`.
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let mag = (ZETA / PI).powf(0.25) / self.fwhm.sqrt()
            * (-ZETA * omega * omega / (2.0 * self.fwhm * self.fwhm)).exp();
        Complex64::from_polar(mag, omega * self.center)
    }

    /// Intensity FWHM in time.
    pub fn duration(&self) -> f64 {
        ZETA / self.fwhm
    }
}

/// Per-atom exponential-integrator coefficients for step `dt`:
/// `s_{n+1} = e s_n + c0 A_n + c1 A_{n+1}`.
#[derive(Debug, Clone)]
struct Stepper {
    e: Vec<Complex64>,
    c1: Vec<Complex64>,
    c2: Vec<Complex64>,
    /// `Σ w c1`.
    big_c1: Complex64,
}

fn coefficients(delta: f64, dt: f64) -> (Complex64, Complex64, Complex64) {
    let x = Complex64::new(0.0, -delta * dt);
    let e = x.exp();
    let (phi1, c0) = if (delta * dt).abs() < 0.1 {
        // Σ xᵐ/(m+1)! and Σ xᵐ/(m!(m+2)), times dt
        let mut phi = ZERO;
        let mut c0 = ZERO;
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for m in 0..12 {
            phi += pow / (fact * (m + 1) as f64);
            c0 += pow / (fact * (m + 2) as f64);
            pow *= x;
            fact *= (m + 1) as f64;
        }
        (phi * dt, c0 * dt)
    } else {
        let a = delta;
        let phi = (Complex64::new(1.0, 0.0) - e) / Complex64::new(0.0, a);
        let c0 = (e * Complex64::new(1.0, a * dt) - 1.0) / (a * a * dt);
        (phi, c0)
    };
    let c1 = phi1 - c0;
    (e, c0, c1)
}

impl Stepper {
    fn new(atoms: &AtomGrid, dt: f64) -> Self {
        let n = atoms.len();
        let mut e = Vec::with_capacity(n);
        let mut c1 = Vec::with_capacity(n);
        let mut c2 = Vec::with_capacity(n);
        let mut big_c1 = ZERO;
        for (d, w) in atoms.detunings.iter().zip(&atoms.weights) {
            let (ek, c0k, c1k) = coefficients(*d, dt);
            e.push(ek);
            c1.push(c1k);
            c2.push(ek * c1k + c0k);
            big_c1 += *w * c1k;
        }
        Self { e, c1, c2, big_c1 }
    }
}

/// Marching state: `pred = s − c1·A` per (slab, atom), field per slab.
struct State {
    pred: Vec<Complex64>,
    field: Vec<Complex64>,
    polarization: Vec<Complex64>,
}

impl State {
    fn coherences(&self, atoms: &AtomGrid, stepper: &Stepper) -> Vec<Complex64> {
        let na = atoms.len();
        let mut s = self.pred.clone();
        for (m, chunk) in s.chunks_mut(na.max(1)).enumerate().take(atoms.slabs + 1) {
            for (k, v) in chunk.iter_mut().enumerate() {
                *v += stepper.c1[k] * self.field[m];
            }
        }
        s
    }

    /// `pred ← e·pred + c2·A_n` and the predicted polarization per slab.
    fn advance_atoms(&mut self, atoms: &AtomGrid, stepper: &Stepper) {
        let na = atoms.len();
        if na == 0 {
            self.polarization.iter_mut().for_each(|p| *p = ZERO);
            return;
        }
        let field = &self.field;
        self.pred
            .par_chunks_mut(na)
            .zip(self.polarization.par_iter_mut())
            .enumerate()
            .for_each(|(m, (chunk, pol))| {
                let a = field[m];
                let mut acc = ZERO;
                for k in 0..chunk.len() {
                    let v = stepper.e[k] * chunk[k] + stepper.c2[k] * a;
                    chunk[k] = v;
                    acc += atoms.weights[k] * v;
                }
                *pol = acc;
            });
    }

    fn sweep_forward(&mut self, atoms: &AtomGrid, stepper: &Stepper, input: Complex64) {
        let g = 0.5 * atoms.coupling / atoms.slabs as f64;
        let denom = Complex64::new(1.0, 0.0) + g * stepper.big_c1;
        let p = &self.polarization;
        self.field[0] = input;
        for m in 0..atoms.slabs {
            let a = self.field[m];
            self.field[m + 1] = (a - g * (p[m] + stepper.big_c1 * a + p[m + 1])) / denom;
        }
    }

    fn sweep_backward(&mut self, atoms: &AtomGrid, stepper: &Stepper) {
        let g = 0.5 * atoms.coupling / atoms.slabs as f64;
        let denom = Complex64::new(1.0, 0.0) + g * stepper.big_c1;
        let p = &self.polarization;
        let n = atoms.slabs;
        self.field[n] = ZERO;
        for m in (0..n).rev() {
            let a = self.field[m + 1];
            self.field[m] = (a - g * (p[m + 1] + stepper.big_c1 * a + p[m])) / denom;
        }
    }
}

/// Storage-phase record.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRecord {
    pub dt: f64,
    pub times: Vec<f64>,
    /// Field entering at `z = 0`.
    pub input: Vec<Complex64>,
    /// Field leaving at `z = 1`.
    pub transmitted: Vec<Complex64>,
    /// Coherences `s(τ_end, Δ_k, z_m)`, slab-major.
    pub coherences: Vec<Complex64>,
    pub pulse: InputPulse,
}

impl FieldRecord {
    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }
}

/// Trapezoid of `|x|²` with step `dt`.
fn energy(x: &[Complex64], dt: f64) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    (inner - 0.5 * (x[0].norm_sqr() + x[n - 1].norm_sqr())) * dt
}

/// `K ∫ dz Σ_k w_k |s_k|²` by trapezoid in z.
pub fn stored_energy(atoms: &AtomGrid, coherences: &[Complex64]) -> f64 {
    let na = atoms.len();
    if na == 0 {
        return 0.0;
    }
    let n = atoms.slabs;
    let per_slab: Vec<f64> = coherences
        .chunks(na)
        .map(|c| c.iter().zip(&atoms.weights).map(|(s, w)| w * s.norm_sqr()).sum())
        .collect();
    let inner: f64 = per_slab.iter().sum::<f64>() - 0.5 * (per_slab[0] + per_slab[n]);
    atoms.coupling * inner / n as f64
}

fn check_step(atoms: &AtomGrid, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::Stability(format!("time step must be positive, got {dt}")));
    }
    if dt > atoms.max_step() * (1.0 + 1e-12) {
        return Err(Error::Stability(format!(
            "time step {dt} exceeds {STEP_LIMIT}/max|Δ| = {}",
            atoms.max_step()
        )));
    }
    Ok(())
}

/// Forward propagation of `pulse` from `τ = 0` to `t_end` (no retrieval).
pub fn simulate_storage(atoms: &AtomGrid, pulse: &InputPulse, dt: f64, t_end: f64) -> Result<FieldRecord> {
    check_step(atoms, dt)?;
    if !(t_end > dt) {
        return Err(Error::InvalidInput(format!("simulation end {t_end} must exceed one step")));
    }
    let steps = (t_end / dt).round() as usize;
    let na = atoms.len();
    let nz = atoms.slabs + 1;
    let stepper = Stepper::new(atoms, dt);
    let a0 = Complex64::new(pulse.amplitude(0.0), 0.0);
    // s = 0 at τ = 0, so the field is uniform in z and pred = −c1·A₀
    let mut pred = vec![ZERO; nz * na];
    for chunk in pred.chunks_mut(na.max(1)) {
        for (k, v) in chunk.iter_mut().enumerate().take(na) {
            *v = -stepper.c1[k] * a0;
        }
    }
    let mut state = State { pred, field: vec![a0; nz], polarization: vec![ZERO; nz] };
    let mut times = Vec::with_capacity(steps + 1);
    let mut input = Vec::with_capacity(steps + 1);
    let mut transmitted = Vec::with_capacity(steps + 1);
    times.push(0.0);
    input.push(a0);
    transmitted.push(a0);
    for n in 1..=steps {
        let t = n as f64 * dt;
        let a_in = Complex64::new(pulse.amplitude(t), 0.0);
        state.advance_atoms(atoms, &stepper);
        state.sweep_forward(atoms, &stepper, a_in);
        times.push(t);
        input.push(a_in);
        transmitted.push(state.field[atoms.slabs]);
    }
    let coherences = state.coherences(atoms, &stepper);
    Ok(FieldRecord { dt, times, input, transmitted, coherences, pulse: *pulse })
}

/// Backward-retrieval phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Retrieval {
    pub switch_time: f64,
    pub times: Vec<f64>,
    /// Retrieved field leaving at `z = 0`.
    pub retrieved: Vec<Complex64>,
    pub coherences: Vec<Complex64>,
}

/// Energy balance of a storage + retrieval run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    pub input: f64,
    pub transmitted: f64,
    pub retrieved: f64,
    pub stored: f64,
}

impl EnergyBudget {
    /// `|input − (transmitted + retrieved + stored)| / input`.
    pub fn closure(&self) -> f64 {
        (self.input - self.transmitted - self.retrieved - self.stored).abs() / self.input
    }

    pub fn efficiency(&self) -> f64 {
        self.retrieved / self.input
    }
}

/// Continue `record` with an ideal π-pulse pair at its end time: the
/// coherences pick up a phase of π, the forward field is converted away and
/// the retrieved field propagates backward from `z = 1` until `t_end`.
pub fn simulate_backward_retrieval(atoms: &AtomGrid, record: &FieldRecord, t_end: f64) -> Result<Retrieval> {
    let dt = record.dt;
    check_step(atoms, dt)?;
    let t1 = record.end_time();
    let pulse = record.pulse;
    if t1 < pulse.center + 3.0 * pulse.duration() {
        return Err(Error::Protocol(format!(
            "switch at {t1} precedes the end of the input pulse ({})",
            pulse.center + 3.0 * pulse.duration()
        )));
    }
    if let Some(rev) = atoms.revival {
        if t1 >= rev {
            return Err(Error::Protocol(format!("switch at {t1} is after the first revival {rev}")));
        }
    }
    if !(t_end > t1) {
        return Err(Error::Protocol(format!("retrieval end {t_end} must follow the switch {t1}")));
    }
    let na = atoms.len();
    if record.coherences.len() != na * (atoms.slabs + 1) {
        return Err(Error::InvalidInput("record does not belong to this ensemble".into()));
    }
    let stepper = Stepper::new(atoms, dt);
    let nz = atoms.slabs + 1;
    let pred = record.coherences.iter().map(|s| -s).collect();
    let mut state = State { pred, field: vec![ZERO; nz], polarization: vec![ZERO; nz] };
    let steps = ((t_end - t1) / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut retrieved = Vec::with_capacity(steps + 1);
    times.push(t1);
    retrieved.push(ZERO);
    for n in 1..=steps {
        state.advance_atoms(atoms, &stepper);
        state.sweep_backward(atoms, &stepper);
        times.push(t1 + n as f64 * dt);
        retrieved.push(state.field[0]);
    }
    let coherences = state.coherences(atoms, &stepper);
    Ok(Retrieval { switch_time: t1, times, retrieved, coherences })
}

/// Storage until `t_switch`, then backward retrieval until `t_end`.
pub fn backward_protocol(
    atoms: &AtomGrid,
    pulse: &InputPulse,
    dt: f64,
    t_switch: f64,
    t_end: f64,
) -> Result<(FieldRecord, Retrieval, EnergyBudget)> {
    let record = simulate_storage(atoms, pulse, dt, t_switch)?;
    let retrieval = simulate_backward_retrieval(atoms, &record, t_end)?;
    let budget = EnergyBudget {
        input: energy(&record.input, dt),
        transmitted: energy(&record.transmitted, dt),
        retrieved: energy(&retrieval.retrieved, dt),
        stored: stored_energy(atoms, &retrieval.coherences),
    };
    Ok((record, retrieval, budget))
}

/// `∫ x(τ) e^{iω(τ − shift)} dτ` over a uniformly sampled trace.
pub fn fourier_sum(times: &[f64], x: &[Complex64], dt: f64, omega: f64, shift: f64) -> Complex64 {
    let n = x.len();
    let mut acc = ZERO;
    for (i, (t, v)) in times.iter().zip(x).enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        acc += v * Complex64::from_polar(w, omega * (t - shift));
    }
    acc * dt
}

/// Sampled `Γ_emp(ω)`; `None` where the probe spectrum is below the mask level.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalGamma {
    pub omega: Vec<f64>,
    pub gamma: Vec<Option<Complex64>>,
}

/// Probe spectral amplitude below this fraction of its peak is masked.
pub const PROBE_MASK: f64 = 0.01;

/// `Γ_emp(ω) = FT[A_r](ω) e^{−iωT} / (κ̃ FT[A_in](ω))` from a backward run,
/// with `T` the comb revival time.
pub fn empirical_gamma(
    atoms: &AtomGrid,
    record: &FieldRecord,
    retrieval: &Retrieval,
    dephasing: Complex64,
    omegas: &[f64],
) -> Result<EmpiricalGamma> {
    let delay = atoms.revival.unwrap_or(0.0);
    let dt = record.dt;
    let input: Vec<Complex64> = omegas
        .iter()
        .map(|&w| fourier_sum(&record.times, &record.input, dt, w, 0.0))
        .collect();
    let peak = input
        .iter()
        .map(|z| z.norm())
        .fold(fourier_sum(&record.times, &record.input, dt, 0.0, 0.0).norm(), f64::max);
    if peak == 0.0 || dephasing.norm() == 0.0 {
        return Err(Error::UndefinedMetric("probe or dephasing vanishes".into()));
    }
    let gamma = omegas
        .par_iter()
        .zip(input.par_iter())
        .map(|(&w, a_in)| {
            if a_in.norm() < PROBE_MASK * peak {
                return None;
            }
            let out = fourier_sum(&retrieval.times, &retrieval.retrieved, dt, w, delay);
            Some(out / (dephasing * a_in))
        })
        .collect();
    Ok(EmpiricalGamma { omega: omegas.to_vec(), gamma })
}
