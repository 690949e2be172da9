//! One function per experiment id, each producing named tables.

use afc_core::metrics::{evaluate, ideal_inband_fraction, qe_gaussian_paper, quantum_efficiency};
use afc_core::oracle::{backward_protocol, AtomGrid, InputPulse};
use afc_core::response::{compensation_params, dispersion_components, mafc_response};
use afc_core::{
    CombSpec, Complex64, DetuningGrid, Error, LineShape, MafcDesign, MediumResponse, ProfileRole, SampledProfile,
    SignalSpec, TransferSpectrum,
};
use rayon::prelude::*;

use crate::config::{Auto, Envelope, Experiment, ExperimentConfig, MediumKind, Tooth};
use crate::error::CliError;
use crate::output::Table;

/// Tables plus the design warnings met while building them.
pub struct Outcome {
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let tables = match cfg.experiment {
        Experiment::Fig2 => vec![fig2(cfg, &mut warnings)?],
        Experiment::Dispersion => vec![dispersion(cfg, &mut warnings)?],
        Experiment::Mismatch => vec![mismatch(cfg, &mut warnings)?],
        Experiment::QeCurve => vec![qecurve(cfg, &mut warnings)?],
        Experiment::Echo => echo(cfg, &mut warnings)?,
        Experiment::Custom => vec![custom(cfg, &mut warnings)?],
    };
    let mut seen = std::collections::HashSet::new();
    warnings.retain(|w| seen.insert(w.clone()));
    Ok(Outcome { tables, warnings })
}

fn envelope_shape(cfg: &ExperimentConfig) -> Result<LineShape, CliError> {
    let w = cfg.comb.envelope_width;
    let shape = match cfg.comb.envelope {
        Envelope::Gaussian => LineShape::gaussian(w),
        Envelope::Rectangular => LineShape::rectangular(w),
    };
    shape.map_err(|e| cfg.invalid("comb", "envelope_width", e.to_string()))
}

fn tooth_shape(cfg: &ExperimentConfig) -> Result<LineShape, CliError> {
    let b = cfg.comb.tooth_width;
    let shape = match cfg.comb.tooth {
        Tooth::Gaussian => LineShape::gaussian(b),
        Tooth::Lorentzian => LineShape::lorentzian(0.5 * b),
        Tooth::Rectangular => LineShape::rectangular(b),
    };
    shape.map_err(|e| cfg.invalid("comb", "tooth_width", e.to_string()))
}

fn comb(cfg: &ExperimentConfig, envelope: LineShape, warnings: &mut Vec<String>) -> Result<CombSpec, CliError> {
    let (spec, w) = CombSpec::new(envelope, tooth_shape(cfg)?, cfg.comb.spacing)
        .map_err(|e| cfg.invalid("comb", "spacing", e.to_string()))?;
    warnings.extend(w.iter().map(|w| w.to_string()));
    Ok(spec)
}

fn design(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<MafcDesign, CliError> {
    let auto = compensation_params(cfg.hwhm);
    let separation = match cfg.separation {
        Auto::Auto => auto.separation,
        Auto::Value(x) => x,
    };
    let strength = match cfg.strength {
        Auto::Auto => auto.strength,
        Auto::Value(x) => x,
    };
    let (d, w) =
        MafcDesign::new(separation, strength, cfg.hwhm).map_err(|e| cfg.invalid("mafc", "separation", e.to_string()))?;
    warnings.extend(w.iter().map(|w| w.to_string()));
    Ok(d)
}

fn single_d0(cfg: &ExperimentConfig) -> Result<f64, CliError> {
    match cfg.d0.as_slice() {
        [d] => Ok(*d),
        _ => Err(cfg.invalid("medium", "d0", format!("{} takes a single optical depth", cfg.experiment.as_str()))),
    }
}

fn grid(cfg: &ExperimentConfig) -> Result<DetuningGrid, CliError> {
    DetuningGrid::with_spacing(cfg.grid_half_width, cfg.grid_spacing)
        .map_err(|e| cfg.invalid("grid", "spacing", e.to_string()))
}

fn band(cfg: &ExperimentConfig) -> Result<DetuningGrid, CliError> {
    DetuningGrid::with_spacing(cfg.band_half_width, cfg.band_spacing)
        .map_err(|e| cfg.invalid("band", "spacing", e.to_string()))
}

fn signal(grid: DetuningGrid, fwhm: f64, center: f64) -> Result<SignalSpec, CliError> {
    let s = SignalSpec::gaussian(fwhm, center, grid)?;
    if s.coverage < 0.99 {
        return Err(Error::Coverage { outside: 1.0 - s.coverage }.into());
    }
    Ok(s)
}

/// Medium response used by the quadrature experiments.
fn medium(cfg: &ExperimentConfig, grid: DetuningGrid, d0: f64, warnings: &mut Vec<String>) -> Result<MediumResponse, CliError> {
    let unit = cfg.comb.envelope_width == 1.0;
    let response = match (cfg.medium, cfg.comb.envelope) {
        (MediumKind::Mafc, Envelope::Rectangular) if unit => mafc_response(&design(cfg, warnings)?, grid, d0)?,
        (MediumKind::Mafc, _) => {
            return Err(cfg.invalid("medium", "kind", "mafc needs a rectangular envelope of width 1"));
        }
        (MediumKind::Comb, Envelope::Gaussian) if unit => MediumResponse::gaussian_closed(grid, d0)?,
        (MediumKind::Comb, Envelope::Rectangular) if unit => MediumResponse::rect_afc_closed(grid, d0)?,
        (MediumKind::Comb, _) => {
            let profile = SampledProfile::sample(&envelope_shape(cfg)?, 0.0, grid, ProfileRole::Envelope);
            MediumResponse::from_profile(&profile, d0)?
        }
    };
    warnings.extend(response.warnings.iter().map(|w| w.to_string()));
    Ok(response)
}

fn fig2(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<Table, CliError> {
    if let Some(y) = cfg.fwhm.iter().find(|y| !(**y < 1.0)) {
        return Err(cfg.invalid("signal", "fwhm", format!("bandwidth ratios must lie in (0, 1), got {y}")));
    }
    let spec = comb(cfg, LineShape::gaussian(1.0)?, warnings)?;
    let kappa = spec.dephasing();
    let grid = grid(cfg)?;
    let response = MediumResponse::gaussian_closed(grid, single_d0(cfg)?)?;
    let transfer = TransferSpectrum::from_response(&response, kappa);
    let rows = cfg
        .fwhm
        .par_iter()
        .map(|&y| {
            let q = evaluate(&transfer, &signal(grid, y, cfg.center)?)?.q.value;
            Ok(vec![y, qe_gaussian_paper(y, kappa.norm())?, q])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table::new("fig2", &[("y", "Δ_in"), ("q_g", "1"), ("q_quadrature", "1")], rows))
}

fn dispersion(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<Table, CliError> {
    let rows = dispersion_components(&design(cfg, warnings)?, band(cfg)?)
        .into_iter()
        .map(|r| vec![r.omega, r.r_a, r.r_s, r.r_m])
        .collect();
    Ok(Table::new("dispersion", &[("omega", "Δ_in"), ("r_a", "1"), ("r_s", "1"), ("r_m", "1")], rows))
}

fn mismatch(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<Table, CliError> {
    let rows = dispersion_components(&design(cfg, warnings)?, band(cfg)?)
        .into_iter()
        .map(|r| vec![r.omega, 1.0 / (1.0 + r.r_a * r.r_a), 1.0 / (1.0 + r.r_m * r.r_m)])
        .collect();
    Ok(Table::new("mismatch", &[("omega", "Δ_in"), ("w_afc", "1"), ("w_mafc", "1")], rows))
}

fn qecurve(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<Table, CliError> {
    let spec = comb(cfg, LineShape::rectangular(1.0)?, warnings)?;
    let kappa = spec.dephasing();
    let grid = grid(cfg)?;
    let d0 = single_d0(cfg)?;
    let afc = TransferSpectrum::from_response(&MediumResponse::rect_afc_closed(grid, d0)?, kappa);
    let mafc = TransferSpectrum::from_response(&mafc_response(&design(cfg, warnings)?, grid, d0)?, kappa);
    let rows = cfg
        .fwhm
        .par_iter()
        .map(|&fwhm| {
            let s = signal(grid, fwhm, cfg.center)?;
            let a = evaluate(&afc, &s)?;
            let b = evaluate(&mafc, &s)?;
            let ideal = kappa.norm_sqr() * ideal_inband_fraction(0.5, fwhm)?;
            Ok(vec![fwhm, a.q.value, b.q.value, ideal, a.fidelity.value, b.fidelity.value])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table::new(
        "qecurve",
        &[
            ("delta_p", "Δ_in"),
            ("q_afc", "1"),
            ("q_mafc", "1"),
            ("q_ideal", "1"),
            ("f_afc", "1"),
            ("f_mafc", "1"),
        ],
        rows,
    ))
}

fn custom(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<Table, CliError> {
    let spec = comb(cfg, envelope_shape(cfg)?, warnings)?;
    let kappa = spec.dephasing();
    let grid = grid(cfg)?;
    let base = medium(cfg, grid, 0.0, warnings)?;
    let points: Vec<(f64, f64)> = cfg.d0.iter().flat_map(|&d| cfg.fwhm.iter().map(move |&w| (d, w))).collect();
    let rows = points
        .par_iter()
        .map(|&(d0, fwhm)| {
            let transfer = TransferSpectrum::from_response(&base.clone().with_d0(d0)?, kappa);
            let m = evaluate(&transfer, &signal(grid, fwhm, cfg.center)?)?;
            Ok(vec![d0, fwhm, m.q.value, m.q.error, m.q_tilde.value, m.fidelity.value, m.inband_fraction])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table::new(
        "custom",
        &[
            ("d0", "1"),
            ("delta_p", "Δ_in"),
            ("q", "1"),
            ("q_error", "1"),
            ("q_tilde", "1"),
            ("fidelity", "1"),
            ("inband", "1"),
        ],
        rows,
    ))
}

struct EchoRun {
    rows: Vec<Vec<f64>>,
    summary: Vec<f64>,
}

fn echo(cfg: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<Vec<Table>, CliError> {
    let e = &cfg.echo;
    if let Some(d) = cfg.d0.iter().find(|d| !d.is_finite()) {
        return Err(cfg.invalid("medium", "d0", format!("the time-domain run needs a finite optical depth, got {d}")));
    }
    let spec = comb(cfg, envelope_shape(cfg)?, warnings)?;
    let mafc = match cfg.medium {
        MediumKind::Mafc => Some(design(cfg, warnings)?),
        MediumKind::Comb => None,
    };
    let pulse = InputPulse::new(e.probe_fwhm, e.probe_center).map_err(|m| cfg.invalid("echo", "probe_fwhm", m.to_string()))?;
    let t_rev = spec.revival_time();
    let tail = pulse.center + 3.0 * pulse.duration();
    let switch = match e.switch {
        Auto::Auto => 0.5 * (tail + t_rev),
        Auto::Value(x) => x,
    };
    let end = match e.end {
        Auto::Auto => t_rev + 2.0 * tail,
        Auto::Value(x) => x,
    };
    let grid = grid(cfg)?;
    let probe = signal(grid, e.probe_fwhm, 0.0)?;
    // predicted efficiencies are computed before any long run so that config
    // mistakes surface early
    let predicted = cfg
        .d0
        .iter()
        .map(|&d0| {
            let response = medium(cfg, grid, d0, warnings)?;
            let transfer = TransferSpectrum::from_response(&response, spec.dephasing());
            Ok(quantum_efficiency(&transfer, &probe.intensity())?.0.value)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let runs = cfg
        .d0
        .par_iter()
        .zip(&predicted)
        .map(|(&d0, &q_pred)| -> Result<EchoRun, CliError> {
            let atoms = if d0 == 0.0 {
                AtomGrid::vacuum(e.slabs)?
            } else {
                match &mafc {
                    Some(d) => AtomGrid::mafc(&spec, d, e.bins_per_tooth, e.side_reach, e.slabs, d0)?,
                    None => AtomGrid::comb(&spec, e.bins_per_tooth, e.slabs, d0)?,
                }
            };
            let dt = match e.dt {
                Auto::Auto => 0.02f64.min(atoms.max_step()),
                Auto::Value(x) => x,
            };
            let (rec, ret, budget) = backward_protocol(&atoms, &pulse, dt, switch, end)?;
            let zero = Complex64::new(0.0, 0.0);
            let mut rows = Vec::with_capacity(rec.times.len() + ret.times.len());
            for ((t, a), b) in rec.times.iter().zip(&rec.input).zip(&rec.transmitted) {
                rows.push(vec![d0, *t, a.re, a.im, b.re, b.im, 0.0, 0.0]);
            }
            let (mut peak_t, mut peak) = (f64::NAN, 0.0);
            for (t, c) in ret.times.iter().zip(&ret.retrieved).skip(1) {
                if c.norm() > peak {
                    (peak_t, peak) = (*t, c.norm());
                }
                rows.push(vec![d0, *t, zero.re, zero.im, zero.re, zero.im, c.re, c.im]);
            }
            let efficiency = if budget.input > 0.0 { budget.efficiency() } else { 0.0 };
            let summary = vec![d0, efficiency, q_pred, peak_t, pulse.center + t_rev, budget.closure()];
            Ok(EchoRun { rows, summary })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut traces = Vec::new();
    let mut summary = Vec::new();
    for run in runs {
        traces.extend(run.rows);
        summary.push(run.summary);
    }
    Ok(vec![
        Table::new(
            "echo",
            &[
                ("d0", "1"),
                ("t", "1/Δ_in"),
                ("input_re", "√Δ_in"),
                ("input_im", "√Δ_in"),
                ("transmitted_re", "√Δ_in"),
                ("transmitted_im", "√Δ_in"),
                ("retrieved_re", "√Δ_in"),
                ("retrieved_im", "√Δ_in"),
            ],
            traces,
        ),
        Table::new(
            "echo_summary",
            &[
                ("d0", "1"),
                ("efficiency", "1"),
                ("q_predicted", "1"),
                ("echo_peak", "1/Δ_in"),
                ("revival", "1/Δ_in"),
                ("closure", "1"),
            ],
            summary,
        ),
    ])
}
