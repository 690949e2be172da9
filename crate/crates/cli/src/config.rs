//! Flat `key = value` configuration with `[section]` headers.
//!
//! Every key has a default listed in [`SCHEMA`]; unknown sections and keys
//! are rejected with their line number. A `[manifest]` section is skipped so
//! that run manifests can be fed back as configs.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::CliError;

pub struct Field {
    pub section: &'static str,
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn field(section: &'static str, key: &'static str, default: &'static str, help: &'static str) -> Field {
    Field { section, key, default, help }
}

/// All recognized keys, in template order.
pub const SCHEMA: &[Field] = &[
    field("experiment", "id", "qecurve", "fig2 | dispersion | mismatch | qecurve | echo | custom"),
    field("comb", "envelope", "gaussian", "gaussian | rectangular (echo and custom only; figures fix their own band)"),
    field("comb", "envelope_width", "1", "envelope FWHM; 1 defines the frequency unit"),
    field("comb", "tooth", "gaussian", "gaussian | lorentzian | rectangular"),
    field("comb", "tooth_width", "0.015", "tooth FWHM b"),
    field("comb", "spacing", "0.15", "tooth spacing δ"),
    field("medium", "kind", "comb", "comb | mafc (custom and echo)"),
    field("medium", "d0", "inf", "peak optical depth; a list is swept by custom"),
    field("mafc", "separation", "auto", "side-line separation Δ_o, or auto for √3"),
    field("mafc", "strength", "auto", "side-line weight f_s κ(0)δ, or auto for 3/2"),
    field("mafc", "hwhm", "0.01", "side-line half width Ω"),
    field("signal", "fwhm", "0.05:1:20", "signal bandwidths Δ_p; comma list, a:b:n spans n points"),
    field("signal", "center", "0", "signal center frequency"),
    field("grid", "half_width", "3", "frequency grid half width"),
    field("grid", "spacing", "0.002", "frequency grid spacing"),
    field("band", "half_width", "0.45", "detuning range of dispersion and mismatch rows"),
    field("band", "spacing", "0.005", "row spacing of dispersion and mismatch"),
    field("echo", "probe_fwhm", "2", "probe intensity FWHM"),
    field("echo", "probe_center", "5", "probe peak time"),
    field("echo", "slabs", "200", "z slabs"),
    field("echo", "bins_per_tooth", "8", "detuning bins per tooth width"),
    field("echo", "side_reach", "0.3", "detuning reach sampled around each side line"),
    field("echo", "dt", "auto", "time step, or auto for min(0.02, 0.1/max|Δ|)"),
    field("echo", "switch", "auto", "π-pulse pair time, or auto for midway to the revival"),
    field("echo", "end", "auto", "end of the retrieval window, or auto"),
    field("output", "dir", "out", "output directory (--out overrides)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Fig2,
    Dispersion,
    Mismatch,
    QeCurve,
    Echo,
    Custom,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Dispersion => "dispersion",
            Experiment::Mismatch => "mismatch",
            Experiment::QeCurve => "qecurve",
            Experiment::Echo => "echo",
            Experiment::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    Gaussian,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tooth {
    Gaussian,
    Lorentzian,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediumKind {
    Comb,
    Mafc,
}

/// A number or `auto`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Auto {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombConfig {
    pub envelope: Envelope,
    pub envelope_width: f64,
    pub tooth: Tooth,
    pub tooth_width: f64,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoConfig {
    pub probe_fwhm: f64,
    pub probe_center: f64,
    pub slabs: usize,
    pub bins_per_tooth: usize,
    pub side_reach: f64,
    pub dt: Auto,
    pub switch: Auto,
    pub end: Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub comb: CombConfig,
    pub medium: MediumKind,
    pub d0: Vec<f64>,
    pub separation: Auto,
    pub strength: Auto,
    pub hwhm: f64,
    pub fwhm: Vec<f64>,
    pub center: f64,
    pub grid_half_width: f64,
    pub grid_spacing: f64,
    pub band_half_width: f64,
    pub band_spacing: f64,
    pub echo: EchoConfig,
    pub output: PathBuf,
    /// Source line of every key given explicitly, for later validation messages.
    pub lines: HashMap<String, usize>,
}

impl ExperimentConfig {
    pub fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.lines.get(&format!("{section}.{key}")).copied()
    }

    /// Config error pointing at `section.key`.
    pub fn invalid(&self, section: &str, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config { line: self.line_of(section, key), message: format!("{section}.{key}: {}", message.into()) }
    }
}

fn strip_comment(line: &str) -> &str {
    let t = line.trim();
    if t.starts_with('#') || t.starts_with(';') {
        return "";
    }
    match t.find(" #") {
        Some(i) => t[..i].trim_end(),
        None => t,
    }
}

struct Raw {
    values: HashMap<(String, String), (String, usize)>,
}

impl Raw {
    fn get(&self, section: &str, key: &str) -> (String, Option<usize>) {
        match self.values.get(&(section.to_string(), key.to_string())) {
            Some((v, line)) => (v.clone(), Some(*line)),
            None => {
                let f = SCHEMA.iter().find(|f| f.section == section && f.key == key).expect("key in schema");
                (f.default.to_string(), None)
            }
        }
    }
}

fn bad(line: Option<usize>, section: &str, key: &str, message: String) -> CliError {
    CliError::Config { line, message: format!("{section}.{key}: {message}") }
}

fn number(raw: &Raw, section: &str, key: &str) -> Result<f64, CliError> {
    let (v, line) = raw.get(section, key);
    parse_number(&v).map_err(|m| bad(line, section, key, m))
}

fn parse_number(v: &str) -> Result<f64, String> {
    let x: f64 = v.trim().parse().map_err(|_| format!("expected a number, got '{v}'"))?;
    if x.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(x)
}

fn positive(raw: &Raw, section: &str, key: &str) -> Result<f64, CliError> {
    let x = number(raw, section, key)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(bad(raw.get(section, key).1, section, key, format!("must be positive and finite, got {x}")))
    }
}

fn count(raw: &Raw, section: &str, key: &str) -> Result<usize, CliError> {
    let (v, line) = raw.get(section, key);
    v.trim()
        .parse()
        .map_err(|_| bad(line, section, key, format!("expected a non-negative integer, got '{v}'")))
}

fn auto(raw: &Raw, section: &str, key: &str) -> Result<Auto, CliError> {
    let (v, line) = raw.get(section, key);
    if v.trim() == "auto" {
        return Ok(Auto::Auto);
    }
    parse_number(&v).map(Auto::Value).map_err(|m| bad(line, section, key, format!("{m} or 'auto'")))
}

fn choice<T: Copy>(raw: &Raw, section: &str, key: &str, options: &[(&str, T)]) -> Result<T, CliError> {
    let (v, line) = raw.get(section, key);
    options.iter().find(|(name, _)| *name == v.trim()).map(|(_, t)| *t).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
        bad(line, section, key, format!("'{v}' is not one of {}", names.join(", ")))
    })
}

/// Comma list whose items are numbers or `a:b:n` spans of `n` evenly spaced points.
fn list(raw: &Raw, section: &str, key: &str) -> Result<Vec<f64>, CliError> {
    let (v, line) = raw.get(section, key);
    let err = |m: String| bad(line, section, key, m);
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse_number(x).map_err(err)?),
            [a, b, n] => {
                let (a, b) = (parse_number(a).map_err(err)?, parse_number(b).map_err(err)?);
                let n: usize = n.trim().parse().map_err(|_| err(format!("span count must be an integer in '{item}'")))?;
                if n < 2 || !(a.is_finite() && b.is_finite()) {
                    return Err(err(format!("span '{item}' needs finite ends and at least 2 points")));
                }
                out.extend((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64));
            }
            _ => return Err(err(format!("cannot read list item '{item}'"))),
        }
    }
    Ok(out)
}

/// Parse configuration text.
pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut values = HashMap::new();
    let mut section: Option<String> = None;
    let mut skipping = false;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let t = strip_comment(line);
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| CliError::Config { line: Some(n), message: format!("malformed section header '{t}'") })?
                .trim()
                .to_string();
            skipping = name == "manifest";
            if !skipping && !SCHEMA.iter().any(|f| f.section == name) {
                return Err(CliError::Config { line: Some(n), message: format!("unknown section [{name}]") });
            }
            section = Some(name);
            continue;
        }
        if skipping {
            continue;
        }
        let (key, value) = t
            .split_once('=')
            .ok_or_else(|| CliError::Config { line: Some(n), message: format!("expected 'key = value', got '{t}'") })?;
        let key = key.trim().to_string();
        let sec = section
            .clone()
            .ok_or_else(|| CliError::Config { line: Some(n), message: format!("key '{key}' appears before any section") })?;
        if !SCHEMA.iter().any(|f| f.section == sec && f.key == key) {
            return Err(CliError::Config { line: Some(n), message: format!("unknown key '{key}' in [{sec}]") });
        }
        if values.insert((sec.clone(), key.clone()), (value.trim().to_string(), n)).is_some() {
            return Err(CliError::Config { line: Some(n), message: format!("duplicate key '{key}' in [{sec}]") });
        }
    }
    let raw = Raw { values };
    let lines = raw.values.iter().map(|((s, k), (_, n))| (format!("{s}.{k}"), *n)).collect();

    let experiment = choice(
        &raw,
        "experiment",
        "id",
        &[
            ("fig2", Experiment::Fig2),
            ("dispersion", Experiment::Dispersion),
            ("mismatch", Experiment::Mismatch),
            ("qecurve", Experiment::QeCurve),
            ("echo", Experiment::Echo),
            ("custom", Experiment::Custom),
        ],
    )?;
    let comb = CombConfig {
        envelope: choice(&raw, "comb", "envelope", &[("gaussian", Envelope::Gaussian), ("rectangular", Envelope::Rectangular)])?,
        envelope_width: positive(&raw, "comb", "envelope_width")?,
        tooth: choice(
            &raw,
            "comb",
            "tooth",
            &[("gaussian", Tooth::Gaussian), ("lorentzian", Tooth::Lorentzian), ("rectangular", Tooth::Rectangular)],
        )?,
        tooth_width: positive(&raw, "comb", "tooth_width")?,
        spacing: positive(&raw, "comb", "spacing")?,
    };
    let d0 = list(&raw, "medium", "d0")?;
    if let Some(bad_d) = d0.iter().find(|d| !(**d >= 0.0)) {
        return Err(bad(raw.get("medium", "d0").1, "medium", "d0", format!("optical depth must be >= 0, got {bad_d}")));
    }
    let fwhm = list(&raw, "signal", "fwhm")?;
    if let Some(w) = fwhm.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(bad(raw.get("signal", "fwhm").1, "signal", "fwhm", format!("bandwidths must be positive, got {w}")));
    }
    let echo = EchoConfig {
        probe_fwhm: positive(&raw, "echo", "probe_fwhm")?,
        probe_center: number(&raw, "echo", "probe_center")?,
        slabs: count(&raw, "echo", "slabs")?,
        bins_per_tooth: count(&raw, "echo", "bins_per_tooth")?,
        side_reach: positive(&raw, "echo", "side_reach")?,
        dt: auto(&raw, "echo", "dt")?,
        switch: auto(&raw, "echo", "switch")?,
        end: auto(&raw, "echo", "end")?,
    };
    Ok(ExperimentConfig {
        experiment,
        comb,
        medium: choice(&raw, "medium", "kind", &[("comb", MediumKind::Comb), ("mafc", MediumKind::Mafc)])?,
        d0,
        separation: auto(&raw, "mafc", "separation")?,
        strength: auto(&raw, "mafc", "strength")?,
        hwhm: positive(&raw, "mafc", "hwhm")?,
        fwhm,
        center: number(&raw, "signal", "center")?,
        grid_half_width: positive(&raw, "grid", "half_width")?,
        grid_spacing: positive(&raw, "grid", "spacing")?,
        band_half_width: positive(&raw, "band", "half_width")?,
        band_spacing: positive(&raw, "band", "spacing")?,
        echo,
        output: PathBuf::from(raw.get("output", "dir").0),
        lines,
    })
}

/// Commented template listing every key with its default.
pub fn template() -> String {
    let mut out = String::from("# AFC memory experiment configuration; every key is optional.\n");
    let mut current = "";
    for f in SCHEMA {
        if f.section != current {
            let _ = write!(out, "\n[{}]\n", f.section);
            current = f.section;
        }
        let _ = writeln!(out, "# {}\n{} = {}", f.help, f.key, f.default);
    }
    out
}

fn fmt_auto(a: Auto) -> String {
    match a {
        Auto::Auto => "auto".into(),
        Auto::Value(x) => x.to_string(),
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Fully resolved configuration in the input format. Numbers use the
/// shortest round-trip representation so that re-parsing is lossless.
pub fn resolved(c: &ExperimentConfig) -> String {
    let envelope = match c.comb.envelope {
        Envelope::Gaussian => "gaussian",
        Envelope::Rectangular => "rectangular",
    };
    let tooth = match c.comb.tooth {
        Tooth::Gaussian => "gaussian",
        Tooth::Lorentzian => "lorentzian",
        Tooth::Rectangular => "rectangular",
    };
    let kind = match c.medium {
        MediumKind::Comb => "comb",
        MediumKind::Mafc => "mafc",
    };
    let e = &c.echo;
    let mut out = String::new();
    let _ = write!(
        out,
        "[experiment]\nid = {}\n\n\
         [comb]\nenvelope = {envelope}\nenvelope_width = {}\ntooth = {tooth}\ntooth_width = {}\nspacing = {}\n\n\
         [medium]\nkind = {kind}\nd0 = {}\n\n\
         [mafc]\nseparation = {}\nstrength = {}\nhwhm = {}\n\n\
         [signal]\nfwhm = {}\ncenter = {}\n\n\
         [grid]\nhalf_width = {}\nspacing = {}\n\n\
         [band]\nhalf_width = {}\nspacing = {}\n\n\
         [echo]\nprobe_fwhm = {}\nprobe_center = {}\nslabs = {}\nbins_per_tooth = {}\nside_reach = {}\ndt = {}\nswitch = {}\nend = {}\n\n\
         [output]\ndir = {}\n",
        c.experiment.as_str(),
        c.comb.envelope_width,
        c.comb.tooth_width,
        c.comb.spacing,
        fmt_list(&c.d0),
        fmt_auto(c.separation),
        fmt_auto(c.strength),
        c.hwhm,
        fmt_list(&c.fwhm),
        c.center,
        c.grid_half_width,
        c.grid_spacing,
        c.band_half_width,
        c.band_spacing,
        e.probe_fwhm,
        e.probe_center,
        e.slabs,
        e.bins_per_tooth,
        e.side_reach,
        fmt_auto(e.dt),
        fmt_auto(e.switch),
        fmt_auto(e.end),
        c.output.display(),
    );
    out
}
