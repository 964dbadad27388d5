//! Sweep configuration documents (TOML).
//!
//! Every key is optional; an empty document resolves to the resonator-frequency
//! work sweep at θ = 0, ω_h = 2ω_c, T_c = 19 mK, T_h = 9T_c over g/ω_c ∈ [0, 3.5].
//! Temperatures accept kelvin numbers or strings such as `"19 mK"`; `omega_ref`
//! accepts rad/s numbers or strings such as `"10 GHz"` (converted with 2π).
//!
//! Environment variables `RABI_OTTO_<KEY>` override keys of the document, with
//! `__` separating table levels (`RABI_OTTO_SWEEP__N_POINTS=50`).

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hilbert::FockCutoff;
use crate::spectral::CUTOFF_CEILING;
use crate::thermo::{
    CutoffPolicy, CycleProtocol, ReservoirSpec, DEFAULT_N_LEVELS, DEFAULT_OMEGA_REF, DEFAULT_T_COLD,
};

pub const ENV_PREFIX: &str = "RABI_OTTO_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Cycle thermodynamics (and optionally discord) per point.
    Cycle,
    /// Relative energy levels of the cold Hamiltonian per point.
    Spectrum,
    /// Numeric `W₁` against the two-level approximation.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantKind {
    ResonatorFrequency,
    CoupledCoupling,
    QubitFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    GOverOmegaC,
    Theta,
    Alpha,
    OmegaQh,
}

impl SweptParameter {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GOverOmegaC => "g_over_omega_c",
            Self::Theta => "theta",
            Self::Alpha => "alpha",
            Self::OmegaQh => "omega_qh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "policy")]
pub enum CutoffSetting {
    Fixed { n: usize },
    Auto { tol: f64, ceiling: usize },
}

impl CutoffSetting {
    pub fn policy(&self) -> Result<CutoffPolicy> {
        Ok(match *self {
            Self::Fixed { n } => CutoffPolicy::Fixed(FockCutoff::new(n)?),
            Self::Auto { tol, ceiling } => CutoffPolicy::Auto { tol, ceiling },
        })
    }
}

/// Hamiltonian parameters shared by every point; the swept and series
/// parameters overwrite their fields per point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolTemplate {
    pub variant: VariantKind,
    /// Cold resonator frequency; the fixed resonator frequency ω for the qubit-frequency protocol.
    pub omega_c: f64,
    pub omega_h: f64,
    pub g_over_omega_c: f64,
    pub theta: f64,
    pub alpha: f64,
    pub omega_qc: f64,
    pub omega_qh: f64,
}

impl ProtocolTemplate {
    pub fn with(mut self, parameter: SweptParameter, value: f64) -> Self {
        match parameter {
            SweptParameter::GOverOmegaC => self.g_over_omega_c = value,
            SweptParameter::Theta => self.theta = value,
            SweptParameter::Alpha => self.alpha = value,
            SweptParameter::OmegaQh => self.omega_qh = value,
        }
        self
    }

    pub fn protocol(&self, reservoirs: ReservoirSpec) -> Result<CycleProtocol> {
        let g = self.g_over_omega_c * self.omega_c;
        match self.variant {
            VariantKind::ResonatorFrequency => {
                CycleProtocol::resonator_frequency(self.omega_c, self.omega_h, g, self.theta, reservoirs)
            }
            VariantKind::CoupledCoupling => CycleProtocol::coupled_coupling(
                self.omega_c,
                self.omega_h,
                g,
                self.alpha,
                self.theta,
                reservoirs,
            ),
            VariantKind::QubitFrequency => CycleProtocol::qubit_frequency(
                self.omega_c,
                g,
                self.omega_qc,
                self.omega_qh,
                self.theta,
                reservoirs,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub parameter: SweptParameter,
    pub start: f64,
    pub stop: f64,
    pub n_points: usize,
}

impl Axis {
    /// Evenly spaced grid including both endpoints.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub parameter: SweptParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub template: ProtocolTemplate,
    /// Kelvin.
    pub t_cold: f64,
    /// Kelvin.
    pub t_hot: f64,
    /// rad/s.
    pub omega_ref: f64,
    pub n_levels: usize,
    pub cutoff: CutoffSetting,
    pub discord: bool,
    pub discord_grid: [usize; 2],
    pub sweep: Axis,
    pub series: Option<Series>,
    /// Worker threads; 0 uses every available core. Not part of the hash.
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub format: OutputFormat,
    #[serde(skip)]
    pub output: Option<String>,
}

impl SweepConfig {
    pub fn reservoirs(&self) -> Result<ReservoirSpec> {
        ReservoirSpec::new(self.t_cold, self.t_hot, self.omega_ref)
    }

    /// SHA-256 of everything that affects the numbers (output settings excluded).
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Every `(series value, swept value)` pair in row order.
    pub fn points(&self) -> Vec<(Option<f64>, f64)> {
        let grid = self.sweep.values();
        match &self.series {
            None => grid.into_iter().map(|x| (None, x)).collect(),
            Some(s) => s
                .values
                .iter()
                .flat_map(|&v| grid.iter().map(move |&x| (Some(v), x)))
                .collect(),
        }
    }

    /// Template with the series and swept values applied.
    pub fn template_at(&self, series_value: Option<f64>, x: f64) -> ProtocolTemplate {
        let mut t = self.template;
        if let (Some(s), Some(v)) = (&self.series, series_value) {
            t = t.with(s.parameter, v);
        }
        t.with(self.sweep.parameter, x)
    }

    pub fn protocol_at(&self, series_value: Option<f64>, x: f64) -> Result<CycleProtocol> {
        Ok(self
            .template_at(series_value, x)
            .protocol(self.reservoirs()?)?
            .with_n_levels(self.n_levels)?
            .with_cutoff(self.cutoff.policy()?))
    }
}

/// Temperature in kelvin, from a number or a unit-bearing string.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Temperature(f64);

/// Angular frequency in rad/s, from a number or a unit-bearing string.
#[derive(Debug, Clone, Copy, PartialEq)]
struct AngularFrequency(f64);

fn split_unit(s: &str) -> Option<(f64, &str)> {
    let s = s.trim();
    let at = s
        .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(at);
    num.trim().parse().ok().map(|v| (v, unit.trim()))
}

fn parse_temperature(s: &str) -> std::result::Result<f64, String> {
    let (v, unit) = split_unit(s).ok_or_else(|| format!("cannot read a temperature from `{s}`"))?;
    let scale = match unit {
        "K" | "" => 1.0,
        "mK" => 1e-3,
        "uK" | "µK" => 1e-6,
        "nK" => 1e-9,
        other => {
            return Err(format!(
                "expected a temperature unit (K, mK, uK, nK), got `{other}`"
            ))
        }
    };
    Ok(v * scale)
}

fn parse_frequency(s: &str) -> std::result::Result<f64, String> {
    let (v, unit) = split_unit(s).ok_or_else(|| format!("cannot read a frequency from `{s}`"))?;
    let hz = |scale: f64| 2.0 * PI * v * scale;
    Ok(match unit {
        "rad/s" | "" => v,
        "Hz" => hz(1.0),
        "kHz" => hz(1e3),
        "MHz" => hz(1e6),
        "GHz" => hz(1e9),
        "THz" => hz(1e12),
        other => {
            return Err(format!(
                "expected a frequency unit (rad/s, Hz, kHz, MHz, GHz, THz), got `{other}`"
            ))
        }
    })
}

struct UnitVisitor {
    what: &'static str,
    parse: fn(&str) -> std::result::Result<f64, String>,
}

impl<'de> Visitor<'de> for UnitVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a {} as a number or a string with a unit", self.what)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<f64, E> {
        (self.parse)(v).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Temperature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(UnitVisitor {
            what: "temperature",
            parse: parse_temperature,
        })
        .map(Self)
    }
}

impl<'de> Deserialize<'de> for AngularFrequency {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(UnitVisitor {
            what: "frequency",
            parse: parse_frequency,
        })
        .map(Self)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<SweepMode>,
    variant: Option<VariantKind>,
    omega_c: Option<f64>,
    omega_h: Option<f64>,
    g_over_omega_c: Option<f64>,
    theta: Option<f64>,
    alpha: Option<f64>,
    omega_qc: Option<f64>,
    omega_qh: Option<f64>,
    t_cold: Option<Temperature>,
    t_hot: Option<Temperature>,
    t_hot_ratio: Option<f64>,
    omega_ref: Option<AngularFrequency>,
    n_levels: Option<usize>,
    discord: Option<bool>,
    discord_grid_theta: Option<usize>,
    discord_grid_phi: Option<usize>,
    sweep: Option<RawAxis>,
    series: Option<RawSeries>,
    cutoff: Option<RawCutoff>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    parameter: Option<SweptParameter>,
    start: Option<f64>,
    stop: Option<f64>,
    n_points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    parameter: SweptParameter,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PolicyKind {
    Auto,
    Fixed,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCutoff {
    policy: Option<PolicyKind>,
    n: Option<usize>,
    tol: Option<f64>,
    ceiling: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<OutputFormat>,
    path: Option<String>,
    workers: Option<usize>,
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and validates a document, without environment overrides.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    parse_config_with_env(text, std::iter::empty())
}

/// Parses a document after applying `RABI_OTTO_*` overrides from `vars`.
pub fn parse_config_with_env<I>(text: &str, vars: I) -> Result<SweepConfig>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| config_error("<document>", e.message().to_string()))?;
    apply_env_overrides(&mut table, vars)?;
    let raw: RawConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        config_error(&path, e.into_inner().message().to_string())
    })?;
    resolve(raw)
}

/// Writes each `RABI_OTTO_A__B=value` into `table["a"]["b"]`. Values are read as
/// TOML literals, falling back to plain strings.
pub fn apply_env_overrides<I>(table: &mut toml::Table, vars: I) -> Result<()>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut vars: Vec<(String, String)> = vars
        .into_iter()
        .filter(|(k, _)| k.starts_with(ENV_PREFIX))
        .collect();
    vars.sort();
    for (key, raw) in vars {
        let path: Vec<String> = key[ENV_PREFIX.len()..]
            .to_ascii_lowercase()
            .split("__")
            .map(str::to_string)
            .collect();
        if path.iter().any(String::is_empty) {
            return Err(config_error(&key, "malformed override name"));
        }
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.clone()));
        let (last, parents) = path.split_last().expect("nonempty path");
        let mut node = &mut *table;
        for p in parents {
            let entry = node
                .entry(p.clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            node = match entry {
                toml::Value::Table(t) => t,
                _ => return Err(config_error(p, format!("{key} addresses a field of a non-table value"))),
            };
        }
        node.insert(last.clone(), value);
    }
    Ok(())
}

fn parameter_allowed(mode: SweepMode, variant: VariantKind, p: SweptParameter) -> bool {
    match (mode, p) {
        (SweepMode::Approx, SweptParameter::GOverOmegaC) => true,
        (SweepMode::Approx, _) => false,
        (SweepMode::Spectrum, SweptParameter::GOverOmegaC | SweptParameter::Theta) => true,
        (SweepMode::Spectrum, _) => false,
        (SweepMode::Cycle, SweptParameter::GOverOmegaC | SweptParameter::Theta) => true,
        (SweepMode::Cycle, SweptParameter::Alpha) => variant == VariantKind::CoupledCoupling,
        (SweepMode::Cycle, SweptParameter::OmegaQh) => variant == VariantKind::QubitFrequency,
    }
}

fn resolve(raw: RawConfig) -> Result<SweepConfig> {
    let mode = raw.mode.unwrap_or(SweepMode::Cycle);
    let variant = raw.variant.unwrap_or(VariantKind::ResonatorFrequency);
    let qubit = variant == VariantKind::QubitFrequency;

    let template = ProtocolTemplate {
        variant,
        omega_c: raw.omega_c.unwrap_or(1.0),
        omega_h: raw.omega_h.unwrap_or(2.0),
        g_over_omega_c: raw.g_over_omega_c.unwrap_or(0.0),
        theta: raw.theta.unwrap_or(0.0),
        alpha: raw.alpha.unwrap_or(1.0),
        omega_qc: raw.omega_qc.unwrap_or(0.5),
        omega_qh: raw.omega_qh.unwrap_or(1.0),
    };

    let t_cold = raw.t_cold.map_or(DEFAULT_T_COLD, |t| t.0);
    let t_hot = match (raw.t_hot, raw.t_hot_ratio) {
        (Some(_), Some(_)) => return Err(config_error("t_hot", "give t_hot or t_hot_ratio, not both")),
        (Some(t), None) => t.0,
        (None, ratio) => ratio.unwrap_or(if qubit { 4.0 } else { 9.0 }) * t_cold,
    };
    let omega_ref = raw.omega_ref.map_or(DEFAULT_OMEGA_REF, |w| w.0);
    if !(t_cold > 0.0) || !t_cold.is_finite() {
        return Err(config_error("t_cold", format!("must be a positive temperature, got {t_cold} K")));
    }
    if !(t_hot > t_cold) || !t_hot.is_finite() {
        return Err(config_error("t_hot", format!("must exceed t_cold, got {t_hot} K")));
    }
    if !(omega_ref > 0.0) || !omega_ref.is_finite() {
        return Err(config_error("omega_ref", "must be a positive angular frequency"));
    }

    let default_levels = if mode == SweepMode::Spectrum { 10 } else { DEFAULT_N_LEVELS };
    let n_levels = raw.n_levels.unwrap_or(default_levels);
    if n_levels < 2 {
        return Err(config_error("n_levels", "must be at least 2"));
    }

    let cutoff = {
        let c = raw.cutoff.unwrap_or_default();
        match c.policy.unwrap_or(if c.n.is_some() { PolicyKind::Fixed } else { PolicyKind::Auto }) {
            PolicyKind::Fixed => {
                if c.tol.is_some() || c.ceiling.is_some() {
                    return Err(config_error("cutoff", "tol and ceiling apply only to the auto policy"));
                }
                let n = c.n.ok_or_else(|| config_error("cutoff.n", "fixed policy needs n"))?;
                if n < 2 {
                    return Err(config_error("cutoff.n", "must be at least 2"));
                }
                CutoffSetting::Fixed { n }
            }
            PolicyKind::Auto => {
                if c.n.is_some() {
                    return Err(config_error("cutoff.n", "n applies only to the fixed policy"));
                }
                let tol = c.tol.unwrap_or(1e-8);
                if !(tol > 0.0) {
                    return Err(config_error("cutoff.tol", "must be positive"));
                }
                CutoffSetting::Auto {
                    tol,
                    ceiling: c.ceiling.unwrap_or(CUTOFF_CEILING),
                }
            }
        }
    };

    let sweep = {
        let a = raw.sweep.unwrap_or_default();
        let parameter = a.parameter.unwrap_or(SweptParameter::GOverOmegaC);
        let (d_start, d_stop, d_n) = match (parameter, variant) {
            (SweptParameter::GOverOmegaC, VariantKind::CoupledCoupling) => (0.0, 2.0, 50),
            (SweptParameter::GOverOmegaC, VariantKind::QubitFrequency) => (0.0, 3.0, 100),
            (SweptParameter::GOverOmegaC, _) => (0.0, 3.5, 100),
            (SweptParameter::Theta, _) => (0.0, PI / 2.0, 50),
            (SweptParameter::Alpha, _) => (0.0, 2.0, 50),
            (SweptParameter::OmegaQh, _) => (template.omega_qc, 2.0, 50),
        };
        Axis {
            parameter,
            start: a.start.unwrap_or(d_start),
            stop: a.stop.unwrap_or(d_stop),
            n_points: a.n_points.unwrap_or(d_n),
        }
    };
    if sweep.n_points < 2 {
        return Err(config_error("sweep.n_points", format!("need at least 2 points, got {}", sweep.n_points)));
    }
    if !sweep.start.is_finite() || !sweep.stop.is_finite() {
        return Err(config_error("sweep", "range must be finite"));
    }
    if sweep.start > sweep.stop {
        return Err(config_error(
            "sweep.start",
            format!("start {} exceeds stop {}", sweep.start, sweep.stop),
        ));
    }
    if !parameter_allowed(mode, variant, sweep.parameter) {
        return Err(config_error(
            "sweep.parameter",
            format!("`{}` cannot be swept in {:?} mode with the {:?} variant", sweep.parameter.name(), mode, variant),
        ));
    }

    let series = match raw.series {
        None => None,
        Some(s) => {
            if mode == SweepMode::Approx {
                return Err(config_error("series", "approx mode takes no series"));
            }
            if s.parameter == sweep.parameter {
                return Err(config_error("series.parameter", "must differ from the swept parameter"));
            }
            if !parameter_allowed(mode, variant, s.parameter) {
                return Err(config_error(
                    "series.parameter",
                    format!("`{}` is not valid for this mode and variant", s.parameter.name()),
                ));
            }
            if s.values.is_empty() {
                return Err(config_error("series.values", "need at least one value"));
            }
            Some(Series {
                parameter: s.parameter,
                values: s.values,
            })
        }
    };

    if mode == SweepMode::Approx {
        if variant != VariantKind::ResonatorFrequency {
            return Err(config_error("variant", "approx mode needs the resonator-frequency variant"));
        }
        if template.theta != 0.0 {
            return Err(config_error("theta", "the two-level approximation assumes theta = 0"));
        }
    }

    let discord = raw.discord.unwrap_or(false);
    if discord && mode != SweepMode::Cycle {
        return Err(config_error("discord", "discord columns need cycle mode"));
    }
    let discord_grid = [raw.discord_grid_theta.unwrap_or(64), raw.discord_grid_phi.unwrap_or(128)];
    if discord_grid[0] < 2 || discord_grid[1] < 1 {
        return Err(config_error("discord_grid_theta", "grid needs at least 2 x 1 points"));
    }

    let output = raw.output.unwrap_or_default();
    let config = SweepConfig {
        mode,
        template,
        t_cold,
        t_hot,
        omega_ref,
        n_levels,
        cutoff,
        discord,
        discord_grid,
        sweep,
        series,
        workers: output.workers.unwrap_or(0),
        format: output.format.unwrap_or_default(),
        output: output.path,
    };

    // catch template mistakes (e.g. omega_h < omega_c) once, not per row
    let probe_series = config.series.as_ref().map(|s| s.values.clone());
    for sv in probe_series.map_or(vec![None], |v| v.into_iter().map(Some).collect()) {
        for x in [config.sweep.start, config.sweep.stop] {
            config
                .protocol_at(sv, x)
                .map_err(|e| config_error("<protocol>", e.to_string()))?;
        }
    }
    Ok(config)
}
