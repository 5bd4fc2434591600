//! Flat `key = value` run configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dotsim_core::{AngleState, Envelope, Formulation, InitialState, Scenario, SweepAxis, SweepParam, SystemParams};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Compare,
    Bench,
    Sweep,
    Qca,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Compare => "compare",
            Command::Bench => "bench",
            Command::Sweep => "sweep",
            Command::Qca => "qca",
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required key(s): {}", .0.join(", "))]
    MissingKey(Vec<String>),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: expected {expected}, got `{value}`")]
    TypeMismatch { key: String, value: String, expected: &'static str },
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: String, line: usize },
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
}

/// Keys accepted in config files and overrides.
pub const KNOWN_KEYS: &[&str] = &[
    "k",
    "omega_coulomb",
    "rabi_ratio",
    "omega_drive",
    "phase",
    "envelope",
    "tau",
    "formulation",
    "initial",
    "alpha0",
    "phi0",
    "lambda0",
    "t_end",
    "dt",
    "sample_stride",
    "out",
    "svg",
    "window_start",
    "window_end",
    "sweep_x",
    "sweep_y",
    "repeats",
    "netlist",
    "control",
    "control_node",
    "eta",
    "tau_d",
    "p_threshold",
];

const SWEEP_ONLY: &[&str] = &["sweep_x", "sweep_y"];
const BENCH_ONLY: &[&str] = &["repeats"];
const QCA_ONLY: &[&str] = &["netlist", "control", "control_node", "eta", "tau_d", "p_threshold"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    File,
    Override,
    Default,
}

/// Where the control cell of a QCA circuit comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlSpec {
    /// Electron fully localized on the dot encoding this bit.
    Bit(dotsim_core::Bit),
    /// Final state of the configured scenario.
    Trajectory,
}

#[derive(Debug, Clone)]
pub struct QcaConfig {
    pub netlist: PathBuf,
    pub control: ControlSpec,
    pub control_node: String,
    pub eta: f64,
    pub tau_d: f64,
    pub p_threshold: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Present for every command that integrates.
    pub scenario: Option<Scenario>,
    pub out_dir: PathBuf,
    pub emit_svg: bool,
    pub window: Option<(f64, f64)>,
    pub sweep_axes: Vec<SweepAxis>,
    pub repeats: usize,
    pub qca: Option<QcaConfig>,
    /// Every resolved setting, in key order, for the run log.
    pub resolved: Vec<(String, String, Source)>,
}

impl RunConfig {
    /// `key = value` lines, with defaults marked, suitable for `run.log`.
    pub fn log_lines(&self) -> Vec<String> {
        self.resolved
            .iter()
            .map(|(k, v, src)| match src {
                Source::Default => format!("{k} = {v}  # default"),
                Source::Override => format!("{k} = {v}  # command line"),
                Source::File => format!("{k} = {v}"),
            })
            .collect()
    }
}

struct Entries {
    values: BTreeMap<String, (String, Source)>,
    resolved: Vec<(String, String, Source)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn note(&mut self, key: &str, value: impl fmt::Display) {
        let src = self.values.get(key).map_or(Source::Default, |(_, s)| *s);
        self.resolved.push((key.to_string(), value.to_string(), src));
    }

    fn parse<T: FromStr>(&self, key: &str, expected: &'static str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ConfigError::TypeMismatch {
                key: key.into(),
                value: v.into(),
                expected,
            }),
        }
    }

    fn number(&mut self, key: &str, default: Option<f64>) -> Result<Option<f64>, ConfigError> {
        let value = self.parse::<f64>(key, "a number")?.or(default);
        if let Some(v) = value {
            self.note(key, v);
        }
        Ok(value)
    }

    fn choice(&mut self, key: &str, options: &[&'static str], default: &'static str) -> Result<String, ConfigError> {
        let value = self.raw(key).unwrap_or(default).to_string();
        if !options.contains(&value.as_str()) {
            return Err(ConfigError::TypeMismatch { key: key.into(), value, expected: one_of(options) });
        }
        self.note(key, &value);
        Ok(value)
    }
}

fn one_of(options: &[&'static str]) -> &'static str {
    match options {
        ["constant", "tanh"] => "one of constant, tanh",
        ["amplitude", "angle"] => "one of amplitude, angle",
        ["left", "right", "custom"] => "one of left, right, custom",
        _ => "one of the listed values",
    }
}

/// Splits `key = value` text into entries, ignoring blank lines and `#` comments.
pub fn parse_pairs(text: &str, origin: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| ConfigError::Syntax { path: origin.to_string(), line: i + 1 })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses an axis spec `name:v1,v2,...` or `name:start..end/n` (n points, inclusive).
pub fn parse_axis(key: &str, spec: &str) -> Result<SweepAxis, ConfigError> {
    let mismatch = || ConfigError::TypeMismatch {
        key: key.into(),
        value: spec.into(),
        expected: "`name:v1,v2,...` or `name:start..end/n`",
    };
    let (name, values) = spec.split_once(':').ok_or_else(mismatch)?;
    let param: SweepParam = name
        .trim()
        .parse()
        .map_err(|_| ConfigError::Invalid(format!("{key}: unknown sweep axis parameter `{}`", name.trim())))?;
    let values = values.trim();
    let grid = if let Some((range, count)) = values.split_once('/') {
        let (a, b) = range.split_once("..").ok_or_else(mismatch)?;
        let a: f64 = a.trim().parse().map_err(|_| mismatch())?;
        let b: f64 = b.trim().parse().map_err(|_| mismatch())?;
        let n: usize = count.trim().parse().map_err(|_| mismatch())?;
        match n {
            0 => return Err(mismatch()),
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        }
    } else {
        values.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| mismatch())).collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err(mismatch());
    }
    Ok(SweepAxis { param, values: grid })
}

/// Reads the config file (if any), applies `key=value` overrides and the
/// `--out`/`--svg` flags, and validates the result for `command`.
pub fn parse_config(
    command: Command,
    path: Option<&Path>,
    overrides: &[String],
    out_flag: Option<&Path>,
    svg_flag: bool,
) -> Result<RunConfig, ConfigError> {
    let mut values: BTreeMap<String, (String, Source)> = BTreeMap::new();
    let mut base_dir = PathBuf::from(".");
    if let Some(path) = path {
        let text =
            fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        for (k, v) in parse_pairs(&text, &path.display().to_string())? {
            values.insert(k, (v, Source::File));
        }
        if let Some(dir) = path.parent() {
            base_dir = dir.to_path_buf();
        }
    }
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| ConfigError::Syntax { path: "<command line>".into(), line: 0 })?;
        values.insert(k.trim().to_string(), (v.trim().to_string(), Source::Override));
    }
    if let Some(out) = out_flag {
        values.insert("out".into(), (out.display().to_string(), Source::Override));
    }
    if svg_flag {
        values.insert("svg".into(), ("true".into(), Source::Override));
    }
    for k in values.keys() {
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
    }
    let scoped = |keys: &[&str], allowed: Command| -> Result<(), ConfigError> {
        match keys.iter().find(|k| values.contains_key(**k)) {
            Some(k) if command != allowed => Err(ConfigError::Invalid(format!(
                "key `{k}` is only valid for `{}`, not `{}`",
                allowed.name(),
                command.name()
            ))),
            _ => Ok(()),
        }
    };
    scoped(SWEEP_ONLY, Command::Sweep)?;
    scoped(BENCH_ONLY, Command::Bench)?;
    scoped(QCA_ONLY, Command::Qca)?;

    let mut e = Entries { values, resolved: Vec::new() };

    let control = if command == Command::Qca {
        let spec = e.raw("control").map(str::to_string);
        let control = match spec.as_deref() {
            Some("0") => Some(ControlSpec::Bit(dotsim_core::Bit::Zero)),
            Some("1") => Some(ControlSpec::Bit(dotsim_core::Bit::One)),
            Some("trajectory") => Some(ControlSpec::Trajectory),
            Some(v) => {
                return Err(ConfigError::TypeMismatch {
                    key: "control".into(),
                    value: v.into(),
                    expected: "0, 1 or trajectory",
                })
            }
            None => None,
        };
        let mut missing = Vec::new();
        if e.raw("netlist").is_none() {
            missing.push("netlist".to_string());
        }
        if control.is_none() {
            missing.push("control".to_string());
        }
        if !missing.is_empty() {
            return Err(ConfigError::MissingKey(missing));
        }
        control
    } else {
        None
    };

    let needs_scenario = command != Command::Qca || control == Some(ControlSpec::Trajectory);
    let scenario = if needs_scenario { Some(build_scenario(&mut e)?) } else { None };

    let out_dir = PathBuf::from(e.raw("out").unwrap_or("out"));
    e.note("out", out_dir.display());
    let emit_svg = e.parse::<bool>("svg", "true or false")?.unwrap_or(false);
    e.note("svg", emit_svg);

    let window = match (e.parse::<f64>("window_start", "a number")?, e.parse::<f64>("window_end", "a number")?) {
        (None, None) => None,
        (Some(a), Some(b)) => {
            e.note("window_start", a);
            e.note("window_end", b);
            Some((a, b))
        }
        _ => return Err(ConfigError::Invalid("window_start and window_end must be given together".into())),
    };

    let mut sweep_axes = Vec::new();
    if command == Command::Sweep {
        match e.raw("sweep_x") {
            None => return Err(ConfigError::MissingKey(vec!["sweep_x".into()])),
            Some(spec) => sweep_axes.push(parse_axis("sweep_x", spec)?),
        }
        if let Some(spec) = e.raw("sweep_y") {
            sweep_axes.push(parse_axis("sweep_y", spec)?);
        }
        for (key, ax) in ["sweep_x", "sweep_y"].iter().zip(&sweep_axes) {
            let values: Vec<String> = ax.values.iter().map(f64::to_string).collect();
            e.note(key, format!("{}:{}", ax.param.name(), values.join(",")));
        }
    }

    let mut repeats = 5;
    if command == Command::Bench {
        repeats = e.parse::<usize>("repeats", "a positive integer")?.unwrap_or(5);
        if repeats < 3 {
            return Err(ConfigError::Invalid("repeats must be >= 3".into()));
        }
        e.note("repeats", repeats);
    }

    let qca = match control {
        Some(control) => {
            let raw = PathBuf::from(e.raw("netlist").unwrap());
            let netlist = if raw.is_absolute() || raw.exists() { raw } else { base_dir.join(raw) };
            e.note("netlist", netlist.display());
            e.note("control", e.raw("control").unwrap_or_default().to_string());
            let control_node = e.raw("control_node").unwrap_or("c").to_string();
            e.note("control_node", &control_node);
            let eta = e.number("eta", Some(1.0))?.unwrap();
            let tau_d = e.number("tau_d", Some(dotsim_core::qca::DEFAULT_TAU_D))?.unwrap();
            let p_threshold = e.number("p_threshold", Some(dotsim_core::qca::DEFAULT_P_THRESHOLD))?.unwrap();
            if !(0.0..=1.0).contains(&eta) {
                return Err(ConfigError::Invalid("eta must lie in [0, 1]".into()));
            }
            if tau_d.is_nan() || tau_d <= 0.0 {
                return Err(ConfigError::Invalid("tau_d must be > 0".into()));
            }
            if p_threshold.is_nan() || p_threshold < 0.0 {
                return Err(ConfigError::Invalid("p_threshold must be >= 0".into()));
            }
            Some(QcaConfig { netlist, control, control_node, eta, tau_d, p_threshold })
        }
        None => None,
    };

    Ok(RunConfig { command, scenario, out_dir, emit_svg, window, sweep_axes, repeats, qca, resolved: e.resolved })
}

fn build_scenario(e: &mut Entries) -> Result<Scenario, ConfigError> {
    let missing: Vec<String> = ["omega_coulomb", "rabi_ratio"]
        .iter()
        .filter(|k| e.raw(k).is_none())
        .map(|k| k.to_string())
        .chain((e.raw("envelope") == Some("tanh") && e.raw("tau").is_none()).then(|| "tau".to_string()))
        .chain(
            ["alpha0", "phi0"]
                .iter()
                .filter(|k| e.raw("initial") == Some("custom") && e.raw(k).is_none())
                .map(|k| k.to_string()),
        )
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::MissingKey(missing));
    }

    let k = e.number("k", Some(1.0))?.unwrap();
    let omega_coulomb = e.number("omega_coulomb", None)?.unwrap();
    let rabi_ratio = e.number("rabi_ratio", None)?.unwrap();
    let omega_drive = e.number("omega_drive", Some(SystemParams::DEFAULT_OMEGA_DRIVE))?.unwrap();
    let phase = e.number("phase", Some(0.0))?.unwrap();
    let params = SystemParams { k, omega_coulomb, omega_drive, rabi_ratio, phase };
    params.validate().map_err(|err| ConfigError::Invalid(err.to_string()))?;

    let envelope = match e.choice("envelope", &["constant", "tanh"], "constant")?.as_str() {
        "tanh" => Envelope::TanhRise { tau: e.number("tau", None)?.unwrap() },
        _ => Envelope::Constant,
    };
    envelope.validate().map_err(|err| ConfigError::Invalid(err.to_string()))?;

    let formulation = match e.choice("formulation", &["amplitude", "angle"], "amplitude")?.as_str() {
        "angle" => Formulation::Angle,
        _ => Formulation::Amplitude,
    };
    let initial = match e.choice("initial", &["left", "right", "custom"], "left")?.as_str() {
        "right" => InitialState::RightDot,
        "custom" => {
            let alpha = e.number("alpha0", None)?.unwrap();
            let phi = e.number("phi0", None)?.unwrap();
            let lambda = e.number("lambda0", Some(0.0))?.unwrap();
            InitialState::Custom(AngleState::new(alpha, phi).with_lambda(lambda))
        }
        _ => InitialState::LeftDot,
    };

    let t_end = e.number("t_end", Some(Scenario::default_t_end(&envelope)))?.unwrap();
    let dt = e.number("dt", Some(Scenario::DEFAULT_DT))?.unwrap();
    let stride = e.parse::<usize>("sample_stride", "a positive integer")?.unwrap_or(Scenario::DEFAULT_STRIDE);
    e.note("sample_stride", stride);

    let scenario = Scenario::new(params, envelope)
        .with_formulation(formulation)
        .with_initial(initial)
        .with_t_end(t_end)
        .with_dt(dt)
        .with_stride(stride);
    scenario.validate().map_err(|err| ConfigError::Invalid(err.to_string()))?;
    Ok(scenario)
}
