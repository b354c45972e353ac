//! Run configuration, schema version 1. The JSON Schema lives in
//! `schema/run_config.v1.json`; this file is the authoritative reader.

use std::fmt;
use std::path::{Path, PathBuf};

use g2thermo::analytic::default_ratio_axis;
use g2thermo::check::Module;
use g2thermo::maxwell::{AxisName, DiscreteScheme, GridAxis, ReconstructionKind};
use g2thermo::models::{Boundary, ModelSpec};
use g2thermo::statmech::SpectrumMethod;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sweep,
    Reconstruct,
    Bethe,
    TfimExact,
    CriticalFit,
    YangGaudin,
    Check,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Sweep => "sweep",
            Command::Reconstruct => "reconstruct",
            Command::Bethe => "bethe",
            Command::TfimExact => "tfim-exact",
            Command::CriticalFit => "critical-fit",
            Command::YangGaudin => "yang-gaudin",
            Command::Check => "check",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A one-dimensional grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Grid {
    /// `points` values from `start` to `stop` inclusive, evenly spaced.
    Linspace { start: f64, stop: f64, points: usize },
    /// Evenly spaced in the logarithm; `start`, `stop` > 0.
    Logspace { start: f64, stop: f64, points: usize },
    Values(Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Linspace { start, stop, points } => spaced(start, stop, points),
            Grid::Logspace { start, stop, points } => spaced(start.ln(), stop.ln(), points)
                .into_iter()
                .enumerate()
                .map(|(i, l)| match i {
                    0 => start,
                    i if i + 1 == points => stop,
                    _ => l.exp(),
                })
                .collect(),
            Grid::Values(ref v) => v.clone(),
        }
    }

    fn validate(&self, what: &str) -> Result<(), String> {
        match *self {
            Grid::Linspace { points, .. } | Grid::Logspace { points, .. } if points < 2 => {
                return Err(format!("{what}: a spaced grid needs at least 2 points"));
            }
            Grid::Logspace { start, stop, .. } if !(start > 0.0 && stop > 0.0) => {
                return Err(format!("{what}: logspace bounds must be positive"));
            }
            _ => {}
        }
        let v = self.values();
        if v.is_empty() {
            return Err(format!("{what}: grid is empty"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(format!("{what}: grid has non-finite values"));
        }
        if v.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(format!("{what}: grid must be strictly increasing"));
        }
        Ok(())
    }
}

fn spaced(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { stop } else { start + (stop - start) * i as f64 / last })
        .collect()
}

/// The thermodynamic variable paired with `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XAxis {
    pub name: AxisName,
    pub grid: Grid,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dense diagonalization below dimension 2048, Lanczos above.
    #[default]
    Auto,
    Dense,
}

impl Method {
    pub fn spectrum(self, max_temperature: f64) -> SpectrumMethod {
        match self {
            Method::Auto => SpectrumMethod::Auto { max_temperature },
            Method::Dense => SpectrumMethod::Dense,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Derivative {
    pub axis: GridAxis,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub c_axis: Grid,
    pub x_axis: XAxis,
    /// Fixed temperature when `X` is not the temperature.
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub method: Method,
    /// Adds a column with this derivative of `<G2>`.
    #[serde(default)]
    pub derivative: Option<Derivative>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Smoothing {
    pub window: usize,
    pub poly_order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    pub kind: ReconstructionKind,
    pub model: ModelSpec,
    pub c_axis: Grid,
    pub x_axis: XAxis,
    /// `X` at which `Y(c)` is reconstructed; on the `X` grid.
    pub at_x: AtX,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub c0: f64,
    /// `Y(c0)`; computed by the direct route when absent.
    #[serde(default)]
    pub anchor: Option<f64>,
    #[serde(default)]
    pub scheme: Option<DiscreteScheme>,
    #[serde(default)]
    pub smoothing: Option<Smoothing>,
    /// Also evaluate the direct route at every `c`.
    #[serde(default = "yes")]
    pub direct: bool,
}

/// One `X`, several, or `"all"` points of the `X` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtX {
    One(f64),
    Many(Vec<f64>),
    Every(Every),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Every {
    All,
}

impl AtX {
    pub fn resolve(&self, grid: &[f64]) -> Vec<f64> {
        match self {
            AtX::One(x) => vec![*x],
            AtX::Many(v) => v.clone(),
            AtX::Every(_) => grid.to_vec(),
        }
    }
}

fn on_grid(grid: &[f64], x: f64) -> bool {
    grid.iter().any(|&g| g == x || (g - x).abs() <= 1e-12 * g.abs().max(x.abs()))
}

fn yes() -> bool {
    true
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetheConfig {
    #[serde(default = "one")]
    pub density: f64,
    pub gamma: Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfimExactConfig {
    #[serde(default = "one")]
    pub h_x: f64,
    /// Must contain 0, the anchor of the Maxwell route.
    pub c_axis: Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalFitConfig {
    #[serde(default = "one")]
    pub h_x: f64,
    /// `|c|/h_x`, all in `(1, 1.1]`.
    pub ratio: Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YangGaudinConfig {
    #[serde(default = "one")]
    pub density: f64,
    #[serde(default = "one")]
    pub particles: f64,
    #[serde(default)]
    pub polarization: f64,
    pub c: Grid,
    pub temperature: Grid,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    /// Empty means every module.
    #[serde(default)]
    pub modules: Vec<Module>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// One run. Exactly the section named after `command` is present (or
/// absent, for the built-in default).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    /// Standard deviation of Gaussian noise added to every `<G2>` value.
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruct: Option<ReconstructConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bethe: Option<BetheConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tfim_exact: Option<TfimExactConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_fit: Option<CriticalFitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yang_gaudin: Option<YangGaudinConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckConfig>,
}

/// A config that cannot be used; maps to exit status 2.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SchemaError {}

/// Parses `text`, reporting the offending field path and position.
pub fn parse(text: &str, origin: &str) -> Result<RunConfig, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SchemaError(format!(
            "{origin}:{}:{}: at `{path}`: {inner}",
            inner.line(),
            inner.column()
        ))
    })?;
    config.validate().map_err(|m| SchemaError(format!("{origin}: {m}")))?;
    Ok(config)
}

pub fn load(path: &Path) -> Result<RunConfig, SchemaError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SchemaError(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

impl RunConfig {
    /// Built-in configuration of `command`; `kind` picks the reconstruct
    /// setup.
    pub fn default_for(command: Command, kind: Option<ReconstructionKind>) -> Self {
        let mut config = RunConfig {
            schema_version: SCHEMA_VERSION,
            command,
            seed: 0,
            noise_sigma: 0.0,
            output: None,
            sweep: None,
            reconstruct: None,
            bethe: None,
            tfim_exact: None,
            critical_fit: None,
            yang_gaudin: None,
            check: None,
        };
        match command {
            Command::Sweep => {
                config.sweep = Some(SweepConfig {
                    model: ModelSpec::tfim(8, 1.0, 0.0).with_boundary(Boundary::Periodic),
                    c_axis: Grid::Linspace { start: -4.0, stop: 0.0, points: 41 },
                    x_axis: XAxis {
                        name: AxisName::Temperature,
                        grid: Grid::Logspace { start: 0.1, stop: 3.0, points: 30 },
                    },
                    temperature: 0.0,
                    method: Method::Auto,
                    derivative: None,
                })
            }
            Command::Reconstruct => {
                config.reconstruct = Some(default_reconstruct(kind.unwrap_or(ReconstructionKind::Magnetization)))
            }
            Command::Bethe => {
                config.bethe = Some(BetheConfig {
                    density: 1.0,
                    gamma: Grid::Logspace { start: 1.0, stop: 100.0, points: 50 },
                })
            }
            Command::TfimExact => {
                config.tfim_exact = Some(TfimExactConfig {
                    h_x: 1.0,
                    c_axis: Grid::Linspace { start: -4.0, stop: 0.0, points: 41 },
                })
            }
            Command::CriticalFit => {
                config.critical_fit = Some(CriticalFitConfig {
                    h_x: 1.0,
                    ratio: Grid::Values(default_ratio_axis()),
                })
            }
            Command::YangGaudin => {
                config.yang_gaudin = Some(YangGaudinConfig {
                    density: 1.0,
                    particles: 1.0,
                    polarization: 0.0,
                    c: Grid::Linspace { start: 0.0, stop: 0.1, points: 11 },
                    temperature: Grid::Values(vec![25.0, 50.0, 100.0]),
                })
            }
            Command::Check => config.check = Some(CheckConfig::default()),
        }
        config
    }

    /// Cross-field rules the types cannot express.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(format!("noise_sigma must be finite and >= 0, got {}", self.noise_sigma));
        }
        let sections = [
            (Command::Sweep, self.sweep.is_some()),
            (Command::Reconstruct, self.reconstruct.is_some()),
            (Command::Bethe, self.bethe.is_some()),
            (Command::TfimExact, self.tfim_exact.is_some()),
            (Command::CriticalFit, self.critical_fit.is_some()),
            (Command::YangGaudin, self.yang_gaudin.is_some()),
            (Command::Check, self.check.is_some()),
        ];
        if let Some((other, _)) = sections.iter().find(|(c, present)| *present && *c != self.command) {
            return Err(format!(
                "section `{}` does not belong to command `{}`",
                other.as_str().replace('-', "_"),
                self.command.as_str()
            ));
        }
        if self.noise_sigma > 0.0 && !matches!(self.command, Command::Sweep | Command::Reconstruct) {
            return Err(format!("noise_sigma applies to sweep and reconstruct, not {}", self.command.as_str()));
        }
        if let Some(s) = &self.sweep {
            s.model.validate().map_err(|e| format!("sweep.model: {e}"))?;
            s.c_axis.validate("sweep.c_axis")?;
            s.x_axis.grid.validate("sweep.x_axis.grid")?;
            if let Some(d) = &s.derivative {
                if !(1..=2).contains(&d.order) {
                    return Err(format!("sweep.derivative.order must be 1 or 2, got {}", d.order));
                }
            }
        }
        if let Some(r) = &self.reconstruct {
            r.model.validate().map_err(|e| format!("reconstruct.model: {e}"))?;
            r.c_axis.validate("reconstruct.c_axis")?;
            r.x_axis.grid.validate("reconstruct.x_axis.grid")?;
            if !r.kind.accepts(r.x_axis.name) {
                return Err(format!(
                    "reconstruct: {} cannot be reconstructed along {}",
                    r.kind.as_str(),
                    r.x_axis.name
                ));
            }
            let grid = r.x_axis.grid.values();
            let at = r.at_x.resolve(&grid);
            if at.is_empty() {
                return Err("reconstruct.at_x is empty".into());
            }
            if let Some(x) = at.iter().find(|&&x| !on_grid(&grid, x)) {
                return Err(format!("reconstruct.at_x = {x} is not on the x grid"));
            }
            if !r.c_axis.values().contains(&r.c0) {
                return Err(format!("reconstruct.c0 = {} is not on the c grid", r.c0));
            }
        }
        if let Some(b) = &self.bethe {
            b.gamma.validate("bethe.gamma")?;
        }
        if let Some(t) = &self.tfim_exact {
            t.c_axis.validate("tfim_exact.c_axis")?;
        }
        if let Some(f) = &self.critical_fit {
            f.ratio.validate("critical_fit.ratio")?;
        }
        if let Some(y) = &self.yang_gaudin {
            y.c.validate("yang_gaudin.c")?;
            y.temperature.validate("yang_gaudin.temperature")?;
        }
        Ok(())
    }
}

fn default_reconstruct(kind: ReconstructionKind) -> ReconstructConfig {
    let tfim = ModelSpec::tfim(8, 1.0, 0.0).with_boundary(Boundary::Periodic);
    let around = |x: f64, h: f64, points: usize| {
        let half = (points / 2) as f64;
        Grid::Values((0..points).map(|k| x + (k as f64 - half) * h).collect())
    };
    let base = ReconstructConfig {
        kind,
        model: tfim.clone(),
        c_axis: Grid::Linspace { start: -4.0, stop: 0.0, points: 41 },
        x_axis: XAxis { name: AxisName::Hx, grid: around(1.0, 1e-3, 3) },
        at_x: AtX::One(1.0),
        temperature: 0.02,
        method: Method::Auto,
        c0: 0.0,
        anchor: None,
        scheme: None,
        smoothing: None,
        direct: true,
    };
    match kind {
        ReconstructionKind::Magnetization => base,
        ReconstructionKind::Entropy => ReconstructConfig {
            x_axis: XAxis { name: AxisName::Temperature, grid: around(1.0, 1e-3, 3) },
            ..base
        },
        ReconstructionKind::HeatCapacity => ReconstructConfig {
            x_axis: XAxis { name: AxisName::Temperature, grid: around(1.0, 1e-3, 5) },
            ..base
        },
        ReconstructionKind::ChemicalPotential => ReconstructConfig {
            model: ModelSpec::fermi_hubbard(6, 1.0, 0.0, 3, 3),
            c_axis: Grid::Linspace { start: 0.0, stop: 8.0, points: 41 },
            x_axis: XAxis { name: AxisName::Particles, grid: Grid::Values(vec![5.0, 6.0, 7.0]) },
            at_x: AtX::One(6.0),
            temperature: 0.1,
            ..base
        },
        ReconstructionKind::Pressure | ReconstructionKind::InverseCompressibility => ReconstructConfig {
            model: ModelSpec::tfim(7, 1.0, 0.0),
            x_axis: XAxis { name: AxisName::Sites, grid: Grid::Values(vec![6.0, 7.0, 8.0]) },
            at_x: AtX::One(7.0),
            temperature: 0.5,
            scheme: (kind == ReconstructionKind::Pressure).then_some(DiscreteScheme::Forward),
            ..base
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = Grid::Linspace { start: -4.0, stop: 0.0, points: 41 }.values();
        assert_eq!(g.len(), 41);
        assert_eq!(g[20], -2.0);
        assert_eq!(g[40], 0.0);
        let g = Grid::Logspace { start: 1.0, stop: 100.0, points: 3 }.values();
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-13);
        assert_eq!(g[2], 100.0);
    }

    #[test]
    fn every_default_validates_and_round_trips() {
        for command in [
            Command::Sweep,
            Command::Reconstruct,
            Command::Bethe,
            Command::TfimExact,
            Command::CriticalFit,
            Command::YangGaudin,
            Command::Check,
        ] {
            let c = RunConfig::default_for(command, None);
            c.validate().unwrap();
            let text = serde_json::to_string(&c).unwrap();
            assert_eq!(parse(&text, "test").unwrap(), c);
        }
    }

    #[test]
    fn unknown_fields_are_located() {
        let text = "{\n  \"schema_version\": 1,\n  \"command\": \"bethe\",\n  \"bethe\": {\"gama\": 1}\n}";
        let err = parse(text, "cfg").unwrap_err().0;
        assert!(err.contains("bethe.gama") || err.contains("`bethe`"), "{err}");
        assert!(err.contains("cfg:4:"), "{err}");
    }

    #[test]
    fn foreign_sections_rejected() {
        let mut c = RunConfig::default_for(Command::Bethe, None);
        c.check = Some(CheckConfig::default());
        assert!(c.validate().is_err());
    }

    /// Every key a serialized config can carry is described in the shipped
    /// JSON Schema.
    #[test]
    fn schema_describes_every_field() {
        let schema: serde_json::Value =
            serde_json::from_str(include_str!("../schema/run_config.v1.json")).unwrap();
        fn resolve<'a>(root: &'a serde_json::Value, s: &'a serde_json::Value) -> &'a serde_json::Value {
            match s.get("$ref").and_then(|r| r.as_str()) {
                Some(r) => resolve(root, root.pointer(r.trim_start_matches('#')).unwrap()),
                None => s,
            }
        }
        fn walk(root: &serde_json::Value, s: &serde_json::Value, v: &serde_json::Value, path: &str) {
            let s = resolve(root, s);
            let branches: Vec<&serde_json::Value> = match s.get("oneOf") {
                Some(b) => b.as_array().unwrap().iter().map(|b| resolve(root, b)).collect(),
                None => vec![s],
            };
            match v {
                serde_json::Value::Object(map) => {
                    let branch = branches
                        .iter()
                        .find(|b| b.get("properties").is_some_and(|p| map.keys().all(|k| p.get(k).is_some())))
                        .unwrap_or_else(|| panic!("{path}: no schema branch covers {:?}", map.keys()));
                    for (k, child) in map {
                        walk(root, &branch["properties"][k], child, &format!("{path}.{k}"));
                    }
                }
                serde_json::Value::Array(items) => {
                    if let Some(b) = branches.iter().find(|b| b.get("items").is_some()) {
                        for item in items {
                            walk(root, &b["items"], item, path);
                        }
                    }
                }
                _ => {}
            }
        }
        let mut configs: Vec<RunConfig> = [
            Command::Sweep,
            Command::Bethe,
            Command::TfimExact,
            Command::CriticalFit,
            Command::YangGaudin,
            Command::Check,
        ]
        .into_iter()
        .map(|c| RunConfig::default_for(c, None))
        .collect();
        for kind in [
            ReconstructionKind::Pressure,
            ReconstructionKind::Entropy,
            ReconstructionKind::ChemicalPotential,
            ReconstructionKind::Magnetization,
            ReconstructionKind::HeatCapacity,
            ReconstructionKind::InverseCompressibility,
        ] {
            configs.push(RunConfig::default_for(Command::Reconstruct, Some(kind)));
        }
        for c in configs {
            walk(&schema, &schema, &serde_json::to_value(&c).unwrap(), "");
        }
    }
}
