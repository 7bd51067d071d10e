//! Run configuration: one versioned JSON document.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "seed": 0,
//!   "geometry": { "B": "pi", "Lx": 100, "Nx": 1024, "Ny": 32, "b": "auto" },
//!   "solver": { "dt": 0.001, "t_end": 40, "scheme": "exponential-RK4",
//!               "dealias": true, "convection": 0, "output_every": 100,
//!               "dissipation": "per_step", "nonlinear": true,
//!               "absorber": "auto", "snapshots": false },
//!   "initial": { "kind": "gaussian_mode", "norm": 0.16875, "x0": 0, "s": 2, "mode": 1 },
//!   "experiment": { "window": "last_half", "regime": "weak", "norm": "w_l2" }
//! }
//! ```
//!
//! Only `schema`, `geometry.{B,Lx,Nx,Ny}`, `solver.{dt,t_end}` and the
//! fields of the chosen initial kind are required. Every key is checked, so
//! a typo is an error rather than a silently ignored setting.

use std::path::Path;

use ndarray::Array2;
use serde_json::{json, Map, Value};
use zkb_core::diagnostics::NormKind;
use zkb_core::solver::DissipationMode;
use zkb_core::{
    constants_for_width, Geometry64, InitialData64, Regime, Scheme, SolverConfig64,
    TheoremConstants64,
};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u64 = 1;

/// Name of the built-in reference decay configuration.
pub const PAPER_REF: &str = "paper-ref";

/// Weight rate `b`: fixed, or `b*(B)` from the decay constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Auto,
    Rate(f64),
}

/// Absorbing-layer peak rate. `Auto` enables the default layer for
/// localized initial data and disables it for periodic data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbsorberSpec {
    Auto,
    Peak(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySpec {
    pub width: f64,
    pub half_length: f64,
    pub nx: usize,
    pub ny: usize,
    pub weight: WeightSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub dealias: bool,
    pub convection: f64,
    pub output_every: usize,
    pub dissipation: DissipationMode,
    pub nonlinear: bool,
    pub absorber: AbsorberSpec,
    pub snapshots: bool,
}

/// How a Gaussian's size is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitude {
    /// Peak value `A`.
    Peak(f64),
    /// Target `‖u₀‖`.
    Norm(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Gaussian {
        amplitude: Amplitude,
        center: f64,
        sigma: f64,
        mode: usize,
    },
    SingleMode {
        amplitude: f64,
        wavenumber: f64,
        mode: usize,
    },
    /// Physical samples, `Ny` rows of `Nx` values.
    Custom { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitWindow {
    LastHalf,
    Range(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub window: FitWindow,
    pub regime: Regime,
    pub norm: NormKind,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            window: FitWindow::LastHalf,
            regime: Regime::Weak,
            norm: NormKind::WeightedL2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub geometry: GeometrySpec,
    pub solver: SolverSpec,
    pub initial: InitialSpec,
    pub experiment: ExperimentSpec,
}

/// A configuration with every `"auto"` replaced by its value.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub geometry: Geometry64,
    pub solver: SolverConfig64,
    pub initial: InitialData64,
    pub constants: TheoremConstants64,
}

/// Parses `pi`-expressions such as `3.5`, `pi`, `pi/2`, `2*pi`, `2pi/3`.
pub fn parse_real(text: &str) -> Option<f64> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase()
        .replace('π', "pi");
    if s.is_empty() {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().ok()?)),
        None => (s.as_str(), None),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().ok()?,
        };
        c * std::f64::consts::PI
    } else {
        num.parse::<f64>().ok()?
    };
    Some(match den {
        Some(d) => value / d,
        None => value,
    })
}

/// Parses a comma-separated list of [`parse_real`] expressions.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(HarnessError::Usage(format!("empty list: {text:?}")));
    }
    items
        .iter()
        .map(|s| parse_real(s).ok_or_else(|| HarnessError::Usage(format!("not a number: {s:?}"))))
        .collect()
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn kind_of(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

/// A JSON object together with its path, for error messages.
struct Block<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Block<'a> {
    fn new(value: &'a Value, path: &str, allowed: &[&str]) -> Result<Self> {
        let map = value.as_object().ok_or_else(|| {
            config_err(format!(
                "type mismatch at {}: expected object, got {}",
                if path.is_empty() { "<root>" } else { path },
                kind_of(value)
            ))
        })?;
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                let at = if path.is_empty() {
                    String::new()
                } else {
                    format!(" (in {path})")
                };
                return Err(config_err(format!("unknown key: {key}{at}")));
            }
        }
        Ok(Self {
            path: path.to_string(),
            map,
        })
    }

    fn key_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn require(&self, key: &str) -> Result<&'a Value> {
        self.get(key)
            .ok_or_else(|| config_err(format!("missing key: {}", self.key_path(key))))
    }

    fn mismatch(&self, key: &str, expected: &str, got: &Value) -> HarnessError {
        config_err(format!(
            "type mismatch at {}: expected {expected}, got {}",
            self.key_path(key),
            kind_of(got)
        ))
    }

    fn real(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        self.as_real(key, v)
    }

    fn opt_real(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| self.as_real(key, v)).transpose()
    }

    fn as_real(&self, key: &str, v: &Value) -> Result<f64> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| self.mismatch(key, "number", v)),
            Value::String(s) => parse_real(s).ok_or_else(|| {
                config_err(format!(
                    "invalid number at {}: {s:?}",
                    self.key_path(key)
                ))
            }),
            _ => Err(self.mismatch(key, "number", v)),
        }
    }

    fn count(&self, key: &str) -> Result<usize> {
        let v = self.require(key)?;
        self.as_count(key, v)
    }

    fn opt_count(&self, key: &str) -> Result<Option<usize>> {
        self.get(key).map(|v| self.as_count(key, v)).transpose()
    }

    fn as_count(&self, key: &str, v: &Value) -> Result<usize> {
        v.as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| self.mismatch(key, "nonnegative integer", v))
    }

    fn opt_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| v.as_bool().ok_or_else(|| self.mismatch(key, "boolean", v)))
            .transpose()
    }

    fn opt_str(&self, key: &str) -> Result<Option<&'a str>> {
        self.get(key)
            .map(|v| v.as_str().ok_or_else(|| self.mismatch(key, "string", v)))
            .transpose()
    }

    fn str(&self, key: &str) -> Result<&'a str> {
        let v = self.require(key)?;
        v.as_str().ok_or_else(|| self.mismatch(key, "string", v))
    }

    fn invalid(&self, key: &str, msg: impl std::fmt::Display) -> HarnessError {
        config_err(format!("invalid value at {}: {msg}", self.key_path(key)))
    }
}

fn parse_geometry(v: &Value) -> Result<GeometrySpec> {
    let g = Block::new(v, "geometry", &["B", "Lx", "Nx", "Ny", "b"])?;
    let weight = match g.get("b") {
        None => WeightSpec::Auto,
        Some(Value::String(s)) if s == "auto" => WeightSpec::Auto,
        Some(_) => WeightSpec::Rate(g.real("b")?),
    };
    Ok(GeometrySpec {
        width: g.real("B")?,
        half_length: g.real("Lx")?,
        nx: g.count("Nx")?,
        ny: g.count("Ny")?,
        weight,
    })
}

fn parse_solver(v: &Value) -> Result<SolverSpec> {
    let s = Block::new(
        v,
        "solver",
        &[
            "dt",
            "t_end",
            "scheme",
            "dealias",
            "convection",
            "output_every",
            "dissipation",
            "nonlinear",
            "absorber",
            "snapshots",
        ],
    )?;
    let scheme = match s.opt_str("scheme")? {
        Some(name) => name.parse().map_err(|e| s.invalid("scheme", e))?,
        None => Scheme::default(),
    };
    let dissipation = match s.opt_str("dissipation")? {
        Some(name) => name.parse().map_err(|e| s.invalid("dissipation", e))?,
        None => DissipationMode::default(),
    };
    let absorber = match s.get("absorber") {
        None => AbsorberSpec::Auto,
        Some(Value::String(a)) if a == "auto" => AbsorberSpec::Auto,
        Some(Value::String(a)) if a == "off" => AbsorberSpec::Peak(0.0),
        Some(Value::Bool(false)) => AbsorberSpec::Peak(0.0),
        Some(Value::Bool(true)) => AbsorberSpec::Auto,
        Some(_) => AbsorberSpec::Peak(s.real("absorber")?),
    };
    Ok(SolverSpec {
        dt: s.real("dt")?,
        t_end: s.real("t_end")?,
        scheme,
        dealias: s.opt_bool("dealias")?.unwrap_or(true),
        convection: s.opt_real("convection")?.unwrap_or(0.0),
        output_every: s.opt_count("output_every")?.unwrap_or(1),
        dissipation,
        nonlinear: s.opt_bool("nonlinear")?.unwrap_or(true),
        absorber,
        snapshots: s.opt_bool("snapshots")?.unwrap_or(false),
    })
}

fn parse_initial(v: &Value) -> Result<InitialSpec> {
    let probe = Block::new(v, "initial", &["kind", "amplitude", "norm", "x0", "s", "mode", "k", "values"])?;
    let kind = probe.str("kind")?;
    match kind {
        "gaussian_mode" => {
            let b = Block::new(v, "initial", &["kind", "amplitude", "norm", "x0", "s", "mode"])?;
            let amplitude = match (b.opt_real("amplitude")?, b.opt_real("norm")?) {
                (Some(a), None) => Amplitude::Peak(a),
                (None, Some(n)) => Amplitude::Norm(n),
                (None, None) => return Err(config_err("missing key: initial.amplitude (or initial.norm)")),
                (Some(_), Some(_)) => {
                    return Err(config_err("initial.amplitude and initial.norm are mutually exclusive"))
                }
            };
            Ok(InitialSpec::Gaussian {
                amplitude,
                center: b.opt_real("x0")?.unwrap_or(0.0),
                sigma: b.real("s")?,
                mode: b.opt_count("mode")?.unwrap_or(1),
            })
        }
        "single_mode" => {
            let b = Block::new(v, "initial", &["kind", "amplitude", "k", "mode"])?;
            Ok(InitialSpec::SingleMode {
                amplitude: b.real("amplitude")?,
                wavenumber: b.real("k")?,
                mode: b.opt_count("mode")?.unwrap_or(1),
            })
        }
        "custom_samples" => {
            let b = Block::new(v, "initial", &["kind", "values"])?;
            let rows = b.require("values")?;
            let rows = rows
                .as_array()
                .ok_or_else(|| b.mismatch("values", "array of arrays", rows))?;
            let mut values = Vec::with_capacity(rows.len());
            for (r, row) in rows.iter().enumerate() {
                let path = format!("values[{r}]");
                let row = row.as_array().ok_or_else(|| b.mismatch(&path, "array", row))?;
                let parsed = row
                    .iter()
                    .enumerate()
                    .map(|(c, x)| {
                        x.as_f64()
                            .ok_or_else(|| b.mismatch(&format!("values[{r}][{c}]"), "number", x))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                values.push(parsed);
            }
            Ok(InitialSpec::Custom { values })
        }
        other => Err(probe.invalid(
            "kind",
            format!("unknown initial kind {other:?} (gaussian_mode, single_mode, custom_samples)"),
        )),
    }
}

fn parse_experiment(v: &Value) -> Result<ExperimentSpec> {
    let e = Block::new(v, "experiment", &["window", "regime", "norm"])?;
    let mut spec = ExperimentSpec::default();
    match e.get("window") {
        None => {}
        Some(Value::String(s)) if s == "last_half" => {}
        Some(Value::Array(pair)) if pair.len() == 2 => {
            let t0 = pair[0].as_f64().ok_or_else(|| e.mismatch("window[0]", "number", &pair[0]))?;
            let t1 = pair[1].as_f64().ok_or_else(|| e.mismatch("window[1]", "number", &pair[1]))?;
            spec.window = FitWindow::Range(t0, t1);
        }
        Some(other) => return Err(e.mismatch("window", "\"last_half\" or [t0, t1]", other)),
    }
    if let Some(r) = e.opt_str("regime")? {
        spec.regime = r.parse().map_err(|err| e.invalid("regime", err))?;
    }
    if let Some(n) = e.opt_str("norm")? {
        spec.norm = n.parse().map_err(|err| e.invalid("norm", err))?;
    }
    Ok(spec)
}

impl RunConfig {
    /// Parses and validates a configuration document.
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))?;
        Self::from_value(&doc)
    }

    pub fn from_value(doc: &Value) -> Result<Self> {
        let root = Block::new(doc, "", &["schema", "seed", "geometry", "solver", "initial", "experiment"])?;
        let schema = root.require("schema")?;
        match schema.as_u64() {
            Some(SCHEMA_VERSION) => {}
            Some(other) => {
                return Err(config_err(format!(
                    "unsupported schema version {other}, expected {SCHEMA_VERSION}"
                )))
            }
            None => return Err(root.mismatch("schema", "integer", schema)),
        }
        let seed = match root.get("seed") {
            None => 0,
            Some(v) => root.as_count("seed", v)? as u64,
        };
        let config = RunConfig {
            seed,
            geometry: parse_geometry(root.require("geometry")?)?,
            solver: parse_solver(root.require("solver")?)?,
            initial: parse_initial(root.require("initial")?)?,
            experiment: match root.get("experiment") {
                Some(v) => parse_experiment(v)?,
                None => ExperimentSpec::default(),
            },
        };
        config.resolve()?;
        Ok(config)
    }

    /// `name` is either the built-in preset name or a path to a JSON file.
    pub fn load(name: &str) -> Result<Self> {
        if name == PAPER_REF {
            return Ok(Self::paper_ref());
        }
        let path = Path::new(name);
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    /// Reference decay run: a `j = 1` Gaussian of width 2 at 90% of the
    /// weak-solution threshold on the strip of width `π`.
    pub fn paper_ref() -> Self {
        let width = std::f64::consts::PI;
        let weak = constants_for_width(width)
            .expect("positive width")
            .weak_threshold;
        RunConfig {
            seed: 0,
            geometry: GeometrySpec {
                width,
                half_length: 100.0,
                nx: 1024,
                ny: 32,
                weight: WeightSpec::Auto,
            },
            solver: SolverSpec {
                dt: 1e-3,
                t_end: 40.0,
                scheme: Scheme::ExponentialRk4,
                dealias: true,
                convection: 0.0,
                output_every: 100,
                dissipation: DissipationMode::PerStep,
                nonlinear: true,
                absorber: AbsorberSpec::Auto,
                snapshots: false,
            },
            initial: InitialSpec::Gaussian {
                amplitude: Amplitude::Norm(0.9 * weak),
                center: 0.0,
                sigma: 2.0,
                mode: 1,
            },
            experiment: ExperimentSpec::default(),
        }
    }

    pub fn initial_kind(&self) -> &'static str {
        match self.initial {
            InitialSpec::Gaussian { .. } => "gaussian_mode",
            InitialSpec::SingleMode { .. } => "single_mode",
            InitialSpec::Custom { .. } => "custom_samples",
        }
    }

    pub fn initial_is_localized(&self) -> bool {
        !matches!(self.initial, InitialSpec::SingleMode { .. })
    }

    /// Replaces every `"auto"` and validates the result.
    pub fn resolve(&self) -> Result<Resolved> {
        let g = &self.geometry;
        let constants = constants_for_width(g.width)?;
        let b = match g.weight {
            WeightSpec::Auto => constants.b_star,
            WeightSpec::Rate(b) => b,
        };
        let geometry = Geometry64::new(g.width, g.half_length, g.nx, g.ny, b)?;
        let s = &self.solver;
        let mut solver = SolverConfig64::new(s.dt, s.t_end);
        solver.scheme = s.scheme;
        solver.dealias = s.dealias;
        solver.convection = s.convection;
        solver.output_every = s.output_every;
        solver.dissipation = s.dissipation;
        solver.nonlinear = s.nonlinear;
        solver.store_snapshots = s.snapshots;
        solver.absorber = match s.absorber {
            AbsorberSpec::Peak(p) => p,
            AbsorberSpec::Auto if self.initial_is_localized() && s.dt > 0.0 => {
                SolverConfig64::stable_absorber(s.dt)
            }
            AbsorberSpec::Auto => 0.0,
        };
        solver.validate()?;
        let initial = match &self.initial {
            InitialSpec::Gaussian {
                amplitude,
                center,
                sigma,
                mode,
            } => match *amplitude {
                Amplitude::Peak(a) => InitialData64::GaussianMode {
                    amplitude: a,
                    center: *center,
                    width: *sigma,
                    mode: *mode,
                },
                Amplitude::Norm(n) => {
                    if !(n >= 0.0) {
                        return Err(config_err(format!("initial.norm must be nonnegative, got {n}")));
                    }
                    InitialData64::gaussian_with_norm(n, *center, *sigma, *mode)
                }
            },
            InitialSpec::SingleMode {
                amplitude,
                wavenumber,
                mode,
            } => InitialData64::SingleMode {
                amplitude: *amplitude,
                wavenumber: *wavenumber,
                mode: *mode,
            },
            InitialSpec::Custom { values } => {
                if values.len() != g.ny || values.iter().any(|r| r.len() != g.nx) {
                    return Err(config_err(format!(
                        "initial.values must have {} rows of {} samples",
                        g.ny, g.nx
                    )));
                }
                let flat: Vec<f64> = values.iter().flatten().copied().collect();
                InitialData64::CustomSamples {
                    values: Array2::from_shape_vec((g.ny, g.nx), flat)
                        .expect("shape checked above"),
                }
            }
        };
        Ok(Resolved {
            geometry,
            solver,
            initial,
            constants,
        })
    }

    /// Canonical JSON form; parsing it gives back an equal configuration.
    pub fn to_value(&self) -> Value {
        let g = &self.geometry;
        let s = &self.solver;
        let weight = match g.weight {
            WeightSpec::Auto => json!("auto"),
            WeightSpec::Rate(b) => json!(b),
        };
        let absorber = match s.absorber {
            AbsorberSpec::Auto => json!("auto"),
            AbsorberSpec::Peak(p) => json!(p),
        };
        let initial = match &self.initial {
            InitialSpec::Gaussian {
                amplitude,
                center,
                sigma,
                mode,
            } => {
                let mut m = json!({ "kind": "gaussian_mode", "x0": center, "s": sigma, "mode": mode });
                match amplitude {
                    Amplitude::Peak(a) => m["amplitude"] = json!(a),
                    Amplitude::Norm(n) => m["norm"] = json!(n),
                }
                m
            }
            InitialSpec::SingleMode {
                amplitude,
                wavenumber,
                mode,
            } => json!({ "kind": "single_mode", "amplitude": amplitude, "k": wavenumber, "mode": mode }),
            InitialSpec::Custom { values } => json!({ "kind": "custom_samples", "values": values }),
        };
        let window = match self.experiment.window {
            FitWindow::LastHalf => json!("last_half"),
            FitWindow::Range(t0, t1) => json!([t0, t1]),
        };
        json!({
            "schema": SCHEMA_VERSION,
            "seed": self.seed,
            "geometry": { "B": g.width, "Lx": g.half_length, "Nx": g.nx, "Ny": g.ny, "b": weight },
            "solver": {
                "dt": s.dt,
                "t_end": s.t_end,
                "scheme": s.scheme.name(),
                "dealias": s.dealias,
                "convection": s.convection,
                "output_every": s.output_every,
                "dissipation": s.dissipation.name(),
                "nonlinear": s.nonlinear,
                "absorber": absorber,
                "snapshots": s.snapshots,
            },
            "initial": initial,
            "experiment": {
                "window": window,
                "regime": self.experiment.regime.name(),
                "norm": self.experiment.norm.name(),
            },
        })
    }
}
