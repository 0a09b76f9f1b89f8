//! Scenario configs: parsing, key validation and documented defaults.
//!
//! A scenario is a JSON object. Keys carry unit suffixes and are checked
//! strictly; anything unknown, or known with the wrong suffix, is rejected.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `kind` | `fig1`, `fig2`, `fig3`, `fig4`, `sweep`, `discrete`, `oracle-suite` | required |
//! | `model` | inline model object | Na-23 in Rb-87 reference set |
//! | `model_file` | path to a model object, relative to the config | none |
//! | `chi` | relative displacement χ; rebalances `a0`/`a1` at fixed `a1 − a0` | model's own χ (1 for the reference set) |
//! | `nu` | number of repetitions ν | 1 |
//! | `aB_m` | scattering lengths to scan | `{0.5, 1, 2}·a_Rb`; fig4: 10 points over `[0.3, 2.5]·a_Rb` |
//! | `time_grid` | `{t_min_s, t_max_s, points, spacing}` | fig1: linear 0–5 ms, 500; fig2: log 0.1–5 ms, 100; fig3: log 0.1–50 ms, 60 |
//! | `t_s` | sample times for `sweep` | `[1e-3]` |
//! | `sweep` | `{param: aB or chi, from, to, points, spacing}`, values in SI | none |
//! | `discrete` | `{modes, beta_s, omega0_rad_s, frame, fock_check, n_max}` | T = 0, ω₀ = 0, lab frame |
//! | `seed` | oracle-suite RNG seed | 0 |
//! | `rel_tol` | quadrature relative tolerance | 1e-9 |
//! | `max_evaluations` | per-integral evaluation cap | 1e6; fig3/fig4: 2e7 |
//! | `output_dir` | output directory | `out` |

use std::path::{Path, PathBuf};

use qprobe::config::{as_object, check_keys, get_f64, get_str, KeySpec};
use qprobe::constants::A_RB;
use qprobe::estimation::PlateauOptions;
use qprobe::oracle::fock::FockConfig;
use qprobe::quadrature::{DEFAULT_MAX_EVALUATIONS, DEFAULT_REL_TOL};
use qprobe::{BecParameters, BecReservoirModel, DiscreteMode, DiscreteReservoir, Frame, QuadratureOptions};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Sweep,
    Discrete,
    OracleSuite,
}

impl Kind {
    pub fn parse(s: &str) -> CliResult<Self> {
        Ok(match s {
            "fig1" => Kind::Fig1,
            "fig2" => Kind::Fig2,
            "fig3" => Kind::Fig3,
            "fig4" => Kind::Fig4,
            "sweep" => Kind::Sweep,
            "discrete" => Kind::Discrete,
            "oracle-suite" => Kind::OracleSuite,
            other => {
                return Err(CliError::Config(format!(
                    "unknown kind `{other}` (expected fig1, fig2, fig3, fig4, sweep, discrete or oracle-suite)"
                )))
            }
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Fig1 => "fig1",
            Kind::Fig2 => "fig2",
            Kind::Fig3 => "fig3",
            Kind::Fig4 => "fig4",
            Kind::Sweep => "sweep",
            Kind::Discrete => "discrete",
            Kind::OracleSuite => "oracle-suite",
        }
    }

    fn needs_long_times(&self) -> bool {
        matches!(self, Kind::Fig3 | Kind::Fig4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl Spacing {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(CliError::Config(format!("spacing `{other}` must be `linear` or `log`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        }
    }
}

/// Evenly spaced samples in `t` or `ln t`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn validate(&self, what: &str) -> CliResult<()> {
        if !(self.from.is_finite() && self.to.is_finite()) || self.to <= self.from {
            return Err(CliError::Config(format!("{what}: need finite from < to, got {} .. {}", self.from, self.to)));
        }
        if self.points < 2 {
            return Err(CliError::Config(format!("{what}: need at least 2 points")));
        }
        if self.spacing == Spacing::Log && self.from <= 0.0 {
            return Err(CliError::Config(format!("{what}: log spacing needs a positive start")));
        }
        Ok(())
    }

    pub fn samples(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                let f = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.from + (self.to - self.from) * f,
                    Spacing::Log => self.from * (self.to / self.from).powf(f),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    ScatteringLength,
    Chi,
}

impl SweepParam {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "aB" => Ok(SweepParam::ScatteringLength),
            "chi" => Ok(SweepParam::Chi),
            other => Err(CliError::Config(format!("sweep param `{other}` must be `aB` or `chi`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::ScatteringLength => "aB",
            SweepParam::Chi => "chi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Grid,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpec {
    pub reservoir: DiscreteReservoir,
    pub omega0: f64,
    pub frame: Frame,
    pub fock_check: bool,
    pub fock: FockConfig,
}

/// A fully defaulted, validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: Kind,
    pub model: BecReservoirModel,
    pub nu: u64,
    pub ab_values: Vec<f64>,
    pub time_grid: Option<Grid>,
    pub sweep: Option<SweepSpec>,
    pub discrete: Option<DiscreteSpec>,
    pub seed: u64,
    pub quadrature: QuadratureOptions,
    pub plateau: PlateauOptions,
    pub output_dir: PathBuf,
}

const TOP_KEYS: [KeySpec; 14] = [
    KeySpec::new("kind", ""),
    KeySpec::new("model", ""),
    KeySpec::new("model_file", ""),
    KeySpec::new("chi", ""),
    KeySpec::new("nu", ""),
    KeySpec::new("aB", "m"),
    KeySpec::new("time_grid", ""),
    KeySpec::new("t", "s"),
    KeySpec::new("sweep", ""),
    KeySpec::new("discrete", ""),
    KeySpec::new("seed", ""),
    KeySpec::new("rel_tol", ""),
    KeySpec::new("max_evaluations", ""),
    KeySpec::new("output_dir", ""),
];

const GRID_KEYS: [KeySpec; 4] = [
    KeySpec::new("t_min", "s"),
    KeySpec::new("t_max", "s"),
    KeySpec::new("points", ""),
    KeySpec::new("spacing", ""),
];

const SWEEP_KEYS: [KeySpec; 5] = [
    KeySpec::new("param", ""),
    KeySpec::new("from", ""),
    KeySpec::new("to", ""),
    KeySpec::new("points", ""),
    KeySpec::new("spacing", ""),
];

const DISCRETE_KEYS: [KeySpec; 6] = [
    KeySpec::new("modes", ""),
    KeySpec::new("beta", "s"),
    KeySpec::new("omega0", "rad_s"),
    KeySpec::new("frame", ""),
    KeySpec::new("fock_check", ""),
    KeySpec::new("n_max", ""),
];

const MODE_KEYS: [KeySpec; 5] = [
    KeySpec::new("omega", "rad_s"),
    KeySpec::new("g", "rad_s"),
    KeySpec::new("xi", "rad_s"),
    KeySpec::new("g_im", "rad_s"),
    KeySpec::new("xi_im", "rad_s"),
];

fn config_err(e: qprobe::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn number(obj: &Map<String, Value>, key: &str) -> CliResult<Option<f64>> {
    get_f64(obj, key).map_err(config_err)
}

fn string<'a>(obj: &'a Map<String, Value>, key: &str) -> CliResult<Option<&'a str>> {
    get_str(obj, key).map_err(config_err)
}

fn object<'a>(value: &'a Value, context: &str) -> CliResult<&'a Map<String, Value>> {
    as_object(value, context).map_err(config_err)
}

fn checked(obj: &Map<String, Value>, keys: &[KeySpec], context: &str) -> CliResult<()> {
    check_keys(obj, keys, context).map_err(config_err)
}

fn count(obj: &Map<String, Value>, key: &str) -> CliResult<Option<u64>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("key `{key}` must be a non-negative integer"))),
    }
}

fn number_list(obj: &Map<String, Value>, key: &str) -> CliResult<Option<Vec<f64>>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => Ok(Some(vec![n.as_f64().unwrap_or(f64::NAN)])),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| CliError::Config(format!("key `{key}` must hold numbers")))
            })
            .collect::<CliResult<Vec<f64>>>()
            .map(Some),
        Some(_) => Err(CliError::Config(format!("key `{key}` must be a number or a list of numbers"))),
    }
}

fn default_ab_values(kind: Kind) -> Vec<f64> {
    match kind {
        Kind::Fig4 => (0..10).map(|i| (0.3 + 2.2 * i as f64 / 9.0) * A_RB).collect(),
        _ => vec![0.5 * A_RB, A_RB, 2.0 * A_RB],
    }
}

fn default_time_grid(kind: Kind) -> Option<Grid> {
    let grid = |from, to, points, spacing| Some(Grid { from, to, points, spacing });
    match kind {
        Kind::Fig1 => grid(0.0, 5e-3, 500, Spacing::Linear),
        Kind::Fig2 => grid(1e-4, 5e-3, 100, Spacing::Log),
        Kind::Fig3 => grid(1e-4, 5e-2, 60, Spacing::Log),
        _ => None,
    }
}

fn parse_grid(obj: &Map<String, Value>, default: Option<Grid>) -> CliResult<Grid> {
    checked(obj, &GRID_KEYS, "time_grid")?;
    let base = default.unwrap_or(Grid {
        from: 0.0,
        to: 1.0,
        points: 2,
        spacing: Spacing::Linear,
    });
    let spacing = match string(obj, "spacing")? {
        Some(s) => Spacing::parse(s)?,
        None => base.spacing,
    };
    let grid = Grid {
        from: number(obj, "t_min_s")?.unwrap_or(base.from),
        to: number(obj, "t_max_s")?.unwrap_or(base.to),
        points: count(obj, "points")?.map(|p| p as usize).unwrap_or(base.points),
        spacing,
    };
    grid.validate("time_grid")?;
    if grid.from < 0.0 {
        return Err(CliError::Config("time_grid: t_min_s must be >= 0".into()));
    }
    Ok(grid)
}

fn parse_sweep(obj: &Map<String, Value>, times: Vec<f64>) -> CliResult<SweepSpec> {
    checked(obj, &SWEEP_KEYS, "sweep")?;
    let param = SweepParam::parse(string(obj, "param")?.ok_or_else(|| CliError::Config("sweep: missing `param`".into()))?)?;
    let need = |key: &str| -> CliResult<f64> {
        number(obj, key)?.ok_or_else(|| CliError::Config(format!("sweep: missing `{key}`")))
    };
    let grid = Grid {
        from: need("from")?,
        to: need("to")?,
        points: count(obj, "points")?.ok_or_else(|| CliError::Config("sweep: missing `points`".into()))? as usize,
        spacing: match string(obj, "spacing")? {
            Some(s) => Spacing::parse(s)?,
            None => Spacing::Linear,
        },
    };
    grid.validate("sweep")?;
    Ok(SweepSpec { param, grid, times })
}

fn parse_discrete(obj: &Map<String, Value>) -> CliResult<DiscreteSpec> {
    checked(obj, &DISCRETE_KEYS, "discrete")?;
    let modes_value = obj
        .get("modes")
        .and_then(|v| v.as_array())
        .ok_or_else(|| CliError::Config("discrete: `modes` must be a list of mode objects".into()))?;
    let mut modes = Vec::with_capacity(modes_value.len());
    for (i, m) in modes_value.iter().enumerate() {
        let context = format!("discrete.modes[{i}]");
        let mo = object(m, &context)?;
        checked(mo, &MODE_KEYS, &context)?;
        let omega = number(mo, "omega_rad_s")?.ok_or_else(|| CliError::Config(format!("{context}: missing `omega_rad_s`")))?;
        let g = qprobe::Complex64::new(
            number(mo, "g_rad_s")?.unwrap_or(0.0),
            number(mo, "g_im_rad_s")?.unwrap_or(0.0),
        );
        let xi = qprobe::Complex64::new(
            number(mo, "xi_rad_s")?.unwrap_or(0.0),
            number(mo, "xi_im_rad_s")?.unwrap_or(0.0),
        );
        modes.push(DiscreteMode::new(omega, g, xi).map_err(config_err)?);
    }
    if modes.is_empty() {
        return Err(CliError::Config("discrete: need at least one mode".into()));
    }
    let reservoir = match number(obj, "beta_s")? {
        Some(beta) => DiscreteReservoir::thermal(modes, beta),
        None => DiscreteReservoir::zero_temperature(modes),
    }
    .map_err(config_err)?;
    let frame = match string(obj, "frame")? {
        None | Some("lab") => Frame::Lab,
        Some("rotating") => Frame::Rotating,
        Some(other) => return Err(CliError::Config(format!("discrete: frame `{other}` must be `lab` or `rotating`"))),
    };
    let fock_check = match obj.get("fock_check") {
        None | Some(Value::Null) => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(CliError::Config("discrete: `fock_check` must be true or false".into())),
    };
    let fock = FockConfig {
        n_max: count(obj, "n_max")?.map(|n| n as usize).unwrap_or(FockConfig::default().n_max),
        ..FockConfig::default()
    };
    if fock_check {
        fock.validate(reservoir.modes().len()).map_err(config_err)?;
    }
    Ok(DiscreteSpec {
        reservoir,
        omega0: number(obj, "omega0_rad_s")?.unwrap_or(0.0),
        frame,
        fock_check,
        fock,
    })
}

/// Two full periods of the slowest mode, 400 points.
fn discrete_default_grid(spec: &DiscreteSpec) -> Grid {
    let slowest = spec
        .reservoir
        .modes()
        .iter()
        .map(|m| m.omega)
        .fold(f64::INFINITY, f64::min);
    Grid {
        from: 0.0,
        to: 4.0 * std::f64::consts::PI / slowest,
        points: 400,
        spacing: Spacing::Linear,
    }
}

impl Scenario {
    /// Read and validate a scenario file.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: invalid JSON: {e}", path.display())))?;
        Self::from_value(&value, path.parent())
    }

    /// Validate a parsed scenario; `base_dir` resolves `model_file`.
    pub fn from_value(value: &Value, base_dir: Option<&Path>) -> CliResult<Self> {
        let obj = object(value, "scenario")?;
        checked(obj, &TOP_KEYS, "scenario")?;
        let kind = Kind::parse(string(obj, "kind")?.ok_or_else(|| CliError::Config("missing key `kind`".into()))?)?;

        let params = match (obj.get("model"), string(obj, "model_file")?) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either `model` or `model_file`, not both".into()))
            }
            (Some(m), None) => BecParameters::from_json(m).map_err(config_err)?,
            (None, Some(file)) => {
                let path = base_dir.map(|d| d.join(file)).unwrap_or_else(|| PathBuf::from(file));
                load_model(&path)?
            }
            (None, None) => BecParameters::na_in_rb(),
        };
        let mut model = BecReservoirModel::new(params).map_err(config_err)?;
        if let Some(chi) = number(obj, "chi")? {
            model = model.with_chi(chi).map_err(config_err)?;
        }

        let nu = count(obj, "nu")?.unwrap_or(1);
        if nu == 0 {
            return Err(CliError::Config("`nu` must be >= 1".into()));
        }

        let ab_values = number_list(obj, "aB_m")?.unwrap_or_else(|| default_ab_values(kind));
        if ab_values.is_empty() {
            return Err(CliError::Config("`aB_m` must not be empty".into()));
        }
        for &ab in &ab_values {
            model.with_scattering_length(ab).map_err(config_err)?;
        }

        let discrete = match (kind, obj.get("discrete")) {
            (Kind::Discrete, Some(d)) => Some(parse_discrete(object(d, "discrete")?)?),
            (Kind::Discrete, None) => return Err(CliError::Config("kind `discrete` needs a `discrete` object".into())),
            (_, Some(_)) => return Err(CliError::Config("`discrete` is only valid for kind `discrete`".into())),
            _ => None,
        };

        let default_grid = match &discrete {
            Some(d) => Some(discrete_default_grid(d)),
            None => default_time_grid(kind),
        };
        let time_grid = match obj.get("time_grid") {
            Some(g) => Some(parse_grid(object(g, "time_grid")?, default_grid)?),
            None => default_grid,
        };

        let sweep_times = number_list(obj, "t_s")?.unwrap_or_else(|| vec![1e-3]);
        if sweep_times.is_empty() || sweep_times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(CliError::Config("`t_s` must hold positive times".into()));
        }
        let sweep = match (kind, obj.get("sweep")) {
            (Kind::Sweep, Some(s)) => Some(parse_sweep(object(s, "sweep")?, sweep_times)?),
            (Kind::Sweep, None) => return Err(CliError::Config("kind `sweep` needs a `sweep` object".into())),
            (_, Some(_)) => return Err(CliError::Config("`sweep` is only valid for kind `sweep`".into())),
            _ => None,
        };
        if let Some(s) = &sweep {
            check_sweep_values(&model, s)?;
        }

        let plateau = PlateauOptions::default();
        let rel_tol = number(obj, "rel_tol")?.unwrap_or(DEFAULT_REL_TOL);
        let default_cap = if kind.needs_long_times() {
            plateau.max_evaluations
        } else {
            DEFAULT_MAX_EVALUATIONS
        };
        let max_evaluations = count(obj, "max_evaluations")?.map(|n| n as usize).unwrap_or(default_cap);
        let quadrature = QuadratureOptions {
            rel_tol,
            abs_tol: None,
            max_evaluations,
        };
        quadrature.validate().map_err(config_err)?;

        Ok(Self {
            kind,
            model,
            nu,
            ab_values,
            time_grid,
            sweep,
            discrete,
            seed: count(obj, "seed")?.unwrap_or(0),
            quadrature,
            plateau,
            output_dir: PathBuf::from(string(obj, "output_dir")?.unwrap_or("out")),
        })
    }

    /// Every effective setting, in the config's own key names.
    pub fn effective_config(&self) -> Value {
        let mut out = json!({
            "kind": self.kind.as_str(),
            "model": self.model.params().to_json(),
            "chi": self.model.chi(),
            "nu": self.nu,
            "aB_m": self.ab_values,
            "rel_tol": self.quadrature.rel_tol,
            "max_evaluations": self.quadrature.max_evaluations,
            "output_dir": self.output_dir.display().to_string(),
        });
        let map = out.as_object_mut().expect("object literal");
        if let Some(g) = &self.time_grid {
            map.insert("time_grid".into(), grid_json(g));
        }
        if let Some(s) = &self.sweep {
            map.insert(
                "sweep".into(),
                json!({
                    "param": s.param.as_str(),
                    "from": s.grid.from,
                    "to": s.grid.to,
                    "points": s.grid.points,
                    "spacing": s.grid.spacing.as_str(),
                }),
            );
            map.insert("t_s".into(), json!(s.times));
        }
        if let Some(d) = &self.discrete {
            let modes: Vec<Value> = d
                .reservoir
                .modes()
                .iter()
                .map(|m| {
                    json!({
                        "omega_rad_s": m.omega,
                        "g_rad_s": m.g.re,
                        "g_im_rad_s": m.g.im,
                        "xi_rad_s": m.xi.re,
                        "xi_im_rad_s": m.xi.im,
                    })
                })
                .collect();
            let beta = d.reservoir.beta();
            map.insert(
                "discrete".into(),
                json!({
                    "modes": modes,
                    "beta_s": if beta.is_finite() { json!(beta) } else { Value::Null },
                    "omega0_rad_s": d.omega0,
                    "frame": d.frame.to_string(),
                    "fock_check": d.fock_check,
                    "n_max": d.fock.n_max,
                }),
            );
        }
        if self.kind == Kind::OracleSuite {
            map.insert("seed".into(), json!(self.seed));
        }
        out
    }

    /// Scenario for `probe sweep`.
    pub fn for_sweep(model: BecReservoirModel, spec: SweepSpec, nu: u64, output_dir: PathBuf) -> CliResult<Self> {
        if nu == 0 {
            return Err(CliError::Config("`nu` must be >= 1".into()));
        }
        spec.grid.validate("sweep")?;
        check_sweep_values(&model, &spec)?;
        Ok(Self {
            kind: Kind::Sweep,
            ab_values: vec![model.ab()],
            model,
            nu,
            time_grid: None,
            sweep: Some(spec),
            discrete: None,
            seed: 0,
            quadrature: QuadratureOptions::default(),
            plateau: PlateauOptions::default(),
            output_dir,
        })
    }

    /// Scenario for `probe oracle-suite`.
    pub fn for_oracle_suite(seed: u64, output_dir: PathBuf) -> Self {
        Self {
            kind: Kind::OracleSuite,
            model: BecReservoirModel::reference(),
            nu: 1,
            ab_values: vec![A_RB],
            time_grid: None,
            sweep: None,
            discrete: None,
            seed,
            quadrature: QuadratureOptions::default(),
            plateau: PlateauOptions::default(),
            output_dir,
        }
    }
}

fn grid_json(g: &Grid) -> Value {
    json!({
        "t_min_s": g.from,
        "t_max_s": g.to,
        "points": g.points,
        "spacing": g.spacing.as_str(),
    })
}

fn check_sweep_values(model: &BecReservoirModel, spec: &SweepSpec) -> CliResult<()> {
    for v in spec.grid.samples() {
        match spec.param {
            SweepParam::ScatteringLength => model.with_scattering_length(v).map(|_| ()),
            SweepParam::Chi => model.with_chi(v).map(|_| ()),
        }
        .map_err(config_err)?;
    }
    Ok(())
}

/// Read a bare model object from a JSON file.
pub fn load_model(path: &Path) -> CliResult<BecParameters> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: invalid JSON: {e}", path.display())))?;
    BecParameters::from_json(&value).map_err(config_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_fig1_gets_documented_defaults() {
        let s = Scenario::from_value(&json!({"kind": "fig1"}), None).unwrap();
        assert_eq!(s.model.chi(), 1.0);
        assert_eq!(s.nu, 1);
        let g = s.time_grid.unwrap();
        assert_eq!((g.from, g.to, g.points, g.spacing), (0.0, 5e-3, 500, Spacing::Linear));
        assert_eq!(s.ab_values.len(), 3);
    }

    #[test]
    fn fig2_and_fig3_default_to_log_grids() {
        for kind in ["fig2", "fig3"] {
            let s = Scenario::from_value(&json!({ "kind": kind }), None).unwrap();
            assert_eq!(s.time_grid.unwrap().spacing, Spacing::Log);
        }
    }

    #[test]
    fn log_grid_is_geometric() {
        let g = Grid {
            from: 1e-4,
            to: 1e-2,
            points: 3,
            spacing: Spacing::Log,
        };
        let s = g.samples();
        assert!((s[1] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_and_mismatched_keys() {
        let err = Scenario::from_value(&json!({"kind": "fig1", "colour": 3}), None).unwrap_err();
        assert!(err.to_string().contains("unknown key `colour`"));
        let err = Scenario::from_value(&json!({"kind": "fig1", "aB_nm": [5.3]}), None).unwrap_err();
        assert!(err.to_string().contains("expected `aB_m`"), "{err}");
        let err = Scenario::from_value(&json!({"kind": "fig1", "time_grid": {"t_max_ms": 5}}), None).unwrap_err();
        assert!(err.to_string().contains("expected `t_max_s`"), "{err}");
    }

    #[test]
    fn rejects_non_dilute_scattering_length() {
        let err = Scenario::from_value(&json!({"kind": "fig2", "aB_m": [2e-8]}), None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("diluteness"));
    }
}
