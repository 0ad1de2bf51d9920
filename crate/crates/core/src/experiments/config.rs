use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::diagnostics::NOISE_FLOOR;
use crate::dynamics::{ContinuationConfig, IntegratorConfig};
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::GridSpec;

/// Named initial-data family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `√(6c) sech(√c (x − L/2))`, the focusing mKdV soliton.
    Soliton { c: f64 },
    /// `A sech((x − L/2)/w)`.
    Sech { amplitude: f64, width: f64 },
    /// `A e^{ikx}` (tNLS) or `A cos(kx)` (mKdV).
    PlaneWave { amplitude: f64, k: f64 },
    /// Coefficients `e^{−σ0|ξ|}`.
    PoissonKernel { sigma0: f64 },
    /// Random coefficients on `1 ≤ |k| ≤ k_max`, scaled to sup norm `amplitude`.
    RandomBand {
        k_max: usize,
        amplitude: f64,
        seed: Option<u64>,
    },
}

impl InitialData {
    pub fn family(&self) -> &'static str {
        match self {
            Self::Soliton { .. } => "soliton",
            Self::Sech { .. } => "sech",
            Self::PlaneWave { .. } => "plane_wave",
            Self::PoissonKernel { .. } => "poisson_kernel",
            Self::RandomBand { .. } => "random_band",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Simulate,
    Continue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsConfig {
    /// Spacing of stored samples; 0 keeps only the endpoints.
    pub sample_spacing: f64,
    pub sigmas: Vec<f64>,
    pub noise_floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationParams {
    pub sigma0: f64,
    pub c0: f64,
    pub a: f64,
    pub constant: Option<f64>,
    pub exponent: Option<f64>,
}

impl Default for ContinuationParams {
    fn default() -> Self {
        Self {
            sigma0: 0.2,
            c0: 0.1,
            a: 3.0,
            constant: None,
            exponent: None,
        }
    }
}

/// One experiment, read from a flat `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub mode: RunMode,
    pub seed: u64,
    pub equation: EquationSpec,
    pub grid: GridSpec,
    pub initial: InitialData,
    pub integrator: IntegratorConfig,
    pub t_final: f64,
    pub diagnostics: DiagnosticsConfig,
    pub continuation: ContinuationParams,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let table = Table::read(text)?;
        let cfg = Self::from_table(&table)?;
        cfg.check().map_err(|(key, e)| Error::Config {
            line: table.line_of(key),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    fn from_table(t: &Table) -> Result<Self> {
        let kind = t.string("equation.kind")?;
        let equation = match kind.as_deref() {
            Some("mkdv") => {
                let mu = t.float_or("equation.mu", -1.0)?;
                EquationSpec::mkdv(mu).map_err(|e| t.error_at("equation.mu", e))?
            }
            Some("tnls") => {
                let alpha = t.float_or("equation.alpha", 1.0)?;
                let beta = t.float_or("equation.beta", 1.0)?;
                let gamma = t.float_or("equation.gamma", 1.0)?;
                EquationSpec::tnls(alpha, beta, gamma)
                    .map_err(|e| t.error_at("equation.beta", e))?
            }
            Some(other) => {
                return Err(t.error_at("equation.kind", format!("unknown equation '{other}'")))
            }
            None => return Err(t.missing("equation.kind")),
        };

        let n = t.uint("grid.n")?.ok_or_else(|| t.missing("grid.n"))?;
        let length = t
            .float("grid.length")?
            .ok_or_else(|| t.missing("grid.length"))?;
        let grid = GridSpec::new(n as usize, length).map_err(|e| t.error_at("grid.n", e))?;

        let family = t
            .string("initial.family")?
            .ok_or_else(|| t.missing("initial.family"))?;
        let initial = match family.as_str() {
            "soliton" => InitialData::Soliton {
                c: t.require_float("initial.c")?,
            },
            "sech" => InitialData::Sech {
                amplitude: t.require_float("initial.amplitude")?,
                width: t.float_or("initial.width", 1.0)?,
            },
            "plane_wave" => InitialData::PlaneWave {
                amplitude: t.require_float("initial.amplitude")?,
                k: t.require_float("initial.k")?,
            },
            "poisson_kernel" => InitialData::PoissonKernel {
                sigma0: t.require_float("initial.sigma0")?,
            },
            "random_band" => InitialData::RandomBand {
                k_max: t
                    .uint("initial.k_max")?
                    .ok_or_else(|| t.missing("initial.k_max"))? as usize,
                amplitude: t.float_or("initial.amplitude", 0.5)?,
                seed: t.uint("initial.seed")?,
            },
            other => return Err(t.error_at("initial.family", format!("unknown family '{other}'"))),
        };

        let defaults = IntegratorConfig::default();
        let integrator = IntegratorConfig {
            dt: t.float_or("integrator.dt", defaults.dt)?,
            dealias: t.bool_or("integrator.dealias", defaults.dealias)?,
            reality_projection: t
                .bool_or("integrator.reality_projection", defaults.reality_projection)?,
            max_steps: t
                .uint("integrator.max_steps")?
                .map_or(defaults.max_steps, |v| v as usize),
            nonlinear: t.bool_or("integrator.nonlinear", defaults.nonlinear)?,
        };
        integrator
            .validate()
            .map_err(|e| t.error_at("integrator.dt", e))?;

        let mode = match t.string("run.mode")?.as_deref() {
            None | Some("simulate") => RunMode::Simulate,
            Some("continue") => RunMode::Continue,
            Some(other) => return Err(t.error_at("run.mode", format!("unknown mode '{other}'"))),
        };

        let diagnostics = DiagnosticsConfig {
            sample_spacing: t.float_or("diagnostics.sample_spacing", 0.0)?,
            sigmas: t
                .float_list("diagnostics.sigmas")?
                .unwrap_or_else(|| vec![0.0]),
            noise_floor: t.float_or("diagnostics.noise_floor", NOISE_FLOOR)?,
        };
        let cd = ContinuationParams::default();
        let continuation = ContinuationParams {
            sigma0: t.float_or("continuation.sigma0", cd.sigma0)?,
            c0: t.float_or("continuation.c0", cd.c0)?,
            a: t.float_or("continuation.a", cd.a)?,
            constant: t.float("continuation.constant")?,
            exponent: t.float("continuation.exponent")?,
        };
        let name = t.string("name")?.unwrap_or_else(|| "run".into());
        let output_dir = t
            .string("output.dir")?
            .map_or_else(|| PathBuf::from("runs").join(&name), PathBuf::from);

        let cfg = Self {
            name,
            mode,
            seed: t.uint("seed")?.unwrap_or(0),
            equation,
            grid,
            initial,
            integrator,
            t_final: t.require_float("run.t_final")?,
            diagnostics,
            continuation,
            output_dir,
        };
        t.check_unused()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|(_, e)| e)
    }

    /// Validation error together with the key it concerns.
    fn check(&self) -> std::result::Result<(), (&'static str, Error)> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err((
                "run.t_final",
                Error::InvalidParameter(format!("run.t_final = {} must be positive", self.t_final)),
            ));
        }
        if !(self.diagnostics.sample_spacing >= 0.0) {
            return Err((
                "diagnostics.sample_spacing",
                Error::InvalidParameter("diagnostics.sample_spacing must be nonnegative".into()),
            ));
        }
        if !(self.diagnostics.noise_floor > 0.0 && self.diagnostics.noise_floor < 1.0) {
            return Err((
                "diagnostics.noise_floor",
                Error::InvalidParameter("diagnostics.noise_floor must lie in (0, 1)".into()),
            ));
        }
        let radius = self.grid.trust_radius();
        for &s in &self.diagnostics.sigmas {
            if !(s >= 0.0) || s > radius {
                return Err((
                    "diagnostics.sigmas",
                    Error::InvalidParameter(format!(
                        "sigma {s} outside [0, {radius:.4}] (trust radius of the grid)"
                    )),
                ));
            }
        }
        match self.initial {
            InitialData::Soliton { c } => {
                if self.equation != EquationSpec::focusing_mkdv() {
                    return Err((
                        "initial.family",
                        Error::InvalidParameter("soliton data needs focusing mKdV (mu = 1)".into()),
                    ));
                }
                if !(c > 0.0) {
                    return Err((
                        "initial.c",
                        Error::InvalidParameter(format!("soliton speed c = {c} must be positive")),
                    ));
                }
            }
            InitialData::Sech { amplitude, width } => {
                if !amplitude.is_finite() || !(width > 0.0) {
                    return Err((
                        "initial.width",
                        Error::InvalidParameter("sech needs finite amplitude and width > 0".into()),
                    ));
                }
            }
            InitialData::PlaneWave { amplitude, k } => {
                let m = k / self.grid.dxi();
                if !amplitude.is_finite()
                    || (m - m.round()).abs() > 1e-9
                    || m.abs() >= (self.grid.n() / 2) as f64
                {
                    return Err((
                        "initial.k",
                        Error::InvalidParameter(format!(
                            "plane wave k = {k} is not a resolved multiple of 2π/L"
                        )),
                    ));
                }
            }
            InitialData::PoissonKernel { sigma0 } => {
                if !(sigma0 > 0.0) {
                    return Err((
                        "initial.sigma0",
                        Error::InvalidParameter(format!(
                            "poisson_kernel sigma0 = {sigma0} must be positive"
                        )),
                    ));
                }
            }
            InitialData::RandomBand {
                k_max, amplitude, ..
            } => {
                if k_max < 1 || k_max as i64 > self.grid.dealias_cutoff() || !amplitude.is_finite()
                {
                    return Err((
                        "initial.k_max",
                        Error::InvalidParameter(format!(
                            "random_band k_max = {k_max} must lie in [1, {}]",
                            self.grid.dealias_cutoff()
                        )),
                    ));
                }
            }
        }
        if self.mode == RunMode::Continue {
            let p = &self.continuation;
            if !(p.sigma0 > 0.0) || !(p.c0 > 0.0) || !(p.a > 1.0) {
                return Err((
                    "continuation.sigma0",
                    Error::InvalidParameter("continuation needs sigma0 > 0, c0 > 0, a > 1".into()),
                ));
            }
            if p.sigma0 > radius {
                return Err((
                    "continuation.sigma0",
                    Error::InvalidParameter(format!(
                        "continuation.sigma0 beyond trust radius {radius:.4}"
                    )),
                ));
            }
        }
        Ok(())
    }

    pub fn continuation_config(&self) -> ContinuationConfig {
        ContinuationConfig {
            integrator: self.integrator,
            c0: self.continuation.c0,
            a: self.continuation.a,
            constant: self.continuation.constant,
            exponent: self.continuation.exponent,
            sample_spacing: self.diagnostics.sample_spacing,
        }
    }

    /// Canonical text form; `parse(to_text())` returns an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("name", self.name.clone());
        kv("seed", self.seed.to_string());
        kv(
            "run.mode",
            match self.mode {
                RunMode::Simulate => "simulate".into(),
                RunMode::Continue => "continue".into(),
            },
        );
        kv("run.t_final", fmt_f(self.t_final));
        match self.equation {
            EquationSpec::Mkdv { mu } => {
                kv("equation.kind", "mkdv".into());
                kv("equation.mu", fmt_f(mu));
            }
            EquationSpec::Tnls { alpha, beta, gamma } => {
                kv("equation.kind", "tnls".into());
                kv("equation.alpha", fmt_f(alpha));
                kv("equation.beta", fmt_f(beta));
                kv("equation.gamma", fmt_f(gamma));
            }
        }
        kv("grid.n", self.grid.n().to_string());
        kv("grid.length", fmt_f(self.grid.length()));
        kv("initial.family", self.initial.family().into());
        match self.initial {
            InitialData::Soliton { c } => kv("initial.c", fmt_f(c)),
            InitialData::Sech { amplitude, width } => {
                kv("initial.amplitude", fmt_f(amplitude));
                kv("initial.width", fmt_f(width));
            }
            InitialData::PlaneWave { amplitude, k } => {
                kv("initial.amplitude", fmt_f(amplitude));
                kv("initial.k", fmt_f(k));
            }
            InitialData::PoissonKernel { sigma0 } => kv("initial.sigma0", fmt_f(sigma0)),
            InitialData::RandomBand {
                k_max,
                amplitude,
                seed,
            } => {
                kv("initial.k_max", k_max.to_string());
                kv("initial.amplitude", fmt_f(amplitude));
                if let Some(s) = seed {
                    kv("initial.seed", s.to_string());
                }
            }
        }
        let i = &self.integrator;
        kv("integrator.dt", fmt_f(i.dt));
        kv("integrator.dealias", i.dealias.to_string());
        kv(
            "integrator.reality_projection",
            i.reality_projection.to_string(),
        );
        kv("integrator.max_steps", i.max_steps.to_string());
        kv("integrator.nonlinear", i.nonlinear.to_string());
        let d = &self.diagnostics;
        kv("diagnostics.sample_spacing", fmt_f(d.sample_spacing));
        kv(
            "diagnostics.sigmas",
            d.sigmas
                .iter()
                .map(|&s| fmt_f(s))
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv("diagnostics.noise_floor", fmt_f(d.noise_floor));
        let c = &self.continuation;
        kv("continuation.sigma0", fmt_f(c.sigma0));
        kv("continuation.c0", fmt_f(c.c0));
        kv("continuation.a", fmt_f(c.a));
        if let Some(v) = c.constant {
            kv("continuation.constant", fmt_f(v));
        }
        if let Some(v) = c.exponent {
            kv("continuation.exponent", fmt_f(v));
        }
        kv("output.dir", self.output_dir.display().to_string());
        out
    }
}

/// Shortest decimal that parses back to the same `f64`.
fn fmt_f(x: f64) -> String {
    format!("{x:?}")
}

struct Entry {
    line: usize,
    value: String,
    used: std::cell::Cell<bool>,
}

struct Table {
    entries: BTreeMap<String, Entry>,
    eof: usize,
}

impl Table {
    fn read(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut eof = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            eof = line;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected 'key = value', found '{body}'"),
            })?;
            let key = key.trim();
            let valid = !key.is_empty()
                && key.split('.').all(|p| {
                    !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                });
            if !valid {
                return Err(Error::Config {
                    line,
                    message: format!("malformed key '{key}'"),
                });
            }
            let entry = Entry {
                line,
                value: value.trim().to_string(),
                used: false.into(),
            };
            if let Some(prev) = entries.insert(key.to_string(), entry) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key '{key}' (first set on line {})", prev.line),
                });
            }
        }
        Ok(Self { entries, eof })
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        let e = self.entries.get(key)?;
        e.used.set(true);
        Some(e)
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(self.eof, |e| e.line)
    }

    fn error_at(&self, key: &str, msg: impl std::fmt::Display) -> Error {
        Error::Config {
            line: self.line_of(key),
            message: format!("{key}: {msg}"),
        }
    }

    fn missing(&self, key: &str) -> Error {
        Error::Config {
            line: self.eof,
            message: format!("missing required key '{key}'"),
        }
    }

    fn string(&self, key: &str) -> Result<Option<String>> {
        Ok(self.get(key).map(|e| e.value.clone()))
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<f64>().map(Some).map_err(|_| Error::Config {
                line: e.line,
                message: format!("{key}: '{}' is not a number", e.value),
            }),
        }
    }

    fn float_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.float(key)?.unwrap_or(default))
    }

    fn require_float(&self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| self.missing(key))
    }

    fn uint(&self, key: &str) -> Result<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<u64>().map(Some).map_err(|_| Error::Config {
                line: e.line,
                message: format!("{key}: '{}' is not a nonnegative integer", e.value),
            }),
        }
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(e) => e.value.parse::<bool>().map_err(|_| Error::Config {
                line: e.line,
                message: format!("{key}: '{}' is not true/false", e.value),
            }),
        }
    }

    fn float_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.get(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|p| {
                p.trim().parse::<f64>().map_err(|_| Error::Config {
                    line: e.line,
                    message: format!("{key}: '{}' is not a number", p.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn check_unused(&self) -> Result<()> {
        match self.entries.iter().find(|(_, e)| !e.used.get()) {
            Some((k, e)) => Err(Error::Config {
                line: e.line,
                message: format!("unknown key '{k}'"),
            }),
            None => Ok(()),
        }
    }
}
