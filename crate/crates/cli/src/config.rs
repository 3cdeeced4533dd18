//! Flat key-value experiment configuration.
//!
//! A config file is a TOML document of top-level `key = value` pairs. Every
//! key is optional; [`ExperimentConfig::resolve`] fills the missing ones from
//! the chosen parameter preset and the per-experiment defaults.

use std::path::{Path, PathBuf};

use predprey::analysis::{meanfield_params, InitialDensities};
use predprey::meanfield::{Boundary, Method, SolverConfig};
use predprey::model::{equilibrium, Cell, Lattice, LatticeState, ModelParams};
use predprey::samplers::{EngineConfig, EngineKind, EnsembleMode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PREDPREY_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "results";

#[derive(Debug, Error, PartialEq)]
#[error("config error in `{key}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Meanfield,
    Validate,
    Convergence,
    Cost,
    Accuracy,
    Spectrum,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Meanfield => "meanfield",
            Self::Validate => "validate",
            Self::Convergence => "convergence",
            Self::Cost => "cost",
            Self::Accuracy => "accuracy",
            Self::Spectrum => "spectrum",
        }
    }
}

/// Named parameter sets; explicit rate keys override them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[default]
    Homogeneous,
    Heterogeneous,
    Benchmark,
}

impl Preset {
    pub fn params(&self) -> ModelParams {
        match self {
            Self::Homogeneous => ModelParams::homogeneous_reference(),
            Self::Heterogeneous => ModelParams::heterogeneous_reference(),
            Self::Benchmark => ModelParams::benchmark_reference(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    #[default]
    WellMixed,
    Line,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// Same densities `initial_f`, `initial_g` in every cell.
    Uniform,
    /// Prey in the middle of the domain, predators next to them.
    CenteredBlob,
    /// Mean-field equilibrium in every cell.
    Equilibrium,
    /// Per-cell counts `initial_a`, `initial_b`.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    #[default]
    Rk4,
    DormandPrince,
}

/// Swept quantity of the cost benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostSweep {
    /// Total component count, from `sizes`.
    #[default]
    Size,
    /// Competition rates `p1_r = p2_r`, from `sweep_values`.
    Competition,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub preset: Option<Preset>,

    pub b_r: Option<f64>,
    pub p1_r: Option<f64>,
    pub p2_r: Option<f64>,
    pub d1_r: Option<f64>,
    pub d2_r: Option<f64>,
    pub m1_r: Option<f64>,
    pub m2_r: Option<f64>,
    pub mu: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub tau: Option<f64>,
    pub epsilon: Option<f64>,

    pub lattice: Option<LatticeKind>,
    pub cells: Option<usize>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    /// Components per cell (`N` when well-mixed).
    pub capacity: Option<u32>,
    pub boundary: Option<Boundary>,

    pub initial: Option<InitialKind>,
    pub initial_f: Option<f64>,
    pub initial_g: Option<f64>,
    pub initial_a: Option<Vec<u32>>,
    pub initial_b: Option<Vec<u32>>,

    pub engine: Option<EngineKind>,
    pub ensemble_mode: Option<EnsembleMode>,
    pub t_final: Option<f64>,
    pub record_stride: Option<f64>,
    pub epsilon_leap: Option<f64>,
    pub tau_min: Option<f64>,

    pub dt: Option<f64>,
    pub method: Option<MethodKind>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,

    pub sizes: Option<Vec<u32>>,
    pub sweep: Option<CostSweep>,
    pub sweep_values: Option<Vec<f64>>,
    pub engines: Option<Vec<EngineKind>>,
    pub repetitions: Option<usize>,
    pub realizations: Option<usize>,

    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Locates keys in the config text for error messages.
struct KeyLines<'a> {
    text: Option<&'a str>,
}

impl KeyLines<'_> {
    fn line(&self, key: &str) -> Option<usize> {
        self.text?.lines().position(|l| {
            l.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { key: key.to_string(), line: self.line(key), message: message.into() }
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn toml_error(text: &str, err: toml::de::Error) -> ConfigError {
    let line = err.span().map(|s| line_of_offset(text, s.start));
    let key = line
        .and_then(|l| text.lines().nth(l - 1))
        .and_then(|l| l.split_once('='))
        .map(|(k, _)| k.trim().to_string())
        .unwrap_or_else(|| "<document>".to_string());
    ConfigError { key, line, message: err.message().trim().to_string() }
}

impl ExperimentConfig {
    /// Parses config text without filling defaults.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| toml_error(text, e))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// Reads `path` (if any), applies `overrides` on top and returns the
    /// resolved, validated config.
    pub fn load(path: Option<&Path>, overrides: toml::Table) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| ConfigError {
                key: "--config".into(),
                line: None,
                message: format!("cannot read {}: {e}", p.display()),
            })?),
            None => None,
        };
        let mut table = match &text {
            Some(t) => {
                Self::from_toml(t)?;
                t.parse::<toml::Table>().map_err(|e| toml_error(t, e))?
            }
            None => toml::Table::new(),
        };
        for (key, value) in &overrides {
            let single = toml::Table::from_iter([(key.clone(), value.clone())]);
            Self::deserialize(toml::Value::Table(single)).map_err(|e| ConfigError {
                key: key.clone(),
                line: None,
                message: e.message().trim().to_string(),
            })?;
        }
        if let (Some(file_kind), Some(cli_kind)) = (table.get("kind"), overrides.get("kind")) {
            if file_kind != cli_kind {
                return Err(KeyLines { text: text.as_deref() }
                    .error("kind", format!("file sets {file_kind} but the command is {cli_kind}")));
            }
        }
        table.extend(overrides);
        let merged = Self::deserialize(toml::Value::Table(table)).map_err(|e| ConfigError {
            key: "<merged>".into(),
            line: None,
            message: e.message().trim().to_string(),
        })?;
        merged.resolve_with(KeyLines { text: text.as_deref() })
    }

    /// Fills every applicable key with its default and validates the result.
    pub fn resolve(self) -> Result<Self, ConfigError> {
        self.resolve_with(KeyLines { text: None })
    }

    fn resolve_with(self, lines: KeyLines) -> Result<Self, ConfigError> {
        let kind = self.kind.ok_or_else(|| lines.error("kind", "experiment kind is required"))?;
        let preset = self.preset.unwrap_or_default();
        let base = preset.params();
        let lattice = self.lattice.unwrap_or_default();
        let initial = self.initial.unwrap_or(match kind {
            ExperimentKind::Spectrum => InitialKind::Equilibrium,
            _ => InitialKind::Uniform,
        });
        let uniform = initial == InitialKind::Uniform;
        let solver = matches!(kind, ExperimentKind::Meanfield | ExperimentKind::Validate | ExperimentKind::Convergence);
        let adaptive = solver && self.method == Some(MethodKind::DormandPrince);
        let cost = kind == ExperimentKind::Cost;
        let sweep = self.sweep.unwrap_or_default();
        let cfg = Self {
            kind: Some(kind),
            preset: Some(preset),
            b_r: self.b_r.or(Some(base.b_r)),
            p1_r: self.p1_r.or(Some(base.p1_r)),
            p2_r: self.p2_r.or(Some(base.p2_r)),
            d1_r: self.d1_r.or(Some(base.d1_r)),
            d2_r: self.d2_r.or(Some(base.d2_r)),
            m1_r: self.m1_r.or(Some(base.m1_r)),
            m2_r: self.m2_r.or(Some(base.m2_r)),
            mu: self.mu.or(Some(base.mu)),
            q1: self.q1.or(Some(base.q1)),
            q2: self.q2.or(Some(base.q2)),
            tau: self.tau.or(Some(base.tau)),
            epsilon: self.epsilon.or(Some(base.epsilon)),
            lattice: Some(lattice),
            cells: self.cells.or((lattice == LatticeKind::Line).then_some(50)),
            nx: self.nx.or((lattice == LatticeKind::Grid).then_some(10)),
            ny: self.ny.or((lattice == LatticeKind::Grid).then_some(10)),
            capacity: self.capacity.or(Some(1000)),
            boundary: self.boundary.or(Some(Boundary::default())),
            initial: Some(initial),
            initial_f: self.initial_f.or(uniform.then_some(0.25)),
            initial_g: self.initial_g.or(uniform.then_some(0.5)),
            initial_a: self.initial_a,
            initial_b: self.initial_b,
            engine: self.engine.or(Some(EngineKind::Ensemble)),
            ensemble_mode: self.ensemble_mode.or(Some(EnsembleMode::default())),
            t_final: self.t_final.or(Some(match kind {
                ExperimentKind::Simulate | ExperimentKind::Meanfield => 100.0,
                ExperimentKind::Validate => 500.0,
                ExperimentKind::Convergence | ExperimentKind::Accuracy => 50.0,
                ExperimentKind::Cost => 10.0,
                ExperimentKind::Spectrum => 2000.0,
            })),
            record_stride: self.record_stride.or(Some(1.0)),
            epsilon_leap: self.epsilon_leap.or(Some(0.5)),
            tau_min: self.tau_min.or(Some(1e-12)),
            dt: self.dt.or(Some(0.01)),
            method: self.method.or(Some(MethodKind::default())),
            rtol: self.rtol.or(adaptive.then_some(1e-8)),
            atol: self.atol.or(adaptive.then_some(1e-10)),
            sizes: self.sizes.or(match kind {
                ExperimentKind::Convergence => Some(vec![10, 100, 1000, 10_000]),
                ExperimentKind::Cost if sweep == CostSweep::Size => Some(vec![500, 1000, 2000, 4000]),
                ExperimentKind::Accuracy => Some(vec![100, 1000, 10_000]),
                _ => None,
            }),
            sweep: self.sweep.or(cost.then_some(sweep)),
            sweep_values: self
                .sweep_values
                .or((cost && sweep == CostSweep::Competition).then(|| vec![0.1, 0.3, 0.5, 0.7, 0.9])),
            engines: self.engines.or(match kind {
                ExperimentKind::Cost => Some(EngineKind::ALL.to_vec()),
                ExperimentKind::Accuracy => Some(vec![EngineKind::Ensemble, EngineKind::TauLeaping]),
                _ => None,
            }),
            repetitions: self.repetitions.or(cost.then_some(5)),
            realizations: self.realizations.or(Some(match kind {
                ExperimentKind::Simulate | ExperimentKind::Meanfield | ExperimentKind::Cost => 1,
                ExperimentKind::Validate | ExperimentKind::Convergence => 50,
                ExperimentKind::Accuracy => 100,
                ExperimentKind::Spectrum => 500,
            })),
            seed: self.seed.or(Some(0)),
            out_dir: self.out_dir.or_else(|| {
                Some(std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| DEFAULT_OUT_DIR.into()))
            }),
        };
        cfg.validate(&lines)?;
        Ok(cfg)
    }

    pub fn kind(&self) -> ExperimentKind {
        self.kind.unwrap_or(ExperimentKind::Simulate)
    }

    pub fn params(&self) -> ModelParams {
        let base = self.preset.unwrap_or_default().params();
        ModelParams {
            b_r: self.b_r.unwrap_or(base.b_r),
            p1_r: self.p1_r.unwrap_or(base.p1_r),
            p2_r: self.p2_r.unwrap_or(base.p2_r),
            d1_r: self.d1_r.unwrap_or(base.d1_r),
            d2_r: self.d2_r.unwrap_or(base.d2_r),
            m1_r: self.m1_r.unwrap_or(base.m1_r),
            m2_r: self.m2_r.unwrap_or(base.m2_r),
            mu: self.mu.unwrap_or(base.mu),
            q1: self.q1.unwrap_or(base.q1),
            q2: self.q2.unwrap_or(base.q2),
            tau: self.tau.unwrap_or(base.tau),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
        }
    }

    pub fn lattice_layout(&self) -> Lattice {
        match self.lattice.unwrap_or_default() {
            LatticeKind::WellMixed => Lattice::WellMixed,
            LatticeKind::Line => Lattice::Line { cells: self.cells.unwrap_or(50) },
            LatticeKind::Grid => Lattice::Grid { nx: self.nx.unwrap_or(10), ny: self.ny.unwrap_or(10) },
        }
    }

    pub fn capacity(&self) -> u32 {
        self.capacity.unwrap_or(1000)
    }

    pub fn realizations(&self) -> usize {
        self.realizations.unwrap_or(1)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| DEFAULT_OUT_DIR.into())
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            kind: self.engine.unwrap_or(EngineKind::Ensemble),
            seed: self.seed(),
            t_final: self.t_final.unwrap_or(100.0),
            tau: None,
            epsilon_leap: self.epsilon_leap.unwrap_or(0.5),
            tau_min: self.tau_min.unwrap_or(1e-12),
            record_stride: self.record_stride,
            ensemble_mode: self.ensemble_mode.unwrap_or_default(),
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        let method = match self.method.unwrap_or_default() {
            MethodKind::Rk4 => Method::Rk4,
            MethodKind::DormandPrince => {
                Method::DormandPrince { rtol: self.rtol.unwrap_or(1e-8), atol: self.atol.unwrap_or(1e-10) }
            }
        };
        SolverConfig {
            dt: self.dt.unwrap_or(0.01),
            t_final: self.t_final.unwrap_or(100.0),
            output_stride: self.record_stride.unwrap_or(1.0),
            boundary: self.boundary.unwrap_or_default(),
            method,
            epsilon: self.params().epsilon,
        }
    }

    /// Initial densities on the configured lattice.
    pub fn initial_densities(&self) -> predprey::Result<InitialDensities> {
        let lattice = self.lattice_layout();
        match self.initial.unwrap_or(InitialKind::Uniform) {
            InitialKind::Uniform => {
                Ok(InitialDensities::uniform(lattice, self.initial_f.unwrap_or(0.25), self.initial_g.unwrap_or(0.5)))
            }
            InitialKind::CenteredBlob => Ok(InitialDensities::centered_blob(lattice)),
            InitialKind::Equilibrium => {
                let (f, g) = equilibrium(&meanfield_params(&self.params(), lattice)?)?;
                Ok(InitialDensities::uniform(lattice, f, g))
            }
            InitialKind::Explicit => {
                let state = self.explicit_state()?;
                let (f, g) = (0..state.n_cells()).map(|l| state.densities(l)).unzip();
                Ok(InitialDensities { lattice, f, g })
            }
        }
    }

    /// Initial counts at the configured capacity.
    pub fn initial_state(&self) -> predprey::Result<LatticeState> {
        match self.initial {
            Some(InitialKind::Explicit) => self.explicit_state(),
            _ => self.initial_densities()?.state(self.capacity()),
        }
    }

    fn explicit_state(&self) -> predprey::Result<LatticeState> {
        let a = self.initial_a.as_deref().unwrap_or_default();
        let b = self.initial_b.as_deref().unwrap_or_default();
        let cap = self.capacity();
        let cells = a
            .iter()
            .zip(b)
            .map(|(&a, &b)| {
                let e = cap.checked_sub(a).and_then(|r| r.checked_sub(b)).ok_or_else(|| {
                    predprey::Error::InvalidState(format!("cell with {a} predators and {b} prey exceeds capacity {cap}"))
                })?;
                Ok(Cell::new(a, b, e))
            })
            .collect::<predprey::Result<Vec<_>>>()?;
        LatticeState::new(self.lattice_layout(), cap, cells)
    }

    fn validate(&self, lines: &KeyLines) -> Result<(), ConfigError> {
        let kind = self.kind();
        let p = self.params();
        p.validate().map_err(|e| {
            let key = match &e {
                predprey::Error::InvalidParameter { name, .. } => param_key(name),
                predprey::Error::ProbabilityOverflow { name, .. } => {
                    let rate = param_key(name);
                    if lines.line(rate).is_none() && lines.line("tau").is_some() {
                        "tau"
                    } else {
                        rate
                    }
                }
                _ => "tau",
            };
            lines.error(key, e.to_string())
        })?;

        let positive = |key: &str, v: Option<f64>| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => Err(lines.error(key, format!("must be positive, got {x}"))),
            _ => Ok(()),
        };
        positive("t_final", self.t_final)?;
        positive("record_stride", self.record_stride)?;
        positive("tau_min", self.tau_min)?;
        positive("dt", self.dt)?;
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)?;
        if let Some(e) = self.epsilon_leap.filter(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(lines.error("epsilon_leap", format!("must lie in (0, 1), got {e}")));
        }
        let stride = self.record_stride.unwrap_or(1.0);
        let ratio = stride / p.tau;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
            return Err(lines.error("record_stride", format!("{stride} is not a whole multiple of tau = {}", p.tau)));
        }

        for (key, v) in [("cells", self.cells), ("nx", self.nx), ("ny", self.ny)] {
            if v == Some(0) {
                return Err(lines.error(key, "lattice dimension must be at least 1"));
            }
        }
        if self.capacity() == 0 {
            return Err(lines.error("capacity", "must be at least 1"));
        }
        if self.realizations() == 0 {
            return Err(lines.error("realizations", "must be at least 1"));
        }
        if let Some(r) = self.repetitions.filter(|&r| r < 3) {
            return Err(lines.error("repetitions", format!("at least 3 timing repetitions are needed, got {r}")));
        }

        if let (Some(f), Some(g)) = (self.initial_f, self.initial_g) {
            if !(0.0..=1.0).contains(&f) || !(0.0..=1.0).contains(&g) || f + g > 1.0 {
                return Err(lines.error("initial_f", format!("densities ({f}, {g}) must be non-negative with sum at most 1")));
            }
        }
        if self.initial == Some(InitialKind::Explicit) {
            let n = self.lattice_layout().n_cells();
            for key in ["initial_a", "initial_b"] {
                let v = if key == "initial_a" { &self.initial_a } else { &self.initial_b };
                match v {
                    None => return Err(lines.error(key, "required by initial = \"explicit\"")),
                    Some(v) if v.len() != n => {
                        return Err(lines.error(key, format!("{} entries given for {n} cells", v.len())))
                    }
                    _ => {}
                }
            }
        }
        self.initial_state().map_err(|e| lines.error("initial", e.to_string()))?;

        let sized = matches!(kind, ExperimentKind::Convergence | ExperimentKind::Accuracy)
            || (kind == ExperimentKind::Cost && self.sweep.unwrap_or_default() == CostSweep::Size);
        if sized {
            match self.sizes.as_deref() {
                None | Some([]) => return Err(lines.error("sizes", "a non-empty list of sizes is required")),
                Some(s) if s.contains(&0) => return Err(lines.error("sizes", "sizes must be positive")),
                _ => {}
            }
        }
        if kind == ExperimentKind::Cost && self.sweep == Some(CostSweep::Competition) {
            let values = self.sweep_values.as_deref().unwrap_or_default();
            if values.is_empty() {
                return Err(lines.error("sweep_values", "a non-empty list of rates is required"));
            }
            for &v in values {
                ModelParams { p1_r: v, p2_r: v, ..p }.validate().map_err(|e| lines.error("sweep_values", e.to_string()))?;
            }
        }
        if matches!(kind, ExperimentKind::Cost | ExperimentKind::Accuracy)
            && self.engines.as_deref().is_none_or(|e| e.is_empty())
        {
            return Err(lines.error("engines", "a non-empty list of engines is required"));
        }
        if kind == ExperimentKind::Spectrum && self.lattice_layout() != Lattice::WellMixed {
            return Err(lines.error("lattice", "spectra are computed for the well-mixed model only"));
        }
        self.engine_config().validate(&p).map_err(|e| lines.error("engine", e.to_string()))?;
        Ok(())
    }
}

/// Config key behind a parameter name reported by the model.
fn param_key(name: &str) -> &'static str {
    const KEYS: [&str; 12] = ["b_r", "p1_r", "p2_r", "d1_r", "d2_r", "m1_r", "m2_r", "mu", "q1", "q2", "tau", "epsilon"];
    if name.contains('+') {
        return "p2_r";
    }
    KEYS.into_iter().find(|k| name.starts_with(k)).unwrap_or("tau")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_toml(text)?.resolve()
    }

    #[test]
    fn minimal_file_takes_reference_rates() {
        let cfg = resolve("kind = \"validate\"\n").unwrap();
        assert_eq!(cfg.params(), ModelParams::homogeneous_reference());
        assert_eq!(cfg.b_r, Some(0.1));
        assert_eq!(cfg.mu, Some(0.5));
    }

    #[test]
    fn unknown_key_reports_name_and_line() {
        let err = ExperimentConfig::from_toml("kind = \"validate\"\nbogus = 3\n").unwrap_err();
        assert_eq!(err.key, "bogus");
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn key_lines_match_whole_keys() {
        let lines = KeyLines { text: Some("tau_min = 1\ntau = 0.1\n") };
        assert_eq!(lines.line("tau"), Some(2));
        assert_eq!(lines.line("tau_min"), Some(1));
        assert_eq!(lines.line("mu"), None);
    }

    #[test]
    fn parameter_names_map_to_keys() {
        assert_eq!(param_key("p1_r*tau"), "p1_r");
        assert_eq!(param_key("(p1_r+p2_r)*tau"), "p2_r");
        assert_eq!(param_key("q2"), "q2");
    }

    #[test]
    fn resolve_is_idempotent() {
        let cfg = resolve("kind = \"cost\"\nsweep = \"competition\"\n").unwrap();
        assert_eq!(cfg.clone().resolve().unwrap(), cfg);
    }
}
