//! Stochastic samplers sharing one configuration and output format.
//!
//! * [`run_direct`]: exact event-driven simulation.
//! * [`run_classic_mc`]: one pair and one death candidate per micro-step of
//!   `tau / N`.
//! * [`run_tau_leaping`]: Poisson leaps with adaptive halving.
//! * [`run_ensemble_homogeneous`] / [`run_ensemble_heterogeneous`]: fixed
//!   step `tau` in which a whole batch of components interacts, migrates or
//!   dies at once.

mod classic;
mod direct;
mod draw;
mod ensemble;
mod leaping;
mod summary;
mod trajectory;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LatticeState, ModelParams};
use crate::rng::derive_seed;

pub use classic::run_classic_mc;
pub use direct::{run_direct, select_event, waiting_time};
pub use ensemble::{commit_counts, run_ensemble_heterogeneous, run_ensemble_homogeneous};
pub use leaping::{leap_attempt, run_tau_leaping, ChannelClocks, LeapAttempt};
pub use summary::EnsembleSummary;
pub(crate) use trajectory::record_grid;
pub use trajectory::{params_hash, RunStats, Source, Trajectory, TrajectoryMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    Direct,
    ClassicMc,
    TauLeaping,
    Ensemble,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] = [Self::Direct, Self::ClassicMc, Self::TauLeaping, Self::Ensemble];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::ClassicMc => "classic-mc",
            Self::TauLeaping => "tau-leaping",
            Self::Ensemble => "ensemble",
        }
    }

    pub fn source(&self) -> Source {
        match self {
            Self::Direct => Source::Direct,
            Self::ClassicMc => Source::ClassicMc,
            Self::TauLeaping => Source::TauLeaping,
            Self::Ensemble => Source::Ensemble,
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown engine `{s}`")))
    }
}

/// How the ensemble sampler draws one step.
///
/// Both modes sample the same step distribution. `Agents` materialises every
/// component and costs O(Nc) per cell and step; `Counts` draws the group
/// compositions and event counts from hypergeometric and binomial laws at
/// O(1) per cell and step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleMode {
    #[default]
    Agents,
    Counts,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub kind: EngineKind,
    pub seed: u64,
    pub t_final: f64,
    /// Step of the fixed-step engines and first trial leap; `None` takes
    /// `ModelParams::tau`.
    pub tau: Option<f64>,
    /// Leap-selection tolerance on absolute propensity changes.
    pub epsilon_leap: f64,
    /// Smallest leap before the leaping engine gives up.
    pub tau_min: f64,
    /// Output interval; `None` records every `tau`.
    pub record_stride: Option<f64>,
    pub ensemble_mode: EnsembleMode,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            kind: EngineKind::Ensemble,
            seed: 0,
            t_final: 100.0,
            tau: None,
            epsilon_leap: 0.5,
            tau_min: 1e-12,
            record_stride: None,
            ensemble_mode: EnsembleMode::Agents,
        }
    }
}

impl EngineConfig {
    pub fn tau(&self, p: &ModelParams) -> f64 {
        self.tau.unwrap_or(p.tau)
    }

    pub fn stride(&self, p: &ModelParams) -> f64 {
        self.record_stride.unwrap_or_else(|| self.tau(p))
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive("t_final", self.t_final)?;
        positive("tau", self.tau(p))?;
        positive("record_stride", self.stride(p))?;
        positive("tau_min", self.tau_min)?;
        if !(self.epsilon_leap > 0.0 && self.epsilon_leap < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon_leap must lie in (0, 1), got {}",
                self.epsilon_leap
            )));
        }
        Ok(())
    }

    /// Parameters with `tau` replaced by the engine step, validated.
    pub(crate) fn effective_params(&self, p: &ModelParams) -> Result<ModelParams> {
        self.validate(p)?;
        let q = ModelParams { tau: self.tau(p), ..*p };
        q.validate()?;
        Ok(q)
    }

    /// Recording interval in whole steps of `tau`.
    pub(crate) fn stride_steps(&self, p: &ModelParams) -> Result<u64> {
        let ratio = self.stride(p) / self.tau(p);
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "record_stride {} is not a multiple of tau {}",
                self.stride(p),
                self.tau(p)
            )));
        }
        Ok(k as u64)
    }

    /// Number of fixed steps `ceil(t_final / tau)`.
    pub(crate) fn n_steps(&self, p: &ModelParams) -> u64 {
        (self.t_final / self.tau(p) - 1e-9).ceil().max(0.0) as u64
    }
}

pub(crate) fn meta(cfg: &EngineConfig, p: &ModelParams) -> TrajectoryMeta {
    TrajectoryMeta {
        source: cfg.kind.source(),
        seed: cfg.seed,
        params_hash: params_hash(p),
        stats: RunStats::default(),
    }
}

/// Runs the engine selected by `cfg.kind`. The ensemble engine picks the
/// well-mixed or lattice variant from the state's lattice.
pub fn run(state0: &LatticeState, p: &ModelParams, cfg: &EngineConfig) -> Result<Trajectory> {
    match cfg.kind {
        EngineKind::Direct => run_direct(state0, p, cfg),
        EngineKind::ClassicMc => run_classic_mc(state0, p, cfg),
        EngineKind::TauLeaping => run_tau_leaping(state0, p, cfg),
        EngineKind::Ensemble if state0.lattice().is_well_mixed() => run_ensemble_homogeneous(state0, p, cfg),
        EngineKind::Ensemble => run_ensemble_heterogeneous(state0, p, cfg),
    }
}

/// Initial state, parameters and engine configuration of a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub state0: LatticeState,
    pub params: ModelParams,
    pub engine: EngineConfig,
}

/// `r` independent realizations; realization `i` uses seed `seed0 ^ i`.
/// Runs in parallel; the result is ordered by realization index.
pub fn run_realizations(spec: &RunSpec, r: usize, seed0: u64) -> Result<Vec<Trajectory>> {
    if r == 0 {
        return Err(Error::InvalidConfig("realization count must be at least 1".into()));
    }
    (0..r as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = EngineConfig { seed: derive_seed(seed0, i), ..spec.engine };
            run(&spec.state0, &spec.params, &cfg)
        })
        .collect()
}
