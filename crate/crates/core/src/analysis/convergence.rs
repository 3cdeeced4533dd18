use serde::{Deserialize, Serialize};

use crate::analysis::metrics::{error_vs_meanfield, fit_loglog, ErrorMode, LogLogFit};
use crate::error::{Error, Result};
use crate::meanfield::{integrate, Field, SolverConfig};
use crate::model::{scale_params, Cell, Lattice, LatticeState, ModelParams, ScaledParams};
use crate::samplers::{run_realizations, EngineConfig, EnsembleSummary, RunSpec};

/// Initial densities per cell; the integer state for capacity `Nc` rounds
/// `f Nc` and `g Nc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDensities {
    pub lattice: Lattice,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl InitialDensities {
    pub fn uniform(lattice: Lattice, f: f64, g: f64) -> Self {
        let n = lattice.n_cells();
        Self { lattice, f: vec![f; n], g: vec![g; n] }
    }

    /// Localised start. On a line the central fifth of the cells (at least
    /// one) holds predator density 1/4 and prey density 1/2. On a grid a
    /// central square of prey (density 1/2, side a fifth of the shorter
    /// axis, at least one) is surrounded by a one-cell ring of predators
    /// (density 1/4). All other cells start empty. The well-mixed lattice
    /// gets the uniform 1/4, 1/2 start.
    pub fn centered_blob(lattice: Lattice) -> Self {
        match lattice {
            Lattice::WellMixed => Self::uniform(lattice, 0.25, 0.5),
            Lattice::Line { cells } => {
                let width = (cells / 5).max(1);
                let lo = (cells - width) / 2;
                let inside = |l: usize| (lo..lo + width).contains(&l);
                Self {
                    lattice,
                    f: (0..cells).map(|l| if inside(l) { 0.25 } else { 0.0 }).collect(),
                    g: (0..cells).map(|l| if inside(l) { 0.5 } else { 0.0 }).collect(),
                }
            }
            Lattice::Grid { nx, ny } => {
                let side = (nx.min(ny) / 5).max(1);
                let (x0, y0) = ((nx - side) / 2, (ny - side) / 2);
                // Chebyshev distance outside the prey square; 0 inside.
                let dist = |x: usize, y: usize| {
                    let dx = if x < x0 { x0 - x } else { x.saturating_sub(x0 + side - 1) };
                    let dy = if y < y0 { y0 - y } else { y.saturating_sub(y0 + side - 1) };
                    dx.max(dy)
                };
                let n = nx * ny;
                let mut f = vec![0.0; n];
                let mut g = vec![0.0; n];
                for cell in 0..n {
                    let (x, y) = lattice.coords(cell);
                    match dist(x, y) {
                        0 => g[cell] = 0.5,
                        1 => f[cell] = 0.25,
                        _ => {}
                    }
                }
                Self { lattice, f, g }
            }
        }
    }

    pub fn state(&self, capacity: u32) -> Result<LatticeState> {
        Field::new(self.lattice, self.f.clone(), self.g.clone())?.check(1e-12)?;
        let cells = self
            .f
            .iter()
            .zip(&self.g)
            .map(|(&f, &g)| {
                let a = (f * capacity as f64).round() as u32;
                let b = ((g * capacity as f64).round() as u32).min(capacity - a);
                Cell::new(a, b, capacity - a - b)
            })
            .collect();
        LatticeState::new(self.lattice, capacity, cells)
    }
}

/// Mean-field rates matching a lattice: the well-mixed model uses the
/// single-cell mapping.
pub fn meanfield_params(p: &ModelParams, lattice: Lattice) -> Result<ScaledParams> {
    if lattice.is_well_mixed() {
        scale_params(&p.homogeneous_mapping())
    } else {
        scale_params(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSetup {
    pub params: ModelParams,
    pub initial: InitialDensities,
    pub engine: EngineConfig,
    /// Its `t_final` is replaced by the engine's.
    pub solver: SolverConfig,
    pub realizations: usize,
    pub seed: u64,
    pub mode: ErrorMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub engine: String,
    pub mode: ErrorMode,
    pub realizations: usize,
    /// Component count `N` (well-mixed) or `Nc` (per cell).
    pub sizes: Vec<u32>,
    pub e_f: Vec<f64>,
    pub e_g: Vec<f64>,
    pub fit_f: LogLogFit,
    /// `None` when the prey errors do not admit a fit.
    pub fit_g: Option<LogLogFit>,
}

/// Distance between the realization-averaged engine output and the mean
/// field, for each size, with a log-log fit against the size.
pub fn convergence_study(setup: &ConvergenceSetup, sizes: &[u32]) -> Result<ErrorReport> {
    let mut distinct: Vec<u32> = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::InvalidConfig(format!("need at least 4 distinct sizes, got {}", distinct.len())));
    }
    let (lo, hi) = (distinct[0] as f64, distinct[distinct.len() - 1] as f64);
    if lo == 0.0 || hi / lo < 100.0 {
        return Err(Error::InvalidConfig(format!("sizes must span two decades, got {lo}..{hi}")));
    }
    let sp = meanfield_params(&setup.params, setup.initial.lattice)?;
    let solver = SolverConfig { t_final: setup.engine.t_final, ..setup.solver };
    let mut e_f = Vec::with_capacity(sizes.len());
    let mut e_g = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let state0 = setup.initial.state(n)?;
        let spec = RunSpec { state0: state0.clone(), params: setup.params, engine: setup.engine };
        let seed = setup.seed.wrapping_add((i as u64) << 32);
        let trajs = run_realizations(&spec, setup.realizations, seed)?;
        let mean = EnsembleSummary::from_trajectories(&trajs)?.mean_trajectory();
        let mf = integrate(&Field::from_state(&state0), &sp, &solver)?;
        let (ef, eg) = error_vs_meanfield(&mean, &mf, setup.mode)?;
        e_f.push(ef);
        e_g.push(eg);
    }
    let x: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    Ok(ErrorReport {
        engine: setup.engine.kind.name().to_string(),
        mode: setup.mode,
        realizations: setup.realizations,
        sizes: sizes.to_vec(),
        fit_f: fit_loglog(&x, &e_f)?,
        fit_g: fit_loglog(&x, &e_g).ok(),
        e_f,
        e_g,
    })
}
