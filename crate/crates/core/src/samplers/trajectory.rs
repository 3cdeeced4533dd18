use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Lattice, LatticeState, ModelParams};

/// What produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Direct,
    ClassicMc,
    TauLeaping,
    Ensemble,
    LangevinLinear,
    LangevinFull,
    MeanField,
    /// Pointwise mean of several realizations.
    Average,
}

/// Work counters of one run. They depend only on the inputs and the seed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Fixed steps, accepted leaps or fired events, depending on the engine.
    pub steps: u64,
    /// Individual events applied to the state.
    pub events: u64,
    /// Rejected leap attempts (tau-leaping) .
    pub rejected: u64,
    /// Events dropped at commit time because a count would go negative
    /// (fixed-step engines), or clamped density values (Langevin).
    pub clamped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub source: Source,
    pub seed: u64,
    pub params_hash: String,
    pub stats: RunStats,
}

/// Densities `(f, g)` of every cell at increasing times.
///
/// Values are stored time-major: index `k * n_cells + cell`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub lattice: Lattice,
    pub times: Vec<f64>,
    pub predator: Vec<f64>,
    pub prey: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn empty(lattice: Lattice, meta: TrajectoryMeta) -> Self {
        Self { lattice, times: Vec::new(), predator: Vec::new(), prey: Vec::new(), meta }
    }

    pub fn n_cells(&self) -> usize {
        self.lattice.n_cells()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, f: &[f64], g: &[f64]) {
        self.times.push(t);
        self.predator.extend_from_slice(f);
        self.prey.extend_from_slice(g);
    }

    pub fn push_state(&mut self, t: f64, state: &LatticeState) {
        self.times.push(t);
        let n = state.capacity() as f64;
        for c in state.cells() {
            self.predator.push(c.a as f64 / n);
            self.prey.push(c.b as f64 / n);
        }
    }

    pub fn f(&self, k: usize, cell: usize) -> f64 {
        self.predator[k * self.n_cells() + cell]
    }

    pub fn g(&self, k: usize, cell: usize) -> f64 {
        self.prey[k * self.n_cells() + cell]
    }

    pub fn predator_series(&self, cell: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.f(k, cell)).collect()
    }

    pub fn prey_series(&self, cell: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.g(k, cell)).collect()
    }

    /// Time step of a uniform grid, or `None` if the grid is not uniform.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let dt = (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64;
        let tol = 1e-9 * dt.abs().max(1.0);
        self.times
            .iter()
            .enumerate()
            .all(|(k, &t)| (t - (self.times[0] + k as f64 * dt)).abs() <= tol)
            .then_some(dt)
    }

    /// Checks increasing times and density bounds (tolerance `tol`).
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidState("trajectory times are not strictly increasing".into()));
        }
        for (f, g) in self.predator.iter().zip(&self.prey) {
            if *f < -tol || *g < -tol || f + g > 1.0 + tol {
                return Err(Error::InvalidState(format!("densities out of range: f = {f}, g = {g}")));
            }
        }
        Ok(())
    }

    /// Checks that two trajectories share the same time grid and lattice.
    pub fn same_grid(&self, other: &Trajectory) -> Result<()> {
        if self.lattice.n_cells() != other.lattice.n_cells() || self.times.len() != other.times.len() {
            return Err(Error::GridMismatch(format!(
                "{} x {} samples vs {} x {}",
                self.len(),
                self.n_cells(),
                other.len(),
                other.n_cells()
            )));
        }
        for (a, b) in self.times.iter().zip(&other.times) {
            if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                return Err(Error::GridMismatch(format!("time {a} vs {b}")));
            }
        }
        Ok(())
    }
}

/// 64-bit FNV-1a digest of the JSON form of the parameters.
pub fn params_hash(p: &ModelParams) -> String {
    let json = serde_json::to_string(p).expect("parameters serialize");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in json.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

/// Recording grid `0, stride, 2 stride, ...` up to `t_final`.
pub(crate) fn record_grid(t_final: f64, stride: f64) -> Vec<f64> {
    let n = (t_final / stride + 1e-9).floor() as usize;
    (0..=n).map(|k| k as f64 * stride).collect()
}

/// Piecewise-constant sampling of an event-driven path onto a fixed grid.
pub(crate) struct Recorder {
    grid: Vec<f64>,
    next: usize,
    pub traj: Trajectory,
}

impl Recorder {
    pub fn new(lattice: Lattice, t_final: f64, stride: f64, meta: TrajectoryMeta) -> Self {
        Self { grid: record_grid(t_final, stride), next: 0, traj: Trajectory::empty(lattice, meta) }
    }

    /// Records `state` at every pending grid time strictly before `t`.
    pub fn record_before(&mut self, t: f64, state: &LatticeState) {
        while self.next < self.grid.len() && self.grid[self.next] < t {
            self.traj.push_state(self.grid[self.next], state);
            self.next += 1;
        }
    }

    /// Records `state` at all remaining grid times.
    pub fn finish(mut self, state: &LatticeState, stats: RunStats) -> Trajectory {
        self.record_before(f64::INFINITY, state);
        self.traj.meta.stats = stats;
        self.traj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> TrajectoryMeta {
        TrajectoryMeta { source: Source::Direct, seed: 0, params_hash: String::new(), stats: RunStats::default() }
    }

    #[test]
    fn grid_includes_final_time() {
        let g = record_grid(1.0, 0.1);
        assert_eq!(g.len(), 11);
        assert!((g[10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recorder_is_piecewise_constant() {
        let s0 = LatticeState::well_mixed(4, 0, 2).unwrap();
        let s1 = LatticeState::well_mixed(4, 0, 3).unwrap();
        let mut r = Recorder::new(Lattice::WellMixed, 1.0, 0.5, meta());
        r.record_before(0.7, &s0);
        let t = r.finish(&s1, RunStats::default());
        assert_eq!(t.prey, vec![0.5, 0.5, 0.75]);
        assert_eq!(t.uniform_step(), Some(0.5));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let p = ModelParams::default();
        assert_eq!(params_hash(&p), params_hash(&p));
        let q = ModelParams { b_r: 0.2, ..p };
        assert_ne!(params_hash(&p), params_hash(&q));
    }
}
