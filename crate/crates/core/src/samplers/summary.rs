use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Lattice;
use crate::samplers::trajectory::{RunStats, Source, Trajectory, TrajectoryMeta};

/// Pointwise mean and standard error over realizations sharing a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub lattice: Lattice,
    pub times: Vec<f64>,
    pub realizations: usize,
    pub mean_f: Vec<f64>,
    pub mean_g: Vec<f64>,
    /// Sample standard deviation divided by the square root of the count.
    pub se_f: Vec<f64>,
    pub se_g: Vec<f64>,
}

impl EnsembleSummary {
    pub fn from_trajectories(trajs: &[Trajectory]) -> Result<Self> {
        let first = trajs.first().ok_or_else(|| Error::InvalidConfig("no trajectories to summarise".into()))?;
        for t in &trajs[1..] {
            first.same_grid(t)?;
        }
        let r = trajs.len();
        let len = first.predator.len();
        let stats = |pick: fn(&Trajectory) -> &Vec<f64>| {
            let mut mean = vec![0.0; len];
            let mut m2 = vec![0.0; len];
            for (k, t) in trajs.iter().enumerate() {
                for (i, &x) in pick(t).iter().enumerate() {
                    let d = x - mean[i];
                    mean[i] += d / (k + 1) as f64;
                    m2[i] += d * (x - mean[i]);
                }
            }
            let se = m2
                .iter()
                .map(|&s| if r > 1 { (s / (r - 1) as f64 / r as f64).sqrt() } else { 0.0 })
                .collect::<Vec<_>>();
            (mean, se)
        };
        let (mean_f, se_f) = stats(|t| &t.predator);
        let (mean_g, se_g) = stats(|t| &t.prey);
        Ok(Self { lattice: first.lattice, times: first.times.clone(), realizations: r, mean_f, mean_g, se_f, se_g })
    }

    pub fn n_cells(&self) -> usize {
        self.lattice.n_cells()
    }

    pub fn mean_trajectory(&self) -> Trajectory {
        Trajectory {
            lattice: self.lattice,
            times: self.times.clone(),
            predator: self.mean_f.clone(),
            prey: self.mean_g.clone(),
            meta: TrajectoryMeta {
                source: Source::Average,
                seed: 0,
                params_hash: String::new(),
                stats: RunStats::default(),
            },
        }
    }
}
