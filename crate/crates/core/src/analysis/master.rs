use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_stoichiometry, propensities, Cell, LatticeState, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterOptions {
    /// Largest state space that will be enumerated.
    pub max_states: usize,
    /// Upper bound on the RK4 step; the step is further limited by the
    /// largest exit rate.
    pub max_dt: f64,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self { max_states: 20_000, max_dt: 0.01 }
    }
}

/// Probability of every state at `time`. States are enumerated
/// lexicographically in the per-cell `(A, B)` pairs, cell 0 first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterSolution {
    pub time: f64,
    pub states: Vec<LatticeState>,
    pub probs: Vec<f64>,
}

impl MasterSolution {
    pub fn index_of(&self, state: &LatticeState) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }
}

fn enumerate(template: &LatticeState) -> Vec<LatticeState> {
    let nc = template.capacity();
    let per_cell: Vec<Cell> = (0..=nc).flat_map(|a| (0..=nc - a).map(move |b| Cell::new(a, b, nc - a - b))).collect();
    let mc = template.n_cells();
    let mut out = Vec::new();
    let mut idx = vec![0usize; mc];
    loop {
        let cells = idx.iter().map(|&i| per_cell[i]).collect();
        out.push(LatticeState::new(template.lattice(), nc, cells).expect("enumerated state is valid"));
        let mut c = mc;
        loop {
            if c == 0 {
                return out;
            }
            c -= 1;
            idx[c] += 1;
            if idx[c] < per_cell.len() {
                break;
            }
            idx[c] = 0;
        }
    }
}

/// Solves the forward equation `dP/dt = Q^T P` of the jump process whose
/// event propensities are those of the exact sampler, from a point mass
/// on `state0`.
pub fn master_equation_exact(state0: &LatticeState, p: &ModelParams, t_final: f64, opts: &MasterOptions) -> Result<MasterSolution> {
    state0.check()?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidConfig(format!("t_final must be non-negative, got {t_final}")));
    }
    let per_cell = (state0.capacity() as usize + 1) * (state0.capacity() as usize + 2) / 2;
    let size = (0..state0.n_cells()).try_fold(1usize, |acc, _| acc.checked_mul(per_cell)).unwrap_or(usize::MAX);
    if size > opts.max_states {
        return Err(Error::StateSpaceTooLarge { states: size, cap: opts.max_states });
    }
    let states = enumerate(state0);
    let index: HashMap<&LatticeState, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let v = build_stoichiometry(state0.lattice())?;
    let mut a = vec![0.0; state0.lattice().n_channels()];
    // transitions as (from, to, rate)
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut exit = vec![0.0; states.len()];
    for (i, s) in states.iter().enumerate() {
        propensities(s, p, &mut a)?;
        for (j, &aj) in a.iter().enumerate() {
            if aj <= 0.0 {
                continue;
            }
            let mut t = s.clone();
            v.apply_row(&mut t, j)?;
            let k = index[&t];
            edges.push((i, k, aj));
            exit[i] += aj;
        }
    }
    let mut probs = vec![0.0; states.len()];
    probs[index[state0]] = 1.0;
    let max_exit = exit.iter().copied().fold(0.0, f64::max);
    let h_cap = if max_exit > 0.0 { opts.max_dt.min(1.0 / max_exit) } else { opts.max_dt };
    let n_steps = (t_final / h_cap).ceil() as usize;
    if n_steps > 0 {
        let h = t_final / n_steps as f64;
        let deriv = |x: &[f64], out: &mut [f64]| {
            for (o, (xi, ei)) in out.iter_mut().zip(x.iter().zip(&exit)) {
                *o = -xi * ei;
            }
            for &(i, k, r) in &edges {
                out[k] += r * x[i];
            }
        };
        let n = states.len();
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for _ in 0..n_steps {
            deriv(&probs, &mut k1);
            for i in 0..n {
                tmp[i] = probs[i] + 0.5 * h * k1[i];
            }
            deriv(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = probs[i] + 0.5 * h * k2[i];
            }
            deriv(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = probs[i] + h * k3[i];
            }
            deriv(&tmp, &mut k4);
            for i in 0..n {
                probs[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 || probs.iter().any(|&x| x < -1e-12) {
        return Err(Error::SolverInstability(format!("probabilities lost normalisation: sum = {total}")));
    }
    Ok(MasterSolution { time: t_final, states, probs })
}

/// Half the L1 distance between two probability vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidDimension(format!("{} vs {} entries", p.len(), q.len())));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
