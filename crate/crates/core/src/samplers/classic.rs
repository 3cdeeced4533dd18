use crate::error::{Error, Result};
use crate::model::{build_stoichiometry, fractions, LatticeState, ModelParams, StoichiometryMatrix};
use crate::rng::{index, stream, unit, SimRng};
use crate::samplers::trajectory::{RunStats, Trajectory};
use crate::samplers::{meta, EngineConfig};

const PRED: u8 = 0;
const PREY: u8 = 1;
const EMPTY: u8 = 2;

/// Explicit component arrays of each cell, refreshed from the counts.
struct Sample {
    cells: Vec<Vec<u8>>,
}

impl Sample {
    fn new(state: &LatticeState) -> Self {
        let mut s = Self { cells: vec![Vec::with_capacity(state.capacity() as usize); state.n_cells()] };
        for l in 0..state.n_cells() {
            s.update(state, l);
        }
        s
    }

    fn update(&mut self, state: &LatticeState, l: usize) {
        let c = state.cell(l);
        let v = &mut self.cells[l];
        v.clear();
        v.resize(c.a as usize, PRED);
        v.resize((c.a + c.b) as usize, PREY);
        v.resize((c.a + c.b + c.e) as usize, EMPTY);
    }

    fn pick(&self, rng: &mut SimRng, l: usize) -> u8 {
        let v = &self.cells[l];
        v[index(rng, v.len())]
    }

    /// Two distinct components of cell `l`.
    fn pick_pair(&self, rng: &mut SimRng, l: usize) -> (u8, u8) {
        let v = &self.cells[l];
        let i = index(rng, v.len());
        let mut j = index(rng, v.len() - 1);
        if j >= i {
            j += 1;
        }
        (v[i], v[j])
    }
}

/// Event family fired by an in-cell pair, if any.
pub(crate) fn pair_event(x: u8, y: u8, u: f64, p: &ModelParams) -> Option<usize> {
    let tau = p.tau;
    match (x.min(y), x.max(y)) {
        (PREY, EMPTY) if u < p.b_r * tau => Some(0),
        (PRED, PREY) if u < p.p1_r * tau => Some(1),
        (PRED, PREY) if u < (p.p1_r + p.p2_r) * tau => Some(2),
        _ => None,
    }
}

/// Exchange event (offset within a direction block) for an initiator in the
/// cell and a partner in the neighbour, if any.
pub(crate) fn exchange_event(own: u8, other: u8, u: f64, p: &ModelParams) -> Option<usize> {
    let tau = p.tau;
    match (own, other) {
        (PRED, EMPTY) if u < p.m1_r * tau => Some(0),
        (EMPTY, PRED) if u < p.m1_r * tau => Some(1),
        (PREY, EMPTY) if u < p.m2_r * tau => Some(2),
        (EMPTY, PREY) if u < p.m2_r * tau => Some(3),
        _ => None,
    }
}

pub(crate) fn death_event(x: u8, u: f64, p: &ModelParams) -> Option<usize> {
    match x {
        PRED if u < p.d1_r * p.tau => Some(3),
        PREY if u < p.d2_r * p.tau => Some(4),
        _ => None,
    }
}

fn apply_if_feasible(v: &StoichiometryMatrix, state: &mut LatticeState, row: usize, stats: &mut RunStats) {
    match v.apply_row(state, row) {
        Ok(()) => stats.events += 1,
        Err(_) => stats.clamped += 1,
    }
}

/// Classic Monte Carlo with micro-steps of `tau / N`, `N` being the total
/// number of components.
///
/// Each micro-step picks a cell uniformly and, with independent coins,
/// (i) with probability `mu` (`q1` on a lattice) lets two distinct
/// components of the cell interact, (ii) on a lattice with probability `q2`
/// lets one component meet a random component of a random neighbour, and
/// (iii) with probability `1 - mu` (`1 - q1 - q2`) exposes one more component
/// to death. Decisions use the sample at the start of the micro-step, which
/// is then rebuilt from the updated counts.
pub fn run_classic_mc(state0: &LatticeState, p: &ModelParams, cfg: &EngineConfig) -> Result<Trajectory> {
    let p = cfg.effective_params(p)?;
    state0.check()?;
    let nc = state0.capacity();
    if nc < 2 {
        return Err(Error::DegenerateSample(nc));
    }
    let lattice = state0.lattice();
    let v = build_stoichiometry(lattice)?;
    let mc = state0.n_cells();
    let (q_int, q_mig) = fractions(state0, &p);
    let q_death = (1.0 - q_int - q_mig).max(0.0);
    let dirs = lattice.directions();
    let n_total = nc as u64 * mc as u64;
    let micro_per_record = cfg.stride_steps(&p)? * n_total;
    let n_micro = (cfg.t_final * n_total as f64 / p.tau - 1e-9).ceil() as u64;
    let dt = p.tau / n_total as f64;

    let mut rng = stream(cfg.seed);
    let mut state = state0.clone();
    let mut sample = Sample::new(&state);
    let mut traj = Trajectory::empty(lattice, meta(cfg, &p));
    let mut stats = RunStats::default();
    let mut rows: Vec<usize> = Vec::with_capacity(3);
    for step in 0..=n_micro {
        if step % micro_per_record == 0 {
            traj.push_state(step as f64 * dt, &state);
        }
        if step == n_micro {
            break;
        }
        stats.steps += 1;
        let l = if mc == 1 { 0 } else { index(&mut rng, mc) };
        rows.clear();
        if unit(&mut rng) < q_int {
            let (x, y) = sample.pick_pair(&mut rng, l);
            if let Some(j) = pair_event(x, y, unit(&mut rng), &p) {
                rows.push(j * mc + l);
            }
        }
        let mut touched = None;
        if !dirs.is_empty() && unit(&mut rng) < q_mig {
            let k = index(&mut rng, dirs.len());
            if let Some(nb) = lattice.neighbor(l, dirs[k]) {
                let own = sample.pick(&mut rng, l);
                let other = sample.pick(&mut rng, nb);
                if let Some(i) = exchange_event(own, other, unit(&mut rng), &p) {
                    rows.push((5 + 4 * k + i) * mc + l);
                    touched = Some(nb);
                }
            }
        }
        if unit(&mut rng) < q_death {
            let x = sample.pick(&mut rng, l);
            if let Some(j) = death_event(x, unit(&mut rng), &p) {
                rows.push(j * mc + l);
            }
        }
        for &row in &rows {
            apply_if_feasible(&v, &mut state, row, &mut stats);
        }
        sample.update(&state, l);
        if let Some(nb) = touched {
            sample.update(&state, nb);
        }
    }
    traj.meta.stats = stats;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::EngineKind;

    #[test]
    fn pair_rules() {
        let p = ModelParams::homogeneous_reference();
        assert_eq!(pair_event(PREY, EMPTY, 0.0, &p), Some(0));
        assert_eq!(pair_event(EMPTY, PREY, 0.009, &p), Some(0));
        assert_eq!(pair_event(EMPTY, PREY, 0.011, &p), None);
        assert_eq!(pair_event(PREY, PRED, 0.02, &p), Some(1));
        assert_eq!(pair_event(PREY, PRED, 0.028, &p), Some(2));
        assert_eq!(pair_event(PRED, PRED, 0.0, &p), None);
    }

    #[test]
    fn empty_component_never_dies() {
        let p = ModelParams::homogeneous_reference();
        assert_eq!(death_event(EMPTY, 0.0, &p), None);
        assert_eq!(death_event(PRED, 0.0, &p), Some(3));
    }

    #[test]
    fn step_count_and_conservation() {
        let s = LatticeState::well_mixed(40, 10, 20).unwrap();
        let cfg = EngineConfig { kind: EngineKind::ClassicMc, t_final: 2.0, record_stride: Some(0.5), ..Default::default() };
        let t = run_classic_mc(&s, &ModelParams::default(), &cfg).unwrap();
        assert_eq!(t.meta.stats.steps, 20 * 40);
        assert_eq!(t.len(), 5);
        t.check(0.0).unwrap();
    }
}
