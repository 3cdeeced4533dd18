use crate::error::Result;
use crate::model::{build_stoichiometry, propensities, LatticeState, ModelParams};
use crate::rng::{open01, stream};
use crate::samplers::trajectory::{Recorder, RunStats, Trajectory};
use crate::samplers::{meta, EngineConfig};

/// Index of the next event: the smallest `j` with `a_0 + ... + a_j >= r1 * a0`
/// (0-based). Channels with zero propensity are never selected. `None` when
/// all propensities vanish.
pub fn select_event(a: &[f64], r1: f64) -> Option<usize> {
    let a0: f64 = a.iter().sum();
    if a0 <= 0.0 {
        return None;
    }
    let target = r1 * a0;
    let mut acc = 0.0;
    let mut last = None;
    for (j, &aj) in a.iter().enumerate() {
        if aj <= 0.0 {
            continue;
        }
        acc += aj;
        last = Some(j);
        if acc >= target {
            return last;
        }
    }
    last
}

/// Waiting time `ln(1 / r2) / a0` to the next event.
pub fn waiting_time(a0: f64, r2: f64) -> f64 {
    (1.0 / r2).ln() / a0
}

/// Exact event-by-event simulation.
///
/// Propensities are `Nc` times the per-component transition rates, so the
/// simulated time matches the mean-field time. The trajectory is sampled
/// piecewise-constantly on the recording grid; once every propensity is
/// zero the state is held until `t_final`.
pub fn run_direct(state0: &LatticeState, p: &ModelParams, cfg: &EngineConfig) -> Result<Trajectory> {
    let p = cfg.effective_params(p)?;
    state0.check()?;
    let lattice = state0.lattice();
    let v = build_stoichiometry(lattice)?;
    let mut rng = stream(cfg.seed);
    let mut rec = Recorder::new(lattice, cfg.t_final, cfg.stride(&p), meta(cfg, &p));
    let mut state = state0.clone();
    let mut a = vec![0.0; lattice.n_channels()];
    let mut t = 0.0;
    let mut stats = RunStats::default();
    loop {
        propensities(&state, &p, &mut a)?;
        let a0: f64 = a.iter().sum();
        if a0 <= 0.0 {
            break;
        }
        let r1 = open01(&mut rng);
        let r2 = open01(&mut rng);
        let t_next = t + waiting_time(a0, r2);
        if t_next > cfg.t_final {
            break;
        }
        let j = select_event(&a, r1).expect("positive total propensity");
        rec.record_before(t_next, &state);
        v.apply_row(&mut state, j)?;
        t = t_next;
        stats.steps += 1;
        stats.events += 1;
    }
    Ok(rec.finish(&state, stats))
}
