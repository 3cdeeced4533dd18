use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::{build_stoichiometry, propensities, LatticeState, ModelParams, StoichiometryMatrix};
use crate::rng::{stream, SimRng};
use crate::samplers::draw::{binomial, poisson};
use crate::samplers::trajectory::{Recorder, RunStats, Trajectory};
use crate::samplers::{meta, EngineConfig};

/// Outcome of one trial leap of length `tau` from a given state.
#[derive(Debug, Clone, PartialEq)]
pub enum LeapAttempt {
    /// The leap passed both checks; carries the new state and event count.
    Accepted { state: LatticeState, events: u64 },
    /// Some count would become negative.
    Negative,
    /// Some propensity changed by more than the tolerance.
    TooLarge { max_change: f64 },
}

/// Per-channel unit-rate Poisson clocks in internal time.
///
/// A rejected leap is not thrown away: its counts are stored as known
/// segments of each channel's clock, and a shorter retry draws its counts
/// from them by binomial thinning. Redrawing from scratch would condition
/// the accepted counts on passing the leap check and slow the dynamics.
#[derive(Debug, Clone, Default)]
pub struct ChannelClocks {
    /// Known `(internal length, count)` segments ahead of each clock.
    known: Vec<VecDeque<(f64, u64)>>,
    /// Draws of the current trial, per channel.
    pending: Vec<(f64, u64)>,
}

impl ChannelClocks {
    pub fn new(channels: usize) -> Self {
        Self { known: vec![VecDeque::new(); channels], pending: vec![(0.0, 0); channels] }
    }

    /// Events of channel `j` over the next `len` units of its internal time.
    fn draw(&mut self, rng: &mut SimRng, j: usize, len: f64) -> u64 {
        let queue = &mut self.known[j];
        let mut left = len;
        let mut count = 0;
        while left > 0.0 {
            match queue.front_mut() {
                Some((seg_len, seg_count)) if left >= *seg_len => {
                    left -= *seg_len;
                    count += *seg_count;
                    queue.pop_front();
                }
                Some((seg_len, seg_count)) => {
                    let k = binomial(rng, *seg_count, left / *seg_len);
                    *seg_len -= left;
                    *seg_count -= k;
                    count += k;
                    left = 0.0;
                }
                None => {
                    count += poisson(rng, left);
                    left = 0.0;
                }
            }
        }
        self.pending[j] = (len, count);
        count
    }

    fn accept(&mut self) {
        self.pending.iter_mut().for_each(|p| *p = (0.0, 0));
    }

    fn reject(&mut self) {
        for (queue, p) in self.known.iter_mut().zip(self.pending.iter_mut()) {
            if p.0 > 0.0 {
                queue.push_front(*p);
            }
            *p = (0.0, 0);
        }
    }
}

/// Draws `k_j ~ Poisson(a_j tau)` for every channel, applies them and
/// checks the leap: counts must stay non-negative and every propensity may
/// change by at most `epsilon`. A single-event leap skips the propensity
/// check since no shorter leap can split it. A rejected leap is remembered
/// by `clocks`.
#[allow(clippy::too_many_arguments)]
pub fn leap_attempt(
    rng: &mut SimRng,
    clocks: &mut ChannelClocks,
    v: &StoichiometryMatrix,
    state: &LatticeState,
    a: &[f64],
    p: &ModelParams,
    tau: f64,
    epsilon: f64,
) -> Result<LeapAttempt> {
    let mc = state.n_cells();
    let mut delta = vec![0i64; 3 * mc];
    let mut events = 0;
    for (j, &aj) in a.iter().enumerate() {
        if aj <= 0.0 {
            continue;
        }
        let k = clocks.draw(rng, j, aj * tau);
        if k == 0 {
            continue;
        }
        events += k;
        for e in v.row(j) {
            delta[e.col] += e.delta as i64 * k as i64;
        }
    }
    if events == 0 {
        clocks.accept();
        return Ok(LeapAttempt::Accepted { state: state.clone(), events: 0 });
    }
    let mut next = state.clone();
    {
        let cells = next.cells_mut();
        for (col, d) in delta.iter().enumerate() {
            let c = cells[col % mc].get_mut(col / mc);
            let x = *c as i64 + d;
            if x < 0 {
                clocks.reject();
                return Ok(LeapAttempt::Negative);
            }
            *c = x as u32;
        }
    }
    let mut a_next = vec![0.0; a.len()];
    propensities(&next, p, &mut a_next)?;
    let max_change = a.iter().zip(&a_next).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if max_change > epsilon && events > 1 {
        clocks.reject();
        return Ok(LeapAttempt::TooLarge { max_change });
    }
    clocks.accept();
    Ok(LeapAttempt::Accepted { state: next, events })
}

/// Tau-leaping with leap selection.
///
/// Every leap starts from the trial length `min(2 tau_prev, tau)` and is
/// halved until the leap is accepted by [`leap_attempt`]; each retry
/// refines the rejected draw instead of discarding it. The last leap is
/// shortened to end exactly at `t_final`.
pub fn run_tau_leaping(state0: &LatticeState, p: &ModelParams, cfg: &EngineConfig) -> Result<Trajectory> {
    let p = cfg.effective_params(p)?;
    state0.check()?;
    let lattice = state0.lattice();
    let v = build_stoichiometry(lattice)?;
    let tau_max = p.tau;
    let mut rng = stream(cfg.seed);
    let mut clocks = ChannelClocks::new(lattice.n_channels());
    let mut rec = Recorder::new(lattice, cfg.t_final, cfg.stride(&p), meta(cfg, &p));
    let mut state = state0.clone();
    let mut a = vec![0.0; lattice.n_channels()];
    let mut t = 0.0;
    let mut tau = tau_max;
    let mut stats = RunStats::default();
    while t < cfg.t_final {
        propensities(&state, &p, &mut a)?;
        if a.iter().all(|&x| x <= 0.0) {
            break;
        }
        let mut trial = tau.min(cfg.t_final - t);
        let (next, events) = loop {
            match leap_attempt(&mut rng, &mut clocks, &v, &state, &a, &p, trial, cfg.epsilon_leap)? {
                LeapAttempt::Accepted { state, events } => break (state, events),
                _ => {
                    stats.rejected += 1;
                    trial *= 0.5;
                    if trial < cfg.tau_min {
                        return Err(Error::LeapFailure { t, tau: trial });
                    }
                }
            }
        };
        let t_next = if cfg.t_final - t - trial <= 1e-12 * cfg.t_final { cfg.t_final } else { t + trial };
        rec.record_before(t_next, &state);
        state = next;
        t = t_next;
        stats.steps += 1;
        stats.events += events;
        tau = (2.0 * trial).min(tau_max);
    }
    Ok(rec.finish(&state, stats))
}
