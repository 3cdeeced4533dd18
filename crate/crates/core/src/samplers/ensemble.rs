use crate::error::{Error, Result};
use crate::model::{build_stoichiometry, fractions, LatticeState, ModelParams, StoichiometryMatrix};
use crate::rng::{index, stream, unit, SimRng};
use crate::samplers::classic::{death_event, exchange_event, pair_event};
use crate::samplers::draw::{binomial, multinomial, split_group};
use crate::samplers::trajectory::{RunStats, Trajectory};
use crate::samplers::{meta, EngineConfig, EnsembleMode};

/// Sizes of the groups a cell is split into at every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Groups {
    interact: usize,
    per_direction: usize,
    /// Migration initiators, including those left over by the split into
    /// directions (they idle).
    migrate: usize,
}

impl Groups {
    fn new(nc: u32, q_int: f64, q_mig: f64, z: usize) -> Self {
        let n = nc as f64;
        let floor = |x: f64| (x + 1e-9).floor() as usize;
        let interact = floor(q_int * n);
        let migrate = if z == 0 { 0 } else { floor(q_mig * n) };
        let per_direction = if z == 0 { 0 } else { floor(q_mig * n / z as f64) };
        Self { interact, per_direction, migrate: migrate.min(nc as usize - interact) }
    }
}

/// Applies batched event counts to the state in channel order.
///
/// A channel whose count would drive a species negative is cut to the
/// largest feasible count. Returns `(applied, dropped)` event totals.
pub fn commit_counts(v: &StoichiometryMatrix, state: &mut LatticeState, counts: &[u64]) -> (u64, u64) {
    let mc = state.n_cells();
    let mut applied = 0;
    let mut dropped = 0;
    for (row, &k) in counts.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let mut m = k;
        for e in v.row(row) {
            if e.delta < 0 {
                m = m.min(state.column(e.col) as u64 / (-e.delta) as u64);
            }
        }
        let cells = state.cells_mut();
        for e in v.row(row) {
            let c = cells[e.col % mc].get_mut(e.col / mc);
            *c = (*c as i64 + e.delta as i64 * m as i64) as u32;
        }
        applied += m;
        dropped += k - m;
    }
    (applied, dropped)
}

struct Agents {
    cells: Vec<Vec<u8>>,
}

impl Agents {
    fn refresh(&mut self, state: &LatticeState) {
        for (v, c) in self.cells.iter_mut().zip(state.cells()) {
            v.clear();
            v.resize(c.a as usize, 0);
            v.resize((c.a + c.b) as usize, 1);
            v.resize((c.a + c.b + c.e) as usize, 2);
        }
    }
}

struct Stepper<'a> {
    p: &'a ModelParams,
    groups: Groups,
    mode: EnsembleMode,
    agents: Agents,
    counts: Vec<u64>,
}

impl Stepper<'_> {
    /// Event counts of one step from the step-start state.
    fn draw(&mut self, rng: &mut SimRng, state: &LatticeState) {
        self.counts.iter_mut().for_each(|k| *k = 0);
        match self.mode {
            EnsembleMode::Agents => self.draw_agents(rng, state),
            EnsembleMode::Counts => self.draw_counts(rng, state),
        }
    }

    fn draw_agents(&mut self, rng: &mut SimRng, state: &LatticeState) {
        let lattice = state.lattice();
        let mc = state.n_cells();
        let nc = state.capacity() as usize;
        let g = self.groups;
        let p = self.p;
        self.agents.refresh(state);
        // uniform selection without replacement: partial Fisher-Yates
        for v in self.agents.cells.iter_mut() {
            for i in 0..g.interact + g.migrate {
                let j = i + index(rng, nc - i);
                v.swap(i, j);
            }
        }
        let cells = &self.agents.cells;
        let counts = &mut self.counts;
        for (l, s) in cells.iter().enumerate() {
            for i in 0..g.interact {
                let mut r = index(rng, nc - 1);
                if r >= i {
                    r += 1;
                }
                if let Some(j) = pair_event(s[i], s[r], unit(rng), p) {
                    counts[j * mc + l] += 1;
                }
            }
            for (k, &dir) in lattice.directions().iter().enumerate() {
                let Some(nb) = lattice.neighbor(l, dir) else { continue };
                let start = g.interact + k * g.per_direction;
                for &own in &s[start..start + g.per_direction] {
                    let other = cells[nb][index(rng, nc)];
                    if let Some(e) = exchange_event(own, other, unit(rng), p) {
                        counts[(5 + 4 * k + e) * mc + l] += 1;
                    }
                }
            }
            for &x in &s[g.interact + g.migrate..] {
                if let Some(j) = death_event(x, unit(rng), p) {
                    counts[j * mc + l] += 1;
                }
            }
        }
    }

    fn draw_counts(&mut self, rng: &mut SimRng, state: &LatticeState) {
        let lattice = state.lattice();
        let mc = state.n_cells();
        let nc = state.capacity() as f64;
        let g = self.groups;
        let p = self.p;
        let tau = p.tau;
        let counts = &mut self.counts;
        for l in 0..mc {
            let c = state.cell(l);
            let mut pool = [c.a as u64, c.b as u64, c.e as u64];
            let [ia, ib, ie] = split_group(rng, &mut pool, g.interact as u64);
            let (pa, pb, pe) = (c.a as f64 / (nc - 1.0), c.b as f64 / (nc - 1.0), c.e as f64 / (nc - 1.0));
            let [x1, x2] = multinomial(rng, ia, [pb * p.p1_r * tau, pb * p.p2_r * tau]);
            let [y1, y2, y0] = multinomial(rng, ib, [pa * p.p1_r * tau, pa * p.p2_r * tau, pe * p.b_r * tau]);
            let z0 = binomial(rng, ie, pb * p.b_r * tau);
            counts[l] += y0 + z0;
            counts[mc + l] += x1 + y1;
            counts[2 * mc + l] += x2 + y2;
            for (k, &dir) in lattice.directions().iter().enumerate() {
                let [ha, hb, he] = split_group(rng, &mut pool, g.per_direction as u64);
                let Some(nb) = lattice.neighbor(l, dir) else { continue };
                let o = state.cell(nb);
                let (oa, ob, oe) = (o.a as f64 / nc, o.b as f64 / nc, o.e as f64 / nc);
                let base = (5 + 4 * k) * mc + l;
                counts[base] += binomial(rng, ha, oe * p.m1_r * tau);
                counts[base + 2 * mc] += binomial(rng, hb, oe * p.m2_r * tau);
                let [ia, ib] = multinomial(rng, he, [oa * p.m1_r * tau, ob * p.m2_r * tau]);
                counts[base + mc] += ia;
                counts[base + 3 * mc] += ib;
            }
            let idle = g.migrate - lattice.directions().len() * g.per_direction;
            split_group(rng, &mut pool, idle as u64);
            counts[3 * mc + l] += binomial(rng, pool[0], p.d1_r * tau);
            counts[4 * mc + l] += binomial(rng, pool[1], p.d2_r * tau);
        }
    }
}

fn run_ensemble(state0: &LatticeState, p: &ModelParams, cfg: &EngineConfig) -> Result<Trajectory> {
    let p = cfg.effective_params(p)?;
    state0.check()?;
    let nc = state0.capacity();
    if nc < 2 {
        return Err(Error::DegenerateSample(nc));
    }
    let lattice = state0.lattice();
    let (q_int, q_mig) = fractions(state0, &p);
    let groups = Groups::new(nc, q_int, q_mig, lattice.directions().len());
    if groups.interact < 2 {
        return Err(Error::InvalidConfig(format!(
            "interaction fraction times capacity must be at least 2, got {}",
            q_int * nc as f64
        )));
    }
    let v = build_stoichiometry(lattice)?;
    let stride = cfg.stride_steps(&p)?;
    let n_steps = cfg.n_steps(&p);
    let mut stepper = Stepper {
        p: &p,
        groups,
        mode: cfg.ensemble_mode,
        agents: Agents { cells: vec![Vec::with_capacity(nc as usize); state0.n_cells()] },
        counts: vec![0; lattice.n_channels()],
    };
    let mut rng = stream(cfg.seed);
    let mut state = state0.clone();
    let mut traj = Trajectory::empty(lattice, meta(cfg, &p));
    let mut stats = RunStats::default();
    traj.push_state(0.0, &state);
    for s in 1..=n_steps {
        stepper.draw(&mut rng, &state);
        let (applied, dropped) = commit_counts(&v, &mut state, &stepper.counts);
        stats.steps += 1;
        stats.events += applied;
        stats.clamped += dropped;
        if s % stride == 0 {
            traj.push_state(s as f64 * p.tau, &state);
        }
    }
    traj.meta.stats = stats;
    Ok(traj)
}

/// Ensemble sampler for the well-mixed model.
///
/// Every step of length `tau`, `floor(mu N)` components are drawn without
/// replacement as interaction initiators; each meets a partner drawn
/// uniformly among the other `N - 1` components and the pair fires birth or
/// predation with probabilities `b_r tau`, `p1_r tau`, `p2_r tau`. The other
/// `N - floor(mu N)` components die with probabilities `d1_r tau`,
/// `d2_r tau`. All outcomes are decided on the step-start state and
/// committed together at the end of the step.
pub fn run_ensemble_homogeneous(state0: &LatticeState, p: &ModelParams, cfg: &EngineConfig) -> Result<Trajectory> {
    if !state0.lattice().is_well_mixed() {
        return Err(Error::InvalidDimension("well-mixed ensemble sampler needs a well-mixed state".into()));
    }
    run_ensemble(state0, p, cfg)
}

/// Ensemble sampler for a 1-D or 2-D lattice.
///
/// In every cell and step, `floor(q1 Nc)` components interact in-cell as in
/// the well-mixed sampler. `floor(q2 Nc / z)` components per neighbour
/// direction (`z` = 2 in 1-D, 4 in 2-D) meet a partner drawn uniformly from
/// that neighbour's `Nc` components and exchange with it if exactly one of
/// the two is empty, with probability `m1_r tau` (predator) or `m2_r tau`
/// (prey). Quotas facing the lattice boundary idle, as do the leftover
/// components of the directional split. The remaining components die as in
/// the well-mixed sampler.
pub fn run_ensemble_heterogeneous(state0: &LatticeState, p: &ModelParams, cfg: &EngineConfig) -> Result<Trajectory> {
    if state0.lattice().is_well_mixed() {
        return Err(Error::InvalidDimension("lattice ensemble sampler needs a lattice state".into()));
    }
    run_ensemble(state0, p, cfg)
}
