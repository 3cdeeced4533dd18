//! One-step law of the ensemble sampler against exhaustive enumeration.
//!
//! The enumeration below is written from the step rules alone: ordered
//! selection of initiators without replacement, an independent uniform
//! partner per initiator (other in-cell components, or any component of the
//! neighbour), independent coins, and a commit in channel order that cuts
//! counts which would make a species negative.

use std::collections::HashMap;

use predprey::model::{Cell, Lattice, LatticeState, ModelParams};
use predprey::samplers::{run, EngineConfig, EngineKind, EnsembleMode};

type Counts = Vec<u64>;
type Dist = HashMap<Counts, f64>;

const A: u8 = 0;
const B: u8 = 1;
const E: u8 = 2;

fn types(c: Cell) -> Vec<u8> {
    let mut v = vec![A; c.a as usize];
    v.extend(std::iter::repeat_n(B, c.b as usize));
    v.extend(std::iter::repeat_n(E, c.e as usize));
    v
}

fn convolve(d: &Dist, inc: &[(Option<usize>, f64)]) -> Dist {
    let mut out = Dist::new();
    for (k, &pk) in d {
        for &(ch, q) in inc {
            if q == 0.0 {
                continue;
            }
            let mut k2 = k.clone();
            if let Some(c) = ch {
                k2[c] += 1;
            }
            *out.entry(k2).or_default() += pk * q;
        }
    }
    out
}

fn pair_outcomes(x: u8, y: u8, p: &ModelParams) -> Vec<(Option<usize>, f64)> {
    let t = p.tau;
    let set = (x.min(y), x.max(y));
    if set == (B, E) {
        vec![(Some(0), p.b_r * t), (None, 1.0 - p.b_r * t)]
    } else if set == (A, B) {
        vec![(Some(1), p.p1_r * t), (Some(2), p.p2_r * t), (None, 1.0 - (p.p1_r + p.p2_r) * t)]
    } else {
        vec![(None, 1.0)]
    }
}

/// Exchange outcomes as an offset 0..4 within a direction block.
fn exchange_outcomes(own: u8, other: u8, p: &ModelParams) -> Vec<(Option<usize>, f64)> {
    let t = p.tau;
    let (off, q) = match (own, other) {
        (A, E) => (0, p.m1_r * t),
        (E, A) => (1, p.m1_r * t),
        (B, E) => (2, p.m2_r * t),
        (E, B) => (3, p.m2_r * t),
        _ => return vec![(None, 1.0)],
    };
    vec![(Some(off), q), (None, 1.0 - q)]
}

fn death_outcomes(x: u8, p: &ModelParams) -> Vec<(Option<usize>, f64)> {
    let t = p.tau;
    match x {
        A => vec![(Some(3), p.d1_r * t), (None, 1.0 - p.d1_r * t)],
        B => vec![(Some(4), p.d2_r * t), (None, 1.0 - p.d2_r * t)],
        _ => vec![(None, 1.0)],
    }
}

fn ordered_selections(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for s in ordered_selections(n, k - 1) {
        for i in 0..n {
            if !s.contains(&i) {
                let mut t = s.clone();
                t.push(i);
                out.push(t);
            }
        }
    }
    out
}

/// Distribution of the channel counts of one cell (channel index is the
/// event family; `5 + 4k + off` for exchanges in direction `k`).
#[allow(clippy::too_many_arguments)]
fn cell_counts(
    state: &LatticeState,
    l: usize,
    p: &ModelParams,
    q_int: f64,
    q_mig: f64,
) -> Dist {
    let lattice = state.lattice();
    let dirs = lattice.directions();
    let z = dirs.len();
    let nc = state.capacity() as usize;
    let k1 = (q_int * nc as f64 + 1e-9).floor() as usize;
    let m = if z == 0 { 0 } else { (q_mig * nc as f64 + 1e-9).floor() as usize };
    let h = if z == 0 { 0 } else { (q_mig * nc as f64 / z as f64 + 1e-9).floor() as usize };
    let own = types(state.cell(l));
    let fam = lattice.events_per_cell();
    let sels = ordered_selections(nc, k1 + m);
    let w = 1.0 / sels.len() as f64;
    let mut total = Dist::new();
    for sel in sels {
        let mut d: Dist = HashMap::from([(vec![0; fam], 1.0)]);
        for &i in &sel[..k1] {
            let mut inc: Vec<(Option<usize>, f64)> = Vec::new();
            for r in (0..nc).filter(|&r| r != i) {
                for (ch, q) in pair_outcomes(own[i], own[r], p) {
                    inc.push((ch, q / (nc - 1) as f64));
                }
            }
            d = convolve(&d, &inc);
        }
        for (k, &dir) in dirs.iter().enumerate() {
            let Some(nb) = lattice.neighbor(l, dir) else { continue };
            let other = types(state.cell(nb));
            for &i in &sel[k1 + k * h..k1 + (k + 1) * h] {
                let mut inc = Vec::new();
                for &y in &other {
                    for (off, q) in exchange_outcomes(own[i], y, p) {
                        inc.push((off.map(|o| 5 + 4 * k + o), q / nc as f64));
                    }
                }
                d = convolve(&d, &inc);
            }
        }
        for i in (0..nc).filter(|i| !sel.contains(i)) {
            d = convolve(&d, &death_outcomes(own[i], p));
        }
        for (k, v) in d {
            *total.entry(k).or_default() += w * v;
        }
    }
    total
}

/// Change of (A, B, E) in (cell, neighbour) for each family.
fn family_delta(fam: usize) -> ([i64; 3], [i64; 3]) {
    const LOCAL: [[i64; 3]; 5] = [[0, 1, -1], [1, -1, 0], [0, -1, 1], [-1, 0, 1], [0, -1, 1]];
    if fam < 5 {
        return (LOCAL[fam], [0; 3]);
    }
    match (fam - 5) % 4 {
        0 => ([-1, 0, 1], [1, 0, -1]),
        1 => ([1, 0, -1], [-1, 0, 1]),
        2 => ([0, -1, 1], [0, 1, -1]),
        _ => ([0, 1, -1], [0, -1, 1]),
    }
}

fn commit(state: &LatticeState, counts: &[Counts]) -> Vec<[i64; 3]> {
    let lattice = state.lattice();
    let mc = state.n_cells();
    let mut x: Vec<[i64; 3]> = state.cells().iter().map(|c| [c.a as i64, c.b as i64, c.e as i64]).collect();
    let fam_n = lattice.events_per_cell();
    for fam in 0..fam_n {
        for l in 0..mc {
            let k = counts[l][fam] as i64;
            if k == 0 {
                continue;
            }
            let (own, other) = family_delta(fam);
            let nb = if fam >= 5 { lattice.neighbor(l, lattice.directions()[(fam - 5) / 4]) } else { None };
            let mut m = k;
            for s in 0..3 {
                if own[s] < 0 {
                    m = m.min(x[l][s]);
                }
                if let Some(nb) = nb {
                    if other[s] < 0 {
                        m = m.min(x[nb][s]);
                    }
                }
            }
            for s in 0..3 {
                x[l][s] += own[s] * m;
                if let Some(nb) = nb {
                    x[nb][s] += other[s] * m;
                }
            }
        }
    }
    x
}

fn exact_step(state: &LatticeState, p: &ModelParams) -> HashMap<Vec<[i64; 3]>, f64> {
    let (q_int, q_mig) = if state.lattice().is_well_mixed() { (p.mu, 0.0) } else { (p.q1, p.q2) };
    let per_cell: Vec<Dist> = (0..state.n_cells()).map(|l| cell_counts(state, l, p, q_int, q_mig)).collect();
    let mut joint: Vec<(Vec<Counts>, f64)> = vec![(Vec::new(), 1.0)];
    for d in &per_cell {
        let mut next = Vec::new();
        for (ks, w) in &joint {
            for (k, q) in d {
                let mut ks2 = ks.clone();
                ks2.push(k.clone());
                next.push((ks2, w * q));
            }
        }
        joint = next;
    }
    let mut out = HashMap::new();
    for (ks, w) in joint {
        *out.entry(commit(state, &ks)).or_default() += w;
    }
    out
}

fn empirical_step(state: &LatticeState, p: &ModelParams, mode: EnsembleMode, runs: u64) -> HashMap<Vec<[i64; 3]>, f64> {
    let nc = state.capacity() as f64;
    let mut out = HashMap::new();
    for seed in 0..runs {
        let cfg = EngineConfig {
            kind: EngineKind::Ensemble,
            seed,
            t_final: p.tau,
            ensemble_mode: mode,
            ..Default::default()
        };
        let t = run(state, p, &cfg).unwrap();
        let k = t.len() - 1;
        let x: Vec<[i64; 3]> = (0..state.n_cells())
            .map(|l| {
                let a = (t.f(k, l) * nc).round() as i64;
                let b = (t.g(k, l) * nc).round() as i64;
                [a, b, nc as i64 - a - b]
            })
            .collect();
        *out.entry(x).or_default() += 1.0 / runs as f64;
    }
    out
}

fn total_variation(p: &HashMap<Vec<[i64; 3]>, f64>, q: &HashMap<Vec<[i64; 3]>, f64>) -> f64 {
    let keys: std::collections::HashSet<_> = p.keys().chain(q.keys()).collect();
    0.5 * keys.iter().map(|k| (p.get(*k).unwrap_or(&0.0) - q.get(*k).unwrap_or(&0.0)).abs()).sum::<f64>()
}

fn check(state: &LatticeState, p: &ModelParams, runs: u64, tol: f64) {
    let exact = exact_step(state, p);
    let mass: f64 = exact.values().sum();
    assert!((mass - 1.0).abs() < 1e-12, "oracle mass {mass}");
    for mode in [EnsembleMode::Agents, EnsembleMode::Counts] {
        let emp = empirical_step(state, p, mode, runs);
        let tv = total_variation(&exact, &emp);
        assert!(tv < tol, "{mode:?}: total variation {tv} with {} outcomes", exact.len());
    }
}

fn vivid() -> ModelParams {
    ModelParams {
        b_r: 3.0,
        p1_r: 2.5,
        p2_r: 2.0,
        d1_r: 3.0,
        d2_r: 2.0,
        m1_r: 4.0,
        m2_r: 3.0,
        mu: 0.5,
        q1: 0.4,
        q2: 0.4,
        tau: 0.1,
        epsilon: 1.0,
    }
}

#[test]
fn well_mixed_prey_only_step() {
    let s = LatticeState::well_mixed(4, 0, 2).unwrap();
    let p = vivid();
    let exact = exact_step(&s, &p);
    // only prey birth and prey death can change the state
    for x in exact.keys() {
        assert_eq!(x[0][0], 0);
    }
    check(&s, &p, 200_000, 0.01);
}

#[test]
fn well_mixed_mixed_step() {
    let s = LatticeState::well_mixed(5, 2, 2).unwrap();
    check(&s, &vivid(), 200_000, 0.012);
}

#[test]
fn clamping_case() {
    // one prey, two predators: both predators may pick the same prey
    let p = ModelParams { mu: 1.0, ..vivid() };
    let s = LatticeState::well_mixed(4, 2, 1).unwrap();
    check(&s, &p, 200_000, 0.01);
}

#[test]
fn two_cell_line_step() {
    let lat = Lattice::Line { cells: 2 };
    let s = LatticeState::new(lat, 5, vec![Cell::new(1, 3, 1), Cell::new(2, 0, 3)]).unwrap();
    check(&s, &vivid(), 200_000, 0.015);
}

#[test]
fn two_cell_grid_step() {
    let lat = Lattice::Grid { nx: 2, ny: 1 };
    let p = ModelParams { q1: 0.25, q2: 0.5, ..vivid() };
    let s = LatticeState::new(lat, 8, vec![Cell::new(1, 4, 3), Cell::new(2, 1, 5)]).unwrap();
    check(&s, &p, 100_000, 0.02);
}
