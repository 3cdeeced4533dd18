use crate::error::{Error, Result};
use crate::model::lattice::LatticeState;
use crate::model::params::ModelParams;

/// Interaction and migration fractions that drive a state: `(mu, 0)` for a
/// well-mixed state, `(q1, q2)` on a lattice.
pub(crate) fn fractions(state: &LatticeState, p: &ModelParams) -> (f64, f64) {
    if state.lattice().is_well_mixed() {
        (p.mu, 0.0)
    } else {
        (p.q1, p.q2)
    }
}

/// Per-component transition rates in the channel layout `j * Mc + l`.
///
/// `migration_scale` multiplies the exchange rates; the rate functions use 1
/// and the event-driven samplers use `1 / z` (see [`propensities`]).
fn rates_into(state: &LatticeState, p: &ModelParams, q_int: f64, q_mig: f64, migration_scale: f64, out: &mut [f64]) -> Result<()> {
    let n = state.capacity();
    if n < 2 {
        return Err(Error::DegenerateSample(n));
    }
    let lattice = state.lattice();
    let mc = state.n_cells();
    debug_assert_eq!(out.len(), lattice.n_channels());
    let nf = n as f64;
    let pair = 1.0 / (nf * (nf - 1.0));
    let idle = (1.0 - q_int - q_mig).max(0.0);
    let cells = state.cells();
    let mig = q_mig * migration_scale / (nf * nf);
    for (l, c) in cells.iter().enumerate() {
        let (a, b, e) = (c.a as f64, c.b as f64, c.e as f64);
        out[l] = 2.0 * p.b_r * q_int * b * e * pair;
        out[mc + l] = 2.0 * p.p1_r * q_int * a * b * pair;
        out[2 * mc + l] = 2.0 * p.p2_r * q_int * a * b * pair;
        out[3 * mc + l] = p.d1_r * idle * a / nf;
        out[4 * mc + l] = p.d2_r * idle * b / nf;
        for (k, &dir) in lattice.directions().iter().enumerate() {
            let base = (5 + 4 * k) * mc + l;
            match lattice.neighbor(l, dir) {
                Some(nb) => {
                    let o = cells[nb];
                    let (na, nb_, ne) = (o.a as f64, o.b as f64, o.e as f64);
                    out[base] = p.m1_r * mig * a * ne;
                    out[base + mc] = p.m1_r * mig * na * e;
                    out[base + 2 * mc] = p.m2_r * mig * b * ne;
                    out[base + 3 * mc] = p.m2_r * mig * nb_ * e;
                }
                None => {
                    for i in 0..4 {
                        out[base + i * mc] = 0.0;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Transition rates of the well-mixed model (length 5), driven by `mu`.
pub fn transition_rates_homogeneous(state: &LatticeState, p: &ModelParams) -> Result<Vec<f64>> {
    if state.n_cells() != 1 {
        return Err(Error::InvalidDimension(format!(
            "well-mixed rates need a single cell, got {}",
            state.n_cells()
        )));
    }
    let single = LatticeState::new(crate::model::Lattice::WellMixed, state.capacity(), state.cells().to_vec())?;
    let mut out = vec![0.0; 5];
    rates_into(&single, p, p.mu, 0.0, 1.0, &mut out)?;
    Ok(out)
}

/// Transition rates of the lattice model, driven by `q1`, `q2`, in the
/// layout `j * Mc + l`. Exchange rates with cells outside the lattice are 0.
pub fn transition_rates_heterogeneous(state: &LatticeState, p: &ModelParams) -> Result<Vec<f64>> {
    let mut out = vec![0.0; state.lattice().n_channels()];
    rates_into(state, p, p.q1, p.q2, 1.0, &mut out)?;
    Ok(out)
}

/// Event propensities used by the event-driven samplers, in the same layout.
///
/// Local events fire at `Nc * pi`. An exchange between two cells appears
/// twice in the rate vector (once from each side), and each component that
/// is chosen for migration picks one of the `z` neighbour directions, so
/// exchange propensities are `Nc * pi / z`. Summing both sides then gives
/// the mean-field flux `q2 * m * f_l * e_nb` in 1-D.
pub fn propensities(state: &LatticeState, p: &ModelParams, out: &mut [f64]) -> Result<()> {
    let (q_int, q_mig) = fractions(state, p);
    let z = state.lattice().directions().len().max(1) as f64;
    rates_into(state, p, q_int, q_mig, 1.0 / z, out)?;
    let n = state.capacity() as f64;
    for a in out.iter_mut() {
        *a *= n;
    }
    Ok(())
}
