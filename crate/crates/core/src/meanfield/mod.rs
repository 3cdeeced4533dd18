//! Mean-field reference solutions: the well-mixed ODE system and its
//! lattice (reaction–cross-diffusion) counterpart on 1-D and 2-D grids.

mod integrate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Lattice, LatticeState, ScaledParams};

pub use integrate::{integrate, MeanFieldSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Periodic,
    /// Missing neighbours contribute nothing, as in the stochastic lattice.
    ZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with fixed step `dt`.
    Rk4,
    /// Dormand–Prince 5(4) with error control; `dt` is the first trial step.
    DormandPrince { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub output_stride: f64,
    pub boundary: Boundary,
    pub method: Method,
    /// Lattice spacing used by the discrete Laplacian.
    pub epsilon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { dt: 0.01, t_final: 100.0, output_stride: 1.0, boundary: Boundary::Periodic, method: Method::Rk4, epsilon: 1.0 }
    }
}

/// Real-valued densities of every cell at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub lattice: Lattice,
    pub time: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl Field {
    pub fn new(lattice: Lattice, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        lattice.validate()?;
        if f.len() != lattice.n_cells() || g.len() != lattice.n_cells() {
            return Err(Error::InvalidDimension(format!(
                "field of {} / {} values on a lattice of {} cells",
                f.len(),
                g.len(),
                lattice.n_cells()
            )));
        }
        let field = Self { lattice, time: 0.0, f, g };
        field.check(1e-9)?;
        Ok(field)
    }

    pub fn uniform(lattice: Lattice, f: f64, g: f64) -> Result<Self> {
        let n = lattice.n_cells();
        Self::new(lattice, vec![f; n], vec![g; n])
    }

    pub fn from_state(state: &LatticeState) -> Self {
        let n = state.capacity() as f64;
        Self {
            lattice: state.lattice(),
            time: 0.0,
            f: state.cells().iter().map(|c| c.a as f64 / n).collect(),
            g: state.cells().iter().map(|c| c.b as f64 / n).collect(),
        }
    }

    /// `0 <= f, g` and `f + g <= 1` in every cell, up to `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        for (l, (&f, &g)) in self.f.iter().zip(&self.g).enumerate() {
            if !(f.is_finite() && g.is_finite()) || f < -tol || g < -tol || f + g > 1.0 + tol {
                return Err(Error::SolverInstability(format!(
                    "cell {l} at t = {}: f = {f}, g = {g}",
                    self.time
                )));
            }
        }
        Ok(())
    }
}

/// Right-hand side of the well-mixed mean-field equations.
pub fn rhs_homogeneous(f: f64, g: f64, sp: &ScaledParams) -> Result<(f64, f64)> {
    if sp.q_cap == 0.0 {
        return Err(Error::CarryingCapacityUndefined);
    }
    let df = 2.0 * sp.p1_t * f * g - sp.d1_t * f;
    let dg = sp.r * g * (1.0 - g / sp.q_cap) - sp.alpha * f * g;
    Ok((df, dg))
}

/// Sum over nearest neighbours of `(h_s - h_l) / epsilon^2`.
pub fn discrete_laplacian(h: &[f64], lattice: Lattice, epsilon: f64, boundary: Boundary) -> Result<Vec<f64>> {
    let mut out = vec![0.0; h.len()];
    laplacian_into(h, lattice, epsilon, boundary, &mut out)?;
    Ok(out)
}

fn laplacian_into(h: &[f64], lattice: Lattice, epsilon: f64, boundary: Boundary, out: &mut [f64]) -> Result<()> {
    let (nx, ny) = match lattice {
        Lattice::Line { cells } if cells >= 2 => (cells, 1),
        Lattice::Grid { nx, ny } if nx >= 2 && ny >= 2 => (nx, ny),
        other => return Err(Error::InvalidDimension(format!("Laplacian needs at least 2 cells per axis, got {other:?}"))),
    };
    if h.len() != nx * ny {
        return Err(Error::InvalidDimension(format!("{} values for {} cells", h.len(), nx * ny)));
    }
    let inv = 1.0 / (epsilon * epsilon);
    let periodic = boundary == Boundary::Periodic;
    let two_d = matches!(lattice, Lattice::Grid { .. });
    for y in 0..ny {
        for x in 0..nx {
            let l = y * nx + x;
            let hl = h[l];
            let mut acc = 0.0;
            let mut add = |nb: Option<usize>| {
                if let Some(s) = nb {
                    acc += h[s] - hl;
                }
            };
            let wrap = |v: usize, d: isize, n: usize| -> Option<usize> {
                let w = v as isize + d;
                if (0..n as isize).contains(&w) {
                    Some(w as usize)
                } else if periodic {
                    Some(w.rem_euclid(n as isize) as usize)
                } else {
                    None
                }
            };
            add(wrap(x, -1, nx).map(|xx| y * nx + xx));
            add(wrap(x, 1, nx).map(|xx| y * nx + xx));
            if two_d {
                add(wrap(y, -1, ny).map(|yy| yy * nx + x));
                add(wrap(y, 1, ny).map(|yy| yy * nx + x));
            }
            out[l] = acc * inv;
        }
    }
    Ok(())
}

/// Exchange weight per direction: each migrating component picks one of the
/// `z` neighbour directions, giving `2 / z` relative to the 1-D chain.
pub fn exchange_weight(lattice: Lattice) -> f64 {
    match lattice {
        Lattice::Grid { .. } => 0.5,
        _ => 1.0,
    }
}

/// Right-hand side on a lattice: local reaction terms plus
/// `m1_t (f Δg + (1 - g) Δf)` for predators and `m2_t (g Δf + (1 - f) Δg)`
/// for prey, scaled by [`exchange_weight`]. Lattices with a single cell
/// have no exchange terms.
pub fn rhs_heterogeneous(field: &Field, sp: &ScaledParams, epsilon: f64, boundary: Boundary) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = field.f.len();
    let mut df = vec![0.0; n];
    let mut dg = vec![0.0; n];
    let mut work = Workspace::new(n);
    rhs_into(field.lattice, &field.f, &field.g, sp, epsilon, boundary, &mut df, &mut dg, &mut work)?;
    Ok((df, dg))
}

pub(crate) struct Workspace {
    lap_f: Vec<f64>,
    lap_g: Vec<f64>,
}

impl Workspace {
    pub(crate) fn new(n: usize) -> Self {
        Self { lap_f: vec![0.0; n], lap_g: vec![0.0; n] }
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn rhs_into(
    lattice: Lattice,
    f: &[f64],
    g: &[f64],
    sp: &ScaledParams,
    epsilon: f64,
    boundary: Boundary,
    df: &mut [f64],
    dg: &mut [f64],
    work: &mut Workspace,
) -> Result<()> {
    for l in 0..f.len() {
        let (a, b) = rhs_homogeneous(f[l], g[l], sp)?;
        df[l] = a;
        dg[l] = b;
    }
    if lattice.n_cells() < 2 || (sp.m1_t == 0.0 && sp.m2_t == 0.0) {
        return Ok(());
    }
    laplacian_into(f, lattice, epsilon, boundary, &mut work.lap_f)?;
    laplacian_into(g, lattice, epsilon, boundary, &mut work.lap_g)?;
    let w = exchange_weight(lattice);
    for l in 0..f.len() {
        let (lf, lg) = (work.lap_f[l], work.lap_g[l]);
        df[l] += w * sp.m1_t * (f[l] * lg + (1.0 - g[l]) * lf);
        dg[l] += w * sp.m2_t * (g[l] * lf + (1.0 - f[l]) * lg);
    }
    Ok(())
}
