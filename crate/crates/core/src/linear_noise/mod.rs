//! Fluctuations around the coexistence equilibrium of the well-mixed model:
//! the linearised Langevin system `x' = Psi x + Phi xi`, the nonlinear
//! Langevin system, and power spectra of predator fluctuations.
//!
//! The noise components `xi_i` are independent white noises with standard
//! deviation `sigma = 1 / sqrt(N)` per unit time, so the power spectrum
//! scales as `1 / N`.

mod langevin;
mod spectrum;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{equilibrium, ScaledParams};

pub use langevin::{simulate_langevin_full, simulate_langevin_linear, LangevinConfig, LangevinRun};
pub use spectrum::{
    analytical_spectrum, empirical_spectrum, empirical_spectrum_cell, envelope_decay_rate, spectral_coefficients,
    SpectralCoefficients, SpectrumKind, SpectrumResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearNoiseModel {
    pub psi: [[f64; 2]; 2],
    pub phi: [[f64; 4]; 2],
    pub n: f64,
    pub sigma: f64,
    pub f_star: f64,
    pub g_star: f64,
    pub sp: ScaledParams,
}

/// Analytic Jacobian of the well-mixed mean-field right-hand side.
pub fn jacobian(sp: &ScaledParams, f: f64, g: f64) -> Result<[[f64; 2]; 2]> {
    if sp.q_cap == 0.0 {
        return Err(Error::CarryingCapacityUndefined);
    }
    Ok([
        [2.0 * sp.p1_t * g - sp.d1_t, 2.0 * sp.p1_t * f],
        [-sp.alpha * g, sp.r - 2.0 * sp.r * g / sp.q_cap - sp.alpha * f],
    ])
}

fn root(name: &str, v: f64) -> Result<f64> {
    if v < 0.0 {
        return Err(Error::InfeasibleEquilibrium(format!("negative radicand {v} in {name}")));
    }
    Ok(v.sqrt())
}

/// Linear noise model of a population of `n` components.
pub fn build_linear_model(sp: &ScaledParams, n: f64) -> Result<LinearNoiseModel> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidParameter { name: "N", reason: format!("must be positive, got {n}") });
    }
    let (f, g) = equilibrium(sp)?;
    let e = 1.0 - f - g;
    if f < 0.0 || g < 0.0 || e < 0.0 {
        return Err(Error::InfeasibleEquilibrium(format!("f* = {f}, g* = {g}")));
    }
    let predation = root("predator birth", 2.0 * sp.p1_t * f * g)?;
    let phi = [
        [0.0, predation, 0.0, -root("predator death", sp.d1_t * f)?],
        [
            root("prey birth", 2.0 * sp.b_t * g * e)?,
            -predation,
            -root("prey loss", 2.0 * sp.p2_t * f * g + sp.d2_t * g)?,
            0.0,
        ],
    ];
    Ok(LinearNoiseModel { psi: jacobian(sp, f, g)?, phi, n, sigma: 1.0 / n.sqrt(), f_star: f, g_star: g, sp: *sp })
}
