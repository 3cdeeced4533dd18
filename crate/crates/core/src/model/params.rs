use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw rate constants and event fractions of the predator–prey system.
///
/// `mu` is the interaction fraction of the well-mixed (single-cell) model;
/// `q1`, `q2` are the interaction and migration fractions of the lattice
/// model. `tau` is the fixed step of the ensemble and classic samplers and
/// `epsilon` the lattice spacing used by the mean-field limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub b_r: f64,
    pub p1_r: f64,
    pub p2_r: f64,
    pub d1_r: f64,
    pub d2_r: f64,
    pub m1_r: f64,
    pub m2_r: f64,
    pub mu: f64,
    pub q1: f64,
    pub q2: f64,
    pub tau: f64,
    pub epsilon: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::homogeneous_reference()
    }
}

impl ModelParams {
    /// Reference well-mixed scenario (equilibrium f* = g* = 0.2).
    pub fn homogeneous_reference() -> Self {
        Self {
            b_r: 0.1,
            p1_r: 0.25,
            p2_r: 0.05,
            d1_r: 0.1,
            d2_r: 0.0,
            m1_r: 0.0,
            m2_r: 0.0,
            mu: 0.5,
            q1: 0.5,
            q2: 0.0,
            tau: 0.1,
            epsilon: 1.0,
        }
    }

    /// Reference spatial scenario with interaction and migration fractions 0.3.
    pub fn heterogeneous_reference() -> Self {
        Self {
            m1_r: 0.5,
            m2_r: 0.5,
            q1: 0.3,
            q2: 0.3,
            ..Self::homogeneous_reference()
        }
    }

    /// Parameters of the cost benchmark scenario.
    pub fn benchmark_reference() -> Self {
        Self {
            b_r: 1.0,
            p1_r: 0.5,
            p2_r: 0.5,
            d1_r: 0.3,
            d2_r: 0.3,
            ..Self::homogeneous_reference()
        }
    }

    /// The well-mixed model seen through the lattice parametrization:
    /// `q1 <- mu`, `q2 <- 0`.
    pub fn homogeneous_mapping(&self) -> Self {
        Self {
            q1: self.mu,
            q2: 0.0,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("b_r", self.b_r),
            ("p1_r", self.p1_r),
            ("p2_r", self.p2_r),
            ("d1_r", self.d1_r),
            ("d2_r", self.d2_r),
            ("m1_r", self.m1_r),
            ("m2_r", self.m2_r),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("rate must be finite and non-negative, got {v}"),
                });
            }
        }
        for (name, v) in [("mu", self.mu), ("q1", self.q1), ("q2", self.q2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("fraction must lie in [0, 1], got {v}"),
                });
            }
        }
        if self.q1 + self.q2 > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter {
                name: "q2",
                reason: format!("q1 + q2 = {} exceeds 1", self.q1 + self.q2),
            });
        }
        for (name, v) in [("tau", self.tau), ("epsilon", self.epsilon)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        let probs = [
            ("b_r*tau", self.b_r * self.tau),
            ("p1_r*tau", self.p1_r * self.tau),
            ("p2_r*tau", self.p2_r * self.tau),
            ("(p1_r+p2_r)*tau", (self.p1_r + self.p2_r) * self.tau),
            ("d1_r*tau", self.d1_r * self.tau),
            ("d2_r*tau", self.d2_r * self.tau),
            ("m1_r*tau", self.m1_r * self.tau),
            ("m2_r*tau", self.m2_r * self.tau),
        ];
        for (name, value) in probs {
            if value > 1.0 {
                return Err(Error::ProbabilityOverflow { name, value });
            }
        }
        Ok(())
    }
}

/// Rates of the mean-field limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledParams {
    pub b_t: f64,
    pub p1_t: f64,
    pub p2_t: f64,
    pub d1_t: f64,
    pub d2_t: f64,
    pub m1_t: f64,
    pub m2_t: f64,
    /// Prey growth rate `2 b_t - d2_t`.
    pub r: f64,
    /// Carrying-capacity factor `1 - d2_t / (2 b_t)`.
    pub q_cap: f64,
    /// Predation pressure `2 (p1_t + p2_t + b_t)`.
    pub alpha: f64,
}

/// Mean-field rates from the lattice fractions `q1`, `q2`. For the
/// well-mixed model pass `p.homogeneous_mapping()`.
///
/// With `b_t = d2_t = 0` the prey equation has no logistic term and `q_cap`
/// is set to 1.
pub fn scale_params(p: &ModelParams) -> Result<ScaledParams> {
    let idle = 1.0 - p.q1 - p.q2;
    let inv_eps2 = 1.0 / (p.epsilon * p.epsilon);
    let b_t = p.b_r * p.q1;
    let d2_t = idle.max(0.0) * p.d2_r;
    let q_cap = if b_t > 0.0 {
        1.0 - d2_t / (2.0 * b_t)
    } else if d2_t == 0.0 {
        1.0
    } else {
        return Err(Error::CarryingCapacityUndefined);
    };
    let p1_t = p.p1_r * p.q1;
    let p2_t = p.p2_r * p.q1;
    Ok(ScaledParams {
        b_t,
        p1_t,
        p2_t,
        d1_t: idle.max(0.0) * p.d1_r,
        d2_t,
        m1_t: p.q2 * inv_eps2 * p.m1_r,
        m2_t: p.q2 * inv_eps2 * p.m2_r,
        r: 2.0 * b_t - d2_t,
        q_cap,
        alpha: 2.0 * (p1_t + p2_t + b_t),
    })
}

/// Coexistence fixed point `(f*, g*)` of the mean-field equations.
pub fn equilibrium(sp: &ScaledParams) -> Result<(f64, f64)> {
    if sp.p1_t == 0.0 {
        return Err(Error::DivisionByZero("p1_t = 0 in equilibrium"));
    }
    let f = (2.0 * sp.b_t * sp.p1_t - sp.b_t * sp.d1_t - sp.p1_t * sp.d2_t)
        / (2.0 * sp.p1_t * (sp.p1_t + sp.p2_t + sp.b_t));
    let g = sp.d1_t / (2.0 * sp.p1_t);
    Ok((f, g))
}
