//! Stochastic simulation of lattice predator–prey models.
//!
//! The crate provides the model definition ([`model`]), four stochastic
//! samplers ([`samplers`]), mean-field reference solvers ([`meanfield`]),
//! the linear-noise description of fluctuations ([`linear_noise`]) and
//! error, convergence and cost analysis ([`analysis`]).

pub mod error;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
pub mod samplers;
pub mod meanfield;
pub mod linear_noise;
pub mod analysis;
