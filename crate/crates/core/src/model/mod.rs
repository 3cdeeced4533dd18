//! State, parameters, stoichiometry and transition rates of the lattice
//! predator–prey system.

mod lattice;
mod params;
mod rates;
mod stoichiometry;

pub use lattice::{Cell, Direction, Lattice, LatticeState};
pub use params::{equilibrium, scale_params, ModelParams, ScaledParams};
pub(crate) use rates::fractions;
pub use rates::{propensities, transition_rates_heterogeneous, transition_rates_homogeneous};
pub use stoichiometry::{
    apply_event, build_stoichiometry, build_stoichiometry_heterogeneous, build_stoichiometry_homogeneous, Entry,
    StoichiometryMatrix, EXCHANGE_EVENTS, LOCAL_EVENTS,
};
