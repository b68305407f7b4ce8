//! The discrete space with vertex, edge and element unknowns on each side of the interface,
//! its interpolator, and the local reconstructions.

mod dofs;
mod local;

pub use dofs::{interpolate, DiscreteVector, DofMap};
pub use local::{build_local_operators, ElementOperators, LocalOperators, MAX_LOCAL_CONDITION};
