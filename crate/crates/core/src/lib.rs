//! Entanglement detection from covariance and commutation matrices of an
//! arbitrary set of observables.

pub mod criterion;
pub mod error;
pub mod matrix;
pub mod observables;
pub mod reference;
pub mod states;
pub mod suite;
pub mod sweep;
pub mod uncertainty;

pub use error::{Error, Result};
