//! Spectral simulation of the non-Hermitian quantum kicked rotor at quantum
//! resonance, together with the closed-form Bessel-function results that the
//! simulation is checked against.
//!
//! The crate is organised bottom-up:
//!
//! - [`bessel`]: overflow-safe `I_0 .. I_3`, scaled forms and ratios.
//! - [`model`]: parameters, the complex kick, the momentum lattice and the
//!   exact resonant state.
//! - [`evolve`]: the split-operator Floquet step with log-norm accounting.
//! - [`observables`]: rescaled moments and the rescaled OTOC.
//! - [`theory`]: the analytical oracle and its asymptotic regimes.
//! - [`analysis`]: distribution fits, second differences, phase diagrams and
//!   the long-time symmetry table.
//! - [`cli`]: configuration and data export.

pub mod analysis;
pub mod bessel;
pub mod cli;
pub mod error;
pub mod evolve;
pub mod model;
pub mod observables;
pub mod sum;
pub mod theory;

pub use error::{Error, Result};
pub use model::{ModelParams, MomentumGrid, QuantumState};
pub use observables::{MomentumDistribution, ObservableRecord, ObservableSeries};
