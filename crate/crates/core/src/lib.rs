//! Finite-dimensional laboratory for unsharp quantum observables.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] dense complex operators, Hermitian eigensolver, norms;
//! * [`states`] density operators, effects, projections and their readings;
//! * [`observables`] discrete POMs, smearings, joint measurability;
//! * [`channels`] Lüders updates, repeatability and robustness probes;
//! * [`classical`] the ray-space (classical) presentation of quantum states;
//! * [`experiments`] CHSH degradation, frequency operators, premeasurement,
//!   and phase-space tracks;
//! * [`io`] JSON and CSV formats;
//! * [`cli`] the `unsharp-lab` batch harness.
//!
//! All randomness is drawn from generators the caller seeds explicitly.

pub mod error;
pub mod linalg;

pub mod channels;
pub mod classical;
pub mod cli;
pub mod experiments;
pub mod io;
pub mod observables;
pub mod sampling;
pub mod states;

pub use error::{Error, Result};
