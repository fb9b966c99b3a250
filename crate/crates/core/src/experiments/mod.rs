//! Scripted scenarios: CHSH under unsharpness, finite-N frequency operators,
//! premeasurement entanglement and phase-space tracks.

pub mod chsh;
pub mod frequency;
pub mod phase_space;
pub mod premeasure;
