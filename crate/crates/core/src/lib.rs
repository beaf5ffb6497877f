//! Models for the rotational reorientation of the G center in silicon.
//!
//! The crate covers the hindered-rotor tunneling spectrum of the central
//! interstitial atom, isotope shifts from mass scaling of the tunneling path,
//! motional averaging of interaction tensors, the temperature dependence of the
//! reorientation rate, the zero-phonon-line fine structure, and a triplet spin
//! Hamiltonian for ODMR resonance fields.

pub mod error;
pub mod isotope;
pub mod numerics;
pub mod rates;
pub mod rotor;
pub mod report;
pub mod spectrum;
pub mod spin;
pub mod tensor;
pub mod units;

pub use error::{Error, Result};
