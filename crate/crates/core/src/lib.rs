//! Equivalent-circuit model of a photoacoustic receive chain.
//!
//! The chain runs from the acoustic surface of a piezoelectric plate, through
//! optional matching and backing layers, the plate's KLM network, a lumped
//! cable T-network and finally a complex receiver impedance. On top of the
//! chain model the crate provides:
//!
//! - [`klm`]: turns ratio, series impedance and the three-port identities of
//!   the plate, plus the full chain transfer matrix.
//! - [`transfer`]: the closed-form single-frequency transfer function and the
//!   full-band force-to-voltage transfer function.
//! - [`response`]: frequency sweeps, impulse responses and -6 dB band metrics.
//! - [`noise`]: output-referred thermal and amplifier noise, SNR.
//! - [`resonance`]: radial-mode eigenfrequencies of a circular plate.
//! - [`sweep`]: parameter grids over element area, cable length and receiver
//!   impedance, normalisation and cable-length optimisation.
//!
//! All quantities are SI. Acoustic impedances are force-impedances
//! (Rayl times area, N·s/m), so element area enters the model only through
//! the plate, layer and medium areas.

pub mod config;
pub mod error;
pub mod export;
pub mod klm;
pub mod model;
pub mod noise;
pub mod resonance;
pub mod response;
pub mod sweep;
pub mod transfer;
pub mod twoport;
pub mod validate;

pub use error::{BandEdge, Error, Result};
pub use model::{
    AmpNoise, CableSpec, CableTotals, DerivedConstants, PassiveLayer, PiezoPlate, ReadoutChain,
    ReceiverImpedance, ReceiverSpec, Spectrum, SpectrumUnit,
};
pub use num_complex::Complex64;
pub use twoport::{Domain, Element, TwoPort};

/// Complex number type used throughout the crate.
pub type C64 = Complex64;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.8541878128e-12;

#[inline]
pub(crate) fn angular(freq_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * freq_hz
}
