//! Quantum fluid moment hierarchy for electrostatic plasmas.
//!
//! The crate derives fluid quantities from the velocity moments of a Wigner
//! distribution and studies the resulting third-order closure (fourth-order
//! moment dropped):
//!
//! - [`params`]: physical constants, presets and nondimensional schemes
//! - [`moments`]: density, velocity, pressure, heat-flux and fourth-order
//!   moments of a tabulated distribution
//! - [`dispersion`]: the generalized linear dispersion relation and the
//!   quantum Langmuir, Bohm–Gross, adiabatic and temperature-closure relations
//! - [`linear_response`]: first-order pressure-dyad perturbation
//! - [`fluid1d`]: periodic 1D fluid–Poisson time-domain solver
//! - [`traveling`]: wave-frame ODE reduction, stability and threshold search
//! - [`wigner_free`]: free-particle Gaussian packet and its Wigner function

pub mod dispersion;
pub mod error;
pub mod fluid1d;
pub mod linear_response;
pub mod moments;
pub mod params;
pub mod traveling;
pub mod wigner_free;

pub use error::{Error, Result};
pub use params::{make_nondim, NondimScheme, PlasmaParams, Preset};
