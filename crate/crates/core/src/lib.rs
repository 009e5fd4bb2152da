//! One-bit MIMO radar target detection.
//!
//! The crate is organised the way an experiment flows:
//!
//! - [`scene`] builds the steering vectors, the LFM waveform, the spatial
//!   signature `Z = a_r a_tᴴ S`, received data under either hypothesis and the
//!   one-bit quantizer.
//! - [`detectors`] holds the Rao statistic for sign data, the ∞-bit GLRT on the
//!   Wilks scale and the known-β LRT benchmark.
//! - [`theory`] evaluates the null and non-null laws: Q function, Gaussian
//!   moments of the score, Imhof inversion, non-central χ² and the low-SNR
//!   approximation.
//! - [`montecarlo`] runs seeded, order-independent trial batches and scores
//!   them against the theory with the Cramér–von Mises error.
//!
//! Noise follows the unit convention used throughout: real and imaginary
//! parts are standard normal (σ² = 2) and β is the normalized reflectivity.

pub mod detectors;
pub mod error;
pub mod matrix;
pub mod montecarlo;
pub mod scene;
pub mod theory;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
