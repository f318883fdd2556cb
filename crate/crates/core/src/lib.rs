//! Numerical laboratory for free-space Talbot-effect qudits.
//!
//! The crate is organized bottom-up:
//!
//! * [`field`]: sampled and Fourier-mode representations of a 1-D transverse
//!   field, unitary paraxial propagation for both, and the two-photon grid.
//! * [`qudit`]: Gauss-sum revival coefficients, the Talbot and phase gates,
//!   CGLMP measurement unitaries, and the encode/decode bridge between qudit
//!   vectors and periodic fields.
//! * [`spdc`]: the double-Gaussian photon-pair model, D-slit apertures, the
//!   lens-grating-lens carpet synthesizer and the entangled coefficient
//!   matrix.
//! * [`bell`]: CGLMP evaluation by a matrix route and a full field route,
//!   plus dimension scans.
//! * [`constraints`]: SLM/CCD feasibility calculators.
//! * [`export`]: CSV/PGM writers shared by the command-line front end.

pub mod bell;
pub mod constraints;
pub mod error;
pub mod export;
pub mod field;
pub mod qudit;
pub mod spdc;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Reference tolerance for the normalization invariants of fields, states and
/// coefficient matrices.
pub const NORM_TOL: f64 = 1e-12;
