//! Talbot-basis qudit algebra and the bridge to periodic fields.

pub mod basis;
pub mod gates;
pub mod gauss;

pub use basis::{decode, encode, encode_with, BinMap, Decoded, TalbotGeometry, MAX_BASIS_OVERLAP};
pub use gates::{
    basis_vector, measurement_phases, measurement_unitary, outcome_permutation, phase_gate, solved_phases, talbot_c,
    talbot_gate, MeasurementGate, PhaseSource, QuditState, QuditUnitary, Side, MAPPING_TOL, UNITARY_TOL,
};
pub use gauss::{gauss_coeffs, GaussCoeffs};
