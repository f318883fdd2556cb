//! Photon-pair state engineering: the double-Gaussian source, D-slit
//! apertures, the carpet synthesizer and the entangled coefficient matrix.

pub mod coeffs;
pub mod model;
pub mod slits;
pub mod synth;

pub use coeffs::{entangled_coeffs, schmidt_spectrum, CoeffMatrix, SchmidtSpectrum};
pub use model::BiphotonGaussian;
pub use slits::{apply_dslit, slit_pair_weights, Apertured, SlitArray, MIN_SAMPLES_PER_WIDTH};
pub use synth::{
    grating_mode, optical_pipeline, optical_pipeline_biphoton, synthesize_single, synthesize_single_sampled,
    two_photon_field, SynthesizerGeometry,
};
