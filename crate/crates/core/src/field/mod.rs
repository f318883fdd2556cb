//! Transverse field representations and paraxial propagation.

pub mod biphoton;
pub mod carpet;
pub mod grid;
pub mod mode;
pub mod profile;
pub mod propagate;
pub mod sampled;

pub use biphoton::{Axis, BiphotonField, BiphotonSidecar};
pub use carpet::{carpet, Carpet};
pub use grid::{GridSpec, Taper};
pub use mode::{ModeField, TruncationRule};
pub use profile::{SlitProfile, SlitShape};
pub use propagate::{
    check_aliasing, fft_frequencies, fresnel_propagate, fresnel_propagate_axis, mode_propagate, spectral_filter, spectral_filter_axis, talbot_length, PropagationSpec,
    TalbotFraction,
};
pub use sampled::SampledField;
