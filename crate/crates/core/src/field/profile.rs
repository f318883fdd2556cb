use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Transmission profile of a single slit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SlitProfile {
    /// `exp(-x^2 / (2 w^2))`: `w` is the amplitude standard deviation.
    #[default]
    Gaussian,
    /// Unit transmission for `|x| < w/2`: `w` is the full width.
    TopHat,
}

/// A slit profile together with its width parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitShape {
    pub profile: SlitProfile,
    pub width: f64,
}

impl SlitShape {
    pub fn new(profile: SlitProfile, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter(format!("slit width must be positive, got {width}")));
        }
        Ok(Self { profile, width })
    }

    pub fn gaussian(width: f64) -> Result<Self> {
        Self::new(SlitProfile::Gaussian, width)
    }

    pub fn top_hat(width: f64) -> Result<Self> {
        Self::new(SlitProfile::TopHat, width)
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let w = self.width;
        match self.profile {
            SlitProfile::Gaussian => (-x * x / (2.0 * w * w)).exp(),
            SlitProfile::TopHat => {
                if x.abs() < 0.5 * w {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Continuous Fourier transform `int S(x) exp(-2 pi i f x) dx` at spatial
    /// frequency `f` (cycles per length). Both profiles are even, so it is real.
    pub fn spectrum(&self, f: f64) -> f64 {
        let w = self.width;
        match self.profile {
            SlitProfile::Gaussian => w * (2.0 * PI).sqrt() * (-2.0 * PI * PI * f * f * w * w).exp(),
            SlitProfile::TopHat => {
                if f == 0.0 {
                    w
                } else {
                    (PI * f * w).sin() / (PI * f)
                }
            }
        }
    }

    /// `int S(y) S(y + shift) dy`.
    pub fn autocorrelation(&self, shift: f64) -> f64 {
        let w = self.width;
        match self.profile {
            SlitProfile::Gaussian => w * PI.sqrt() * (-shift * shift / (4.0 * w * w)).exp(),
            SlitProfile::TopHat => (w - shift.abs()).max(0.0),
        }
    }

    /// Distance beyond which the profile is negligible (below 1e-20 of its peak).
    pub fn reach(&self) -> f64 {
        match self.profile {
            SlitProfile::Gaussian => 10.0 * self.width,
            SlitProfile::TopHat => 0.5 * self.width,
        }
    }

    /// Normalized overlap `<S(x)|S(x - shift)> / <S|S>` of two displaced slits.
    pub fn normalized_overlap(&self, shift: f64) -> f64 {
        self.autocorrelation(shift) / self.autocorrelation(0.0)
    }
}
