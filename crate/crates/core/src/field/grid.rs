use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform 1-D transverse sampling grid: `x_i = x0 + i * dx`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 samples, got {n}")));
        }
        if !(dx.is_finite() && dx > 0.0) || !x0.is_finite() {
            return Err(Error::InvalidParameter(format!("grid pitch must be positive and finite (dx={dx}, x0={x0})")));
        }
        Ok(Self { x0, dx, n })
    }

    /// A window of `periods` whole periods, `samples_per_period` samples each,
    /// centered on x = 0 (the first sample sits at `-periods * period / 2`).
    pub fn periodic(period: f64, samples_per_period: usize, periods: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
        }
        if samples_per_period == 0 || periods == 0 {
            return Err(Error::InvalidParameter("periodic grid needs samples and periods".into()));
        }
        Self::new(
            -(periods as f64) * period / 2.0,
            period / samples_per_period as f64,
            samples_per_period * periods,
        )
    }

    /// `n` samples spanning `[-half_width, half_width)`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParameter(format!("half width must be positive, got {half_width}")));
        }
        Self::new(-half_width, 2.0 * half_width / n.max(1) as f64, n)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    /// Length covered by the samples when each owns a cell of width `dx`.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Grids are considered identical when the sample counts match and the
    /// origin and pitch agree to a relative 1e-12.
    pub fn same_as(&self, other: &GridSpec) -> bool {
        let scale = self.dx.abs().max(other.dx.abs());
        self.n == other.n
            && (self.dx - other.dx).abs() <= 1e-12 * scale
            && (self.x0 - other.x0).abs() <= 1e-12 * scale * self.n as f64
    }
}

/// Smooth edge window applied to a sampled field to suppress diffraction from
/// the hard ends of the computational window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Taper {
    #[default]
    None,
    /// Raised-cosine ramp over `width` length units at both ends.
    RaisedCosine { width: f64 },
}

impl Taper {
    pub fn weight(&self, grid: &GridSpec, i: usize) -> f64 {
        match *self {
            Taper::None => 1.0,
            Taper::RaisedCosine { width } => {
                if width <= 0.0 {
                    return 1.0;
                }
                let from_left = i as f64 * grid.dx;
                let from_right = (grid.n - 1 - i) as f64 * grid.dx;
                let d = from_left.min(from_right);
                if d >= width {
                    1.0
                } else {
                    0.5 * (1.0 - (std::f64::consts::PI * d / width).cos())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_grid_is_centered() {
        let g = GridSpec::periodic(2.0, 8, 4).unwrap();
        assert_eq!(g.n, 32);
        assert_eq!(g.x0, -4.0);
        assert_eq!(g.dx, 0.25);
        assert!((g.extent() - 8.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(0.0, 0.1, 1).is_err());
        assert!(GridSpec::new(0.0, 0.0, 10).is_err());
        assert!(GridSpec::new(0.0, -1.0, 10).is_err());
    }

    #[test]
    fn taper_ramps_to_zero_at_edges() {
        let g = GridSpec::new(0.0, 1.0, 101).unwrap();
        let t = Taper::RaisedCosine { width: 10.0 };
        assert_eq!(t.weight(&g, 0), 0.0);
        assert_eq!(t.weight(&g, 100), 0.0);
        assert!((t.weight(&g, 5) - 0.5).abs() < 1e-12);
        assert_eq!(t.weight(&g, 50), 1.0);
    }
}
