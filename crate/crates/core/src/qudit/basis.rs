use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gates::{talbot_c, QuditState};
use crate::field::{GridSpec, ModeField, PropagationSpec, SampledField, SlitShape, TruncationRule};
use crate::{Error, Result};

/// Largest allowed normalized overlap between adjacent basis wavefunctions.
pub const MAX_BASIS_OVERLAP: f64 = 1e-4;

/// Layout of the D-dimensional Talbot basis: basis state `d` is a comb of
/// slits at `origin + d * period / D + m * period`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TalbotGeometry {
    pub period: f64,
    pub slit: SlitShape,
    pub dim: usize,
    #[serde(default)]
    pub origin: f64,
    pub wavelength: f64,
}

impl TalbotGeometry {
    pub fn new(period: f64, slit: SlitShape, dim: usize, wavelength: f64) -> Result<Self> {
        let g = Self { period, slit, dim, origin: 0.0, wavelength };
        g.validate()?;
        Ok(g)
    }

    pub fn with_origin(mut self, origin: f64) -> Result<Self> {
        self.origin = origin;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(Error::InvalidParameter(format!("period must be positive, got {}", self.period)));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::InvalidParameter(format!("wavelength must be positive, got {}", self.wavelength)));
        }
        if !self.origin.is_finite() {
            return Err(Error::InvalidParameter("origin must be finite".into()));
        }
        let step = self.step();
        if self.slit.width >= step {
            return Err(Error::InvalidParameter(format!(
                "slit width {} is not below the basis step {step}",
                self.slit.width
            )));
        }
        let overlap = self.adjacent_overlap();
        if overlap >= MAX_BASIS_OVERLAP {
            return Err(Error::InvalidParameter(format!(
                "adjacent basis states overlap by {overlap:.2e} (limit {MAX_BASIS_OVERLAP:.0e})"
            )));
        }
        Ok(())
    }

    /// Basis offset step `period / D`.
    pub fn step(&self) -> f64 {
        self.period / self.dim as f64
    }

    pub fn talbot_length(&self) -> f64 {
        self.period * self.period / self.wavelength
    }

    /// Overlap of slit profiles one basis step apart.
    pub fn adjacent_overlap(&self) -> f64 {
        self.slit.normalized_overlap(self.step()).abs()
    }

    /// Center of slit `d` in the reference period.
    pub fn slit_center(&self, d: usize) -> f64 {
        self.origin + d as f64 * self.step()
    }

    /// Free-space distance `2 z_T / (c D)` realizing the Talbot gate, as an
    /// exact Talbot fraction.
    pub fn gate_distance(&self) -> Result<PropagationSpec> {
        PropagationSpec::talbot(self.wavelength, self.period, 2, (talbot_c(self.dim) * self.dim) as u64)
    }

    /// `n` samples per period over `periods` periods, centered on the origin.
    pub fn grid(&self, samples_per_period: usize, periods: usize) -> Result<GridSpec> {
        let g = GridSpec::periodic(self.period, samples_per_period, periods)?;
        GridSpec::new(g.x0 + self.origin, g.dx, g.n)
    }
}

/// Periodic field `sum_d c_d S(x - x_d)` for the qudit amplitudes `c_d`,
/// normalized over one period.
pub fn encode(state: &QuditState, geom: &TalbotGeometry) -> Result<ModeField> {
    encode_with(state.amplitudes(), geom, TruncationRule::default())
}

/// [`encode`] for raw amplitudes and an explicit truncation rule.
pub fn encode_with(amps: &[Complex64], geom: &TalbotGeometry, rule: TruncationRule) -> Result<ModeField> {
    geom.validate()?;
    if amps.len() != geom.dim {
        return Err(Error::InvalidParameter(format!("{} amplitudes for D={}", amps.len(), geom.dim)));
    }
    let cell: Vec<(f64, Complex64)> = amps.iter().enumerate().map(|(d, &c)| (geom.slit_center(d), c)).collect();
    ModeField::from_cell(geom.period, geom.origin, &cell, geom.slit, rule)?.normalized()
}

/// Detector-bin outcome of a sampled field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    /// Renormalized outcome probabilities.
    pub probabilities: Vec<f64>,
    /// Binned power `sum |psi|^2 dx` before renormalization.
    pub captured_power: f64,
    /// Fraction of the binned power within a quarter bin of a bin edge.
    pub crosstalk: f64,
}

/// Per-sample assignment of grid cells to detector bins.
///
/// Bin `d` is the half-open interval of width `period / D` centered on
/// `origin + d period / D`, repeated every period. Each sample owns the cell
/// `[x - dx/2, x + dx/2)`; a cell straddling a bin edge is split between the
/// two bins in proportion to the overlap.
#[derive(Debug, Clone)]
pub struct BinMap {
    dim: usize,
    /// `(bin, weight)` for the lower part of each cell; the rest of the cell
    /// goes to the next bin.
    first: Vec<(usize, f64)>,
    edge: Vec<bool>,
}

impl BinMap {
    pub fn new(grid: &GridSpec, geom: &TalbotGeometry) -> Result<Self> {
        geom.validate()?;
        let periods = grid.extent() / geom.period;
        if (periods - periods.round()).abs() > 1e-6 * periods.max(1.0) || periods.round() < 1.0 {
            return Err(Error::BinMisalignment(format!(
                "window covers {periods} periods, not a whole number"
            )));
        }
        let step = geom.step();
        let cell = grid.dx / step;
        if cell > 0.5 {
            return Err(Error::BinMisalignment(format!(
                "dx = {} gives fewer than 2 samples per bin of width {step}",
                grid.dx
            )));
        }
        let d = geom.dim;
        let mut first = Vec::with_capacity(grid.n);
        let mut edge = Vec::with_capacity(grid.n);
        for i in 0..grid.n {
            // Bin coordinate: integer values are bin edges.
            let u = (grid.x(i) - geom.origin) / step + 0.5;
            let lo = u - 0.5 * cell;
            let b = lo.floor();
            let w = ((b + 1.0 - lo) / cell).min(1.0);
            first.push(((b as i64).rem_euclid(d as i64) as usize, w));
            let frac = u - u.floor();
            edge.push(!(0.25..0.75).contains(&frac));
        }
        Ok(Self { dim: d, first, edge })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    /// The (at most two) bins sample `i` contributes to, with weights.
    #[inline]
    pub fn parts(&self, i: usize) -> [(usize, f64); 2] {
        let (b, w) = self.first[i];
        [(b, w), ((b + 1) % self.dim, 1.0 - w)]
    }

    #[inline]
    pub fn is_edge(&self, i: usize) -> bool {
        self.edge[i]
    }
}

/// Integrated `|psi|^2` per detector bin, summed over every period of the
/// window.
pub fn decode(field: &SampledField, geom: &TalbotGeometry) -> Result<Decoded> {
    let map = BinMap::new(field.grid(), geom)?;
    let dx = field.grid().dx;
    let mut power = vec![0.0; geom.dim];
    let mut edge = 0.0;
    for (i, v) in field.values().iter().enumerate() {
        let p = v.norm_sqr() * dx;
        for (b, w) in map.parts(i) {
            power[b] += p * w;
        }
        if map.is_edge(i) {
            edge += p;
        }
    }
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("field carries no power in the detector bins".into()));
    }
    Ok(Decoded {
        probabilities: power.iter().map(|p| p / total).collect(),
        captured_power: total,
        crosstalk: edge / total,
    })
}
