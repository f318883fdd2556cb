use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::mode::ModeField;
use super::propagate::{mode_propagate, PropagationSpec};
use crate::{Error, Result};

/// Density `|psi(x, z)|^2` on a transverse grid for `z / z_T = 2k / steps`,
/// `k = 0..=steps`. Row `k` is one propagation distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Carpet {
    pub grid: GridSpec,
    /// Propagation distances in units of `z_T`.
    pub z: Vec<f64>,
    pub density: Vec<Vec<f64>>,
}

impl Carpet {
    pub fn max(&self) -> f64 {
        self.density.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Quantum carpet over one full revival `[0, 2 z_T]` by exact mode
/// propagation. Every distance is an exact Talbot fraction, so the last row
/// reproduces the first.
pub fn carpet(field: &ModeField, wavelength: f64, grid: GridSpec, steps: u64) -> Result<Carpet> {
    if steps == 0 {
        return Err(Error::InvalidParameter("carpet needs at least one z step".into()));
    }
    let period = field.period();
    let rows: Vec<Vec<f64>> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let spec = PropagationSpec::talbot(wavelength, period, 2 * k, steps)?;
            let f = mode_propagate(field, &spec)?;
            Ok(grid.coords().map(|x| f.evaluate(x).norm_sqr()).collect())
        })
        .collect::<Result<_>>()?;
    Ok(Carpet { grid, z: (0..=steps).map(|k| 2.0 * k as f64 / steps as f64).collect(), density: rows })
}
