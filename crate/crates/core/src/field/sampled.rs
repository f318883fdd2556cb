use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::grid::{GridSpec, Taper};
use crate::{Error, Result};

/// Complex amplitude on a uniform 1-D transverse grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.n
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("field contains non-finite samples".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.coords().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `sum |psi_i|^2 dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize a field of norm {n}")));
        }
        let s = 1.0 / n.sqrt();
        self.values.iter_mut().for_each(|v| *v *= s);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn apply_taper(&mut self, taper: Taper) {
        if taper == Taper::None {
            return;
        }
        for (i, v) in self.values.iter_mut().enumerate() {
            *v *= taper.weight(&self.grid, i);
        }
    }

    /// `sum conj(a_i) b_i dx`.
    pub fn overlap(&self, other: &SampledField) -> Result<Complex64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.dx)
    }

    /// `|<a|b>|^2 / (<a|a><b|b>)`.
    pub fn fidelity(&self, other: &SampledField) -> Result<f64> {
        let o = self.overlap(other)?;
        Ok(o.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// The `len` samples starting at index `start`, on the matching sub-grid.
    pub fn crop(&self, start: usize, len: usize) -> Result<SampledField> {
        if start + len > self.grid.n {
            return Err(Error::GridMismatch(format!(
                "crop [{start}, {}) exceeds {} samples",
                start + len,
                self.grid.n
            )));
        }
        let grid = GridSpec::new(self.grid.x(start), self.grid.dx, len)?;
        Self::new(grid, self.values[start..start + len].to_vec())
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Writes `x,re,im` rows, optionally preceded by a `# ` comment line.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "x,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{}", self.grid.x(i), v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`SampledField::write_csv`]. The grid is
    /// recovered from the first two `x` values.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        let mut seen_header = false;
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_header {
                if line != "x,re,im" {
                    return Err(Error::Parse(format!("expected header `x,re,im`, got `{line}`")));
                }
                seen_header = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("expected 3 columns, got `{line}`")));
            }
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
            xs.push(parse(cols[0])?);
            values.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
        }
        if xs.len() < 2 {
            return Err(Error::Parse("need at least two samples".into()));
        }
        let grid = GridSpec::new(xs[0], xs[1] - xs[0], xs.len())?;
        Self::new(grid, values)
    }
}
