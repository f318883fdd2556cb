use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::{Error, Result};

/// Which photon's transverse coordinate an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Photon 1 (`x1`, the row index).
    First,
    /// Photon 2 (`x2`, the column index).
    Second,
}

/// Two-photon amplitude `Psi(x1, x2)` on an `n1 x n2` grid, stored row-major
/// with `x1` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonField {
    grid1: GridSpec,
    grid2: GridSpec,
    values: Vec<Complex64>,
}

/// Grid metadata written next to a biphoton CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiphotonSidecar {
    pub grid1: GridSpec,
    pub grid2: GridSpec,
    pub layout: String,
    pub quantity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl BiphotonField {
    pub fn new(grid1: GridSpec, grid2: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid1.n * grid2.n {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid1.n,
                grid2.n
            )));
        }
        Ok(Self { grid1, grid2, values })
    }

    pub fn from_fn(grid1: GridSpec, grid2: GridSpec, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); grid1.n * grid2.n];
        values.par_chunks_mut(grid2.n).enumerate().for_each(|(i, row)| {
            let x1 = grid1.x(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x1, grid2.x(j));
            }
        });
        Self { grid1, grid2, values }
    }

    /// `sum_{a,b} C[a][b] u_a(x1) v_b(x2)` for per-axis mode functions sampled
    /// on the two grids.
    pub fn from_mode_sum(
        grid1: GridSpec,
        grid2: GridSpec,
        coeffs: &[Vec<Complex64>],
        modes1: &[Vec<Complex64>],
        modes2: &[Vec<Complex64>],
    ) -> Result<Self> {
        if coeffs.len() != modes1.len() || coeffs.iter().any(|r| r.len() != modes2.len()) {
            return Err(Error::GridMismatch("coefficient matrix does not match the mode sets".into()));
        }
        if modes1.iter().any(|m| m.len() != grid1.n) || modes2.iter().any(|m| m.len() != grid2.n) {
            return Err(Error::GridMismatch("mode samples do not match the grids".into()));
        }
        // Contract photon 2 first: w_a(x2) = sum_b C[a][b] v_b(x2).
        let contracted: Vec<Vec<Complex64>> = coeffs
            .iter()
            .map(|row| {
                let mut w = vec![Complex64::new(0.0, 0.0); grid2.n];
                for (c, v) in row.iter().zip(modes2) {
                    if *c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    w.iter_mut().zip(v).for_each(|(acc, vb)| *acc += c * vb);
                }
                w
            })
            .collect();
        let mut values = vec![Complex64::new(0.0, 0.0); grid1.n * grid2.n];
        values.par_chunks_mut(grid2.n).enumerate().for_each(|(i, row)| {
            for (u, w) in modes1.iter().zip(&contracted) {
                let ua = u[i];
                if ua == Complex64::new(0.0, 0.0) {
                    continue;
                }
                row.iter_mut().zip(w).for_each(|(acc, wv)| *acc += ua * wv);
            }
        });
        Ok(Self { grid1, grid2, values })
    }

    pub fn grid(&self, axis: Axis) -> &GridSpec {
        match axis {
            Axis::First => &self.grid1,
            Axis::Second => &self.grid2,
        }
    }

    pub fn grids(&self) -> (&GridSpec, &GridSpec) {
        (&self.grid1, &self.grid2)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, i1: usize, i2: usize) -> Complex64 {
        self.values[i1 * self.grid2.n + i2]
    }

    pub fn row(&self, i1: usize) -> &[Complex64] {
        let n2 = self.grid2.n;
        &self.values[i1 * n2..(i1 + 1) * n2]
    }

    /// `sum |Psi|^2 dx1 dx2`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.par_iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid1.dx * self.grid2.dx
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize a field of norm {n}")));
        }
        let s = 1.0 / n.sqrt();
        self.values.par_iter_mut().for_each(|v| *v *= s);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn overlap(&self, other: &BiphotonField) -> Result<Complex64> {
        if !(self.grid1.same_as(&other.grid1) && self.grid2.same_as(&other.grid2)) {
            return Err(Error::GridMismatch("biphoton grids differ".into()));
        }
        let s: Complex64 = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid1.dx * self.grid2.dx)
    }

    pub fn fidelity(&self, other: &BiphotonField) -> Result<f64> {
        let o = self.overlap(other)?;
        Ok(o.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Multiplies every sample by `factors[i]` along the chosen axis.
    pub fn scale_axis(&mut self, axis: Axis, factors: &[Complex64]) -> Result<()> {
        let n2 = self.grid2.n;
        match axis {
            Axis::First => {
                if factors.len() != self.grid1.n {
                    return Err(Error::GridMismatch("axis factor length".into()));
                }
                self.values
                    .par_chunks_mut(n2)
                    .zip(factors.par_iter())
                    .for_each(|(row, f)| row.iter_mut().for_each(|v| *v *= f));
            }
            Axis::Second => {
                if factors.len() != n2 {
                    return Err(Error::GridMismatch("axis factor length".into()));
                }
                self.values
                    .par_chunks_mut(n2)
                    .for_each(|row| row.iter_mut().zip(factors).for_each(|(v, f)| *v *= f));
            }
        }
        Ok(())
    }

    /// `|Psi(x1, x2)|^2`, row-major.
    pub fn density(&self) -> Vec<f64> {
        self.values.par_iter().map(|v| v.norm_sqr()).collect()
    }

    /// Reduced density of one photon, `int |Psi|^2 dx_other`.
    pub fn marginal(&self, axis: Axis) -> Vec<f64> {
        let (n1, n2) = (self.grid1.n, self.grid2.n);
        match axis {
            Axis::First => (0..n1)
                .map(|i| self.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid2.dx)
                .collect(),
            Axis::Second => {
                let mut m = vec![0.0; n2];
                for i in 0..n1 {
                    m.iter_mut().zip(self.row(i)).for_each(|(acc, v)| *acc += v.norm_sqr());
                }
                m.iter_mut().for_each(|v| *v *= self.grid1.dx);
                m
            }
        }
    }

    pub fn sidecar(&self, quantity: &str, config: Option<serde_json::Value>) -> BiphotonSidecar {
        BiphotonSidecar {
            grid1: self.grid1,
            grid2: self.grid2,
            layout: "row-major".into(),
            quantity: quantity.into(),
            config,
        }
    }

    /// Amplitudes as `re,im` lines in row-major order (`x1` outer). Grid
    /// metadata goes in the JSON sidecar from [`BiphotonField::sidecar`].
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "re,im")?;
        for v in &self.values {
            writeln!(w, "{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, sidecar: &BiphotonSidecar) -> Result<Self> {
        let mut values = Vec::with_capacity(sidecar.grid1.n * sidecar.grid2.n);
        let mut seen_header = false;
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_header {
                if line != "re,im" {
                    return Err(Error::Parse(format!("expected header `re,im`, got `{line}`")));
                }
                seen_header = true;
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected `re,im`, got `{line}`")))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
            values.push(Complex64::new(parse(a)?, parse(b)?));
        }
        Self::new(sidecar.grid1, sidecar.grid2, values)
    }
}
