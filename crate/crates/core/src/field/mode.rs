use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, Taper};
use super::profile::SlitShape;
use super::sampled::SampledField;
use crate::{Error, Result};

/// How many Fourier orders a [`ModeField`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationRule {
    /// Largest tolerated fraction of `sum |A_n|^2` in the discarded tail.
    pub tolerance: f64,
    /// Hard cap on `M`; slowly decaying spectra (top-hat slits) stop here and
    /// report the mass they leave behind.
    pub max_order: usize,
}

impl Default for TruncationRule {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_order: 4096 }
    }
}

/// Periodic wavefunction `psi(x) = sum_{|n|<=M} A_n exp(2 pi i n (x - x_off) / period)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeField {
    period: f64,
    offset: f64,
    /// `coeffs[n + M]` holds `A_n`.
    coeffs: Vec<Complex64>,
    discarded_mass: f64,
}

impl ModeField {
    /// Builds a field from explicit coefficients `A_{-M}..=A_M`.
    pub fn new(period: f64, offset: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) || !offset.is_finite() {
            return Err(Error::InvalidParameter(format!("bad period/offset ({period}, {offset})")));
        }
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "coefficient vector must have odd length 2M+1, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { period, offset, coeffs, discarded_mass: 0.0 })
    }

    /// Builds a field from a generator `n -> A_n`, truncated by `rule` using
    /// `total_mass` (the exact `sum_n |A_n|^2`, e.g. from Parseval).
    pub fn from_generator(
        period: f64,
        offset: f64,
        total_mass: f64,
        rule: TruncationRule,
        coeff: impl Fn(i64) -> Complex64,
    ) -> Result<Self> {
        if !(total_mass.is_finite() && total_mass > 0.0) {
            return Err(Error::InvalidParameter(format!("field has no power (mass {total_mass})")));
        }
        let target = total_mass * (1.0 - rule.tolerance);
        let mut pos = vec![coeff(0)];
        let mut neg = Vec::new();
        let mut partial = pos[0].norm_sqr();
        let mut m = 0usize;
        while partial < target && m < rule.max_order {
            m += 1;
            let (p, q) = (coeff(m as i64), coeff(-(m as i64)));
            partial += p.norm_sqr() + q.norm_sqr();
            pos.push(p);
            neg.push(q);
        }
        let mut coeffs: Vec<Complex64> = neg.into_iter().rev().collect();
        coeffs.extend(pos);
        let mut f = Self::new(period, offset, coeffs)?;
        f.discarded_mass = ((total_mass - partial) / total_mass).max(0.0);
        Ok(f)
    }

    /// Periodic comb whose unit cell is `sum_d c_d S(x - x_d)`, with `cell`
    /// listing `(x_d, c_d)` in absolute coordinates. Coefficients come from
    /// the slit spectrum; the truncation uses the exact Parseval mass.
    pub fn from_cell(
        period: f64,
        offset: f64,
        cell: &[(f64, Complex64)],
        shape: SlitShape,
        rule: TruncationRule,
    ) -> Result<Self> {
        if cell.is_empty() {
            return Err(Error::InvalidParameter("unit cell has no slits".into()));
        }
        let mass = periodic_cell_mass(period, cell, shape);
        Self::from_generator(period, offset, mass, rule, |n| {
            let f = n as f64 / period;
            let phase: Complex64 = cell
                .iter()
                .map(|&(x, c)| c * Complex64::cis(-2.0 * PI * n as f64 * (x - offset) / period))
                .sum();
            phase * (shape.spectrum(f) / period)
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Truncation order `M`.
    pub fn max_order(&self) -> i64 {
        (self.coeffs.len() / 2) as i64
    }

    /// Fraction of `sum |A_n|^2` dropped by the truncation.
    pub fn discarded_mass(&self) -> f64 {
        self.discarded_mass
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        let m = self.max_order();
        if n.abs() > m {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + m) as usize]
        }
    }

    pub fn orders(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.max_order();
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - m, *c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize a mode field of norm {n}")));
        }
        let s = 1.0 / n.sqrt();
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// The same wavefunction displaced by `shift`: `psi(x - shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut f = self.clone();
        f.offset += shift;
        f
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        let frac = ((x - self.offset) / self.period).rem_euclid(1.0);
        self.orders()
            .map(|(n, a)| a * Complex64::cis(2.0 * PI * n as f64 * frac))
            .sum()
    }

    /// One-period inner product `(1/period) int conj(a) b dx = sum conj(A_n) B'_n`,
    /// with `B'` re-referenced to this field's offset.
    pub fn inner(&self, other: &ModeField) -> Result<Complex64> {
        if (self.period - other.period).abs() > 1e-12 * self.period {
            return Err(Error::GridMismatch(format!("periods differ: {} vs {}", self.period, other.period)));
        }
        let delta = (other.offset - self.offset) / self.period;
        let m = self.max_order().min(other.max_order());
        let mut s = Complex64::new(0.0, 0.0);
        for n in -m..=m {
            let b = other.coeff(n);
            let b = if delta == 0.0 { b } else { b * Complex64::cis(-2.0 * PI * n as f64 * delta) };
            s += self.coeff(n).conj() * b;
        }
        Ok(s)
    }

    pub fn fidelity(&self, other: &ModeField) -> Result<f64> {
        let o = self.inner(other)?;
        Ok(o.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Samples the truncated series on `grid`, then applies `taper`.
    ///
    /// The grid must resolve the highest retained order: `dx < period / (2M)`.
    pub fn sample(&self, grid: &GridSpec, taper: Taper) -> Result<SampledField> {
        let m = self.max_order();
        if m > 0 && grid.dx >= self.period / (2.0 * m as f64) {
            return Err(Error::UnderResolved(format!(
                "dx = {} does not resolve order {m} of period {} (need dx < {})",
                grid.dx,
                self.period,
                self.period / (2.0 * m as f64)
            )));
        }
        let mut f = SampledField::from_fn(*grid, |x| self.evaluate(x));
        f.apply_taper(taper);
        Ok(f)
    }
}

/// `(1/period) int_0^period |sum_m P(x - m period)|^2 dx` for the unit cell
/// `P(x) = sum_d c_d S(x - x_d)`.
pub(crate) fn periodic_cell_mass(period: f64, cell: &[(f64, Complex64)], shape: SlitShape) -> f64 {
    let reach = 2.0 * shape.reach();
    let mut total = Complex64::new(0.0, 0.0);
    for &(xa, ca) in cell {
        for &(xb, cb) in cell {
            let s0 = xa - xb;
            let lo = ((s0 - reach) / period).floor() as i64;
            let hi = ((s0 + reach) / period).ceil() as i64;
            let ac: f64 = (lo..=hi).map(|m| shape.autocorrelation(s0 - m as f64 * period)).sum();
            total += ca * cb.conj() * ac;
        }
    }
    total.re / period
}
