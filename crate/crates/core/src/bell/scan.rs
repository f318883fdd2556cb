use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analytic::bell_analytic;
use super::cglmp::{BellResult, Convention, MeasurementSettings};
use super::field::{bell_field, FieldRouteConfig};
use crate::field::SlitShape;
use crate::qudit::TalbotGeometry;
use crate::spdc::{entangled_coeffs, BiphotonGaussian, CoeffMatrix};
use crate::{Error, Result};

/// Source widths for one scan curve. `kappa_minus = 0` is the perfectly
/// correlated limit `R = 1`, where the coefficients are `I / sqrt(D)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanModel {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
}

impl ScanModel {
    pub fn new(kappa_plus: f64, kappa_minus: f64) -> Result<Self> {
        if !(kappa_plus.is_finite() && kappa_plus > 0.0) || !(kappa_minus.is_finite() && kappa_minus >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need kappa_plus > 0 and kappa_minus >= 0, got {kappa_plus}, {kappa_minus}"
            )));
        }
        Ok(Self { kappa_plus, kappa_minus })
    }

    pub fn from_correlation(kappa_plus: f64, r: f64) -> Result<Self> {
        if r == 1.0 {
            return Self::new(kappa_plus, 0.0);
        }
        let m = BiphotonGaussian::from_correlation(kappa_plus, r)?;
        Self::new(m.kappa_plus, m.kappa_minus)
    }

    pub fn correlation_r(&self) -> f64 {
        if self.kappa_minus == 0.0 {
            1.0
        } else {
            BiphotonGaussian { kappa_plus: self.kappa_plus, kappa_minus: self.kappa_minus }.correlation_r()
        }
    }

    pub fn coeffs(&self, d: usize, spacing: f64) -> Result<CoeffMatrix> {
        if self.kappa_minus == 0.0 {
            CoeffMatrix::maximally_entangled(d)
        } else {
            entangled_coeffs(d, spacing, &BiphotonGaussian::new(self.kappa_plus, self.kappa_minus)?)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    #[default]
    Analytic,
    Field,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Analytic => "analytic",
            Route::Field => "field",
        }
    }
}

/// Talbot geometry used by the field route for a `D`-slit measurement:
/// period `D * spacing`, Gaussian slits of width `slit_fraction * period`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldGeometry {
    pub slit_fraction: f64,
    /// Wavelength in units of the period.
    pub wavelength_fraction: f64,
    pub sampling: FieldRouteConfig,
}

impl Default for FieldGeometry {
    fn default() -> Self {
        Self { slit_fraction: 0.05, wavelength_fraction: 1.0 / 64.0, sampling: FieldRouteConfig::default() }
    }
}

impl FieldGeometry {
    pub fn geometry(&self, d: usize, spacing: f64) -> Result<TalbotGeometry> {
        let period = d as f64 * spacing;
        TalbotGeometry::new(period, SlitShape::gaussian(self.slit_fraction * period)?, d, self.wavelength_fraction * period)
    }
}

/// One CGLMP evaluation for a source model and dimension.
pub fn bell_for_model(
    model: &ScanModel,
    d: usize,
    spacing: f64,
    route: Route,
    field: &FieldGeometry,
    settings: MeasurementSettings,
    convention: Convention,
) -> Result<BellResult> {
    let c = model.coeffs(d, spacing)?;
    match route {
        Route::Analytic => bell_analytic(&c, settings, convention),
        Route::Field => bell_field(&c, &field.geometry(d, spacing)?, &field.sampling, settings, convention),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub dims: Vec<usize>,
    pub models: Vec<ScanModel>,
    pub spacing: f64,
    pub route: Route,
    pub field: FieldGeometry,
    pub settings: MeasurementSettings,
    pub convention: Convention,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            dims: (2..=12).collect(),
            models: [1.0, 0.99998, 0.9998, 0.998]
                .iter()
                .map(|&r| ScanModel::from_correlation(9.0, r).expect("valid correlation"))
                .collect(),
            spacing: 1.0,
            route: Route::Analytic,
            field: FieldGeometry::default(),
            settings: MeasurementSettings::default(),
            convention: Convention::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "D")]
    pub dim: usize,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub route: Route,
    #[serde(rename = "I_D")]
    pub i_d: f64,
}

/// `I_D` for every (model, D) pair, models outermost, in input order. The
/// analytic route runs in parallel; the field route runs one point at a time
/// to bound memory.
pub fn bell_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    if spec.dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter("scan dimensions must be at least 2".into()));
    }
    let jobs: Vec<(ScanModel, usize)> =
        spec.models.iter().flat_map(|m| spec.dims.iter().map(move |&d| (*m, d))).collect();
    let run = |(m, d): &(ScanModel, usize)| -> Result<ScanRow> {
        let r = bell_for_model(m, *d, spec.spacing, spec.route, &spec.field, spec.settings, spec.convention)?;
        Ok(ScanRow {
            dim: *d,
            kappa_plus: m.kappa_plus,
            kappa_minus: m.kappa_minus,
            r: m.correlation_r(),
            route: spec.route,
            i_d: r.i_d,
        })
    };
    match spec.route {
        Route::Analytic => jobs.par_iter().map(run).collect(),
        Route::Field => jobs.iter().map(run).collect(),
    }
}

pub const SCAN_CSV_HEADER: &str = "D,kappa_plus,kappa_minus,R,route,I_D";

pub fn write_scan_csv<W: Write>(mut w: W, rows: &[ScanRow], comment: Option<&str>) -> Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{SCAN_CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{},{}", r.dim, r.kappa_plus, r.kappa_minus, r.r, r.route.name(), r.i_d)?;
    }
    Ok(())
}

/// Dimension with the largest `I_D` among `rows` for one model.
pub fn best_dimension(rows: &[ScanRow], model: &ScanModel) -> Option<usize> {
    rows.iter()
        .filter(|r| r.kappa_plus == model.kappa_plus && r.kappa_minus == model.kappa_minus)
        .max_by(|a, b| a.i_d.total_cmp(&b.i_d))
        .map(|r| r.dim)
}
