use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::cglmp::{cglmp_I, BellResult, Convention, JointTable, MeasurementSettings};
use crate::field::{fresnel_propagate_axis, Axis, BiphotonField, GridSpec, Taper};
use crate::qudit::{encode, BinMap, MeasurementGate, QuditState, Side, TalbotGeometry};
use crate::spdc::CoeffMatrix;
use crate::{Error, Result};

/// Sampling of the two-photon field for the simulated route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldRouteConfig {
    pub samples_per_period: usize,
    pub periods: usize,
    /// Raised-cosine edge taper width, in periods.
    pub taper_periods: f64,
}

impl Default for FieldRouteConfig {
    fn default() -> Self {
        Self { samples_per_period: 64, periods: 64, taper_periods: 8.0 }
    }
}

impl FieldRouteConfig {
    pub fn grid(&self, geom: &TalbotGeometry) -> Result<GridSpec> {
        geom.grid(self.samples_per_period, self.periods)
    }

    pub fn taper(&self, geom: &TalbotGeometry) -> Taper {
        if self.taper_periods > 0.0 {
            Taper::RaisedCosine { width: self.taper_periods * geom.period }
        } else {
            Taper::None
        }
    }
}

/// `sum C[d1][d2] T_{d1}(x1) T_{d2}(x2)` with `T_d` the periodic Talbot basis
/// combs of `geom`, tapered per axis and normalized.
pub fn ideal_biphoton(c: &CoeffMatrix, geom: &TalbotGeometry, grid: GridSpec, taper: Taper) -> Result<BiphotonField> {
    if c.dim() != geom.dim {
        return Err(Error::InvalidParameter(format!("{}x{} coefficients for D={}", c.dim(), c.dim(), geom.dim)));
    }
    let modes: Vec<Vec<Complex64>> = (0..geom.dim)
        .map(|d| Ok(encode(&QuditState::basis(geom.dim, d)?, geom)?.sample(&grid, taper)?.into_values()))
        .collect::<Result<_>>()?;
    BiphotonField::from_mode_sum(grid, grid, &c.rows(), &modes, &modes)?.normalized()
}

/// Field-route table with binning diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldTable {
    pub table: JointTable,
    /// Binned probability before renormalization.
    pub captured: f64,
    /// Per-axis fraction of the power within a quarter bin of a bin edge.
    pub crosstalk: [f64; 2],
}

/// Piecewise-constant phase mask: `exp(i theta_d)` across the whole bin of
/// slit `d`.
fn phase_mask(grid: &GridSpec, geom: &TalbotGeometry, theta: &[f64]) -> Vec<Complex64> {
    let step = geom.step();
    grid.coords()
        .map(|x| {
            let b = (((x - geom.origin) / step + 0.5).floor() as i64).rem_euclid(geom.dim as i64) as usize;
            Complex64::cis(theta[b])
        })
        .collect()
}

/// Simulated measurement: phase mask and free propagation over the Talbot
/// gate distance on each photon, then 2-D detector binning. Outcome labels
/// come from each gate's outcome-to-bin map.
pub fn joint_prob_field(
    mut psi: BiphotonField,
    gamma_a: f64,
    gamma_b: f64,
    geom: &TalbotGeometry,
) -> Result<FieldTable> {
    let d = geom.dim;
    let spec = geom.gate_distance()?;
    let gates = [MeasurementGate::new(d, gamma_a, Side::A)?, MeasurementGate::new(d, gamma_b, Side::B)?];
    for (axis, gate) in [Axis::First, Axis::Second].into_iter().zip(&gates) {
        let mask = phase_mask(psi.grid(axis), geom, &gate.phases);
        psi.scale_axis(axis, &mask)?;
        fresnel_propagate_axis(&mut psi, axis, &spec)?;
    }
    let (g1, g2) = (*psi.grid(Axis::First), *psi.grid(Axis::Second));
    let m1 = BinMap::new(&g1, geom)?;
    let m2 = BinMap::new(&g2, geom)?;
    let n2 = g2.n;
    let parts2: Vec<[(usize, f64); 2]> = (0..n2).map(|j| m2.parts(j)).collect();
    let (bins, edge1, edge2) = psi
        .values()
        .par_chunks(n2)
        .enumerate()
        .fold(
            || (vec![0.0; d * d], 0.0, 0.0),
            |(mut acc, mut e1, mut e2), (i, row)| {
                let p1 = m1.parts(i);
                let mut row_total = 0.0;
                for (j, v) in row.iter().enumerate() {
                    let p = v.norm_sqr();
                    row_total += p;
                    if m2.is_edge(j) {
                        e2 += p;
                    }
                    for (b2, w2) in parts2[j] {
                        let pw = p * w2;
                        acc[p1[0].0 * d + b2] += pw * p1[0].1;
                        acc[p1[1].0 * d + b2] += pw * p1[1].1;
                    }
                }
                if m1.is_edge(i) {
                    e1 += row_total;
                }
                (acc, e1, e2)
            },
        )
        .reduce(
            || (vec![0.0; d * d], 0.0, 0.0),
            |(mut a, e1, e2), (b, f1, f2)| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                (a, e1 + f1, e2 + f2)
            },
        );
    let cell = g1.dx * g2.dx;
    let total: f64 = bins.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("no power reached the detectors".into()));
    }
    let p: Vec<Vec<f64>> = (0..d)
        .map(|fa| (0..d).map(|fb| bins[gates[0].bin_of_outcome[fa] * d + gates[1].bin_of_outcome[fb]]).collect())
        .collect();
    Ok(FieldTable {
        table: JointTable::normalized(p)?,
        captured: total * cell,
        crosstalk: [edge1 / total, edge2 / total],
    })
}

/// CGLMP value of a coefficient matrix by full field simulation.
pub fn bell_field(
    c: &CoeffMatrix,
    geom: &TalbotGeometry,
    cfg: &FieldRouteConfig,
    settings: MeasurementSettings,
    convention: Convention,
) -> Result<BellResult> {
    let grid = cfg.grid(geom)?;
    let psi = ideal_biphoton(c, geom, grid, cfg.taper(geom))?;
    let mut tables = Vec::with_capacity(4);
    let mut diagnostics = Vec::with_capacity(4);
    for (a, b) in settings.pairs() {
        let ft = joint_prob_field(psi.clone(), a, b, geom)?;
        diagnostics.push(json!({ "alpha": a, "beta": b, "captured": ft.captured, "crosstalk": ft.crosstalk }));
        tables.push(ft.table);
    }
    let tables: [JointTable; 4] = tables.try_into().expect("four settings");
    let provenance = json!({
        "route": "field",
        "coefficients": c,
        "geometry": geom,
        "grid": grid,
        "sampling": cfg,
        "gate_distance": geom.gate_distance()?.distance,
        "bins": diagnostics,
    });
    cglmp_I(tables, settings, convention, provenance)
}
