use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use super::cglmp::{cglmp_I, BellResult, Convention, JointTable, MeasurementSettings};
use crate::qudit::{measurement_unitary, MeasurementGate, Side};
use crate::spdc::CoeffMatrix;
use crate::{Error, Result};

fn check_dim(c: &CoeffMatrix) -> Result<usize> {
    let d = c.dim();
    if d < 2 {
        return Err(Error::InvalidParameter(format!("Bell tests need D >= 2, got {d}")));
    }
    Ok(d)
}

fn table_from_amplitudes(amp: &DMatrix<Complex64>, rows: &[usize], cols: &[usize]) -> Result<JointTable> {
    JointTable::new(rows.iter().map(|&r| cols.iter().map(|&c| amp[(r, c)].norm_sqr()).collect()).collect())
}

/// `P(f_A, f_B) = |(U_A C U_B^T)[f_A][f_B]|^2` with the closed-form
/// measurement unitaries.
pub fn joint_prob_analytic(c: &CoeffMatrix, alpha: f64, beta: f64) -> Result<JointTable> {
    let d = check_dim(c)?;
    let ua = measurement_unitary(d, alpha, Side::A)?;
    let ub = measurement_unitary(d, beta, Side::B)?;
    let amp = ua.matrix() * c.matrix() * ub.matrix().transpose();
    let ids: Vec<usize> = (0..d).collect();
    table_from_amplitudes(&amp, &ids, &ids)
}

/// Same table computed with `talbot_gate * phase_gate` on each side, read
/// through each gate's outcome-to-bin map.
pub fn joint_prob_gate(c: &CoeffMatrix, alpha: f64, beta: f64) -> Result<JointTable> {
    let d = check_dim(c)?;
    let ma = MeasurementGate::new(d, alpha, Side::A)?;
    let mb = MeasurementGate::new(d, beta, Side::B)?;
    let amp = ma.unitary.matrix() * c.matrix() * mb.unitary.matrix().transpose();
    table_from_amplitudes(&amp, &ma.bin_of_outcome, &mb.bin_of_outcome)
}

/// CGLMP value of a coefficient matrix by the matrix route.
pub fn bell_analytic(c: &CoeffMatrix, settings: MeasurementSettings, convention: Convention) -> Result<BellResult> {
    let tables = settings.pairs().map(|(a, b)| joint_prob_analytic(c, a, b));
    let [t0, t1, t2, t3] = tables;
    let provenance = json!({ "route": "analytic", "coefficients": c });
    cglmp_I([t0?, t1?, t2?, t3?], settings, convention, provenance)
}
