use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gauss::gauss_coeffs;
use crate::{Error, Result, NORM_TOL};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Unitary tolerance used by [`QuditUnitary::new`].
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    #[serde(rename = "D")]
    d: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct VectorJson {
    #[serde(rename = "D")]
    d: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Normalized length-D amplitude vector in the Talbot basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorJson", into = "VectorJson")]
pub struct QuditState {
    amps: DVector<Complex64>,
}

impl QuditState {
    /// Rejects vectors that are not unit-norm within [`NORM_TOL`].
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidParameter(format!("qudit dimension must be at least 2, got {}", amps.len())));
        }
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("state norm^2 is {n}, expected 1")));
        }
        Ok(Self { amps: DVector::from_vec(amps) })
    }

    /// Scales `amps` to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize a state of norm^2 {n}")));
        }
        let s = 1.0 / n.sqrt();
        Self::new(amps.into_iter().map(|a| a * s).collect())
    }

    pub fn basis(d: usize, index: usize) -> Result<Self> {
        if index >= d {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range for D={d}")));
        }
        let mut v = vec![ZERO; d];
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::normalized(vec![Complex64::new(1.0, 0.0); d])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl TryFrom<VectorJson> for QuditState {
    type Error = Error;
    fn try_from(j: VectorJson) -> Result<Self> {
        if j.re.len() != j.d || j.im.len() != j.d {
            return Err(Error::Parse(format!("state arrays do not have length D={}", j.d)));
        }
        Self::new(j.re.iter().zip(&j.im).map(|(&r, &i)| Complex64::new(r, i)).collect())
    }
}

impl From<QuditState> for VectorJson {
    fn from(s: QuditState) -> Self {
        VectorJson {
            d: s.dim(),
            re: s.amps.iter().map(|a| a.re).collect(),
            im: s.amps.iter().map(|a| a.im).collect(),
        }
    }
}

/// D x D unitary acting on the Talbot basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct QuditUnitary {
    m: DMatrix<Complex64>,
}

impl QuditUnitary {
    /// Rejects matrices with `max |U^dag U - I| > 1e-12`.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() < 2 {
            return Err(Error::InvalidParameter(format!("need a square matrix of size >= 2, got {}x{}", m.nrows(), m.ncols())));
        }
        let err = unitarity_error(&m);
        if !(err <= UNITARY_TOL) {
            return Err(Error::NotUnitary(err));
        }
        Ok(Self { m })
    }

    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(DMatrix::from_fn(d, d, f))
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(DMatrix::identity(d, d))
    }

    /// Generalized Pauli shift: `X |d> = |d + 1 mod D>`.
    pub fn shift(d: usize) -> Result<Self> {
        Self::from_fn(d, |i, j| if i == (j + 1) % d { Complex64::new(1.0, 0.0) } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.m)
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    /// `self * rhs`; the product of unitaries is re-checked.
    pub fn compose(&self, rhs: &QuditUnitary) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::InvalidParameter(format!("dimension mismatch {} vs {}", self.dim(), rhs.dim())));
        }
        Self::new(&self.m * &rhs.m)
    }

    pub fn apply(&self, state: &QuditState) -> Result<QuditState> {
        Ok(QuditState { amps: self.apply_vector(state.vector())? })
    }

    pub fn apply_vector(&self, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::InvalidParameter(format!("dimension mismatch {} vs {}", self.dim(), v.len())));
        }
        Ok(&self.m * v)
    }

    /// Copy of the matrix scaled so its first entry with modulus above 1e-9
    /// (row-major order) is positive real.
    pub fn phase_fixed(&self) -> DMatrix<Complex64> {
        let pivot = (0..self.dim())
            .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
            .map(|(i, j)| self.m[(i, j)])
            .find(|z| z.norm() > 1e-9)
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        self.m.map(|z| z * phase)
    }

    /// Max entrywise distance after removing the global phase of each.
    pub fn distance_up_to_phase(&self, other: &QuditUnitary) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (self.phase_fixed() - other.phase_fixed()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl TryFrom<MatrixJson> for QuditUnitary {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        let ok = |rows: &Vec<Vec<f64>>| rows.len() == j.d && rows.iter().all(|r| r.len() == j.d);
        if !ok(&j.re) || !ok(&j.im) {
            return Err(Error::Parse(format!("matrix arrays are not {0}x{0}", j.d)));
        }
        Self::from_fn(j.d, |r, c| Complex64::new(j.re[r][c], j.im[r][c]))
    }
}

impl From<QuditUnitary> for MatrixJson {
    fn from(u: QuditUnitary) -> Self {
        let d = u.dim();
        MatrixJson {
            d,
            re: (0..d).map(|r| (0..d).map(|c| u.m[(r, c)].re).collect()).collect(),
            im: (0..d).map(|r| (0..d).map(|c| u.m[(r, c)].im).collect()).collect(),
        }
    }
}

fn unitarity_error(m: &DMatrix<Complex64>) -> f64 {
    let p = m.adjoint() * m;
    let mut err: f64 = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((p[(i, j)] - target).norm());
        }
    }
    err
}

/// `c = 1` for odd `D`, `2` for even `D`: the Talbot gate is free propagation
/// over `2 z_T / (c D)`.
pub fn talbot_c(d: usize) -> usize {
    if d % 2 == 0 {
        2
    } else {
        1
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("qudit dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// `T = sum_{j<D} a_{cj} X^j` with `a = gauss_coeffs(1, cD)`.
pub fn talbot_gate(d: usize) -> Result<QuditUnitary> {
    check_dim(d)?;
    let c = talbot_c(d);
    let a = gauss_coeffs(1, (c * d) as i64)?;
    QuditUnitary::from_fn(d, |row, col| {
        let j = (row + d - col) % d;
        a.a[c * j]
    })
}

/// `Z_theta = diag(exp(i theta_d))`.
pub fn phase_gate(theta: &[f64]) -> Result<QuditUnitary> {
    check_dim(theta.len())?;
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("phases must be finite".into()));
    }
    QuditUnitary::from_fn(theta.len(), |r, c| if r == c { Complex64::cis(theta[r]) } else { ZERO })
}

/// `pi * k / m` reduced to `[0, 2 pi)` from an integer numerator.
fn pi_fraction(k: i128, m: i128) -> f64 {
    PI * k.rem_euclid(2 * m) as f64 / m as f64
}

/// Phase-gate settings preceding the Talbot gate in a CGLMP measurement, in
/// closed form:
///
/// * even `D`: `theta_d = pi/4 - 2 pi gamma d / D - pi d^2 / D`
/// * odd `D`: `theta_d = (pi/4)(D - 1) - 2 pi gamma d / D - pi d^2 (D+1)^2 / D`
///
/// The odd-`D` form does not diagonalize the measurement basis; see
/// [`solved_phases`] and [`MeasurementGate`].
pub fn measurement_phases(d: usize, gamma: f64) -> Result<Vec<f64>> {
    check_dim(d)?;
    let dd = d as i128;
    Ok((0..dd)
        .map(|k| {
            let quad = if d % 2 == 0 { pi_fraction(k * k, dd) } else { pi_fraction(k * k * (dd + 1) * (dd + 1), dd) };
            let lead = if d % 2 == 0 { PI / 4.0 } else { PI / 4.0 * (d as f64 - 1.0) };
            let lin = 2.0 * PI * gamma * k as f64 / d as f64;
            (lead - lin - quad).rem_euclid(2.0 * PI)
        })
        .collect())
}

/// Phases that make `talbot_gate(D) * phase_gate(theta)` send every
/// measurement-basis vector `|f_gamma>` to a single computational state:
/// `theta_d = -arg(a_{c(-d mod D)}) - 2 pi gamma d / D`.
///
/// The Talbot gate is circulant, so it is diagonal in the Fourier basis; these
/// phases cancel the Gauss-sum chirp so that the product acts as a discrete
/// Fourier transform (odd `D`) up to an index permutation.
pub fn solved_phases(d: usize, gamma: f64) -> Result<Vec<f64>> {
    check_dim(d)?;
    let c = talbot_c(d);
    let a = gauss_coeffs(1, (c * d) as i64)?;
    Ok((0..d)
        .map(|k| {
            let coeff = a.a[c * ((d - k) % d)];
            (-coeff.arg() - 2.0 * PI * gamma * k as f64 / d as f64).rem_euclid(2.0 * PI)
        })
        .collect())
}

/// Which party's measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

/// `<d|f_gamma>`: `exp(2 pi i d (f + gamma) / D) / sqrt(D)` for side A and
/// `exp(2 pi i d (-f + gamma) / D) / sqrt(D)` for side B.
pub fn basis_vector(d: usize, gamma: f64, side: Side, f: usize) -> DVector<Complex64> {
    let s = 1.0 / (d as f64).sqrt();
    let sign = match side {
        Side::A => 1.0,
        Side::B => -1.0,
    };
    DVector::from_fn(d, |k, _| Complex64::cis(2.0 * PI * k as f64 * (sign * f as f64 + gamma) / d as f64) * s)
}

/// `U = sum_f |f><f_gamma|`, so `U[f][d] = conj(<d|f_gamma>)`.
pub fn measurement_unitary(d: usize, gamma: f64, side: Side) -> Result<QuditUnitary> {
    check_dim(d)?;
    let cols: Vec<_> = (0..d).map(|f| basis_vector(d, gamma, side, f)).collect();
    QuditUnitary::from_fn(d, |f, k| cols[f][k].conj())
}

/// Where the phases of a [`MeasurementGate`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSource {
    /// [`measurement_phases`] passed the mapping check.
    Printed,
    /// [`measurement_phases`] failed; [`solved_phases`] are used.
    Solved,
}

/// `M = talbot_gate(D) * phase_gate(theta)` together with the detector bin
/// each measurement outcome lands in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementGate {
    pub dim: usize,
    pub gamma: f64,
    pub side: Side,
    pub phases: Vec<f64>,
    pub source: PhaseSource,
    pub unitary: QuditUnitary,
    /// `bin_of_outcome[f]`: computational state reached from `|f_gamma>`.
    pub bin_of_outcome: Vec<usize>,
    /// Inverse permutation of `bin_of_outcome`.
    pub outcome_of_bin: Vec<usize>,
    /// Largest deviation of `|M |f_gamma>|` from a unit basis vector modulus.
    pub mapping_error: f64,
}

/// Tolerance of the mapping check in [`MeasurementGate::new`].
pub const MAPPING_TOL: f64 = 1e-10;

/// Bin reached by each basis vector under `m`, and the worst modulus defect.
pub fn outcome_permutation(m: &QuditUnitary, gamma: f64, side: Side) -> (Vec<usize>, f64) {
    let d = m.dim();
    let mut bins = Vec::with_capacity(d);
    let mut err: f64 = 0.0;
    for f in 0..d {
        let out = m.matrix() * basis_vector(d, gamma, side, f);
        let (arg, peak) = out
            .iter()
            .enumerate()
            .map(|(i, z)| (i, z.norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        err = err.max((peak - 1.0).abs());
        bins.push(arg);
    }
    (bins, err)
}

impl MeasurementGate {
    /// Tries the closed-form phases first and falls back to [`solved_phases`]
    /// when they fail the mapping check.
    pub fn new(d: usize, gamma: f64, side: Side) -> Result<Self> {
        let t = talbot_gate(d)?;
        let printed = Self::with_phases(&t, d, gamma, side, measurement_phases(d, gamma)?, PhaseSource::Printed)?;
        if printed.is_valid() {
            return Ok(printed);
        }
        let solved = Self::with_phases(&t, d, gamma, side, solved_phases(d, gamma)?, PhaseSource::Solved)?;
        if !solved.is_valid() {
            return Err(Error::InvalidParameter(format!(
                "no diagonal phase setting maps the D={d}, gamma={gamma} basis (error {:.3e})",
                solved.mapping_error
            )));
        }
        Ok(solved)
    }

    /// Gate built from the closed-form phases only, valid or not.
    pub fn printed(d: usize, gamma: f64, side: Side) -> Result<Self> {
        Self::with_phases(&talbot_gate(d)?, d, gamma, side, measurement_phases(d, gamma)?, PhaseSource::Printed)
    }

    fn with_phases(t: &QuditUnitary, d: usize, gamma: f64, side: Side, phases: Vec<f64>, source: PhaseSource) -> Result<Self> {
        let unitary = t.compose(&phase_gate(&phases)?)?;
        let (bin_of_outcome, mapping_error) = outcome_permutation(&unitary, gamma, side);
        let mut outcome_of_bin = vec![usize::MAX; d];
        for (f, &b) in bin_of_outcome.iter().enumerate() {
            if outcome_of_bin[b] == usize::MAX {
                outcome_of_bin[b] = f;
            }
        }
        Ok(Self { dim: d, gamma, side, phases, source, unitary, bin_of_outcome, outcome_of_bin, mapping_error })
    }

    /// Mapping error within [`MAPPING_TOL`] and outcomes land in distinct bins.
    pub fn is_valid(&self) -> bool {
        self.mapping_error <= MAPPING_TOL && self.outcome_of_bin.iter().all(|&f| f < self.dim)
    }

    /// Outcome probabilities `P(f)` for a state, read through the bin map.
    pub fn outcome_probabilities(&self, state: &DVector<Complex64>) -> Vec<f64> {
        let out = self.unitary.matrix() * state;
        (0..self.dim).map(|f| out[self.bin_of_outcome[f]].norm_sqr()).collect()
    }
}
