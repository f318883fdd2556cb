use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Normalization tolerance for joint-probability tables.
pub const TABLE_TOL: f64 = 1e-9;

/// Measurement settings `alpha_{1,2}` (Alice) and `beta_{1,2}` (Bob).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasurementSettings {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl Default for MeasurementSettings {
    fn default() -> Self {
        Self { alpha1: 0.0, alpha2: 0.5, beta1: 0.25, beta2: -0.25 }
    }
}

impl MeasurementSettings {
    /// `(alpha, beta)` for the four tables in the order
    /// `(A1,B1), (A1,B2), (A2,B1), (A2,B2)`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [(self.alpha1, self.beta1), (self.alpha1, self.beta2), (self.alpha2, self.beta1), (self.alpha2, self.beta2)]
    }
}

/// How outcome coincidences `A = B + k` are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `P(A = B + k) = sum_j P(A = j + k, B = j)` on the outcome labels.
    #[default]
    Standard,
    /// `P(A = B + k) = sum_j P(A = -j, B = j + k)`: Bob's labels are negated
    /// first, as for a source whose outcomes are anti-correlated.
    AntiCorrelated,
}

/// Joint outcome probabilities `P(f_A, f_B)`, row index `f_A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    #[serde(rename = "D")]
    pub dim: usize,
    pub p: Vec<Vec<f64>>,
}

impl JointTable {
    /// Rejects negative entries and sums off 1 by more than [`TABLE_TOL`].
    pub fn new(p: Vec<Vec<f64>>) -> Result<Self> {
        let d = p.len();
        if d < 2 || p.iter().any(|r| r.len() != d) {
            return Err(Error::NonNormalized(format!("table must be DxD with D >= 2, got {d} rows")));
        }
        if p.iter().flatten().any(|v| !v.is_finite() || *v < -TABLE_TOL) {
            return Err(Error::NonNormalized("table has negative or non-finite entries".into()));
        }
        let total: f64 = p.iter().flatten().sum();
        if (total - 1.0).abs() > TABLE_TOL {
            return Err(Error::NonNormalized(format!("entries sum to {total}")));
        }
        Ok(Self { dim: d, p })
    }

    /// Divides by the total before validating.
    pub fn normalized(mut p: Vec<Vec<f64>>) -> Result<Self> {
        let total: f64 = p.iter().flatten().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::NonNormalized(format!("entries sum to {total}")));
        }
        p.iter_mut().flatten().for_each(|v| *v /= total);
        Self::new(p)
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a][b]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        self.p.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        (0..self.dim).map(|b| self.p.iter().map(|r| r[b]).sum()).collect()
    }

    /// `P(A = B + k mod D)` under `convention`.
    pub fn prob_a_eq_b_plus(&self, k: i64, convention: Convention) -> f64 {
        let d = self.dim as i64;
        let mut s = 0.0;
        for b in 0..d {
            let label_b = match convention {
                Convention::Standard => b,
                Convention::AntiCorrelated => (-b).rem_euclid(d),
            };
            let a = (label_b + k).rem_euclid(d);
            s += self.p[a as usize][b as usize];
        }
        s
    }

    /// `P(B = A + k) = P(A = B - k)`.
    pub fn prob_b_eq_a_plus(&self, k: i64, convention: Convention) -> f64 {
        self.prob_a_eq_b_plus(-k, convention)
    }
}

/// Largest change of one party's marginal when the other party switches
/// setting. Tables in the order of [`MeasurementSettings::pairs`].
pub fn no_signaling_violation(tables: &[JointTable; 4]) -> f64 {
    let diff = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let [t11, t12, t21, t22] = tables;
    diff(t11.marginal_a(), t12.marginal_a())
        .max(diff(t21.marginal_a(), t22.marginal_a()))
        .max(diff(t11.marginal_b(), t21.marginal_b()))
        .max(diff(t12.marginal_b(), t22.marginal_b()))
}

/// Outcome of one CGLMP evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellResult {
    #[serde(rename = "D")]
    pub dim: usize,
    pub settings: MeasurementSettings,
    pub convention: Convention,
    /// `(A1,B1), (A1,B2), (A2,B1), (A2,B2)`.
    pub tables: [JointTable; 4],
    pub j: Vec<f64>,
    pub i_d: f64,
    pub no_signaling: f64,
    /// Free-form record of how the tables were produced.
    pub provenance: serde_json::Value,
}

/// CGLMP expression
/// `I_D = sum_{k < floor(D/2)} (1 - 2k/(D-1)) J_k` with
///
/// ```text
/// J_k = P(A1 = B1 + k) - P(A1 = B1 - k - 1)
///     + P(B2 = A1 + k) - P(B2 = A1 - k - 1)
///     + P(B1 = A2 + k + 1) - P(B1 = A2 - k)
///     + P(A2 = B2 + k) - P(A2 = B2 - k - 1)
/// ```
#[allow(non_snake_case)]
pub fn cglmp_I(
    tables: [JointTable; 4],
    settings: MeasurementSettings,
    convention: Convention,
    provenance: serde_json::Value,
) -> Result<BellResult> {
    let d = tables[0].dim;
    for t in &tables {
        if t.dim != d {
            return Err(Error::NonNormalized(format!("tables of mixed dimension {} and {d}", t.dim)));
        }
        if (t.total() - 1.0).abs() > TABLE_TOL {
            return Err(Error::NonNormalized(format!("table sums to {}", t.total())));
        }
    }
    let [t11, t12, t21, t22] = &tables;
    let c = convention;
    let j: Vec<f64> = (0..(d / 2) as i64)
        .map(|k| {
            t11.prob_a_eq_b_plus(k, c) - t11.prob_a_eq_b_plus(-k - 1, c)
                + t12.prob_b_eq_a_plus(k, c) - t12.prob_b_eq_a_plus(-k - 1, c)
                + t21.prob_b_eq_a_plus(k + 1, c) - t21.prob_b_eq_a_plus(-k, c)
                + t22.prob_a_eq_b_plus(k, c) - t22.prob_a_eq_b_plus(-k - 1, c)
        })
        .collect();
    let i_d = j
        .iter()
        .enumerate()
        .map(|(k, jk)| (1.0 - 2.0 * k as f64 / (d as f64 - 1.0)) * jk)
        .sum();
    let no_signaling = no_signaling_violation(&tables);
    Ok(BellResult { dim: d, settings, convention, tables, j, i_d, no_signaling, provenance })
}
