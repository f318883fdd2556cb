use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fractional-revival weights: at `z = 2(s + q/r) z_T` a periodic field
/// becomes `sum_j a_j psi(x - j period / r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussCoeffs {
    pub q: i64,
    pub r: i64,
    pub a: Vec<Complex64>,
}

impl GaussCoeffs {
    /// `a_j` with `j` taken modulo `r`.
    pub fn get(&self, j: i64) -> Complex64 {
        self.a[j.rem_euclid(self.r) as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `exp(-2 pi i k / r)` for integer `k`.
fn root_of_unity(k: i128, r: i128) -> Complex64 {
    let k = k.rem_euclid(r);
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::cis(-2.0 * PI * k as f64 / r as f64)
}

/// `a_j = (1/r) sum_{n=0}^{r-1} exp(-2 pi i (q n^2 - j n) / r)`.
///
/// The exponent is reduced modulo `r` in integer arithmetic before the
/// complex exponential is taken, so large `r` stays accurate.
pub fn gauss_coeffs(q: i64, r: i64) -> Result<GaussCoeffs> {
    if r < 1 {
        return Err(Error::InvalidParameter(format!("r must be at least 1, got {r}")));
    }
    if q < 1 {
        return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
    }
    if gcd(q, r) != 1 {
        return Err(Error::NotCoprime { q, r });
    }
    let (qi, ri) = (q as i128, r as i128);
    let a = (0..ri)
        .map(|j| {
            let s: Complex64 = (0..ri).map(|n| root_of_unity(qi * n * n - j * n, ri)).sum();
            s / r as f64
        })
        .collect();
    Ok(GaussCoeffs { q, r, a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn small_cases() {
        let g = gauss_coeffs(1, 1).unwrap();
        assert!(close(g.a[0], Complex64::new(1.0, 0.0)));
        let g = gauss_coeffs(1, 2).unwrap();
        assert!(close(g.a[0], Complex64::new(0.0, 0.0)));
        assert!(close(g.a[1], Complex64::new(1.0, 0.0)));
        let g = gauss_coeffs(1, 4).unwrap();
        let expected = [
            Complex64::new(0.5, -0.5),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.5),
            Complex64::new(0.0, 0.0),
        ];
        for (a, e) in g.a.iter().zip(expected) {
            assert!(close(*a, e));
        }
    }

    #[test]
    fn not_coprime() {
        assert!(matches!(gauss_coeffs(2, 4), Err(Error::NotCoprime { q: 2, r: 4 })));
        assert!(gauss_coeffs(0, 3).is_err());
        assert!(gauss_coeffs(1, 0).is_err());
    }

    #[test]
    fn even_r_odd_entries_vanish() {
        for d in [2, 4, 6, 8] {
            let g = gauss_coeffs(1, 2 * d).unwrap();
            for j in (1..2 * d).step_by(2) {
                assert!(g.get(j).norm() < 1e-12, "D={d} j={j}");
            }
        }
    }

    #[test]
    fn large_r_stays_normalized() {
        let g = gauss_coeffs(7, 1009).unwrap();
        assert!((g.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fractional_revival_is_weighted_sum_of_shifts() {
        use crate::field::{mode_propagate, ModeField, PropagationSpec, SlitShape, TruncationRule};
        let shape = SlitShape::gaussian(0.03).unwrap();
        let cell = [(0.1, Complex64::new(1.0, 0.0)), (0.45, Complex64::new(0.0, 0.6))];
        let f = ModeField::from_cell(1.0, 0.0, &cell, shape, TruncationRule::default()).unwrap();
        for (q, r) in [(1, 3), (2, 5), (3, 4), (1, 6), (5, 7)] {
            let g = gauss_coeffs(q, r).unwrap();
            let spec = PropagationSpec::talbot(0.3, 1.0, 2 * q as u64, r as u64).unwrap();
            let out = mode_propagate(&f, &spec).unwrap();
            for x in [0.0, 0.13, 0.37, 0.71] {
                let shifted: Complex64 = (0..r).map(|j| g.a[j as usize] * f.evaluate(x - j as f64 / r as f64)).sum();
                assert!((out.evaluate(x) - shifted).norm() < 1e-10, "q={q} r={r} x={x}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn unit_mass(q in 1i64..40, r in 1i64..60) {
            proptest::prop_assume!(gcd(q, r) == 1);
            let g = gauss_coeffs(q, r).unwrap();
            proptest::prop_assert!((g.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
