//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub fn psi(kp: f64, km: f64, x1: f64, x2: f64) -> f64 {
    let (u, v) = (x1 + x2, x1 - x2);
    (-u * u / (4.0 * kp * kp) - v * v / (4.0 * km * km)).exp()
}

/// `C[d1][d2] = int int Psi(x1, x2) S(x1 - x_d1) S(x2 - x_d2)` by a 2-D
/// midpoint rule over +-7 slit widths, normalized.
pub fn projected_coeffs(d: usize, s: f64, width: f64, kp: f64, km: f64) -> Vec<Vec<f64>> {
    let n = 141;
    let h = 14.0 * width / n as f64;
    let offsets: Vec<f64> = (0..n).map(|i| -7.0 * width + (i as f64 + 0.5) * h).collect();
    let slit: Vec<f64> = offsets.iter().map(|t| (-t * t / (2.0 * width * width)).exp()).collect();
    let centre = |k: usize| (k as f64 - (d as f64 - 1.0) / 2.0) * s;
    let mut c = vec![vec![0.0; d]; d];
    for (a, row) in c.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, t1) in offsets.iter().enumerate() {
                for (j, t2) in offsets.iter().enumerate() {
                    acc += psi(kp, km, centre(a) + t1, centre(b) + t2) * slit[i] * slit[j];
                }
            }
            *v = acc * h * h;
        }
    }
    let norm = c.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    c.iter_mut().flatten().for_each(|v| *v /= norm);
    c
}
