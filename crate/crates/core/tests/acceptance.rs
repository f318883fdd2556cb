//! Acceptance suite: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each. Runs without the libtest harness so the lines are
//! visible in plain `cargo test` output; exits non-zero if any criterion
//! fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use talbot_core::bell::{
    bell_analytic, bell_for_model, bell_scan, best_dimension, no_signaling_violation, BellResult, Convention,
    FieldGeometry, MeasurementSettings, Route, ScanModel, ScanSpec, TABLE_TOL,
};
use talbot_core::constraints::{report, HardwareSpec, DEFAULT_SLIT_THRESHOLD};
use talbot_core::field::{
    fresnel_propagate, mode_propagate, GridSpec, ModeField, PropagationSpec, SlitShape, Taper, TruncationRule,
};
use talbot_core::qudit::{basis_vector, gauss_coeffs, talbot_gate, MeasurementGate, PhaseSource, Side};
use talbot_core::spdc::{entangled_coeffs, BiphotonGaussian, CoeffMatrix};

/// Frozen brute-force value of `I_3` for the maximally entangled state.
const I3_ORACLE: f64 = 2.8729340511723374;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Every Bell evaluation made by the suite, for the table invariants.
#[derive(Default)]
struct Ledger {
    results: Vec<BellResult>,
}

// ---------------------------------------------------------------------------
// 1. Gauss sums and the Talbot gate.

/// `a_j = (1/r) sum_n exp(-2 pi i (q n^2 - j n) / r)` summed directly.
fn gauss_direct(q: i64, r: i64) -> Vec<Complex64> {
    (0..r)
        .map(|j| {
            (0..r)
                .map(|n| Complex64::cis(-2.0 * PI * ((q * n * n - j * n) as f64) / r as f64))
                .sum::<Complex64>()
                / r as f64
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut worst_mass: f64 = 0.0;
    let mut worst_unitary: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for d in 2..=8i64 {
        let c = if d % 2 == 0 { 2 } else { 1 };
        let a = gauss_coeffs(1, c * d).unwrap();
        worst_mass = worst_mass.max((a.a.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs());
        for (x, y) in a.a.iter().zip(gauss_direct(1, c * d)) {
            worst_oracle = worst_oracle.max((x - y).norm());
        }
        worst_unitary = worst_unitary.max(talbot_gate(d as usize).unwrap().unitarity_error());
    }
    let a = gauss_coeffs(1, 4).unwrap();
    let expected = [Complex64::new(0.5, -0.5), Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.5), Complex64::new(0.0, 0.0)];
    let r4 = a.a.iter().zip(expected).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let r4_oracle = gauss_direct(1, 4).iter().zip(expected).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    outcome(
        worst_mass <= 1e-12 && worst_unitary <= 1e-12 && r4 <= 1e-12 && r4_oracle <= 1e-12 && worst_oracle <= 1e-12,
        format!(
            "max |sum|a|^2 - 1| = {worst_mass:.1e}, max unitarity error = {worst_unitary:.1e}, \
             (q=1,r=4) error = {r4:.1e}, vs direct sum = {worst_oracle:.1e}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. Revival at z = 2 z_T.

fn criterion_2() -> Outcome {
    let (period, lambda) = (1.0, 1.0 / 64.0);
    let grating = ModeField::from_cell(
        period,
        0.0,
        &[(0.0, Complex64::new(1.0, 0.0))],
        SlitShape::gaussian(0.05).unwrap(),
        TruncationRule::default(),
    )
    .unwrap()
    .normalized()
    .unwrap();
    let revived = mode_propagate(&grating, &PropagationSpec::talbot(lambda, period, 2, 1).unwrap()).unwrap();
    let identical = revived.coeffs() == grating.coeffs();
    let mode_fidelity = grating.fidelity(&revived).unwrap();

    // Numeric distance, not the exact-fraction path.
    let z = 2.0 * period * period / lambda;
    let spec = PropagationSpec::new(lambda, z).unwrap();
    let grid = GridSpec::periodic(period, 64, 128).unwrap();
    let plain = grating.sample(&grid, Taper::None).unwrap().normalized().unwrap();
    let plain_f = plain.fidelity(&fresnel_propagate(&plain, &spec).unwrap()).unwrap();
    let tapered = grating.sample(&grid, Taper::RaisedCosine { width: 8.0 * period }).unwrap().normalized().unwrap();
    let out = fresnel_propagate(&tapered, &spec).unwrap();
    let (start, len) = (16 * 64, 96 * 64);
    let tapered_f = tapered.crop(start, len).unwrap().fidelity(&out.crop(start, len).unwrap()).unwrap();
    outcome(
        identical && mode_fidelity >= 1.0 - 1e-15 && plain_f >= 0.999 && tapered_f >= 0.999,
        format!(
            "mode coefficients bit-identical = {identical} (fidelity {mode_fidelity}), \
             sampled 128-period window fidelity = {plain_f:.12}, tapered window interior = {tapered_f:.6}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. Measurement mapping.

fn criterion_3() -> Outcome {
    let s = MeasurementSettings::default();
    let gammas = [(s.alpha1, Side::A), (s.alpha2, Side::A), (s.beta1, Side::B), (s.beta2, Side::B)];
    let mut worst: f64 = 0.0;
    let mut printed_failures = Vec::new();
    let mut fallback_ok = true;
    for d in 2..=7 {
        for (gamma, side) in gammas {
            let printed = MeasurementGate::printed(d, gamma, side).unwrap();
            let gate = MeasurementGate::new(d, gamma, side).unwrap();
            if !printed.is_valid() {
                printed_failures.push(format!("D={d} gamma={gamma}"));
                fallback_ok &= gate.source == PhaseSource::Solved;
            }
            for f in 0..d {
                let out = gate.unitary.matrix() * basis_vector(d, gamma, side, f);
                let mut mods: Vec<f64> = out.iter().map(|z| z.norm()).collect();
                mods.sort_by(|a, b| b.total_cmp(a));
                worst = worst.max((mods[0] - 1.0).abs());
                worst = worst.max(mods[1..].iter().copied().fold(0.0, f64::max));
            }
        }
    }
    let odd_only = printed_failures.iter().all(|s| {
        let d: usize = s[2..s.find(' ').unwrap()].parse().unwrap();
        d % 2 == 1
    });
    let log = if printed_failures.is_empty() {
        "closed-form phases valid everywhere".to_string()
    } else {
        format!(
            "closed-form phases fail for {} of 24 gates ({}); solved phases used there",
            printed_failures.len(),
            if odd_only { "odd D only" } else { "including even D" }
        )
    };
    outcome(worst <= 1e-10 && fallback_ok, format!("max column defect = {worst:.1e}; {log}"))
}

// ---------------------------------------------------------------------------
// 4. CGLMP calibration.

/// Independent brute force: amplitudes `<f_A| <f_B| psi>` from the basis
/// kernels and the CGLMP sum written out term by term.
fn i_d_brute_force(d: usize) -> f64 {
    let s = MeasurementSettings::default();
    let df = d as f64;
    let table = |alpha: f64, beta: f64| -> Vec<Vec<f64>> {
        (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| {
                        let mut amp = Complex64::new(0.0, 0.0);
                        for k in 0..d {
                            let ka = Complex64::cis(2.0 * PI * k as f64 * (a as f64 + alpha) / df);
                            let kb = Complex64::cis(2.0 * PI * k as f64 * (-(b as f64) + beta) / df);
                            amp += (ka * kb).conj() / df / df.sqrt();
                        }
                        amp.norm_sqr()
                    })
                    .collect()
            })
            .collect()
    };
    let p = |t: &Vec<Vec<f64>>, k: i64| -> f64 {
        // P(A = B + k)
        (0..d as i64).map(|b| t[((b + k).rem_euclid(d as i64)) as usize][b as usize]).sum()
    };
    let (t11, t12, t21, t22) =
        (table(s.alpha1, s.beta1), table(s.alpha1, s.beta2), table(s.alpha2, s.beta1), table(s.alpha2, s.beta2));
    let mut total = 0.0;
    for k in 0..(d / 2) as i64 {
        let j = p(&t11, k) - p(&t11, -k - 1) + p(&t12, -k) - p(&t12, k + 1) + p(&t21, -k - 1) - p(&t21, k)
            + p(&t22, k)
            - p(&t22, -k - 1);
        total += (1.0 - 2.0 * k as f64 / (df - 1.0)) * j;
    }
    total
}

fn criterion_4(ledger: &mut Ledger) -> Outcome {
    let mut values = Vec::new();
    for d in 2..=8 {
        let r = bell_analytic(&CoeffMatrix::maximally_entangled(d).unwrap(), MeasurementSettings::default(), Convention::Standard)
            .unwrap();
        values.push(r.i_d);
        ledger.results.push(r);
    }
    let i2_ok = (values[0] - 2.828427).abs() <= 1e-6;
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let bounded = values.iter().all(|v| *v < 2.9681);
    let brute = i_d_brute_force(3);
    let i3_ok = (values[1] - brute).abs() <= 1e-6 && (brute - I3_ORACLE).abs() <= 1e-6;
    let brute_all = (2..=8).map(|d| (values[d - 2] - i_d_brute_force(d)).abs()).fold(0.0, f64::max);
    outcome(
        i2_ok && increasing && bounded && i3_ok && brute_all <= 1e-6,
        format!(
            "I_2 = {:.9}, I_3 = {:.12} (brute force {brute:.12}), I_8 = {:.9}, strictly increasing = {increasing}, \
             max |route - brute force| over D=2..8 = {brute_all:.1e}",
            values[0], values[1], values[6]
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. Field route against the matrix route.

fn criterion_5(ledger: &mut Ledger) -> Outcome {
    let model = ScanModel::new(9.0, 0.0).unwrap();
    let geometry = FieldGeometry::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [2, 3] {
        let s = MeasurementSettings::default();
        let field = bell_for_model(&model, d, 1.0, Route::Field, &geometry, s, Convention::Standard).unwrap();
        let analytic = bell_for_model(&model, d, 1.0, Route::Analytic, &geometry, s, Convention::Standard).unwrap();
        let diff = (field.i_d - analytic.i_d).abs();
        ok &= diff <= 0.02;
        parts.push(format!("D={d}: field {:.7} vs analytic {:.7} (|diff| {diff:.1e})", field.i_d, analytic.i_d));
        ledger.results.push(field);
        ledger.results.push(analytic);
    }
    outcome(
        ok,
        format!(
            "slit width 0.05 period, {} samples/period, {} periods; {}",
            geometry.sampling.samples_per_period,
            geometry.sampling.periods,
            parts.join("; ")
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. Scan trends.

fn criterion_6(ledger: &mut Ledger) -> Outcome {
    let rs = [0.99998, 0.9998, 0.998];
    let models: Vec<ScanModel> = rs.iter().map(|&r| ScanModel::from_correlation(9.0, r).unwrap()).collect();
    let spec = ScanSpec { dims: (2..=12).collect(), models: models.clone(), ..Default::default() };
    let rows = bell_scan(&spec).unwrap();
    let n = spec.dims.len();
    let mut monotone = true;
    for (i, _) in spec.dims.iter().enumerate() {
        for m in 0..models.len() - 1 {
            monotone &= rows[(m + 1) * n + i].i_d <= rows[m * n + i].i_d + 1e-12;
        }
    }
    let mut interior = true;
    let mut best = Vec::new();
    for m in &models {
        let d = best_dimension(&rows, m).unwrap();
        interior &= d > 2 && d < 12;
        best.push(format!("R={}: D*={d}", m.correlation_r()));
    }
    for m in &models {
        for &d in &spec.dims {
            ledger.results.push(
                bell_for_model(m, d, 1.0, Route::Analytic, &spec.field, spec.settings, spec.convention).unwrap(),
            );
        }
    }
    outcome(
        monotone && interior,
        format!("kappa_plus = 9, D = 2..12; non-increasing in R = {monotone}; {}", best.join(", ")),
    )
}

// ---------------------------------------------------------------------------
// 7. Pair-source model.

fn criterion_7() -> Outcome {
    let r1 = BiphotonGaussian::new(9.0, 1.0).unwrap().correlation_r();
    let r2 = BiphotonGaussian::new(9.0, 1.0 / 6.0).unwrap().correlation_r();
    let trunc = |r: f64| (r * 1000.0).floor() / 1000.0;
    let r_ok = (r1 - 80.0 / 82.0).abs() < 1e-12 && trunc(r1) == 0.975 && trunc(r2) == 0.999 && (r2 - 0.9993).abs() < 5e-5;

    let (kp, km, s) = (9.0f64, 1.0f64 / 6.0, 1.0f64);
    let width = 0.05 * km.min(s);
    let c = entangled_coeffs(3, s, &BiphotonGaussian::new(kp, km).unwrap()).unwrap();
    let oracle = common::projected_coeffs(3, s, width, kp, km);
    let peak = oracle.iter().flatten().copied().fold(0.0, f64::max);
    let mut err: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            err = err.max((c.get(a, b) - Complex64::new(oracle[a][b], 0.0)).norm());
        }
    }
    let rel = err / peak;
    outcome(
        r_ok && rel <= 0.02,
        format!("R(9, 1) = {r1:.4}, R(9, 1/6) = {r2:.4}; max coefficient error vs projection oracle = {rel:.2e} of the peak"),
    )
}

// ---------------------------------------------------------------------------
// 8. Hardware constraints.

fn criterion_8() -> Outcome {
    let r = report(&HardwareSpec::new(10e-6, [1080, 1920], 800e-9).unwrap(), DEFAULT_SLIT_THRESHOLD).unwrap();
    outcome(
        r.max_dimension == 19 && (r.mutual_information - 4.25).abs() <= 0.01,
        format!(
            "D = {}, mutual information = {:.4} bits, z_T = {:.2} mm",
            r.max_dimension,
            r.mutual_information,
            r.talbot_length * 1e3
        ),
    )
}

// ---------------------------------------------------------------------------
// 9. Table invariants.

fn criterion_9(ledger: &mut Ledger) -> Outcome {
    // Extra coverage: finite-correlation sources, both conventions, off-default
    // settings.
    let odd = MeasurementSettings { alpha1: 0.1, alpha2: 0.6, beta1: 0.3, beta2: -0.4 };
    for d in 2..=8 {
        for r in [0.0, 0.9, 0.998] {
            let c = entangled_coeffs(d, 1.0, &BiphotonGaussian::from_correlation(9.0, r).unwrap()).unwrap();
            for conv in [Convention::Standard, Convention::AntiCorrelated] {
                for s in [MeasurementSettings::default(), odd] {
                    ledger.results.push(bell_analytic(&c, s, conv).unwrap());
                }
            }
        }
    }
    let mut worst_norm: f64 = 0.0;
    let mut worst_signal: f64 = 0.0;
    let mut negative = false;
    let mut count = 0;
    for r in &ledger.results {
        for t in &r.tables {
            worst_norm = worst_norm.max((t.total() - 1.0).abs());
            negative |= t.p.iter().flatten().any(|v| *v < 0.0);
            count += 1;
        }
        worst_signal = worst_signal.max(no_signaling_violation(&r.tables)).max(r.no_signaling);
    }
    outcome(
        worst_norm <= TABLE_TOL && worst_signal <= 1e-9 && !negative,
        format!("{count} tables: max |sum - 1| = {worst_norm:.1e}, max no-signaling violation = {worst_signal:.1e}"),
    )
}

fn main() {
    let mut ledger = Ledger::default();
    let criteria: Vec<(&str, Duration, Box<dyn FnOnce(&mut Ledger) -> Outcome>)> = vec![
        ("Gauss sums and Talbot gate", Duration::from_secs(1), Box::new(|_| criterion_1())),
        ("revival at 2 z_T", Duration::from_secs(10), Box::new(|_| criterion_2())),
        ("measurement mapping", Duration::from_secs(5), Box::new(|_| criterion_3())),
        ("CGLMP calibration", Duration::from_secs(10), Box::new(criterion_4)),
        ("field route vs matrix route", Duration::from_secs(600), Box::new(criterion_5)),
        ("scan trends", Duration::from_secs(1800), Box::new(criterion_6)),
        ("pair-source model", Duration::from_secs(60), Box::new(|_| criterion_7())),
        ("hardware constraints", Duration::from_secs(1), Box::new(|_| criterion_8())),
        ("table invariants", Duration::from_secs(60), Box::new(criterion_9)),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| run(&mut ledger)));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= budget, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {} ({name}): {detail} [{:.2}s, budget {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
