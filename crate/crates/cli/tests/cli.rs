use std::path::Path;
use std::process::Command;

use talbot_core::qudit::talbot_gate;

fn talbot(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_talbot"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_matrix(path: &Path) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let xs: Vec<f64> = lines.next().unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    let mut ys = Vec::new();
    let mut rows = Vec::new();
    for l in lines {
        let mut it = l.split(',').map(|v| v.parse::<f64>().unwrap());
        ys.push(it.next().unwrap());
        rows.push(it.collect());
    }
    (xs, ys, rows)
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["carpet", "--set", "z_steps=12", "--set", "samples_per_period=64"];
    assert!(talbot(&args, a.path()).status.success());
    assert!(talbot(&args, b.path()).status.success());
    for f in ["carpet.csv", "carpet.pgm"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    let scan = ["bell-scan", "--set", "dims=[2,3,4,5,6]"];
    assert!(talbot(&scan, a.path()).status.success());
    assert!(talbot(&scan, b.path()).status.success());
    assert_eq!(std::fs::read(a.path().join("bell_scan.csv")).unwrap(), std::fs::read(b.path().join("bell_scan.csv")).unwrap());
}

#[test]
fn outputs_embed_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    assert!(talbot(&["carpet", "--set", "z_steps=4", "--set", "seed=11"], dir.path()).status.success());
    let csv = std::fs::read_to_string(dir.path().join("carpet.csv")).unwrap();
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# config={"));
    let cfg: serde_json::Value = serde_json::from_str(first.trim_start_matches("# config=")).unwrap();
    assert_eq!(cfg["z_steps"], 4);
    assert_eq!(cfg["seed"], 11);
    assert_eq!(cfg["samples_per_period"], 256);
    let pgm = std::fs::read(dir.path().join("carpet.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n# max="));
}

#[test]
fn carpet_revives_and_shifts() {
    let dir = tempfile::tempdir().unwrap();
    assert!(talbot(&["carpet", "--set", "z_steps=8", "--set", "samples_per_period=64"], dir.path()).status.success());
    let (xs, z, rows) = read_matrix(&dir.path().join("carpet.csv"));
    assert_eq!(z, vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]);
    let max = rows[0].iter().copied().fold(0.0, f64::max);
    for (a, b) in rows[0].iter().zip(&rows[8]) {
        assert!((a - b).abs() < 1e-9 * max);
    }
    // z = z_T: half-period shift (32 of 64 samples per period).
    for i in 0..xs.len() - 32 {
        assert!((rows[4][i + 32] - rows[0][i]).abs() < 1e-6 * max);
    }
}

#[test]
fn d3_basis_state_splits_by_gate_weights() {
    let dir = tempfile::tempdir().unwrap();
    let out = talbot(&["carpet", "--set", "dim=3", "--set", "z_steps=6", "--set", "samples_per_period=192"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (xs, z, rows) = read_matrix(&dir.path().join("carpet.csv"));
    // Row 2 is z = 2 z_T / 3, the D = 3 gate distance.
    assert!((z[2] - 2.0 / 3.0).abs() < 1e-15);
    let gate = talbot_gate(3).unwrap();
    let mut bins = [0.0; 3];
    for (x, p) in xs.iter().zip(&rows[2]) {
        let b = ((x * 3.0 + 0.5).floor() as i64).rem_euclid(3) as usize;
        bins[b] += p;
    }
    let total: f64 = bins.iter().sum();
    for (j, b) in bins.iter().enumerate() {
        let expected = gate.get(j, 0).norm_sqr();
        assert!((b / total - expected).abs() < 1e-3, "bin {j}: {} vs {expected}", b / total);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(talbot(&["bell", "--set", "bogus=1"], dir.path()).status.code(), Some(2));
    assert_eq!(talbot(&["bell", "--set", "dim=1"], dir.path()).status.code(), Some(2));
    assert_eq!(talbot(&["synth", "--set", "samples_per_period=16"], dir.path()).status.code(), Some(3));
    let missing = Command::new(env!("CARGO_BIN_EXE_talbot")).args(["carpet"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let no_file = talbot(&["bell", "--config", "/nonexistent/config.json"], dir.path());
    assert_eq!(no_file.status.code(), Some(1));
}

#[test]
fn bell_and_constraints_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = talbot(&["bell", "--set", "dim=2"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("bell.json")).unwrap()).unwrap();
    assert!((v["result"]["i_d"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["result"]["provenance"]["route"], "analytic");
    let out = talbot(&["constraints"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("max_dimension: 19"));
    assert!(dir.path().join("constraints.json").exists());
}

#[test]
fn entangle_writes_all_panels() {
    let dir = tempfile::tempdir().unwrap();
    let out = talbot(&["entangle", "--set", "half_width=4.5", "--set", "samples=360"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for stem in ["entangle_initial", "entangle_apertured", "entangle_final"] {
        assert!(dir.path().join(format!("{stem}.csv")).exists());
        assert!(dir.path().join(format!("{stem}.pgm")).exists());
    }
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("entangle.json")).unwrap()).unwrap();
    assert!((v["R"].as_f64().unwrap() - 0.9993).abs() < 1e-4);
}

#[test]
fn synth_uniform_state_has_equal_combs() {
    let dir = tempfile::tempdir().unwrap();
    let out = talbot(&["synth", "--set", "amplitudes.re=[1,1,1]", "--set", "z_steps=4"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (xs, _, rows) = read_matrix(&dir.path().join("synth_carpet.csv"));
    // Slits at -1, 0, 1 with period 3; bins of width 1 around each position.
    let mut bins = [0.0; 3];
    for (x, p) in xs.iter().zip(&rows[0]) {
        let b = ((x + 1.5).floor() as i64).rem_euclid(3) as usize;
        bins[b] += p;
    }
    let total: f64 = bins.iter().sum();
    for b in bins {
        assert!((b / total - 1.0 / 3.0).abs() < 1e-6);
    }
    assert!(dir.path().join("synth_field.csv").exists());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("synth.json")).unwrap()).unwrap();
    assert_eq!(v["effective_period"], 3.0);
}
