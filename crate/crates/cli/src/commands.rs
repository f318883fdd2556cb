use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use talbot_core::bell::{bell_for_model, bell_scan as run_scan, best_dimension, write_scan_csv, Convention, FieldGeometry, MeasurementSettings, Route, ScanModel, ScanSpec};
use talbot_core::constraints::{report, HardwareSpec, DEFAULT_SLIT_THRESHOLD};
use talbot_core::export::{write_matrix_csv, write_pgm};
use talbot_core::field::{carpet as run_carpet, BiphotonField, Carpet, GridSpec, ModeField, SlitProfile, SlitShape, TruncationRule};
use talbot_core::spdc::{
    apply_dslit, entangled_coeffs, optical_pipeline_biphoton, schmidt_spectrum, slit_pair_weights, synthesize_single,
    synthesize_single_sampled, two_photon_field, BiphotonGaussian, SlitArray, SynthesizerGeometry,
};

use crate::config::{raw_config, resolve, ConfigError, Resolved};
use crate::Common;

fn load<T: serde::de::DeserializeOwned>(c: &Common) -> Result<Resolved<T>> {
    resolve(raw_config(c.config.as_deref(), &c.set)?)
}

fn out_dir(c: &Common) -> Result<PathBuf> {
    let dir = c.out_dir.clone().ok_or_else(|| ConfigError("--out-dir is required for this command".into()))?;
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write_file(dir: &Path, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> talbot_core::Result<()>) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    write_file(dir, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn gaussian_slit() -> SlitShape {
    SlitShape { profile: SlitProfile::Gaussian, width: 0.05 }
}

/// Complex amplitudes as separate real and imaginary lists. Empty means the
/// first basis state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Amplitudes {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl Amplitudes {
    fn resolve(&self, dim: usize) -> Result<Vec<Complex64>> {
        if self.re.is_empty() && self.im.is_empty() {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            if let Some(first) = v.first_mut() {
                *first = Complex64::new(1.0, 0.0);
            }
            return Ok(v);
        }
        if self.re.len() != dim || !(self.im.is_empty() || self.im.len() == dim) {
            return Err(ConfigError(format!(
                "amplitudes need {dim} entries (re: {}, im: {})",
                self.re.len(),
                self.im.len()
            ))
            .into());
        }
        Ok((0..dim).map(|d| Complex64::new(self.re[d], self.im.get(d).copied().unwrap_or(0.0))).collect())
    }
}

fn write_carpet(dir: &Path, stem: &str, c: &Carpet, header: &str) -> Result<()> {
    let xs: Vec<f64> = c.grid.coords().collect();
    write_file(dir, &format!("{stem}.csv"), |w| write_matrix_csv(w, "z/z_T\\x", &xs, &c.z, &c.density, Some(header)))?;
    let flat: Vec<f64> = c.density.iter().flatten().copied().collect();
    write_file(dir, &format!("{stem}.pgm"), |w| write_pgm(w, xs.len(), c.z.len(), &flat, header))
}

fn write_density(dir: &Path, stem: &str, f: &BiphotonField, header: &str) -> Result<()> {
    let (g1, g2) = f.grids();
    let (x1, x2): (Vec<f64>, Vec<f64>) = (g1.coords().collect(), g2.coords().collect());
    let d = f.density();
    let rows: Vec<Vec<f64>> = d.chunks(g2.n).map(|r| r.to_vec()).collect();
    write_file(dir, &format!("{stem}.csv"), |w| write_matrix_csv(w, "x1\\x2", &x2, &x1, &rows, Some(header)))?;
    write_file(dir, &format!("{stem}.pgm"), |w| write_pgm(w, g2.n, g1.n, &d, header))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarpetConfig {
    pub period: f64,
    /// Slits per period, at `d * period / dim`.
    pub dim: usize,
    pub slit: SlitShape,
    pub amplitudes: Amplitudes,
    pub wavelength: f64,
    pub samples_per_period: usize,
    /// Transverse window `[0, periods * period)`.
    pub periods: usize,
    /// Rows at `z = 2 k z_T / z_steps`.
    pub z_steps: u64,
}

impl Default for CarpetConfig {
    fn default() -> Self {
        Self {
            period: 1.0,
            dim: 1,
            slit: gaussian_slit(),
            amplitudes: Amplitudes::default(),
            wavelength: 1.0 / 64.0,
            samples_per_period: 256,
            periods: 2,
            z_steps: 256,
        }
    }
}

pub fn carpet(c: &Common) -> Result<()> {
    let cfg: Resolved<CarpetConfig> = load(c)?;
    let dir = out_dir(c)?;
    let k = &cfg.config;
    if k.dim == 0 {
        return Err(ConfigError("dim must be at least 1".into()).into());
    }
    let amps = k.amplitudes.resolve(k.dim)?;
    let shape = SlitShape::new(k.slit.profile, k.slit.width)?;
    let cell: Vec<(f64, Complex64)> = amps.iter().enumerate().map(|(d, a)| (d as f64 * k.period / k.dim as f64, *a)).collect();
    let field = ModeField::from_cell(k.period, 0.0, &cell, shape, TruncationRule::default())?.normalized()?;
    let grid = GridSpec::new(0.0, k.period / k.samples_per_period.max(1) as f64, k.samples_per_period * k.periods)?;
    let out = run_carpet(&field, k.wavelength, grid, k.z_steps)?;
    write_carpet(&dir, "carpet", &out, &cfg.header())?;
    println!("carpet: {} x {} samples, max density {}", out.z.len(), grid.n, out.max());
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub dim: usize,
    pub spacing: f64,
    pub slit: SlitShape,
    pub amplitudes: Amplitudes,
    pub wavelength: f64,
    pub grating_period: f64,
    pub grating_width: f64,
    pub samples_per_period: usize,
    /// Window of the sampled output, in effective periods.
    pub periods: usize,
    pub carpet_periods: usize,
    pub z_steps: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            spacing: 1.0,
            slit: gaussian_slit(),
            amplitudes: Amplitudes::default(),
            wavelength: 1.0 / 64.0,
            grating_period: 1.0,
            grating_width: 0.05,
            samples_per_period: 128,
            periods: 8,
            carpet_periods: 2,
            z_steps: 256,
        }
    }
}

pub fn synth(c: &Common) -> Result<()> {
    let cfg: Resolved<SynthConfig> = load(c)?;
    let dir = out_dir(c)?;
    let k = &cfg.config;
    let shape = SlitShape::new(k.slit.profile, k.slit.width)?;
    let slits = SlitArray::new(k.dim, k.spacing, shape)?.with_amplitudes(k.amplitudes.resolve(k.dim)?)?;
    let geom = SynthesizerGeometry::matched(&slits, k.wavelength, k.grating_period, k.grating_width)?;
    let period = geom.effective_period();
    let carrier = synthesize_single(&slits, &geom)?;
    let spp = k.samples_per_period.max(1);
    let cgrid = GridSpec::new(slits.center(0) - 0.5 * k.spacing, period / spp as f64, spp * k.carpet_periods)?;
    let out = run_carpet(&carrier, k.wavelength, cgrid, k.z_steps)?;
    let header = cfg.header();
    write_carpet(&dir, "synth_carpet", &out, &header)?;
    let sampled = synthesize_single_sampled(&slits, &geom, GridSpec::periodic(period, spp, k.periods)?)?;
    write_file(&dir, "synth_field.csv", |w| sampled.write_csv(w, Some(&header)))?;
    let summary = json!({
        "config": cfg.to_json(),
        "synthesizer": geom,
        "effective_period": period,
        "grating_order": geom.grating_order(TruncationRule::default()),
        "talbot_length": period * period / k.wavelength,
        "carrier_max_order": carrier.max_order(),
        "carrier_discarded_mass": carrier.discarded_mass(),
    });
    write_json(&dir, "synth.json", &summary)?;
    println!("synth: D={} effective period {period}, focal length {}", k.dim, geom.focal_length);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntangleConfig {
    pub dim: usize,
    pub spacing: f64,
    pub slit: SlitShape,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub wavelength: f64,
    pub grating_period: f64,
    pub grating_width: f64,
    /// Square window `[-half_width, half_width)^2`.
    pub half_width: f64,
    pub samples: usize,
}

impl Default for EntangleConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            spacing: 1.0,
            slit: gaussian_slit(),
            kappa_plus: 9.0,
            kappa_minus: 1.0 / 6.0,
            wavelength: 1.0 / 64.0,
            grating_period: 1.0,
            grating_width: 0.05,
            half_width: 7.5,
            samples: 600,
        }
    }
}

pub fn entangle(c: &Common) -> Result<()> {
    let cfg: Resolved<EntangleConfig> = load(c)?;
    let dir = out_dir(c)?;
    let k = &cfg.config;
    let model = BiphotonGaussian::new(k.kappa_plus, k.kappa_minus)?;
    let shape = SlitShape::new(k.slit.profile, k.slit.width)?;
    let slits = SlitArray::new(k.dim, k.spacing, shape)?;
    let geom = SynthesizerGeometry::matched(&slits, k.wavelength, k.grating_period, k.grating_width)?;
    let grid = GridSpec::symmetric(k.half_width, k.samples)?;
    let header = cfg.header();

    let initial = model.sample(grid, grid)?;
    write_density(&dir, "entangle_initial", &initial, &header)?;
    let ap = apply_dslit(&initial, &slits)?;
    drop(initial);
    write_density(&dir, "entangle_apertured", &ap.field, &header)?;
    let fin = optical_pipeline_biphoton(&ap.field, &geom)?.normalized()?;
    write_density(&dir, "entangle_final", &fin, &header)?;

    let coeffs = entangled_coeffs(k.dim, k.spacing, &model)?;
    let oracle = two_photon_field(&coeffs, &slits, &geom, grid, grid)?;
    let fidelity = fin.fidelity(&oracle)?;
    let summary = json!({
        "config": cfg.to_json(),
        "R": model.correlation_r(),
        "transmitted": ap.transmitted,
        "slit_pair_weights": slit_pair_weights(&ap.field, &slits),
        "coefficients": coeffs,
        "schmidt": schmidt_spectrum(&coeffs),
        "pipeline_vs_coefficients_fidelity": fidelity,
        "synthesizer": geom,
    });
    write_json(&dir, "entangle.json", &summary)?;
    println!("entangle: R={:.4}, pipeline fidelity {fidelity:.6}", model.correlation_r());
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BellConfig {
    pub dim: usize,
    pub spacing: f64,
    pub kappa_plus: f64,
    /// 0 selects the maximally entangled state.
    pub kappa_minus: f64,
    pub route: Route,
    pub field: FieldGeometry,
    pub settings: MeasurementSettings,
    pub convention: Convention,
}

impl Default for BellConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            spacing: 1.0,
            kappa_plus: 9.0,
            kappa_minus: 0.0,
            route: Route::Analytic,
            field: FieldGeometry::default(),
            settings: MeasurementSettings::default(),
            convention: Convention::Standard,
        }
    }
}

pub fn bell(c: &Common) -> Result<()> {
    let cfg: Resolved<BellConfig> = load(c)?;
    let dir = out_dir(c)?;
    let k = &cfg.config;
    let model = ScanModel::new(k.kappa_plus, k.kappa_minus)?;
    let r = bell_for_model(&model, k.dim, k.spacing, k.route, &k.field, k.settings, k.convention)?;
    write_json(&dir, "bell.json", &json!({ "config": cfg.to_json(), "result": r }))?;
    println!("I_{} = {} ({} route, no-signaling {:.2e})", r.dim, r.i_d, k.route.name(), r.no_signaling);
    Ok(())
}

pub fn bell_scan(c: &Common) -> Result<()> {
    let cfg: Resolved<ScanSpec> = load(c)?;
    let dir = out_dir(c)?;
    let rows = run_scan(&cfg.config)?;
    write_file(&dir, "bell_scan.csv", |w| write_scan_csv(w, &rows, Some(&cfg.header())))?;
    for m in &cfg.config.models {
        if let Some(d) = best_dimension(&rows, m) {
            println!("kappa_plus={} kappa_minus={}: largest I_D at D={d}", m.kappa_plus, m.kappa_minus);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintsConfig {
    pub pixel_pitch: f64,
    pub pixels: [u64; 2],
    pub wavelength: f64,
    pub threshold: f64,
}

impl Default for ConstraintsConfig {
    fn default() -> Self {
        Self { pixel_pitch: 10e-6, pixels: [1080, 1920], wavelength: 800e-9, threshold: DEFAULT_SLIT_THRESHOLD }
    }
}

pub fn constraints(c: &Common) -> Result<()> {
    let cfg: Resolved<ConstraintsConfig> = load(c)?;
    let k = &cfg.config;
    let r = report(&HardwareSpec::new(k.pixel_pitch, k.pixels, k.wavelength)?, k.threshold)?;
    println!("max_dimension: {}", r.max_dimension);
    println!("talbot_length_m: {}", r.talbot_length);
    println!("gate_distance_m (2 z_T / (c D)): {}", r.gate_distance.c_convention);
    println!("gate_distance_m (z_T / (g D)): {}", r.gate_distance.g_convention);
    println!("mutual_information_bits: {}", r.mutual_information);
    if c.out_dir.is_some() {
        let dir = out_dir(c)?;
        write_json(&dir, "constraints.json", &json!({ "config": cfg.to_json(), "report": r }))?;
    }
    Ok(())
}
