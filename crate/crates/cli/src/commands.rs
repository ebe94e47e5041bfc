//! Subcommand bodies: load the config, compute, write files and manifest.

use std::collections::BTreeMap;
use std::path::PathBuf;

use paik_core::config::Config;
use paik_core::export;
use paik_core::noise::{noise_psd, Excitation, ExcitationShape, DEFAULT_TEMPERATURE_K};
use paik_core::resonance::{
    bessel_j0_roots, fit_inverse_diameter, jittered_fundamentals, radial_modes,
};
use paik_core::response::{band_metrics, chain_impulse_response, frequency_response, FrequencyGrid};
use paik_core::sweep::{normalize, sweep_grid, Metric, SweepResult};
use paik_core::transfer::{Referral, SourceImpedance};
use paik_core::{validate, ReadoutChain, SpectrumUnit};

use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::svg::{self, Panel};
use crate::{Command, Flags, MetricKind};

pub const DEFAULT_GRID: (f64, f64, usize) = (20e3, 20e6, 1000);
pub const DEFAULT_FS: f64 = 100e6;
const IMPULSE_INITIAL_LEN: usize = 1024;
/// Diameters used for the synthetic fit when the config has no sweep axis.
const DEFAULT_FIT_DIAMETERS: [f64; 5] = [1.5e-3, 2e-3, 2.5e-3, 3e-3, 4e-3];

struct Run {
    config: Config,
    manifest: RunManifest,
    out: PathBuf,
    plot: bool,
}

impl Run {
    fn start(name: &str, flags: &Flags, params: BTreeMap<String, String>) -> Result<Self> {
        let path = flags
            .config
            .as_deref()
            .ok_or_else(|| CliError::Flag("--config <path> is required".into()))?;
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Config(format!("{} is not UTF-8", path.display())))?;
        let config = Config::from_json_str(&text)?;
        let plot = !flags.no_plot;
        let mut params = params;
        params.insert("plot".into(), plot.to_string());
        let manifest = RunManifest::new(name, params, path, &bytes, &flags.out);
        Ok(Self {
            config,
            manifest,
            out: flags.out.clone(),
            plot,
        })
    }

    fn chain(&self) -> &ReadoutChain {
        &self.config.chain
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(&self.out).map_err(|source| CliError::Io {
            path: self.out.clone(),
            source,
        })?;
        let path = self.out.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })?;
        self.manifest.files.push(name.to_string());
        Ok(())
    }

    fn write_plot(&mut self, name: &str, render: impl FnOnce() -> String) -> Result<()> {
        if self.plot {
            self.write(name, &render())?;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.manifest.files.sort();
        std::fs::create_dir_all(&self.out).map_err(|source| CliError::Io {
            path: self.out.clone(),
            source,
        })?;
        let text = self.manifest.to_json_string();
        let path = self.out.join("manifest.json");
        std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })
    }
}

fn grid_of(flags: &Flags) -> FrequencyGrid {
    flags.grid.unwrap_or_else(|| {
        FrequencyGrid::new(DEFAULT_GRID.0, DEFAULT_GRID.1, DEFAULT_GRID.2).expect("default grid is valid")
    })
}

fn grid_param(g: &FrequencyGrid) -> String {
    format!("{:e},{:e},{}", g.f_min, g.f_max, g.n_points)
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

pub fn run(command: &Command, flags: &Flags) -> Result<()> {
    match command {
        Command::FreqResponse => freq_response(flags),
        Command::Impulse => impulse(flags),
        Command::Sweep => sweep(flags),
        Command::Noise => noise(flags),
        Command::Resonance {
            v_shear,
            modes,
            jitter,
        } => resonance(flags, *v_shear, *modes, *jitter),
        Command::Validate => validate_cmd(flags),
    }
}

fn bode_panels(freqs: &[f64], values: &[paik_core::Complex64], unit: &str) -> [Panel; 2] {
    [
        Panel {
            y_label: format!("|H| (dB re 1 {unit})"),
            points: freqs
                .iter()
                .zip(values)
                .map(|(f, v)| (f / 1e6, 20.0 * v.norm().log10()))
                .collect(),
        },
        Panel {
            y_label: "phase (rad)".into(),
            points: freqs.iter().zip(values).map(|(f, v)| (f / 1e6, v.arg())).collect(),
        },
    ]
}

fn freq_response(flags: &Flags) -> Result<()> {
    let grid = grid_of(flags);
    let mut run = Run::start("freq-response", flags, params(&[("grid", grid_param(&grid))]))?;
    let spec = frequency_response(run.chain(), &grid, Referral::Pressure)?;
    run.write("response.csv", &export::spectrum_csv(&spec))?;
    run.write_plot("response.svg", || {
        svg::line_chart(
            "Pressure-referred response",
            "frequency (MHz)",
            &bode_panels(spec.freqs(), spec.values(), "V/Pa"),
        )
    })?;
    match band_metrics(&spec, -6.0) {
        Ok(m) => println!(
            "peak {:.4e} V/Pa at {:.4} MHz; -6 dB band {:.4}-{:.4} MHz, bandwidth {:.4} MHz, centre {:.4} MHz",
            spec.magnitudes().into_iter().fold(0.0, f64::max),
            m.peak_freq / 1e6,
            m.f_lo / 1e6,
            m.f_hi / 1e6,
            m.bandwidth / 1e6,
            m.f_center / 1e6
        ),
        Err(e) => println!("-6 dB band not available: {e}"),
    }
    run.finish()
}

fn impulse(flags: &Flags) -> Result<()> {
    let fs = flags.fs.unwrap_or(DEFAULT_FS);
    let mut run = Run::start("impulse", flags, params(&[("fs", format!("{fs:e}"))]))?;
    let wave = chain_impulse_response(run.chain(), fs, IMPULSE_INITIAL_LEN, Referral::Pressure)?;
    run.write("impulse.csv", &export::waveform_csv(&wave, SpectrumUnit::VoltPerPascal))?;
    run.write_plot("impulse.svg", || {
        let pts = wave
            .times()
            .iter()
            .zip(&wave.samples)
            .map(|(t, v)| (t * 1e6, *v))
            .collect();
        svg::line_chart(
            "Impulse response",
            "time (us)",
            &[Panel {
                y_label: "h(t) (V/Pa per sample)".into(),
                points: pts,
            }],
        )
    })?;
    println!(
        "{} samples at dt = {:.4e} s; imaginary residue {:.2e}, tail energy {:.2e}",
        wave.samples.len(),
        wave.dt,
        wave.imag_residue,
        wave.tail_energy_fraction(0.1)
    );
    run.finish()
}

fn sweep_metric(kind: MetricKind, freq_hz: f64, grid: &FrequencyGrid) -> Metric {
    match kind {
        MetricKind::H1 => Metric::H1MagAtF {
            freq_hz,
            source: SourceImpedance::Za,
        },
        MetricKind::H2Band => Metric::H2Band {
            grid: *grid,
            level_db: -6.0,
        },
        MetricKind::Snr => Metric::Snr {
            excitation: Excitation {
                pressure_pa: 1.0,
                shape: ExcitationShape::Tone { freq_hz },
            },
            grid: *grid,
            temperature_k: DEFAULT_TEMPERATURE_K,
        },
    }
}

fn sweep_heatmap(result: &SweepResult) -> String {
    let [na, nl, nr] = result.shape();
    let axes = &result.axes;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for ia in 0..na {
        for il in 0..nl {
            let d = 2.0 * (axes.areas[ia] / std::f64::consts::PI).sqrt();
            rows.push(format!("d {:.2} mm, CL {:.2} m", d * 1e3, axes.cable_lengths[il]));
            values.push((0..nr).map(|ir| result.value([ia, il, ir])).collect());
        }
    }
    let cols: Vec<String> = axes
        .receiver_impedances
        .iter()
        .map(|z| format!("{:.0}{:+.0}j ohm", z.re, z.im))
        .collect();
    let title = match &result.normalization {
        Some(_) => format!("{} (normalised)", result.metric.name()),
        None => result.metric.name().to_string(),
    };
    svg::heatmap(&title, &rows, &cols, &values)
}

fn sweep(flags: &Flags) -> Result<()> {
    let grid = grid_of(flags);
    let kind = flags.metric.unwrap_or(MetricKind::H1);
    let kind_name = format!("{kind:?}").to_lowercase();
    let mut run = Run::start(
        "sweep",
        flags,
        params(&[("grid", grid_param(&grid)), ("metric", kind_name)]),
    )?;
    let spec = run
        .config
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("config has no `sweep` block".into()))?;
    let axes = spec.axes(run.chain())?;
    if kind != MetricKind::H2Band {
        // the sweep frequency is shared by every cell, so a singular one
        // would invalidate the whole grid
        let w = 2.0 * std::f64::consts::PI * spec.frequency_hz;
        paik_core::klm::turns_ratio(w, &run.chain().plate)?;
    }
    let metric = sweep_metric(kind, spec.frequency_hz, &grid);
    let mut result = sweep_grid(run.chain(), &axes, &metric)?;
    if let Some(reference) = spec.reference {
        result = normalize(&result, reference)?;
    }
    let failed = result.cells.iter().filter(|c| c.value.is_none()).count();
    run.write("sweep.csv", &export::sweep_csv(&result))?;
    run.write("sweep.json", &export::sweep_json(&result))?;
    run.write_plot("sweep.svg", || sweep_heatmap(&result))?;
    println!(
        "{} cells ({} invalid), metric {}",
        result.cells.len(),
        failed,
        metric.name()
    );
    run.finish()
}

fn noise(flags: &Flags) -> Result<()> {
    let grid = grid_of(flags);
    let mut run = Run::start("noise", flags, params(&[("grid", grid_param(&grid))]))?;
    let budget = noise_psd(run.chain(), &grid, DEFAULT_TEMPERATURE_K)?;
    run.write("noise.csv", &export::noise_csv(&budget))?;
    run.write_plot("noise.svg", || {
        let pts = budget
            .freqs()
            .iter()
            .zip(budget.totals())
            .map(|(f, p)| (f / 1e6, 10.0 * p.log10()))
            .collect();
        svg::line_chart(
            "Noise PSD at the receiver",
            "frequency (MHz)",
            &[Panel {
                y_label: "PSD (dB re 1 V^2/Hz)".into(),
                points: pts,
            }],
        )
    })?;
    println!(
        "band average {:.4e} V^2/Hz over {:.4}-{:.4} MHz at {} K; rms {:.4e} V",
        budget.band_avg,
        budget.band.0 / 1e6,
        budget.band.1 / 1e6,
        budget.temperature_k,
        budget.integrated_power().sqrt()
    );
    run.finish()
}

fn plate_diameter(chain: &ReadoutChain) -> f64 {
    chain
        .plate
        .diameter
        .unwrap_or_else(|| 2.0 * (chain.plate.area / std::f64::consts::PI).sqrt())
}

fn resonance(flags: &Flags, v_shear: f64, count: usize, jitter: f64) -> Result<()> {
    let mut p = params(&[
        ("v_shear", format!("{v_shear:e}")),
        ("modes", count.to_string()),
        ("jitter", format!("{jitter:e}")),
    ]);
    if let Some(seed) = flags.seed {
        p.insert("seed".into(), seed.to_string());
    }
    let mut run = Run::start("resonance", flags, p)?;
    let d = plate_diameter(run.chain());
    let modes = radial_modes(d, v_shear, count)?;
    run.write("modes.csv", &export::modes_csv(&modes))?;
    if let Some(m) = modes.modes.first() {
        println!("fundamental radial mode {:.6} MHz for d = {:.3} mm", m.f_n / 1e6, d * 1e3);
    }
    if let Some(seed) = flags.seed {
        let diameters = run
            .config
            .sweep
            .as_ref()
            .and_then(|s| s.diameters_m.clone())
            .filter(|ds| ds.len() >= 2)
            .unwrap_or_else(|| DEFAULT_FIT_DIAMETERS.to_vec());
        let pts = jittered_fundamentals(&diameters, v_shear, jitter, seed)?;
        let fit = fit_inverse_diameter(&pts)?;
        let mut csv = String::from("diameter_m,f_lowest_hz\n");
        for q in &pts {
            csv.push_str(&format!("{:e},{:e}\n", q.diameter, q.f_lowest));
        }
        run.write("fit_points.csv", &csv)?;
        let j01 = bessel_j0_roots(1)?[0];
        println!(
            "fit f = {:.4e}/d + {:.4e}, R^2 = {:.4}, implied shear velocity {:.1} m/s",
            fit.slope,
            fit.intercept,
            fit.r_squared,
            fit.slope * std::f64::consts::PI / j01
        );
    }
    run.finish()
}

fn validate_cmd(flags: &Flags) -> Result<()> {
    let mut run = Run::start("validate", flags, BTreeMap::new())?;
    let report = validate::run(run.chain())?;
    let mut csv = String::from("check,max_rel_error,tolerance,samples,passed\n");
    for c in &report.checks {
        println!(
            "{} {:<32} max error {:.3e} (tolerance {:.0e}, {} samples)",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_error,
            c.tolerance,
            c.samples
        );
        csv.push_str(&format!(
            "{},{:e},{:e},{},{}\n",
            c.name, c.max_error, c.tolerance, c.samples, c.passed
        ));
    }
    run.write("validation.csv", &csv)?;
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    run.finish()?;
    if failed > 0 {
        return Err(CliError::ValidationFailed {
            failed,
            total: report.checks.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn flags(config: &Path, out: &Path) -> Flags {
        Flags {
            config: Some(config.to_path_buf()),
            out: out.to_path_buf(),
            grid: Some(FrequencyGrid::new(0.1e6, 20e6, 64).unwrap()),
            fs: None,
            metric: None,
            plot: false,
            no_plot: false,
            seed: None,
        }
    }

    fn reference_config(dir: &Path) -> PathBuf {
        let p = dir.join("c.json");
        std::fs::write(&p, Config::new(ReadoutChain::reference()).to_json_string()).unwrap();
        p
    }

    #[test]
    fn missing_config_flag_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = flags(Path::new("x"), dir.path());
        f.config = None;
        assert_eq!(run(&Command::Noise, &f).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn sweep_without_block_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = reference_config(dir.path());
        let e = run(&Command::Sweep, &flags(&cfg, &dir.path().join("o"))).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn noise_writes_csv_plot_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = reference_config(dir.path());
        let out = dir.path().join("o");
        run(&Command::Noise, &flags(&cfg, &out)).unwrap();
        for name in ["noise.csv", "noise.svg", "manifest.json"] {
            assert!(out.join(name).exists(), "{name}");
        }
        let m = std::fs::read_to_string(out.join("manifest.json")).unwrap();
        assert!(m.contains("\"noise.csv\"") && m.contains("config_sha256"));
    }
}
