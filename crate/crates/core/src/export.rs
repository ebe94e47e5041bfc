//! CSV and JSON serialisation of results.
//!
//! CSV files are comma-separated with LF line endings and a header row
//! whose column names carry their unit. Floats are written in Rust's
//! shortest round-trip scientific notation, so output is byte-stable.

use crate::model::{Spectrum, SpectrumUnit};
use crate::noise::NoiseBudget;
use crate::resonance::RadialModeSet;
use crate::response::Waveform;
use crate::sweep::{Metric, SweepResult};

fn unit_suffix(unit: SpectrumUnit) -> &'static str {
    match unit {
        SpectrumUnit::VoltPerNewton => "_v_per_n",
        SpectrumUnit::VoltPerPascal => "_v_per_pa",
        SpectrumUnit::Ohm => "_ohm",
        SpectrumUnit::VoltSquaredPerHertz => "_v2_per_hz",
        SpectrumUnit::Dimensionless => "",
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer
            .write_record(header.iter().map(|h| h.as_ref()))
            .expect("in-memory write");
        Self { writer }
    }

    fn row<S: AsRef<[u8]>>(&mut self, fields: impl IntoIterator<Item = S>) {
        self.writer.write_record(fields).expect("in-memory write");
    }

    fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("ascii output")
    }
}

/// `freq_hz, re, im, mag, phase_rad` with the spectrum unit appended to the
/// value columns.
pub fn spectrum_csv(spec: &Spectrum) -> String {
    let u = unit_suffix(spec.unit());
    let mut t = Table::new(&[
        "freq_hz".to_string(),
        format!("re{u}"),
        format!("im{u}"),
        format!("mag{u}"),
        "phase_rad".to_string(),
    ]);
    for (f, v) in spec.freqs().iter().zip(spec.values()) {
        t.row([num(*f), num(v.re), num(v.im), num(v.norm()), num(v.arg())]);
    }
    t.finish()
}

pub fn waveform_csv(wave: &Waveform, unit: SpectrumUnit) -> String {
    let mut t = Table::new(&["t_s".to_string(), format!("value{}", unit_suffix(unit))]);
    for (time, v) in wave.times().iter().zip(&wave.samples) {
        t.row([num(*time), num(*v)]);
    }
    t.finish()
}

pub fn noise_csv(budget: &NoiseBudget) -> String {
    let mut t = Table::new(&[
        "freq_hz",
        "source_thermal_v2_per_hz",
        "receiver_thermal_v2_per_hz",
        "amp_voltage_v2_per_hz",
        "amp_current_v2_per_hz",
        "total_v2_per_hz",
    ]);
    for (f, c) in budget.freqs().iter().zip(&budget.components) {
        t.row([
            num(*f),
            num(c.source_thermal),
            num(c.receiver_thermal),
            num(c.amp_voltage),
            num(c.amp_current),
            num(c.total()),
        ]);
    }
    t.finish()
}

pub fn modes_csv(modes: &RadialModeSet) -> String {
    let mut t = Table::new(&["n", "j0_n", "f_n_hz"]);
    for m in &modes.modes {
        t.row([m.n.to_string(), num(m.j0_n), num(m.f_n)]);
    }
    t.finish()
}

/// Long format: one row per cell.
pub fn sweep_csv(result: &SweepResult) -> String {
    let value_col = match &result.normalization {
        Some(_) => format!("{}_normalized", result.metric.name()),
        None => result.metric.name().to_string(),
    };
    let banded = matches!(result.metric, Metric::H2Band { .. });
    let mut header = vec![
        "i_area".to_string(),
        "i_cable".into(),
        "i_receiver".into(),
        "area_m2".into(),
        "diameter_m".into(),
        "cable_length_m".into(),
        "zr_re_ohm".into(),
        "zr_im_ohm".into(),
        value_col,
    ];
    if banded {
        for c in ["f_lo_hz", "f_hi_hz", "bandwidth_hz", "f_center_hz", "support_bandwidth_hz"] {
            header.push(c.into());
        }
    }
    header.push("error".into());
    let mut t = Table::new(&header);
    for c in &result.cells {
        let mut row = vec![
            c.index[0].to_string(),
            c.index[1].to_string(),
            c.index[2].to_string(),
            num(c.area),
            num(2.0 * (c.area / std::f64::consts::PI).sqrt()),
            num(c.cable_length),
            num(c.receiver_impedance.re),
            num(c.receiver_impedance.im),
            c.value.map(num).unwrap_or_default(),
        ];
        if banded {
            match &c.band {
                Some(b) => row.extend([b.f_lo, b.f_hi, b.bandwidth, b.f_center, b.support_bandwidth].map(num)),
                None => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
        }
        row.push(c.error.clone().unwrap_or_default());
        t.row(row);
    }
    t.finish()
}

pub fn sweep_json(result: &SweepResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("sweep result serialises");
    s.push('\n');
    s
}
