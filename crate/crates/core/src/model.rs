//! Domain types for the receive chain.
//!
//! Everything is an immutable value type. Field names in the serialized form
//! carry their SI unit so that config files are self-describing.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::{C64, EPSILON_0};

/// Geometry and material constants of the piezoelectric layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiezoPlate {
    #[serde(rename = "thickness_m")]
    pub thickness: f64,
    #[serde(rename = "density_kg_m3")]
    pub density: f64,
    /// Open-circuit (constant D) elastic stiffness.
    #[serde(rename = "c33d_pa")]
    pub stiffness_c33d: f64,
    /// Piezoelectric stress constant.
    #[serde(rename = "h33_v_per_m")]
    pub h33: f64,
    /// Clamped permittivity.
    #[serde(rename = "eps33s_f_per_m")]
    pub eps33s: f64,
    #[serde(rename = "area_m2")]
    pub area: f64,
    #[serde(rename = "diameter_m", default, skip_serializing_if = "Option::is_none")]
    pub diameter: Option<f64>,
}

/// Per-frequency quantities derived from a plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// Wavenumber k = ω / v, 1/m.
    pub wavenumber: f64,
    /// Acoustic force-impedance Z0 = ρ·v·area, N·s/m.
    pub z0: f64,
    /// Clamped capacitance C0 = ε·area / L, F.
    pub c0: f64,
}

impl PiezoPlate {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("plate.thickness_m", self.thickness)?;
        ensure_positive("plate.density_kg_m3", self.density)?;
        ensure_positive("plate.c33d_pa", self.stiffness_c33d)?;
        ensure_positive("plate.h33_v_per_m", self.h33)?;
        ensure_positive("plate.eps33s_f_per_m", self.eps33s)?;
        ensure_positive("plate.area_m2", self.area)?;
        if let Some(d) = self.diameter {
            ensure_positive("plate.diameter_m", d)?;
            let disc = std::f64::consts::PI * (d / 2.0).powi(2);
            if ((disc - self.area) / self.area).abs() > 0.01 {
                return Err(Error::param(
                    "plate.diameter_m",
                    format!(
                        "disc area {disc:e} m^2 disagrees with area_m2 {:e} by more than 1%",
                        self.area
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Longitudinal sound velocity sqrt(c33D / ρ).
    pub fn velocity(&self) -> f64 {
        (self.stiffness_c33d / self.density).sqrt()
    }

    pub fn z0(&self) -> f64 {
        self.density * self.velocity() * self.area
    }

    pub fn c0(&self) -> f64 {
        self.eps33s * self.area / self.thickness
    }

    /// Thickness-mode coupling coefficient squared, h33²·ε33S / c33D.
    pub fn kt_squared(&self) -> f64 {
        self.h33 * self.h33 * self.eps33s / self.stiffness_c33d
    }

    /// Frequency at which kL = π.
    pub fn half_wave_frequency(&self) -> f64 {
        self.velocity() / (2.0 * self.thickness)
    }

    pub fn derived_constants(&self, omega: f64) -> Result<DerivedConstants> {
        ensure_positive("omega", omega)?;
        self.validate()?;
        Ok(DerivedConstants {
            wavenumber: omega / self.velocity(),
            z0: self.z0(),
            c0: self.c0(),
        })
    }

    /// Copy with the area (and diameter, if known) replaced.
    pub fn with_area(&self, area: f64) -> Self {
        let scale = area / self.area;
        Self {
            area,
            diameter: self.diameter.map(|d| d * scale.sqrt()),
            ..self.clone()
        }
    }
}

/// Matching or backing layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassiveLayer {
    #[serde(rename = "thickness_m")]
    pub thickness: f64,
    #[serde(rename = "density_kg_m3")]
    pub density: f64,
    #[serde(rename = "velocity_m_s")]
    pub velocity: f64,
    #[serde(rename = "area_m2")]
    pub area: f64,
}

impl PassiveLayer {
    pub fn validate(&self, which: &'static str) -> Result<()> {
        ensure_positive(which, self.thickness)?;
        ensure_positive(which, self.density)?;
        ensure_positive(which, self.velocity)?;
        ensure_positive(which, self.area)
    }

    /// ρ·v·area, N·s/m.
    pub fn force_impedance(&self) -> f64 {
        self.density * self.velocity * self.area
    }

    /// Electrical length of the layer at `omega`, rad.
    pub fn phase(&self, omega: f64) -> f64 {
        omega / self.velocity * self.thickness
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableSpec {
    #[serde(rename = "length_m")]
    pub length: f64,
    #[serde(rename = "r_ohm_per_m")]
    pub r_per_m: f64,
    #[serde(rename = "l_h_per_m")]
    pub l_per_m: f64,
    #[serde(rename = "c_f_per_m")]
    pub c_per_m: f64,
}

/// Total lumped cable parasitics (scaled by length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CableTotals {
    pub resistance: f64,
    pub inductance: f64,
    pub capacitance: f64,
}

impl CableSpec {
    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("cable.length_m", self.length)?;
        ensure_non_negative("cable.r_ohm_per_m", self.r_per_m)?;
        ensure_non_negative("cable.l_h_per_m", self.l_per_m)?;
        ensure_non_negative("cable.c_f_per_m", self.c_per_m)
    }

    pub fn totals(&self) -> CableTotals {
        CableTotals {
            resistance: self.r_per_m * self.length,
            inductance: self.l_per_m * self.length,
            capacitance: self.c_per_m * self.length,
        }
    }
}

/// One row of a tabulated receiver impedance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpedancePoint {
    pub freq_hz: f64,
    /// `[re, im]` in ohms.
    pub z_ohm: C64,
}

/// Receiver input impedance, constant or tabulated over frequency.
///
/// Tables are interpolated linearly in real and imaginary part and held
/// constant outside their range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverImpedance {
    Constant(C64),
    Table(Vec<ImpedancePoint>),
}

impl ReceiverImpedance {
    pub fn at(&self, freq_hz: f64) -> C64 {
        match self {
            ReceiverImpedance::Constant(z) => *z,
            ReceiverImpedance::Table(rows) => {
                let first = &rows[0];
                let last = &rows[rows.len() - 1];
                if freq_hz <= first.freq_hz {
                    return first.z_ohm;
                }
                if freq_hz >= last.freq_hz {
                    return last.z_ohm;
                }
                let i = rows.partition_point(|r| r.freq_hz <= freq_hz);
                let (lo, hi) = (&rows[i - 1], &rows[i]);
                let t = (freq_hz - lo.freq_hz) / (hi.freq_hz - lo.freq_hz);
                lo.z_ohm + (hi.z_ohm - lo.z_ohm) * t
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |z: &C64| {
            if z.re.is_finite() && z.im.is_finite() && z.re > 0.0 {
                Ok(())
            } else {
                Err(Error::param(
                    "receiver.impedance",
                    format!("real part must be > 0, got {z}"),
                ))
            }
        };
        match self {
            ReceiverImpedance::Constant(z) => check(z),
            ReceiverImpedance::Table(rows) => {
                if rows.is_empty() {
                    return Err(Error::param("receiver.impedance", "table is empty"));
                }
                for w in rows.windows(2) {
                    if w[1].freq_hz <= w[0].freq_hz {
                        return Err(Error::param(
                            "receiver.impedance",
                            "table frequencies must be strictly increasing",
                        ));
                    }
                }
                rows.iter().try_for_each(|r| {
                    ensure_positive("receiver.impedance.freq_hz", r.freq_hz)?;
                    check(&r.z_ohm)
                })
            }
        }
    }
}

/// White, uncorrelated amplifier input noise densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmpNoise {
    #[serde(rename = "e_n_v_per_rthz")]
    pub e_n: f64,
    #[serde(rename = "i_n_a_per_rthz")]
    pub i_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverSpec {
    pub impedance: ReceiverImpedance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amp_noise: Option<AmpNoise>,
}

/// The complete transducer → cable → receiver system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutChain {
    pub plate: PiezoPlate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matching: Option<PassiveLayer>,
    /// Semi-infinite backing; only its force-impedance enters the model.
    pub backing: PassiveLayer,
    /// Coupling-medium force-impedance over the element area.
    #[serde(rename = "medium_impedance_ns_per_m")]
    pub medium_impedance: f64,
    pub cable: CableSpec,
    pub receiver: ReceiverSpec,
}

const AREA_TOLERANCE: f64 = 1e-9;

impl ReadoutChain {
    pub fn validate(&self) -> Result<()> {
        self.plate.validate()?;
        let area = self.plate.area;
        let same_area = |name: &'static str, a: f64| {
            if ((a - area) / area).abs() > AREA_TOLERANCE {
                Err(Error::param(
                    name,
                    format!("area {a:e} m^2 differs from plate area {area:e} m^2"),
                ))
            } else {
                Ok(())
            }
        };
        if let Some(m) = &self.matching {
            m.validate("matching")?;
            same_area("matching.area_m2", m.area)?;
        }
        self.backing.validate("backing")?;
        same_area("backing.area_m2", self.backing.area)?;
        ensure_positive("medium_impedance_ns_per_m", self.medium_impedance)?;
        self.cable.validate()?;
        self.receiver.impedance.validate()
    }

    pub fn backing_impedance(&self) -> f64 {
        self.backing.force_impedance()
    }

    pub fn receiver_impedance(&self, freq_hz: f64) -> C64 {
        self.receiver.impedance.at(freq_hz)
    }

    /// Rescales the element area coherently: plate, layers and medium
    /// force-impedance all follow the new area.
    pub fn with_area(&self, area: f64) -> Result<Self> {
        ensure_positive("area", area)?;
        let scale = area / self.plate.area;
        let mut out = self.clone();
        out.plate = self.plate.with_area(area);
        if let Some(m) = out.matching.as_mut() {
            m.area = area;
        }
        out.backing.area = area;
        out.medium_impedance = self.medium_impedance * scale;
        Ok(out)
    }

    pub fn with_diameter(&self, diameter: f64) -> Result<Self> {
        ensure_positive("diameter", diameter)?;
        let mut out = self.with_area(std::f64::consts::PI * (diameter / 2.0).powi(2))?;
        out.plate.diameter = Some(diameter);
        Ok(out)
    }

    pub fn with_cable_length(&self, length: f64) -> Result<Self> {
        ensure_non_negative("cable_length", length)?;
        let mut out = self.clone();
        out.cable.length = length;
        Ok(out)
    }

    pub fn with_receiver_impedance(&self, z: C64) -> Result<Self> {
        let impedance = ReceiverImpedance::Constant(z);
        impedance.validate()?;
        let mut out = self.clone();
        out.receiver.impedance = impedance;
        Ok(out)
    }

    /// Built-in fixture: a 5 MHz, 3 mm 1-3 composite element on 1.5 m of
    /// thin ~56 Ω micro-coax, feeding the 404−j324 Ω receiver channel.
    ///
    /// The values are plausible for such a probe, not measured data.
    pub fn reference() -> Self {
        let diameter = 3.0e-3;
        let area = std::f64::consts::PI * (diameter / 2.0) * (diameter / 2.0);
        Self {
            plate: PiezoPlate {
                thickness: 0.30e-3,
                density: 4000.0,
                stiffness_c33d: 4.36e10,
                h33: 2.0e9,
                eps33s: 600.0 * EPSILON_0,
                area,
                diameter: Some(diameter),
            },
            matching: Some(PassiveLayer {
                thickness: 0.14e-3,
                density: 1570.0,
                velocity: 2800.0,
                area,
            }),
            backing: PassiveLayer {
                thickness: 5.0e-3,
                density: 2500.0,
                velocity: 2800.0,
                area,
            },
            medium_impedance: WATER_RAYL * area,
            cable: CableSpec {
                length: 1.5,
                r_per_m: 0.2,
                l_per_m: 280e-9,
                c_per_m: 90e-12,
            },
            receiver: ReceiverSpec {
                impedance: ReceiverImpedance::Constant(RECEIVER_CHANNELS[0]),
                amp_noise: Some(AmpNoise {
                    e_n: 0.69e-9,
                    i_n: 5.0e-12,
                }),
            },
        }
    }
}

/// Specific acoustic impedance of water, Rayl.
pub const WATER_RAYL: f64 = 1.48e6;

/// Receiver input impedances of channels 1..=4 measured at 5 MHz.
pub const RECEIVER_CHANNELS: [C64; 4] = [
    C64::new(404.0, -324.0),
    C64::new(145.0, -24.0),
    C64::new(128.0, -17.0),
    C64::new(51.0, -0.07),
];

/// Physical unit of a [`Spectrum`]'s samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumUnit {
    #[serde(rename = "V/N")]
    VoltPerNewton,
    #[serde(rename = "V/Pa")]
    VoltPerPascal,
    #[serde(rename = "ohm")]
    Ohm,
    #[serde(rename = "V^2/Hz")]
    VoltSquaredPerHertz,
    #[serde(rename = "1")]
    Dimensionless,
}

/// Complex samples on a strictly increasing positive frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    freqs: Vec<f64>,
    values: Vec<C64>,
    unit: SpectrumUnit,
}

impl Spectrum {
    pub fn new(freqs: Vec<f64>, values: Vec<C64>, unit: SpectrumUnit) -> Result<Self> {
        if freqs.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "spectrum has {} frequencies but {} values",
                freqs.len(),
                values.len()
            )));
        }
        if freqs.is_empty() {
            return Err(Error::InvalidArgument("spectrum is empty".into()));
        }
        if freqs.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::InvalidArgument(
                "spectrum frequencies must be finite and > 0".into(),
            ));
        }
        if freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "spectrum frequencies must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            freqs,
            values,
            unit,
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn unit(&self) -> SpectrumUnit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Sub-spectrum with `lo <= f <= hi`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let (freqs, values): (Vec<f64>, Vec<C64>) = self
            .freqs
            .iter()
            .zip(&self.values)
            .filter(|(f, _)| **f >= lo && **f <= hi)
            .map(|(f, v)| (*f, *v))
            .unzip();
        Spectrum::new(freqs, values, self.unit)
    }
}
