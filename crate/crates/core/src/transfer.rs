//! Transfer functions of the receive chain.
//!
//! [`h1`] is the closed-form voltage division of a source impedance through
//! the cable T-network into the receiver. [`h2`] is the full force-to-voltage
//! transfer function obtained from the chain matrix with the medium as the
//! acoustic source impedance:
//!
//! ```text
//! H2 = 2·Zr / (A·Zr + B + C·Zr·Zc + D·Zc)
//! ```
//!
//! The factor 2 makes H2 the voltage per unit incident (free-field) force,
//! so that the blocked-surface force on a rigid element is twice the
//! incident one.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::klm::{acoustic_section, chain_matrix, series_impedance_za};
use crate::model::ReadoutChain;
use crate::twoport::TwoPort;
use crate::C64;

/// Inputs of the closed-form single-frequency transfer function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H1Inputs {
    /// Source impedance at the transducer terminals, Ω.
    pub source_impedance: C64,
    /// Total cable capacitance, F.
    pub cc: f64,
    /// Total cable resistance, Ω.
    pub rc: f64,
    /// Total cable inductance, H.
    pub lc: f64,
    /// Receiver impedance, Ω.
    pub zr: C64,
}

/// Which impedance stands for the transducer in [`h1`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceImpedance {
    /// Series impedance Za of the KLM network alone.
    #[default]
    Za,
    /// Full Thevenin impedance at the plate terminals, including the
    /// radiation loading of backing and medium.
    Thevenin,
}

/// Whether a transfer function is per newton or per pascal of incident wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Referral {
    #[default]
    Force,
    Pressure,
}

/// Where the electrical impedance of the chain is looked into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookFrom {
    /// Back from the receiver, through the cable.
    Receiver,
    /// Into the plate terminals, without cable.
    PiezoTerminals,
}

impl H1Inputs {
    /// Cable values from explicit totals; the cable's R and L default to 0.
    pub fn from_capacitance(source_impedance: C64, cc: f64, zr: C64) -> Self {
        Self {
            source_impedance,
            cc,
            rc: 0.0,
            lc: 0.0,
            zr,
        }
    }

    pub fn from_chain(omega: f64, chain: &ReadoutChain, source: SourceImpedance) -> Result<Self> {
        ensure_positive("omega", omega)?;
        chain.validate()?;
        let source_impedance = match source {
            SourceImpedance::Za => series_impedance_za(omega, &chain.plate)?,
            SourceImpedance::Thevenin => {
                electrical_input_impedance(omega, chain, LookFrom::PiezoTerminals)?
            }
        };
        let t = chain.cable.totals();
        Ok(Self {
            source_impedance,
            cc: t.capacitance,
            rc: t.resistance,
            lc: t.inductance,
            zr: chain.receiver_impedance(omega / (2.0 * std::f64::consts::PI)),
        })
    }
}

/// Zr / [(Z − Zr + Zs)(1 + jωCc·Z) + Z] with Z = (Rc + jωLc)/2 + Zr.
pub fn h1(omega: f64, inputs: &H1Inputs) -> Result<C64> {
    ensure_positive("omega", omega)?;
    ensure_non_negative("cc", inputs.cc)?;
    ensure_non_negative("rc", inputs.rc)?;
    ensure_non_negative("lc", inputs.lc)?;
    let zr = inputs.zr;
    let zs = inputs.source_impedance;
    if !(zr.re.is_finite() && zr.im.is_finite()) || zr.norm() == 0.0 {
        return Err(Error::param("zr", format!("must be finite and non-zero, got {zr}")));
    }
    let half = C64::new(inputs.rc, omega * inputs.lc) / 2.0;
    let z = half + zr;
    let den = (half + zs) * (1.0 + C64::new(0.0, omega * inputs.cc) * z) + z;
    if den.norm() < 1e-300 {
        return Err(Error::Singular {
            what: "H1 denominator",
            freq_hz: omega / (2.0 * std::f64::consts::PI),
        });
    }
    Ok(zr / den)
}

fn h2_from_matrix(m: &TwoPort, zr: C64, zc: f64) -> C64 {
    2.0 * zr / (m.a * zr + m.b + m.c * zr * zc + m.d * zc)
}

/// Force-referred H2 (V/N).
pub fn h2(omega: f64, chain: &ReadoutChain) -> Result<C64> {
    let m = chain_matrix(omega, chain)?;
    let zr = chain.receiver_impedance(omega / (2.0 * std::f64::consts::PI));
    Ok(h2_from_matrix(&m, zr, chain.medium_impedance))
}

/// Pressure-referred H2 (V/Pa): H2 times the element area.
pub fn h2_pressure(omega: f64, chain: &ReadoutChain) -> Result<C64> {
    Ok(h2(omega, chain)? * chain.plate.area)
}

pub fn transfer(omega: f64, chain: &ReadoutChain, referral: Referral) -> Result<C64> {
    match referral {
        Referral::Force => h2(omega, chain),
        Referral::Pressure => h2_pressure(omega, chain),
    }
}

/// Open-circuit voltage at the plate terminals per unit incident force:
/// 2 / (A + Zc·C) of the surface-to-terminal section.
pub fn open_circuit_gain(omega: f64, chain: &ReadoutChain) -> Result<C64> {
    let m = acoustic_section(omega, chain)?;
    Ok(2.0 / (m.a + m.c * chain.medium_impedance))
}

/// Open-circuit gain per unit incident pressure (V/Pa).
pub fn open_circuit_gain_pressure(omega: f64, chain: &ReadoutChain) -> Result<C64> {
    Ok(open_circuit_gain(omega, chain)? * chain.plate.area)
}

/// Electrical impedance of the chain with the medium on the front face.
pub fn electrical_input_impedance(omega: f64, chain: &ReadoutChain, look: LookFrom) -> Result<C64> {
    let m = match look {
        LookFrom::Receiver => chain_matrix(omega, chain)?,
        LookFrom::PiezoTerminals => acoustic_section(omega, chain)?,
    };
    Ok(m.output_impedance(C64::new(chain.medium_impedance, 0.0)))
}
