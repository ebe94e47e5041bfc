//! KLM equivalent circuit of a thickness-mode piezoelectric plate and the
//! element matrices of the receive chain.
//!
//! The plate is an acoustic line of length L with its electrical port tapped
//! at the midpoint through an ideal transformer (turns ratio φ) and a series
//! impedance Za. Seen from the front surface, the chain is
//!
//! ```text
//! M = M_match · M_front · M_back · M_phi · M_cap · M_cable
//! ```
//!
//! where `M_front` is the front half of the plate (θ = kL/2) and `M_back` is
//! the back half terminated by the backing, entered as a shunt admittance at
//! the midpoint. The shunt placement is what makes two open half-lines
//! combine to Z0 / (2j·tan(kL/2)).

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::model::{CableSpec, PiezoPlate, ReadoutChain};
use crate::twoport::{cascade, element, Domain, Element, TwoPort};
use crate::C64;

const J: C64 = C64::new(0.0, 1.0);

/// |sin| below this counts as exactly singular.
const SINGULAR_SIN: f64 = 1e-12;

/// Circuit quantities of the plate at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlmParams {
    pub phi: f64,
    pub za: C64,
    pub c0: f64,
    /// Dynamic reactance jX₁ = j·h33²·sin(kL) / (ω²·Z0).
    pub x1: C64,
}

/// Boundary condition on an acoustic port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Zero velocity (clamped face).
    Open,
    /// Zero force (free face).
    Short,
    /// Force-impedance load, N·s/m.
    Load(C64),
}

fn half_angle(omega: f64, plate: &PiezoPlate) -> f64 {
    omega / plate.velocity() * plate.thickness / 2.0
}

fn freq_of(omega: f64) -> f64 {
    omega / (2.0 * std::f64::consts::PI)
}

pub fn turns_ratio(omega: f64, plate: &PiezoPlate) -> Result<f64> {
    ensure_positive("omega", omega)?;
    plate.validate()?;
    let s = half_angle(omega, plate).sin();
    if s.abs() < SINGULAR_SIN {
        return Err(Error::Singular {
            what: "turns ratio (sin(kL/2) = 0)",
            freq_hz: freq_of(omega),
        });
    }
    Ok(omega * plate.z0() / (2.0 * plate.h33 * s))
}

/// jX₁, the vibration-induced part of the series impedance.
pub fn dynamic_reactance(omega: f64, plate: &PiezoPlate) -> Result<C64> {
    ensure_positive("omega", omega)?;
    plate.validate()?;
    let kl = 2.0 * half_angle(omega, plate);
    Ok(J * (plate.h33 * plate.h33 * kl.sin() / (omega * omega * plate.z0())))
}

/// Za = 1/(jωC0) + jX₁. Purely imaginary for the lossless plate.
pub fn series_impedance_za(omega: f64, plate: &PiezoPlate) -> Result<C64> {
    let x1 = dynamic_reactance(omega, plate)?;
    Ok(C64::new(0.0, -1.0 / (omega * plate.c0())) + x1)
}

pub fn klm_params(omega: f64, plate: &PiezoPlate) -> Result<KlmParams> {
    let phi = turns_ratio(omega, plate)?;
    let x1 = dynamic_reactance(omega, plate)?;
    let c0 = plate.c0();
    Ok(KlmParams {
        phi,
        za: C64::new(0.0, -1.0 / (omega * c0)) + x1,
        c0,
        x1,
    })
}

/// Three-port impedance matrix mapping (v_B, v_F, I) to (F_B, F_F, V).
pub fn three_port_impedance(omega: f64, plate: &PiezoPlate) -> Result<[[C64; 3]; 3]> {
    ensure_positive("omega", omega)?;
    plate.validate()?;
    let kl = 2.0 * half_angle(omega, plate);
    let (s, c) = kl.sin_cos();
    if s.abs() < SINGULAR_SIN {
        return Err(Error::Singular {
            what: "three-port matrix (sin(kL) = 0)",
            freq_hz: freq_of(omega),
        });
    }
    let z0 = plate.z0();
    let self_term = C64::new(z0, 0.0) / (J * (s / c));
    let cross = C64::new(z0, 0.0) / (J * s);
    let piezo = C64::new(plate.h33, 0.0) / (J * omega);
    let cap = C64::new(1.0, 0.0) / (J * omega * plate.c0());
    Ok([
        [self_term, cross, piezo],
        [cross, self_term, piezo],
        [piezo, piezo, cap],
    ])
}

/// Admittance of the back half-plate terminated by `back`, seen from the
/// plate midpoint.
fn back_branch_admittance(omega: f64, plate: &PiezoPlate, back: Termination) -> Result<C64> {
    let theta = half_angle(omega, plate);
    let (s, c) = theta.sin_cos();
    let z0 = C64::new(plate.z0(), 0.0);
    let singular = || Error::Singular {
        what: "back branch (M_back)",
        freq_hz: freq_of(omega),
    };
    match back {
        Termination::Open => {
            if c.abs() < SINGULAR_SIN {
                return Err(singular());
            }
            Ok(J * (s / c) / z0)
        }
        Termination::Short => {
            if s.abs() < SINGULAR_SIN {
                return Err(singular());
            }
            Ok(C64::new(c, 0.0) / (J * z0 * s))
        }
        Termination::Load(zb) => {
            let den = z0 * (zb * c + J * z0 * s);
            if den.norm() < SINGULAR_SIN * z0.norm() * z0.norm() {
                return Err(singular());
            }
            Ok((z0 * c + J * zb * s) / den)
        }
    }
}

/// Input impedance of the half-length plate line terminated by a backing of
/// force-impedance `zb`: Z0·(ZB + jZ0·tan(kL/2)) / (Z0 + jZB·tan(kL/2)).
pub fn back_branch_impedance(omega: f64, plate: &PiezoPlate, zb: f64) -> Result<C64> {
    ensure_positive("omega", omega)?;
    ensure_non_negative("backing impedance", zb)?;
    plate.validate()?;
    let (s, c) = half_angle(omega, plate).sin_cos();
    let z0 = plate.z0();
    let den = C64::new(z0 * c, zb * s);
    if den.norm() < SINGULAR_SIN * z0 {
        return Err(Error::Singular {
            what: "back branch (M_back)",
            freq_hz: freq_of(omega),
        });
    }
    Ok(z0 * C64::new(zb * c, z0 * s) / den)
}

/// Symmetric lumped T-network: (R+jωL)/2 in series, C in shunt,
/// (R+jωL)/2 in series.
pub fn cable_network(omega: f64, cable: &CableSpec) -> TwoPort {
    let t = cable.totals();
    let half = C64::new(t.resistance, omega * t.inductance) / 2.0;
    let e = Domain::Electrical;
    let series = TwoPort {
        b: half,
        ..TwoPort::identity(e)
    };
    let shunt = TwoPort {
        c: C64::new(0.0, omega * t.capacitance),
        ..TwoPort::identity(e)
    };
    cascade(&[series, shunt, series]).expect("electrical T-network")
}

/// The six factors of the chain matrix at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainFactors {
    pub matching: TwoPort,
    pub front_half: TwoPort,
    pub back_branch: TwoPort,
    pub transformer: TwoPort,
    pub series_cap: TwoPort,
    pub cable: TwoPort,
}

impl ChainFactors {
    pub fn as_array(&self) -> [TwoPort; 6] {
        [
            self.matching,
            self.front_half,
            self.back_branch,
            self.transformer,
            self.series_cap,
            self.cable,
        ]
    }

    pub fn product(&self) -> TwoPort {
        cascade(&self.as_array()).expect("factor domains line up")
    }

    /// Product without the cable: surface to piezo terminals.
    pub fn acoustic_section(&self) -> TwoPort {
        cascade(&self.as_array()[..5]).expect("factor domains line up")
    }
}

pub fn chain_factors(omega: f64, chain: &ReadoutChain) -> Result<ChainFactors> {
    ensure_positive("omega", omega)?;
    chain.validate()?;
    let plate = &chain.plate;
    let a = Domain::Acoustic;
    let matching = match &chain.matching {
        Some(layer) => element(&Element::Tline {
            theta: layer.phase(omega),
            z_line: C64::new(layer.force_impedance(), 0.0),
            domain: a,
        })?,
        None => TwoPort::identity(a),
    };
    let front_half = element(&Element::Tline {
        theta: half_angle(omega, plate),
        z_line: C64::new(plate.z0(), 0.0),
        domain: a,
    })?;
    let y_back = back_branch_admittance(
        omega,
        plate,
        Termination::Load(C64::new(chain.backing_impedance(), 0.0)),
    )?;
    let back_branch = element(&Element::Shunt { y: y_back, domain: a })?;
    let params = klm_params(omega, plate)?;
    let transformer = element(&Element::Transformer { phi: params.phi })?;
    let series_cap = element(&Element::Series {
        z: params.za,
        domain: Domain::Electrical,
    })?;
    Ok(ChainFactors {
        matching,
        front_half,
        back_branch,
        transformer,
        series_cap,
        cable: cable_network(omega, &chain.cable),
    })
}

/// Overall matrix: (F, v) at the transducer surface = M · (V, I) at the
/// receiver.
pub fn chain_matrix(omega: f64, chain: &ReadoutChain) -> Result<TwoPort> {
    Ok(chain_factors(omega, chain)?.product())
}

/// Surface-to-piezo-terminal matrix (no cable).
pub fn acoustic_section(omega: f64, chain: &ReadoutChain) -> Result<TwoPort> {
    Ok(chain_factors(omega, chain)?.acoustic_section())
}

/// Electrical impedance of the bare plate (no layers) with the given face
/// terminations.
pub fn terminal_impedance(
    omega: f64,
    plate: &PiezoPlate,
    front: Termination,
    back: Termination,
) -> Result<C64> {
    ensure_positive("omega", omega)?;
    plate.validate()?;
    let a = Domain::Acoustic;
    let params = klm_params(omega, plate)?;
    let m = cascade(&[
        element(&Element::Tline {
            theta: half_angle(omega, plate),
            z_line: C64::new(plate.z0(), 0.0),
            domain: a,
        })?,
        element(&Element::Shunt {
            y: back_branch_admittance(omega, plate, back)?,
            domain: a,
        })?,
        element(&Element::Transformer { phi: params.phi })?,
        element(&Element::Series {
            z: params.za,
            domain: Domain::Electrical,
        })?,
    ])?;
    Ok(match front {
        Termination::Open => m.d / m.c,
        Termination::Short => m.b / m.a,
        Termination::Load(z) => m.output_impedance(z),
    })
}

/// Port efforts (F_B, F_F, V) of the assembled KLM circuit for given port
/// flows (v_B, v_F, I), all flows directed into the plate.
///
/// Each port reaches the midpoint node through its own branch (back
/// half-line, front half-line, series Za plus transformer). With branch
/// matrices `[e; f] = M·[F_m; u]` and Σu = 0 at the node, the node force is
/// `F_m = Σ(f/D) / Σ(C/D)` and each port effort is `F_m/D + (B/D)·f`.
pub fn circuit_port_efforts(omega: f64, plate: &PiezoPlate, flows: [C64; 3]) -> Result<[C64; 3]> {
    ensure_positive("omega", omega)?;
    plate.validate()?;
    let params = klm_params(omega, plate)?;
    let a = Domain::Acoustic;
    let half = element(&Element::Tline {
        theta: half_angle(omega, plate),
        z_line: C64::new(plate.z0(), 0.0),
        domain: a,
    })?;
    let mut to_node = element(&Element::Transformer {
        phi: 1.0 / params.phi,
    })?;
    to_node.input = Domain::Electrical;
    to_node.output = Domain::Acoustic;
    let electrical = element(&Element::Series {
        z: params.za,
        domain: Domain::Electrical,
    })?
    .then(&to_node)?;
    let branches = [half, half, electrical];
    if branches.iter().any(|m| m.d.norm() < SINGULAR_SIN) {
        return Err(Error::Singular {
            what: "circuit node reduction (cos(kL/2) = 0)",
            freq_hz: freq_of(omega),
        });
    }
    let num: C64 = branches.iter().zip(&flows).map(|(m, f)| f / m.d).sum();
    let den: C64 = branches.iter().map(|m| m.c / m.d).sum();
    let f_node = num / den;
    let mut out = [C64::new(0.0, 0.0); 3];
    for (o, (m, f)) in out.iter_mut().zip(branches.iter().zip(&flows)) {
        *o = f_node / m.d + m.b / m.d * f;
    }
    Ok(out)
}

/// Smallest of |sin(kL/2)| and |sin(kL)|; zero at a singular frequency.
pub fn singularity_margin(freq_hz: f64, plate: &PiezoPlate) -> f64 {
    let theta = half_angle(crate::angular(freq_hz), plate);
    theta.sin().abs().min((2.0 * theta).sin().abs())
}

/// Frequencies in (0, f_max] where the turns ratio diverges (kL = 2πm).
pub fn turns_ratio_singularities(plate: &PiezoPlate, f_max: f64) -> Vec<f64> {
    let step = 2.0 * plate.half_wave_frequency();
    (1..)
        .map(|m| m as f64 * step)
        .take_while(|f| *f <= f_max)
        .collect()
}

/// Moves `freq_hz` off a turns-ratio singularity by 1e-6 of `bin_width`
/// (doubling the offset until clear). Returns the frequency unchanged when it
/// is not near a singular point.
pub fn nudge_off_singularity(freq_hz: f64, plate: &PiezoPlate, bin_width: f64) -> f64 {
    const CLEARANCE: f64 = 1e-9;
    let near = |f: f64| half_angle(crate::angular(f), plate).sin().abs() < CLEARANCE;
    if !near(freq_hz) {
        return freq_hz;
    }
    let mut offset = 1e-6 * bin_width;
    let mut f = freq_hz + offset;
    while near(f) {
        offset *= 2.0;
        f = freq_hz + offset;
    }
    log::warn!("frequency {freq_hz} Hz is singular for the turns ratio; evaluated at {f} Hz");
    f
}
