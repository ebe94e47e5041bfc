//! Analytic-identity checks for a chain.
//!
//! Each check compares two independent evaluations of the same quantity and
//! reports the largest relative discrepancy over its sample set.

use serde::Serialize;

use crate::error::Result;
use crate::klm::{
    chain_matrix, circuit_port_efforts, series_impedance_za, singularity_margin, terminal_impedance,
    three_port_impedance, Termination,
};
use crate::model::ReadoutChain;
use crate::transfer::{h1, h2, open_circuit_gain, open_circuit_gain_pressure, H1Inputs, SourceImpedance};
use crate::{angular, C64};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Points of a uniform grid on `[lo, hi]` whose singularity margin exceeds
/// `1e-6`.
pub fn nonsingular_points(chain: &ReadoutChain, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| lo + i as f64 * step)
        .filter(|&f| singularity_margin(f, &chain.plate) > 1e-6)
        .collect()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn check(name: &'static str, tolerance: f64, errors: Result<Vec<f64>>) -> Check {
    match errors {
        Ok(e) => {
            let max_error = e.iter().copied().fold(0.0, f64::max);
            Check {
                name,
                max_error,
                tolerance,
                samples: e.len(),
                passed: !e.is_empty() && max_error <= tolerance,
            }
        }
        Err(err) => {
            log::error!("check {name} failed to evaluate: {err}");
            Check {
                name,
                max_error: f64::INFINITY,
                tolerance,
                samples: 0,
                passed: false,
            }
        }
    }
}

/// Expected electrical impedance with both faces free.
pub fn short_circuit_impedance(omega: f64, chain: &ReadoutChain) -> C64 {
    let p = &chain.plate;
    let half = omega / p.velocity() * p.thickness / 2.0;
    C64::new(0.0, 2.0 * p.h33 * p.h33 * half.tan() / (omega * omega * p.z0()))
        + C64::new(0.0, -1.0 / (omega * p.c0()))
}

/// Deterministic excitation set for the three-port comparison.
fn excitations(n: usize) -> Vec<[C64; 3]> {
    // small LCG keeps the suite free of RNG state
    let mut s: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    (0..n)
        .map(|_| {
            [
                C64::new(next(), next()),
                C64::new(next(), next()),
                C64::new(next(), next()) * 1e-3,
            ]
        })
        .collect()
}

pub fn run(chain: &ReadoutChain) -> Result<ValidationReport> {
    chain.validate()?;
    let plate = &chain.plate;
    let points = nonsingular_points(chain, 0.1e6, 20e6, 200);
    let mut checks = Vec::new();

    checks.push(check(
        "open_circuit_identity",
        1e-9,
        points
            .iter()
            .map(|&f| {
                let w = angular(f);
                let z = terminal_impedance(w, plate, Termination::Open, Termination::Open)?;
                Ok(rel(z, C64::new(0.0, -1.0 / (w * plate.c0()))))
            })
            .collect(),
    ));

    checks.push(check(
        "short_circuit_identity",
        1e-9,
        points
            .iter()
            .map(|&f| {
                let w = angular(f);
                let z = terminal_impedance(w, plate, Termination::Short, Termination::Short)?;
                Ok(rel(z, short_circuit_impedance(w, chain)))
            })
            .collect(),
    ));

    let ex = excitations(100);
    checks.push(check(
        "three_port_circuit_equivalence",
        1e-9,
        ex.iter()
            .enumerate()
            .map(|(i, flows)| {
                let w = angular(points[(i * 7) % points.len()]);
                let z = three_port_impedance(w, plate)?;
                let circuit = circuit_port_efforts(w, plate, *flows)?;
                let mut worst: f64 = 0.0;
                for r in 0..3 {
                    let direct: C64 = (0..3).map(|c| z[r][c] * flows[c]).sum();
                    worst = worst.max(rel(circuit[r], direct));
                }
                Ok(worst)
            })
            .collect(),
    ));

    checks.push(check(
        "three_port_symmetry",
        1e-12,
        points
            .iter()
            .map(|&f| {
                let z = three_port_impedance(angular(f), plate)?;
                let mut worst: f64 = 0.0;
                for r in 0..3 {
                    for c in 0..3 {
                        worst = worst.max(rel(z[r][c], z[c][r]));
                    }
                }
                Ok(worst)
            })
            .collect(),
    ));

    checks.push(check(
        "za_lossless",
        0.0,
        points
            .iter()
            .map(|&f| Ok(series_impedance_za(angular(f), plate)?.re.abs()))
            .collect(),
    ));

    checks.push(check(
        "chain_determinant",
        1e-12,
        points
            .iter()
            .map(|&f| {
                let m = chain_matrix(angular(f), chain)?;
                let scale = (m.a * m.d).norm() + (m.b * m.c).norm();
                Ok((m.det() - 1.0).norm() / scale)
            })
            .collect(),
    ));

    checks.push(check(
        "h2_factorisation",
        1e-9,
        points
            .iter()
            .map(|&f| {
                let w = angular(f);
                let inputs = H1Inputs::from_chain(w, chain, SourceImpedance::Thevenin)?;
                Ok(rel(h1(w, &inputs)? * open_circuit_gain(w, chain)?, h2(w, chain)?))
            })
            .collect(),
    ));

    checks.push(check(
        "open_circuit_area_invariance",
        1e-12,
        points
            .iter()
            .step_by(10)
            .map(|&f| {
                let w = angular(f);
                let base = open_circuit_gain_pressure(w, chain)?;
                let mut worst: f64 = 0.0;
                for s in [0.25, 4.0] {
                    let scaled = chain.with_area(chain.plate.area * s)?;
                    worst = worst.max(rel(open_circuit_gain_pressure(w, &scaled)?, base));
                }
                Ok(worst)
            })
            .collect(),
    ));

    Ok(ValidationReport { checks })
}
