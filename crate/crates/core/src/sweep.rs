//! Parameter grids over element area, cable length and receiver impedance.
//!
//! Cells are stored area-major: index `[i_area, i_cable, i_receiver]` lives
//! at `(i_area·n_cable + i_cable)·n_receiver + i_receiver`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::model::ReadoutChain;
use crate::noise::{snr, Excitation};
use crate::response::{band_metrics, frequency_response, BandMetrics, FrequencyGrid};
use crate::transfer::{h1, H1Inputs, Referral, SourceImpedance};
use crate::{angular, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxes {
    pub areas: Vec<f64>,
    pub cable_lengths: Vec<f64>,
    pub receiver_impedances: Vec<C64>,
}

impl SweepAxes {
    pub fn shape(&self) -> [usize; 3] {
        [
            self.areas.len(),
            self.cable_lengths.len(),
            self.receiver_impedances.len(),
        ]
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidArgument("every sweep axis needs at least one value".into()));
        }
        for &a in &self.areas {
            ensure_positive("sweep.area", a)?;
        }
        for &l in &self.cable_lengths {
            ensure_non_negative("sweep.cable_length", l)?;
        }
        for z in &self.receiver_impedances {
            if !(z.re > 0.0 && z.im.is_finite()) {
                return Err(Error::param("sweep.receiver_impedance", format!("real part must be > 0, got {z}")));
            }
        }
        Ok(())
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> Option<usize> {
        let [na, nl, nr] = self.shape();
        (idx[0] < na && idx[1] < nl && idx[2] < nr).then(|| (idx[0] * nl + idx[1]) * nr + idx[2])
    }

    fn unflatten(&self, flat: usize) -> [usize; 3] {
        let [_, nl, nr] = self.shape();
        [flat / (nl * nr), (flat / nr) % nl, flat % nr]
    }
}

/// Quantity evaluated in every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    /// |H1| at one frequency.
    H1MagAtF {
        freq_hz: f64,
        #[serde(default)]
        source: SourceImpedance,
    },
    /// Peak pressure-referred |H2| over a grid plus its band metrics.
    H2Band { grid: FrequencyGrid, level_db: f64 },
    Snr {
        excitation: Excitation,
        grid: FrequencyGrid,
        temperature_k: f64,
    },
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::H1MagAtF { .. } => "h1_mag",
            Metric::H2Band { .. } => "h2_peak_v_per_pa",
            Metric::Snr { .. } => "snr",
        }
    }

    /// Scalar value and optional band metrics for one chain.
    pub fn evaluate(&self, chain: &ReadoutChain) -> Result<(f64, Option<BandMetrics>)> {
        match self {
            Metric::H1MagAtF { freq_hz, source } => {
                let w = angular(*freq_hz);
                Ok((h1(w, &H1Inputs::from_chain(w, chain, *source)?)?.norm(), None))
            }
            Metric::H2Band { grid, level_db } => {
                let spec = frequency_response(chain, grid, Referral::Pressure)?;
                let peak = spec.magnitudes().into_iter().fold(0.0, f64::max);
                Ok((peak, Some(band_metrics(&spec, *level_db)?)))
            }
            Metric::Snr {
                excitation,
                grid,
                temperature_k,
            } => Ok((snr(chain, excitation, grid, *temperature_k)?, None)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub index: [usize; 3],
    pub area: f64,
    pub cable_length: f64,
    pub receiver_impedance: C64,
    /// `None` when the metric could not be evaluated; see `error`.
    pub value: Option<f64>,
    pub band: Option<BandMetrics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub reference: [usize; 3],
    /// Raw metric value that now reads as 1.
    pub reference_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: SweepAxes,
    pub metric: Metric,
    pub cells: Vec<SweepCell>,
    pub normalization: Option<Normalization>,
}

impl SweepResult {
    pub fn shape(&self) -> [usize; 3] {
        self.axes.shape()
    }

    pub fn cell(&self, idx: [usize; 3]) -> Option<&SweepCell> {
        self.axes.flat_index(idx).map(|i| &self.cells[i])
    }

    pub fn value(&self, idx: [usize; 3]) -> Option<f64> {
        self.cell(idx).and_then(|c| c.value)
    }
}

fn substitute(template: &ReadoutChain, area: f64, cable: f64, zr: C64) -> Result<ReadoutChain> {
    template
        .with_area(area)?
        .with_cable_length(cable)?
        .with_receiver_impedance(zr)
}

/// Evaluates `metric` on every combination of the axes. Cells that fail
/// numerically are kept with `value = None` and the error message.
pub fn sweep_grid(template: &ReadoutChain, axes: &SweepAxes, metric: &Metric) -> Result<SweepResult> {
    template.validate()?;
    axes.validate()?;
    let cells = (0..axes.len())
        .into_par_iter()
        .map(|flat| {
            let index = axes.unflatten(flat);
            let area = axes.areas[index[0]];
            let cable_length = axes.cable_lengths[index[1]];
            let receiver_impedance = axes.receiver_impedances[index[2]];
            let outcome = substitute(template, area, cable_length, receiver_impedance)
                .and_then(|chain| metric.evaluate(&chain));
            let (value, band, error) = match outcome {
                Ok((v, b)) => (Some(v), b, None),
                Err(e) => {
                    log::warn!("sweep cell {index:?} invalid: {e}");
                    (None, None, Some(e.to_string()))
                }
            };
            SweepCell {
                index,
                area,
                cable_length,
                receiver_impedance,
                value,
                band,
                error,
            }
        })
        .collect();
    Ok(SweepResult {
        axes: axes.clone(),
        metric: metric.clone(),
        cells,
        normalization: None,
    })
}

/// Divides every value by the value of the `reference` cell.
pub fn normalize(result: &SweepResult, reference: [usize; 3]) -> Result<SweepResult> {
    let r = result
        .value(reference)
        .filter(|v| v.is_finite() && *v != 0.0)
        .ok_or(Error::InvalidReference(reference))?;
    let mut out = result.clone();
    for c in &mut out.cells {
        c.value = c.value.map(|v| v / r);
    }
    let previous = result.normalization.as_ref().map_or(1.0, |n| n.reference_value);
    out.normalization = Some(Normalization {
        reference,
        reference_value: previous * r,
    });
    Ok(out)
}

/// |H1(f)| at 1 mm steps over `[lo, hi]`; the last point is `hi`.
pub fn scan_cable_length(
    chain: &ReadoutChain,
    lo: f64,
    hi: f64,
    freq_hz: f64,
    source: SourceImpedance,
) -> Result<Vec<(f64, f64)>> {
    check_range(lo, hi)?;
    let steps = ((hi - lo) / CL_RESOLUTION).round() as usize;
    (0..=steps)
        .into_par_iter()
        .map(|i| {
            let cl = if i == steps { hi } else { lo + i as f64 * CL_RESOLUTION };
            Ok((cl, h1_at_length(chain, cl, freq_hz, source)?))
        })
        .collect()
}

pub const CL_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CableOptimum {
    pub cl_opt: f64,
    pub sensitivity: f64,
    /// False when the optimum sits on a range boundary.
    pub interior: bool,
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    ensure_non_negative("cable range lower bound", lo)?;
    ensure_non_negative("cable range upper bound", hi)?;
    if hi < lo {
        return Err(Error::InvalidArgument(format!("cable range [{lo}, {hi}] is reversed")));
    }
    Ok(())
}

fn h1_at_length(chain: &ReadoutChain, cl: f64, freq_hz: f64, source: SourceImpedance) -> Result<f64> {
    let w = angular(freq_hz);
    let c = chain.with_cable_length(cl)?;
    Ok(h1(w, &H1Inputs::from_chain(w, &c, source)?)?.norm())
}

fn is_unimodal(values: &[f64]) -> bool {
    let mut falling = false;
    for w in values.windows(2) {
        if w[1] < w[0] {
            falling = true;
        } else if w[1] > w[0] && falling {
            return false;
        }
    }
    true
}

/// Cable length in `[lo, hi]` maximising |H1(f)|, by golden-section search
/// refined to 1 mm. Boundaries win when the response is monotone.
pub fn optimal_cable_length(
    chain: &ReadoutChain,
    lo: f64,
    hi: f64,
    freq_hz: f64,
    source: SourceImpedance,
) -> Result<CableOptimum> {
    check_range(lo, hi)?;
    ensure_positive("freq_hz", freq_hz)?;
    chain.validate()?;
    let eval = |cl: f64| h1_at_length(chain, cl, freq_hz, source);
    if hi == lo {
        return Ok(CableOptimum {
            cl_opt: lo,
            sensitivity: eval(lo)?,
            interior: false,
        });
    }
    let scan: Vec<f64> = scan_cable_length(chain, lo, hi, freq_hz, source)?
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    if !is_unimodal(&scan) {
        log::warn!("|H1| is not unimodal over cable lengths [{lo}, {hi}] m; golden section may miss the global maximum");
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
    while b - a > CL_RESOLUTION {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        }
    }
    let mid = 0.5 * (a + b);
    let candidates = [(lo, eval(lo)?), (mid, eval(mid)?), (hi, eval(hi)?)];
    let (cl_opt, sensitivity) = candidates
        .into_iter()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
    Ok(CableOptimum {
        cl_opt,
        sensitivity,
        interior: cl_opt != lo && cl_opt != hi,
    })
}
