//! Output-referred noise and signal-to-noise ratio.
//!
//! All noise is referred to the receiver input node. The transducer-plus-cable
//! network is represented by its Thevenin impedance Zs seen from the
//! receiver, so the four white sources are
//!
//! | term             | PSD at the receiver node            |
//! |------------------|-------------------------------------|
//! | source thermal   | 4kT·Re(Zs)·\|Zr/(Zs+Zr)\|²          |
//! | receiver thermal | 4kT·Re(Zr)·\|Zs/(Zs+Zr)\|²          |
//! | amp voltage      | e_n²                                |
//! | amp current      | \|Zs∥Zr\|²·i_n²                     |
//!
//! The two thermal terms add up to 4kT·Re(Zs∥Zr). Amplifier sources are
//! uncorrelated; 1/f and shot noise are not modelled.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::model::{AmpNoise, ReadoutChain, Spectrum, SpectrumUnit};
use crate::response::{evaluate_on, FrequencyGrid};
use crate::transfer::{electrical_input_impedance, h2_pressure, LookFrom};
use crate::{angular, BOLTZMANN, C64};

pub const DEFAULT_TEMPERATURE_K: f64 = 293.0;

/// Noise PSD terms at one frequency, V²/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseComponents {
    pub source_thermal: f64,
    pub receiver_thermal: f64,
    pub amp_voltage: f64,
    pub amp_current: f64,
}

impl NoiseComponents {
    pub fn total(&self) -> f64 {
        self.source_thermal + self.receiver_thermal + self.amp_voltage + self.amp_current
    }
}

/// Noise at the receiver node for explicit source and receiver impedances.
pub fn noise_at(zs: C64, zr: C64, temperature_k: f64, amp: Option<&AmpNoise>) -> Result<NoiseComponents> {
    ensure_non_negative("temperature_k", temperature_k)?;
    if !(zr.re > 0.0 && zr.im.is_finite()) {
        return Err(Error::param("receiver.impedance", format!("real part must be > 0, got {zr}")));
    }
    if !(zs.re.is_finite() && zs.im.is_finite()) {
        return Err(Error::param("source impedance", format!("must be finite, got {zs}")));
    }
    let sum = zs + zr;
    let four_kt = 4.0 * BOLTZMANN * temperature_k;
    let zeq = zs * zr / sum;
    let (e_n, i_n) = amp.map_or((0.0, 0.0), |a| (a.e_n, a.i_n));
    Ok(NoiseComponents {
        source_thermal: four_kt * zs.re.max(0.0) * (zr / sum).norm_sqr(),
        receiver_thermal: four_kt * zr.re * (zs / sum).norm_sqr(),
        amp_voltage: e_n * e_n,
        amp_current: zeq.norm_sqr() * i_n * i_n,
    })
}

/// Noise PSD of a chain over a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    /// Total PSD, V²/Hz (real values stored as a spectrum).
    pub psd: Spectrum,
    pub components: Vec<NoiseComponents>,
    /// Trapezoidal mean of the total PSD over `band`, V²/Hz.
    pub band_avg: f64,
    pub band: (f64, f64),
    pub temperature_k: f64,
}

impl NoiseBudget {
    pub fn freqs(&self) -> &[f64] {
        self.psd.freqs()
    }

    pub fn totals(&self) -> Vec<f64> {
        self.psd.values().iter().map(|v| v.re).collect()
    }

    /// ∫ psd df over the grid, V².
    pub fn integrated_power(&self) -> f64 {
        trapezoid(self.freqs(), &self.totals())
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

pub fn noise_psd(chain: &ReadoutChain, grid: &FrequencyGrid, temperature_k: f64) -> Result<NoiseBudget> {
    grid.validate()?;
    chain.validate()?;
    ensure_non_negative("temperature_k", temperature_k)?;
    let grid = grid.clamp_above_dc();
    let amp = chain.receiver.amp_noise.as_ref();
    if amp.is_none() {
        log::warn!("receiver has no amplifier noise model; amplifier terms are zero");
    }
    let (freqs, components) = evaluate_on(chain, &grid.points(), grid.step(), |f| {
        let zs = electrical_input_impedance(angular(f), chain, LookFrom::Receiver)?;
        noise_at(zs, chain.receiver_impedance(f), temperature_k, amp)
    })?;
    let totals: Vec<f64> = components.iter().map(NoiseComponents::total).collect();
    let band = (freqs[0], freqs[freqs.len() - 1]);
    let band_avg = trapezoid(&freqs, &totals) / (band.1 - band.0);
    let psd = Spectrum::new(
        freqs,
        totals.iter().map(|&t| C64::new(t, 0.0)).collect(),
        SpectrumUnit::VoltSquaredPerHertz,
    )?;
    Ok(NoiseBudget {
        psd,
        components,
        band_avg,
        band,
        temperature_k,
    })
}

/// Spectral shape of the incident pressure wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExcitationShape {
    /// Single tone; the signal is the response amplitude at that frequency.
    Tone { freq_hz: f64 },
    /// Uniform spectral weight; the signal is the peak of |H2| on the grid.
    Flat,
    /// Weight exp(−((f − center)/width)²); the signal is the peak of the
    /// weighted |H2| on the grid.
    Gaussian { center_hz: f64, width_hz: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    pub pressure_pa: f64,
    pub shape: ExcitationShape,
}

/// Peak signal amplitude at the receiver over rms noise in the grid band.
pub fn snr(chain: &ReadoutChain, excitation: &Excitation, grid: &FrequencyGrid, temperature_k: f64) -> Result<f64> {
    ensure_non_negative("pressure_pa", excitation.pressure_pa)?;
    let budget = noise_psd(chain, grid, temperature_k)?;
    let power = budget.integrated_power();
    if power <= 0.0 {
        return Err(Error::InfiniteSnr);
    }
    let p = excitation.pressure_pa;
    let signal = match excitation.shape {
        ExcitationShape::Tone { freq_hz } => {
            ensure_positive("tone frequency", freq_hz)?;
            if freq_hz < budget.band.0 || freq_hz > budget.band.1 {
                return Err(Error::InvalidArgument(format!(
                    "tone at {freq_hz} Hz lies outside the noise band {:?}",
                    budget.band
                )));
            }
            let f = crate::klm::nudge_off_singularity(freq_hz, &chain.plate, grid.step());
            p * h2_pressure(angular(f), chain)?.norm()
        }
        ExcitationShape::Flat => p * peak_weighted(chain, &budget, |_| 1.0)?,
        ExcitationShape::Gaussian { center_hz, width_hz } => {
            ensure_positive("gaussian width", width_hz)?;
            p * peak_weighted(chain, &budget, |f| (-((f - center_hz) / width_hz).powi(2)).exp())?
        }
    };
    Ok(signal / power.sqrt())
}

fn peak_weighted(chain: &ReadoutChain, budget: &NoiseBudget, w: impl Fn(f64) -> f64) -> Result<f64> {
    budget.freqs().iter().try_fold(0.0f64, |acc, &f| {
        Ok(acc.max(w(f) * h2_pressure(angular(f), chain)?.norm()))
    })
}
