//! Frequency sweeps, impulse responses and band metrics.

use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{BandEdge, Error, Result};
use crate::klm::nudge_off_singularity;
use crate::model::{ReadoutChain, Spectrum, SpectrumUnit};
use crate::transfer::{transfer, Referral};
use crate::{angular, C64};

/// Uniform grid `f_min + i·(f_max − f_min)/(n_points − 1)`.
///
/// The last point is pinned to `f_max`. Doubling `n_points − 1` reproduces
/// every original point bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub f_min: f64,
    pub f_max: f64,
    pub n_points: usize,
}

impl FrequencyGrid {
    pub fn new(f_min: f64, f_max: f64, n_points: usize) -> Result<Self> {
        let grid = Self {
            f_min,
            f_max,
            n_points,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_min.is_finite() && self.f_max.is_finite()) || self.f_max <= self.f_min {
            return Err(Error::InvalidArgument(format!(
                "grid needs finite f_min < f_max, got {} .. {}",
                self.f_min, self.f_max
            )));
        }
        if self.f_max <= 0.0 {
            return Err(Error::InvalidArgument("grid lies entirely at or below DC".into()));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.f_max - self.f_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let step = self.step();
        let last = self.n_points - 1;
        (0..self.n_points)
            .map(|i| if i == last { self.f_max } else { self.f_min + i as f64 * step })
            .collect()
    }

    /// Same grid with the lower edge moved to one bin above DC when it
    /// touches or crosses zero.
    pub fn clamp_above_dc(&self) -> Self {
        if self.f_min > 0.0 {
            return *self;
        }
        let bin = self.f_max / (self.n_points - 1) as f64;
        log::warn!(
            "grid lower edge {} Hz is at or below DC; clamped to {bin} Hz",
            self.f_min
        );
        Self {
            f_min: bin,
            ..*self
        }
    }
}

pub(crate) fn unit_for(referral: Referral) -> SpectrumUnit {
    match referral {
        Referral::Force => SpectrumUnit::VoltPerNewton,
        Referral::Pressure => SpectrumUnit::VoltPerPascal,
    }
}

/// Evaluates `f` at each point after nudging it off turns-ratio
/// singularities. Returns the (possibly nudged) frequencies and values.
pub(crate) fn evaluate_on<T, F>(
    chain: &ReadoutChain,
    freqs: &[f64],
    bin_width: f64,
    f: F,
) -> Result<(Vec<f64>, Vec<T>)>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    let freqs: Vec<f64> = freqs
        .iter()
        .map(|&fr| nudge_off_singularity(fr, &chain.plate, bin_width))
        .collect();
    let values = freqs.par_iter().map(|&fr| f(fr)).collect::<Result<Vec<T>>>()?;
    Ok((freqs, values))
}

/// H2 sampled on `grid`.
pub fn frequency_response(
    chain: &ReadoutChain,
    grid: &FrequencyGrid,
    referral: Referral,
) -> Result<Spectrum> {
    grid.validate()?;
    chain.validate()?;
    let grid = grid.clamp_above_dc();
    let (freqs, values) = evaluate_on(chain, &grid.points(), grid.step(), |f| {
        transfer(angular(f), chain, referral)
    })?;
    Spectrum::new(freqs, values, unit_for(referral))
}

/// Real waveform sampled at interval `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub dt: f64,
    pub samples: Vec<f64>,
    /// Largest |imaginary part| of the inverse transform before it was
    /// discarded, relative to the peak |sample|.
    pub imag_residue: f64,
}

impl Waveform {
    pub fn times(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|i| i as f64 * self.dt).collect()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    /// Fraction of the energy in the last `fraction` of the record.
    pub fn tail_energy_fraction(&self, fraction: f64) -> f64 {
        let n = self.samples.len();
        let start = n - ((n as f64 * fraction).ceil() as usize).min(n);
        let tail: f64 = self.samples[start..].iter().map(|x| x * x).sum();
        let total = self.energy();
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

const GRID_TOL: f64 = 1e-3;

/// Builds the full two-sided DFT vector from a one-sided spectrum on a
/// uniform `k·Δf` grid. Bins not covered by the spectrum are zero, DC is
/// zero and the Nyquist bin keeps only its real part.
pub fn hermitian_extend(spec: &Spectrum, fs: f64) -> Result<Vec<C64>> {
    let freqs = spec.freqs();
    if freqs.len() < 2 {
        return Err(Error::InvalidArgument(
            "impulse response needs at least 2 frequency bins".into(),
        ));
    }
    let f_top = freqs[freqs.len() - 1];
    if !(fs.is_finite() && fs >= 2.0 * f_top * (1.0 - 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "sampling rate {fs} Hz is below twice the top frequency {f_top} Hz"
        )));
    }
    let df = (f_top - freqs[0]) / (freqs.len() - 1) as f64;
    let first_bin = (freqs[0] / df).round();
    if first_bin < 1.0 || (freqs[0] / df - first_bin).abs() > GRID_TOL {
        return Err(Error::InvalidArgument(
            "spectrum grid must be integer multiples k·Δf of its spacing".into(),
        ));
    }
    for (i, f) in freqs.iter().enumerate() {
        if ((f / df) - (first_bin + i as f64)).abs() > GRID_TOL {
            return Err(Error::InvalidArgument(format!(
                "spectrum grid is not uniform at bin {i}"
            )));
        }
    }
    let half = ((fs / df) / 2.0 - 1e-9).ceil().max(f_top / df) as usize;
    let n = 2 * half;
    let mut full = vec![C64::new(0.0, 0.0); n];
    let k0 = first_bin as usize;
    for (i, v) in spec.values().iter().enumerate() {
        full[k0 + i] = *v;
    }
    full[half] = C64::new(full[half].re, 0.0);
    for k in 1..half {
        full[n - k] = full[k].conj();
    }
    Ok(full)
}

/// Inverse DFT of the Hermitian-extended spectrum, scaled by 1/N.
///
/// The record length is `2·(n_bins − 1)` where `n_bins` counts DC through
/// Nyquist at the spectrum's spacing; `dt = 1 / (N·Δf)`.
pub fn impulse_response(spec: &Spectrum, fs: f64) -> Result<Waveform> {
    let mut buf = hermitian_extend(spec, fs)?;
    let n = buf.len();
    let df = (spec.freqs()[spec.len() - 1] - spec.freqs()[0]) / (spec.len() - 1) as f64;
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let peak = buf.iter().map(|c| c.re.abs()).fold(0.0, f64::max) * scale;
    let imag = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max) * scale;
    Ok(Waveform {
        dt: 1.0 / (n as f64 * df),
        samples: buf.iter().map(|c| c.re * scale).collect(),
        imag_residue: if peak > 0.0 { imag / peak } else { imag },
    })
}

/// Impulse response of `chain` sampled at `fs`, doubling the record length
/// from `initial_len` until less than 5% of the energy lies in the last
/// 10% of the record.
pub fn chain_impulse_response(
    chain: &ReadoutChain,
    fs: f64,
    initial_len: usize,
    referral: Referral,
) -> Result<Waveform> {
    const MAX_LEN: usize = 1 << 22;
    chain.validate()?;
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::InvalidArgument(format!("sampling rate must be > 0, got {fs}")));
    }
    let mut n = initial_len.max(4).next_power_of_two();
    loop {
        let df = fs / n as f64;
        let bins: Vec<f64> = (1..=n / 2).map(|k| k as f64 * df).collect();
        let (freqs, values) =
            evaluate_on(chain, &bins, df, |f| transfer(angular(f), chain, referral))?;
        // nudged bins stay within tolerance of k·Δf
        let spec = Spectrum::new(freqs, values, unit_for(referral))?;
        let wave = impulse_response(&spec, fs)?;
        if wave.tail_energy_fraction(0.1) < 0.05 {
            return Ok(wave);
        }
        if n >= MAX_LEN {
            return Err(Error::InvalidArgument(format!(
                "impulse response still not decayed at {n} samples"
            )));
        }
        log::debug!("impulse record of {n} samples has not decayed; doubling");
        n *= 2;
    }
}

/// Band edges around the peak at `level_db` below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandMetrics {
    pub f_lo: f64,
    pub f_hi: f64,
    pub bandwidth: f64,
    pub f_center: f64,
    pub level_db: f64,
    pub peak_freq: f64,
    /// Total width of every region above the threshold, including
    /// separate lobes.
    pub support_bandwidth: f64,
}

fn crossing(f0: f64, f1: f64, m0: f64, m1: f64, thr: f64) -> f64 {
    if m1 == m0 {
        return f0;
    }
    f0 + (thr - m0) / (m1 - m0) * (f1 - f0)
}

/// Crossings of `peak·10^(level_db/20)` nearest the global peak, linearly
/// interpolated between bins. `level_db` must be ≤ 0.
pub fn band_metrics(spec: &Spectrum, level_db: f64) -> Result<BandMetrics> {
    if !(level_db.is_finite() && level_db <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "level must be finite and <= 0 dB, got {level_db}"
        )));
    }
    let f = spec.freqs();
    let m = spec.magnitudes();
    let (ip, peak) = m
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::InvalidArgument("spectrum has no positive peak".into()));
    }
    if level_db == 0.0 {
        return Ok(BandMetrics {
            f_lo: f[ip],
            f_hi: f[ip],
            bandwidth: 0.0,
            f_center: f[ip],
            level_db,
            peak_freq: f[ip],
            support_bandwidth: 0.0,
        });
    }
    let thr = peak * 10f64.powf(level_db / 20.0);
    let lo_idx = (0..ip)
        .rev()
        .find(|&i| m[i] < thr)
        .ok_or(Error::BandUnbounded {
            edge: BandEdge::Lower,
        })?;
    let hi_idx = (ip + 1..m.len())
        .find(|&i| m[i] < thr)
        .ok_or(Error::BandUnbounded {
            edge: BandEdge::Upper,
        })?;
    let f_lo = crossing(f[lo_idx], f[lo_idx + 1], m[lo_idx], m[lo_idx + 1], thr);
    let f_hi = crossing(f[hi_idx - 1], f[hi_idx], m[hi_idx - 1], m[hi_idx], thr);

    let mut support = 0.0;
    for i in 0..m.len() - 1 {
        let (a, b) = (m[i] >= thr, m[i + 1] >= thr);
        support += match (a, b) {
            (true, true) => f[i + 1] - f[i],
            (true, false) => crossing(f[i], f[i + 1], m[i], m[i + 1], thr) - f[i],
            (false, true) => f[i + 1] - crossing(f[i], f[i + 1], m[i], m[i + 1], thr),
            (false, false) => 0.0,
        };
    }
    Ok(BandMetrics {
        f_lo,
        f_hi,
        bandwidth: f_hi - f_lo,
        f_center: 0.5 * (f_lo + f_hi),
        level_db,
        peak_freq: f[ip],
        support_bandwidth: support,
    })
}
