//! Radial-mode eigenfrequencies of a circular plate.
//!
//! Standing shear waves across the diameter resonate at
//! `f_n = v_s·j0_n / (π·d)`, where `j0_n` is the n-th positive zero of J0.
//! These modes lie outside the one-dimensional thickness model and show up
//! as low-frequency peaks and time-domain tailing; this module only predicts
//! where they fall.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::model::Spectrum;
use crate::response::band_metrics;

/// J0 and J1 by Miller's backward recurrence, normalised with
/// J0 + 2·ΣJ_2k = 1.
pub fn bessel_j0_j1(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax == 0.0 {
        return (1.0, 0.0);
    }
    let start = 2 * ((ax + 30.0 + (40.0 * ax).sqrt()) as usize / 2 + 1);
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let (mut j0, mut j1) = (0.0, 0.0);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / ax * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            j1 *= 1e-250;
            norm *= 1e-250;
        }
        // j now holds J_{k-1}
        let order = k - 1;
        if order == 1 {
            j1 = j;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * j;
        }
        if order == 0 {
            j0 = j;
        }
    }
    norm += j0;
    let j1 = j1 / norm;
    (j0 / norm, if x < 0.0 { -j1 } else { j1 })
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j0_j1(x).0
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_j0_j1(x).1
}

/// First `count` positive zeros of J0 (Newton from McMahon's asymptotic
/// guess).
pub fn bessel_j0_roots(count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidArgument("root count must be >= 1".into()));
    }
    Ok((1..=count)
        .map(|n| {
            let beta = (n as f64 - 0.25) * std::f64::consts::PI;
            let mut x = beta + 1.0 / (8.0 * beta) - 124.0 / (3.0 * (8.0 * beta).powi(3));
            for _ in 0..50 {
                let (j0, j1) = bessel_j0_j1(x);
                let dx = j0 / j1;
                x += dx;
                if dx.abs() <= 4.0 * f64::EPSILON * x {
                    break;
                }
            }
            x
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialMode {
    pub n: usize,
    pub j0_n: f64,
    pub f_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialModeSet {
    pub diameter: f64,
    pub v_shear: f64,
    pub modes: Vec<RadialMode>,
}

pub fn radial_modes(diameter: f64, v_shear: f64, count: usize) -> Result<RadialModeSet> {
    ensure_positive("diameter", diameter)?;
    ensure_positive("v_shear", v_shear)?;
    let modes = bessel_j0_roots(count)?
        .into_iter()
        .enumerate()
        .map(|(i, j0_n)| RadialMode {
            n: i + 1,
            j0_n,
            f_n: v_shear * j0_n / (std::f64::consts::PI * diameter),
        })
        .collect();
    Ok(RadialModeSet {
        diameter,
        v_shear,
        modes,
    })
}

/// Shear velocity implied by a measured fundamental.
pub fn shear_velocity_from_fundamental(diameter: f64, f1: f64) -> Result<f64> {
    ensure_positive("diameter", diameter)?;
    ensure_positive("f1", f1)?;
    Ok(f1 * std::f64::consts::PI * diameter / bessel_j0_roots(1)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterPoint {
    pub diameter: f64,
    pub f_lowest: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `f_lowest` against `1/diameter`.
pub fn fit_inverse_diameter(points: &[DiameterPoint]) -> Result<LinearFit> {
    let mut pts = points.to_vec();
    for p in &pts {
        ensure_positive("diameter", p.diameter)?;
        if !p.f_lowest.is_finite() {
            return Err(Error::param("f_lowest", "must be finite"));
        }
    }
    pts.sort_by(|a, b| a.diameter.total_cmp(&b.diameter).then(a.f_lowest.total_cmp(&b.f_lowest)));
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 points, got {}", pts.len())));
    }
    if pts.iter().all(|p| p.diameter == pts[0].diameter) {
        return Err(Error::DegenerateFit("all diameters are equal".into()));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| 1.0 / p.diameter).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.f_lowest).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// −6 dB centre of the strongest peak of `spectrum` inside `[lo, hi]`.
pub fn lowest_resonance(spectrum: &Spectrum, lo: f64, hi: f64) -> Result<f64> {
    Ok(band_metrics(&spectrum.restrict(lo, hi)?, -6.0)?.f_center)
}

/// Fundamental radial frequencies for `diameters` with a multiplicative
/// uniform jitter of ±`jitter`, drawn from a seeded ChaCha8 stream.
pub fn jittered_fundamentals(
    diameters: &[f64],
    v_shear: f64,
    jitter: f64,
    seed: u64,
) -> Result<Vec<DiameterPoint>> {
    if !(0.0..1.0).contains(&jitter) {
        return Err(Error::param("jitter", format!("must lie in [0, 1), got {jitter}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    diameters
        .iter()
        .map(|&d| {
            let f1 = radial_modes(d, v_shear, 1)?.modes[0].f_n;
            let u: f64 = rng.random_range(-1.0..=1.0);
            Ok(DiameterPoint {
                diameter: d,
                f_lowest: f1 * (1.0 + jitter * u),
            })
        })
        .collect()
}
