mod common;

use common::*;
use paik_core::klm::{
    chain_factors, chain_matrix, circuit_port_efforts, klm_params, series_impedance_za, terminal_impedance,
    three_port_impedance, turns_ratio, Termination,
};
use paik_core::model::RECEIVER_CHANNELS;
use paik_core::resonance::{bessel_j0, bessel_j0_roots};
use paik_core::response::impulse_response;
use paik_core::transfer::{
    electrical_input_impedance, h1, h2, open_circuit_gain, H1Inputs, LookFrom,
};
use paik_core::validate::nonsingular_points;
use paik_core::{Complex64 as C64, ReadoutChain, Spectrum, SpectrumUnit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn turns_ratio_matches_direct_formula() {
    let p = ReadoutChain::reference().plate;
    let w = 2.0 * PI * 5e6;
    // φ = ωZ0 / (2·h33·sin(kL/2)); kL/2 = 9515.6098·0.15e-3 = 1.42734 rad
    let expect = w * 93.348132 / (2.0 * 2.0e9 * (9515.60977 * 0.15e-3f64).sin());
    let got = turns_ratio(w, &p).unwrap();
    assert!((got - expect).abs() / expect < 1e-6, "{got} vs {expect}");
}

#[test]
fn za_is_params_za() {
    let p = ReadoutChain::reference().plate;
    let w = 2.0 * PI * 6.1e6;
    let k = klm_params(w, &p).unwrap();
    assert_eq!(k.za, series_impedance_za(w, &p).unwrap());
    assert_eq!(k.za, C64::new(0.0, -1.0 / (w * k.c0)) + k.x1);
}

#[test]
fn circuit_solve_matches_three_port_matrix() {
    let p = ReadoutChain::reference().plate;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in nonsingular_points(&ReadoutChain::reference(), 0.1e6, 20e6, 50) {
        let w = 2.0 * PI * f;
        let flows = [
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            C64::new(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3)),
        ];
        let z = three_port_impedance(w, &p).unwrap();
        let oracle = klm_circuit(w, &p, flows);
        let fast = circuit_port_efforts(w, &p, flows).unwrap();
        for r in 0..3 {
            let direct: C64 = (0..3).map(|c| z[r][c] * flows[c]).sum();
            assert!(rel(oracle[r], direct) < 1e-9, "f={f} row {r}");
            assert!(rel(fast[r], direct) < 1e-9, "f={f} row {r}");
        }
    }
}

#[test]
fn open_and_short_identities() {
    let chain = ReadoutChain::reference();
    let p = &chain.plate;
    for f in nonsingular_points(&chain, 0.1e6, 20e6, 200) {
        let w = 2.0 * PI * f;
        let c0 = p.eps33s * p.area / p.thickness;
        let open = terminal_impedance(w, p, Termination::Open, Termination::Open).unwrap();
        assert!(rel(open, 1.0 / (J * w * c0)) < 1e-9);
        let v = (p.stiffness_c33d / p.density).sqrt();
        let z0 = p.density * v * p.area;
        let kl = w / v * p.thickness;
        let expect = 2.0 * J * p.h33 * p.h33 * (kl / 2.0).tan() / (w * w * z0) + 1.0 / (J * w * c0);
        let short = terminal_impedance(w, p, Termination::Short, Termination::Short).unwrap();
        assert!(rel(short, expect) < 1e-9, "f={f}");
    }
}

#[test]
fn chain_matrix_equals_hand_product() {
    let chain = ReadoutChain::reference();
    let w = 2.0 * PI * 5e6;
    let factors = chain_factors(w, &chain).unwrap().as_array();
    let mut m = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
    for f in factors {
        m = mat_mul(m, f.as_array());
    }
    let got = chain_matrix(w, &chain).unwrap().as_array();
    for r in 0..2 {
        for c in 0..2 {
            assert!(rel(got[r][c], m[r][c]) < 1e-13);
        }
    }
}

#[test]
fn chain_factors_match_textbook_elements() {
    // Each factor rebuilt here from its defining formula.
    let chain = ReadoutChain::reference();
    let w = 2.0 * PI * 5e6;
    let f = chain_factors(w, &chain).unwrap();
    let p = &chain.plate;
    let v = (p.stiffness_c33d / p.density).sqrt();
    let z0 = p.density * v * p.area;
    let th = w / v * p.thickness / 2.0;
    let zb = chain.backing.density * chain.backing.velocity * chain.backing.area;
    let z_back = z0 * (zb + J * z0 * th.tan()) / (z0 + J * zb * th.tan());
    assert!(rel(f.back_branch.c, 1.0 / z_back) < 1e-12);
    assert!(rel(f.front_half.b, J * z0 * th.sin()) < 1e-14);
    let t = chain.cable.totals();
    let zh = C64::new(t.resistance, w * t.inductance) / 2.0;
    let y = J * w * t.capacitance;
    assert!(rel(f.cable.a, 1.0 + zh * y) < 1e-14);
    assert!(rel(f.cable.b, 2.0 * zh + zh * zh * y) < 1e-14);
    assert!(rel(f.cable.c, y) < 1e-14);
}

#[test]
fn zero_length_cable_is_identity() {
    let chain = ReadoutChain::reference().with_cable_length(0.0).unwrap();
    let w = 2.0 * PI * 3e6;
    let f = chain_factors(w, &chain).unwrap();
    assert_eq!(f.cable, paik_core::TwoPort::identity(paik_core::Domain::Electrical));
}

#[test]
fn h1_matches_nodal_analysis() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let w = 2.0 * PI * rng.random_range(0.1e6..20e6);
        let zs = C64::new(rng.random_range(0.0..200.0), rng.random_range(-2e3..2e3));
        let zr = C64::new(rng.random_range(1.0..2e3), rng.random_range(-1e3..1e3));
        let (rc, lc, cc) = (
            rng.random_range(1e-3..5.0),
            rng.random_range(1e-9..2e-6),
            rng.random_range(1e-12..5e-10),
        );
        let got = h1(w, &H1Inputs { source_impedance: zs, cc, rc, lc, zr }).unwrap();
        let oracle = nodal_h1(w, zs, rc, lc, cc, zr);
        assert!(rel(got, oracle) < 1e-12, "{got} vs {oracle}");
    }
}

#[test]
fn h1_limits() {
    let w = 2.0 * PI * 5e6;
    let big = H1Inputs::from_capacitance(C64::new(0.0, -300.0), 0.0, C64::new(1e12, 0.0));
    assert!((h1(w, &big).unwrap().norm() - 1.0).abs() < 1e-9);
    let direct = H1Inputs::from_capacitance(C64::new(0.0, 0.0), 0.0, C64::new(50.0, -3.0));
    assert!((h1(w, &direct).unwrap() - 1.0).norm() < 1e-15);
}

#[test]
fn open_circuit_gain_is_large_zr_limit() {
    let chain = ReadoutChain::reference()
        .with_cable_length(0.0)
        .unwrap()
        .with_receiver_impedance(C64::new(1e12, 0.0))
        .unwrap();
    let w = 2.0 * PI * 5e6;
    let limit = h2(w, &chain).unwrap();
    let oc = open_circuit_gain(w, &chain).unwrap();
    assert!(rel(limit, oc) < 1e-6);
}

#[test]
fn open_circuit_gain_ignores_cable() {
    let chain = ReadoutChain::reference();
    let w = 2.0 * PI * 4.4e6;
    let a = open_circuit_gain(w, &chain).unwrap();
    let b = open_circuit_gain(w, &chain.with_cable_length(7.0).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rigid_baffle_limit() {
    // Zc → 0 collapses H2 to 2Zr/(A·Zr + B).
    let mut chain = ReadoutChain::reference();
    chain.medium_impedance = 1e-300;
    let w = 2.0 * PI * 5e6;
    let m = chain_matrix(w, &chain).unwrap();
    let zr = RECEIVER_CHANNELS[0];
    let expect = 2.0 * zr / (m.a * zr + m.b);
    assert!(rel(h2(w, &chain).unwrap(), expect) < 1e-12);
}

#[test]
fn electrical_impedance_views() {
    let chain = ReadoutChain::reference();
    let w = 2.0 * PI * 5e6;
    let at_rx = electrical_input_impedance(w, &chain, LookFrom::Receiver).unwrap();
    assert!(at_rx.re > 0.0);
    let bare = chain.with_cable_length(0.0).unwrap();
    let a = electrical_input_impedance(w, &bare, LookFrom::Receiver).unwrap();
    let b = electrical_input_impedance(w, &bare, LookFrom::PiezoTerminals).unwrap();
    assert_eq!(a, b);
}

#[test]
fn h2_factorises_for_all_channels() {
    let base = ReadoutChain::reference();
    for z in RECEIVER_CHANNELS {
        let chain = base.with_receiver_impedance(z).unwrap();
        for f in nonsingular_points(&chain, 0.1e6, 20e6, 200) {
            let w = 2.0 * PI * f;
            let inputs = H1Inputs::from_chain(w, &chain, paik_core::transfer::SourceImpedance::Thevenin).unwrap();
            let split = h1(w, &inputs).unwrap() * open_circuit_gain(w, &chain).unwrap();
            assert!(rel(split, h2(w, &chain).unwrap()) < 1e-9);
        }
    }
}

#[test]
fn lumped_cable_tracks_distributed_line() {
    let base = ReadoutChain::reference();
    let w = 2.0 * PI * 5e6;
    for d in [1.5e-3, 3e-3] {
        for z in RECEIVER_CHANNELS {
            let chain = base.with_diameter(d).unwrap().with_receiver_impedance(z).unwrap();
            let mut last = 0.0;
            for i in 1..=19 {
                let cl = 0.5 * i as f64;
                let c = chain.with_cable_length(cl).unwrap();
                let acoustic = paik_core::klm::acoustic_section(w, &c).unwrap().as_array();
                let line = distributed_line(w, c.cable.r_per_m, c.cable.l_per_m, 0.0, c.cable.c_per_m, cl);
                let oracle = h2_from(mat_mul(acoustic, line), z, c.medium_impedance).norm();
                let lumped = h2(w, &c).unwrap().norm();
                let dev = (lumped - oracle).abs() / oracle;
                if cl <= 3.5 {
                    assert!(dev < 0.05, "d={d} z={z} cl={cl}: {dev}");
                }
                assert!(dev > last, "deviation must grow with length (d={d}, z={z}, cl={cl})");
                last = dev;
            }
        }
    }
}

#[test]
fn bessel_matches_quadrature() {
    for i in 0..200 {
        let x = 0.173 * i as f64;
        assert!((bessel_j0(x) - j0_quadrature(x)).abs() < 1e-13, "x={x}");
    }
}

#[test]
fn bessel_roots_match_bisection() {
    let fast = bessel_j0_roots(10).unwrap();
    let oracle = j0_roots_oracle(10);
    for (a, b) in fast.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        assert!(bessel_j0(*a).abs() < 1e-12);
    }
    let gaps: Vec<f64> = fast.windows(2).map(|w| w[1] - w[0]).collect();
    assert!((gaps[8] - PI).abs() / PI < 0.01);
}

#[test]
fn impulse_response_matches_naive_transform() {
    let n = 256;
    let df = 1e5;
    let freqs: Vec<f64> = (1..=n / 2).map(|k| k as f64 * df).collect();
    let chain = ReadoutChain::reference();
    let values: Vec<C64> = freqs
        .iter()
        .map(|f| paik_core::transfer::h2_pressure(2.0 * PI * f, &chain).unwrap())
        .collect();
    let spec = Spectrum::new(freqs, values.clone(), SpectrumUnit::VoltPerPascal).unwrap();
    let wave = impulse_response(&spec, n as f64 * df).unwrap();
    assert!(wave.imag_residue < 1e-10);

    let mut full = vec![C64::new(0.0, 0.0); n];
    for (k, v) in values.iter().enumerate() {
        full[k + 1] = *v;
    }
    full[n / 2] = C64::new(full[n / 2].re, 0.0);
    for k in 1..n / 2 {
        full[n - k] = full[k].conj();
    }
    let oracle = naive_idft(&full);
    let peak = wave.samples.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    for (a, b) in wave.samples.iter().zip(&oracle) {
        assert!((a - b.re).abs() < 1e-12 * peak);
    }
    let time_energy: f64 = wave.samples.iter().map(|x| x * x).sum();
    let freq_energy: f64 = full.iter().map(|x| x.norm_sqr()).sum::<f64>() / n as f64;
    assert!((time_energy - freq_energy).abs() / freq_energy < 1e-9);
}

#[test]
fn gaussian_band_edges() {
    // |H| = exp(−((f − fc)/w)²) crosses −6 dB at fc ± w·sqrt(ln(10^(6/20)))
    let (fc, wd, df) = (5e6, 1.5e6, 1e4);
    let freqs: Vec<f64> = (1..=2000).map(|k| k as f64 * df).collect();
    let vals = freqs.iter().map(|f| C64::new((-((f - fc) / wd).powi(2)).exp(), 0.0)).collect();
    let spec = Spectrum::new(freqs, vals, SpectrumUnit::Dimensionless).unwrap();
    let b = paik_core::response::band_metrics(&spec, -6.0).unwrap();
    let half = wd * (10f64.powf(6.0 / 20.0)).ln().sqrt();
    assert!((b.f_lo - (fc - half)).abs() < df / 2.0);
    assert!((b.f_hi - (fc + half)).abs() < df / 2.0);
}
