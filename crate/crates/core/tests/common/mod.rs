//! Independent oracles shared by the integration tests.
//!
//! None of these call into the model code paths they are used to check:
//! circuits are solved as dense linear systems, transforms are naive sums,
//! Bessel values come from quadrature.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use paik_core::{Complex64 as C64, PiezoPlate};

pub const J: C64 = C64::new(0.0, 1.0);

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn solve(a: DMatrix<C64>, b: DVector<C64>) -> DVector<C64> {
    a.lu().solve(&b).expect("oracle system is non-singular")
}

/// Receiver voltage of the lumped source → T-network → load circuit for a
/// unit source voltage, by nodal analysis in sparse-tableau form.
///
/// Unknowns: node voltages V1 (after the source impedance), V2 (cable
/// midpoint), V3 (receiver) and branch currents Is, Ih1, Ih2, Ir, Ic.
/// Series elements enter as impedances, so a near-zero cable impedance does
/// not produce huge admittance entries.
pub fn nodal_h1(omega: f64, zs: C64, rc: f64, lc: f64, cc: f64, zr: C64) -> C64 {
    let zh = C64::new(rc, omega * lc) / 2.0;
    let yc = J * omega * cc;
    let o = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(8, 8, &[
        //V1  V2   V3   Is   Ih1  Ih2  Ir   Ic
        o,   z,   z,   zs,  z,   z,   z,   z,   // 1 − V1 = Zs·Is
        o,   -o,  z,   z,   -zh, z,   z,   z,   // V1 − V2 = Zh·Ih1
        z,   o,   -o,  z,   z,   -zh, z,   z,   // V2 − V3 = Zh·Ih2
        z,   z,   o,   z,   z,   z,   -zr, z,   // V3 = Zr·Ir
        z,   yc,  z,   z,   z,   z,   z,   -o,  // Ic = jωCc·V2
        z,   z,   z,   o,   -o,  z,   z,   z,   // KCL at node 1
        z,   z,   z,   z,   o,   -o,  z,   -o,  // KCL at node 2
        z,   z,   z,   z,   z,   o,   -o,  z,   // KCL at node 3
    ]);
    let b = DVector::from_vec(vec![o, z, z, z, z, z, z, z]);
    solve(a, b)[2]
}

/// Port efforts (F_B, F_F, V) of the KLM circuit for port flows
/// (v_B, v_F, I), solved as one 7×7 system in
/// (F_B, F_F, V, F_node, u_B, u_F, u_e).
pub fn klm_circuit(omega: f64, plate: &PiezoPlate, flows: [C64; 3]) -> [C64; 3] {
    let v = (plate.stiffness_c33d / plate.density).sqrt();
    let z0 = plate.density * v * plate.area;
    let c0 = plate.eps33s * plate.area / plate.thickness;
    let theta = omega / v * plate.thickness / 2.0;
    let phi = omega * z0 / (2.0 * plate.h33 * theta.sin());
    let za = 1.0 / (J * omega * c0) + J * plate.h33.powi(2) * (2.0 * theta).sin() / (omega * omega * z0);
    let (s, c) = theta.sin_cos();
    let (ta, tb, tc, td) = (C64::new(c, 0.0), J * z0 * s, J * s / z0, C64::new(c, 0.0));
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut a = DMatrix::from_element(7, 7, zero);
    let mut b = DVector::from_element(7, zero);
    // F_B = A F_n + B u_B ; v_B = C F_n + D u_B
    a[(0, 0)] = one;
    a[(0, 3)] = -ta;
    a[(0, 4)] = -tb;
    a[(1, 3)] = tc;
    a[(1, 4)] = td;
    b[1] = flows[0];
    // F_F = A F_n + B u_F ; v_F = C F_n + D u_F
    a[(2, 1)] = one;
    a[(2, 3)] = -ta;
    a[(2, 5)] = -tb;
    a[(3, 3)] = tc;
    a[(3, 5)] = td;
    b[3] = flows[1];
    // V = F_n/φ + Za·φ·u_e ; I = φ·u_e
    a[(4, 2)] = one;
    a[(4, 3)] = C64::new(-1.0 / phi, 0.0);
    a[(4, 6)] = -za * phi;
    a[(5, 6)] = C64::new(phi, 0.0);
    b[5] = flows[2];
    // node: u_B + u_F + u_e = 0
    a[(6, 4)] = one;
    a[(6, 5)] = one;
    a[(6, 6)] = one;
    let x = solve(a, b);
    [x[0], x[1], x[2]]
}

/// Plain 2×2 complex product, written out by hand.
pub fn mat_mul(p: [[C64; 2]; 2], q: [[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [
        [p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]],
        [p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]],
    ]
}

/// ABCD of a uniform RLGC line of length `len`.
pub fn distributed_line(omega: f64, r: f64, l: f64, g: f64, c: f64, len: f64) -> [[C64; 2]; 2] {
    let zser = C64::new(r, omega * l);
    let ysh = C64::new(g, omega * c);
    let z0 = (zser / ysh).sqrt();
    let gl = (zser * ysh).sqrt() * len;
    [[gl.cosh(), z0 * gl.sinh()], [gl.sinh() / z0, gl.cosh()]]
}

/// H2 from explicit matrix entries.
pub fn h2_from(m: [[C64; 2]; 2], zr: C64, zc: f64) -> C64 {
    2.0 * zr / (m[0][0] * zr + m[0][1] + m[1][0] * zr * zc + m[1][1] * zc)
}

/// Two-sided DFT by direct summation, `x[n] = (1/N) Σ X[k] e^{+j2πkn/N}`.
pub fn naive_idft(spectrum: &[C64]) -> Vec<C64> {
    let n = spectrum.len();
    (0..n)
        .map(|t| {
            spectrum
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let ang = 2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                    x * C64::from_polar(1.0, ang)
                })
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

/// J0(x) = (1/π)∫₀^π cos(x·sin t) dt by the trapezoid rule, which converges
/// geometrically for this periodic integrand.
pub fn j0_quadrature(x: f64) -> f64 {
    let n = 400 + (4.0 * x.abs()) as usize;
    let h = std::f64::consts::PI / n as f64;
    let mut s = 0.5 * (1.0 + 1.0);
    for i in 1..n {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s * h / std::f64::consts::PI
}

/// Bisection on a bracket where `f` changes sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Positive zeros of J0 from the quadrature oracle: scan for sign changes
/// with step 0.1 and bisect each bracket.
pub fn j0_roots_oracle(count: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut x = 0.1;
    let mut fx = j0_quadrature(x);
    while roots.len() < count {
        let nx = x + 0.1;
        let fn_ = j0_quadrature(nx);
        if (fx < 0.0) != (fn_ < 0.0) {
            roots.push(bisect(j0_quadrature, x, nx));
        }
        x = nx;
        fx = fn_;
    }
    roots
}
