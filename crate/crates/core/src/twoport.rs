//! ABCD transfer matrices.
//!
//! Convention: `(x_in, y_in) = M · (x_out, y_out)` where `x` is force or
//! voltage and `y` is velocity or current, with `y_in` flowing into the input
//! port and `y_out` flowing out of the output port. Each matrix records the
//! domain of both ports so that a cascade cannot silently join an acoustic
//! port to an electrical one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Physical domain of a port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// (force N, particle velocity m/s)
    Acoustic,
    /// (voltage V, current A)
    Electrical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPort {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub input: Domain,
    pub output: Domain,
}

/// Primitive network elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    /// Series impedance `[[1, Z], [0, 1]]`.
    Series { z: C64, domain: Domain },
    /// Shunt admittance `[[1, 0], [Y, 1]]`.
    Shunt { y: C64, domain: Domain },
    /// Ideal transformer from the acoustic side (input) to the electrical
    /// side (output): F = φ·V, v = I/φ.
    Transformer { phi: f64 },
    /// Lossless transmission line of electrical length θ.
    Tline {
        theta: f64,
        z_line: C64,
        domain: Domain,
    },
}

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const J: C64 = C64::new(0.0, 1.0);

impl TwoPort {
    pub fn identity(domain: Domain) -> Self {
        Self {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
            input: domain,
            output: domain,
        }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// `self · next`; fails if the port domains do not line up.
    pub fn then(&self, next: &TwoPort) -> Result<TwoPort> {
        if self.output != next.input {
            return Err(Error::PortMismatch {
                from: self.output,
                to: next.input,
            });
        }
        Ok(TwoPort {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
            input: self.input,
            output: next.output,
        })
    }

    /// Input-port quantities for given output-port quantities.
    pub fn apply(&self, out: [C64; 2]) -> [C64; 2] {
        [
            self.a * out[0] + self.b * out[1],
            self.c * out[0] + self.d * out[1],
        ]
    }

    /// Impedance at the input port with `load` across the output port.
    pub fn input_impedance(&self, load: C64) -> C64 {
        (self.a * load + self.b) / (self.c * load + self.d)
    }

    /// Impedance at the output port with `termination` across the input port.
    pub fn output_impedance(&self, termination: C64) -> C64 {
        (self.b + termination * self.d) / (self.a + termination * self.c)
    }

    pub fn as_array(&self) -> [[C64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }
}

pub fn element(kind: &Element) -> Result<TwoPort> {
    let finite = |z: C64| z.re.is_finite() && z.im.is_finite();
    match *kind {
        Element::Series { z, domain } => {
            if !finite(z) {
                return Err(Error::InvalidArgument(format!("series impedance {z} not finite")));
            }
            Ok(TwoPort {
                b: z,
                ..TwoPort::identity(domain)
            })
        }
        Element::Shunt { y, domain } => {
            if !finite(y) {
                return Err(Error::InvalidArgument(format!("shunt admittance {y} not finite")));
            }
            Ok(TwoPort {
                c: y,
                ..TwoPort::identity(domain)
            })
        }
        Element::Transformer { phi } => {
            if phi == 0.0 || !phi.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "transformer ratio must be finite and non-zero, got {phi}"
                )));
            }
            Ok(TwoPort {
                a: C64::new(phi, 0.0),
                b: ZERO,
                c: ZERO,
                d: C64::new(1.0 / phi, 0.0),
                input: Domain::Acoustic,
                output: Domain::Electrical,
            })
        }
        Element::Tline {
            theta,
            z_line,
            domain,
        } => {
            if !theta.is_finite() || !finite(z_line) || z_line == ZERO {
                return Err(Error::InvalidArgument(format!(
                    "line needs finite θ and non-zero impedance, got θ={theta}, Z={z_line}"
                )));
            }
            let (s, c) = theta.sin_cos();
            Ok(TwoPort {
                a: C64::new(c, 0.0),
                b: J * z_line * s,
                c: J * s / z_line,
                d: C64::new(c, 0.0),
                input: domain,
                output: domain,
            })
        }
    }
}

/// Ordered matrix product of `parts`.
pub fn cascade(parts: &[TwoPort]) -> Result<TwoPort> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("cascade of an empty list".into()))?;
    rest.iter().try_fold(*first, |acc, m| acc.then(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn assert_mat(m: &TwoPort, expect: [[C64; 2]; 2], tol: f64) {
        let got = m.as_array();
        for i in 0..2 {
            for k in 0..2 {
                assert!(close(got[i][k], expect[i][k], tol), "[{i}][{k}] {} vs {}", got[i][k], expect[i][k]);
            }
        }
    }

    #[test]
    fn identity_cascade() {
        let i = TwoPort::identity(Domain::Electrical);
        assert_eq!(cascade(&[i, i]).unwrap(), i);
    }

    #[test]
    fn series_elements_add() {
        let z = C64::new(3.0, -2.0);
        let w = C64::new(0.5, 7.0);
        let e = Domain::Electrical;
        let m = cascade(&[
            element(&Element::Series { z, domain: e }).unwrap(),
            element(&Element::Series { z: w, domain: e }).unwrap(),
        ])
        .unwrap();
        assert_eq!(m, element(&Element::Series { z: z + w, domain: e }).unwrap());
    }

    #[test]
    fn zero_length_line_is_identity() {
        let m = element(&Element::Tline {
            theta: 0.0,
            z_line: C64::new(42.0, 0.0),
            domain: Domain::Acoustic,
        })
        .unwrap();
        assert_eq!(m, TwoPort::identity(Domain::Acoustic));
    }

    #[test]
    fn quarter_wave_line() {
        let z = C64::new(42.0, 0.0);
        let m = element(&Element::Tline {
            theta: std::f64::consts::FRAC_PI_2,
            z_line: z,
            domain: Domain::Acoustic,
        })
        .unwrap();
        assert_mat(&m, [[ZERO, J * z], [J / z, ZERO]], 1e-15);
    }

    #[test]
    fn transformer_inverse_pair() {
        let phi = 3.7;
        let up = element(&Element::Transformer { phi }).unwrap();
        let mut down = element(&Element::Transformer { phi: 1.0 / phi }).unwrap();
        // the reverse pair runs electrical → acoustic; relabel for the product
        down.input = Domain::Electrical;
        down.output = Domain::Acoustic;
        let m = up.then(&down).unwrap();
        assert_mat(&m, [[ONE, ZERO], [ZERO, ONE]], 1e-15);
    }

    #[test]
    fn transformer_rejects_zero() {
        assert!(matches!(
            element(&Element::Transformer { phi: 0.0 }),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn empty_cascade_rejected() {
        assert!(matches!(cascade(&[]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn domain_mismatch_rejected() {
        let a = TwoPort::identity(Domain::Electrical);
        let t = element(&Element::Transformer { phi: 2.0 }).unwrap();
        assert!(matches!(a.then(&t), Err(Error::PortMismatch { .. })));
    }

    #[test]
    fn impedance_views() {
        let z = C64::new(10.0, 5.0);
        let m = element(&Element::Series {
            z,
            domain: Domain::Electrical,
        })
        .unwrap();
        let load = C64::new(50.0, 0.0);
        assert!(close(m.input_impedance(load), load + z, 1e-15));
        assert!(close(m.output_impedance(load), load + z, 1e-15));
    }
}
