//! Pauli-pair expectations and the polynomial witnesses.
//!
//! ```text
//! M2  =  XX + XY + YX - YY        W2  =  XX + 2YX - YY
//! M2' = -XX + XY + YX + YY        W2' = -XX + 2YX + YY
//! ```
//!
//! The first letter of a pair acts on qubit 0.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qmat::{tensor, ComplexMatrix, DensityMatrix};
use crate::states::{gate, Gate};

/// Local-realism bound on `|<M2>|`.
pub const LR_BOUND: f64 = 2.0;
/// Quantum maximum of `|<M2>|`, also the noiseless trajectory radius.
pub const QUANTUM_BOUND: f64 = 2.0 * SQRT_2;

/// Largest tolerated imaginary part of a Pauli expectation.
const IMAG_RESIDUE_LIMIT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(&self) -> ComplexMatrix {
        let g = match self {
            Pauli::X => Gate::X,
            Pauli::Y => Gate::Y,
            Pauli::Z => Gate::Z,
        };
        gate(&g).expect("Pauli gates are constant")
    }

    pub fn letter(&self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A two-qubit Pauli product `P0 ⊗ P1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliPair(pub Pauli, pub Pauli);

impl PauliPair {
    pub const XX: PauliPair = PauliPair(Pauli::X, Pauli::X);
    pub const XY: PauliPair = PauliPair(Pauli::X, Pauli::Y);
    pub const YX: PauliPair = PauliPair(Pauli::Y, Pauli::X);
    pub const YY: PauliPair = PauliPair(Pauli::Y, Pauli::Y);
    pub const ZZ: PauliPair = PauliPair(Pauli::Z, Pauli::Z);

    pub fn matrix(&self) -> ComplexMatrix {
        tensor(&self.0.matrix(), &self.1.matrix()).expect("2x2 factors")
    }
}

impl fmt::Display for PauliPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0.letter(), self.1.letter())
    }
}

impl FromStr for PauliPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letter = |ch: char| match ch.to_ascii_uppercase() {
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(invalid(format!("bad Pauli letter '{ch}' in '{s}'"))),
        };
        let chars: Vec<char> = s.trim().chars().collect();
        match chars.as_slice() {
            [a, b] => Ok(PauliPair(letter(*a)?, letter(*b)?)),
            _ => Err(invalid(format!("Pauli pair must be two letters, got '{s}'"))),
        }
    }
}

/// `Tr(rho (P0 ⊗ P1))`, computed as an exact trace.
pub fn pauli_expectation(rho: &DensityMatrix, pair: PauliPair) -> Result<f64> {
    let p = pair.matrix();
    let m = rho.matrix();
    let mut tr = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            tr += m[(i, j)] * p[(j, i)];
        }
    }
    if tr.im.abs() > IMAG_RESIDUE_LIMIT {
        return Err(Error::Internal(format!(
            "<{pair}> has imaginary part {:.3e}; state is not Hermitian",
            tr.im
        )));
    }
    Ok(tr.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessValue {
    pub w2: f64,
    pub w2p: f64,
    pub m2: f64,
    pub m2p: f64,
    /// `sqrt(w2^2 + w2p^2)`.
    pub radius: f64,
}

impl WitnessValue {
    pub fn from_correlators(xx: f64, xy: f64, yx: f64, yy: f64) -> Self {
        let w2 = xx + 2.0 * yx - yy;
        let w2p = -xx + 2.0 * yx + yy;
        Self {
            w2,
            w2p,
            m2: xx + xy + yx - yy,
            m2p: -xx + xy + yx + yy,
            radius: w2.hypot(w2p),
        }
    }

    /// Whether `|<M2>|` exceeds the local-realism bound.
    pub fn violates_lr(&self) -> bool {
        self.m2.abs() > LR_BOUND
    }
}

pub fn witness_values(rho: &DensityMatrix) -> Result<WitnessValue> {
    let xx = pauli_expectation(rho, PauliPair::XX)?;
    let xy = pauli_expectation(rho, PauliPair::XY)?;
    let yx = pauli_expectation(rho, PauliPair::YX)?;
    let yy = pauli_expectation(rho, PauliPair::YY)?;
    Ok(WitnessValue::from_correlators(xx, xy, yx, yy))
}

/// Closed-form witnesses of the GHZ-like state, where `M2 = W2` and `M2' = W2'`.
pub fn analytic_ghz_witness(phi: f64) -> WitnessValue {
    let (s, c) = (phi - FRAC_PI_4).sin_cos();
    WitnessValue {
        w2: QUANTUM_BOUND * c,
        w2p: QUANTUM_BOUND * s,
        m2: QUANTUM_BOUND * c,
        m2p: QUANTUM_BOUND * s,
        radius: QUANTUM_BOUND,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_rho_prime, ghz_density, RhoPrimeParams};
    use std::f64::consts::PI;

    #[test]
    fn ghz_xx_and_yx() {
        let rho = ghz_density(0.0).unwrap();
        assert!((pauli_expectation(&rho, PauliPair::XX).unwrap() - 1.0).abs() < 1e-12);
        let rho = ghz_density(PI / 2.0).unwrap();
        assert!((pauli_expectation(&rho, PauliPair::YX).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_prime_xy_is_minus_sin_theta() {
        let theta = 0.77;
        let rho = build_rho_prime(&RhoPrimeParams::new(0.5, 0.5, theta).unwrap()).unwrap();
        let xy = pauli_expectation(&rho, PauliPair::XY).unwrap();
        assert!((xy + theta.sin()).abs() < 1e-12);
    }

    #[test]
    fn ghz_at_quarter_pi() {
        let w = witness_values(&ghz_density(PI / 4.0).unwrap()).unwrap();
        assert!((w.m2 - QUANTUM_BOUND).abs() < 1e-12);
        assert!((w.w2 - QUANTUM_BOUND).abs() < 1e-12);
        assert!(w.m2p.abs() < 1e-12 && w.w2p.abs() < 1e-12);
        assert!(w.violates_lr());
    }

    #[test]
    fn rho_prime_blind_to_mermin_visible_to_w() {
        let rho = build_rho_prime(&RhoPrimeParams::new(0.5, 0.5, PI / 2.0).unwrap()).unwrap();
        let w = witness_values(&rho).unwrap();
        assert!(w.m2.abs() < 1e-12 && w.m2p.abs() < 1e-12);
        assert!((w.w2 - 2.0).abs() < 1e-12 && (w.w2p - 2.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_gives_zero() {
        let w = witness_values(&DensityMatrix::maximally_mixed()).unwrap();
        for v in [w.w2, w.w2p, w.m2, w.m2p, w.radius] {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn analytic_values() {
        let w = analytic_ghz_witness(PI / 4.0);
        assert!((w.w2 - QUANTUM_BOUND).abs() < 1e-15 && w.w2p.abs() < 1e-15);
        let w = analytic_ghz_witness(0.0);
        assert!((w.w2 - 2.0).abs() < 1e-12 && (w.w2p + 2.0).abs() < 1e-12);
        for k in 0..16 {
            let w = analytic_ghz_witness(k as f64 * 0.4);
            assert!((w.w2.hypot(w.w2p) - QUANTUM_BOUND).abs() < 1e-12);
        }
    }

    #[test]
    fn imaginary_residue_is_an_error() {
        // a non-Hermitian matrix smuggled past validation through a huge tolerance
        let mut m = *DensityMatrix::maximally_mixed().matrix();
        m[(0, 3)] = num_complex::Complex64::new(0.0, 0.2);
        let rho = DensityMatrix::with_tolerance(m, 1.0).unwrap();
        assert!(matches!(
            pauli_expectation(&rho, PauliPair::XX),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("yx".parse::<PauliPair>().unwrap(), PauliPair::YX);
        assert!("XQ".parse::<PauliPair>().is_err());
        assert!("XYZ".parse::<PauliPair>().is_err());
        assert_eq!(PauliPair::YX.to_string(), "YX");
    }
}
