//! Closed-form noisy density matrices and the quantities derived from them.
//!
//! Every noisy state produced by the preparation circuit has the form
//!
//! ```text
//! [ d0   0          0          q e^{-iφ} ]
//! [ 0    d1         r e^{-iφ}  0         ]
//! [ 0    r e^{iφ}   d2         0         ]
//! [ q e^{iφ}  0     0          d3        ]
//! ```
//!
//! and the witnesses only see the coherences: along `(1,1)/√2` the trajectory
//! coordinate is `4√2 (q + r) sin φ`, along `(1,-1)/√2` it is `4√2 q cos φ`.
//! With `r = 0` that is a circle of radius `4√2 q`. These matrices are written
//! out independently of the Kraus simulation in [`crate::channels`] so the
//! two can be checked against each other.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::channels::{Location, NoiseKind};
use crate::error::{invalid, Error, Result};
use crate::qmat::{re, ComplexMatrix, DensityMatrix, Dim, C64};
use crate::witness::QUANTUM_BOUND;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleQuery {
    pub kind: NoiseKind,
    pub location: Location,
    pub p1: f64,
    pub p2: f64,
    pub phi: f64,
}

impl OracleQuery {
    pub fn new(kind: NoiseKind, location: Location, p1: f64, p2: f64, phi: f64) -> Result<Self> {
        let q = Self {
            kind,
            location,
            p1,
            p2,
            phi,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(invalid(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if !self.phi.is_finite() {
            return Err(invalid("phase must be finite"));
        }
        Ok(())
    }
}

/// Populations and coherence magnitudes of the closed-form matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Structure {
    diag: [f64; 4],
    /// `|<00|rho|11>|`
    q: f64,
    /// `|<01|rho|10>|`
    r: f64,
}

fn structure(kind: NoiseKind, location: Location, p1: f64, p2: f64) -> Structure {
    let h = 0.5;
    match (location, kind) {
        (Location::BeforeCnot, NoiseKind::Depolarizing) => Structure {
            diag: [h - 0.25 * p2, 0.25 * p2, 0.25 * p2, h - 0.25 * p2],
            q: h - h * p1 - 0.25 * p2 + 0.25 * p1 * p2,
            r: 0.25 * p2 - 0.25 * p1 * p2,
        },
        (Location::BeforeCnot, NoiseKind::Dephasing) => Structure {
            diag: [h, 0.0, 0.0, h],
            q: h - h * p1,
            r: 0.0,
        },
        (Location::BeforeCnot, NoiseKind::AmplitudeDamping) => Structure {
            diag: [h + h * p1, 0.0, 0.0, h - h * p1],
            q: h * (1.0 - p1).max(0.0).sqrt(),
            r: 0.0,
        },
        // one family for both post-CNOT placements
        (Location::AfterCnot | Location::AfterPhase, NoiseKind::Depolarizing) => {
            let outer = h - 0.25 * p1 - 0.25 * p2 + 0.25 * p1 * p2;
            let inner = 0.25 * p1 + 0.25 * p2 - 0.25 * p1 * p2;
            Structure {
                diag: [outer, inner, inner, outer],
                q: h - h * p1 - h * p2 + h * p1 * p2,
                r: 0.0,
            }
        }
        (Location::AfterCnot | Location::AfterPhase, NoiseKind::Dephasing) => Structure {
            diag: [h, 0.0, 0.0, h],
            q: h - h * p1 - h * p2 + h * p1 * p2,
            r: 0.0,
        },
        (Location::AfterCnot | Location::AfterPhase, NoiseKind::AmplitudeDamping) => Structure {
            diag: [
                h + h * p1 * p2,
                h * p1 - h * p1 * p2,
                h * p2 - h * p1 * p2,
                h - h * p1 - h * p2 + h * p1 * p2,
            ],
            q: h * (1.0 - p1 - p2 + p1 * p2).max(0.0).sqrt(),
            r: 0.0,
        },
    }
}

fn assemble(diag: [f64; 4], q: f64, r: f64, phi: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(Dim::Four);
    for (i, d) in diag.iter().enumerate() {
        m[(i, i)] = re(*d);
    }
    m[(0, 3)] = C64::from_polar(q, -phi);
    m[(3, 0)] = C64::from_polar(q, phi);
    m[(1, 2)] = C64::from_polar(r, -phi);
    m[(2, 1)] = C64::from_polar(r, phi);
    m
}

/// Closed-form density matrix of the noisy preparation circuit.
pub fn oracle_density(q: &OracleQuery) -> Result<DensityMatrix> {
    q.validate()?;
    let s = structure(q.kind, q.location, q.p1, q.p2);
    DensityMatrix::new(assemble(s.diag, s.q, s.r, q.phi))
}

/// Trajectory radius `sqrt(<W2>^2 + <W2'>^2)` from the closed form.
///
/// Only depolarizing noise before the CNOT has `r != 0`, so it is the only
/// case where the radius depends on `phi`.
pub fn oracle_radius(q: &OracleQuery) -> Result<f64> {
    q.validate()?;
    let s = structure(q.kind, q.location, q.p1, q.p2);
    let (sin, cos) = q.phi.sin_cos();
    let k = 4.0 * SQRT_2;
    Ok(k * ((s.q + s.r).powi(2) * sin * sin + s.q * s.q * cos * cos).sqrt())
}

/// `R = 2 sqrt(2 (1 - p1 - p2 + p1 p2))` for amplitude damping after the CNOT.
/// Evaluated in the factored form `(1 - p1)(1 - p2)`, which stays accurate near zero.
pub fn amplitude_damping_radius(p1: f64, p2: f64) -> f64 {
    2.0 * (2.0 * (1.0 - p1) * (1.0 - p2)).max(0.0).sqrt()
}

/// Semi-axes of the elliptical trajectory for depolarizing noise before the CNOT.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipseAxes {
    /// Along `(1, 1)/√2`: `4√2 (q + r)`.
    pub semi_major_along_diag: f64,
    /// Along `(1, -1)/√2`: `4√2 q`.
    pub semi_minor_anti_diag: f64,
}

pub fn oracle_ellipse_axes(p1: f64, p2: f64) -> Result<EllipseAxes> {
    OracleQuery::new(NoiseKind::Depolarizing, Location::BeforeCnot, p1, p2, 0.0)?;
    let s = structure(NoiseKind::Depolarizing, Location::BeforeCnot, p1, p2);
    let k = 4.0 * SQRT_2;
    Ok(EllipseAxes {
        semi_major_along_diag: k * (s.q + s.r),
        semi_minor_anti_diag: k * s.q,
    })
}

/// Relaxation time recovered from a trajectory radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum T1Estimate {
    Finite(f64),
    /// The radius equals the noiseless `2√2`; no decay was observed.
    Unbounded,
}

impl T1Estimate {
    pub fn value(&self) -> f64 {
        match self {
            T1Estimate::Finite(v) => *v,
            T1Estimate::Unbounded => f64::INFINITY,
        }
    }
}

/// Inverts `ln(2√2 / R) = t / T1`.
pub fn infer_t1(radius: f64, t: f64) -> Result<T1Estimate> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("gate time t = {t} must be > 0")));
    }
    if !(radius.is_finite() && radius > 0.0) || radius > QUANTUM_BOUND * (1.0 + 1e-9) {
        return Err(invalid(format!(
            "radius {radius} outside (0, 2√2]; cannot infer T1"
        )));
    }
    if radius >= QUANTUM_BOUND {
        return Ok(T1Estimate::Unbounded);
    }
    Ok(T1Estimate::Finite(t / (QUANTUM_BOUND / radius).ln()))
}

/// Gate time and per-qubit relaxation/dephasing times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct T1T2Params {
    pub t: f64,
    pub t1_q0: f64,
    pub t2_q0: f64,
    pub t1_q1: f64,
    pub t2_q1: f64,
}

impl T1T2Params {
    pub fn new(t: f64, t1_q0: f64, t2_q0: f64, t1_q1: f64, t2_q1: f64) -> Result<Self> {
        let p = Self {
            t,
            t1_q0,
            t2_q0,
            t1_q1,
            t2_q1,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same `T1, T2` on both qubits.
    pub fn symmetric(t: f64, t1: f64, t2: f64) -> Result<Self> {
        Self::new(t, t1, t2, t1, t2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(invalid(format!("gate time t = {} must be >= 0", self.t)));
        }
        for (q, t1, t2) in [(0, self.t1_q0, self.t2_q0), (1, self.t1_q1, self.t2_q1)] {
            if !(t1 > 0.0 && t2 > 0.0) || t1.is_nan() || t2.is_nan() {
                return Err(invalid(format!("qubit {q}: T1 and T2 must be > 0")));
            }
            if (-self.t / t2).exp() > (-self.t / (2.0 * t1)).exp() * (1.0 + 1e-15) {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q}: CPTP constraint e^(-t/T2) <= e^(-t/(2 T1)) violated (T2 = {t2}, T1 = {t1})"
                )));
            }
        }
        Ok(())
    }

    /// `4√2 · ½ e^{-t/T2(q0) - t/T2(q1)}`.
    pub fn circle_radius(&self) -> f64 {
        2.0 * SQRT_2 * (-self.t / self.t2_q0 - self.t / self.t2_q1).exp()
    }
}

/// GHZ state after the combined amplitude-damping/dephasing channel on both qubits.
///
/// Populations use the relaxation times of the respective qubits, the
/// `|00><11|` coherence decays with both dephasing times.
pub fn t1t2_evolved_ghz(phi: f64, p: &T1T2Params) -> Result<DensityMatrix> {
    p.validate()?;
    if !phi.is_finite() {
        return Err(invalid("phase must be finite"));
    }
    let e0 = (-p.t / p.t1_q0).exp();
    let e1 = (-p.t / p.t1_q1).exp();
    let both = (-p.t / p.t1_q0 - p.t / p.t1_q1).exp();
    let coherence = 0.5 * (-p.t / p.t2_q0 - p.t / p.t2_q1).exp();
    let diag = [
        1.0 - 0.5 * e0 - 0.5 * e1 + 0.5 * both,
        0.5 * e1 - 0.5 * both,
        0.5 * e0 - 0.5 * both,
        0.5 * both,
    ];
    DensityMatrix::new(assemble(diag, coherence, 0.0, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::ghz_density;
    use std::f64::consts::PI;

    fn query(kind: NoiseKind, location: Location, p1: f64, p2: f64, phi: f64) -> OracleQuery {
        OracleQuery::new(kind, location, p1, p2, phi).unwrap()
    }

    #[test]
    fn amplitude_damping_before_entries() {
        let (p1, phi) = (0.36, 0.9);
        let rho = oracle_density(&query(
            NoiseKind::AmplitudeDamping,
            Location::BeforeCnot,
            p1,
            0.4,
            phi,
        ))
        .unwrap();
        let expected = C64::from_polar(0.5 * (1.0 - p1).sqrt(), -phi);
        assert!((rho.entry(0, 3) - expected).norm() < 1e-15);
        assert!((rho.entry(0, 0).re - (0.5 + 0.5 * p1)).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_is_ghz() {
        for loc in Location::ALL {
            for kind in NoiseKind::ALL {
                let rho = oracle_density(&query(kind, loc, 0.0, 0.0, 1.1)).unwrap();
                let ghz = ghz_density(1.1).unwrap();
                assert!(rho.matrix().max_abs_diff(ghz.matrix()) < 1e-15);
            }
        }
    }

    #[test]
    fn depolarizing_after_has_no_excited_coherence() {
        let rho = oracle_density(&query(
            NoiseKind::Depolarizing,
            Location::AfterCnot,
            0.3,
            0.6,
            0.4,
        ))
        .unwrap();
        assert_eq!(rho.entry(1, 2).norm(), 0.0);
    }

    #[test]
    fn radius_examples() {
        let r = oracle_radius(&query(
            NoiseKind::AmplitudeDamping,
            Location::AfterCnot,
            0.5,
            0.5,
            0.3,
        ))
        .unwrap();
        assert!((r - SQRT_2).abs() < 1e-12);
        assert!((amplitude_damping_radius(0.5, 0.5) - SQRT_2).abs() < 1e-12);

        for kind in NoiseKind::ALL {
            for loc in Location::ALL {
                let r = oracle_radius(&query(kind, loc, 0.0, 0.0, 0.7)).unwrap();
                assert!((r - QUANTUM_BOUND).abs() < 1e-12);
            }
        }

        let r = oracle_radius(&query(NoiseKind::Dephasing, Location::BeforeCnot, 0.5, 0.0, 2.0))
            .unwrap();
        assert!((r - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn ellipse_axes_examples() {
        let a = oracle_ellipse_axes(0.0, 0.0).unwrap();
        assert!((a.semi_major_along_diag - QUANTUM_BOUND).abs() < 1e-12);
        assert!((a.semi_minor_anti_diag - QUANTUM_BOUND).abs() < 1e-12);
        let a = oracle_ellipse_axes(0.0, 1.0).unwrap();
        assert!((a.semi_major_along_diag - QUANTUM_BOUND).abs() < 1e-12);
        assert!((a.semi_minor_anti_diag - SQRT_2).abs() < 1e-12);
        let a = oracle_ellipse_axes(1.0, 0.3).unwrap();
        assert!(a.semi_major_along_diag.abs() < 1e-12 && a.semi_minor_anti_diag.abs() < 1e-12);
        assert!(oracle_ellipse_axes(0.0, 1.2).is_err());
    }

    #[test]
    fn infer_t1_examples() {
        let e = (-1.0f64).exp();
        match infer_t1(QUANTUM_BOUND * e, 1.0).unwrap() {
            T1Estimate::Finite(t1) => assert!((t1 - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(infer_t1(QUANTUM_BOUND, 1.0).unwrap(), T1Estimate::Unbounded);
        let t1 = infer_t1(SQRT_2, 0.1).unwrap().value();
        assert!((t1 - 0.1 / 2f64.ln()).abs() < 1e-12);
        assert!((t1 - 0.14427).abs() < 1e-5);
    }

    #[test]
    fn infer_t1_rejects_out_of_range() {
        assert!(infer_t1(0.0, 1.0).is_err());
        assert!(infer_t1(-1.0, 1.0).is_err());
        assert!(infer_t1(3.0, 1.0).is_err());
        assert!(infer_t1(1.0, 0.0).is_err());
        // tiny overshoot from rounding is accepted as noiseless
        assert_eq!(
            infer_t1(QUANTUM_BOUND * (1.0 + 1e-12), 1.0).unwrap(),
            T1Estimate::Unbounded
        );
    }

    #[test]
    fn t1t2_zero_time_is_ghz() {
        let p = T1T2Params::symmetric(0.0, 1.0, 1.5).unwrap();
        let rho = t1t2_evolved_ghz(0.3, &p).unwrap();
        assert!(rho.matrix().max_abs_diff(ghz_density(0.3).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn t1t2_coherence_and_population() {
        let (t, t2) = (0.2, 0.5);
        let p = T1T2Params::symmetric(t, 0.4, t2).unwrap();
        let rho = t1t2_evolved_ghz(PI / 3.0, &p).unwrap();
        assert!((rho.entry(0, 3).norm() - 0.5 * (-2.0 * t / t2).exp()).abs() < 1e-15);

        let p = T1T2Params::symmetric(1.0, 1.0, 1.0).unwrap();
        let rho = t1t2_evolved_ghz(0.0, &p).unwrap();
        assert!((rho.entry(3, 3).re - 0.5 * (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn t1t2_rejects_cptp_violation() {
        assert!(T1T2Params::new(1.0, 1.0, 2.5, 1.0, 1.0).is_err());
        assert!(T1T2Params::new(1.0, 1.0, 1.0, 1.0, 3.0).is_err());
    }
}
