//! Single-qubit noise channels and their insertion into the preparation circuit.
//!
//! The noisy circuit is `H(q0) -> CNOT(q0 -> q1) -> U1(phi)(q0)` with the
//! pair of channels `(e1 on q0, e2 on q1)` inserted at one of three points.
//! U1 sits on the control wire and commutes with CNOT, so without noise this
//! is the same state as [`crate::states::prepare_ghz_like`]. All three channel
//! kinds are phase covariant (they commute with U1), which makes the
//! placement of the noise relative to U1 immaterial.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qmat::{apply_kraus, check_completeness, re, ComplexMatrix, DensityMatrix, Dim};
use crate::states::{gate, Gate};

/// Rate-parameterized channel kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Depolarizing,
    Dephasing,
    AmplitudeDamping,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [
        NoiseKind::Depolarizing,
        NoiseKind::Dephasing,
        NoiseKind::AmplitudeDamping,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::Dephasing => "dephasing",
            NoiseKind::AmplitudeDamping => "amplitude_damping",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| invalid(format!("unknown noise kind '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Depolarizing,
    Dephasing,
    AmplitudeDamping,
    /// Amplitude damping combined with extra pure dephasing.
    T1T2,
}

impl From<NoiseKind> for ChannelKind {
    fn from(k: NoiseKind) -> Self {
        match k {
            NoiseKind::Depolarizing => ChannelKind::Depolarizing,
            NoiseKind::Dephasing => ChannelKind::Dephasing,
            NoiseKind::AmplitudeDamping => ChannelKind::AmplitudeDamping,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelParams {
    Rate(f64),
    /// Gate time `t` with relaxation `t1` and dephasing `t2`, same units.
    Relaxation { t: f64, t1: f64, t2: f64 },
}

/// A completely positive trace-preserving single-qubit map in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseChannel {
    kind: ChannelKind,
    params: ChannelParams,
    kraus: Vec<ComplexMatrix>,
}

impl NoiseChannel {
    fn from_parts(
        kind: ChannelKind,
        params: ChannelParams,
        kraus: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        check_completeness(&kraus)?;
        Ok(Self {
            kind,
            params,
            kraus,
        })
    }

    pub fn identity() -> Self {
        Self {
            kind: ChannelKind::Depolarizing,
            params: ChannelParams::Rate(0.0),
            kraus: vec![ComplexMatrix::identity(Dim::Two)],
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn params(&self) -> ChannelParams {
        self.params
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn apply(&self, rho: &DensityMatrix, target: usize) -> Result<DensityMatrix> {
        apply_kraus(rho, &self.kraus, target)
    }

    /// Action on a single-qubit density matrix.
    pub fn apply_single(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != Dim::Two {
            return Err(invalid("apply_single expects a 2x2 density matrix"));
        }
        Ok(self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(Dim::Two), |acc, k| {
                acc + rho.conjugate_by(k)
            }))
    }
}

fn check_rate(p: f64) -> Result<()> {
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(invalid(format!("noise rate p = {p} outside [0, 1]")));
    }
    Ok(())
}

fn diag2(a: f64, b: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[re(a), re(b)]).expect("2 entries")
}

/// Kraus set for a rate-parameterized channel.
///
/// * depolarizing: `{sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}`,
///   i.e. `rho -> (1-p) rho + p I/2`
/// * dephasing: `E0 = sqrt(1-p) I, E1 = sqrt(p)|0><0|, E2 = sqrt(p)|1><1|`
/// * amplitude damping: `A0 = diag(1, sqrt(1-p)), A1 = sqrt(p)|0><1|`
pub fn make_channel(kind: NoiseKind, p: f64) -> Result<NoiseChannel> {
    check_rate(p)?;
    let kraus = match kind {
        NoiseKind::Depolarizing => {
            let w = (p / 4.0).sqrt();
            vec![
                ComplexMatrix::identity(Dim::Two).scale(re((1.0 - 0.75 * p).sqrt())),
                gate(&Gate::X)?.scale(re(w)),
                gate(&Gate::Y)?.scale(re(w)),
                gate(&Gate::Z)?.scale(re(w)),
            ]
        }
        NoiseKind::Dephasing => vec![
            ComplexMatrix::identity(Dim::Two).scale(re((1.0 - p).sqrt())),
            diag2(p.sqrt(), 0.0),
            diag2(0.0, p.sqrt()),
        ],
        NoiseKind::AmplitudeDamping => {
            let mut a1 = ComplexMatrix::zeros(Dim::Two);
            a1[(0, 1)] = re(p.sqrt());
            vec![diag2(1.0, (1.0 - p).sqrt()), a1]
        }
    };
    NoiseChannel::from_parts(kind.into(), ChannelParams::Rate(p), kraus)
}

/// Channel with `rho_11 -> rho_11 e^{-t/T1}` and `rho_01 -> rho_01 e^{-t/T2}`.
///
/// Built as amplitude damping with `p = 1 - e^{-t/T1}` followed by dephasing
/// that removes the remaining factor `e^{-t/T2 + t/(2 T1)}` from the
/// coherence. Requires `e^{-t/T2} <= e^{-t/(2 T1)}`.
pub fn make_t1t2_channel(t: f64, t1: f64, t2: f64) -> Result<NoiseChannel> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("gate time t = {t} must be finite and >= 0")));
    }
    if !(t1 > 0.0 && t2 > 0.0) || t1.is_nan() || t2.is_nan() {
        return Err(invalid(format!("T1 = {t1} and T2 = {t2} must be > 0")));
    }
    let amp = (-t / t1).exp();
    let coh = (-t / t2).exp();
    let residual = coh / (-t / (2.0 * t1)).exp();
    if residual > 1.0 + 1e-15 {
        return Err(invalid(format!(
            "CPTP constraint e^(-t/T2) <= e^(-t/(2 T1)) violated (T2 = {t2} > 2 T1 = {})",
            2.0 * t1
        )));
    }
    let damping = make_channel(NoiseKind::AmplitudeDamping, 1.0 - amp)?;
    let dephasing = make_channel(NoiseKind::Dephasing, (1.0 - residual).clamp(0.0, 1.0))?;
    let kraus = dephasing
        .kraus()
        .iter()
        .flat_map(|e| damping.kraus().iter().map(move |a| *e * *a))
        .collect();
    NoiseChannel::from_parts(
        ChannelKind::T1T2,
        ChannelParams::Relaxation { t, t1, t2 },
        kraus,
    )
}

/// Where the channel pair sits in the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    BeforeCnot,
    AfterCnot,
    AfterPhase,
}

impl Location {
    pub const ALL: [Location; 3] = [
        Location::BeforeCnot,
        Location::AfterCnot,
        Location::AfterPhase,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Location::BeforeCnot => "before_cnot",
            Location::AfterCnot => "after_cnot",
            Location::AfterPhase => "after_phase",
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Location {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Location::ALL
            .into_iter()
            .find(|l| l.name() == s.trim().to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| invalid(format!("unknown placement '{s}'")))
    }
}

/// Channel location plus the rates of `e1` (qubit 0) and `e2` (qubit 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Placement {
    pub location: Location,
    pub p1: f64,
    pub p2: f64,
}

impl Placement {
    pub fn new(location: Location, p1: f64, p2: f64) -> Result<Self> {
        let p = Self { location, p1, p2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_rate(self.p1).map_err(|_| invalid(format!("p1 = {} outside [0, 1]", self.p1)))?;
        check_rate(self.p2).map_err(|_| invalid(format!("p2 = {} outside [0, 1]", self.p2)))
    }
}

/// Runs the preparation circuit with `kind` noise at rates `(p1, p2)`.
pub fn noisy_prepare(phi: f64, placement: &Placement, kind: NoiseKind) -> Result<DensityMatrix> {
    placement.validate()?;
    let e1 = make_channel(kind, placement.p1)?;
    let e2 = make_channel(kind, placement.p2)?;
    noisy_prepare_with(phi, placement.location, &e1, &e2)
}

/// Runs the preparation circuit with arbitrary channels on each qubit.
pub fn noisy_prepare_with(
    phi: f64,
    location: Location,
    e1: &NoiseChannel,
    e2: &NoiseChannel,
) -> Result<DensityMatrix> {
    if !phi.is_finite() {
        return Err(invalid(format!("phase must be finite, got {phi}")));
    }
    let noise = |rho: DensityMatrix| -> Result<DensityMatrix> { e2.apply(&e1.apply(&rho, 0)?, 1) };
    let noise_at = |rho: DensityMatrix, here: Location| {
        if here == location {
            noise(rho)
        } else {
            Ok(rho)
        }
    };

    let h0 = ComplexMatrix::embed(&gate(&Gate::H)?, 0)?;
    let u1 = ComplexMatrix::embed(&gate(&Gate::U1(phi))?, 0)?;
    let cnot = gate(&Gate::Cnot)?;

    let rho = DensityMatrix::basis(0)?.evolve(&h0)?;
    let rho = noise_at(rho, Location::BeforeCnot)?.evolve(&cnot)?;
    let rho = noise_at(rho, Location::AfterCnot)?.evolve(&u1)?;
    noise_at(rho, Location::AfterPhase)
}
