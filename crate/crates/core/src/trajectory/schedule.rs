//! Scenarios, piecewise noise schedules and phase sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Provenance, Trajectory, TrajectoryPoint};
use crate::channels::{noisy_prepare, Location, NoiseKind, Placement};
use crate::error::{invalid, Result};
use crate::oracle::{t1t2_evolved_ghz, T1T2Params};
use crate::qmat::DensityMatrix;
use crate::sampler::{derive_seed, estimate_witness, ShotPlan};
use crate::states::{build_rho_prime, dissipative_mixture, ghz_density, DissipationParams, RhoPrimeParams};
use crate::witness::witness_values;

/// Maximum mismatch between the end of one segment and the start of the next.
const CONTIGUITY_TOLERANCE: f64 = 1e-12;

/// The state prepared at each phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    /// `(|00> + e^{i phi}|11>)/sqrt(2)`.
    Noiseless,
    /// The preparation circuit with a noise channel on both qubits.
    Channel {
        kind: NoiseKind,
        location: Location,
        p1: f64,
        p2: f64,
    },
    /// `rho'(a, r, theta = phi)`.
    RhoPrime { a: f64, r: f64 },
    /// The `|11> -> rho' -> |00>` cascade mixture.
    Dissipative { gamma0_t: f64, gamma1_t: f64 },
    /// GHZ after combined relaxation and dephasing on both qubits.
    #[serde(rename = "t1t2")]
    T1T2 {
        t: f64,
        t1_q0: f64,
        t2_q0: f64,
        t1_q1: f64,
        t2_q1: f64,
    },
}

impl Scenario {
    /// Amplitude damping after the CNOT with equal rates chosen so the
    /// trajectory radius is `radius`.
    pub fn damped_circle(radius: f64) -> Result<Self> {
        let max = crate::witness::QUANTUM_BOUND;
        if !(radius.is_finite() && radius >= 0.0 && radius <= max) {
            return Err(invalid(format!("radius {radius} outside [0, 2√2]")));
        }
        let p = (1.0 - radius / max).clamp(0.0, 1.0);
        Ok(Scenario::Channel {
            kind: NoiseKind::AmplitudeDamping,
            location: Location::AfterCnot,
            p1: p,
            p2: p,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Scenario::Noiseless => Ok(()),
            Scenario::Channel { location, p1, p2, .. } => Placement::new(location, p1, p2).map(|_| ()),
            Scenario::RhoPrime { a, r } => RhoPrimeParams::new(a, r, 0.0).map(|_| ()),
            Scenario::Dissipative { gamma0_t, gamma1_t } => {
                DissipationParams::new(gamma0_t, gamma1_t).map(|_| ())
            }
            Scenario::T1T2 {
                t,
                t1_q0,
                t2_q0,
                t1_q1,
                t2_q1,
            } => T1T2Params::new(t, t1_q0, t2_q0, t1_q1, t2_q1).map(|_| ()),
        }
    }

    pub fn density(&self, phi: f64) -> Result<DensityMatrix> {
        match *self {
            Scenario::Noiseless => ghz_density(phi),
            Scenario::Channel { kind, location, p1, p2 } => {
                noisy_prepare(phi, &Placement::new(location, p1, p2)?, kind)
            }
            Scenario::RhoPrime { a, r } => build_rho_prime(&RhoPrimeParams::new(a, r, phi)?),
            Scenario::Dissipative { gamma0_t, gamma1_t } => {
                dissipative_mixture(phi, &DissipationParams::new(gamma0_t, gamma1_t)?)
            }
            Scenario::T1T2 {
                t,
                t1_q0,
                t2_q0,
                t1_q1,
                t2_q1,
            } => t1t2_evolved_ghz(phi, &T1T2Params::new(t, t1_q0, t2_q0, t1_q1, t2_q1)?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSegment {
    pub phi_start: f64,
    pub phi_end: f64,
    pub scenario: Scenario,
}

/// Contiguous segments; each covers `[phi_start, phi_end)`, the last one
/// also includes its end.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSchedule {
    segments: Vec<ScheduleSegment>,
}

impl NoiseSchedule {
    pub fn new(segments: Vec<ScheduleSegment>) -> Result<Self> {
        Self::check(&segments).map_err(|v| invalid(v.join("; ")))?;
        Ok(Self { segments })
    }

    /// Every problem with `segments`, for reporting all at once.
    pub fn check(segments: &[ScheduleSegment]) -> std::result::Result<(), Vec<String>> {
        let mut problems = Vec::new();
        if segments.is_empty() {
            problems.push("schedule has no segments".to_string());
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.phi_start.is_finite() && s.phi_end.is_finite() && s.phi_start < s.phi_end) {
                problems.push(format!(
                    "segment {i}: need finite phi_start < phi_end, got [{}, {}]",
                    s.phi_start, s.phi_end
                ));
            }
            if let Err(e) = s.scenario.validate() {
                problems.push(format!("segment {i}: {e}"));
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            let gap = w[1].phi_start - w[0].phi_end;
            if gap.abs() > CONTIGUITY_TOLERANCE {
                let what = if gap > 0.0 { "gap" } else { "overlap" };
                problems.push(format!(
                    "{what} between segment {i} (ends {}) and segment {} (starts {})",
                    w[0].phi_end,
                    i + 1,
                    w[1].phi_start
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }

    pub fn constant(scenario: Scenario, phi_start: f64, phi_end: f64) -> Result<Self> {
        Self::new(vec![ScheduleSegment {
            phi_start,
            phi_end,
            scenario,
        }])
    }

    /// Consecutive segments from `(phi_end, scenario)` pairs starting at `phi_start`.
    pub fn from_breaks(phi_start: f64, parts: &[(f64, Scenario)]) -> Result<Self> {
        let mut start = phi_start;
        let mut segments = Vec::with_capacity(parts.len());
        for &(end, scenario) in parts {
            segments.push(ScheduleSegment {
                phi_start: start,
                phi_end: end,
                scenario,
            });
            start = end;
        }
        Self::new(segments)
    }

    pub fn segments(&self) -> &[ScheduleSegment] {
        &self.segments
    }

    pub fn scenario_at(&self, phi: f64) -> Result<&Scenario> {
        let last = self.segments.len() - 1;
        self.segments
            .iter()
            .enumerate()
            .find(|(i, s)| {
                phi >= s.phi_start && (phi < s.phi_end || (*i == last && phi <= s.phi_end))
            })
            .map(|(_, s)| &s.scenario)
            .ok_or_else(|| {
                invalid(format!(
                    "phi = {phi} not covered by the schedule [{}, {}]",
                    self.segments[0].phi_start, self.segments[last].phi_end
                ))
            })
    }

    pub fn density(&self, phi: f64) -> Result<DensityMatrix> {
        self.scenario_at(phi)?.density(phi)
    }
}

/// `count` phases `start + k (end - start) / count`, `k = 0..count`.
pub fn phi_grid(start: f64, end: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(invalid("grid needs at least one point"));
    }
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(invalid(format!("grid needs finite start < end, got [{start}, {end}]")));
    }
    let step = (end - start) / count as f64;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// Evaluates the schedule at every phase of `grid`.
///
/// Sampled points use the sub-seed `derive_seed(plan.seed, [index])`.
pub fn sweep(grid: &[f64], schedule: &NoiseSchedule, plan: &ShotPlan) -> Result<Trajectory> {
    plan.validate()?;
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|p| !p.is_finite()) {
        return Err(invalid("phi grid must be finite and strictly increasing"));
    }
    for &phi in grid {
        schedule.scenario_at(phi)?;
    }
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(i, &phi)| {
            let rho = schedule.density(phi)?;
            if plan.exact {
                let w = witness_values(&rho)?;
                return Ok(TrajectoryPoint::exact(phi, w.w2, w.w2p));
            }
            let sub = plan.with_seed(derive_seed(plan.seed, &[i as u64]));
            let est = estimate_witness(&rho, &sub)?;
            Ok(TrajectoryPoint {
                phi,
                w2: est.w2_mean,
                w2p: est.w2p_mean,
                w2_std: Some(est.w2_std),
                w2p_std: Some(est.w2p_std),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if plan.exact {
        Trajectory::new(points, Provenance::Exact)
    } else {
        Ok(Trajectory::new(points, Provenance::Sampled)?.with_plan(plan.shots, plan.repetitions))
    }
}

/// [`sweep`] of a single scenario over the whole grid.
pub fn sweep_scenario(grid: &[f64], scenario: Scenario, plan: &ShotPlan) -> Result<Trajectory> {
    let (first, last) = match (grid.first(), grid.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(invalid("empty phi grid")),
    };
    let end = if last > first { last } else { first + 1.0 };
    sweep(grid, &NoiseSchedule::constant(scenario, first, end)?, plan)
}
