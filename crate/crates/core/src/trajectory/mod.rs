//! Phase trajectories `(<W2>, <W2'>)(phi)` and their geometry.
//!
//! - [`schedule`]: scenarios, piecewise noise schedules, [`sweep`].
//! - [`fit`]: line, circle and ellipse fits with geometric residuals.
//! - [`classify`](mod@classify): model selection and change-point segmentation.
//! - [`phase`]: sinusoid phase `delta`, T1 inversion and the LR flag.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub mod classify;
pub mod fit;
pub mod phase;
pub mod schedule;

pub use classify::{classify, segment, select_model, ClassifyConfig, SegmentFit};
pub use fit::{fit_circle, fit_ellipse, fit_line, GeometryFit, Model, Shape};
pub use phase::{detect_phase_shift, infer_t1_from_fit, lr_flag, wrap_angle, PhaseFit};
pub use schedule::{phi_grid, sweep, sweep_scenario, NoiseSchedule, Scenario, ScheduleSegment};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub phi: f64,
    pub w2: f64,
    pub w2p: f64,
    pub w2_std: Option<f64>,
    pub w2p_std: Option<f64>,
}

impl TrajectoryPoint {
    pub fn exact(phi: f64, w2: f64, w2p: f64) -> Self {
        Self {
            phi,
            w2,
            w2p,
            w2_std: None,
            w2p_std: None,
        }
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.w2, self.w2p]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Sampled,
    Ingested,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    points: Vec<TrajectoryPoint>,
    provenance: Provenance,
    shots: u32,
    reps: u32,
}

impl Trajectory {
    /// Checks that `phi` is strictly increasing and all values are finite.
    pub fn new(points: Vec<TrajectoryPoint>, provenance: Provenance) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            let finite = [p.phi, p.w2, p.w2p].iter().all(|v| v.is_finite())
                && [p.w2_std, p.w2p_std]
                    .iter()
                    .flatten()
                    .all(|s| s.is_finite() && *s >= 0.0);
            if !finite {
                return Err(invalid(format!("point {i} has a non-finite or negative value")));
            }
            if i > 0 && p.phi <= points[i - 1].phi {
                return Err(invalid(format!(
                    "phi must be strictly increasing (point {i}: {} after {})",
                    p.phi,
                    points[i - 1].phi
                )));
            }
        }
        Ok(Self {
            points,
            provenance,
            shots: 0,
            reps: 0,
        })
    }

    /// Records the shot plan behind sampled points.
    pub fn with_plan(mut self, shots: u32, reps: u32) -> Self {
        self.shots = shots;
        self.reps = reps;
        self
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn shots(&self) -> u32 {
        self.shots
    }

    pub fn reps(&self) -> u32 {
        self.reps
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xy(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(TrajectoryPoint::xy).collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.phi).collect()
    }

    /// Points `range` as a trajectory with the same provenance and plan.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Trajectory {
        Trajectory {
            points: self.points[range].to_vec(),
            ..*self
        }
    }

    /// RMS per-coordinate standard error of the point means,
    /// `sqrt(mean((se_w2^2 + se_w2p^2) / 2))` with `se = std / sqrt(reps)`.
    /// Zero when no spreads are recorded.
    pub fn noise_sigma(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let reps = f64::from(self.reps.max(1));
        let sum: f64 = self
            .points
            .iter()
            .map(|p| {
                let a = p.w2_std.unwrap_or(0.0);
                let b = p.w2p_std.unwrap_or(0.0);
                (a * a + b * b) / (2.0 * reps)
            })
            .sum();
        (sum / self.points.len() as f64).sqrt()
    }

    /// RMS distance of the points from the origin.
    pub fn scale(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let s: f64 = self.points.iter().map(|p| p.w2 * p.w2 + p.w2p * p.w2p).sum();
        (s / self.points.len() as f64).sqrt()
    }
}
