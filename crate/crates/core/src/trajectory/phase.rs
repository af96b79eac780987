//! Sinusoid phase of `W2(phi)`, T1 from a fitted radius, and the LR flag.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::fit::{GeometryFit, Shape};
use super::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::oracle::{infer_t1, T1Estimate};
use crate::witness::LR_BOUND;

pub const MIN_PHASE_POINTS: usize = 12;

/// `W2(phi) ~ amplitude cos(phi - pi/4 - delta) + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseFit {
    pub delta: f64,
    pub amplitude: f64,
    pub offset: f64,
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Least-squares fit of `W2 = alpha cos u + beta sin u + c`, `u = phi - pi/4`,
/// giving `delta = atan2(beta, alpha)`.
pub fn detect_phase_shift(traj: &Trajectory) -> Result<PhaseFit> {
    let n = traj.len();
    if n < MIN_PHASE_POINTS {
        return Err(invalid(format!(
            "phase fit needs at least {MIN_PHASE_POINTS} points, got {n}"
        )));
    }
    let pts = traj.points();
    let a = DMatrix::from_fn(n, 3, |i, j| {
        let u = pts[i].phi - FRAC_PI_4;
        match j {
            0 => u.cos(),
            1 => u.sin(),
            _ => 1.0,
        }
    });
    let b = DVector::from_fn(n, |i, _| pts[i].w2);
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    if sv.min() < 1e-10 * sv.max() {
        return Err(Error::UndetectableShift(
            "phases span too little of a period".into(),
        ));
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::Internal(format!("phase fit: {e}")))?;
    let amplitude = x[0].hypot(x[1]);
    let floor = (4.0 * traj.noise_sigma() / (n as f64 / 2.0).sqrt()).max(1e-9);
    if amplitude <= floor {
        return Err(Error::UndetectableShift(format!(
            "amplitude {amplitude:.3e} at or below noise floor {floor:.3e}"
        )));
    }
    Ok(PhaseFit {
        delta: x[1].atan2(x[0]),
        amplitude,
        offset: x[2],
    })
}

/// `delta(b) - delta(a)` wrapped into `(-pi, pi]`.
pub fn phase_shift_between(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    Ok(wrap_angle(
        detect_phase_shift(b)?.delta - detect_phase_shift(a)?.delta,
    ))
}

/// T1 from a circular fit via `ln(2√2 / R) = t / T1`.
pub fn infer_t1_from_fit(fit: &GeometryFit, t: f64) -> Result<T1Estimate> {
    match fit.shape {
        Shape::Circle { radius, .. } => infer_t1(radius, t),
        _ => Err(invalid(format!(
            "T1 inference needs a circle fit, got {}",
            fit.model()
        ))),
    }
}

/// Whether any circular part of the fit has a radius above the LR bound.
pub fn lr_flag(fit: &GeometryFit) -> bool {
    match &fit.shape {
        Shape::Circle { radius, .. } => *radius > LR_BOUND,
        Shape::Segmented { segments } => segments.iter().any(|s| lr_flag(&s.fit)),
        _ => false,
    }
}
