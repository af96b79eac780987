//! Model selection and change-point segmentation.
//!
//! Segmentation runs a harmonic regression `W = a cos phi + b sin phi + c`
//! (per coordinate) over a growing window. Lines with `theta = phi`,
//! circles and ellipses traced by a phase sweep are all exactly of this form,
//! so a change of scenario shows up as a run of large residuals.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::fit::{fit_circle, fit_ellipse, fit_line, rms_distance, GeometryFit, Shape};
use super::phase::{detect_phase_shift, wrap_angle};
use super::{Provenance, Trajectory};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Absolute floor of the adequacy tolerance.
    pub abs_tol: f64,
    /// Tolerance relative to the RMS magnitude of the data. Not applied to
    /// exact trajectories, which are judged against `abs_tol` alone.
    pub rel_tol: f64,
    /// Multiple of the per-point standard error admitted as residual.
    pub noise_k: f64,
    /// Consecutive outliers that trigger a split.
    pub window: usize,
    /// Outlier threshold as a multiple of the running fit's RMS.
    pub k: f64,
    /// Relative parameter agreement for merging neighbouring segments.
    pub merge_tol: f64,
    pub min_segment: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-6,
            rel_tol: 0.02,
            noise_k: 2.0,
            window: 4,
            k: 3.0,
            merge_tol: 0.05,
            min_segment: 12,
        }
    }
}

impl ClassifyConfig {
    /// Largest RMS residual at which a model counts as adequate.
    pub fn tolerance(&self, traj: &Trajectory) -> f64 {
        let rel = match traj.provenance() {
            Provenance::Exact => 0.0,
            _ => self.rel_tol * traj.scale(),
        };
        self.abs_tol.max(rel).max(self.noise_k * traj.noise_sigma())
    }
}

/// A fitted piece of a trajectory, covering points `start..end`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentFit {
    pub start: usize,
    pub end: usize,
    pub phi_start: f64,
    pub phi_end: f64,
    pub fit: GeometryFit,
}

/// Outcome of trying line, circle and ellipse in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// The first model whose RMS residual is within tolerance.
    pub adequate: Option<GeometryFit>,
    /// Every fit that succeeded.
    pub candidates: Vec<GeometryFit>,
}

impl Selection {
    pub fn best(&self) -> Option<&GeometryFit> {
        self.candidates
            .iter()
            .min_by(|a, b| a.rms_residual.total_cmp(&b.rms_residual))
    }
}

pub fn select_model(points: &[[f64; 2]], tolerance: f64) -> Selection {
    let mut candidates = Vec::new();
    let mut adequate = None;
    for fit in [fit_line(points), fit_circle(points), fit_ellipse(points)]
        .into_iter()
        .flatten()
    {
        if adequate.is_none() && fit.rms_residual <= tolerance {
            adequate = Some(fit.clone());
        }
        candidates.push(fit);
    }
    Selection { adequate, candidates }
}

/// A zero-radius circle at the centroid; used when the points do not
/// spread beyond the tolerance.
fn point_fit(points: &[[f64; 2]]) -> GeometryFit {
    let n = points.len().max(1) as f64;
    let c = [
        points.iter().map(|p| p[0]).sum::<f64>() / n,
        points.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let shape = Shape::Circle { center: c, radius: 0.0 };
    GeometryFit {
        rms_residual: rms_distance(&shape, points),
        shape,
        phase_shift: None,
    }
}

fn classify_single(traj: &Trajectory, cfg: &ClassifyConfig) -> Selection {
    let pts = traj.xy();
    let tol = cfg.tolerance(traj);
    let point = point_fit(&pts);
    if point.rms_residual <= tol {
        return Selection {
            adequate: Some(point.clone()),
            candidates: vec![point],
        };
    }
    let mut sel = select_model(&pts, tol);
    if sel.candidates.is_empty() {
        sel.candidates.push(point);
    }
    sel
}

fn with_phase(mut fit: GeometryFit, traj: &Trajectory) -> GeometryFit {
    fit.phase_shift = detect_phase_shift(traj).ok().map(|p| p.delta);
    fit
}

fn segment_fit(traj: &Trajectory, start: usize, end: usize, cfg: &ClassifyConfig) -> SegmentFit {
    let sub = traj.slice(start..end);
    let sel = classify_single(&sub, cfg);
    let fit = sel
        .adequate
        .clone()
        .or_else(|| sel.best().cloned())
        .expect("classify_single always yields a candidate");
    SegmentFit {
        start,
        end,
        phi_start: traj.points()[start].phi,
        phi_end: traj.points()[end - 1].phi,
        fit: with_phase(fit, &sub),
    }
}

/// Simplest adequate model (line, then circle, then ellipse). When none is
/// adequate and there are enough points, the trajectory is segmented; the
/// lowest-residual fit is returned if that finds no change point.
///
/// For segmented fits `phase_shift` holds the shift between the first two
/// segments whose phases are detectable.
pub fn classify(traj: &Trajectory, cfg: &ClassifyConfig) -> Result<GeometryFit> {
    if traj.len() < 12 {
        return Err(invalid(format!(
            "classification needs at least 12 points, got {}",
            traj.len()
        )));
    }
    let sel = classify_single(traj, cfg);
    if let Some(fit) = sel.adequate {
        return Ok(with_phase(fit, traj));
    }
    if traj.len() >= 2 * cfg.min_segment.max(1) {
        let segments = segment(traj, cfg)?;
        if segments.len() >= 2 {
            let n = traj.len() as f64;
            let ss: f64 = segments
                .iter()
                .map(|s| s.fit.rms_residual.powi(2) * (s.end - s.start) as f64)
                .sum();
            let deltas: Vec<f64> = segments.iter().filter_map(|s| s.fit.phase_shift).collect();
            let phase_shift = (deltas.len() >= 2).then(|| wrap_angle(deltas[1] - deltas[0]));
            return Ok(GeometryFit {
                shape: Shape::Segmented { segments },
                rms_residual: (ss / n).sqrt(),
                phase_shift,
            });
        }
    }
    let best = sel.best().cloned().expect("classify_single always yields a candidate");
    Ok(with_phase(best, traj))
}

struct Harmonic {
    coef: [Vector3<f64>; 2],
}

fn basis(phi: f64) -> Vector3<f64> {
    let (s, c) = phi.sin_cos();
    Vector3::new(c, s, 1.0)
}

impl Harmonic {
    fn fit(phis: &[f64], xy: &[[f64; 2]], range: std::ops::Range<usize>) -> Option<Self> {
        if range.len() < 4 {
            return None;
        }
        let mut ata = Matrix3::<f64>::zeros();
        let mut aty = [Vector3::<f64>::zeros(); 2];
        for i in range {
            let b = basis(phis[i]);
            ata += b * b.transpose();
            aty[0] += b * xy[i][0];
            aty[1] += b * xy[i][1];
        }
        let lu = ata.lu();
        Some(Self {
            coef: [lu.solve(&aty[0])?, lu.solve(&aty[1])?],
        })
    }

    fn residual(&self, phi: f64, p: [f64; 2]) -> f64 {
        let b = basis(phi);
        (p[0] - self.coef[0].dot(&b)).hypot(p[1] - self.coef[1].dot(&b))
    }

    fn rss(&self, phis: &[f64], xy: &[[f64; 2]], range: std::ops::Range<usize>) -> f64 {
        range.map(|i| self.residual(phis[i], xy[i]).powi(2)).sum()
    }
}

fn harmonic_rss(phis: &[f64], xy: &[[f64; 2]], range: std::ops::Range<usize>) -> f64 {
    Harmonic::fit(phis, xy, range.clone())
        .map(|h| h.rss(phis, xy, range))
        .unwrap_or(f64::INFINITY)
}

/// Greedy scan for change points: the running fit absorbs inliers, and
/// `window` consecutive residuals above `k * max(rms, floor)` start a new segment.
fn detect_breaks(phis: &[f64], xy: &[[f64; 2]], floor: f64, cfg: &ClassifyConfig) -> Vec<usize> {
    let n = phis.len();
    let min_seg = cfg.min_segment.max(4);
    let window = cfg.window.max(1);
    let mut breaks = Vec::new();
    let mut start = 0;
    while n - start >= 2 * min_seg {
        let mut end = start + min_seg;
        let Some(mut h) = Harmonic::fit(phis, xy, start..end) else {
            break;
        };
        let mut rms = (h.rss(phis, xy, start..end) / (end - start - 3) as f64).sqrt();
        let mut run = 0;
        let mut found = None;
        for i in start + min_seg..n {
            if h.residual(phis[i], xy[i]) > cfg.k * rms.max(floor) {
                run += 1;
                if run == window {
                    found = Some(i + 1 - window);
                    break;
                }
            } else {
                run = 0;
                end = i + 1;
                if let Some(next) = Harmonic::fit(phis, xy, start..end) {
                    h = next;
                    rms = (h.rss(phis, xy, start..end) / (end - start - 3) as f64).sqrt();
                }
            }
        }
        match found {
            Some(cp) if n - cp >= min_seg => {
                breaks.push(cp);
                start = cp;
            }
            _ => break,
        }
    }
    breaks
}

/// Moves each break within `[b - min_segment, b + window]` to the position
/// minimising the combined harmonic RSS of its two neighbours.
fn refine_breaks(phis: &[f64], xy: &[[f64; 2]], breaks: &mut [usize], cfg: &ClassifyConfig) {
    let n = phis.len();
    for j in 0..breaks.len() {
        let left = if j == 0 { 0 } else { breaks[j - 1] };
        let right = breaks.get(j + 1).copied().unwrap_or(n);
        let b = breaks[j];
        let lo = b.saturating_sub(cfg.min_segment).max(left + 4);
        let hi = (b + cfg.window).min(right.saturating_sub(4));
        let mut best = (harmonic_rss(phis, xy, left..b) + harmonic_rss(phis, xy, b..right), b);
        for c in lo..=hi {
            let cost = harmonic_rss(phis, xy, left..c) + harmonic_rss(phis, xy, c..right);
            if cost < best.0 {
                best = (cost, c);
            }
        }
        breaks[j] = best.1;
    }
}

/// Removes breaks that leave a segment shorter than `min_segment`, merging
/// the short piece into whichever neighbour fits it better.
fn enforce_min_length(phis: &[f64], xy: &[[f64; 2]], breaks: &mut Vec<usize>, min_seg: usize) {
    let n = phis.len();
    loop {
        let bounds: Vec<usize> = std::iter::once(0)
            .chain(breaks.iter().copied())
            .chain(std::iter::once(n))
            .collect();
        let Some(short) = (0..bounds.len() - 1).find(|&s| bounds[s + 1] - bounds[s] < min_seg)
        else {
            return;
        };
        let nseg = bounds.len() - 1;
        if nseg == 1 {
            return;
        }
        // break index `short - 1` joins with the left neighbour, `short` with the right
        let drop = if short == 0 {
            0
        } else if short == nseg - 1 {
            short - 1
        } else {
            let with_left = harmonic_rss(phis, xy, bounds[short - 1]..bounds[short + 1]);
            let with_right = harmonic_rss(phis, xy, bounds[short]..bounds[short + 2]);
            if with_left <= with_right {
                short - 1
            } else {
                short
            }
        };
        breaks.remove(drop);
    }
}

/// Drops breaks whose two neighbours are explained by one joint fit, weakest first:
/// the joint RMS must stay within twice `max(floor, pooled RMS of the halves)`.
fn drop_insignificant_breaks(phis: &[f64], xy: &[[f64; 2]], breaks: &mut Vec<usize>, floor: f64) {
    let n = phis.len();
    let rms = |rss: f64, len: usize| (rss / len.saturating_sub(3).max(1) as f64).sqrt();
    loop {
        let bounds: Vec<usize> = std::iter::once(0)
            .chain(breaks.iter().copied())
            .chain(std::iter::once(n))
            .collect();
        let weakest = (0..breaks.len())
            .map(|j| {
                let (l, b, r) = (bounds[j], bounds[j + 1], bounds[j + 2]);
                let split = harmonic_rss(phis, xy, l..b) + harmonic_rss(phis, xy, b..r);
                let pooled = (split / (r - l).saturating_sub(6).max(1) as f64).sqrt();
                (rms(harmonic_rss(phis, xy, l..r), r - l) / pooled.max(floor), j)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match weakest {
            Some((ratio, j)) if ratio <= 2.0 => {
                breaks.remove(j);
            }
            _ => return,
        }
    }
}

fn close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale
}

fn axis_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

fn similar(a: &GeometryFit, b: &GeometryFit, tol: f64) -> bool {
    use std::f64::consts::FRAC_PI_2;
    match (&a.shape, &b.shape) {
        (
            Shape::Circle { center: c1, radius: r1 },
            Shape::Circle { center: c2, radius: r2 },
        ) => {
            let scale = r1.max(*r2);
            close(*r1, *r2, tol, scale)
                && (c1[0] - c2[0]).hypot(c1[1] - c2[1]) <= tol * scale
        }
        (
            Shape::Line { direction_angle: a1, offset: o1, extent: e1, .. },
            Shape::Line { direction_angle: a2, offset: o2, extent: e2, .. },
        ) => {
            let scale = (e1[1] - e1[0]).max(e2[1] - e2[0]).max(o1.abs()).max(o2.abs());
            axis_gap(*a1, *a2) <= tol * FRAC_PI_2 && close(*o1, *o2, tol, scale)
        }
        (
            Shape::Ellipse { center: c1, semi_major: m1, semi_minor: n1, orientation: t1 },
            Shape::Ellipse { center: c2, semi_major: m2, semi_minor: n2, orientation: t2 },
        ) => {
            let scale = m1.max(*m2);
            let round = n1 / m1 > 1.0 - tol && n2 / m2 > 1.0 - tol;
            close(*m1, *m2, tol, scale)
                && close(*n1, *n2, tol, scale)
                && (c1[0] - c2[0]).hypot(c1[1] - c2[1]) <= tol * scale
                && (round || axis_gap(*t1, *t2) <= tol * FRAC_PI_2)
        }
        _ => false,
    }
}

/// Splits the trajectory at change points and classifies each piece.
/// Neighbouring pieces with the same model and parameters within
/// `merge_tol` are joined.
pub fn segment(traj: &Trajectory, cfg: &ClassifyConfig) -> Result<Vec<SegmentFit>> {
    let n = traj.len();
    if n < 24 {
        return Err(invalid(format!("segmentation needs at least 24 points, got {n}")));
    }
    let phis = traj.phis();
    let xy = traj.xy();
    let floor = cfg.abs_tol.max(traj.noise_sigma());
    let min_seg = cfg.min_segment.max(4);

    let mut breaks = detect_breaks(&phis, &xy, floor, cfg);
    refine_breaks(&phis, &xy, &mut breaks, cfg);
    breaks.dedup();
    enforce_min_length(&phis, &xy, &mut breaks, min_seg);
    drop_insignificant_breaks(&phis, &xy, &mut breaks, floor);

    let mut bounds = vec![0];
    bounds.extend(&breaks);
    bounds.push(n);
    let mut segments: Vec<SegmentFit> = bounds
        .windows(2)
        .map(|w| segment_fit(traj, w[0], w[1], cfg))
        .collect();

    let mut i = 0;
    while i + 1 < segments.len() {
        if similar(&segments[i].fit, &segments[i + 1].fit, cfg.merge_tol) {
            let merged = segment_fit(traj, segments[i].start, segments[i + 1].end, cfg);
            segments.splice(i..i + 2, [merged]);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{Location, NoiseKind};
    use crate::sampler::ShotPlan;
    use crate::trajectory::fit::Model;
    use crate::trajectory::{phi_grid, sweep, sweep_scenario, NoiseSchedule, Scenario};
    use std::f64::consts::{FRAC_PI_4, TAU};

    fn exact(s: Scenario) -> Trajectory {
        sweep_scenario(&phi_grid(0.0, TAU, 64).unwrap(), s, &ShotPlan::exact()).unwrap()
    }

    fn radii_schedule(radii: &[f64], per: usize, plan: &ShotPlan) -> Trajectory {
        let parts: Vec<(f64, Scenario)> = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| ((i + 1) as f64 * TAU, Scenario::damped_circle(r).unwrap()))
            .collect();
        let schedule = NoiseSchedule::from_breaks(0.0, &parts).unwrap();
        let grid = phi_grid(0.0, radii.len() as f64 * TAU, per * radii.len()).unwrap();
        sweep(&grid, &schedule, plan).unwrap()
    }

    #[test]
    fn noiseless_is_circle() {
        let f = classify(&exact(Scenario::Noiseless), &ClassifyConfig::default()).unwrap();
        assert_eq!(f.model(), Model::Circle);
        assert!((f.radius().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!(f.phase_shift.unwrap().abs() < 1e-9);
    }

    #[test]
    fn rho_prime_is_diagonal_line() {
        let f = classify(&exact(Scenario::RhoPrime { a: 0.5, r: 0.5 }), &ClassifyConfig::default())
            .unwrap();
        let Shape::Line { direction_angle, offset, .. } = f.shape else { panic!("{f:?}") };
        assert!((direction_angle - FRAC_PI_4).abs() < 1e-9 && offset.abs() < 1e-9);
    }

    #[test]
    fn depolarizing_before_is_ellipse() {
        let s = Scenario::Channel {
            kind: NoiseKind::Depolarizing,
            location: Location::BeforeCnot,
            p1: 0.0,
            p2: 1.0,
        };
        let f = classify(&exact(s), &ClassifyConfig::default()).unwrap();
        let Shape::Ellipse { semi_major, semi_minor, orientation, .. } = f.shape else {
            panic!("{f:?}")
        };
        assert!((semi_major - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        assert!((semi_minor - 2f64.sqrt()).abs() < 1e-6);
        assert!((orientation - FRAC_PI_4).abs() < 1e-6);
    }

    #[test]
    fn two_radii_split_exactly() {
        let t = radii_schedule(&[2.1, 0.5], 64, &ShotPlan::exact());
        let segs = segment(&t, &ClassifyConfig::default()).unwrap();
        assert_eq!(segs.len(), 2, "{segs:?}");
        assert_eq!(segs[0].end, 64);
        assert!((segs[0].fit.radius().unwrap() - 2.1).abs() < 1e-6);
        assert!((segs[1].fit.radius().unwrap() - 0.5).abs() < 1e-6);
        let f = classify(&t, &ClassifyConfig::default()).unwrap();
        assert_eq!(f.model(), Model::Segmented);
    }

    #[test]
    fn constant_scenario_single_segment() {
        let segs = segment(&exact(Scenario::damped_circle(1.3).unwrap()), &ClassifyConfig::default())
            .unwrap();
        assert_eq!(segs.len(), 1);
    }

    #[test]
    fn mixed_state_cloud_is_a_point() {
        let t = exact(Scenario::Channel {
            kind: NoiseKind::Depolarizing,
            location: Location::AfterPhase,
            p1: 1.0,
            p2: 1.0,
        });
        let f = classify(&t, &ClassifyConfig::default()).unwrap();
        assert_eq!(f.radius(), Some(0.0));
        assert!(!crate::trajectory::lr_flag(&f));
    }

    #[test]
    fn too_few_points() {
        let t = radii_schedule(&[1.0], 10, &ShotPlan::exact());
        assert!(classify(&t, &ClassifyConfig::default()).is_err());
        assert!(segment(&t, &ClassifyConfig::default()).is_err());
    }
}
