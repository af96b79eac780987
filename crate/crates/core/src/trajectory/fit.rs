//! Line, circle and ellipse fits in the `(W2, W2')` plane.
//!
//! All fits work on centred, scaled copies of the data and report
//! geometric (orthogonal) RMS residuals in the original units.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub const MIN_LINE_POINTS: usize = 8;
pub const MIN_CIRCLE_POINTS: usize = 8;
pub const MIN_ELLIPSE_POINTS: usize = 12;

/// Smallest accepted ratio between the principal variances of a line.
const LINE_ANISOTROPY: f64 = 4.0;
/// Largest circle radius, in units of the data spread, before the points
/// count as collinear.
const MAX_RELATIVE_RADIUS: f64 = 1e6;
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Line,
    Circle,
    Ellipse,
    Segmented,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Line => "line",
            Model::Circle => "circle",
            Model::Ellipse => "ellipse",
            Model::Segmented => "segmented",
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Shape {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_major: f64,
        semi_minor: f64,
        /// Angle of the major axis, in `[0, pi)`.
        orientation: f64,
    },
    Line {
        /// In `[0, pi)`.
        direction_angle: f64,
        /// Signed distance from the origin along the normal `(-sin, cos)`.
        offset: f64,
        centroid: [f64; 2],
        /// Range of the projections onto the direction, relative to the centroid.
        extent: [f64; 2],
    },
    Segmented {
        segments: Vec<super::SegmentFit>,
    },
}

impl Shape {
    pub fn model(&self) -> Model {
        match self {
            Shape::Circle { .. } => Model::Circle,
            Shape::Ellipse { .. } => Model::Ellipse,
            Shape::Line { .. } => Model::Line,
            Shape::Segmented { .. } => Model::Segmented,
        }
    }

    /// Orthogonal distance from `p` to the curve. Segmented shapes use the
    /// nearest segment.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match self {
            Shape::Circle { center, radius } => {
                ((p[0] - center[0]).hypot(p[1] - center[1]) - radius).abs()
            }
            Shape::Line {
                direction_angle,
                offset,
                ..
            } => {
                let (s, c) = direction_angle.sin_cos();
                (-s * p[0] + c * p[1] - offset).abs()
            }
            Shape::Ellipse {
                center,
                semi_major,
                semi_minor,
                orientation,
            } => {
                let (s, c) = orientation.sin_cos();
                let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
                let u = c * dx + s * dy;
                let v = -s * dx + c * dy;
                ellipse_distance(*semi_major, *semi_minor, u.abs(), v.abs())
            }
            Shape::Segmented { segments } => segments
                .iter()
                .map(|s| s.fit.shape.distance(p))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `n` points evenly spread along the curve (along its extent for a line).
    pub fn sample(&self, n: usize) -> Vec<[f64; 2]> {
        let t = |k: usize| k as f64 / n as f64;
        match self {
            Shape::Circle { center, radius } => (0..n)
                .map(|k| {
                    let (s, c) = (TAU * t(k)).sin_cos();
                    [center[0] + radius * c, center[1] + radius * s]
                })
                .collect(),
            Shape::Ellipse {
                center,
                semi_major,
                semi_minor,
                orientation,
            } => {
                let (so, co) = orientation.sin_cos();
                (0..n)
                    .map(|k| {
                        let (s, c) = (TAU * t(k)).sin_cos();
                        let (u, v) = (semi_major * c, semi_minor * s);
                        [center[0] + co * u - so * v, center[1] + so * u + co * v]
                    })
                    .collect()
            }
            Shape::Line {
                direction_angle,
                centroid,
                extent,
                ..
            } => {
                let (s, c) = direction_angle.sin_cos();
                (0..n)
                    .map(|k| {
                        let l = extent[0] + (extent[1] - extent[0]) * k as f64 / (n.max(2) - 1) as f64;
                        [centroid[0] + l * c, centroid[1] + l * s]
                    })
                    .collect()
            }
            Shape::Segmented { segments } => {
                let per = n.div_ceil(segments.len().max(1));
                segments.iter().flat_map(|s| s.fit.shape.sample(per)).take(n).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryFit {
    #[serde(flatten)]
    pub shape: Shape,
    pub rms_residual: f64,
    /// Sinusoid phase `delta` of `W2(phi)`, when detectable.
    pub phase_shift: Option<f64>,
}

impl GeometryFit {
    fn new(shape: Shape, points: &[[f64; 2]]) -> Self {
        let rms_residual = rms_distance(&shape, points);
        Self {
            shape,
            rms_residual,
            phase_shift: None,
        }
    }

    pub fn model(&self) -> Model {
        self.shape.model()
    }

    pub fn radius(&self) -> Option<f64> {
        match self.shape {
            Shape::Circle { radius, .. } => Some(radius),
            _ => None,
        }
    }
}

pub fn rms_distance(shape: &Shape, points: &[[f64; 2]]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let ss: f64 = points.iter().map(|p| shape.distance(*p).powi(2)).sum();
    (ss / points.len() as f64).sqrt()
}

fn require(points: &[[f64; 2]], min: usize, what: &str) -> Result<()> {
    if points.len() < min {
        return Err(invalid(format!(
            "{what} fit needs at least {min} points, got {}",
            points.len()
        )));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid(format!("{what} fit given non-finite points")));
    }
    Ok(())
}

/// Centroid and RMS distance from it; the fits work on `(p - m) / s`.
fn normalization(points: &[[f64; 2]]) -> ([f64; 2], f64) {
    let n = points.len() as f64;
    let m = [
        points.iter().map(|p| p[0]).sum::<f64>() / n,
        points.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let s = (points
        .iter()
        .map(|p| (p[0] - m[0]).powi(2) + (p[1] - m[1]).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (m, s)
}

fn normalized(points: &[[f64; 2]]) -> Result<(Vec<[f64; 2]>, [f64; 2], f64)> {
    let (m, s) = normalization(points);
    let magnitude = points.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(s > 1e-12 * magnitude.max(1e-300)) {
        return Err(Error::DegenerateFit("points coincide".into()));
    }
    let q = points.iter().map(|p| [(p[0] - m[0]) / s, (p[1] - m[1]) / s]).collect();
    Ok((q, m, s))
}

/// Total-least-squares line through the principal direction of the covariance.
pub fn fit_line(points: &[[f64; 2]]) -> Result<GeometryFit> {
    require(points, MIN_LINE_POINTS, "line")?;
    let (m, _) = normalization(points);
    let n = points.len() as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - m[0], p[1] - m[1]);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let (sxx, sxy, syy) = (sxx / n, sxy / n, syy / n);
    let half_trace = 0.5 * (sxx + syy);
    let root = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let (major, minor) = (half_trace + root, (half_trace - root).max(0.0));
    if !(major > 0.0) {
        return Err(Error::DegenerateFit("points coincide".into()));
    }
    if major < LINE_ANISOTROPY * minor {
        return Err(Error::DegenerateFit(format!(
            "point cloud too isotropic for a line (variance ratio {:.3})",
            major / minor
        )));
    }
    let mut angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    if angle < 0.0 {
        angle += PI;
    }
    if angle >= PI {
        angle -= PI;
    }
    let (s, c) = angle.sin_cos();
    let offset = -s * m[0] + c * m[1];
    let proj = points.iter().map(|p| (p[0] - m[0]) * c + (p[1] - m[1]) * s);
    let extent = proj.fold([f64::INFINITY, f64::NEG_INFINITY], |e, l| [e[0].min(l), e[1].max(l)]);
    Ok(GeometryFit::new(
        Shape::Line {
            direction_angle: angle,
            offset,
            centroid: m,
            extent,
        },
        points,
    ))
}

/// Least squares `A x = b` with a rank check.
fn lstsq(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let max = sv.max();
    if !(max > 0.0) || sv.min() < RANK_TOLERANCE * max {
        return None;
    }
    svd.solve(&b, 0.0).ok()
}

/// Kasa algebraic circle fit followed by Gauss-Newton refinement of the
/// geometric distance. The refinement is kept only when it lowers the cost.
pub fn fit_circle(points: &[[f64; 2]]) -> Result<GeometryFit> {
    require(points, MIN_CIRCLE_POINTS, "circle")?;
    let (q, m, s) = normalized(points)?;
    let n = q.len();
    let a = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => q[i][0],
        1 => q[i][1],
        _ => 1.0,
    });
    let b = DVector::from_fn(n, |i, _| -(q[i][0].powi(2) + q[i][1].powi(2)));
    let sol = lstsq(a, b).ok_or_else(|| Error::DegenerateFit("points are collinear".into()))?;
    let (cx, cy) = (-0.5 * sol[0], -0.5 * sol[1]);
    let r2 = cx * cx + cy * cy - sol[2];
    if !(r2 > 0.0) || r2.sqrt() > MAX_RELATIVE_RADIUS {
        return Err(Error::DegenerateFit("points are collinear".into()));
    }
    let (cx, cy, r) = refine_circle(&q, cx, cy, r2.sqrt());
    Ok(GeometryFit::new(
        Shape::Circle {
            center: [m[0] + s * cx, m[1] + s * cy],
            radius: s * r,
        },
        points,
    ))
}

fn circle_cost(q: &[[f64; 2]], cx: f64, cy: f64, r: f64) -> f64 {
    q.iter()
        .map(|p| ((p[0] - cx).hypot(p[1] - cy) - r).powi(2))
        .sum()
}

fn refine_circle(q: &[[f64; 2]], mut cx: f64, mut cy: f64, mut r: f64) -> (f64, f64, f64) {
    let mut cost = circle_cost(q, cx, cy, r);
    for _ in 0..50 {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for p in q {
            let d = (p[0] - cx).hypot(p[1] - cy);
            if d == 0.0 {
                continue;
            }
            let j = Vector3::new(-(p[0] - cx) / d, -(p[1] - cy) / d, -1.0);
            jtj += j * j.transpose();
            jtr += j * (d - r);
        }
        let Some(step) = jtj.lu().solve(&(-jtr)) else {
            break;
        };
        let (nx, ny, nr) = (cx + step[0], cy + step[1], r + step[2]);
        let next = circle_cost(q, nx, ny, nr);
        if !(next < cost) || nr <= 0.0 {
            break;
        }
        let done = cost - next <= 1e-15 * cost.max(1e-300);
        (cx, cy, r, cost) = (nx, ny, nr, next);
        if done {
            break;
        }
    }
    (cx, cy, r)
}

/// Direct least-squares ellipse fit (Fitzgibbon's constraint `4AC - B^2 = 1`,
/// in the numerically stable split form of Halir and Flusser).
pub fn fit_ellipse(points: &[[f64; 2]]) -> Result<GeometryFit> {
    require(points, MIN_ELLIPSE_POINTS, "ellipse")?;
    let (q, m, s) = normalized(points)?;
    let mut s1 = Matrix3::<f64>::zeros();
    let mut s2 = Matrix3::<f64>::zeros();
    let mut s3 = Matrix3::<f64>::zeros();
    for p in &q {
        let (x, y) = (p[0], p[1]);
        let d1 = Vector3::new(x * x, x * y, y * y);
        let d2 = Vector3::new(x, y, 1.0);
        s1 += d1 * d1.transpose();
        s2 += d1 * d2.transpose();
        s3 += d2 * d2.transpose();
    }
    let s3_inv = s3
        .try_inverse()
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::DegenerateFit("points are collinear".into()))?;
    let t = -s3_inv * s2.transpose();
    let mm = s1 + s2 * t;
    // premultiply by the inverse of the constraint block [[0,0,2],[0,-1,0],[2,0,0]]
    let reduced = Matrix3::from_rows(&[
        (mm.row(2) / 2.0).into_owned(),
        (-mm.row(1)).into_owned(),
        (mm.row(0) / 2.0).into_owned(),
    ]);
    let a1 = ellipse_eigenvector(&reduced)
        .ok_or_else(|| Error::DegenerateFit("no elliptical conic fits the points".into()))?;
    let a2 = t * a1;
    let conic = [a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]];
    let (center, semi_major, semi_minor, orientation) = conic_to_ellipse(conic)
        .ok_or_else(|| Error::DegenerateFit("fitted conic is not a real ellipse".into()))?;
    Ok(GeometryFit::new(
        Shape::Ellipse {
            center: [m[0] + s * center[0], m[1] + s * center[1]],
            semi_major: s * semi_major,
            semi_minor: s * semi_minor,
            orientation,
        },
        points,
    ))
}

/// Eigenvector of `m` with `4 a c - b^2 > 0`, taking the smallest such eigenvalue.
fn ellipse_eigenvector(m: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let eig = m.complex_eigenvalues();
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for lambda in eig.iter() {
        if lambda.im.abs() > 1e-9 * lambda.norm().max(1.0) {
            continue;
        }
        let Some(v) = null_vector(&(m - Matrix3::identity() * lambda.re)) else {
            continue;
        };
        let cond = 4.0 * v[0] * v[2] - v[1] * v[1];
        if cond > 0.0 && best.as_ref().is_none_or(|(l, _)| lambda.re.abs() < l.abs()) {
            best = Some((lambda.re, v));
        }
    }
    best.map(|(_, v)| v)
}

/// Unit null vector of a (near) rank-2 3x3 matrix via the largest cross
/// product of two rows.
fn null_vector(a: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let r: Vec<Vector3<f64>> = (0..3).map(|i| a.row(i).transpose()).collect();
    let v = [r[0].cross(&r[1]), r[0].cross(&r[2]), r[1].cross(&r[2])]
        .into_iter()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    let n = v.norm();
    (n > 0.0 && n.is_finite()).then(|| v / n)
}

/// Centre, semi-axes and major-axis angle of `A x^2 + B xy + C y^2 + D x + E y + F = 0`.
fn conic_to_ellipse(k: [f64; 6]) -> Option<([f64; 2], f64, f64, f64)> {
    let [a, b, c, d, e, f] = k;
    let den = 4.0 * a * c - b * b;
    if !(den > 0.0) {
        return None;
    }
    let x0 = (b * e - 2.0 * c * d) / den;
    let y0 = (b * d - 2.0 * a * e) / den;
    let f0 = f + 0.5 * (d * x0 + e * y0);
    let t = 0.5 * b.atan2(a - c);
    let (st, ct) = t.sin_cos();
    let lt = a * ct * ct + b * st * ct + c * st * st;
    let lo = a + c - lt;
    let (ax_t, ax_o) = (-f0 / lt, -f0 / lo);
    if !(ax_t > 0.0 && ax_o > 0.0 && ax_t.is_finite() && ax_o.is_finite()) {
        return None;
    }
    let (ax_t, ax_o) = (ax_t.sqrt(), ax_o.sqrt());
    let (major, minor, mut angle) = if ax_t >= ax_o {
        (ax_t, ax_o, t)
    } else {
        (ax_o, ax_t, t + PI / 2.0)
    };
    angle = angle.rem_euclid(PI);
    if angle >= PI {
        angle = 0.0;
    }
    Some(([x0, y0], major, minor, angle))
}

/// Distance from `(y0, y1)`, both `>= 0`, to the ellipse with semi-axes
/// `e0 >= e1` in its own frame (Eberly's bisection method).
fn ellipse_distance(e0: f64, e1: f64, y0: f64, y1: f64) -> f64 {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g == 0.0 {
                return 0.0;
            }
            let r0 = (e0 / e1).powi(2);
            let sbar = bisect_root(r0, z0, z1, g);
            let x0 = r0 * y0 / (sbar + r0);
            let x1 = y1 / (sbar + 1.0);
            (x0 - y0).hypot(x1 - y1)
        } else {
            (y1 - e1).abs()
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            let x0 = e0 * xde0;
            let x1 = e1 * (1.0 - xde0 * xde0).max(0.0).sqrt();
            (x0 - y0).hypot(x1)
        } else {
            (y0 - e0).abs()
        }
    }
}

fn bisect_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let g = (n0 / (s + r0)).powi(2) + (z1 / (s + 1.0)).powi(2) - 1.0;
        if g > 0.0 {
            s0 = s;
        } else if g < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn circle(cx: f64, cy: f64, r: f64, n: usize) -> Vec<[f64; 2]> {
        (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                [cx + r * t.cos(), cy + r * t.sin()]
            })
            .collect()
    }

    #[test]
    fn circle_exact() {
        let f = fit_circle(&circle(0.0, 0.0, 2.1, 64)).unwrap();
        let Shape::Circle { center, radius } = f.shape else { panic!() };
        assert!((radius - 2.1).abs() < 1e-9);
        assert!(center[0].abs() < 1e-9 && center[1].abs() < 1e-9);
        assert!(f.rms_residual < 1e-12);
    }

    #[test]
    fn circle_offset_arc() {
        let pts: Vec<_> = circle(1.0, -2.0, 0.3, 64).into_iter().take(20).collect();
        let f = fit_circle(&pts).unwrap();
        assert!((f.radius().unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn collinear_circle_is_degenerate() {
        let pts: Vec<_> = (0..10).map(|k| [k as f64, 2.0 * k as f64]).collect();
        assert!(matches!(fit_circle(&pts), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn line_diagonal_and_anti_diagonal() {
        let pts: Vec<_> = (0..16).map(|k| {
            let v = (k as f64 * 0.4).sin() * 2.0;
            [v, v]
        }).collect();
        let f = fit_line(&pts).unwrap();
        let Shape::Line { direction_angle, offset, .. } = f.shape else { panic!() };
        assert!((direction_angle - FRAC_PI_4).abs() < 1e-9 && offset.abs() < 1e-9);

        let pts: Vec<_> = (0..16).map(|k| [k as f64, -(k as f64)]).collect();
        let Shape::Line { direction_angle, .. } = fit_line(&pts).unwrap().shape else { panic!() };
        assert!((direction_angle - 3.0 * FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn line_rejects_small_and_isotropic() {
        assert!(fit_line(&[[0.0, 0.0], [1.0, 1.0]]).is_err());
        assert!(matches!(fit_line(&circle(0.0, 0.0, 1.0, 32)), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn horizontal_line_angle_zero() {
        let pts: Vec<_> = (0..10).map(|k| [k as f64, 1.5]).collect();
        let Shape::Line { direction_angle, offset, .. } = fit_line(&pts).unwrap().shape else { panic!() };
        assert!(direction_angle.abs() < 1e-12);
        assert!((offset - 1.5).abs() < 1e-12);
    }

    #[test]
    fn ellipse_exact_rotated() {
        let shape = Shape::Ellipse {
            center: [0.3, -0.2],
            semi_major: 2.0 * SQRT_2,
            semi_minor: SQRT_2,
            orientation: FRAC_PI_4,
        };
        let pts = shape.sample(64);
        let f = fit_ellipse(&pts).unwrap();
        let Shape::Ellipse { center, semi_major, semi_minor, orientation } = f.shape else { panic!() };
        assert!((semi_major - 2.0 * SQRT_2).abs() < 1e-9);
        assert!((semi_minor - SQRT_2).abs() < 1e-9);
        assert!((orientation - FRAC_PI_4).abs() < 1e-9);
        assert!((center[0] - 0.3).abs() < 1e-9 && (center[1] + 0.2).abs() < 1e-9);
        assert!(f.rms_residual < 1e-9);
    }

    #[test]
    fn ellipse_on_circle_has_equal_axes() {
        let f = fit_ellipse(&circle(0.0, 0.0, 2.0 * SQRT_2, 64)).unwrap();
        let Shape::Ellipse { semi_major, semi_minor, .. } = f.shape else { panic!() };
        assert!((semi_major - semi_minor).abs() < 1e-6);
        assert!((semi_major - 2.0 * SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn ellipse_distance_matches_brute_force() {
        let (a, b) = (3.0, 1.0);
        for &(x, y) in &[(0.5, 0.2), (4.0, 2.0), (0.0, 0.0), (2.9, 0.0), (0.0, 3.0), (1.0, 1.5)] {
            let brute = (0..200_000)
                .map(|k| {
                    let t = TAU * k as f64 / 200_000.0;
                    (a * t.cos() - x).hypot(b * t.sin() - y)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((ellipse_distance(a, b, x, y) - brute).abs() < 1e-6, "{x} {y}");
        }
    }

    #[test]
    fn ellipse_rejects_line() {
        let pts: Vec<_> = (0..20).map(|k| [k as f64, k as f64]).collect();
        assert!(fit_ellipse(&pts).is_err());
    }

    #[test]
    fn sample_round_trip() {
        let s = Shape::Circle { center: [0.0, 0.0], radius: 1.2 };
        let f = fit_circle(&s.sample(40)).unwrap();
        assert!((f.radius().unwrap() - 1.2).abs() < 1e-12);
    }
}
