//! JSON reports for `analyze` and `oracle`.

use serde::Serialize;

use crate::error::Result;
use crate::oracle::{oracle_density, oracle_radius, OracleQuery, T1Estimate};
use crate::trajectory::{infer_t1_from_fit, lr_flag, GeometryFit, Provenance, Shape, Trajectory};
use crate::witness::witness_values;

/// `T1` as a number, the string `"infinite"`, or null when not applicable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum T1Field {
    Value(f64),
    Text(&'static str),
}

fn t1_field(fit: &GeometryFit, t: f64) -> Option<T1Field> {
    match infer_t1_from_fit(fit, t).ok()? {
        T1Estimate::Finite(v) => Some(T1Field::Value(v)),
        T1Estimate::Unbounded => Some(T1Field::Text("infinite")),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ShapeFields {
    pub model: &'static str,
    pub center: Option<[f64; 2]>,
    pub radius: Option<f64>,
    /// `[semi_major, semi_minor]`.
    pub semi_axes: Option<[f64; 2]>,
    pub orientation: Option<f64>,
    pub direction_angle: Option<f64>,
    pub offset: Option<f64>,
}

impl ShapeFields {
    fn from_shape(shape: &Shape) -> Self {
        let model = shape.model().name();
        match *shape {
            Shape::Circle { center, radius } => Self {
                model,
                center: Some(center),
                radius: Some(radius),
                ..Self::default()
            },
            Shape::Ellipse {
                center,
                semi_major,
                semi_minor,
                orientation,
            } => Self {
                model,
                center: Some(center),
                semi_axes: Some([semi_major, semi_minor]),
                orientation: Some(orientation),
                ..Self::default()
            },
            Shape::Line {
                direction_angle,
                offset,
                ..
            } => Self {
                model,
                direction_angle: Some(direction_angle),
                offset: Some(offset),
                ..Self::default()
            },
            Shape::Segmented { .. } => Self {
                model,
                ..Self::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentReport {
    pub start: usize,
    pub end: usize,
    pub phi_start: f64,
    pub phi_end: f64,
    #[serde(flatten)]
    pub shape: ShapeFields,
    pub phase_shift: Option<f64>,
    pub t1: Option<T1Field>,
    pub lr_flag: bool,
    pub rms_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    #[serde(flatten)]
    pub shape: ShapeFields,
    pub segments: Vec<SegmentReport>,
    /// Sinusoid phase of `W2`; for segmented fits the shift between the
    /// first two segments.
    pub phase_shift: Option<f64>,
    pub t1: Option<T1Field>,
    pub lr_flag: bool,
    pub rms_residual: f64,
    pub points: usize,
    pub provenance: Provenance,
    pub gate_time: f64,
}

impl AnalysisReport {
    pub fn new(traj: &Trajectory, fit: &GeometryFit, gate_time: f64) -> Self {
        let segments = match &fit.shape {
            Shape::Segmented { segments } => segments
                .iter()
                .map(|s| SegmentReport {
                    start: s.start,
                    end: s.end,
                    phi_start: s.phi_start,
                    phi_end: s.phi_end,
                    shape: ShapeFields::from_shape(&s.fit.shape),
                    phase_shift: s.fit.phase_shift,
                    t1: t1_field(&s.fit, gate_time),
                    lr_flag: lr_flag(&s.fit),
                    rms_residual: s.fit.rms_residual,
                })
                .collect(),
            _ => Vec::new(),
        };
        Self {
            shape: ShapeFields::from_shape(&fit.shape),
            segments,
            phase_shift: fit.phase_shift,
            t1: t1_field(fit, gate_time),
            lr_flag: lr_flag(fit),
            rms_residual: fit.rms_residual,
            points: traj.len(),
            provenance: traj.provenance(),
            gate_time,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixParts {
    pub re: [[f64; 4]; 4],
    pub im: [[f64; 4]; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub kind: &'static str,
    pub placement: &'static str,
    pub p1: f64,
    pub p2: f64,
    pub phi: f64,
    pub density: MatrixParts,
    pub w2: f64,
    pub w2p: f64,
    pub radius: f64,
}

impl OracleReport {
    pub fn new(q: &OracleQuery) -> Result<Self> {
        let rho = oracle_density(q)?;
        let w = witness_values(&rho)?;
        let mut parts = MatrixParts {
            re: [[0.0; 4]; 4],
            im: [[0.0; 4]; 4],
        };
        for i in 0..4 {
            for j in 0..4 {
                let z = rho.entry(i, j);
                parts.re[i][j] = z.re;
                parts.im[i][j] = z.im;
            }
        }
        Ok(Self {
            kind: q.kind.name(),
            placement: q.location.name(),
            p1: q.p1,
            p2: q.p2,
            phi: q.phi,
            density: parts,
            w2: w.w2,
            w2p: w.w2p,
            radius: oracle_radius(q)?,
        })
    }
}
