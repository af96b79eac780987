//! Trajectory CSV files.
//!
//! Header: `phi_rad,w2_mean,w2_std,w2p_mean,w2p_std,shots,reps`. Reals are
//! written with 17 significant digits so exact sweeps round-trip losslessly.
//! On input only `phi_rad`, `w2_mean` and `w2p_mean` are required.

use std::io::{Read, Write};

use crate::trajectory::{Provenance, Trajectory, TrajectoryPoint};

pub const CSV_HEADER: [&str; 7] = [
    "phi_rad", "w2_mean", "w2_std", "w2p_mean", "w2p_std", "shots", "reps",
];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let (shots, reps) = (traj.shots().to_string(), traj.reps().to_string());
    for p in traj.points() {
        w.write_record([
            real(p.phi),
            real(p.w2),
            real(p.w2_std.unwrap_or(0.0)),
            real(p.w2p),
            real(p.w2p_std.unwrap_or(0.0)),
            shots.clone(),
            reps.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(traj: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_csv(traj, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Parses a trajectory CSV. Errors carry the offending line number.
///
/// Provenance: all-zero spreads with zero shots read back as exact, nonzero
/// spreads with a shot count as sampled, anything else as ingested.
pub fn read_csv<R: Read>(input: R) -> Result<Trajectory, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| format!("line 1: {e}"))?
        .clone();
    let mut col = [None; 7];
    for (i, h) in headers.iter().enumerate() {
        let k = CSV_HEADER
            .iter()
            .position(|c| *c == h)
            .ok_or_else(|| format!("line 1: unknown column '{h}'"))?;
        if col[k].replace(i).is_some() {
            return Err(format!("line 1: duplicate column '{h}'"));
        }
    }
    for k in [0, 1, 3] {
        if col[k].is_none() {
            return Err(format!("line 1: missing required column '{}'", CSV_HEADER[k]));
        }
    }

    let mut points: Vec<TrajectoryPoint> = Vec::new();
    let mut plan: Option<(u32, u32)> = None;
    let mut plan_consistent = true;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| match e.position() {
            Some(p) => format!("line {}: {e}", p.line()),
            None => e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |k: usize| -> Result<Option<f64>, String> {
            let Some(i) = col[k] else { return Ok(None) };
            let s = rec.get(i).unwrap_or("");
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| format!("line {line}: bad {} value '{s}'", CSV_HEADER[k]))
        };
        let count = |k: usize| -> Result<Option<u32>, String> {
            let Some(i) = col[k] else { return Ok(None) };
            let s = rec.get(i).unwrap_or("");
            s.parse::<u32>()
                .map(Some)
                .map_err(|_| format!("line {line}: bad {} value '{s}'", CSV_HEADER[k]))
        };
        let phi = field(0)?.expect("required");
        let (w2_std, w2p_std) = (field(2)?, field(4)?);
        if w2_std.is_some_and(|s| s < 0.0) || w2p_std.is_some_and(|s| s < 0.0) {
            return Err(format!("line {line}: negative standard deviation"));
        }
        if let Some(prev) = points.last() {
            if phi <= prev.phi {
                return Err(format!(
                    "line {line}: phi_rad must be strictly increasing ({phi} after {})",
                    prev.phi
                ));
            }
        }
        let this_plan = (count(5)?.unwrap_or(0), count(6)?.unwrap_or(0));
        match plan {
            None => plan = Some(this_plan),
            Some(p) if p != this_plan => plan_consistent = false,
            _ => {}
        }
        points.push(TrajectoryPoint {
            phi,
            w2: field(1)?.expect("required"),
            w2p: field(3)?.expect("required"),
            w2_std,
            w2p_std,
        });
    }

    let (shots, reps) = plan.unwrap_or((0, 0));
    let has_std = col[2].is_some() && col[4].is_some();
    let zero_std = points
        .iter()
        .all(|p| p.w2_std.unwrap_or(0.0) == 0.0 && p.w2p_std.unwrap_or(0.0) == 0.0);
    let provenance = if has_std && zero_std && shots == 0 && plan_consistent {
        Provenance::Exact
    } else if has_std && !zero_std && shots > 0 && plan_consistent {
        Provenance::Sampled
    } else {
        Provenance::Ingested
    };
    if provenance == Provenance::Exact {
        for p in &mut points {
            p.w2_std = None;
            p.w2p_std = None;
        }
    }
    let traj = Trajectory::new(points, provenance).map_err(|e| e.to_string())?;
    Ok(if provenance == Provenance::Sampled {
        traj.with_plan(shots, reps)
    } else {
        traj
    })
}
