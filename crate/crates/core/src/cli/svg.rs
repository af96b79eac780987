//! Deterministic SVG plots: the `(W2, W2')` plane and `W` against `phi`.

use std::fmt::Write;

use crate::trajectory::Trajectory;
use crate::witness::{LR_BOUND, QUANTUM_BOUND};

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 480.0;
const PANEL: f64 = 400.0;
const MARGIN: f64 = 40.0;

struct Frame {
    x0: f64,
    y0: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        self.x0 + (v - self.xmin) / (self.xmax - self.xmin) * PANEL
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + PANEL - (v - self.ymin) / (self.ymax - self.ymin) * PANEL
    }
}

fn bound(traj: &Trajectory) -> f64 {
    let m = traj
        .points()
        .iter()
        .flat_map(|p| {
            [
                p.w2.abs() + p.w2_std.unwrap_or(0.0),
                p.w2p.abs() + p.w2p_std.unwrap_or(0.0),
            ]
        })
        .fold(0.0f64, f64::max);
    (m * 1.1 * 10.0).ceil().max(32.0) / 10.0
}

/// Renders both panels. Identical trajectories give identical bytes.
pub fn render_svg(traj: &Trajectory) -> String {
    let b = bound(traj);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    s.push_str(
        "<style>.pt{fill:#1f5fa8}.err{stroke:#1f5fa8;stroke-width:0.8}.ax{stroke:#000;stroke-width:1}\
         .ref{fill:none;stroke:#999;stroke-dasharray:4 3}.w2{fill:none;stroke:#1f5fa8}\
         .w2p{fill:none;stroke:#c0392b}text{font:12px sans-serif}</style>\n",
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let plane = Frame {
        x0: MARGIN,
        y0: MARGIN,
        xmin: -b,
        xmax: b,
        ymin: -b,
        ymax: b,
    };
    scatter_panel(&mut s, &plane, traj);

    let (pmin, pmax) = match (traj.points().first(), traj.points().last()) {
        (Some(a), Some(z)) if z.phi > a.phi => (a.phi, z.phi),
        (Some(a), _) => (a.phi - 1.0, a.phi + 1.0),
        _ => (0.0, 1.0),
    };
    let phase = Frame {
        x0: WIDTH / 2.0 + MARGIN,
        y0: MARGIN,
        xmin: pmin,
        xmax: pmax,
        ymin: -b,
        ymax: b,
    };
    phase_panel(&mut s, &phase, traj);
    s.push_str("</svg>\n");
    s
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        s,
        r#"<rect class="ax" x="{:.2}" y="{:.2}" width="{PANEL}" height="{PANEL}" fill="none"/>"#,
        f.x0, f.y0
    );
    if f.ymin < 0.0 && f.ymax > 0.0 {
        let _ = writeln!(
            s,
            r#"<line class="ax" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-opacity="0.3"/>"#,
            f.x0,
            f.y(0.0),
            f.x0 + PANEL,
            f.y(0.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xlabel}</text>"#,
        f.x0 + PANEL / 2.0,
        f.y0 + PANEL + 28.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
        f.x0 - 24.0,
        f.y0 + PANEL / 2.0,
        f.x0 - 24.0,
        f.y0 + PANEL / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}">{:.3}</text><text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#,
        f.x0,
        f.y0 + PANEL + 14.0,
        f.xmin,
        f.x0 + PANEL,
        f.y0 + PANEL + 14.0,
        f.xmax
    );
}

fn scatter_panel(s: &mut String, f: &Frame, traj: &Trajectory) {
    axes(s, f, "&lt;W2&gt;", "&lt;W2'&gt;");
    let k = PANEL / (f.xmax - f.xmin);
    for r in [LR_BOUND, QUANTUM_BOUND] {
        let _ = writeln!(
            s,
            r#"<circle class="ref" cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
            f.x(0.0),
            f.y(0.0),
            r * k
        );
    }
    for p in traj.points() {
        let (x, y) = (f.x(p.w2), f.y(p.w2p));
        if let Some(e) = p.w2_std.filter(|e| *e > 0.0) {
            let _ = writeln!(
                s,
                r#"<line class="err" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#,
                f.x(p.w2 - e),
                f.x(p.w2 + e)
            );
        }
        if let Some(e) = p.w2p_std.filter(|e| *e > 0.0) {
            let _ = writeln!(
                s,
                r#"<line class="err" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
                f.y(p.w2p - e),
                f.y(p.w2p + e)
            );
        }
        let _ = writeln!(s, r#"<circle class="pt" cx="{x:.2}" cy="{y:.2}" r="2.5"/>"#);
    }
}

fn phase_panel(s: &mut String, f: &Frame, traj: &Trajectory) {
    axes(s, f, "phi (rad)", "&lt;W&gt;");
    for (class, pick) in [("w2", 0usize), ("w2p", 1)] {
        let pts: Vec<String> = traj
            .points()
            .iter()
            .map(|p| {
                let v = if pick == 0 { p.w2 } else { p.w2p };
                format!("{:.2},{:.2}", f.x(p.phi), f.y(v))
            })
            .collect();
        let _ = writeln!(s, r#"<polyline class="{class}" points="{}"/>"#, pts.join(" "));
    }
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" fill="#1f5fa8">W2</text><text x="{:.2}" y="{:.2}" fill="#c0392b">W2'</text>"##,
        f.x0 + 8.0,
        f.y0 + 16.0,
        f.x0 + 40.0,
        f.y0 + 16.0
    );
}
