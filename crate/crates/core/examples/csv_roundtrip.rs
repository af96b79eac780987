//! Runs a TOML configuration, writes CSV and SVG, then reads the CSV back.

use ghz_phase::cli::{read_csv, render_svg, to_csv_string, RunConfig};
use ghz_phase::trajectory::sweep;

const CONFIG: &str = include_str!("configs/damped_then_mixed.toml");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let job = RunConfig::from_toml(CONFIG)?
        .validate()
        .map_err(|v| v.join("; "))?;
    let traj = sweep(&job.grid, &job.schedule, &job.plan)?;
    let csv = to_csv_string(&traj);
    let back = read_csv(csv.as_bytes())?;
    assert_eq!(back.points(), traj.points());
    let dir = std::env::temp_dir();
    std::fs::write(dir.join("ghz_phase_example.csv"), &csv)?;
    std::fs::write(dir.join("ghz_phase_example.svg"), render_svg(&traj))?;
    println!("{} rows, provenance {:?}, written to {}", back.len(), back.provenance(), dir.display());
    print!("{}", csv.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
