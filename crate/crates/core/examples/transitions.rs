//! Detects a noise change partway through a sweep and reports each piece.

use std::f64::consts::TAU;

use ghz_phase::sampler::ShotPlan;
use ghz_phase::trajectory::{classify, phi_grid, sweep, ClassifyConfig, NoiseSchedule, Scenario, Shape};

fn main() -> ghz_phase::Result<()> {
    let schedule = NoiseSchedule::from_breaks(
        0.0,
        &[
            (TAU, Scenario::damped_circle(2.1)?),
            (2.0 * TAU, Scenario::damped_circle(0.5)?),
            (3.0 * TAU, Scenario::RhoPrime { a: 0.5, r: 0.5 }),
        ],
    )?;
    let grid = phi_grid(0.0, 3.0 * TAU, 288)?;
    let traj = sweep(&grid, &schedule, &ShotPlan::sampled(1024, 5, 6)?)?;
    let fit = classify(&traj, &ClassifyConfig::default())?;
    if let Shape::Segmented { segments } = &fit.shape {
        for s in segments {
            println!(
                "points {:>3}..{:<3} phi {:.3}..{:.3}  {} radius {}",
                s.start,
                s.end,
                s.phi_start,
                s.phi_end,
                s.fit.model(),
                s.fit.radius().map(|r| format!("{r:.4}")).unwrap_or("-".into())
            );
        }
    }
    println!("phase shift {:?}", fit.phase_shift);
    Ok(())
}
