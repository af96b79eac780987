//! Recovers T1 from the radius of an amplitude-damped circle.

use std::f64::consts::TAU;

use ghz_phase::sampler::ShotPlan;
use ghz_phase::trajectory::{classify, infer_t1_from_fit, phi_grid, sweep_scenario, ClassifyConfig, Scenario};

fn main() -> ghz_phase::Result<()> {
    let (t, t1) = (0.1f64, 0.5f64);
    let radius = 2.0 * 2f64.sqrt() * (-t / t1).exp();
    let grid = phi_grid(0.0, TAU, 64)?;
    for plan in [ShotPlan::exact(), ShotPlan::sampled(8192, 10, 3)?] {
        let traj = sweep_scenario(&grid, Scenario::damped_circle(radius)?, &plan)?;
        let fit = classify(&traj, &ClassifyConfig::default())?;
        let est = infer_t1_from_fit(&fit, t)?;
        println!(
            "{:<8} radius {:.5} (true {radius:.5})  T1 {:.5} (true {t1})",
            if plan.exact { "exact" } else { "sampled" },
            fit.radius().unwrap_or(f64::NAN),
            est.value()
        );
    }
    Ok(())
}
