//! Sweeps the noiseless preparation and compares each point with the closed form.

use std::f64::consts::TAU;

use ghz_phase::sampler::ShotPlan;
use ghz_phase::trajectory::{classify, phi_grid, sweep_scenario, ClassifyConfig, Scenario};
use ghz_phase::witness::analytic_ghz_witness;

fn main() -> ghz_phase::Result<()> {
    let grid = phi_grid(0.0, TAU, 16)?;
    let traj = sweep_scenario(&grid, Scenario::Noiseless, &ShotPlan::exact())?;
    println!("{:>8} {:>10} {:>10} {:>10}", "phi", "W2", "W2'", "|dev|");
    for p in traj.points() {
        let w = analytic_ghz_witness(p.phi);
        let dev = (p.w2 - w.w2).hypot(p.w2p - w.w2p);
        println!("{:>8.4} {:>10.6} {:>10.6} {:>10.1e}", p.phi, p.w2, p.w2p, dev);
    }
    let fit = classify(&traj, &ClassifyConfig::default())?;
    println!("model {} radius {:.12}", fit.model(), fit.radius().unwrap_or(f64::NAN));
    Ok(())
}
