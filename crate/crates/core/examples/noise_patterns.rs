//! Classifies the trajectory shape produced by each kind of noise.

use std::f64::consts::TAU;

use ghz_phase::channels::{Location, NoiseKind};
use ghz_phase::sampler::ShotPlan;
use ghz_phase::trajectory::{classify, detect_phase_shift, phi_grid, sweep_scenario, ClassifyConfig, Scenario};

fn main() -> ghz_phase::Result<()> {
    let grid = phi_grid(0.0, TAU, 64)?;
    let scenarios = [
        ("noiseless", Scenario::Noiseless),
        (
            "amplitude damping",
            Scenario::Channel { kind: NoiseKind::AmplitudeDamping, location: Location::AfterCnot, p1: 0.3, p2: 0.3 },
        ),
        (
            "depolarizing before CNOT",
            Scenario::Channel { kind: NoiseKind::Depolarizing, location: Location::BeforeCnot, p1: 0.2, p2: 0.6 },
        ),
        ("excited-state admixture", Scenario::RhoPrime { a: 0.5, r: 0.4 }),
        ("dissipative mixture", Scenario::Dissipative { gamma0_t: 0.3, gamma1_t: 0.6 }),
    ];
    for (name, s) in scenarios {
        for plan in [ShotPlan::exact(), ShotPlan::sampled(1024, 5, 7)?] {
            let traj = sweep_scenario(&grid, s, &plan)?;
            let fit = classify(&traj, &ClassifyConfig::default())?;
            let delta = detect_phase_shift(&traj).map(|p| format!("{:+.4}", p.delta)).unwrap_or("-".into());
            println!(
                "{name:<26} {:<8} -> {:<8} rms {:.2e}  delta {delta}",
                if plan.exact { "exact" } else { "sampled" },
                fit.model(),
                fit.rms_residual
            );
        }
    }
    Ok(())
}
