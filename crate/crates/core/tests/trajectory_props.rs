use std::f64::consts::{FRAC_PI_4, TAU};

use rayon::prelude::*;

use ghz_phase::channels::{Location, NoiseKind};
use ghz_phase::sampler::ShotPlan;
use ghz_phase::trajectory::{
    classify, detect_phase_shift, lr_flag, phi_grid, segment, sweep, sweep_scenario, ClassifyConfig, Model,
    NoiseSchedule, Provenance, Scenario, Shape, Trajectory, TrajectoryPoint,
};

fn radii_sweep(radii: &[f64], per: usize, plan: &ShotPlan) -> Trajectory {
    let parts: Vec<(f64, Scenario)> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| ((i + 1) as f64 * TAU, Scenario::damped_circle(r).unwrap()))
        .collect();
    let grid = phi_grid(0.0, radii.len() as f64 * TAU, per * radii.len()).unwrap();
    sweep(&grid, &NoiseSchedule::from_breaks(0.0, &parts).unwrap(), plan).unwrap()
}

#[test]
fn damping_rescales_amplitude_never_phase() {
    let grid = phi_grid(0.0, TAU, 64).unwrap();
    for location in Location::ALL {
        for p in [0.0, 0.2, 0.5, 0.8] {
            let s = Scenario::Channel {
                kind: NoiseKind::AmplitudeDamping,
                location,
                p1: p,
                p2: 0.5 * p,
            };
            let t = sweep_scenario(&grid, s, &ShotPlan::exact()).unwrap();
            let fit = classify(&t, &ClassifyConfig::default()).unwrap();
            let Shape::Circle { center, .. } = fit.shape else {
                panic!("{location} {p}: {fit:?}")
            };
            assert!(center[0].abs() < 1e-9 && center[1].abs() < 1e-9);
            assert!(detect_phase_shift(&t).unwrap().delta.abs() < 1e-9);
        }
    }
}

#[test]
fn exact_classification_is_idempotent() {
    let cfg = ClassifyConfig::default();
    let scenarios = [
        Scenario::Noiseless,
        Scenario::RhoPrime { a: 0.5, r: 0.4 },
        Scenario::Channel {
            kind: NoiseKind::Depolarizing,
            location: Location::BeforeCnot,
            p1: 0.1,
            p2: 0.7,
        },
    ];
    for s in scenarios {
        let t = sweep_scenario(&phi_grid(0.0, TAU, 64).unwrap(), s, &ShotPlan::exact()).unwrap();
        let fit = classify(&t, &cfg).unwrap();
        assert_eq!(classify(&t, &cfg).unwrap(), fit);
        let resampled: Vec<TrajectoryPoint> = fit
            .shape
            .sample(48)
            .into_iter()
            .enumerate()
            .map(|(i, p)| TrajectoryPoint::exact(i as f64 * TAU / 48.0, p[0], p[1]))
            .collect();
        let again = classify(&Trajectory::new(resampled, Provenance::Exact).unwrap(), &cfg).unwrap();
        assert_eq!(again.model(), fit.model(), "{s:?}");
    }
}

#[test]
fn exact_constant_scenarios_never_split() {
    let cfg = ClassifyConfig::default();
    let grid = phi_grid(0.0, 2.0 * TAU, 128).unwrap();
    for s in [
        Scenario::Noiseless,
        Scenario::damped_circle(0.4).unwrap(),
        Scenario::RhoPrime { a: 0.2, r: 0.3 },
        Scenario::Dissipative { gamma0_t: 0.5, gamma1_t: 1.0 },
        Scenario::Channel {
            kind: NoiseKind::Depolarizing,
            location: Location::BeforeCnot,
            p1: 0.0,
            p2: 1.0,
        },
    ] {
        let t = sweep_scenario(&grid, s, &ShotPlan::exact()).unwrap();
        assert_eq!(segment(&t, &cfg).unwrap().len(), 1, "{s:?}");
    }
}

#[test]
fn sampled_constant_false_splits_at_most_five_percent() {
    let cfg = ClassifyConfig::default();
    let grid = phi_grid(0.0, 2.0 * TAU, 128).unwrap();
    let split = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let t = sweep_scenario(&grid, Scenario::damped_circle(1.5).unwrap(), &ShotPlan::sampled(1024, 5, seed).unwrap())
                .unwrap();
            segment(&t, &cfg).unwrap().len() > 1
        })
        .count();
    assert!(split <= 5, "{split}/100 constant sweeps split");
}

#[test]
fn sampled_four_radius_schedule_over_seeds() {
    let radii = [0.6, 0.25, 0.9, 0.375];
    let cfg = ClassifyConfig::default();
    let good = (0..40u64)
        .into_par_iter()
        .filter(|&seed| {
            let t = radii_sweep(&radii, 96, &ShotPlan::sampled(1024, 5, 500 + seed).unwrap());
            let segs = segment(&t, &cfg).unwrap();
            segs.len() == 4
                && segs
                    .iter()
                    .zip(radii)
                    .all(|(s, r)| s.fit.radius().is_some_and(|g| (g - r).abs() <= 0.05 * r))
        })
        .count();
    assert!(good >= 38, "{good}/40 seeds recovered all four radii");
}

#[test]
fn circle_to_line_shift_over_seeds() {
    let cfg = ClassifyConfig::default();
    let sched = NoiseSchedule::from_breaks(
        0.0,
        &[
            (TAU, Scenario::damped_circle(2.1).unwrap()),
            (2.0 * TAU, Scenario::RhoPrime { a: 0.5, r: 0.5 }),
        ],
    )
    .unwrap();
    let grid = phi_grid(0.0, 2.0 * TAU, 128).unwrap();
    for seed in 0..10 {
        let t = sweep(&grid, &sched, &ShotPlan::sampled(1024, 5, seed).unwrap()).unwrap();
        let fit = classify(&t, &cfg).unwrap();
        let Shape::Segmented { segments } = &fit.shape else { panic!("{fit:?}") };
        assert_eq!(segments.len(), 2);
        assert_eq!(segments[0].fit.model(), Model::Circle);
        assert_eq!(segments[1].fit.model(), Model::Line);
        assert!((fit.phase_shift.unwrap() - FRAC_PI_4).abs() <= 0.05, "{:?}", fit.phase_shift);
        assert!(lr_flag(&fit));
    }
}

#[test]
fn lr_flag_for_ghz_not_for_mixed() {
    let grid = phi_grid(0.0, TAU, 64).unwrap();
    let cfg = ClassifyConfig::default();
    let ghz = classify(&sweep_scenario(&grid, Scenario::Noiseless, &ShotPlan::exact()).unwrap(), &cfg).unwrap();
    assert!(lr_flag(&ghz));
    let mixed = Scenario::Channel {
        kind: NoiseKind::Depolarizing,
        location: Location::AfterCnot,
        p1: 1.0,
        p2: 1.0,
    };
    let fit = classify(&sweep_scenario(&grid, mixed, &ShotPlan::exact()).unwrap(), &cfg).unwrap();
    assert!(!lr_flag(&fit));
    let small = classify(
        &sweep_scenario(&grid, Scenario::damped_circle(1.9).unwrap(), &ShotPlan::exact()).unwrap(),
        &cfg,
    )
    .unwrap();
    assert!(!lr_flag(&small));
}

#[test]
fn sampled_circle_radius_within_tolerance() {
    let grid = phi_grid(0.0, TAU, 64).unwrap();
    for seed in 0..10 {
        let t = sweep_scenario(&grid, Scenario::Noiseless, &ShotPlan::sampled(1024, 5, seed).unwrap()).unwrap();
        let fit = classify(&t, &ClassifyConfig::default()).unwrap();
        assert!((fit.radius().unwrap() - 2.0 * 2f64.sqrt()).abs() <= 0.15);
    }
}
