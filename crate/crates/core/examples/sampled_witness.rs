//! Shot-based witness estimates against the exact values at a few shot budgets.

use ghz_phase::sampler::{estimate_mermin, estimate_witness, ShotPlan};
use ghz_phase::states::ghz_density;
use ghz_phase::witness::witness_values;

fn main() -> ghz_phase::Result<()> {
    let rho = ghz_density(0.3)?;
    let exact = witness_values(&rho)?;
    println!("exact: W2 {:+.4}  W2' {:+.4}", exact.w2, exact.w2p);
    for shots in [128, 1024, 8192, 65536] {
        let est = estimate_witness(&rho, &ShotPlan::sampled(shots, 5, 42)?)?;
        println!(
            "{shots:>6} shots: W2 {:+.4} +- {:.4}  W2' {:+.4} +- {:.4}",
            est.w2_mean, est.w2_std, est.w2p_mean, est.w2p_std
        );
    }
    let m = estimate_mermin(&rho, &ShotPlan::sampled(1024, 5, 42)?)?;
    println!("M2 {:+.4} +- {:.4}", m.m2_mean, m.m2_std);
    Ok(())
}
