//! Builds noisy states both by Kraus simulation and from the closed forms.

use ghz_phase::channels::{noisy_prepare, Location, NoiseKind, Placement};
use ghz_phase::oracle::{oracle_density, oracle_radius, OracleQuery};
use ghz_phase::witness::witness_values;

fn main() -> ghz_phase::Result<()> {
    let phi = 0.7;
    for kind in NoiseKind::ALL {
        for location in Location::ALL {
            let q = OracleQuery::new(kind, location, 0.3, 0.6, phi)?;
            let simulated = noisy_prepare(phi, &Placement::new(location, 0.3, 0.6)?, kind)?;
            let closed = oracle_density(&q)?;
            let w = witness_values(&closed)?;
            println!(
                "{:<18} {:<12} |sim - oracle| = {:.1e}  W2 = {:+.4}  W2' = {:+.4}  R = {:.4}",
                kind.name(),
                location.name(),
                simulated.matrix().max_abs_diff(closed.matrix()),
                w.w2,
                w.w2p,
                oracle_radius(&q)?
            );
        }
    }
    Ok(())
}
