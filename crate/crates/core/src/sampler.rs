//! Shot-based estimation of the witnesses.
//!
//! Each Pauli pair is measured by rotating both qubits into the computational
//! basis (X: `H`, Y: `S†` then `H`) and drawing a multinomial sample of the
//! four outcomes. Randomness comes from `ChaCha8Rng::seed_from_u64`, with one
//! stream per `(seed, repetition, setting)` derived by [`derive_seed`], so the
//! estimates do not depend on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qmat::{ComplexMatrix, DensityMatrix, Dim};
use crate::states::{gate, Gate};
use crate::witness::{Pauli, PauliPair, WitnessValue};

/// Settings sampled for `W2, W2'`, in sub-seed index order.
pub const WITNESS_SETTINGS: [PauliPair; 3] = [PauliPair::XX, PauliPair::YX, PauliPair::YY];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotPlan {
    pub shots: u32,
    pub repetitions: u32,
    pub seed: u64,
    /// Skip sampling and report exact expectations with zero spread.
    pub exact: bool,
}

impl Default for ShotPlan {
    fn default() -> Self {
        Self {
            shots: 1024,
            repetitions: 5,
            seed: 0,
            exact: false,
        }
    }
}

impl ShotPlan {
    pub fn sampled(shots: u32, repetitions: u32, seed: u64) -> Result<Self> {
        let p = Self {
            shots,
            repetitions,
            seed,
            exact: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn exact() -> Self {
        Self {
            exact: true,
            ..Self::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.exact {
            return Ok(());
        }
        if self.shots == 0 {
            return Err(invalid("shots must be >= 1 (use exact mode to skip sampling)"));
        }
        if self.repetitions == 0 {
            return Err(invalid("repetitions must be >= 1"));
        }
        Ok(())
    }
}

/// Outcome counts in the order `00, 01, 10, 11`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountsTable {
    pub counts: [u64; 4],
}

impl CountsTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(n00 - n01 - n10 + n11) / N`, the estimate of `<P0 P1>`.
    pub fn parity_expectation(&self) -> f64 {
        let [a, b, c, d] = self.counts.map(|n| n as f64);
        (a - b - c + d) / (a + b + c + d)
    }
}

fn basis_change(p: Pauli) -> ComplexMatrix {
    let g = |g: Gate| gate(&g).expect("constant gate");
    match p {
        Pauli::X => g(Gate::H),
        Pauli::Y => g(Gate::H) * g(Gate::Sdg),
        Pauli::Z => ComplexMatrix::identity(Dim::Two),
    }
}

/// Outcome probabilities after rotating each qubit into the eigenbasis of its Pauli.
pub fn measurement_probabilities(rho: &DensityMatrix, pair: PauliPair) -> Result<[f64; 4]> {
    let u = crate::qmat::tensor(&basis_change(pair.0), &basis_change(pair.1))?;
    let rotated = rho.matrix().conjugate_by(&u);
    let mut probs = [0.0; 4];
    for (k, p) in probs.iter_mut().enumerate() {
        *p = rotated[(k, k)].re.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    Ok(probs.map(|p| p / total))
}

/// SplitMix64 finalizer applied along `indices`; gives independent stream seeds.
pub fn derive_seed(base: u64, indices: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    indices.iter().fold(mix(base), |acc, &i| {
        mix(acc ^ i.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0x2545_f491_4f6c_dd1d))
    })
}

fn multinomial<R: Rng>(rng: &mut R, shots: u64, probs: &[f64; 4]) -> [u64; 4] {
    let mut counts = [0u64; 4];
    let mut remaining = shots;
    let mut mass = 1.0;
    for k in 0..3 {
        if remaining == 0 {
            break;
        }
        let p = if mass > 0.0 {
            (probs[k] / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let n = Binomial::new(remaining, p)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        counts[k] = n;
        remaining -= n;
        mass -= probs[k];
    }
    counts[3] = remaining;
    counts
}

/// Draws `shots` measurement outcomes of `pair` from a seeded stream.
pub fn sample_counts(
    rho: &DensityMatrix,
    pair: PauliPair,
    shots: u64,
    stream_seed: u64,
) -> Result<CountsTable> {
    if shots == 0 {
        return Err(invalid("shots must be >= 1"));
    }
    let probs = measurement_probabilities(rho, pair)?;
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
    Ok(CountsTable {
        counts: multinomial(&mut rng, shots, &probs),
    })
}

/// Shot estimate of one pair for repetition `rep`; the sub-seed is
/// `derive_seed(seed, [rep, setting])`.
pub fn estimate_pair(
    rho: &DensityMatrix,
    pair: PauliPair,
    plan: &ShotPlan,
    rep: u32,
) -> Result<f64> {
    let setting = setting_index(pair);
    let seed = derive_seed(plan.seed, &[u64::from(rep), setting]);
    Ok(sample_counts(rho, pair, u64::from(plan.shots), seed)?.parity_expectation())
}

fn setting_index(pair: PauliPair) -> u64 {
    // stable indices: XX, YX, YY as used for the witnesses, then the rest
    match (pair.0, pair.1) {
        (Pauli::X, Pauli::X) => 0,
        (Pauli::Y, Pauli::X) => 1,
        (Pauli::Y, Pauli::Y) => 2,
        (Pauli::X, Pauli::Y) => 3,
        (a, b) => 4 + 3 * a as u64 + b as u64,
    }
}

/// Mean and `n - 1` sample standard deviation; zero spread for one sample.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessEstimate {
    pub w2_mean: f64,
    pub w2_std: f64,
    pub w2p_mean: f64,
    pub w2p_std: f64,
    pub plan: ShotPlan,
}

/// Estimates `<W2>, <W2'>` from the XX, YX and YY settings, repeated
/// `plan.repetitions` times.
pub fn estimate_witness(rho: &DensityMatrix, plan: &ShotPlan) -> Result<WitnessEstimate> {
    plan.validate()?;
    if plan.exact {
        let w = crate::witness::witness_values(rho)?;
        return Ok(WitnessEstimate {
            w2_mean: w.w2,
            w2_std: 0.0,
            w2p_mean: w.w2p,
            w2p_std: 0.0,
            plan: *plan,
        });
    }
    let per_rep: Vec<(f64, f64)> = (0..plan.repetitions)
        .into_par_iter()
        .map(|rep| {
            let [xx, yx, yy] = WITNESS_SETTINGS;
            let xx = estimate_pair(rho, xx, plan, rep)?;
            let yx = estimate_pair(rho, yx, plan, rep)?;
            let yy = estimate_pair(rho, yy, plan, rep)?;
            Ok((xx + 2.0 * yx - yy, -xx + 2.0 * yx + yy))
        })
        .collect::<Result<_>>()?;
    let (w2_mean, w2_std) = mean_std(&per_rep.iter().map(|p| p.0).collect::<Vec<_>>());
    let (w2p_mean, w2p_std) = mean_std(&per_rep.iter().map(|p| p.1).collect::<Vec<_>>());
    Ok(WitnessEstimate {
        w2_mean,
        w2_std,
        w2p_mean,
        w2p_std,
        plan: *plan,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MerminEstimate {
    pub m2_mean: f64,
    pub m2_std: f64,
    pub m2p_mean: f64,
    pub m2p_std: f64,
}

/// Estimates `<M2>, <M2'>`; needs the extra XY setting.
pub fn estimate_mermin(rho: &DensityMatrix, plan: &ShotPlan) -> Result<MerminEstimate> {
    plan.validate()?;
    let reps: Vec<WitnessValue> = if plan.exact {
        vec![crate::witness::witness_values(rho)?]
    } else {
        (0..plan.repetitions)
            .into_par_iter()
            .map(|rep| {
                let xx = estimate_pair(rho, PauliPair::XX, plan, rep)?;
                let xy = estimate_pair(rho, PauliPair::XY, plan, rep)?;
                let yx = estimate_pair(rho, PauliPair::YX, plan, rep)?;
                let yy = estimate_pair(rho, PauliPair::YY, plan, rep)?;
                Ok(WitnessValue::from_correlators(xx, xy, yx, yy))
            })
            .collect::<Result<_>>()?
    };
    let (m2_mean, m2_std) = mean_std(&reps.iter().map(|w| w.m2).collect::<Vec<_>>());
    let (m2p_mean, m2p_std) = mean_std(&reps.iter().map(|w| w.m2p).collect::<Vec<_>>());
    Ok(MerminEstimate {
        m2_mean,
        m2_std,
        m2p_mean,
        m2p_std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::ghz_density;
    use crate::witness::{pauli_expectation, witness_values};
    use std::f64::consts::PI;

    #[test]
    fn ghz_xx_probabilities() {
        let p = measurement_probabilities(&ghz_density(0.0).unwrap(), PauliPair::XX).unwrap();
        let expected = [0.5, 0.0, 0.0, 0.5];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        for pair in [PauliPair::XX, PauliPair::XY, PauliPair::YX, PauliPair::YY] {
            let p = measurement_probabilities(&DensityMatrix::maximally_mixed(), pair).unwrap();
            assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
        }
    }

    #[test]
    fn ghz_yx_even_parity() {
        let p = measurement_probabilities(&ghz_density(PI / 2.0).unwrap(), PauliPair::YX).unwrap();
        assert!((p[0] + p[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_sum_equals_expectation() {
        let rho = crate::channels::noisy_prepare(
            0.7,
            &crate::channels::Placement::new(crate::channels::Location::BeforeCnot, 0.2, 0.6)
                .unwrap(),
            crate::channels::NoiseKind::Depolarizing,
        )
        .unwrap();
        for a in [Pauli::X, Pauli::Y, Pauli::Z] {
            for b in [Pauli::X, Pauli::Y, Pauli::Z] {
                let pair = PauliPair(a, b);
                let p = measurement_probabilities(&rho, pair).unwrap();
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let parity = p[0] - p[1] - p[2] + p[3];
                let exact = pauli_expectation(&rho, pair).unwrap();
                assert!((parity - exact).abs() < 1e-12, "{pair}");
            }
        }
    }

    #[test]
    fn deterministic_outcome_takes_all_shots() {
        let rho = DensityMatrix::basis(0).unwrap();
        let c = sample_counts(&rho, PauliPair::ZZ, 1000, 17).unwrap();
        assert_eq!(c.counts, [1000, 0, 0, 0]);
    }

    #[test]
    fn zero_shots_rejected() {
        let rho = DensityMatrix::basis(0).unwrap();
        assert!(sample_counts(&rho, PauliPair::ZZ, 0, 1).is_err());
        assert!(ShotPlan::sampled(0, 5, 1).is_err());
        assert!(ShotPlan::sampled(10, 0, 1).is_err());
    }

    #[test]
    fn zero_probability_outcomes_never_drawn() {
        let c = sample_counts(&ghz_density(0.0).unwrap(), PauliPair::XX, 1_000_000, 3).unwrap();
        assert_eq!(c.counts[1] + c.counts[2], 0);
        assert_eq!(c.total(), 1_000_000);
    }

    #[test]
    fn same_seed_same_counts() {
        let rho = ghz_density(1.0).unwrap();
        let a = sample_counts(&rho, PauliPair::YX, 4096, 99).unwrap();
        let b = sample_counts(&rho, PauliPair::YX, 4096, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_counts(&rho, PauliPair::YX, 4096, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn exact_plan_reproduces_witnesses() {
        let rho = ghz_density(0.3).unwrap();
        let est = estimate_witness(&rho, &ShotPlan::exact()).unwrap();
        let w = witness_values(&rho).unwrap();
        assert_eq!(est.w2_mean, w.w2);
        assert_eq!(est.w2p_mean, w.w2p);
        assert_eq!((est.w2_std, est.w2p_std), (0.0, 0.0));
    }

    #[test]
    fn sampled_ghz_within_four_sigma() {
        let rho = ghz_density(PI / 4.0).unwrap();
        let est = estimate_witness(&rho, &ShotPlan::sampled(1024, 5, 2024).unwrap()).unwrap();
        let bound = 4.0 * (6.0f64 / 1024.0).sqrt();
        assert!((est.w2_mean - 2.0 * 2f64.sqrt()).abs() <= bound, "{est:?}");
    }

    #[test]
    fn sampled_mixed_state_centered() {
        let est = estimate_witness(
            &DensityMatrix::maximally_mixed(),
            &ShotPlan::sampled(1024, 5, 5).unwrap(),
        )
        .unwrap();
        // per-repetition std of W2 is sqrt(6/1024) at zero correlations
        let sigma = (6.0f64 / 1024.0 / 5.0).sqrt();
        assert!(est.w2_mean.abs() <= 4.0 * sigma, "{est:?}");
    }

    #[test]
    fn repetitions_match_sequential_recomputation() {
        let rho = ghz_density(2.2).unwrap();
        let plan = ShotPlan::sampled(512, 4, 77).unwrap();
        let est = estimate_witness(&rho, &plan).unwrap();
        let mut w2 = Vec::new();
        for rep in 0..plan.repetitions {
            let xx = estimate_pair(&rho, PauliPair::XX, &plan, rep).unwrap();
            let yx = estimate_pair(&rho, PauliPair::YX, &plan, rep).unwrap();
            let yy = estimate_pair(&rho, PauliPair::YY, &plan, rep).unwrap();
            w2.push(xx + 2.0 * yx - yy);
        }
        let (mean, std) = mean_std(&w2);
        assert_eq!(est.w2_mean.to_bits(), mean.to_bits());
        assert_eq!(est.w2_std.to_bits(), std.to_bits());
    }

    #[test]
    fn mermin_estimate_exact_and_sampled() {
        let rho = ghz_density(PI / 4.0).unwrap();
        let exact = estimate_mermin(&rho, &ShotPlan::exact()).unwrap();
        assert!((exact.m2_mean - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let sampled = estimate_mermin(&rho, &ShotPlan::sampled(4096, 5, 8).unwrap()).unwrap();
        assert!((sampled.m2_mean - exact.m2_mean).abs() < 0.1);
    }

    #[test]
    fn mean_std_uses_n_minus_one() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, &[0, 0]);
        assert_ne!(a, derive_seed(1, &[0, 1]));
        assert_ne!(a, derive_seed(1, &[1, 0]));
        assert_ne!(a, derive_seed(2, &[0, 0]));
        assert_eq!(a, derive_seed(1, &[0, 0]));
    }
}
