//! Seeded scenario generators shared by the demos and the test campaigns.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conditionalization::{ConditionDistribution, Stratum};
use crate::connections::{rationalize, DEFAULT_MAX_DENOMINATOR};
use crate::distributions::{scenario_from_correlations, PairDistribution, Scenario};
use crate::quantum::{singlet_correlations, SettingVector};
use crate::rational::{rat, Rational};

/// Grid used for generated correlations and probabilities.
pub const GRID: i64 = 1000;

/// Correlations on the `k / 1000` grid in `[-1, 1]^4`.
pub fn random_grid_correlations<R: Rng + ?Sized>(rng: &mut R) -> [Rational; 4] {
    std::array::from_fn(|_| rat(rng.gen_range(-GRID..=GRID), GRID))
}

pub fn random_uniform_scenario<R: Rng + ?Sized>(rng: &mut R) -> Scenario {
    scenario_from_correlations(&random_grid_correlations(rng)).expect("grid values lie in [-1, 1]")
}

/// Four independent pair distributions with grid weights; almost always
/// signaling.
pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R) -> Scenario {
    Scenario::new(std::array::from_fn(|_| loop {
        let w: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..=20));
        let total: i64 = w.iter().sum();
        if total > 0 {
            break PairDistribution::from_cells(w.map(|x| rat(x, total)))
                .expect("normalized weights");
        }
    }))
}

/// Singlet correlations for random directions, rationalized.
pub fn random_singlet_scenario<R: Rng + ?Sized>(rng: &mut R) -> Scenario {
    let [a1, a2, b1, b2]: [SettingVector; 4] = std::array::from_fn(|_| SettingVector::random(rng));
    let c = singlet_correlations(&a1, &a2, &b1, &b2).values();
    scenario_from_correlations(&c.map(|x| rationalize(x, DEFAULT_MAX_DENOMINATOR)))
        .expect("singlet correlations lie in [-1, 1]")
}

/// Strictly positive condition distribution with weights in `1..=20`.
pub fn random_condition_distribution<R: Rng + ?Sized>(rng: &mut R) -> ConditionDistribution {
    let w: [i64; 4] = std::array::from_fn(|_| rng.gen_range(1..=20));
    let total: i64 = w.iter().sum();
    ConditionDistribution::new(w.map(|x| rat(x, total))).expect("positive weights")
}

/// Rejection sampling of a scenario in the given stratum.
pub fn scenario_in_stratum<R: Rng + ?Sized>(rng: &mut R, stratum: Stratum) -> Scenario {
    loop {
        let s = match stratum {
            Stratum::SignalingViolating => random_scenario(rng),
            Stratum::QuantumOnly => random_singlet_scenario(rng),
            _ => random_uniform_scenario(rng),
        };
        if Stratum::of(&s) == stratum {
            return s;
        }
    }
}

/// `per_stratum` (scenario, pi) pairs for every stratum, in stratum order.
pub fn stratified_pairs(seed: u64, per_stratum: usize) -> Vec<(Scenario, ConditionDistribution)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_stratum * Stratum::ALL.len());
    for stratum in Stratum::ALL {
        for _ in 0..per_stratum {
            let s = scenario_in_stratum(&mut rng, stratum);
            out.push((s, random_condition_distribution(&mut rng)));
        }
    }
    out
}

/// `n` uniform-marginal scenarios; a fixed seed gives a fixed sequence.
pub fn uniform_scenarios(seed: u64, n: usize) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_uniform_scenario(&mut rng)).collect()
}
