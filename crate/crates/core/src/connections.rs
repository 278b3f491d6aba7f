//! Which connection vectors fit, force, or are equivalent to an inequality
//! family.
//!
//! A connection vector *fits* a family when every scenario satisfying the
//! family admits a coupling with those connection expectations; it *forces*
//! the family when every scenario that admits such a coupling satisfies the
//! family; it is *equivalent* when both hold. These are universally
//! quantified statements, so here they are checked on seeded samples of
//! uniform-marginal scenarios, with each sample decided exactly by the LP.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coupling::{coupling_exists, Coupling, CouplingError};
use crate::distributions::{scenario_from_correlations, Scenario};
use crate::inequalities::{report, CorrelationVector, Family, FamilyReport, DEFAULT_TOLERANCE};
use crate::rational::{from_f64_exact, Rational};

pub use crate::coupling::ConnectionVector;

/// Default denominator bound when turning real targets into exact ones.
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

/// Sampled correlations are multiples of `1 / SAMPLE_GRID` in `[-1, 1]`.
pub const SAMPLE_GRID: i64 = 1 << 20;

/// Sampled scenarios keep at least this distance from the family boundary.
pub const BOUNDARY_MARGIN: f64 = 1e-4;

pub const MAX_DRAWS_PER_SAMPLE: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConnectionError {
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error("at least one sample is required")]
    NoSamples,
    #[error("no scenario that {membership} the {family} family after {draws} draws")]
    SamplerExhausted {
        family: Family,
        membership: Membership,
        draws: u64,
    },
}

/// Best rational approximation of `x` with denominator at most
/// `max_denominator`, found from the continued fraction of the exact value
/// of `x` (convergents and the final semiconvergent).
///
/// Panics if `x` is not finite or `max_denominator` is 0.
pub fn rationalize(x: f64, max_denominator: u64) -> Rational {
    assert!(max_denominator >= 1, "max_denominator must be positive");
    let target = from_f64_exact(x).expect("rationalize needs a finite value");
    let bound = BigInt::from(max_denominator);

    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    loop {
        let a = rest.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > bound {
            let t = (&bound - &q0).div_floor(&q1);
            let semi = Rational::new(&t * &p1 + &p0, &t * &q1 + &q0);
            let last = Rational::new(p1, q1);
            let semi_err = (&semi - &target).abs();
            let last_err = (&last - &target).abs();
            return if semi_err < last_err { semi } else { last };
        }
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            return Rational::new(p2, q2);
        }
        rest = frac.recip();
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
}

/// Every target is `+1` or `-1` and the number of `+1`s is 4, 2, or 0.
pub fn satisfies_s1_prime(conn: &ConnectionVector) -> bool {
    let one = Rational::one();
    let minus_one = -Rational::one();
    let targets = conn.targets();
    targets.iter().all(|t| *t == one || *t == minus_one)
        && targets.iter().filter(|t| **t == one).count() % 2 == 0
}

/// `2 (3 - sqrt 2)`, the required maximum over even sign patterns.
pub fn s2_even_target() -> f64 {
    2.0 * (3.0 - std::f64::consts::SQRT_2)
}

/// Largest `±c1 ± c2 ± c3 ± c4` over patterns with an even and an odd
/// number of `+` signs, respectively.
pub fn signed_sum_maxima(c: [f64; 4]) -> (f64, f64) {
    let mut even = f64::NEG_INFINITY;
    let mut odd = f64::NEG_INFINITY;
    for mask in 0u8..16 {
        let sum: f64 = (0..4)
            .map(|k| if mask >> k & 1 == 1 { c[k] } else { -c[k] })
            .sum();
        if mask.count_ones() % 2 == 0 {
            even = even.max(sum);
        } else {
            odd = odd.max(sum);
        }
    }
    (even, odd)
}

pub fn satisfies_s2_prime(conn: &ConnectionVector) -> bool {
    satisfies_s2_prime_with(conn, DEFAULT_TOLERANCE)
}

/// Even-pattern maximum equals `2 (3 - sqrt 2)` and odd-pattern maximum is
/// at most 2, both within `tolerance`, evaluated on the real
/// (pre-rationalization) values.
pub fn satisfies_s2_prime_with(conn: &ConnectionVector, tolerance: f64) -> bool {
    let (even, odd) = signed_sum_maxima(conn.real_values());
    (even - s2_even_target()).abs() <= tolerance && odd <= 2.0 + tolerance
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    Satisfies,
    Violates,
}

impl std::fmt::Display for Membership {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Membership::Satisfies => "satisfies",
            Membership::Violates => "violates",
        })
    }
}

/// A sampled uniform-marginal scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub correlations: [Rational; 4],
    pub scenario: Scenario,
    pub report: FamilyReport,
    /// Draws spent, including rejected ones.
    pub draws: u64,
}

/// Rejection sampler of uniform-marginal scenarios on a fine rational grid.
///
/// Sample `k` is drawn from its own ChaCha stream, so sample sequences do not
/// depend on evaluation order.
#[derive(Debug, Clone)]
pub struct ScenarioSampler {
    pub seed: u64,
    pub tolerance: f64,
    pub margin: f64,
    pub max_draws: u64,
}

impl ScenarioSampler {
    pub fn new(seed: u64) -> Self {
        ScenarioSampler {
            seed,
            tolerance: DEFAULT_TOLERANCE,
            margin: BOUNDARY_MARGIN,
            max_draws: MAX_DRAWS_PER_SAMPLE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    pub fn sample(
        &self,
        index: u64,
        family: Family,
        membership: Membership,
    ) -> Result<Sample, ConnectionError> {
        let mut rng = self.rng(index);
        for draw in 1..=self.max_draws {
            let correlations = random_grid_correlations(&mut rng);
            let c = CorrelationVector::from_rationals(correlations.clone())
                .expect("grid points lie in [-1, 1]");
            let rep = report(&c, family, self.tolerance);
            let keep = match membership {
                Membership::Satisfies => rep.max_lhs <= rep.bound - self.margin,
                Membership::Violates => rep.max_lhs >= rep.bound + self.margin,
            };
            if keep {
                let scenario =
                    scenario_from_correlations(&correlations).expect("grid points lie in [-1, 1]");
                return Ok(Sample {
                    correlations,
                    scenario,
                    report: rep,
                    draws: draw,
                });
            }
        }
        Err(ConnectionError::SamplerExhausted {
            family,
            membership,
            draws: self.max_draws,
        })
    }
}

/// Uniform draw from the grid `{k / SAMPLE_GRID : |k| <= SAMPLE_GRID}^4`.
pub fn random_grid_correlations<R: Rng + ?Sized>(rng: &mut R) -> [Rational; 4] {
    std::array::from_fn(|_| {
        Rational::new(
            BigInt::from(rng.gen_range(-SAMPLE_GRID..=SAMPLE_GRID)),
            BigInt::from(SAMPLE_GRID),
        )
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Fitting,
    Forcing,
    Equivalent,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Fitting => "fitting",
            Role::Forcing => "forcing",
            Role::Equivalent => "equivalent",
        }
    }

    pub fn from_name(name: &str) -> Option<Role> {
        [Role::Fitting, Role::Forcing, Role::Equivalent]
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(name))
    }
}

/// A sampled scenario on which the connection vector failed its role.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    /// The sub-test that failed: `Fitting` or `Forcing`.
    pub failed: Role,
    pub sample_index: u64,
    pub correlations: [Rational; 4],
    pub scenario: Scenario,
    pub family_report: FamilyReport,
    /// For a forcing failure, the coupling that should not have existed.
    pub witness: Option<Coupling>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetRole {
    pub role: Role,
    pub family: Family,
    pub verdict: bool,
    pub samples_checked: u64,
    /// Present iff `verdict` is false.
    pub counterexample: Option<Counterexample>,
}

pub fn test_fitting(
    conn: Option<&ConnectionVector>,
    family: Family,
    sampler_seed: u64,
    n: u64,
) -> Result<SetRole, ConnectionError> {
    test_fitting_with(&ScenarioSampler::new(sampler_seed), conn, family, n)
}

/// Samples `n` scenarios satisfying `family` and requires a coupling with
/// connections `conn` for each. Stops at the first failure.
pub fn test_fitting_with(
    sampler: &ScenarioSampler,
    conn: Option<&ConnectionVector>,
    family: Family,
    n: u64,
) -> Result<SetRole, ConnectionError> {
    if n == 0 {
        return Err(ConnectionError::NoSamples);
    }
    for index in 0..n {
        let sample = sampler.sample(index, family, Membership::Satisfies)?;
        if !coupling_exists(&sample.scenario, conn).feasible {
            let detail = format!(
                "scenario satisfies {family} (max lhs {:.6} <= {:.6}) but no coupling has these connections",
                sample.report.max_lhs, sample.report.bound
            );
            return Ok(failed(Role::Fitting, family, index, sample, None, detail));
        }
    }
    Ok(passed(Role::Fitting, family, n))
}

pub fn test_forcing(
    conn: Option<&ConnectionVector>,
    family: Family,
    sampler_seed: u64,
    n: u64,
) -> Result<SetRole, ConnectionError> {
    test_forcing_with(&ScenarioSampler::new(sampler_seed), conn, family, n)
}

/// Samples `n` scenarios violating `family` and requires that none admits
/// a coupling with connections `conn`. Stops at the first failure.
pub fn test_forcing_with(
    sampler: &ScenarioSampler,
    conn: Option<&ConnectionVector>,
    family: Family,
    n: u64,
) -> Result<SetRole, ConnectionError> {
    if n == 0 {
        return Err(ConnectionError::NoSamples);
    }
    for index in 0..n {
        let sample = sampler.sample(index, family, Membership::Violates)?;
        let verdict = coupling_exists(&sample.scenario, conn);
        if let Some(witness) = verdict.witness {
            let detail = format!(
                "scenario violates {family} (max lhs {:.6} > {:.6}) yet a coupling with these connections exists",
                sample.report.max_lhs, sample.report.bound
            );
            return Ok(failed(
                Role::Forcing,
                family,
                index,
                sample,
                Some(witness),
                detail,
            ));
        }
    }
    Ok(passed(Role::Forcing, family, n))
}

pub fn test_equivalent(
    conn: Option<&ConnectionVector>,
    family: Family,
    sampler_seed: u64,
    n: u64,
) -> Result<SetRole, ConnectionError> {
    test_equivalent_with(&ScenarioSampler::new(sampler_seed), conn, family, n)
}

/// Fitting and forcing together; forcing is skipped once fitting fails.
pub fn test_equivalent_with(
    sampler: &ScenarioSampler,
    conn: Option<&ConnectionVector>,
    family: Family,
    n: u64,
) -> Result<SetRole, ConnectionError> {
    let fitting = test_fitting_with(sampler, conn, family, n)?;
    if !fitting.verdict {
        return Ok(SetRole {
            role: Role::Equivalent,
            ..fitting
        });
    }
    let forcing = test_forcing_with(sampler, conn, family, n)?;
    Ok(SetRole {
        role: Role::Equivalent,
        family,
        verdict: forcing.verdict,
        samples_checked: fitting.samples_checked + forcing.samples_checked,
        counterexample: forcing.counterexample,
    })
}

pub fn test_role(
    role: Role,
    sampler: &ScenarioSampler,
    conn: Option<&ConnectionVector>,
    family: Family,
    n: u64,
) -> Result<SetRole, ConnectionError> {
    match role {
        Role::Fitting => test_fitting_with(sampler, conn, family, n),
        Role::Forcing => test_forcing_with(sampler, conn, family, n),
        Role::Equivalent => test_equivalent_with(sampler, conn, family, n),
    }
}

fn passed(role: Role, family: Family, n: u64) -> SetRole {
    SetRole {
        role,
        family,
        verdict: true,
        samples_checked: n,
        counterexample: None,
    }
}

fn failed(
    role: Role,
    family: Family,
    index: u64,
    sample: Sample,
    witness: Option<Coupling>,
    detail: String,
) -> SetRole {
    SetRole {
        role,
        family,
        verdict: false,
        samples_checked: index + 1,
        counterexample: Some(Counterexample {
            failed: role,
            sample_index: index,
            correlations: sample.correlations,
            scenario: sample.scenario,
            family_report: sample.report,
            witness,
            detail,
        }),
    }
}
