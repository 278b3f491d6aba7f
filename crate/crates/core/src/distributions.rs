//! Observed pair distributions, one per context.

use std::fmt;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::inequalities::CorrelationVector;
use crate::rational::{in_signed_unit_interval, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("cell probability {0} is negative")]
    NegativeCell(Rational),
    #[error("cell probabilities sum to {0}, not 1")]
    NotNormalized(Rational),
    #[error("correlation {value} for context {context} lies outside [-1, 1]")]
    CorrelationOutOfRange { context: Context, value: Rational },
}

/// A joint setting `(alpha_i, beta_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Context {
    C11,
    C12,
    C21,
    C22,
}

impl Context {
    pub const ALL: [Context; 4] = [Context::C11, Context::C12, Context::C21, Context::C22];

    pub fn new(alice: u8, bob: u8) -> Option<Context> {
        match (alice, bob) {
            (1, 1) => Some(Context::C11),
            (1, 2) => Some(Context::C12),
            (2, 1) => Some(Context::C21),
            (2, 2) => Some(Context::C22),
            _ => None,
        }
    }

    /// Alice's setting index, 1 or 2.
    pub fn alice(self) -> u8 {
        self.index() as u8 / 2 + 1
    }

    /// Bob's setting index, 1 or 2.
    pub fn bob(self) -> u8 {
        self.index() as u8 % 2 + 1
    }

    /// Position in `ALL`.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        ["11", "12", "21", "22"][self.index()]
    }

    pub fn from_label(label: &str) -> Option<Context> {
        Context::ALL.into_iter().find(|c| c.label() == label)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Joint distribution of `(A_ij, B_ij)` over `{+1, -1}^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairDistribution {
    pp: Rational,
    pm: Rational,
    mp: Rational,
    mm: Rational,
}

impl PairDistribution {
    pub fn new(
        pp: Rational,
        pm: Rational,
        mp: Rational,
        mm: Rational,
    ) -> Result<Self, DistributionError> {
        for cell in [&pp, &pm, &mp, &mm] {
            if cell.is_negative() {
                return Err(DistributionError::NegativeCell(cell.clone()));
            }
        }
        let total = &pp + &pm + &mp + &mm;
        if !total.is_one() {
            return Err(DistributionError::NotNormalized(total));
        }
        Ok(PairDistribution { pp, pm, mp, mm })
    }

    /// Cells in the order `(+,+), (+,-), (-,+), (-,-)`.
    pub fn from_cells(cells: [Rational; 4]) -> Result<Self, DistributionError> {
        let [pp, pm, mp, mm] = cells;
        Self::new(pp, pm, mp, mm)
    }

    pub fn independent_fair() -> Self {
        let q = rat(1, 4);
        PairDistribution {
            pp: q.clone(),
            pm: q.clone(),
            mp: q.clone(),
            mm: q,
        }
    }

    pub fn cells(&self) -> [&Rational; 4] {
        [&self.pp, &self.pm, &self.mp, &self.mm]
    }

    /// `Pr[A = a, B = b]` for `a, b` in `{+1, -1}`.
    pub fn prob(&self, a: i8, b: i8) -> &Rational {
        match (a > 0, b > 0) {
            (true, true) => &self.pp,
            (true, false) => &self.pm,
            (false, true) => &self.mp,
            (false, false) => &self.mm,
        }
    }

    pub fn p_pp(&self) -> &Rational {
        &self.pp
    }

    /// `Pr[A = +1]`.
    pub fn alice_up(&self) -> Rational {
        &self.pp + &self.pm
    }

    /// `Pr[B = +1]`.
    pub fn bob_up(&self) -> Rational {
        &self.pp + &self.mp
    }
}

/// `<A B>` for one pair: `p_pp - p_pm - p_mp + p_mm`.
pub fn correlation(pd: &PairDistribution) -> Rational {
    &pd.pp - &pd.pm - &pd.mp + &pd.mm
}

/// The four observed pairs of the scenario, indexed by context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    pairs: [PairDistribution; 4],
}

impl Scenario {
    /// Pairs in context order 11, 12, 21, 22.
    pub fn new(pairs: [PairDistribution; 4]) -> Self {
        Scenario { pairs }
    }

    pub fn pair(&self, context: Context) -> &PairDistribution {
        &self.pairs[context.index()]
    }

    pub fn pairs(&self) -> &[PairDistribution; 4] {
        &self.pairs
    }

    pub fn correlations(&self) -> CorrelationVector {
        CorrelationVector::from_rationals(self.pairs.clone().map(|pd| correlation(&pd)))
            .expect("pair correlations always lie in [-1, 1]")
    }

    pub fn fair_coins() -> Self {
        Scenario::new(std::array::from_fn(|_| {
            PairDistribution::independent_fair()
        }))
    }

    /// Uniform marginals with correlations `(1, 1, 1, -1)`.
    pub fn pr_box() -> Self {
        scenario_from_correlations(&[1, 1, 1, -1].map(|x| rat(x, 1)))
            .expect("PR-box correlations are in range")
    }
}

/// One failed equality of the no-signaling condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalingViolation {
    /// `"A row i=1"`, `"A row i=2"`, `"B column j=1"` or `"B column j=2"`.
    pub name: &'static str,
    pub left: Rational,
    pub right: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoSignalingReport {
    pub holds: bool,
    pub violations: Vec<SignalingViolation>,
}

/// Checks `Pr[A_i1 = 1] = Pr[A_i2 = 1]` and `Pr[B_1j = 1] = Pr[B_2j = 1]`
/// exactly.
pub fn check_no_signaling(s: &Scenario) -> NoSignalingReport {
    use Context::*;
    let checks = [
        ("A row i=1", s.pair(C11).alice_up(), s.pair(C12).alice_up()),
        ("A row i=2", s.pair(C21).alice_up(), s.pair(C22).alice_up()),
        ("B column j=1", s.pair(C11).bob_up(), s.pair(C21).bob_up()),
        ("B column j=2", s.pair(C12).bob_up(), s.pair(C22).bob_up()),
    ];
    let violations: Vec<_> = checks
        .into_iter()
        .filter(|(_, l, r)| l != r)
        .map(|(name, left, right)| SignalingViolation { name, left, right })
        .collect();
    NoSignalingReport {
        holds: violations.is_empty(),
        violations,
    }
}

/// Lifts correlations to a scenario with all single-outcome probabilities
/// equal to 1/2: `p_pp = p_mm = (1+e)/4`, `p_pm = p_mp = (1-e)/4`.
pub fn scenario_from_correlations(c: &[Rational; 4]) -> Result<Scenario, DistributionError> {
    let mut pairs = Vec::with_capacity(4);
    for (context, e) in Context::ALL.into_iter().zip(c) {
        if !in_signed_unit_interval(e) {
            return Err(DistributionError::CorrelationOutOfRange {
                context,
                value: e.clone(),
            });
        }
        let quarter = rat(1, 4);
        let same = (Rational::one() + e) * &quarter;
        let diff = (Rational::one() - e) * &quarter;
        pairs.push(PairDistribution {
            pp: same.clone(),
            pm: diff.clone(),
            mp: diff,
            mm: same,
        });
    }
    let pairs: [PairDistribution; 4] = pairs.try_into().expect("four contexts");
    Ok(Scenario::new(pairs))
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario::fair_coins()
    }
}
