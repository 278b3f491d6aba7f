//! Conditional couplings: treat the context as a random variable `C` and the
//! observed pairs as conditional distributions given `C`.
//!
//! Three constructions are provided: the plain table `Z = (C, (A', B'))`,
//! the four-output version where the irrelevant pair is spread by partition
//! weights, and the four-output version where the irrelevant pair is padded
//! with 0. All are closed-form tables. They exist for every scenario and
//! every strictly positive distribution of `C`, which is the point: they say
//! nothing about how the contexts relate.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::coupling::{pair_coupling_range, CouplingError};
use crate::distributions::{check_no_signaling, Context, Scenario};
use crate::inequalities::{classify, Classification};
use crate::rational::{int, rat, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionalizationError {
    #[error(
        "condition {index} has probability {value}; every condition needs nonzero \
         probability, otherwise the conditional probabilities are undefined"
    )]
    NonPositiveCondition { index: usize, value: Rational },
    #[error("condition probabilities sum to {0}, not 1")]
    ConditionsNotNormalized(Rational),
    #[error("partition weights for context {context} are invalid: {reason}")]
    InvalidPartition {
        context: Context,
        reason: &'static str,
    },
    #[error("conditional distribution {index} is invalid: {reason}")]
    InvalidConditional { index: usize, reason: &'static str },
    #[error("{conditions} conditional distributions but {weights} condition weights")]
    LengthMismatch { conditions: usize, weights: usize },
    #[error("at least one scenario and one condition distribution are required")]
    EmptyInput,
    #[error(transparent)]
    Coupling(#[from] CouplingError),
}

/// Builds the joint table `weight_k * Pr[outcome | k]` for conditions `k`.
///
/// Weights must be strictly positive and sum to 1; each conditional row
/// must be a probability vector.
pub fn conditional_table(
    conditionals: &[Vec<Rational>],
    weights: &[Rational],
) -> Result<Vec<Vec<Rational>>, ConditionalizationError> {
    if conditionals.len() != weights.len() {
        return Err(ConditionalizationError::LengthMismatch {
            conditions: conditionals.len(),
            weights: weights.len(),
        });
    }
    check_condition_weights(weights)?;
    for (index, row) in conditionals.iter().enumerate() {
        if row.iter().any(|x| x.is_negative()) {
            return Err(ConditionalizationError::InvalidConditional {
                index,
                reason: "negative probability",
            });
        }
        if !row.iter().sum::<Rational>().is_one() {
            return Err(ConditionalizationError::InvalidConditional {
                index,
                reason: "probabilities do not sum to 1",
            });
        }
    }
    Ok(conditionals
        .iter()
        .zip(weights)
        .map(|(row, w)| row.iter().map(|x| x * w).collect())
        .collect())
}

fn check_condition_weights(weights: &[Rational]) -> Result<(), ConditionalizationError> {
    for (index, w) in weights.iter().enumerate() {
        if !w.is_positive() {
            return Err(ConditionalizationError::NonPositiveCondition {
                index,
                value: w.clone(),
            });
        }
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(ConditionalizationError::ConditionsNotNormalized(total));
    }
    Ok(())
}

/// Distribution of `C` over the four contexts, all strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionDistribution {
    pi: [Rational; 4],
}

impl ConditionDistribution {
    pub fn new(pi: [Rational; 4]) -> Result<Self, ConditionalizationError> {
        check_condition_weights(&pi)?;
        Ok(ConditionDistribution { pi })
    }

    pub fn uniform() -> Self {
        ConditionDistribution {
            pi: std::array::from_fn(|_| rat(1, 4)),
        }
    }

    pub fn get(&self, context: Context) -> &Rational {
        &self.pi[context.index()]
    }

    pub fn as_array(&self) -> &[Rational; 4] {
        &self.pi
    }
}

/// Weights `t_ij(a', b')` for spreading mass over the irrelevant pair,
/// cells in the order `(+,+), (+,-), (-,+), (-,-)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionWeights {
    t: [[Rational; 4]; 4],
}

impl PartitionWeights {
    pub fn new(t: [[Rational; 4]; 4]) -> Result<Self, ConditionalizationError> {
        for context in Context::ALL {
            let row = &t[context.index()];
            if row.iter().any(|x| x.is_negative()) {
                return Err(ConditionalizationError::InvalidPartition {
                    context,
                    reason: "negative weight",
                });
            }
            if !row.iter().sum::<Rational>().is_one() {
                return Err(ConditionalizationError::InvalidPartition {
                    context,
                    reason: "weights do not sum to 1",
                });
            }
        }
        Ok(PartitionWeights { t })
    }

    pub fn uniform() -> Self {
        PartitionWeights {
            t: std::array::from_fn(|_| std::array::from_fn(|_| rat(1, 4))),
        }
    }

    /// All weight on one irrelevant cell, for every context.
    pub fn point_mass(a: i8, b: i8) -> Self {
        let mut row: [Rational; 4] = std::array::from_fn(|_| int(0));
        row[cell_index(a, b)] = int(1);
        PartitionWeights {
            t: std::array::from_fn(|_| row.clone()),
        }
    }

    pub fn weight(&self, context: Context, a: i8, b: i8) -> &Rational {
        &self.t[context.index()][cell_index(a, b)]
    }
}

fn cell_index(a: i8, b: i8) -> usize {
    match (a > 0, b > 0) {
        (true, true) => 0,
        (true, false) => 1,
        (false, true) => 2,
        (false, false) => 3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstructionKind {
    /// `(C, (A', B'))`.
    Simple,
    /// `(C, (A'1, A'2, B'1, B'2))` with the irrelevant pair spread by weights.
    EvenPartition,
    /// `(C, (A'1, A'2, B'1, B'2))` with the irrelevant pair set to 0.
    ZeroPadded,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 3] = [
        ConstructionKind::Simple,
        ConstructionKind::EvenPartition,
        ConstructionKind::ZeroPadded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructionKind::Simple => "simple",
            ConstructionKind::EvenPartition => "even",
            ConstructionKind::ZeroPadded => "zero",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }

    /// Positions of `(A'_i, B'_j)` inside the output tuple for context `(i, j)`.
    fn relevant_positions(self, context: Context) -> (usize, usize) {
        match self {
            ConstructionKind::Simple => (0, 1),
            _ => (
                usize::from(context.alice()) - 1,
                2 + usize::from(context.bob()) - 1,
            ),
        }
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Joint table of `C` and the outputs. Outputs are `(a, b)` for `Simple` and
/// `(a1, a2, b1, b2)` otherwise. Cells not stored have mass 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalCoupling {
    pub kind: ConstructionKind,
    cells: BTreeMap<(Context, Vec<i8>), Rational>,
}

impl ConditionalCoupling {
    pub fn from_cells(
        kind: ConstructionKind,
        cells: BTreeMap<(Context, Vec<i8>), Rational>,
    ) -> Self {
        ConditionalCoupling { kind, cells }
    }

    pub fn cells(&self) -> &BTreeMap<(Context, Vec<i8>), Rational> {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut BTreeMap<(Context, Vec<i8>), Rational> {
        &mut self.cells
    }

    pub fn mass(&self, context: Context, outputs: &[i8]) -> Rational {
        self.cells
            .get(&(context, outputs.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.cells.values().sum()
    }

    /// `Pr[C = c]` for each context.
    pub fn condition_marginal(&self) -> [Rational; 4] {
        let mut pi: [Rational; 4] = Default::default();
        for ((ctx, _), m) in &self.cells {
            pi[ctx.index()] += m;
        }
        pi
    }

    /// `Pr[A' = a, B' = b | C = context]` for the context's relevant pair,
    /// cells `pp, pm, mp, mm`. Outcomes other than `±1` are not counted.
    pub fn conditional_pair(&self, context: Context) -> Option<[Rational; 4]> {
        let weight = &self.condition_marginal()[context.index()];
        if !weight.is_positive() {
            return None;
        }
        let (ia, ib) = self.kind.relevant_positions(context);
        let mut joint: [Rational; 4] = Default::default();
        for ((ctx, out), m) in &self.cells {
            if *ctx != context {
                continue;
            }
            let (a, b) = (out[ia], out[ib]);
            if a != 0 && b != 0 {
                joint[cell_index(a, b)] += m;
            }
        }
        Some(joint.map(|x| x / weight))
    }
}

/// `(context, (a, b)) -> pi_ij * Pr[A_ij = a, B_ij = b]`.
pub fn simple_conditional_coupling(
    s: &Scenario,
    pi: &ConditionDistribution,
) -> ConditionalCoupling {
    let conditionals: Vec<Vec<Rational>> = Context::ALL
        .iter()
        .map(|&ctx| s.pair(ctx).cells().into_iter().cloned().collect())
        .collect();
    let table = conditional_table(&conditionals, pi.as_array())
        .expect("scenario pairs and condition weights are validated on construction");
    let mut cells = BTreeMap::new();
    for (ctx, row) in Context::ALL.into_iter().zip(table) {
        for ((a, b), m) in SIGNS2.into_iter().zip(row) {
            cells.insert((ctx, vec![a, b]), m);
        }
    }
    ConditionalCoupling {
        kind: ConstructionKind::Simple,
        cells,
    }
}

const SIGNS2: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

fn four_outputs(context: Context, relevant: (i8, i8), irrelevant: (i8, i8)) -> Vec<i8> {
    let mut out = vec![0i8; 4];
    let i = usize::from(context.alice()) - 1;
    let j = usize::from(context.bob()) - 1;
    out[i] = relevant.0;
    out[1 - i] = irrelevant.0;
    out[2 + j] = relevant.1;
    out[2 + (1 - j)] = irrelevant.1;
    out
}

/// `(context (i,j), (a1, a2, b1, b2)) -> pi_ij * t_ij(a_{3-i}, b_{3-j}) *
/// Pr[A_ij = a_i, B_ij = b_j]`. `t` defaults to uniform quarters.
pub fn avis_even_partition(
    s: &Scenario,
    pi: &ConditionDistribution,
    t: Option<&PartitionWeights>,
) -> ConditionalCoupling {
    let uniform;
    let t = match t {
        Some(t) => t,
        None => {
            uniform = PartitionWeights::uniform();
            &uniform
        }
    };
    let mut cells = BTreeMap::new();
    for ctx in Context::ALL {
        let w = pi.get(ctx);
        for (a, b) in SIGNS2 {
            let p = w * s.pair(ctx).prob(a, b);
            for (a2, b2) in SIGNS2 {
                let m = &p * t.weight(ctx, a2, b2);
                cells.insert((ctx, four_outputs(ctx, (a, b), (a2, b2))), m);
            }
        }
    }
    ConditionalCoupling {
        kind: ConstructionKind::EvenPartition,
        cells,
    }
}

/// `(context (i,j), outputs) -> pi_ij * Pr[A_ij = a, B_ij = b]` when the
/// relevant pair is `(a, b)` with `a, b != 0` and the irrelevant pair is
/// `(0, 0)`; every other cell has mass 0.
pub fn avis_zero_padded(s: &Scenario, pi: &ConditionDistribution) -> ConditionalCoupling {
    let mut cells = BTreeMap::new();
    for ctx in Context::ALL {
        for (a, b) in SIGNS2 {
            let m = pi.get(ctx) * s.pair(ctx).prob(a, b);
            cells.insert((ctx, four_outputs(ctx, (a, b), (0, 0))), m);
        }
    }
    ConditionalCoupling {
        kind: ConstructionKind::ZeroPadded,
        cells,
    }
}

pub fn build(
    kind: ConstructionKind,
    s: &Scenario,
    pi: &ConditionDistribution,
) -> ConditionalCoupling {
    match kind {
        ConstructionKind::Simple => simple_conditional_coupling(s, pi),
        ConstructionKind::EvenPartition => avis_even_partition(s, pi, None),
        ConstructionKind::ZeroPadded => avis_zero_padded(s, pi),
    }
}

/// True iff `cc` is a probability table whose conditional distribution of
/// the relevant pair, given each context, equals the scenario's pair
/// exactly.
pub fn verify_conditionals(cc: &ConditionalCoupling, s: &Scenario) -> bool {
    if cc.cells.values().any(|m| m.is_negative()) || !cc.total().is_one() {
        return false;
    }
    Context::ALL
        .into_iter()
        .all(|ctx| match cc.conditional_pair(ctx) {
            Some(cond) => s
                .pair(ctx)
                .cells()
                .into_iter()
                .zip(&cond)
                .all(|(want, got)| want == got),
            None => false,
        })
}

/// Where a scenario sits relative to no-signaling and the inequality
/// families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stratum {
    BellSatisfying,
    /// Satisfies the arcsin inequalities but violates Bell.
    QuantumOnly,
    /// Violates the arcsin inequalities, satisfies Tsirelson.
    BeyondQuantum,
    SuperTsirelson,
    SignalingViolating,
}

impl Stratum {
    pub const ALL: [Stratum; 5] = [
        Stratum::BellSatisfying,
        Stratum::QuantumOnly,
        Stratum::BeyondQuantum,
        Stratum::SuperTsirelson,
        Stratum::SignalingViolating,
    ];

    pub fn of(s: &Scenario) -> Stratum {
        if !check_no_signaling(s).holds {
            return Stratum::SignalingViolating;
        }
        let c = classify(&s.correlations());
        if c.bell {
            Stratum::BellSatisfying
        } else if c.quantum {
            Stratum::QuantumOnly
        } else if c.tsirelson {
            Stratum::BeyondQuantum
        } else {
            Stratum::SuperTsirelson
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stratum::BellSatisfying => "bell-satisfying",
            Stratum::QuantumOnly => "quantum-only",
            Stratum::BeyondQuantum => "beyond-quantum",
            Stratum::SuperTsirelson => "super-tsirelson",
            Stratum::SignalingViolating => "signaling-violating",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionOutcome {
    pub scenario_index: usize,
    pub pi_index: usize,
    pub kind: ConstructionKind,
    pub stratum: Stratum,
    pub classification: Classification,
    pub no_signaling: bool,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UninformativenessReport {
    pub outcomes: Vec<ConstructionOutcome>,
}

impl UninformativenessReport {
    pub fn attempted(&self) -> usize {
        self.outcomes.len()
    }

    pub fn succeeded(&self) -> usize {
        self.outcomes.iter().filter(|o| o.verified).count()
    }

    pub fn success_rate(&self) -> f64 {
        if self.outcomes.is_empty() {
            return 0.0;
        }
        self.succeeded() as f64 / self.attempted() as f64
    }

    /// `(succeeded, attempted)` per stratum that occurred.
    pub fn by_stratum(&self) -> BTreeMap<Stratum, (usize, usize)> {
        let mut out = BTreeMap::new();
        for o in &self.outcomes {
            let entry = out.entry(o.stratum).or_insert((0, 0));
            entry.1 += 1;
            if o.verified {
                entry.0 += 1;
            }
        }
        out
    }
}

/// Every scenario against every condition distribution, all three
/// constructions each.
pub fn uninformativeness_report(
    scenarios: &[Scenario],
    pis: &[ConditionDistribution],
) -> Result<UninformativenessReport, ConditionalizationError> {
    if scenarios.is_empty() || pis.is_empty() {
        return Err(ConditionalizationError::EmptyInput);
    }
    let pairs: Vec<(usize, usize)> = (0..scenarios.len())
        .flat_map(|si| (0..pis.len()).map(move |pj| (si, pj)))
        .collect();
    Ok(run_constructions(scenarios, pis, &pairs))
}

/// As [`uninformativeness_report`], over explicit `(scenario, pi)` pairs.
pub fn uninformativeness_report_pairs(
    pairs: &[(Scenario, ConditionDistribution)],
) -> Result<UninformativenessReport, ConditionalizationError> {
    if pairs.is_empty() {
        return Err(ConditionalizationError::EmptyInput);
    }
    let (scenarios, pis): (Vec<_>, Vec<_>) = pairs.iter().cloned().unzip();
    let index: Vec<(usize, usize)> = (0..pairs.len()).map(|k| (k, k)).collect();
    Ok(run_constructions(&scenarios, &pis, &index))
}

fn run_constructions(
    scenarios: &[Scenario],
    pis: &[ConditionDistribution],
    pairs: &[(usize, usize)],
) -> UninformativenessReport {
    let mut outcomes = Vec::with_capacity(pairs.len() * 3);
    for &(si, pj) in pairs {
        let s = &scenarios[si];
        let stratum = Stratum::of(s);
        let classification = classify(&s.correlations());
        let no_signaling = check_no_signaling(s).holds;
        for kind in ConstructionKind::ALL {
            let cc = build(kind, s, &pis[pj]);
            outcomes.push(ConstructionOutcome {
                scenario_index: si,
                pi_index: pj,
                kind,
                stratum,
                classification,
                no_signaling,
                verified: verify_conditionals(&cc, s),
            });
        }
    }
    UninformativenessReport { outcomes }
}

/// The two-branch tree: condition `a` with probability `pi`, `b` with
/// `1 - pi`; outcome `c` with probability `p` under `a` and `q` under `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeExample {
    /// Rows `C = a, b`; columns `X = c, d`.
    pub joint: [[Rational; 2]; 2],
    /// `Pr[X = c]`, `Pr[X = d]`.
    pub outcome_marginal: [Rational; 2],
    /// Recovered `Pr[X = c | C = a]` and `Pr[X = c | C = b]`.
    pub recovered: (Rational, Rational),
    /// Attainable `Pr[X'_a = c, X'_b = c]` over couplings of the two
    /// stochastically unrelated outcomes.
    pub coupling_range: (Rational, Rational),
    /// `p * q`, the independent coupling's value.
    pub independent: Rational,
    /// Whether `Pr[X'_a = X'_b] = 1` is attainable (`p == q`).
    pub identity_possible: bool,
}

pub fn tree_example(
    p: &Rational,
    q: &Rational,
    pi: &Rational,
) -> Result<TreeExample, ConditionalizationError> {
    let one = Rational::one();
    let conditionals = vec![vec![p.clone(), &one - p], vec![q.clone(), &one - q]];
    let weights = [pi.clone(), &one - pi];
    let table = conditional_table(&conditionals, &weights)?;
    let joint = [
        [table[0][0].clone(), table[0][1].clone()],
        [table[1][0].clone(), table[1][1].clone()],
    ];
    let outcome_marginal = [&joint[0][0] + &joint[1][0], &joint[0][1] + &joint[1][1]];
    let recovered = (&joint[0][0] / &weights[0], &joint[1][0] / &weights[1]);
    Ok(TreeExample {
        coupling_range: pair_coupling_range(p, q)?,
        independent: p * q,
        identity_possible: p == q,
        joint,
        outcome_marginal,
        recovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{scenario_from_correlations, PairDistribution};

    fn pi(v: [(i64, i64); 4]) -> ConditionDistribution {
        ConditionDistribution::new(v.map(|(n, d)| rat(n, d))).unwrap()
    }

    #[test]
    fn condition_distribution_validation() {
        let err =
            ConditionDistribution::new([int(0), rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap_err();
        assert!(matches!(
            err,
            ConditionalizationError::NonPositiveCondition { index: 0, .. }
        ));
        assert!(err.to_string().contains("nonzero probability"));
        assert!(matches!(
            ConditionDistribution::new([rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 8)]),
            Err(ConditionalizationError::ConditionsNotNormalized(_))
        ));
    }

    #[test]
    fn simple_table_for_fair_coins() {
        let cc =
            simple_conditional_coupling(&Scenario::fair_coins(), &ConditionDistribution::uniform());
        assert_eq!(cc.cells().len(), 16);
        assert!(cc.cells().values().all(|m| *m == rat(1, 16)));
        assert!(verify_conditionals(&cc, &Scenario::fair_coins()));
    }

    #[test]
    fn simple_table_for_pr_box_with_skewed_conditions() {
        let s = Scenario::pr_box();
        let cc = simple_conditional_coupling(&s, &pi([(1, 2), (1, 6), (1, 6), (1, 6)]));
        assert!(verify_conditionals(&cc, &s));
        assert_eq!(cc.mass(Context::C11, &[1, 1]), rat(1, 4));
        assert_eq!(cc.mass(Context::C22, &[1, -1]), rat(1, 12));
        assert_eq!(cc.mass(Context::C22, &[1, 1]), int(0));
    }

    #[test]
    fn tree_table_matches_branch_products() {
        let t = tree_example(&rat(1, 2), &rat(1, 2), &rat(3, 10)).unwrap();
        assert_eq!(
            t.joint,
            [[rat(3, 20), rat(3, 20)], [rat(7, 20), rat(7, 20)]]
        );
        assert_eq!(t.recovered, (rat(1, 2), rat(1, 2)));
        assert!(t.identity_possible);

        let t = tree_example(&rat(7, 10), &rat(6, 10), &rat(1, 3)).unwrap();
        assert_eq!(t.coupling_range, (rat(3, 10), rat(6, 10)));
        assert_eq!(t.outcome_marginal[0], rat(7, 30) + rat(2, 5));
        assert!(!t.identity_possible);
        assert!(tree_example(&rat(1, 2), &rat(1, 2), &int(1)).is_err());
    }

    #[test]
    fn even_partition_for_fair_coins() {
        let cc = avis_even_partition(
            &Scenario::fair_coins(),
            &ConditionDistribution::uniform(),
            None,
        );
        assert_eq!(cc.cells().len(), 64);
        assert!(cc.cells().values().all(|m| *m == rat(1, 64)));
        assert!(verify_conditionals(&cc, &Scenario::fair_coins()));
    }

    #[test]
    fn even_partition_on_rational_singlet_scenario() {
        let r = rat(-169, 239);
        let s = scenario_from_correlations(&[r.clone(), r.clone(), r.clone(), -r]).unwrap();
        let cc = avis_even_partition(&s, &ConditionDistribution::uniform(), None);
        assert!(verify_conditionals(&cc, &s));
    }

    #[test]
    fn point_mass_partition_pins_irrelevant_pair() {
        let s = Scenario::pr_box();
        let t = PartitionWeights::point_mass(1, 1);
        let cc = avis_even_partition(&s, &pi([(1, 10), (2, 10), (3, 10), (4, 10)]), Some(&t));
        assert!(verify_conditionals(&cc, &s));
        for ((ctx, out), m) in cc.cells() {
            let i = usize::from(ctx.alice()) - 1;
            let j = usize::from(ctx.bob()) - 1;
            if !m.is_zero() {
                assert_eq!((out[1 - i], out[2 + 1 - j]), (1, 1));
            }
        }
    }

    #[test]
    fn partition_weights_validation() {
        let mut t: [[Rational; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| rat(1, 4)));
        t[2][0] = rat(1, 2);
        assert!(matches!(
            PartitionWeights::new(t.clone()),
            Err(ConditionalizationError::InvalidPartition {
                context: Context::C21,
                ..
            })
        ));
        t[2] = [rat(1, 2), rat(1, 2), rat(1, 2), rat(-1, 2)];
        assert!(PartitionWeights::new(t).is_err());
    }

    #[test]
    fn zero_padded_for_fair_coins() {
        let cc = avis_zero_padded(&Scenario::fair_coins(), &ConditionDistribution::uniform());
        assert_eq!(cc.cells().len(), 16);
        for ((ctx, out), m) in cc.cells() {
            assert_eq!(*m, rat(1, 16));
            let i = usize::from(ctx.alice()) - 1;
            let j = usize::from(ctx.bob()) - 1;
            assert_eq!((out[1 - i], out[2 + 1 - j]), (0, 0));
            assert!(out[i] != 0 && out[2 + j] != 0);
        }
        assert_eq!(cc.mass(Context::C11, &[0, 0, 0, 0]), int(0));
        assert!(verify_conditionals(&cc, &Scenario::fair_coins()));
    }

    #[test]
    fn zero_padded_pr_box_support() {
        let s = Scenario::pr_box();
        let cc = avis_zero_padded(&s, &ConditionDistribution::uniform());
        for ((ctx, out), m) in cc.cells() {
            let i = usize::from(ctx.alice()) - 1;
            let j = usize::from(ctx.bob()) - 1;
            let positive = s.pair(*ctx).prob(out[i], out[2 + j]).is_positive();
            assert_eq!(m.is_positive(), positive);
        }
        assert!(verify_conditionals(&cc, &s));
    }

    #[test]
    fn perturbed_table_fails_verification() {
        let s = Scenario::fair_coins();
        let mut cc = simple_conditional_coupling(&s, &ConditionDistribution::uniform());
        *cc.cells_mut()
            .get_mut(&(Context::C12, vec![1, -1]))
            .unwrap() += rat(1, 1000);
        assert!(!verify_conditionals(&cc, &s));
        // Moving mass between contexts keeps the total but breaks the conditionals.
        *cc.cells_mut().get_mut(&(Context::C21, vec![1, 1])).unwrap() -= rat(1, 1000);
        assert!(cc.total().is_one());
        assert!(!verify_conditionals(&cc, &s));
    }

    #[test]
    fn report_over_named_scenarios() {
        let r = -crate::connections::rationalize(std::f64::consts::FRAC_1_SQRT_2, 1_000_000);
        let singlet = scenario_from_correlations(&[r.clone(), r.clone(), r.clone(), -r]).unwrap();
        let scenarios = [Scenario::fair_coins(), Scenario::pr_box(), singlet];
        let pis = [
            ConditionDistribution::uniform(),
            pi([(1, 2), (1, 4), (1, 8), (1, 8)]),
        ];
        let report = uninformativeness_report(&scenarios, &pis).unwrap();
        assert_eq!(report.attempted(), 18);
        assert_eq!(report.succeeded(), 18);
        let strata = report.by_stratum();
        assert_eq!(strata[&Stratum::BellSatisfying], (6, 6));
        assert_eq!(strata[&Stratum::QuantumOnly], (6, 6));
        assert_eq!(strata[&Stratum::SuperTsirelson], (6, 6));
    }

    #[test]
    fn report_on_signaling_scenario_still_succeeds() {
        let skewed =
            PairDistribution::from_cells([rat(3, 10), rat(3, 10), rat(1, 5), rat(1, 5)]).unwrap();
        let fair = PairDistribution::independent_fair();
        let s = Scenario::new([skewed, fair.clone(), fair.clone(), fair]);
        let report =
            uninformativeness_report(&[s], &[pi([(1, 10), (2, 10), (3, 10), (4, 10)])]).unwrap();
        assert_eq!(report.success_rate(), 1.0);
        assert!(report
            .outcomes
            .iter()
            .all(|o| o.stratum == Stratum::SignalingViolating));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert_eq!(
            uninformativeness_report(&[Scenario::fair_coins()], &[]),
            Err(ConditionalizationError::EmptyInput)
        );
        assert_eq!(
            uninformativeness_report_pairs(&[]),
            Err(ConditionalizationError::EmptyInput)
        );
    }

    #[test]
    fn conditional_table_rejects_bad_rows() {
        let rows = vec![vec![rat(1, 2), rat(1, 2)], vec![rat(3, 2), rat(-1, 2)]];
        assert!(matches!(
            conditional_table(&rows, &[rat(1, 2), rat(1, 2)]),
            Err(ConditionalizationError::InvalidConditional { index: 1, .. })
        ));
        assert!(matches!(
            conditional_table(&rows[..1], &[rat(1, 2), rat(1, 2)]),
            Err(ConditionalizationError::LengthMismatch { .. })
        ));
    }
}
