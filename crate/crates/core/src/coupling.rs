//! Couplings of the eight double-indexed outcomes.
//!
//! A coupling is a distribution over the 256 sign patterns of
//! `(A'11, A'12, A'21, A'22, B'11, B'12, B'21, B'22)` whose marginal on each
//! observed pair `(A'ij, B'ij)` is the scenario's pair distribution. Which
//! couplings exist under extra constraints on the unobservable
//! cross-context pairs is decided exactly with [`crate::lp`].

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::distributions::{Context, Scenario};
use crate::lp::{optimize, solve_feasibility, Direction, LinearProgram, LpError};
use crate::rational::{in_signed_unit_interval, in_unit_interval, int, to_f64, Rational};

pub const NUM_PATTERNS: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CouplingError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("connection target {index} = {value} lies outside [-1, 1]")]
    ConnectionOutOfRange { index: usize, value: String },
    #[error("connection target {index} = {value} is not a finite real; rationalize it first")]
    IrrationalTarget { index: usize, value: f64 },
    #[error("probability {0} lies outside [0, 1]")]
    ProbabilityOutOfRange(Rational),
    #[error("coupling expects {NUM_PATTERNS} cells, got {0}")]
    WrongSize(usize),
    #[error("coupling cell {pattern} has negative mass {mass}")]
    NegativeMass { pattern: Pattern, mass: Rational },
    #[error("coupling masses sum to {0}, not 1")]
    NotNormalized(Rational),
}

/// One of the eight primed outcomes, in pattern bit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    A11,
    A12,
    A21,
    A22,
    B11,
    B12,
    B21,
    B22,
}

impl Variable {
    pub const ALL: [Variable; 8] = [
        Variable::A11,
        Variable::A12,
        Variable::A21,
        Variable::A22,
        Variable::B11,
        Variable::B12,
        Variable::B21,
        Variable::B22,
    ];

    pub fn alice(context: Context) -> Variable {
        Variable::ALL[context.index()]
    }

    pub fn bob(context: Context) -> Variable {
        Variable::ALL[4 + context.index()]
    }

    fn bit(self) -> u8 {
        self as u8
    }
}

/// A sign assignment to all eight variables. Bit `k` set means variable
/// `k` (in [`Variable::ALL`] order) is `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(pub u8);

impl Pattern {
    pub fn all() -> impl Iterator<Item = Pattern> {
        (0..=255u8).map(Pattern)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn value(self, v: Variable) -> i8 {
        if (self.0 >> v.bit()) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn from_values(values: [i8; 8]) -> Pattern {
        Pattern(
            values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v < 0)
                .fold(0u8, |acc, (k, _)| acc | (1 << k)),
        )
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in Variable::ALL {
            f.write_str(if self.value(v) > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pattern must be eight `+`/`-` characters, got `{0}`")]
pub struct ParsePatternError(String);

impl FromStr for Pattern {
    type Err = ParsePatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 8 {
            return Err(ParsePatternError(s.to_string()));
        }
        let mut values = [0i8; 8];
        for (v, b) in values.iter_mut().zip(bytes) {
            *v = match b {
                b'+' => 1,
                b'-' => -1,
                _ => return Err(ParsePatternError(s.to_string())),
            };
        }
        Ok(Pattern::from_values(values))
    }
}

/// The unobservable cross-context pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connection {
    /// `(A'11, A'12)`
    A1,
    /// `(A'21, A'22)`
    A2,
    /// `(B'11, B'21)`
    B1,
    /// `(B'12, B'22)`
    B2,
}

impl Connection {
    pub const ALL: [Connection; 4] = [
        Connection::A1,
        Connection::A2,
        Connection::B1,
        Connection::B2,
    ];

    pub fn variables(self) -> (Variable, Variable) {
        use Variable::*;
        match self {
            Connection::A1 => (A11, A12),
            Connection::A2 => (A21, A22),
            Connection::B1 => (B11, B21),
            Connection::B2 => (B12, B22),
        }
    }

    pub fn name(self) -> &'static str {
        ["A1", "A2", "B1", "B2"][self as usize]
    }

    pub fn from_name(name: &str) -> Option<Connection> {
        Connection::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(name))
    }
}

/// Target expectations `<A'11 A'12>, <A'21 A'22>, <B'11 B'21>, <B'12 B'22>`.
///
/// Targets are exact. When built from doubles, the original values are
/// kept so that predicates on the real vector can be evaluated before
/// rationalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionVector {
    targets: [Rational; 4],
    source: Option<[f64; 4]>,
}

impl ConnectionVector {
    pub fn new(targets: [Rational; 4]) -> Result<Self, CouplingError> {
        for (index, t) in targets.iter().enumerate() {
            if !in_signed_unit_interval(t) {
                return Err(CouplingError::ConnectionOutOfRange {
                    index,
                    value: t.to_string(),
                });
            }
        }
        Ok(ConnectionVector {
            targets,
            source: None,
        })
    }

    /// Rationalizes each component to the best approximation with
    /// denominator at most `max_denominator`.
    pub fn from_f64(values: [f64; 4], max_denominator: u64) -> Result<Self, CouplingError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(CouplingError::IrrationalTarget { index, value });
            }
            if value.abs() > 1.0 {
                return Err(CouplingError::ConnectionOutOfRange {
                    index,
                    value: value.to_string(),
                });
            }
        }
        let targets = values.map(|v| crate::connections::rationalize(v, max_denominator));
        Ok(ConnectionVector {
            targets,
            source: Some(values),
        })
    }

    pub fn identity() -> Self {
        ConnectionVector::new([int(1), int(1), int(1), int(1)]).expect("in range")
    }

    pub fn targets(&self) -> &[Rational; 4] {
        &self.targets
    }

    pub fn target(&self, which: Connection) -> &Rational {
        &self.targets[which as usize]
    }

    /// The pre-rationalization values if any, else the exact targets as
    /// doubles.
    pub fn real_values(&self) -> [f64; 4] {
        self.source
            .unwrap_or_else(|| [0, 1, 2, 3].map(|k| to_f64(&self.targets[k])))
    }

    pub fn source(&self) -> Option<[f64; 4]> {
        self.source
    }
}

/// A joint distribution over all 256 patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    mass: Vec<Rational>,
}

impl Coupling {
    pub fn new(mass: Vec<Rational>) -> Result<Self, CouplingError> {
        if mass.len() != NUM_PATTERNS {
            return Err(CouplingError::WrongSize(mass.len()));
        }
        for p in Pattern::all() {
            if mass[p.index()].is_negative() {
                return Err(CouplingError::NegativeMass {
                    pattern: p,
                    mass: mass[p.index()].clone(),
                });
            }
        }
        let total: Rational = mass.iter().sum();
        if !total.is_one() {
            return Err(CouplingError::NotNormalized(total));
        }
        Ok(Coupling { mass })
    }

    /// Builds a coupling from `(pattern, mass)` entries; missing cells are 0.
    pub fn from_sparse(
        cells: impl IntoIterator<Item = (Pattern, Rational)>,
    ) -> Result<Self, CouplingError> {
        let mut mass = vec![Rational::zero(); NUM_PATTERNS];
        for (p, m) in cells {
            mass[p.index()] += m;
        }
        Coupling::new(mass)
    }

    pub fn mass(&self, p: Pattern) -> &Rational {
        &self.mass[p.index()]
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    /// Nonzero cells in pattern order.
    pub fn support(&self) -> impl Iterator<Item = (Pattern, &Rational)> {
        Pattern::all()
            .map(move |p| (p, &self.mass[p.index()]))
            .filter(|(_, m)| !m.is_zero())
    }

    /// Distribution of `(A'ij, B'ij)` as cells `pp, pm, mp, mm`.
    pub fn pair_marginal(&self, context: Context) -> [Rational; 4] {
        let (a, b) = (Variable::alice(context), Variable::bob(context));
        let mut cells: [Rational; 4] = Default::default();
        for (p, m) in self.support() {
            cells[cell_index(p.value(a), p.value(b))] += m;
        }
        cells
    }

    /// True when every observed pair marginal matches `s` exactly.
    pub fn reproduces(&self, s: &Scenario) -> bool {
        Context::ALL.into_iter().all(|ctx| {
            let got = self.pair_marginal(ctx);
            s.pair(ctx)
                .cells()
                .into_iter()
                .zip(&got)
                .all(|(want, g)| want == g)
        })
    }

    /// `<X Y>` for the connection's two variables.
    pub fn connection_expectation(&self, which: Connection) -> Rational {
        let (x, y) = which.variables();
        self.support().fold(Rational::zero(), |acc, (p, m)| {
            if p.value(x) == p.value(y) {
                acc + m
            } else {
                acc - m
            }
        })
    }

    /// `Pr[X = Y]` for the connection's two variables.
    pub fn agreement(&self, which: Connection) -> Rational {
        let (x, y) = which.variables();
        self.support()
            .filter(|(p, _)| p.value(x) == p.value(y))
            .map(|(_, m)| m.clone())
            .sum()
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

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingVerdict {
    pub feasible: bool,
    /// Present iff `feasible`.
    pub witness: Option<Coupling>,
}

/// Product of the four pair distributions. Always a coupling.
pub fn independent_coupling(s: &Scenario) -> Coupling {
    let mass = Pattern::all()
        .map(|p| {
            Context::ALL.into_iter().fold(Rational::one(), |acc, ctx| {
                let a = p.value(Variable::alice(ctx));
                let b = p.value(Variable::bob(ctx));
                acc * s.pair(ctx).prob(a, b)
            })
        })
        .collect();
    Coupling { mass }
}

fn indicator_row(pred: impl Fn(Pattern) -> bool) -> Vec<Rational> {
    Pattern::all()
        .map(|p| if pred(p) { int(1) } else { int(0) })
        .collect()
}

/// Normalization plus three cell equalities per context. The fourth cell of
/// each context follows from normalization.
fn marginal_program(s: &Scenario) -> LinearProgram {
    let mut lp = LinearProgram::new(NUM_PATTERNS);
    lp.add_equality(indicator_row(|_| true), int(1));
    for ctx in Context::ALL {
        let (a, b) = (Variable::alice(ctx), Variable::bob(ctx));
        let pd = s.pair(ctx);
        for (av, bv) in [(1, 1), (1, -1), (-1, 1)] {
            lp.add_equality(
                indicator_row(|p| p.value(a) == av && p.value(b) == bv),
                pd.prob(av, bv).clone(),
            );
        }
    }
    lp
}

fn add_connection_rows(lp: &mut LinearProgram, conn: &ConnectionVector) {
    for which in Connection::ALL {
        let (x, y) = which.variables();
        let row = Pattern::all()
            .map(|p| int(i64::from(p.value(x) * p.value(y))))
            .collect();
        lp.add_equality(row, conn.target(which).clone());
    }
}

fn verdict(lp: &LinearProgram, s: &Scenario) -> CouplingVerdict {
    let outcome = solve_feasibility(lp).expect("coupling programs are well formed");
    let witness = outcome.witness.map(|mass| Coupling { mass });
    debug_assert!(witness.as_ref().is_none_or(|w| w.reproduces(s)));
    CouplingVerdict {
        feasible: witness.is_some(),
        witness,
    }
}

/// Decides whether a coupling of `s` exists whose connection expectations
/// equal `conn` (when given), and returns one if so.
pub fn coupling_exists(s: &Scenario, conn: Option<&ConnectionVector>) -> CouplingVerdict {
    let mut lp = marginal_program(s);
    if let Some(conn) = conn {
        add_connection_rows(&mut lp, conn);
    }
    verdict(&lp, s)
}

/// Decides whether a coupling exists with `Pr[X = Y] = 1` for every
/// connection, encoded as zero total mass on the disagreeing patterns.
pub fn identity_coupling_exists(s: &Scenario) -> CouplingVerdict {
    let mut lp = marginal_program(s);
    for which in Connection::ALL {
        let (x, y) = which.variables();
        lp.add_equality(indicator_row(|p| p.value(x) != p.value(y)), int(0));
    }
    verdict(&lp, s)
}

/// Attainable `<X Y>` for one connection over all couplings of `s`.
pub fn connection_range(s: &Scenario, which: Connection) -> (Rational, Rational) {
    let mut lp = marginal_program(s);
    let (x, y) = which.variables();
    lp.set_objective(
        Pattern::all()
            .map(|p| int(i64::from(p.value(x) * p.value(y))))
            .collect(),
    );
    let solve = |dir| {
        optimize(&lp, dir)
            .expect("coupling programs are well formed")
            .optimum
            .expect("the independent coupling is feasible and the objective is bounded")
    };
    (solve(Direction::Min), solve(Direction::Max))
}

fn check_probability(p: &Rational) -> Result<(), CouplingError> {
    if in_unit_interval(p) {
        Ok(())
    } else {
        Err(CouplingError::ProbabilityOutOfRange(p.clone()))
    }
}

/// Range of `r = Pr[X' = +1, Y' = +1]` over couplings of two binary
/// variables with `Pr[X = +1] = p` and `Pr[Y = +1] = q`:
/// `max(0, p + q - 1) ..= min(p, q)`.
pub fn pair_coupling_range(
    p: &Rational,
    q: &Rational,
) -> Result<(Rational, Rational), CouplingError> {
    check_probability(p)?;
    check_probability(q)?;
    let lo = (p + q - Rational::one()).max(Rational::zero());
    let hi = p.min(q).clone();
    Ok((lo, hi))
}

/// The same range obtained by optimizing `r` over the 2x2 joint table.
pub fn pair_coupling_range_lp(
    p: &Rational,
    q: &Rational,
) -> Result<(Rational, Rational), CouplingError> {
    check_probability(p)?;
    check_probability(q)?;
    // Cells: (+,+), (+,-), (-,+), (-,-).
    let row = |v: [i64; 4]| v.map(int).to_vec();
    let mut lp = LinearProgram::new(4);
    lp.add_equality(row([1, 1, 1, 1]), int(1));
    lp.add_equality(row([1, 1, 0, 0]), p.clone());
    lp.add_equality(row([1, 0, 1, 0]), q.clone());
    lp.set_objective(row([1, 0, 0, 0]));
    let lo = optimize(&lp, Direction::Min)?;
    let hi = optimize(&lp, Direction::Max)?;
    match (lo.optimum, hi.optimum) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => unreachable!("a 2x2 table with valid margins always exists"),
    }
}
