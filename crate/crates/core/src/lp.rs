//! Exact-rational linear feasibility and optimization.
//!
//! Programs are in standard equality form: `A x = b`, `x >= 0`, with an
//! optional linear objective. The solver is a two-phase revised simplex
//! with a dense basis inverse and Bland's rule, so it always terminates
//! and, for a fixed input, always returns the same witness.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("a linear program needs at least one variable")]
    NoVariables,
    #[error("row {row} has {found} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("objective has {found} coefficients, expected {expected}")]
    ObjectiveLength { expected: usize, found: usize },
    #[error("optimize called on a program without an objective")]
    MissingObjective,
}

/// One row `coefficients · x = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equality {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub equalities: Vec<Equality>,
    pub objective: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Present iff `status == Feasible`.
    pub witness: Option<Vec<Rational>>,
    /// Present iff an objective was optimized and the optimum is finite.
    pub optimum: Option<Rational>,
}

impl LpOutcome {
    fn infeasible() -> Self {
        LpOutcome {
            status: LpStatus::Infeasible,
            witness: None,
            optimum: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == LpStatus::Feasible
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            equalities: Vec::new(),
            objective: None,
        }
    }

    pub fn add_equality(&mut self, coefficients: Vec<Rational>, rhs: Rational) -> &mut Self {
        self.equalities.push(Equality { coefficients, rhs });
        self
    }

    pub fn set_objective(&mut self, coefficients: Vec<Rational>) -> &mut Self {
        self.objective = Some(coefficients);
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.num_vars == 0 {
            return Err(LpError::NoVariables);
        }
        for (row, eq) in self.equalities.iter().enumerate() {
            if eq.coefficients.len() != self.num_vars {
                return Err(LpError::RowLength {
                    row,
                    expected: self.num_vars,
                    found: eq.coefficients.len(),
                });
            }
        }
        if let Some(obj) = &self.objective {
            if obj.len() != self.num_vars {
                return Err(LpError::ObjectiveLength {
                    expected: self.num_vars,
                    found: obj.len(),
                });
            }
        }
        Ok(())
    }

    /// True when `x` is nonnegative and satisfies every row exactly.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self
                .equalities
                .iter()
                .all(|eq| dot(&eq.coefficients, x) == eq.rhs)
    }

    pub fn objective_value(&self, x: &[Rational]) -> Option<Rational> {
        self.objective.as_ref().map(|c| dot(c, x))
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !Zero::is_zero(*x) && !Zero::is_zero(*y))
        .fold(<Rational as Zero>::zero(), |acc, (x, y)| acc + x * y)
}

/// Decides whether `{x >= 0 : A x = b}` is nonempty. The objective, if
/// any, is ignored.
pub fn solve_feasibility(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    Ok(with_fallback(
        || feasibility_in::<Small>(lp),
        || feasibility_in::<Rational>(lp),
    ))
}

/// Minimizes or maximizes the objective over `{x >= 0 : A x = b}`.
pub fn optimize(lp: &LinearProgram, direction: Direction) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let objective = lp.objective.as_ref().ok_or(LpError::MissingObjective)?;
    let costs: Vec<Rational> = match direction {
        Direction::Min => objective.clone(),
        Direction::Max => objective.iter().map(|c| -c).collect(),
    };
    let mut outcome = with_fallback(
        || optimize_in::<Small>(lp, &costs),
        || optimize_in::<Rational>(lp, &costs),
    );
    if let Some(w) = &outcome.witness {
        outcome.optimum = Some(dot(objective, w));
    }
    Ok(outcome)
}

/// Runs the simplex on machine integers and repeats on big rationals if any
/// intermediate value overflowed. Both runs take the same pivots, so the
/// answer does not depend on which one finished.
fn with_fallback(
    small: impl FnOnce() -> Result<LpOutcome, Overflow>,
    big: impl FnOnce() -> Result<LpOutcome, Overflow>,
) -> LpOutcome {
    small()
        .or_else(|_| big())
        .expect("big rationals never overflow")
}

fn feasibility_in<T: Scalar>(lp: &LinearProgram) -> Result<LpOutcome, Overflow> {
    let Some(simplex) = Simplex::<T>::phase_one(lp)? else {
        return Ok(LpOutcome::infeasible());
    };
    Ok(LpOutcome {
        status: LpStatus::Feasible,
        witness: Some(simplex.solution()),
        optimum: None,
    })
}

fn optimize_in<T: Scalar>(lp: &LinearProgram, costs: &[Rational]) -> Result<LpOutcome, Overflow> {
    let Some(mut simplex) = Simplex::<T>::phase_one(lp)? else {
        return Ok(LpOutcome::infeasible());
    };
    let costs = costs
        .iter()
        .map(T::from_rational)
        .collect::<Result<Vec<_>, _>>()?;
    simplex.install_objective(&costs);
    if !simplex.run()? {
        return Ok(LpOutcome {
            status: LpStatus::Unbounded,
            witness: None,
            optimum: None,
        });
    }
    Ok(LpOutcome {
        status: LpStatus::Feasible,
        witness: Some(simplex.solution()),
        optimum: None,
    })
}

#[derive(Debug)]
struct Overflow;

type Small = num_rational::Ratio<i128>;

/// Exact field arithmetic that may refuse to represent a result.
trait Scalar: Clone + Ord + Sized {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(x: &Rational) -> Result<Self, Overflow>;
    fn to_rational(&self) -> Rational;
    fn is_zero(&self) -> bool;
    fn sign(&self) -> std::cmp::Ordering;
    fn add(&self, other: &Self) -> Result<Self, Overflow>;
    fn sub(&self, other: &Self) -> Result<Self, Overflow>;
    fn mul(&self, other: &Self) -> Result<Self, Overflow>;
    fn div(&self, other: &Self) -> Result<Self, Overflow>;

    fn neg(&self) -> Result<Self, Overflow> {
        Self::zero().sub(self)
    }

    /// Least common multiple of the denominators of `xs`, as a value.
    fn denominator_lcm(xs: &[Self]) -> Result<Self, Overflow>;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_rational(x: &Rational) -> Result<Self, Overflow> {
        Ok(x.clone())
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sign(&self) -> std::cmp::Ordering {
        self.numer().sign().cmp(&num_bigint::Sign::NoSign)
    }
    fn add(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self + other)
    }
    fn sub(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self - other)
    }
    fn mul(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self * other)
    }
    fn div(&self, other: &Self) -> Result<Self, Overflow> {
        Ok(self / other)
    }
    fn denominator_lcm(xs: &[Self]) -> Result<Self, Overflow> {
        let l = xs
            .iter()
            .fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        Ok(Rational::from_integer(l))
    }
}

impl Scalar for Small {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_rational(x: &Rational) -> Result<Self, Overflow> {
        use num_traits::ToPrimitive;
        match (x.numer().to_i128(), x.denom().to_i128()) {
            (Some(n), Some(d)) => Ok(Small::new_raw(n, d)),
            _ => Err(Overflow),
        }
    }
    fn to_rational(&self) -> Rational {
        Rational::new((*self.numer()).into(), (*self.denom()).into())
    }
    fn is_zero(&self) -> bool {
        *self.numer() == 0
    }
    fn sign(&self) -> std::cmp::Ordering {
        self.numer().cmp(&0)
    }
    // Entries are mostly integers or share a denominator, so those
    // cases skip the gcd.
    fn add(&self, other: &Self) -> Result<Self, Overflow> {
        if self.denom() == other.denom() {
            let n = self.numer().checked_add(*other.numer()).ok_or(Overflow)?;
            return Ok(same_denominator(n, *self.denom()));
        }
        num_traits::CheckedAdd::checked_add(self, other).ok_or(Overflow)
    }
    fn sub(&self, other: &Self) -> Result<Self, Overflow> {
        if self.denom() == other.denom() {
            let n = self.numer().checked_sub(*other.numer()).ok_or(Overflow)?;
            return Ok(same_denominator(n, *self.denom()));
        }
        num_traits::CheckedSub::checked_sub(self, other).ok_or(Overflow)
    }
    fn mul(&self, other: &Self) -> Result<Self, Overflow> {
        match (*self.denom(), *other.denom()) {
            (1, 1) => {
                let n = self.numer().checked_mul(*other.numer()).ok_or(Overflow)?;
                return Ok(Small::new_raw(n, 1));
            }
            (1, _) => return scale(*self.numer(), other),
            (_, 1) => return scale(*other.numer(), self),
            _ => {}
        }
        num_traits::CheckedMul::checked_mul(self, other).ok_or(Overflow)
    }
    fn div(&self, other: &Self) -> Result<Self, Overflow> {
        match (*other.numer(), *other.denom()) {
            (1, 1) => Ok(*self),
            (-1, 1) => Scalar::neg(self),
            _ => num_traits::CheckedDiv::checked_div(self, other).ok_or(Overflow),
        }
    }
    fn denominator_lcm(xs: &[Self]) -> Result<Self, Overflow> {
        let mut l: i128 = 1;
        for x in xs {
            let d = *x.denom();
            if d != 1 && l % d != 0 {
                l = (l / l.gcd(&d)).checked_mul(d).ok_or(Overflow)?;
            }
        }
        Ok(Small::new_raw(l, 1))
    }
    fn neg(&self) -> Result<Self, Overflow> {
        self.numer()
            .checked_neg()
            .map(|n| Small::new_raw(n, *self.denom()))
            .ok_or(Overflow)
    }
}

/// `k * x` with one gcd instead of two.
fn scale(k: i128, x: &Small) -> Result<Small, Overflow> {
    let g = k.gcd(x.denom());
    if g == 0 {
        return Ok(Small::new_raw(0, 1));
    }
    let n = (k / g).checked_mul(*x.numer()).ok_or(Overflow)?;
    Ok(Small::new_raw(n, x.denom() / g))
}

fn same_denominator(n: i128, d: i128) -> Small {
    if d == 1 {
        Small::new_raw(n, 1)
    } else {
        Small::new(n, d)
    }
}

fn is_negative<T: Scalar>(x: &T) -> bool {
    x.sign() == std::cmp::Ordering::Less
}

fn is_positive<T: Scalar>(x: &T) -> bool {
    x.sign() == std::cmp::Ordering::Greater
}

/// `target -= factor * x`.
fn sub_scaled<T: Scalar>(target: &mut T, factor: &T, x: &T) -> Result<(), Overflow> {
    *target = target.sub(&factor.mul(x)?)?;
    Ok(())
}

/// A constraint coefficient; coupling programs are almost all `+-1`.
#[derive(Clone)]
enum Entry<T> {
    PlusOne,
    MinusOne,
    Other(T),
}

impl<T: Scalar> Entry<T> {
    fn new(a: T) -> Self {
        let one = T::one();
        if a == one {
            Entry::PlusOne
        } else if one.neg().is_ok_and(|m| a == m) {
            Entry::MinusOne
        } else {
            Entry::Other(a)
        }
    }
}

/// Revised simplex over the structural columns plus one artificial column
/// per row, keeping the basis inverse densely. Entering columns are priced
/// in index order, so the first negative reduced cost is Bland's choice and
/// later columns need not be priced. Artificial columns never re-enter
/// once they leave.
struct Simplex<T> {
    num_structural: usize,
    /// Nonzero entries of each structural column.
    columns: Vec<Vec<(usize, Entry<T>)>>,
    binv: Vec<Vec<T>>,
    /// Values of the basic variables.
    values: Vec<T>,
    basis: Vec<usize>,
    /// Cost of every column; artificials cost 1 in phase one and 0 after.
    cost: Vec<T>,
}

impl<T: Scalar> Simplex<T> {
    /// Runs phase one. `None` means the program is infeasible; otherwise the
    /// basis is feasible and every artificial left in it sits on a row
    /// that depends linearly on the others.
    fn phase_one(lp: &LinearProgram) -> Result<Option<Self>, Overflow> {
        let n = lp.num_vars;
        let m = lp.equalities.len();
        let mut columns: Vec<Vec<(usize, Entry<T>)>> = vec![Vec::new(); n];
        let mut values = Vec::with_capacity(m);
        for (i, eq) in lp.equalities.iter().enumerate() {
            let flip = eq.rhs.is_negative();
            for (j, a) in eq.coefficients.iter().enumerate() {
                if !Zero::is_zero(a) {
                    let a = T::from_rational(a)?;
                    columns[j].push((i, Entry::new(if flip { a.neg()? } else { a })));
                }
            }
            let b = T::from_rational(&eq.rhs)?;
            values.push(if flip { b.neg()? } else { b });
        }
        let binv = (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| if i == k { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
        let mut cost = vec![T::zero(); n];
        cost.resize(n + m, T::one());
        let mut simplex = Simplex {
            num_structural: n,
            columns,
            binv,
            values,
            basis: (n..n + m).collect(),
            cost,
        };
        // Phase one is bounded below by zero.
        let bounded = simplex.run()?;
        debug_assert!(bounded);
        if simplex.objective()?.sign() != std::cmp::Ordering::Equal {
            return Ok(None);
        }
        simplex.expel_artificials()?;
        for c in &mut simplex.cost[n..] {
            *c = T::zero();
        }
        Ok(Some(simplex))
    }

    fn objective(&self) -> Result<T, Overflow> {
        let mut total = T::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if !self.cost[b].is_zero() {
                total = total.add(&self.cost[b].mul(&self.values[r])?)?;
            }
        }
        Ok(total)
    }

    /// `sum_i w_i a_ij` over the nonzeros of column `j`.
    fn column_dot(&self, w: &[T], j: usize) -> Result<T, Overflow> {
        let mut total = T::zero();
        for (i, a) in &self.columns[j] {
            let x = &w[*i];
            if x.is_zero() {
                continue;
            }
            total = match a {
                Entry::PlusOne => total.add(x)?,
                Entry::MinusOne => total.sub(x)?,
                Entry::Other(a) => total.add(&x.mul(a)?)?,
            };
        }
        Ok(total)
    }

    /// `B^-1 A_j`.
    fn ftran(&self, j: usize) -> Result<Vec<T>, Overflow> {
        self.binv
            .iter()
            .map(|row| self.column_dot(row, j))
            .collect()
    }

    /// Pivots zero-level artificials out of the basis where some structural
    /// column allows it. An artificial that cannot leave marks a redundant
    /// row; it stays basic at zero because that row of `B^-1 A` is zero.
    fn expel_artificials(&mut self) -> Result<(), Overflow> {
        let n = self.num_structural;
        for r in 0..self.basis.len() {
            if self.basis[r] < n {
                continue;
            }
            let mut entering = None;
            for j in 0..n {
                if !self.column_dot(&self.binv[r], j)?.is_zero() {
                    entering = Some(j);
                    break;
                }
            }
            if let Some(j) = entering {
                let alpha = self.ftran(j)?;
                self.pivot(r, j, &alpha)?;
            }
        }
        Ok(())
    }

    fn install_objective(&mut self, costs: &[T]) {
        self.cost[..self.num_structural].clone_from_slice(costs);
    }

    /// Bland's-rule iterations until optimal (`true`) or unbounded (`false`).
    fn run(&mut self) -> Result<bool, Overflow> {
        let m = self.basis.len();
        loop {
            // Simplex multipliers y = c_B B^-1.
            let mut y = vec![T::zero(); m];
            for (r, &b) in self.basis.iter().enumerate() {
                let cb = &self.cost[b];
                if cb.is_zero() {
                    continue;
                }
                for (yk, binv) in y.iter_mut().zip(&self.binv[r]) {
                    if !binv.is_zero() {
                        *yk = yk.add(&cb.mul(binv)?)?;
                    }
                }
            }
            // Pricing runs on the integers y * l, which skips most gcds.
            let l = T::denominator_lcm(&y)?;
            let y = y.iter().map(|v| v.mul(&l)).collect::<Result<Vec<_>, _>>()?;
            let mut entering = None;
            for j in 0..self.num_structural {
                let scaled_cost = if self.cost[j].is_zero() {
                    T::zero()
                } else {
                    self.cost[j].mul(&l)?
                };
                let reduced = scaled_cost.sub(&self.column_dot(&y, j)?)?;
                if is_negative(&reduced) {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(true);
            };
            let alpha = self.ftran(col)?;
            let mut leave: Option<(usize, T)> = None;
            for (r, a) in alpha.iter().enumerate() {
                if !is_positive(a) {
                    continue;
                }
                let ratio = self.values[r].div(a)?;
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[r] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col, &alpha)?,
                None => return Ok(false),
            }
        }
    }

    fn pivot(&mut self, r: usize, col: usize, alpha: &[T]) -> Result<(), Overflow> {
        let pivot = &alpha[r];
        let mut prow = std::mem::take(&mut self.binv[r]);
        for x in prow.iter_mut().filter(|x| !x.is_zero()) {
            *x = x.div(pivot)?;
        }
        let pvalue = self.values[r].div(pivot)?;
        for (i, factor) in alpha.iter().enumerate() {
            if i == r || factor.is_zero() {
                continue;
            }
            for (x, p) in self.binv[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    sub_scaled(x, factor, p)?;
                }
            }
            sub_scaled(&mut self.values[i], factor, &pvalue)?;
        }
        self.binv[r] = prow;
        self.values[r] = pvalue;
        self.basis[r] = col;
        Ok(())
    }

    fn solution(&self) -> Vec<Rational> {
        let mut x = vec![<Rational as Zero>::zero(); self.num_structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.num_structural {
                x[b] = self.values[r].to_rational();
            }
        }
        x
    }
}
