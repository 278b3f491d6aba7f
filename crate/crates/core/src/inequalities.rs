//! The three nested constraint families on correlation vectors: Bell-CH-Fine
//! (bound 2), the arcsin characterization of singlet correlations (bound
//! `pi`), and Tsirelson (bound `2 sqrt 2`).
//!
//! Each family is four inequalities `|e11 + e12 + e21 + e22 - 2 e_k| <= bound`
//! (one minus sign, rotating through the positions), so every report keeps
//! only the largest left-hand side.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_traits::Signed;
use thiserror::Error;

use crate::rational::{from_f64_exact, in_signed_unit_interval, int, to_f64, Rational};

/// Slack for comparisons involving `arcsin` or `sqrt 2`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub const BELL_BOUND: f64 = 2.0;
pub const QUANTUM_BOUND: f64 = PI;
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("correlation component {index} = {value} is not finite")]
    NotFinite { index: usize, value: f64 },
    #[error("correlation component {index} = {value} lies outside [-1, 1]")]
    OutOfRange { index: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Bell,
    Quantum,
    Tsirelson,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Bell, Family::Quantum, Family::Tsirelson];

    pub fn bound(self) -> f64 {
        match self {
            Family::Bell => BELL_BOUND,
            Family::Quantum => QUANTUM_BOUND,
            Family::Tsirelson => TSIRELSON_BOUND,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Bell => "bell",
            Family::Quantum => "quantum",
            Family::Tsirelson => "tsirelson",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expectations `<A_ij B_ij>` in context order 11, 12, 21, 22.
///
/// Built either from exact rationals (Bell comparisons are then exact) or
/// from doubles such as singlet correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationVector {
    values: [f64; 4],
    exact: Option<[Rational; 4]>,
}

impl CorrelationVector {
    pub fn from_rationals(exact: [Rational; 4]) -> Result<Self, CorrelationError> {
        for (index, e) in exact.iter().enumerate() {
            if !in_signed_unit_interval(e) {
                return Err(CorrelationError::OutOfRange {
                    index,
                    value: to_f64(e),
                });
            }
        }
        let values = [0, 1, 2, 3].map(|k| to_f64(&exact[k]));
        Ok(CorrelationVector {
            values,
            exact: Some(exact),
        })
    }

    /// Components may overshoot `[-1, 1]` by at most `tolerance` (float
    /// noise from upstream arithmetic) and are clamped back into range.
    pub fn from_f64(values: [f64; 4], tolerance: f64) -> Result<Self, CorrelationError> {
        let mut clamped = values;
        for (index, v) in clamped.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(CorrelationError::NotFinite { index, value: *v });
            }
            if v.abs() > 1.0 + tolerance {
                return Err(CorrelationError::OutOfRange { index, value: *v });
            }
            *v = v.clamp(-1.0, 1.0);
        }
        Ok(CorrelationVector {
            values: clamped,
            exact: None,
        })
    }

    pub fn values(&self) -> [f64; 4] {
        self.values
    }

    pub fn exact(&self) -> Option<&[Rational; 4]> {
        self.exact.as_ref()
    }

    /// Exact components, falling back to the exact value of each double.
    pub fn to_rationals(&self) -> [Rational; 4] {
        match &self.exact {
            Some(e) => e.clone(),
            None => self
                .values
                .map(|v| from_f64_exact(v).expect("components are finite")),
        }
    }

    pub fn negated(&self) -> Self {
        CorrelationVector {
            values: self.values.map(|v| -v),
            exact: self.exact.clone().map(|e| e.map(|x| -x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub family: Family,
    pub satisfied: bool,
    pub max_lhs: f64,
    pub bound: f64,
    pub tight: bool,
    /// Exact left-hand side, for the Bell family on rational input.
    pub exact_max_lhs: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Classification {
    pub bell: bool,
    pub quantum: bool,
    pub tsirelson: bool,
}

impl Classification {
    pub fn satisfies(&self, family: Family) -> bool {
        match family {
            Family::Bell => self.bell,
            Family::Quantum => self.quantum,
            Family::Tsirelson => self.tsirelson,
        }
    }
}

/// `max_k |x1 + x2 + x3 + x4 - 2 x_k|`.
fn max_single_minus(x: [f64; 4]) -> f64 {
    let total: f64 = x.iter().sum();
    x.iter()
        .map(|xk| (total - 2.0 * xk).abs())
        .fold(0.0, f64::max)
}

fn max_single_minus_exact(x: &[Rational; 4]) -> Rational {
    let total: Rational = x.iter().sum();
    x.iter()
        .map(|xk| (&total - xk * int(2)).abs())
        .max()
        .expect("four terms")
}

fn float_report(family: Family, max_lhs: f64, tolerance: f64) -> FamilyReport {
    let bound = family.bound();
    FamilyReport {
        family,
        satisfied: max_lhs <= bound + tolerance,
        max_lhs,
        bound,
        tight: (max_lhs - bound).abs() <= tolerance,
        exact_max_lhs: None,
    }
}

pub fn bell_ch_fine(c: &CorrelationVector) -> FamilyReport {
    bell_ch_fine_with(c, DEFAULT_TOLERANCE)
}

/// Exact when `c` carries rationals; `tolerance` only applies to float input.
pub fn bell_ch_fine_with(c: &CorrelationVector, tolerance: f64) -> FamilyReport {
    match c.exact() {
        Some(exact) => {
            let lhs = max_single_minus_exact(exact);
            let two = int(2);
            FamilyReport {
                family: Family::Bell,
                satisfied: lhs <= two,
                max_lhs: to_f64(&lhs),
                bound: BELL_BOUND,
                tight: lhs == two,
                exact_max_lhs: Some(lhs),
            }
        }
        None => float_report(Family::Bell, max_single_minus(c.values()), tolerance),
    }
}

pub fn tsirelson(c: &CorrelationVector) -> FamilyReport {
    tsirelson_with(c, DEFAULT_TOLERANCE)
}

pub fn tsirelson_with(c: &CorrelationVector, tolerance: f64) -> FamilyReport {
    float_report(Family::Tsirelson, max_single_minus(c.values()), tolerance)
}

pub fn quantum_arcsin(c: &CorrelationVector) -> FamilyReport {
    quantum_arcsin_with(c, DEFAULT_TOLERANCE)
}

pub fn quantum_arcsin_with(c: &CorrelationVector, tolerance: f64) -> FamilyReport {
    let angles = c.values().map(f64::asin);
    float_report(Family::Quantum, max_single_minus(angles), tolerance)
}

pub fn report(c: &CorrelationVector, family: Family, tolerance: f64) -> FamilyReport {
    match family {
        Family::Bell => bell_ch_fine_with(c, tolerance),
        Family::Quantum => quantum_arcsin_with(c, tolerance),
        Family::Tsirelson => tsirelson_with(c, tolerance),
    }
}

pub fn classify(c: &CorrelationVector) -> Classification {
    classify_with(c, DEFAULT_TOLERANCE)
}

pub fn classify_with(c: &CorrelationVector, tolerance: f64) -> Classification {
    Classification {
        bell: bell_ch_fine_with(c, tolerance).satisfied,
        quantum: quantum_arcsin_with(c, tolerance).satisfied,
        tsirelson: tsirelson_with(c, tolerance).satisfied,
    }
}
