//! Singlet correlations from measurement directions.

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::inequalities::{quantum_arcsin_with, CorrelationVector, DEFAULT_TOLERANCE};

/// Allowed deviation of `|v|` from 1.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SettingError {
    #[error("setting ({x}, {y}, {z}) has length {norm}, not 1")]
    NotUnit { x: f64, y: f64, z: f64, norm: f64 },
}

/// A measurement direction in real 3-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettingVector {
    x: f64,
    y: f64,
    z: f64,
}

impl SettingVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, SettingError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(SettingError::NotUnit { x, y, z, norm });
        }
        Ok(SettingVector { x, y, z })
    }

    /// Uniform direction: a normalized standard Gaussian triple.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm > 1e-6 {
                return SettingVector {
                    x: v[0] / norm,
                    y: v[1] / norm,
                    z: v[2] / norm,
                };
            }
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &SettingVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// `<A_ij B_ij> = -(alpha_i . beta_j)` for each context.
pub fn singlet_correlations(
    a1: &SettingVector,
    a2: &SettingVector,
    b1: &SettingVector,
    b2: &SettingVector,
) -> CorrelationVector {
    let values = [-a1.dot(b1), -a1.dot(b2), -a2.dot(b1), -a2.dot(b2)];
    // Unit vectors within 1e-9 keep |dot| within a few 1e-9 of 1.
    CorrelationVector::from_f64(values, 1e-8).expect("dot products of unit vectors")
}

/// Whether `c` satisfies the arcsin inequalities, which characterize the
/// correlation vectors of the form above.
pub fn realizability_check(c: &CorrelationVector) -> bool {
    realizability_check_with(c, DEFAULT_TOLERANCE)
}

pub fn realizability_check_with(c: &CorrelationVector, tolerance: f64) -> bool {
    quantum_arcsin_with(c, tolerance).satisfied
}
