//! Diminishing step sizes for operator extrapolation.
//!
//! With `c₀ = 4L/μ`:
//! `α_k = 1/(μ(k+c₀−1))`, `θ_k = (k+c₀+1)(k+c₀)` and
//! `λ_k = θ_{k−1}α_{k−1}/(θ_kα_k) = (k+c₀−1)²/((k+c₀+1)(k+c₀−2))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameConstants;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Schedule<T> {
    pub c0: T,
    pub mu: T,
    pub lip: T,
}

impl<T: Scalar> Schedule<T> {
    pub fn new(mu: T, lip: T) -> Result<Self> {
        if !(mu > T::zero()) {
            return Err(Error::InvalidParameter(format!("strong monotonicity modulus {mu} must be > 0")));
        }
        if !(lip >= mu) {
            return Err(Error::InvalidParameter(format!("Lipschitz constant {lip} must be >= mu {mu}")));
        }
        Ok(Self {
            c0: T::lit(4.0) * lip / mu,
            mu,
            lip,
        })
    }

    pub fn from_constants(constants: &GameConstants<T>) -> Result<Self> {
        Self::new(constants.mu, constants.lip)
    }

    fn shifted(&self, k: u64) -> T {
        T::lit(k as f64) + self.c0
    }

    pub fn alpha(&self, k: u64) -> T {
        T::one() / (self.mu * (self.shifted(k) - T::one()))
    }

    pub fn weight_theta(&self, k: u64) -> T {
        let s = self.shifted(k);
        (s + T::one()) * s
    }

    pub fn lambda(&self, k: u64) -> T {
        let s = self.shifted(k);
        let a = s - T::one();
        a * a / ((s + T::one()) * (s - T::lit(2.0)))
    }
}

/// Step policy shared by all three methods.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepRule<T> {
    Decaying(Schedule<T>),
    /// Constant `α`; extrapolation weight `λ = 1`.
    Constant(T),
}

impl<T: Scalar> StepRule<T> {
    pub fn alpha(&self, k: u64) -> T {
        match self {
            StepRule::Decaying(s) => s.alpha(k),
            StepRule::Constant(a) => *a,
        }
    }

    pub fn lambda(&self, k: u64) -> T {
        match self {
            StepRule::Decaying(s) => s.lambda(k),
            StepRule::Constant(_) => T::one(),
        }
    }
}
