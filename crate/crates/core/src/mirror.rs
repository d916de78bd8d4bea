//! Bregman geometry: regularizers, divergences and the prox-mapping used by
//! the mirror-descent strategy update.
//!
//! The Euclidean regularizer `h(x) = ½‖x‖²` has a closed-form prox (a clamp
//! onto the box). Any other 1-strongly-convex `h` can be plugged in through
//! [`Regularizer`]; its prox is then solved numerically by projected gradient
//! on the inner problem.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scalar::{dot, Scalar};

/// Axis-aligned box `{x : lower ≤ x ≤ upper}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BoxSet<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> BoxSet<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        if let Some(l) = (0..lower.len()).find(|&l| !(lower[l] < upper[l])) {
            return Err(Error::InvalidParameter(format!(
                "box component {l}: lower {} must be < upper {}",
                lower[l], upper[l]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &up))| v >= lo && v <= up)
    }

    /// Euclidean projection (componentwise clamp).
    pub fn project(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &up))| v.max(lo).min(up))
            .collect()
    }

    pub fn midpoint(&self) -> Vec<T> {
        let half = T::lit(0.5);
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &up)| half * (lo + up))
            .collect()
    }

    /// Largest Euclidean norm of any point in the box (attained at a corner).
    pub fn max_norm(&self) -> T {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &up)| {
                let m = lo.abs().max(up.abs());
                m * m
            })
            .sum::<T>()
            .sqrt()
    }
}

/// A 1-strongly-convex distance-generating function.
pub trait Regularizer<T: Scalar>: Send + Sync {
    fn value(&self, x: &[T]) -> T;

    fn gradient(&self, x: &[T]) -> Vec<T>;

    /// Lipschitz constant of `∇h`; sets the inner step of the numerical prox.
    fn gradient_lipschitz(&self) -> T;

    /// Minimizer of `α⟨direction, x⟩ + D(x_current, x)` over `bx`.
    fn prox(&self, bx: &BoxSet<T>, x_current: &[T], direction: &[T], alpha: T) -> Vec<T> {
        numerical_prox(self, bx, x_current, direction, alpha)
    }
}

/// `h(x) = ½‖x‖²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Euclidean;

impl<T: Scalar> Regularizer<T> for Euclidean {
    fn value(&self, x: &[T]) -> T {
        T::lit(0.5) * dot(x, x)
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        x.to_vec()
    }

    fn gradient_lipschitz(&self) -> T {
        T::one()
    }

    fn prox(&self, bx: &BoxSet<T>, x_current: &[T], direction: &[T], alpha: T) -> Vec<T> {
        x_current
            .iter()
            .zip(direction)
            .zip(bx.lower.iter().zip(&bx.upper))
            .map(|((&x, &g), (&lo, &up))| (x - alpha * g).max(lo).min(up))
            .collect()
    }
}

/// `h(x) = ½ Σ w_l x_l²` with every `w_l ≥ 1`. Uses the numerical prox.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalQuadratic<T> {
    weights: Vec<T>,
}

impl<T: Scalar> DiagonalQuadratic<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= T::one())) {
            return Err(Error::InvalidParameter(
                "diagonal weights must be >= 1 for 1-strong convexity".into(),
            ));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

impl<T: Scalar> Regularizer<T> for DiagonalQuadratic<T> {
    fn value(&self, x: &[T]) -> T {
        T::lit(0.5)
            * x.iter()
                .zip(&self.weights)
                .map(|(&v, &w)| w * v * v)
                .sum::<T>()
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        x.iter().zip(&self.weights).map(|(&v, &w)| w * v).collect()
    }

    fn gradient_lipschitz(&self) -> T {
        self.weights.iter().fold(T::one(), |m, &w| m.max(w))
    }
}

/// `D(x, y) = h(y) − h(x) − ⟨∇h(x), y − x⟩`.
pub fn bregman<T: Scalar, R: Regularizer<T> + ?Sized>(reg: &R, x: &[T], y: &[T]) -> Result<T> {
    check_len(x.len(), y.len())?;
    let grad = reg.gradient(x);
    let lin: T = grad
        .iter()
        .zip(y.iter().zip(x))
        .map(|(&g, (&yv, &xv))| g * (yv - xv))
        .sum();
    Ok(reg.value(y) - reg.value(x) - lin)
}

/// One mirror step: `argmin_{x ∈ box} α⟨direction, x⟩ + D(x_current, x)`.
pub fn prox_step<T: Scalar, R: Regularizer<T> + ?Sized>(
    reg: &R,
    bx: &BoxSet<T>,
    x_current: &[T],
    direction: &[T],
    alpha: T,
) -> Result<Vec<T>> {
    check_len(bx.dim(), x_current.len())?;
    check_len(bx.dim(), direction.len())?;
    if !(alpha >= T::zero()) {
        return Err(Error::InvalidArgument(format!("step size {alpha} must be >= 0")));
    }
    Ok(reg.prox(bx, x_current, direction, alpha))
}

/// Violation of the first-order optimality condition of the prox problem:
/// `max(0, −min_{x ∈ box} ⟨α·direction + ∇h(result) − ∇h(x_current), x − result⟩)`.
///
/// The inner minimum of a linear function over a box is attained at a corner
/// picked componentwise by sign, so the value is exact.
pub fn check_optimality<T: Scalar, R: Regularizer<T> + ?Sized>(
    reg: &R,
    bx: &BoxSet<T>,
    result: &[T],
    x_current: &[T],
    direction: &[T],
    alpha: T,
) -> Result<T> {
    check_len(bx.dim(), result.len())?;
    check_len(bx.dim(), x_current.len())?;
    check_len(bx.dim(), direction.len())?;
    let gr = reg.gradient(result);
    let gc = reg.gradient(x_current);
    let mut min_val = T::zero();
    for l in 0..bx.dim() {
        let s = alpha * direction[l] + gr[l] - gc[l];
        let lo = s * (bx.lower[l] - result[l]);
        let up = s * (bx.upper[l] - result[l]);
        min_val = min_val + lo.min(up);
    }
    Ok((-min_val).max(T::zero()))
}

const INNER_MAX_ITERS: usize = 1_000_000;

fn numerical_prox<T: Scalar, R: Regularizer<T> + ?Sized>(
    reg: &R,
    bx: &BoxSet<T>,
    x_current: &[T],
    direction: &[T],
    alpha: T,
) -> Vec<T> {
    let step = T::one() / reg.gradient_lipschitz();
    let anchor = reg.gradient(x_current);
    let mut x = bx.project(x_current);
    for _ in 0..INNER_MAX_ITERS {
        let gh = reg.gradient(&x);
        let grad: Vec<T> = (0..x.len())
            .map(|l| alpha * direction[l] + gh[l] - anchor[l])
            .collect();
        let trial: Vec<T> = x.iter().zip(&grad).map(|(&v, &g)| v - step * g).collect();
        let next = bx.project(&trial);
        let moved = next
            .iter()
            .zip(&x)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        x = next;
        if moved <= T::CHECK_TOL * step {
            break;
        }
    }
    x
}
