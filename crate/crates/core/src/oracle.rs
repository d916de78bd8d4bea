//! Ground-truth equilibria and the theoretical constants used to audit runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algorithms::Schedule;
use crate::error::{Error, Result};
use crate::game::{pseudo_gradient, AggregativeGame, GameConstants, Profile};
use crate::network::MixingConstants;
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ViSolution<T> {
    pub x_star: Profile<T>,
    /// Natural-map residual at `x_star`.
    pub residual: T,
    pub iterations_used: usize,
}

/// `‖x − Π_X(x − φ(x))‖`.
pub fn natural_residual<T: Scalar, G: AggregativeGame<T> + ?Sized>(game: &G, x: &[Vec<T>]) -> Result<T> {
    let phi = pseudo_gradient(game, x)?;
    let mut sq = T::zero();
    for (i, (xi, gi)) in x.iter().zip(&phi).enumerate() {
        let trial: Vec<T> = xi.iter().zip(gi).map(|(&a, &b)| a - b).collect();
        let p = game.strategy_set(i).project(&trial);
        sq = sq + xi.iter().zip(&p).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>();
    }
    Ok(sq.sqrt())
}

/// Projected gradient `x ← Π_X(x − φ(x)/L)` from the box midpoints until the
/// natural residual drops to `tol`.
pub fn solve_ne<T: Scalar, G: AggregativeGame<T> + ?Sized>(game: &G, lip: T, tol: T) -> Result<ViSolution<T>> {
    solve_ne_capped(game, lip, tol, MAX_ITERATIONS)
}

pub fn solve_ne_capped<T: Scalar, G: AggregativeGame<T> + ?Sized>(
    game: &G,
    lip: T,
    tol: T,
    max_iterations: usize,
) -> Result<ViSolution<T>> {
    if !(lip > T::zero()) {
        return Err(Error::InvalidParameter(format!("Lipschitz constant {lip} must be > 0")));
    }
    let step = T::one() / lip;
    let mut x: Profile<T> = (0..game.n_players())
        .map(|i| game.strategy_set(i).midpoint())
        .collect();
    let mut residual = natural_residual(game, &x)?;
    let mut iterations = 0;
    while residual > tol {
        if iterations >= max_iterations {
            return Err(Error::OracleFailed {
                iterations,
                residual: residual.to_f64_lossy(),
            });
        }
        let phi = pseudo_gradient(game, &x)?;
        x = x
            .iter()
            .zip(&phi)
            .enumerate()
            .map(|(i, (xi, gi))| {
                let trial: Vec<T> = xi.iter().zip(gi).map(|(&a, &b)| a - step * b).collect();
                game.strategy_set(i).project(&trial)
            })
            .collect();
        iterations += 1;
        residual = natural_residual(game, &x)?;
    }
    Ok(ViSolution {
        x_star: x,
        residual,
        iterations_used: iterations,
    })
}

/// Constants entering the rate and consensus bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BoundConstants<T> {
    /// `C̃ = θM_H + 2θ Σ M_j / (1−β)`.
    pub c_tilde: T,
    /// `C_i = N C̃ L_{f_i} + max ‖φ_i‖`.
    pub c_i: Vec<T>,
    /// `c_e = 4N C̃ Σ L_{f_i} M_i`.
    pub c_e: T,
    pub c_1: T,
    pub c_2: T,
    pub mixing: MixingConstants<T>,
}

const MIN_SPECTRAL_GAP: f64 = 1e-9;

pub fn bound_constants<T: Scalar>(
    game: &GameConstants<T>,
    mixing: &MixingConstants<T>,
    n: usize,
) -> Result<BoundConstants<T>> {
    let theta = mixing.theta_mix;
    let beta = mixing.beta_mix;
    let gap = T::one() - beta;
    if !(gap >= T::lit(MIN_SPECTRAL_GAP)) {
        return Err(Error::InvalidParameter(format!(
            "mixing rate beta = {beta} too close to 1 for finite bound constants"
        )));
    }
    let nn = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    let sum_m: T = game.m_i.iter().copied().sum();
    let c_tilde = theta * game.m_h + two * theta * sum_m / gap;
    let c_i: Vec<T> = game
        .lip_f
        .iter()
        .zip(&game.phi_max)
        .map(|(&lf, &pm)| nn * c_tilde * lf + pm)
        .collect();
    let sum_lm: T = game.lip_f.iter().zip(&game.m_i).map(|(&l, &m)| l * m).sum();
    let c_e = T::lit(4.0) * nn * c_tilde * sum_lm;
    let c0 = T::lit(4.0) * game.lip / game.mu;
    let c_1 = two * theta * game.m_h * nn * (T::one() + beta) * game.mu * beta
        * ((c0 - T::one()) / gap + T::one() / (gap * gap))
        * sum_lm;
    let sum_c_nu: T = c_i.iter().zip(&game.nu_i).map(|(&c, &v)| c + v).sum();
    let c_2 = T::lit(8.0) * theta * nn * (T::lit(3.0) - beta) * sum_c_nu / (gap * gap) * sum_lm;
    Ok(BoundConstants {
        c_tilde,
        c_i,
        c_e,
        c_1,
        c_2,
        mixing: *mixing,
    })
}

/// Right-hand side of the `O(1/t)` mean-Bregman-distance guarantee after `t`
/// iterations of operator extrapolation, started at distance `d1`.
pub fn rate_bound_rhs<T: Scalar>(
    bounds: &BoundConstants<T>,
    game: &GameConstants<T>,
    schedule: &Schedule<T>,
    d1: T,
    t: u64,
) -> T {
    let c0 = schedule.c0;
    let mu = schedule.mu;
    let tt = T::lit(t as f64);
    let denom = (tt + c0 + T::one()) * (tt + c0);
    let two = T::lit(2.0);
    let eight = T::lit(8.0);
    let initial = two * (c0 + two) * (c0 + T::one()) * d1 / denom;
    let noise = eight * (game.nu_sq + bounds.c_1) / (mu * mu * denom);
    let consensus = two * c0 * (c0 + T::one()) * bounds.c_e / (mu * (c0 - T::one()) * denom);
    let drift = eight * (bounds.c_2 + T::lit(4.0) * game.nu_sq) * tt / (mu * mu * denom);
    initial + noise + consensus + drift
}

/// Bound on `max_i ‖σ(x_k) − N v̂_{i,k+1}‖`, with each `‖ζ_{i,s}‖` replaced by
/// `noise_norms[s]` when given (sum over players, indexed by iteration; out
/// of range falls back to `Σ ν_i`) or by `Σ ν_i` otherwise.
pub fn consensus_bound<T: Scalar>(
    bounds: &BoundConstants<T>,
    game: &GameConstants<T>,
    mixing: &MixingConstants<T>,
    schedule: &Schedule<T>,
    noise_norms: Option<&[T]>,
    k: u64,
) -> T {
    let theta = mixing.theta_mix;
    let beta = mixing.beta_mix;
    let nn = T::from_usize_lossy(game.m_i.len());
    let sum_c: T = bounds.c_i.iter().copied().sum();
    let sum_nu: T = game.nu_i.iter().copied().sum();
    let zeta = |s: i64| -> T {
        match noise_norms {
            Some(v) if s >= 0 && (s as usize) < v.len() => v[s as usize],
            _ => sum_nu,
        }
    };
    let mut hist = T::zero();
    for s in 1..=k {
        let lam = schedule.lambda(s - 1);
        let alpha = schedule.alpha(s - 1);
        let per_step = (T::one() + T::lit(2.0) * lam) * sum_c
            + lam * zeta(s as i64 - 2)
            + (T::one() + lam) * zeta(s as i64 - 1);
        hist = hist + pow_u64(beta, k - s) * alpha * per_step;
    }
    theta * game.m_h * nn * pow_u64(beta, k) + theta * nn * hist
}

fn pow_u64<T: Scalar>(base: T, e: u64) -> T {
    if e == 0 {
        T::one()
    } else {
        base.powf(T::lit(e as f64))
    }
}

/// Measured `ε_k = 2 Σ_i L_{f_i} M_i (‖N v̂_{i,k+1} − σ(x_k)‖ + ‖N v̂_{i,k} − σ(x_{k−1})‖)`
/// from per-player consensus errors at two consecutive iterations.
pub fn consensus_penalty<T: Scalar>(game: &GameConstants<T>, err_now: &[T], err_prev: &[T]) -> T {
    let two = T::lit(2.0);
    game.lip_f
        .iter()
        .zip(&game.m_i)
        .zip(err_now.iter().zip(err_prev))
        .map(|((&l, &m), (&a, &b))| two * l * m * (a + b))
        .sum()
}

/// On-disk cache of equilibria keyed by a hash of the instance description.
#[derive(Clone, Debug)]
pub struct OracleCache {
    dir: PathBuf,
}

impl OracleCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn key<S: Serialize>(instance: &S) -> Result<String> {
        let bytes = serde_json::to_vec(instance).map_err(|e| Error::Config(e.to_string()))?;
        Ok(hex::encode(Sha256::digest(&bytes)))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("ne-{key}.json"))
    }

    pub fn load(&self, key: &str) -> Result<Option<ViSolution<f64>>> {
        let path = self.path(key);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Error::Parse { path, message: e.to_string() })
    }

    pub fn store(&self, key: &str, solution: &ViSolution<f64>) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let path = self.path(key);
        let text = serde_json::to_string_pretty(solution).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}
