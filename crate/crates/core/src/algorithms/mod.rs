//! Distributed Nash-equilibrium seeking iterations.
//!
//! All three methods share the same scaffolding per iteration `k`:
//! a consensus step `v̂_i = Σ_j w_ij v_j`, a local strategy update driven by
//! sampled gradients evaluated at the aggregate estimate `N·v̂_i`, and the
//! tracking update `v_i ← v̂_i + x_i⁺ − x_i`. They differ only in the
//! strategy update:
//!
//! * [`Algorithm::OperatorExtrapolation`]: one mirror step along
//!   `(1+λ_k)q_k − λ_k q_{k−1}`, one sample per iteration.
//! * [`Algorithm::ProjectedGradient`]: one projected step along `q_k`.
//! * [`Algorithm::ExtraGradient`]: an extrapolation and an update projection,
//!   two samples per iteration.

mod schedule;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use schedule::{Schedule, StepRule};

use crate::error::{check_len, Error, Result};
use crate::game::{aggregate, profile_in_sets, sample_gradient, AggregativeGame, NoiseModel, Profile};
use crate::mirror::{bregman, Regularizer};
use crate::network::{mix_blocks, GraphSchedule, MixingMatrix};
use crate::scalar::{dist_sq, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "oe")]
    OperatorExtrapolation,
    #[serde(rename = "pga")]
    ProjectedGradient,
    #[serde(rename = "extrag")]
    ExtraGradient,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::OperatorExtrapolation,
        Algorithm::ProjectedGradient,
        Algorithm::ExtraGradient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::OperatorExtrapolation => "oe",
            Algorithm::ProjectedGradient => "pga",
            Algorithm::ExtraGradient => "extrag",
        }
    }

    /// Gradient samples each player draws per iteration.
    pub fn samples_per_iteration(self) -> u64 {
        match self {
            Algorithm::ExtraGradient => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oe" => Ok(Algorithm::OperatorExtrapolation),
            "pga" => Ok(Algorithm::ProjectedGradient),
            "extrag" => Ok(Algorithm::ExtraGradient),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm {other:?} (expected oe, pga or extrag)"
            ))),
        }
    }
}

/// Per-player iterate, aggregate estimate, intermediate estimate and the
/// previous gradient sample, plus the iteration counter `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgoState<T> {
    pub x: Profile<T>,
    pub v: Profile<T>,
    pub v_hat: Profile<T>,
    /// `None` before the first step.
    pub q_prev: Option<Profile<T>>,
    pub k: u64,
}

impl<T: Scalar> AlgoState<T> {
    /// `k = 1`, `v_{i,1} = x_{i,1}`.
    pub fn new<G: AggregativeGame<T> + ?Sized>(game: &G, init: Profile<T>) -> Result<Self> {
        check_len(game.n_players(), init.len())?;
        for b in &init {
            check_len(game.dim(), b.len())?;
        }
        if !profile_in_sets(game, &init) {
            return Err(Error::InvalidArgument("initial point lies outside the strategy sets".into()));
        }
        Ok(Self {
            v: init.clone(),
            v_hat: init.clone(),
            x: init,
            q_prev: None,
            k: 1,
        })
    }

    /// `max_l |Σ_i v_{i,l} − σ(x)_l|`.
    pub fn tracking_drift(&self) -> T {
        let sv = aggregate(&self.v).expect("well-formed state");
        let sx = aggregate(&self.x).expect("well-formed state");
        sv.iter().zip(&sx).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max)
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed for `(master, index)`.
pub fn substream_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Stochastic gradient oracle with per-(iteration, player, draw) substreams
/// and a call counter.
pub struct SampleSource<'a, T, G: ?Sized> {
    game: &'a G,
    noise: &'a NoiseModel<T>,
    seed: u64,
    calls: u64,
}

impl<'a, T: Scalar, G: AggregativeGame<T> + ?Sized> SampleSource<'a, T, G> {
    pub fn new(game: &'a G, noise: &'a NoiseModel<T>, seed: u64) -> Self {
        Self {
            game,
            noise,
            seed,
            calls: 0,
        }
    }

    pub fn game(&self) -> &'a G {
        self.game
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn sample(&mut self, k: u64, i: usize, draw: u64, x_i: &[T], z: &[T]) -> Result<Vec<T>> {
        self.calls += 1;
        let key = substream_seed(substream_seed(substream_seed(self.seed, k), i as u64), draw);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        sample_gradient(self.game, self.noise, &mut rng, i, x_i, z)
    }
}

/// `v̂_i = Σ_j w_ij v_j`.
pub fn consensus_step<T: Scalar>(v: &[Vec<T>], w: &MixingMatrix<T>) -> Result<Profile<T>> {
    check_len(w.n(), v.len())?;
    Ok(mix_blocks(w, v))
}

/// `(1+λ)·q_now − λ·q_prev`.
pub fn oe_direction<T: Scalar>(lambda: T, q_now: &[T], q_prev: &[T]) -> Vec<T> {
    q_now
        .iter()
        .zip(q_prev)
        .map(|(&a, &b)| (T::one() + lambda) * a - lambda * b)
        .collect()
}

/// Diagnostics of one iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport<T> {
    /// `max_i ‖N·v̂_{i,k+1} − σ(x_k)‖`.
    pub consensus_residual: T,
    /// Gradient samples drawn per player.
    pub samples_per_player: u64,
}

fn consensus_phase<T: Scalar>(state: &mut AlgoState<T>, w: &MixingMatrix<T>) -> Result<(Profile<T>, T)> {
    state.v_hat = consensus_step(&state.v, w)?;
    let n = T::from_usize_lossy(state.x.len());
    let sigma = aggregate(&state.x)?;
    let residual = state
        .v_hat
        .iter()
        .map(|vh| {
            let z: Vec<T> = vh.iter().map(|&v| n * v).collect();
            dist_sq(&z, &sigma).sqrt()
        })
        .fold(T::zero(), T::max);
    let z: Profile<T> = state
        .v_hat
        .iter()
        .map(|vh| vh.iter().map(|&v| n * v).collect())
        .collect();
    Ok((z, residual))
}

fn tracking_phase<T: Scalar>(state: &mut AlgoState<T>, x_next: Profile<T>) {
    for i in 0..state.x.len() {
        state.v[i] = state.v_hat[i]
            .iter()
            .zip(x_next[i].iter().zip(&state.x[i]))
            .map(|(&vh, (&xn, &xo))| vh + xn - xo)
            .collect();
    }
    state.x = x_next;
    state.k += 1;
}

/// One iteration of distributed mirror descent with operator extrapolation.
///
/// Before the first step no previous sample exists; it is taken equal to the
/// current one, so the extrapolation term vanishes.
pub fn oe_iterate<T, G, R>(
    state: &mut AlgoState<T>,
    source: &mut SampleSource<'_, T, G>,
    reg: &R,
    rule: &StepRule<T>,
    w: &MixingMatrix<T>,
) -> Result<StepReport<T>>
where
    T: Scalar,
    G: AggregativeGame<T> + ?Sized,
    R: Regularizer<T> + ?Sized,
{
    let k = state.k;
    let (z, residual) = consensus_phase(state, w)?;
    let alpha = rule.alpha(k);
    let lambda = rule.lambda(k);
    let game = source.game();
    let mut q_now = Vec::with_capacity(state.x.len());
    let mut x_next = Vec::with_capacity(state.x.len());
    for i in 0..state.x.len() {
        let q = source.sample(k, i, 0, &state.x[i], &z[i])?;
        let dir = match &state.q_prev {
            Some(prev) => oe_direction(lambda, &q, &prev[i]),
            None => q.clone(),
        };
        x_next.push(reg.prox(game.strategy_set(i), &state.x[i], &dir, alpha));
        q_now.push(q);
    }
    state.q_prev = Some(q_now);
    tracking_phase(state, x_next);
    Ok(StepReport {
        consensus_residual: residual,
        samples_per_player: 1,
    })
}

/// Projected gradient: `x_i⁺ = Π_{X_i}[x_i − α_k q_i]`.
pub fn pga_iterate<T, G>(
    state: &mut AlgoState<T>,
    source: &mut SampleSource<'_, T, G>,
    rule: &StepRule<T>,
    w: &MixingMatrix<T>,
) -> Result<StepReport<T>>
where
    T: Scalar,
    G: AggregativeGame<T> + ?Sized,
{
    let k = state.k;
    let (z, residual) = consensus_phase(state, w)?;
    let alpha = rule.alpha(k);
    let game = source.game();
    let mut q_now = Vec::with_capacity(state.x.len());
    let mut x_next = Vec::with_capacity(state.x.len());
    for i in 0..state.x.len() {
        let q = source.sample(k, i, 0, &state.x[i], &z[i])?;
        x_next.push(projected_step(game.strategy_set(i), &state.x[i], &q, alpha));
        q_now.push(q);
    }
    state.q_prev = Some(q_now);
    tracking_phase(state, x_next);
    Ok(StepReport {
        consensus_residual: residual,
        samples_per_player: 1,
    })
}

/// Extra-gradient: an extrapolation projection and an update projection, each
/// with a fresh sample, both evaluated at the same aggregate estimate.
pub fn extragradient_iterate<T, G>(
    state: &mut AlgoState<T>,
    source: &mut SampleSource<'_, T, G>,
    rule: &StepRule<T>,
    w: &MixingMatrix<T>,
) -> Result<StepReport<T>>
where
    T: Scalar,
    G: AggregativeGame<T> + ?Sized,
{
    let k = state.k;
    let (z, residual) = consensus_phase(state, w)?;
    let alpha = rule.alpha(k);
    let game = source.game();
    let mut q_now = Vec::with_capacity(state.x.len());
    let mut x_next = Vec::with_capacity(state.x.len());
    for i in 0..state.x.len() {
        let bx = game.strategy_set(i);
        let q_half = source.sample(k, i, 0, &state.x[i], &z[i])?;
        let x_half = projected_step(bx, &state.x[i], &q_half, alpha);
        let q = source.sample(k, i, 1, &x_half, &z[i])?;
        x_next.push(projected_step(bx, &state.x[i], &q, alpha));
        q_now.push(q);
    }
    state.q_prev = Some(q_now);
    tracking_phase(state, x_next);
    Ok(StepReport {
        consensus_residual: residual,
        samples_per_player: 2,
    })
}

fn projected_step<T: Scalar>(bx: &crate::mirror::BoxSet<T>, x: &[T], g: &[T], alpha: T) -> Vec<T> {
    let trial: Vec<T> = x.iter().zip(g).map(|(&xv, &gv)| xv - alpha * gv).collect();
    bx.project(&trial)
}

/// Dispatches one iteration of `algorithm`. PGA and Extra-G always project in
/// the Euclidean geometry; `reg` only affects operator extrapolation.
pub fn step<T, G, R>(
    algorithm: Algorithm,
    state: &mut AlgoState<T>,
    source: &mut SampleSource<'_, T, G>,
    reg: &R,
    rule: &StepRule<T>,
    w: &MixingMatrix<T>,
) -> Result<StepReport<T>>
where
    T: Scalar,
    G: AggregativeGame<T> + ?Sized,
    R: Regularizer<T> + ?Sized,
{
    match algorithm {
        Algorithm::OperatorExtrapolation => oe_iterate(state, source, reg, rule, w),
        Algorithm::ProjectedGradient => pga_iterate(state, source, rule, w),
        Algorithm::ExtraGradient => extragradient_iterate(state, source, rule, w),
    }
}

/// Which iterations get a metric row: every `k ≤ dense_until`, then a
/// geometric grid with `per_decade` points per factor of ten, and always
/// the final iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stride {
    pub dense_until: u64,
    pub per_decade: u32,
}

impl Default for Stride {
    fn default() -> Self {
        Self {
            dense_until: 1000,
            per_decade: 50,
        }
    }
}

impl Stride {
    pub fn points(&self, total: u64) -> Vec<u64> {
        let mut pts: Vec<u64> = (1..=self.dense_until.min(total)).collect();
        if self.per_decade > 0 && total > self.dense_until {
            let base = self.dense_until.max(1) as f64;
            let mut j = 1u32;
            loop {
                let k = (base * 10f64.powf(j as f64 / self.per_decade as f64)).round() as u64;
                if k > total {
                    break;
                }
                if pts.last().is_none_or(|&last| k > last) {
                    pts.push(k);
                }
                j += 1;
            }
        }
        if pts.last() != Some(&total) && total > 0 {
            pts.push(total);
        }
        pts
    }
}

/// Seeds and reference point for [`run`].
#[derive(Clone, Debug)]
pub struct RunOptions<'a, T> {
    pub iterations: u64,
    pub stride: Stride,
    /// Equilibrium used for the error columns; zeros are recorded without it.
    pub reference: Option<&'a [Vec<T>]>,
    pub graph_seed: u64,
    pub noise_seed: u64,
}

/// Metrics after `k` iterations (the row describes `x_{k+1}`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRow<T> {
    pub k: u64,
    /// `‖x − x*‖²`.
    pub sq_err: T,
    /// `Σ_i D(x_i, x*_i)`.
    pub bregman: T,
    pub consensus: T,
    pub samples_per_player: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub rows: Vec<TrajectoryRow<T>>,
    /// Largest `|Σ_i v_i − σ(x)|_∞` over every iteration.
    pub max_tracking_drift: T,
    pub total_samples: u64,
    pub final_state: AlgoState<T>,
}

/// Runs `iterations` steps from `init` and records strided metrics.
#[allow(clippy::too_many_arguments)]
pub fn run<T, G, R>(
    algorithm: Algorithm,
    game: &G,
    noise: &NoiseModel<T>,
    reg: &R,
    rule: &StepRule<T>,
    graphs: &GraphSchedule<T>,
    init: Profile<T>,
    opts: &RunOptions<'_, T>,
) -> Result<Trajectory<T>>
where
    T: Scalar,
    G: AggregativeGame<T> + ?Sized,
    R: Regularizer<T> + ?Sized,
{
    if opts.iterations == 0 {
        return Err(Error::InvalidArgument("iteration count must be >= 1".into()));
    }
    check_len(game.n_players(), graphs.n())?;
    if let Some(r) = opts.reference {
        check_len(game.n_players(), r.len())?;
    }
    let mut state = AlgoState::new(game, init)?;
    let mut source = SampleSource::new(game, noise, opts.noise_seed);
    let points = opts.stride.points(opts.iterations);
    let mut next_point = points.iter().peekable();
    let mut rows = Vec::with_capacity(points.len());
    let mut max_drift = T::zero();
    for k in 1..=opts.iterations {
        let w = graphs.draw_matrix(k, opts.graph_seed);
        let report = step(algorithm, &mut state, &mut source, reg, rule, w)?;
        max_drift = max_drift.max(state.tracking_drift());
        if next_point.peek() == Some(&&k) {
            next_point.next();
            let (sq_err, breg) = match opts.reference {
                Some(x_star) => errors(reg, &state.x, x_star)?,
                None => (T::zero(), T::zero()),
            };
            rows.push(TrajectoryRow {
                k,
                sq_err,
                bregman: breg,
                consensus: report.consensus_residual,
                samples_per_player: report.samples_per_player,
            });
        }
    }
    Ok(Trajectory {
        rows,
        max_tracking_drift: max_drift,
        total_samples: source.calls(),
        final_state: state,
    })
}

/// `(‖x − y‖², Σ_i D(x_i, y_i))`.
pub fn errors<T: Scalar, R: Regularizer<T> + ?Sized>(reg: &R, x: &[Vec<T>], y: &[Vec<T>]) -> Result<(T, T)> {
    check_len(x.len(), y.len())?;
    let mut sq = T::zero();
    let mut breg = T::zero();
    for (a, b) in x.iter().zip(y) {
        sq = sq + dist_sq(a, b);
        breg = breg + bregman(reg, a, b)?;
    }
    Ok((sq, breg))
}
