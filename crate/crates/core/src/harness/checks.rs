//! Sampled checks of the standing assumptions on a concrete instance.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::game::{pseudo_gradient, AggregativeGame, CournotGame, GameConstants, NoiseModel, Profile};
use crate::network::{mixing_constants, validate_matrix, GraphSchedule, MixingMatrix};
use crate::scalar::{dist_sq, dot, norm};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    /// Horizon for the drawn-matrix and transition-product checks.
    pub mixing_horizon: u64,
    pub graph_seed: u64,
    /// Random pairs for the monotonicity and Lipschitz checks.
    pub operator_pairs: usize,
    /// Noise draws per player.
    pub noise_samples: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            mixing_horizon: 200,
            graph_seed: 0,
            operator_pairs: 1000,
            noise_samples: 100_000,
            seed: 0,
        }
    }
}

/// Every drawn `W_k` for `k <= horizon` is doubly stochastic with positive entries `>= η`.
pub fn check_doubly_stochastic(graphs: &GraphSchedule<f64>, horizon: u64, seed: u64) -> CheckOutcome {
    let eta = graphs.eta();
    let mut bad = Vec::new();
    for (idx, m) in graphs.base_matrices().iter().enumerate() {
        let report = validate_matrix(m, eta);
        if let Some(v) = report.violations.first() {
            bad.push(format!("graph {idx}: {v}"));
        }
    }
    let drawn_ok = (1..=horizon).all(|k| graphs.draw_index(k, seed) < graphs.base_matrices().len());
    CheckOutcome {
        name: "doubly-stochastic",
        passed: bad.is_empty() && drawn_ok,
        detail: if bad.is_empty() {
            format!("{} base graphs, eta = {eta:.6}", graphs.base_matrices().len())
        } else {
            bad.join("; ")
        },
    }
}

pub fn check_union_connected(graphs: &GraphSchedule<f64>) -> CheckOutcome {
    let passed = graphs.union_connected();
    CheckOutcome {
        name: "union-connected",
        passed,
        detail: format!("window B = {}", graphs.spec().window),
    }
}

/// Largest ratio of `max_ij |Φ(k,1)_ij − 1/N|` to `θ β^{k−1}` for `k <= horizon`.
pub fn mixing_envelope_ratio(graphs: &GraphSchedule<f64>, horizon: u64, seed: u64) -> f64 {
    let mc = mixing_constants(graphs);
    let mut phi = MixingMatrix::identity(graphs.n());
    let mut worst = 0.0f64;
    for k in 1..=horizon {
        phi = graphs.draw_matrix(k, seed).matmul(&phi);
        let bound = mc.theta_mix * mc.beta_mix.powf((k - 1) as f64);
        worst = worst.max(phi.max_deviation_from_average() / bound);
    }
    worst
}

pub fn check_mixing_envelope(graphs: &GraphSchedule<f64>, horizon: u64, seed: u64) -> CheckOutcome {
    let ratio = mixing_envelope_ratio(graphs, horizon, seed);
    CheckOutcome {
        name: "mixing-envelope",
        passed: ratio <= 1.0,
        detail: format!("max deviation / envelope over k <= {horizon}: {ratio:.3e}"),
    }
}

fn random_profile<G: AggregativeGame<f64>>(game: &G, rng: &mut ChaCha8Rng) -> Profile<f64> {
    (0..game.n_players())
        .map(|i| {
            let s = game.strategy_set(i);
            s.lower
                .iter()
                .zip(&s.upper)
                .map(|(&lo, &hi)| rng.random_range(lo..=hi))
                .collect()
        })
        .collect()
}

fn flat(x: &[Vec<f64>]) -> Vec<f64> {
    x.concat()
}

/// Worst observed `⟨φ(x)−φ(y), x−y⟩ / ‖x−y‖²` and `‖φ(x)−φ(y)‖ / ‖x−y‖` over random pairs.
pub fn operator_ratios<G: AggregativeGame<f64>>(game: &G, pairs: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_mono = f64::INFINITY;
    let mut max_lip = 0.0f64;
    for _ in 0..pairs {
        let x = random_profile(game, &mut rng);
        let y = random_profile(game, &mut rng);
        let dx: Vec<f64> = flat(&x).iter().zip(flat(&y)).map(|(a, b)| a - b).collect();
        let gx = flat(&pseudo_gradient(game, &x)?);
        let gy = flat(&pseudo_gradient(game, &y)?);
        let dg: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
        let d2 = dist_sq(&flat(&x), &flat(&y));
        if d2 == 0.0 {
            continue;
        }
        min_mono = min_mono.min(dot(&dg, &dx) / d2);
        max_lip = max_lip.max(norm(&dg) / d2.sqrt());
    }
    Ok((min_mono, max_lip))
}

pub fn check_operator(game: &CournotGame<f64>, constants: &GameConstants<f64>, pairs: usize, seed: u64) -> Result<[CheckOutcome; 2]> {
    let (mono, lip) = operator_ratios(game, pairs, seed)?;
    let tol = 1e-9;
    Ok([
        CheckOutcome {
            name: "strong-monotonicity",
            passed: mono >= constants.mu * (1.0 - tol),
            detail: format!("min ratio {mono:.6} vs mu = {:.6}", constants.mu),
        },
        CheckOutcome {
            name: "lipschitz",
            passed: lip <= constants.lip * (1.0 + tol),
            detail: format!("max ratio {lip:.6} vs L = {:.6}", constants.lip),
        },
    ])
}

/// Empirical moments of the noise of one player.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseMoments {
    /// Componentwise sample mean divided by its standard error.
    pub mean_z: Vec<f64>,
    pub second_moment: f64,
    /// Standard error of `second_moment`.
    pub second_moment_se: f64,
    pub bound: f64,
}

pub fn noise_moments(noise: &NoiseModel<f64>, i: usize, samples: usize, seed: u64) -> NoiseMoments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = noise.price_halfwidth.len();
    let mut sum = vec![0.0; l];
    let mut sum_sq = vec![0.0; l];
    let mut norm_sum = 0.0;
    let mut norm_sq_sum = 0.0;
    for _ in 0..samples {
        let e = noise.sample(i, &mut rng);
        let n2: f64 = e.iter().map(|v| v * v).sum();
        for ((s, q), v) in sum.iter_mut().zip(&mut sum_sq).zip(&e) {
            *s += v;
            *q += v * v;
        }
        norm_sum += n2;
        norm_sq_sum += n2 * n2;
    }
    let m = samples as f64;
    let mean_z = sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &q)| {
            let mean = s / m;
            let var = (q / m - mean * mean).max(0.0);
            if var == 0.0 {
                if mean == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                mean / (var / m).sqrt()
            }
        })
        .collect();
    let second = norm_sum / m;
    let var2 = (norm_sq_sum / m - second * second).max(0.0);
    NoiseMoments {
        mean_z,
        second_moment: second,
        second_moment_se: (var2 / m).sqrt(),
        bound: noise.variance_bound(i),
    }
}

/// Zero mean within 4 standard errors; second moment below `ν_i²` up to 4 standard errors.
pub fn check_noise(noise: &NoiseModel<f64>, samples: usize, seed: u64) -> [CheckOutcome; 2] {
    let mut worst_z = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut second_ok = true;
    for i in 0..noise.cost_halfwidth.len() {
        let m = noise_moments(noise, i, samples, seed.wrapping_add(i as u64));
        worst_z = m.mean_z.iter().fold(worst_z, |a, z| a.max(z.abs()));
        let excess = (m.second_moment - m.bound) / m.second_moment_se.max(f64::MIN_POSITIVE);
        worst_excess = worst_excess.max(excess);
        second_ok &= m.second_moment <= m.bound + 4.0 * m.second_moment_se;
    }
    [
        CheckOutcome {
            name: "noise-unbiased",
            passed: worst_z <= 4.0,
            detail: format!("max |mean| / stderr = {worst_z:.3} over {samples} draws per player"),
        },
        CheckOutcome {
            name: "noise-variance",
            passed: second_ok,
            detail: format!("max (E|e|^2 - nu_i^2) / stderr = {worst_excess:.3}"),
        },
    ]
}

/// The full suite run by `validate`.
pub fn assumption_suite(
    game: &CournotGame<f64>,
    noise: &NoiseModel<f64>,
    constants: &GameConstants<f64>,
    graphs: &GraphSchedule<f64>,
    opts: &CheckOptions,
) -> Result<Vec<CheckOutcome>> {
    let mut out = vec![
        check_doubly_stochastic(graphs, opts.mixing_horizon, opts.graph_seed),
        check_union_connected(graphs),
        check_mixing_envelope(graphs, opts.mixing_horizon, opts.graph_seed),
    ];
    out.extend(check_operator(game, constants, opts.operator_pairs, opts.seed)?);
    out.extend(check_noise(noise, opts.noise_samples, opts.seed));
    Ok(out)
}
