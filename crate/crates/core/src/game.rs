//! Aggregative games and the Nash–Cournot instance.
//!
//! A strategy profile is stored as one block per player (`Profile<T>`); the
//! aggregate `σ(x)` is the blockwise sum.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::mirror::BoxSet;
use crate::scalar::Scalar;

/// One strategy block per player.
pub type Profile<T> = Vec<Vec<T>>;

/// Game whose player costs depend on the own strategy and the aggregate.
pub trait AggregativeGame<T: Scalar>: Send + Sync {
    fn n_players(&self) -> usize;

    /// Length of each player's strategy vector.
    fn dim(&self) -> usize;

    fn strategy_set(&self, i: usize) -> &BoxSet<T>;

    /// `F_i(x_i, z)`: player `i`'s gradient with the aggregate replaced by `z`.
    fn partial_gradient(&self, i: usize, x_i: &[T], z: &[T]) -> Result<Vec<T>>;
}

/// `σ(x) = Σ_j x_j`.
pub fn aggregate<T: Scalar>(x: &[Vec<T>]) -> Result<Vec<T>> {
    let first = x
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty profile".into()))?;
    let mut sum = vec![T::zero(); first.len()];
    for block in x {
        check_len(sum.len(), block.len())?;
        for (s, &v) in sum.iter_mut().zip(block) {
            *s = *s + v;
        }
    }
    Ok(sum)
}

fn check_profile<T: Scalar, G: AggregativeGame<T> + ?Sized>(game: &G, x: &[Vec<T>]) -> Result<()> {
    check_len(game.n_players(), x.len())?;
    x.iter().try_for_each(|b| check_len(game.dim(), b.len()))
}

/// `φ(x)`, block `i` being `F_i(x_i, σ(x))`.
pub fn pseudo_gradient<T: Scalar, G: AggregativeGame<T> + ?Sized>(
    game: &G,
    x: &[Vec<T>],
) -> Result<Profile<T>> {
    check_profile(game, x)?;
    let sigma = aggregate(x)?;
    (0..game.n_players())
        .map(|i| game.partial_gradient(i, &x[i], &sigma))
        .collect()
}

pub fn profile_in_sets<T: Scalar, G: AggregativeGame<T> + ?Sized>(game: &G, x: &[Vec<T>]) -> bool {
    x.len() == game.n_players()
        && x.iter()
            .enumerate()
            .all(|(i, b)| game.strategy_set(i).contains(b))
}

/// Euclidean projection of a full profile onto `X = Π X_i`.
pub fn project_profile<T: Scalar, G: AggregativeGame<T> + ?Sized>(game: &G, x: &[Vec<T>]) -> Profile<T> {
    x.iter()
        .enumerate()
        .map(|(i, b)| game.strategy_set(i).project(b))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MarketParams<T> {
    /// Price intercepts.
    pub d: Vec<T>,
    /// Price slopes.
    pub b: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FirmParams<T> {
    /// Linear production cost per market.
    pub c: Vec<T>,
    /// Capacity box, serialized as `lower` / `upper`.
    #[serde(flatten)]
    pub capacity: BoxSet<T>,
}

/// Nash–Cournot game: firm `i` pays `c_iᵀx_i − (d − Bσ)ᵀx_i`, `B = diag(b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CournotGame<T> {
    firms: Vec<FirmParams<T>>,
    market: MarketParams<T>,
}

impl<T: Scalar> CournotGame<T> {
    pub fn new(firms: Vec<FirmParams<T>>, market: MarketParams<T>) -> Result<Self> {
        if firms.is_empty() {
            return Err(Error::InvalidParameter("game needs at least one firm".into()));
        }
        let l = market.d.len();
        if l == 0 {
            return Err(Error::InvalidParameter("game needs at least one market".into()));
        }
        check_len(l, market.b.len())?;
        if market.d.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::InvalidParameter("price intercepts d must be > 0".into()));
        }
        if market.b.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::InvalidParameter("price slopes b must be > 0".into()));
        }
        for (i, f) in firms.iter().enumerate() {
            check_len(l, f.c.len())?;
            check_len(l, f.capacity.lower.len())?;
            check_len(l, f.capacity.upper.len())?;
            if f.c.iter().any(|&v| !(v > T::zero())) {
                return Err(Error::InvalidParameter(format!("firm {i}: costs c must be > 0")));
            }
            // Re-validates ordering of the bounds.
            BoxSet::new(f.capacity.lower.clone(), f.capacity.upper.clone())?;
        }
        Ok(Self { firms, market })
    }

    pub fn n_markets(&self) -> usize {
        self.market.d.len()
    }

    pub fn firms(&self) -> &[FirmParams<T>] {
        &self.firms
    }

    pub fn market(&self) -> &MarketParams<T> {
        &self.market
    }

    /// Componentwise upper bound on `max_{x ∈ X} |φ_i(x)|`, returned as its norm.
    ///
    /// Each component of `φ_i` is increasing in every coordinate of `x`, so its
    /// extremes sit at the all-lower and all-upper corners of the profile.
    pub fn pseudo_gradient_norm_bound(&self, i: usize) -> T {
        let l_count = self.n_markets();
        let mut sq = T::zero();
        for l in 0..l_count {
            let sum_lo: T = self.firms.iter().map(|f| f.capacity.lower[l]).sum();
            let sum_up: T = self.firms.iter().map(|f| f.capacity.upper[l]).sum();
            let base = self.firms[i].c[l] - self.market.d[l];
            let b = self.market.b[l];
            let at_lo = base + b * (sum_lo + self.firms[i].capacity.lower[l]);
            let at_up = base + b * (sum_up + self.firms[i].capacity.upper[l]);
            let m = at_lo.abs().max(at_up.abs());
            sq = sq + m * m;
        }
        sq.sqrt()
    }

    pub fn midpoint_profile(&self) -> Profile<T> {
        self.firms.iter().map(|f| f.capacity.midpoint()).collect()
    }
}

impl<T: Scalar> AggregativeGame<T> for CournotGame<T> {
    fn n_players(&self) -> usize {
        self.firms.len()
    }

    fn dim(&self) -> usize {
        self.n_markets()
    }

    fn strategy_set(&self, i: usize) -> &BoxSet<T> {
        &self.firms[i].capacity
    }

    /// `F_i(x_i, z) = c_i − d + B(z + x_i)`.
    fn partial_gradient(&self, i: usize, x_i: &[T], z: &[T]) -> Result<Vec<T>> {
        let firm = self
            .firms
            .get(i)
            .ok_or_else(|| Error::InvalidArgument(format!("player index {i} out of range")))?;
        let l_count = self.n_markets();
        check_len(l_count, x_i.len())?;
        check_len(l_count, z.len())?;
        Ok((0..l_count)
            .map(|l| firm.c[l] - self.market.d[l] + self.market.b[l] * (z[l] + x_i[l]))
            .collect())
    }
}

/// Uniform additive noise on costs (`ξ_i`) and prices (`ζ`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NoiseModel<T> {
    /// Per-firm, per-market half-widths of `ξ_i`.
    pub cost_halfwidth: Vec<Vec<T>>,
    /// Per-market half-widths of `ζ`.
    pub price_halfwidth: Vec<T>,
    pub enabled: bool,
}

impl<T: Scalar> NoiseModel<T> {
    /// Half-widths `c_i/8` and `d/8`.
    pub fn standard(game: &CournotGame<T>, enabled: bool) -> Self {
        let eighth = T::lit(0.125);
        Self {
            cost_halfwidth: game
                .firms
                .iter()
                .map(|f| f.c.iter().map(|&c| c * eighth).collect())
                .collect(),
            price_halfwidth: game.market.d.iter().map(|&d| d * eighth).collect(),
            enabled,
        }
    }

    pub fn disabled(game: &CournotGame<T>) -> Self {
        Self::standard(game, false)
    }

    /// Draws `ξ_i − ζ`; exactly zero (and no RNG draws) when disabled.
    pub fn sample<R: RngCore + ?Sized>(&self, i: usize, rng: &mut R) -> Vec<T> {
        let l_count = self.price_halfwidth.len();
        if !self.enabled {
            return vec![T::zero(); l_count];
        }
        let two = T::lit(2.0);
        (0..l_count)
            .map(|l| {
                let xi = (two * T::lit(rng.random::<f64>()) - T::one()) * self.cost_halfwidth[i][l];
                let zeta = (two * T::lit(rng.random::<f64>()) - T::one()) * self.price_halfwidth[l];
                xi - zeta
            })
            .collect()
    }

    /// Per-player variance bound `ν_i² = Σ_l (a_{il}² + p_l²)/3`; zero when disabled.
    pub fn variance_bound(&self, i: usize) -> T {
        if !self.enabled {
            return T::zero();
        }
        let three = T::lit(3.0);
        self.cost_halfwidth[i]
            .iter()
            .zip(&self.price_halfwidth)
            .map(|(&a, &p)| (a * a + p * p) / three)
            .sum()
    }
}

/// `q_i(x_i, z; ξ) = F_i(x_i, z) + noise`.
pub fn sample_gradient<T: Scalar, G: AggregativeGame<T> + ?Sized, R: RngCore + ?Sized>(
    game: &G,
    noise: &NoiseModel<T>,
    rng: &mut R,
    i: usize,
    x_i: &[T],
    z: &[T],
) -> Result<Vec<T>> {
    let mut g = game.partial_gradient(i, x_i, z)?;
    if noise.enabled {
        for (gv, nv) in g.iter_mut().zip(noise.sample(i, rng)) {
            *gv = *gv + nv;
        }
    }
    Ok(g)
}

/// Theoretical constants of a Cournot instance under the Euclidean regularizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GameConstants<T> {
    /// Strong-monotonicity modulus.
    pub mu: T,
    /// Lipschitz constant of `φ`.
    pub lip: T,
    /// Lipschitz constants of `F_i` in the aggregate argument.
    pub lip_f: Vec<T>,
    /// `M_i = max_{x_i ∈ X_i} ‖x_i‖`.
    pub m_i: Vec<T>,
    pub m_h: T,
    /// Per-player noise standard-deviation bounds `ν_i`.
    pub nu_i: Vec<T>,
    /// `ν² = Σ ν_i²`.
    pub nu_sq: T,
    /// Per-player bounds on `max_{x ∈ X} ‖φ_i(x)‖`.
    pub phi_max: Vec<T>,
}

/// The Jacobian of `φ` is `(I + 11ᵀ) ⊗ B`, whose eigenvalues are
/// `b_l` (multiplicity `N−1` per market) and `(N+1)·b_l`.
pub fn game_constants<T: Scalar>(game: &CournotGame<T>, noise: &NoiseModel<T>) -> GameConstants<T> {
    let n = game.n_players();
    let b_min = game.market.b.iter().copied().fold(T::infinity(), T::min);
    let b_max = game.market.b.iter().copied().fold(T::zero(), T::max);
    let m_i: Vec<T> = game.firms.iter().map(|f| f.capacity.max_norm()).collect();
    let nu_sq_i: Vec<T> = (0..n).map(|i| noise.variance_bound(i)).collect();
    GameConstants {
        mu: b_min,
        lip: T::from_usize_lossy(n + 1) * b_max,
        lip_f: vec![b_max; n],
        m_h: m_i.iter().copied().sum(),
        m_i,
        nu_i: nu_sq_i.iter().map(|v| v.sqrt()).collect(),
        nu_sq: nu_sq_i.iter().copied().sum(),
        phi_max: (0..n).map(|i| game.pseudo_gradient_norm_bound(i)).collect(),
    }
}

/// Distributions for [`random_instance`]; defaults follow the Cournot benchmark.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceParams {
    pub n_players: usize,
    pub n_markets: usize,
    pub cost_range: (f64, f64),
    pub intercept_range: (f64, f64),
    pub slope_range: (f64, f64),
    pub capacity: (f64, f64),
    pub noise: bool,
}

impl Default for InstanceParams {
    fn default() -> Self {
        Self {
            n_players: 20,
            n_markets: 3,
            cost_range: (3.0, 4.0),
            intercept_range: (10.0, 10.5),
            slope_range: (0.5, 1.0),
            capacity: (2.0, 10.0),
            noise: true,
        }
    }
}

pub fn random_instance<T: Scalar>(seed: u64) -> (CournotGame<T>, NoiseModel<T>) {
    random_instance_with(seed, &InstanceParams::default()).expect("default instance parameters are valid")
}

pub fn random_instance_with<T: Scalar>(
    seed: u64,
    params: &InstanceParams,
) -> Result<(CournotGame<T>, NoiseModel<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (f64, f64), k: usize| -> Vec<T> {
        (0..k).map(|_| T::lit(rng.random_range(lo..=hi))).collect()
    };
    let l = params.n_markets;
    let d = draw(params.intercept_range, l);
    let b = draw(params.slope_range, l);
    let firms = (0..params.n_players)
        .map(|_| FirmParams {
            c: draw(params.cost_range, l),
            capacity: BoxSet {
                lower: vec![T::lit(params.capacity.0); l],
                upper: vec![T::lit(params.capacity.1); l],
            },
        })
        .collect();
    let game = CournotGame::new(firms, MarketParams { d, b })?;
    let noise = NoiseModel::standard(&game, params.noise);
    Ok((game, noise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{dist_sq, dot, norm};

    fn scalar_game(c: &[f64], d: f64, b: f64) -> CournotGame<f64> {
        let firms = c
            .iter()
            .map(|&ci| FirmParams {
                c: vec![ci],
                capacity: BoxSet::new(vec![2.0], vec![10.0]).unwrap(),
            })
            .collect();
        CournotGame::new(firms, MarketParams { d: vec![d], b: vec![b] }).unwrap()
    }

    fn flat(x: &Profile<f64>) -> Vec<f64> {
        x.iter().flatten().copied().collect()
    }

    #[test]
    fn aggregate_sums_blocks() {
        assert_eq!(aggregate(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(), vec![4.0, 6.0]);
        assert_eq!(aggregate(&[vec![5.0, 5.0, 5.0]]).unwrap(), vec![5.0, 5.0, 5.0]);
        assert_eq!(aggregate(&[vec![1.0], vec![-1.0], vec![0.0]]).unwrap(), vec![0.0]);
    }

    #[test]
    fn aggregate_rejects_ragged_profiles() {
        assert!(matches!(
            aggregate(&[vec![1.0, 2.0], vec![3.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(aggregate::<f64>(&[]).is_err());
    }

    #[test]
    fn partial_gradient_examples() {
        let g = scalar_game(&[3.0], 10.0, 1.0);
        assert_eq!(g.partial_gradient(0, &[2.0], &[4.0]).unwrap(), vec![-1.0]);
        let v = g.partial_gradient(0, &[7.0 / 3.0], &[14.0 / 3.0]).unwrap()[0];
        assert!(v.abs() < 1e-14);

        let g = scalar_game(&[10.0], 10.0, 0.7);
        assert_eq!(g.partial_gradient(0, &[0.0], &[0.0]).unwrap(), vec![0.0]);
        assert!(g.partial_gradient(0, &[0.0, 1.0], &[0.0]).is_err());
        assert!(g.partial_gradient(3, &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn pseudo_gradient_vanishes_at_symmetric_interior_equilibrium() {
        let g = scalar_game(&[3.0, 3.0], 10.0, 1.0);
        let phi = pseudo_gradient(&g, &[vec![7.0 / 3.0], vec![7.0 / 3.0]]).unwrap();
        assert!(phi.iter().flatten().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn pseudo_gradient_at_boundary_equilibrium() {
        let g = scalar_game(&[3.0, 9.0], 10.0, 1.0);
        let x = vec![vec![2.5], vec![2.0]];
        assert_eq!(pseudo_gradient(&g, &x).unwrap(), vec![vec![0.0], vec![5.5]]);
        assert_eq!(pseudo_gradient(&g, &x).unwrap(), pseudo_gradient(&g, &x).unwrap());
    }

    #[test]
    fn pseudo_gradient_checks_profile_shape() {
        let g = scalar_game(&[3.0, 9.0], 10.0, 1.0);
        assert!(pseudo_gradient(&g, &[vec![2.5]]).is_err());
        assert!(pseudo_gradient(&g, &[vec![2.5], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn constants_of_two_player_toy() {
        let g = scalar_game(&[3.0, 3.0], 10.0, 1.0);
        let k = game_constants(&g, &NoiseModel::standard(&g, true));
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let (a, b) = (2.0f64, 1.0f64);
        let eig_lo = a - b;
        let eig_hi = a + b;
        assert_eq!(k.mu, eig_lo);
        assert_eq!(k.lip, eig_hi);
        assert_eq!(k.lip_f, vec![1.0, 1.0]);
        assert_eq!(k.m_i, vec![10.0, 10.0]);
        assert_eq!(k.m_h, 20.0);
        let nu_sq_i = 109.0 / 192.0;
        assert!((k.nu_i[0] * k.nu_i[0] - nu_sq_i).abs() < 1e-14);
        assert!((k.nu_sq - 2.0 * nu_sq_i).abs() < 1e-14);
    }

    #[test]
    fn constants_of_default_instance_respect_slope_ranges() {
        let (g, noise) = random_instance::<f64>(11);
        let k = game_constants(&g, &noise);
        assert!(k.mu >= 0.5 && k.lip <= 21.0 && k.lip >= k.mu);
        for &m in &k.m_i {
            assert!((m - 10.0 * 3f64.sqrt()).abs() < 1e-12);
        }
        assert!((k.m_h - k.m_i.iter().sum::<f64>()).abs() < 1e-9);
        let expect: f64 = g
            .firms()
            .iter()
            .map(|f| {
                (0..3)
                    .map(|l| ((f.c[l] / 8.0).powi(2) + (g.market().d[l] / 8.0).powi(2)) / 3.0)
                    .sum::<f64>()
            })
            .sum();
        assert!((k.nu_sq - expect).abs() < 1e-12);
        assert_eq!(game_constants(&g, &NoiseModel::disabled(&g)).nu_sq, 0.0);
    }

    #[test]
    fn default_instance_ranges_and_determinism() {
        let (g, noise) = random_instance::<f64>(3);
        assert_eq!(g.n_players(), 20);
        assert_eq!(g.n_markets(), 3);
        for f in g.firms() {
            assert!(f.c.iter().all(|&c| (3.0..=4.0).contains(&c)));
            assert_eq!(f.capacity.lower, vec![2.0; 3]);
            assert_eq!(f.capacity.upper, vec![10.0; 3]);
        }
        assert!(g.market().d.iter().all(|&d| (10.0..=10.5).contains(&d)));
        assert!(g.market().b.iter().all(|&b| (0.5..=1.0).contains(&b)));
        assert_eq!(noise.cost_halfwidth[4][1], g.firms()[4].c[1] / 8.0);
        assert_eq!(noise.price_halfwidth[2], g.market().d[2] / 8.0);
        let (g2, noise2) = random_instance::<f64>(3);
        assert_eq!(g, g2);
        assert_eq!(noise, noise2);
        let (g3, _) = random_instance::<f64>(4);
        assert_ne!(g, g3);
    }

    #[test]
    fn disabled_noise_is_exact() {
        let (g, _) = random_instance::<f64>(1);
        let noise = NoiseModel::disabled(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = vec![3.0, 4.0, 5.0];
        let z = vec![60.0, 70.0, 80.0];
        assert_eq!(
            sample_gradient(&g, &noise, &mut rng, 2, &x, &z).unwrap(),
            g.partial_gradient(2, &x, &z).unwrap()
        );
    }

    #[test]
    fn noise_sample_mean_and_variance() {
        let g = scalar_game(&[3.0], 10.0, 1.0);
        let noise = NoiseModel::standard(&g, true);
        let nu_sq = noise.variance_bound(0);
        assert!((nu_sq - 109.0 / 192.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let m = 100_000;
        let f = g.partial_gradient(0, &[4.0], &[5.0]).unwrap()[0];
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..m {
            let q = sample_gradient(&g, &noise, &mut rng, 0, &[4.0], &[5.0]).unwrap()[0];
            sum += q;
            sum_sq += (q - f) * (q - f);
        }
        let mean = sum / m as f64;
        assert!((mean - f).abs() <= 3.0 * nu_sq.sqrt() / (m as f64).sqrt());
        assert!((sum_sq / m as f64 - nu_sq).abs() < 0.02 * nu_sq);
    }

    #[test]
    fn pseudo_gradient_bound_dominates_corner_values() {
        let (g, _) = random_instance::<f64>(9);
        for corner in [2.0, 10.0] {
            let x = vec![vec![corner; 3]; 20];
            let phi = pseudo_gradient(&g, &x).unwrap();
            for (i, blk) in phi.iter().enumerate() {
                assert!(crate::scalar::norm(blk) <= g.pseudo_gradient_norm_bound(i) + 1e-12);
            }
        }
    }

    fn random_point(g: &CournotGame<f64>, rng: &mut ChaCha8Rng) -> Profile<f64> {
        (0..g.n_players())
            .map(|i| {
                let s = g.strategy_set(i);
                (0..g.dim()).map(|l| rng.random_range(s.lower[l]..=s.upper[l])).collect()
            })
            .collect()
    }

    #[test]
    fn strong_monotonicity_lipschitz_and_affinity_on_samples() {
        let (g, noise) = random_instance::<f64>(5);
        let k = game_constants(&g, &noise);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let zero = vec![vec![0.0; 3]; 20];
        let phi0 = flat(&pseudo_gradient(&g, &zero).unwrap());
        for _ in 0..1000 {
            let x = random_point(&g, &mut rng);
            let y = random_point(&g, &mut rng);
            let px = flat(&pseudo_gradient(&g, &x).unwrap());
            let py = flat(&pseudo_gradient(&g, &y).unwrap());
            let dphi: Vec<f64> = px.iter().zip(&py).map(|(a, b)| a - b).collect();
            let dx: Vec<f64> = flat(&x).iter().zip(flat(&y)).map(|(a, b)| a - b).collect();
            let d2 = dot(&dx, &dx);
            assert!(dot(&dphi, &dx) >= k.mu * d2 - 1e-10);
            assert!(norm(&dphi) <= k.lip * d2.sqrt() + 1e-10);

            let xy: Profile<f64> = x
                .iter()
                .zip(&y)
                .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p + q).collect())
                .collect();
            let pxy = flat(&pseudo_gradient(&g, &xy).unwrap());
            let lin = |p: &[f64]| -> Vec<f64> { p.iter().zip(&phi0).map(|(a, b)| a - b).collect() };
            let lhs = lin(&pxy);
            let rhs: Vec<f64> = lin(&px).iter().zip(lin(&py)).map(|(a, b)| a + b).collect();
            assert!(dist_sq(&lhs, &rhs).sqrt() <= 1e-12 * (1.0 + norm(&lhs)));
        }
    }

    #[test]
    fn game_rejects_invalid_parameters() {
        let firm = FirmParams {
            c: vec![3.0],
            capacity: BoxSet { lower: vec![2.0], upper: vec![10.0] },
        };
        assert!(CournotGame::new(vec![firm.clone()], MarketParams { d: vec![-1.0], b: vec![1.0] }).is_err());
        assert!(CournotGame::new(vec![firm.clone()], MarketParams { d: vec![1.0], b: vec![0.0] }).is_err());
        assert!(CournotGame::new(vec![firm.clone()], MarketParams { d: vec![1.0, 2.0], b: vec![1.0, 1.0] }).is_err());
        let bad = FirmParams {
            c: vec![3.0],
            capacity: BoxSet { lower: vec![5.0], upper: vec![5.0] },
        };
        assert!(CournotGame::new(vec![bad], MarketParams { d: vec![1.0], b: vec![1.0] }).is_err());
        assert!(CournotGame::<f64>::new(vec![], MarketParams { d: vec![1.0], b: vec![1.0] }).is_err());
    }
}
