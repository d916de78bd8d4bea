//! Distributed Nash-equilibrium seeking for stochastic aggregative games.
//!
//! Players hold local strategies, exchange aggregate estimates over a
//! time-varying network and update with single noisy gradient samples. The
//! numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! experiment harness works in `f64`.
//!
//! ```
//! use aggnash::{Game, oracle::solve_ne, game::{FirmParams, MarketParams}, mirror::BoxSet};
//!
//! let firm = |c: f64| FirmParams { c: vec![c], capacity: BoxSet::new(vec![2.0], vec![10.0]).unwrap() };
//! let game = Game::new(vec![firm(3.0), firm(3.0)], MarketParams { d: vec![10.0], b: vec![1.0] }).unwrap();
//! let sol = solve_ne(&game, 3.0, 1e-12).unwrap();
//! assert!((sol.x_star[0][0] - 7.0 / 3.0).abs() < 1e-10);
//! ```

// `!(a > b)` is used deliberately so NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod error;
pub mod game;
pub mod harness;
pub mod mirror;
pub mod network;
pub mod oracle;
pub mod scalar;

pub use algorithms::{Algorithm, Schedule, StepRule};
pub use error::{Error, Result};
pub use game::{AggregativeGame, CournotGame, NoiseModel, Profile};
pub use mirror::{BoxSet, Euclidean, Regularizer};
pub use network::{GraphSchedule, MixingMatrix};
pub use scalar::Scalar;

pub type Game = CournotGame<f64>;
pub type Noise = NoiseModel<f64>;
pub type Graphs = GraphSchedule<f64>;
pub type Mixing = MixingMatrix<f64>;
pub type Box64 = BoxSet<f64>;
pub type Schedule64 = Schedule<f64>;

pub type Game32 = CournotGame<f32>;
pub type Noise32 = NoiseModel<f32>;
pub type Graphs32 = GraphSchedule<f32>;
